"""Tests for tagged forward-mode variation and the field context."""

import random

import pytest

from confgeo.numpoly import TruncatedPolynomial, random_poly, rat
from confgeo.superalg import SuperElement
from confgeo.brst import (
    TaggedElement,
    apply_d,
    build_context,
    lambda_compare,
    lambda_embed,
    tagged_arith,
    tagged_inverse,
    tagged_sqrt,
    verify_anticommute_sd,
    verify_mode_split,
    verify_nilpotency,
)

try:
    from hypothesis import given, settings, strategies as st
    HAVE_HYPOTHESIS = True
except ImportError:
    HAVE_HYPOTHESIS = False


def _random_tagged(rng, dim, parity, n_theta=4):
    gens = list(range(dim)) + [dim + j for j in range(n_theta)]
    body = SuperElement.zero(dim)
    image = SuperElement.zero(dim)
    for _ in range(3):
        k = rng.choice([c for c in range(4) if c % 2 == parity])
        mono = SuperElement.one(dim)
        for g in sorted(rng.sample(gens, k)):
            mono = mono * SuperElement.generator(dim, g)
        body = body + mono * random_poly(rng, dim, 2)
        mono2 = SuperElement.one(dim)
        for g in sorted(rng.sample(gens, (k + 1) % (len(gens) - 1))):
            mono2 = mono2 * SuperElement.generator(dim, g)
        image = image + mono2 * random_poly(rng, dim, 2)
    return TaggedElement(body, image, parity)


# -- tagged arithmetic -------------------------------------------------------

def test_odd_leibniz_rule():
    rng = random.Random(2)
    for pa in (0, 1):
        for pb in (0, 1):
            a = _random_tagged(rng, 2, pa)
            b = _random_tagged(rng, 2, pb)
            prod = tagged_arith(a, b, "mul")
            sign = -1 if pa else 1
            expected = a.image * b.body + (a.body * b.image) * sign
            assert prod.image == expected
            assert prod.body == a.body * b.body
            assert prod.parity == (pa + pb) % 2


def test_addition_parity_guard():
    rng = random.Random(3)
    a = _random_tagged(rng, 2, 0)
    b = _random_tagged(rng, 2, 1)
    with pytest.raises(ValueError):
        a + b
    z = TaggedElement.zero(2, parity=1)
    assert (a + z).parity == 0


def test_tagged_inverse_roundtrip():
    rng = random.Random(4)
    dim = 2
    body = SuperElement.from_poly(1 + random_poly(rng, dim, 2, min_degree=1)) \
        + SuperElement.dx(dim, 0) * SuperElement.dx(dim, 1) \
        * random_poly(rng, dim, 1)
    image = SuperElement.generator(dim, dim) * random_poly(rng, dim, 2) \
        + SuperElement.dx(dim, 0) * random_poly(rng, dim, 1)
    u = TaggedElement(body, image, 0)
    inv = tagged_inverse(u, 6)
    prod = u * inv
    one = (prod.body - SuperElement.one(dim))
    assert one.certified_zero()
    assert prod.image.certified_zero()


def test_tagged_sqrt_of_square():
    rng = random.Random(5)
    dim = 2
    t = TaggedElement(
        SuperElement.from_poly(1 + random_poly(rng, dim, 2, min_degree=1)),
        SuperElement.generator(dim, dim) * random_poly(rng, dim, 1),
        0)
    u = t * t
    root = tagged_sqrt(u, 6)
    assert (root.body - t.body).certified_zero()
    assert (root.image - t.image).certified_zero()


def test_inverse_rejects_odd():
    with pytest.raises(ValueError):
        tagged_inverse(TaggedElement.dx(2, 0), 4)


# -- exterior derivative -----------------------------------------------------

def test_d_of_coordinate():
    dim = 2
    x0 = TaggedElement.from_poly(TruncatedPolynomial.variable(dim, 0))
    d = apply_d(x0)
    assert d.body == SuperElement.dx(dim, 0)
    assert d.image.is_zero()


def test_d_squared_zero():
    rng = random.Random(6)
    a = _random_tagged(rng, 3, 1)
    dd = apply_d(apply_d(a))
    assert dd.body.is_zero()
    assert dd.image.is_zero()


def test_d_of_top_form():
    dim = 2
    rng = random.Random(7)
    top = TaggedElement(
        SuperElement.dx(dim, 0) * SuperElement.dx(dim, 1)
        * random_poly(rng, dim, 3),
        SuperElement.zero(dim), 0)
    assert apply_d(top).body.is_zero()


# -- field context -----------------------------------------------------------

def test_flat_weyl_only_metric_image():
    ctx = build_context(2, "lorentzian", seed=1, met_degree=0,
                        mode="weyl-only")
    g00 = ctx.metric[0][0]
    assert g00.body == SuperElement.scalar(2, -1)
    expected = ctx.weyl_ghost.body * (-2)
    assert g00.image == expected


def test_full_mode_scale_ghost_image():
    ctx = build_context(2, "euclidean", seed=3, mode="full")
    manual = SuperElement.zero(2)
    for rho in range(2):
        manual = manual + ctx.diffeo_ghost[rho].body \
            * ctx.weyl_ghost.body.partial(rho)
    assert ctx.weyl_ghost.image == manual


def test_weyl_only_ghost_images_vanish():
    ctx = build_context(3, seed=2, mode="weyl-only")
    for mu in range(3):
        assert ctx.diffeo_ghost[mu].body.is_zero()
        assert ctx.diffeo_ghost[mu].image.is_zero()
    assert ctx.weyl_ghost.image.is_zero()


def test_diffeo_only_scale_ghost_zero():
    ctx = build_context(3, seed=2, mode="diffeo-only")
    assert ctx.weyl_ghost.body.is_zero()
    assert not ctx.diffeo_ghost[0].image.is_zero()


def test_basepoint_is_flat():
    for signature, first in (("lorentzian", -1), ("euclidean", 1)):
        ctx = build_context(3, signature, seed=9)
        origin = [0, 0, 0]
        for mu in range(3):
            for nu in range(3):
                val = ctx.metric[mu][nu].body.coefficient(()).evaluate(origin)
                expect = (first if mu == 0 else 1) if mu == nu else 0
                assert val == rat(expect)


def test_metric_symmetry_and_determinism():
    a = build_context(4, seed=5)
    b = build_context(4, seed=5)
    c = build_context(4, seed=6)
    diff_seen = False
    for mu in range(4):
        for nu in range(4):
            assert a.metric[mu][nu].body == a.metric[nu][mu].body
            assert a.metric[mu][nu].body == b.metric[mu][nu].body
            assert a.metric[mu][nu].image == b.metric[mu][nu].image
            if a.metric[mu][nu].body != c.metric[mu][nu].body:
                diff_seen = True
    assert diff_seen


def test_theta_allocation_mode_independent():
    full = build_context(3, seed=4, mode="full")
    weyl = build_context(3, seed=4, mode="weyl-only")
    assert full.theta_table == weyl.theta_table


def test_image_grading():
    # the variation raises ghost degree by one and keeps form degree
    ctx = build_context(3, seed=8, mode="full")
    for mu in range(3):
        for nu in range(3):
            img = ctx.metric[mu][nu].image
            assert set(img.bidegrees()) <= {(0, 1)}
        assert set(ctx.diffeo_ghost[mu].image.bidegrees()) <= {(0, 2)}
    assert set(ctx.weyl_ghost.image.bidegrees()) <= {(0, 2)}


def test_rejects_bad_config():
    with pytest.raises(ValueError):
        build_context(1)
    with pytest.raises(ValueError):
        build_context(3, mode="nope")
    with pytest.raises(ValueError):
        build_context(3, signature="flat")
    with pytest.raises(ValueError):
        build_context(3, mutations=("unknown-mutation",))


# -- verification entry points ----------------------------------------------

@pytest.mark.parametrize("dim,mode,seed", [
    (2, "full", 1), (3, "full", 11), (3, "diffeo-only", 2),
    (4, "weyl-only", 1),
])
def test_nilpotency_passes(dim, mode, seed):
    ctx = build_context(dim, seed=seed, mode=mode)
    report = verify_nilpotency(ctx)
    assert report.status == "pass"
    assert report.residual_terms == 0
    assert report.trust is None


def test_nilpotency_detects_flipped_ghost_rule():
    ctx = build_context(3, seed=1, mode="full",
                        mutations=("flip-sdxi-sign",))
    report = verify_nilpotency(ctx)
    assert report.status == "fail"
    assert report.residual_terms > 0


@pytest.mark.parametrize("dim,mode", [(2, "full"), (4, "weyl-only")])
def test_anticommute_passes(dim, mode):
    ctx = build_context(dim, seed=1, mode=mode)
    report = verify_anticommute_sd(ctx)
    assert report.status == "pass"


def test_anticommute_flat_metric_unbounded_trust():
    ctx = build_context(3, seed=2, met_degree=0, mode="full")
    report = verify_anticommute_sd(ctx)
    assert report.status == "pass"
    assert report.trust is None


def test_mode_split():
    report = verify_mode_split(3, "euclidean", seed=7)
    assert report.status == "pass"
    assert report.residual_terms == 0


# -- dual-route consistency --------------------------------------------------

def _both_routes(ctx, expr):
    embedded, lam = lambda_embed(ctx)
    tagged = expr(ctx)
    plain = expr(embedded)
    return lambda_compare(tagged, plain.body, lam)


def test_lambda_route_product():
    ctx = build_context(3, seed=3, mode="full")

    def expr(c):
        return c.metric[0][0] * c.metric[1][1] - c.metric[0][1] * c.metric[0][1]

    body_diff, image_diff = _both_routes(ctx, expr)
    assert body_diff.is_zero()
    assert image_diff.is_zero()


def test_lambda_route_series_and_d():
    ctx = build_context(2, seed=4, mode="full")
    order = 6

    def expr(c):
        u = c.metric[0][0] * c.metric[1][1]
        return apply_d(u.series_inverse(order)) * c.diffeo_ghost[0]

    body_diff, image_diff = _both_routes(ctx, expr)
    assert body_diff.certified_zero()
    assert image_diff.certified_zero()


def test_lambda_route_sqrt():
    ctx = build_context(2, "euclidean", seed=5, mode="weyl-only")
    order = 6

    def expr(c):
        u = c.metric[0][0] * c.metric[1][1]
        return u.series_sqrt(order)

    body_diff, image_diff = _both_routes(ctx, expr)
    assert body_diff.certified_zero()
    assert image_diff.certified_zero()


if HAVE_HYPOTHESIS:

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=20, deadline=None)
    def test_leibniz_property(seed):
        rng = random.Random(seed)
        a = _random_tagged(rng, 2, rng.randint(0, 1))
        b = _random_tagged(rng, 2, rng.randint(0, 1))
        prod = a * b
        sign = -1 if a.parity else 1
        assert prod.image == a.image * b.body + (a.body * b.image) * sign

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=10, deadline=None)
    def test_apply_d_leibniz_property(seed):
        rng = random.Random(seed)
        a = _random_tagged(rng, 2, rng.randint(0, 1))
        b = _random_tagged(rng, 2, rng.randint(0, 1))
        lhs = apply_d(a * b)
        sign = -1 if a.parity else 1
        rhs = apply_d(a) * b + (a * apply_d(b)) * sign
        assert lhs.body == rhs.body
        assert lhs.image == rhs.image
