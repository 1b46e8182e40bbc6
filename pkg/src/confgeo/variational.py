"""Euler-Lagrange density of the odd-dimensional connection-trace action.

In dimension n = 4p-1 the metric variation of the transgression-form
action has a closed form: an epsilon-contracted product of curvature
component matrices A, and its symmetrized covariant divergence E.  The
module builds both from a geometry bundle and certifies the consequence
set that pins the variation down: tracelessness, covariant conservation,
strict scale invariance of the mixed-index density, and (for p = 1) the
proportionality to the index-raised Cotton density.

The variation itself is not re-derived by a jet-level variational
engine; pointwise total-divergence bookkeeping is vacuous in this
evaluation model, so the consequence set is the testable content.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

from . import matform
from .brst import TaggedElement
from .descent import _cache, _enforce_min_trust
from .geometry import (
    GeometryBundle,
    _tensor_trust,
    covariant_derivative,
    eps_permutations,
    eps_sign,
)
from .numpoly import _min_trust, rat
from .reports import FAIL, PASS, CheckReport, residual_report

VARIATIONAL_MUTATIONS = ("drop-symmetrization",)

SOURCES = ("riemann", "weyl")


def _check_mutations(mutations):
    for mut in mutations:
        if mut not in VARIATIONAL_MUTATIONS:
            raise ValueError("unknown mutation: %s" % mut)


def _require_weyl_mode(ctx):
    if ctx.mode != "weyl-only":
        raise ValueError("weyl-only mode required for scale-variation checks")


def _require_home_dimension(bundle: GeometryBundle, p: int):
    if p < 1:
        raise ValueError("ladder order must be positive")
    if bundle.dim != 4 * p - 1:
        raise ValueError("ambient dimension %d required" % (4 * p - 1))


# -- domain types ------------------------------------------------------------

@dataclass
class ADensity:
    """Epsilon-contracted curvature product with one open matrix slot.

    components[mu][nu][lam] carries the density whose covariant
    divergence in lam builds the variation; raising lam with the inverse
    metric gives a tensor antisymmetric in the two raised slots.
    """

    dim: int
    order: int
    source: str
    components: List[List[List[TaggedElement]]]

    def raised(self, bundle: GeometryBundle):
        """Last slot raised: components[mu][nu][lam] with all indices up."""
        n = self.dim
        ginv = bundle.metric_inv
        out = []
        for mu in range(n):
            plane = []
            for nu in range(n):
                row = []
                for lam in range(n):
                    acc = None
                    for sig in range(n):
                        term = ginv[lam][sig] * self.components[mu][nu][sig]
                        acc = term if acc is None else acc + term
                    row.append(acc)
                plane.append(row)
            out.append(plane)
        return out

    def antisymmetry_residuals(self, bundle: GeometryBundle):
        """Symmetric parts of the raised pair; all must vanish."""
        n = self.dim
        up = self.raised(bundle)
        residuals = []
        for mu in range(n):
            for nu in range(n):
                for lam in range(nu, n):
                    res = up[mu][nu][lam] + up[mu][lam][nu]
                    residuals.append(res.body)
                    residuals.append(res.image)
        return residuals


@dataclass
class EDensity:
    """Symmetric tensor density from the divergence of the open slot."""

    dim: int
    order: int
    source: str
    symmetrized: bool
    components: List[List[TaggedElement]]


# -- the density pair --------------------------------------------------------

def _source_tensor(bundle: GeometryBundle, source: str):
    if source not in SOURCES:
        raise ValueError("unknown curvature source: %s" % source)
    return bundle.riemann if source == "riemann" else bundle.weyl


def _component_matrix(src, a: int, b: int):
    n = len(src)
    return [[src[al][be][a][b] for be in range(n)] for al in range(n)]


def a_density(bundle: GeometryBundle, p: int, source: str = "riemann") -> ADensity:
    """Contract 2p-1 curvature component matrices with the epsilon symbol.

    The first epsilon slot stays free, the rest feed matrix form slots in
    pairs; the matrix product keeps one row and one column index open.
    Each component matrix is antisymmetric in its form slots, so the
    permutation sum runs over ascending pairs and doubles per factor.
    """
    _require_home_dimension(bundle, p)
    n = bundle.dim
    src = _source_tensor(bundle, source)
    key = "var_a_%s" % source
    cache = _cache(bundle)
    if key in cache:
        return cache[key]

    mats = {}

    def factor(a, b):
        if (a, b) not in mats:
            mats[(a, b)] = _component_matrix(src, a, b)
        return mats[(a, b)]

    components = [[[None] * n for _ in range(n)] for _ in range(n)]
    orient = rat(2 ** (2 * p - 1), 1)

    def deposit(mu, flat, product):
        sign = eps_sign((mu,) + flat)
        if sign == 0:
            return
        for nu in range(n):
            for lam in range(n):
                term = product[nu][lam] * (orient * sign)
                cur = components[mu][nu][lam]
                components[mu][nu][lam] = term if cur is None else cur + term

    def walk(mu, remaining, flat, product):
        if not remaining:
            deposit(mu, flat, product)
            return
        # next block: any ascending pair; orientation absorbed into orient
        for i in range(len(remaining)):
            for j in range(i + 1, len(remaining)):
                first, second = remaining[i], remaining[j]
                mat = factor(first, second)
                rest = tuple(k for k in remaining if k not in (first, second))
                nxt = mat if product is None else matform.mat_mul(product, mat)
                walk(mu, rest, flat + (first, second), nxt)

    for mu in range(n):
        rest = tuple(i for i in range(n) if i != mu)
        walk(mu, rest, (), None)

    out = ADensity(n, p, source, components)
    cache[key] = out
    return out


def e_density(bundle: GeometryBundle, p: int, source: str = "riemann",
              mutations=()) -> EDensity:
    """Raised covariant divergence of the pair-symmetrized open slot.

    The open-slot density has unit weight (the epsilon symbol carries
    it), so the divergence runs at density weight one.  A registered
    mutation drops the symmetrization over the two free slots, which
    silently breaks the trace identity downstream.
    """
    _check_mutations(mutations)
    _require_home_dimension(bundle, p)
    n = bundle.dim
    symmetrized = "drop-symmetrization" not in mutations
    key = "var_e_%s_%d" % (source, int(symmetrized))
    cache = _cache(bundle)
    if key in cache:
        return cache[key]

    A = a_density(bundle, p, source).components
    if symmetrized:
        half = rat(1, 2)
        base = [[[(A[mu][nu][lam] + A[nu][mu][lam]) * half for lam in range(n)]
                 for nu in range(n)] for mu in range(n)]
    else:
        base = A
    div = covariant_derivative(bundle, base, "uud", weight=1)
    ginv = bundle.metric_inv
    norm = rat(1, 2 ** (2 * p - 1))
    components = [[None] * n for _ in range(n)]
    for mu in range(n):
        for nu in range(n):
            acc = None
            for lam in range(n):
                for sig in range(n):
                    term = ginv[lam][sig] * div[sig][mu][nu][lam]
                    acc = term if acc is None else acc + term
            components[mu][nu] = acc * norm

    out = EDensity(n, p, source, symmetrized, components)
    cache[key] = out
    return out


# -- consequence checks ------------------------------------------------------

def eps_trace_residuals(bundle: GeometryBundle, p: int):
    """Closed-trace cousin of the open-slot density, one free lower index.

    Antisymmetrizing 4p-1 of the 4p curvature slots while the last one
    is free forces every component to zero; this is the mechanism behind
    conservation, and it holds before any symmetrization.
    """
    _require_home_dimension(bundle, p)
    src = bundle.riemann
    mats = {}

    def factor(a, b):
        if (a, b) not in mats:
            mats[(a, b)] = _component_matrix(src, a, b)
        return mats[(a, b)]

    return _eps_trace_sum(bundle, p, factor)


def _eps_trace_sum(bundle: GeometryBundle, p: int, factor):
    """Sum over full permutations, ascending pairs for the closed factors."""
    n = bundle.dim
    residuals = [None] * n

    def walk(remaining, flat, product):
        if len(remaining) == 1:
            last = remaining[0]
            sign = eps_sign(flat + (last,))
            if sign == 0:
                return
            for nu in range(n):
                term = matform.mat_mul_trace(product, factor(last, nu)) * sign
                cur = residuals[nu]
                residuals[nu] = term if cur is None else cur + term
            return
        for i in range(len(remaining)):
            for j in range(i + 1, len(remaining)):
                first, second = remaining[i], remaining[j]
                mat = factor(first, second)
                rest = tuple(k for k in remaining if k not in (first, second))
                nxt = mat if product is None else matform.mat_mul(product, mat)
                walk(rest, flat + (first, second), nxt)

    walk(tuple(range(n)), (), None)
    out = []
    for res in residuals:
        out.append(res.body)
        out.append(res.image)
    return out


def verify_noether(bundle: GeometryBundle, p: int, min_trust: Optional[int] = None,
                   mutations=()) -> CheckReport:
    """Certify the consequence set of the closed-form metric variation.

    Four residual families, itemized in the notes: metric trace,
    covariant conservation at density weight one, strict scale
    invariance (tag channel equals -2 omega times the body, and the
    index-lowered density has a vanishing tag channel), and the
    closed-trace antisymmetrization lemma.
    """
    _check_mutations(mutations)
    _require_home_dimension(bundle, p)
    _require_weyl_mode(bundle.ctx)
    n = bundle.dim
    ctx = bundle.ctx
    E = e_density(bundle, p, mutations=mutations).components
    cap = _tensor_trust(E)

    trace_res = []
    acc = None
    for mu in range(n):
        for nu in range(n):
            term = ctx.metric[mu][nu] * E[mu][nu]
            acc = term if acc is None else acc + term
    trace_res.extend([acc.body, acc.image])
    trace = residual_report("noether-trace", n, ctx.seed, trace_res,
                            trust_cap=cap)

    div = covariant_derivative(bundle, E, "uu", weight=1)
    cons_res = []
    for nu in range(n):
        acc = None
        for mu in range(n):
            cur = div[mu][mu][nu]
            acc = cur if acc is None else acc + cur
        cons_res.extend([acc.body, acc.image])
    conservation = residual_report("noether-conservation", n, ctx.seed, cons_res,
                                   trust_cap=_min_trust(cap, _tensor_trust(E, shift=1)))

    omega = ctx.weyl_ghost.body
    scale_res = []
    for mu in range(n):
        for nu in range(n):
            scale_res.append(E[mu][nu].image + omega * E[mu][nu].body * 2)
            lowered = None
            for rho in range(n):
                term = ctx.metric[nu][rho] * E[mu][rho]
                lowered = term if lowered is None else lowered + term
            scale_res.append(lowered.image)
    scale = residual_report("noether-scale", n, ctx.seed, scale_res,
                            trust_cap=cap)

    lemma = residual_report("noether-eps-trace", n, ctx.seed,
                            eps_trace_residuals(bundle, p),
                            trust_cap=_tensor_trust(bundle.riemann))

    parts = {"trace": trace, "conservation": conservation,
             "scale-invariance": scale, "eps-trace-lemma": lemma}
    status = PASS
    trust = None
    notes = {}
    residual_terms = 0
    for label in sorted(parts):
        rep = parts[label]
        notes[label] = rep.status
        trust = _min_trust(trust, rep.trust)
        residual_terms += rep.residual_terms
        if rep.status == FAIL:
            status = FAIL
    report = CheckReport("noether(p=%d)" % p, n, ctx.seed, status, trust,
                         residual_terms,
                         anchor="the variation is traceless, conserved, and "
                                "strictly scale invariant with one index down",
                         notes=notes)
    _enforce_min_trust(report, min_trust)
    return report


def source_agreement_check(bundle: GeometryBundle, p: int,
                           min_trust: Optional[int] = None) -> CheckReport:
    """Compare the density pair built from the full and trace-free tensors.

    The trace identity that swaps curvature powers inside closed traces
    does not reach the open matrix slot here: in the home dimension of
    the p = 1 ladder the trace-free tensor vanishes identically while
    the full-curvature density does not, so this check reports the
    honest disagreement rather than asserting the swap.
    """
    _require_home_dimension(bundle, p)
    n = bundle.dim
    ctx = bundle.ctx
    AR = a_density(bundle, p, "riemann").components
    AW = a_density(bundle, p, "weyl").components
    residuals = []
    for mu in range(n):
        for nu in range(n):
            for lam in range(n):
                res = AR[mu][nu][lam] - AW[mu][nu][lam]
                residuals.extend([res.body, res.image])
    ER = e_density(bundle, p, "riemann").components
    EW = e_density(bundle, p, "weyl").components
    for mu in range(n):
        for nu in range(n):
            res = ER[mu][nu] - EW[mu][nu]
            residuals.extend([res.body, res.image])
    cap = _min_trust(_tensor_trust(ER), _tensor_trust(EW))
    return residual_report("curvature-source-agreement(p=%d)" % p, n, ctx.seed,
                           residuals, min_trust=min_trust,
                           anchor="swapping full curvature for its trace-free "
                                  "part inside the density", trust_cap=cap)


# -- the three-dimensional oracle --------------------------------------------

def cotton_york_density(bundle: GeometryBundle):
    """Index-raised epsilon contraction of the Cotton tensor, n = 3 only.

    The epsilon symbol carries the density weight, so this object equals
    the metric volume factor times the raised Cotton tensor; it is the
    classical symmetric, traceless, conserved density in three
    dimensions.
    """
    n = bundle.dim
    if n != 3:
        raise ValueError("ambient dimension 3 required")
    cache = _cache(bundle)
    if "var_york" in cache:
        return cache["var_york"]
    C = bundle.cotton
    ginv = bundle.metric_inv
    out = [[None] * n for _ in range(n)]
    for perm, sign in eps_permutations(n):
        mu = perm[0]
        for nu in range(n):
            up = None
            for gam in range(n):
                term = ginv[nu][gam] * C[gam][perm[1]][perm[2]]
                up = term if up is None else up + term
            term = up * sign
            cur = out[mu][nu]
            out[mu][nu] = term if cur is None else cur + term
    cache["var_york"] = out
    return out


def fit_ratio(pairs):
    """One rational c with built = c * ref across all (built, ref) pairs.

    The candidate comes from the first nonzero reference coefficient;
    every pair must then agree on both tag channels up to trust, or the
    fit is rejected.
    """
    c = None
    for built, ref in pairs:
        if c is not None:
            break
        for mono in sorted(ref.body.terms):
            poly = ref.body.terms[mono]
            for exps, coeff in poly.terms():
                if coeff != 0:
                    c = built.body.coefficient(mono).coefficient(exps) / coeff
                    break
            if c is not None:
                break
    if c is None:
        raise ValueError("fit failed: reference density vanishes")
    for built, ref in pairs:
        res = built - ref * c
        if not (res.body.certified_zero() and res.image.certified_zero()):
            raise ValueError("fit failed: densities are not proportional")
    return c


def fit_cotton_constant(bundle: GeometryBundle):
    """Single rational ratio between the p = 1 variation and the Cotton density.

    Returns c with E = c * density, certified up to trust on every
    component and tag channel; raises when no such constant exists.  The
    value depends on every resolved sign convention, so callers fit it
    and compare across seeds instead of asserting it.
    """
    E = e_density(bundle, 1).components
    Y = cotton_york_density(bundle)
    n = bundle.dim
    pairs = []
    for mu in range(n):
        for nu in range(n):
            pairs.append((E[mu][nu], Y[mu][nu]))
    return fit_ratio(pairs)
