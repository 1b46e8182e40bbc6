"""Connection-trace ladders: transgression forms and their ghost descent.

The curvature matrix of the Levi-Civita connection satisfies R = dG + G^2
for the connection 1-form matrix G, so traces of curvature powers are
exterior derivatives of transgression forms.  This module builds those
forms for any p, verifies the characteristic identity, and runs the scale
ghost ladder that descends from it, including the anomaly 1-form and
spectator factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

from . import matform
from .brst import TaggedElement, apply_d
from .descent import (
    DescentRung,
    TotalForm,
    _cache,
    _enforce_min_trust,
    _ghost_grad_raised,
    verify_descent_chain,
)
from .geometry import GeometryBundle, _tensor_trust
from .numpoly import _min_trust, rat
from .reports import FAIL, PASS, VACUOUS, CheckReport, residual_report

CS_MUTATIONS = ("perturb-alpha-coefficient",)


def _check_mutations(mutations):
    for mut in mutations:
        if mut not in CS_MUTATIONS:
            raise ValueError("unknown mutation: %s" % mut)


def _require_weyl_mode(ctx):
    if ctx.mode != "weyl-only":
        raise ValueError("weyl-only mode required for scale-variation checks")


# -- domain types ------------------------------------------------------------

@dataclass
class MatrixForm:
    """Square matrix of graded elements sharing one parity.

    Wraps the raw entry grid used by the matrix helpers; the parity
    declares how entries commute, so mixed-parity grids are rejected.
    """

    entries: List[List[TaggedElement]]
    parity: int

    def __post_init__(self):
        for row in self.entries:
            for el in row:
                if el.parity is not None and el.parity != self.parity \
                        and not (el.body.is_zero() and el.image.is_zero()):
                    raise ValueError("matrix entries must share parity")

    @property
    def size(self) -> int:
        return len(self.entries)

    @classmethod
    def connection(cls, bundle: GeometryBundle) -> "MatrixForm":
        return cls(bundle.conn_1form, parity=1)

    @classmethod
    def curvature(cls, bundle: GeometryBundle) -> "MatrixForm":
        return cls(bundle.curv_2form, parity=0)

    @classmethod
    def scale_bracket(cls, bundle: GeometryBundle) -> "MatrixForm":
        """Entries: raised ghost gradient times lowered differential,
        minus curvature.  Parity even, bidegrees (1,1) and (0,2)."""
        return cls(_bracket_entries(bundle), parity=0)


@dataclass
class CharClass:
    """Spectator factor: the trace of an even curvature power."""

    label: int
    form: TaggedElement


# -- cached ingredients ------------------------------------------------------

def _bracket_entries(bundle: GeometryBundle):
    store = _cache(bundle)
    if "cs_bracket" not in store:
        n = bundle.dim
        up = _ghost_grad_raised(bundle)
        dxd = bundle.dx_down
        R = bundle.curv_2form
        store["cs_bracket"] = [[up[i] * dxd[j] - R[i][j] for j in range(n)]
                               for i in range(n)]
    return store["cs_bracket"]


def _trace_curv_power(bundle: GeometryBundle, exponent: int) -> TaggedElement:
    store = _cache(bundle)
    key = "cs_trace_%d" % exponent
    if key not in store:
        store[key] = matform.mat_trace_of_power(bundle.curv_2form, exponent)
    return store[key]


def char_class(bundle: GeometryBundle, K: int) -> CharClass:
    if K < 1:
        raise ValueError("class label must be positive")
    return CharClass(K, _trace_curv_power(bundle, 2 * K))


# -- transgression -----------------------------------------------------------

def cs_form(bundle: GeometryBundle, p: int) -> TaggedElement:
    """Transgression form of the 2p-th curvature trace.

    Exact parameter integration of the interpolating connection turns
    the integral into a rational weight 1/(degree+1) per word in the
    letters dG and G^2; the result is a (4p-1)-form.
    """
    n = bundle.dim
    if n < 4 * p - 1:
        raise ValueError(
            "dimension too small to host a %d-form" % (4 * p - 1))
    store = _cache(bundle)
    key = "cs_form_%d" % p
    if key in store:
        return store[key]
    G = bundle.conn_1form
    dG = matform.mat_apply_d(G)
    G2 = matform.mat_mul(G, G)
    acc = None

    def walk(prefix, remaining, degree):
        # the last letter only ever feeds a trace, so skip the full product
        nonlocal acc
        for letter, weight in ((dG, 1), (G2, 2)):
            if remaining == 1:
                term = matform.mat_mul_trace(prefix, letter) \
                    * rat(2 * p, degree + weight + 1)
                acc = term if acc is None else acc + term
            else:
                walk(matform.mat_mul(prefix, letter), remaining - 1,
                     degree + weight)

    walk(G, 2 * p - 1, 0)
    store[key] = acc
    return acc


def cs_exterior_check(bundle: GeometryBundle, p: int, ambient_n: int,
                      min_trust: Optional[int] = None) -> CheckReport:
    """d(transgression) minus the curvature trace, in dimension ambient_n.

    At ambient_n = 4p-1 both sides are above the top form degree and the
    check is vacuous; one dimension higher it is the full identity.
    """
    if ambient_n != bundle.dim:
        raise ValueError("bundle dimension %d does not match ambient %d"
                         % (bundle.dim, ambient_n))
    L = cs_form(bundle, p)
    f = _trace_curv_power(bundle, 2 * p)
    residual = apply_d(L) - f
    cap = _min_trust(_tensor_trust(L, shift=1), _tensor_trust(f))
    return residual_report(
        "cs-exterior(p=%d)" % p, bundle.dim, bundle.ctx.seed,
        [residual.body, residual.image], min_trust=min_trust,
        anchor="transgression derivative reproduces the curvature trace",
        vacuous=ambient_n == 4 * p - 1, trust_cap=cap)


# -- ghost ladder ------------------------------------------------------------

def alpha_bracket(bundle: GeometryBundle, p: int, m: int,
                  mutations=()) -> TaggedElement:
    """Ladder generator with 2m-1 connection factors.

    Trace of the (2p-m)-th scale-bracket power against an odd connection
    power, weighted by -1/(2m-1).
    """
    _check_mutations(mutations)
    if not 1 <= m <= 2 * p:
        raise ValueError("bracket index out of range")
    G = bundle.conn_1form
    gpow = G if m == 1 else matform.mat_power(G, 2 * m - 1)
    if m == 2 * p:
        trace = matform.mat_trace(gpow)
    else:
        bpow = matform.mat_power(_bracket_entries(bundle), 2 * p - m)
        trace = matform.mat_mul_trace(bpow, gpow)
    coef = rat(-1, 2 * m - 1)
    if "perturb-alpha-coefficient" in mutations and m == 1:
        coef = coef * rat(8, 7)
    return trace * coef


def alpha_tilde_bottom(bundle: GeometryBundle, p: int) -> TaggedElement:
    """Pure-ghost ladder bottom: twice the ghost times the (2p-1)-th
    power of its derivative."""
    ghost = bundle.ctx.weyl_ghost
    dgh = apply_d(ghost)
    acc = ghost
    for _ in range(2 * p - 1):
        acc = acc * dgh
    return acc * 2


def alpha_tilde(bundle: GeometryBundle, p: int,
                mutations=()) -> TaggedElement:
    """Total ladder form: pure-ghost bottom plus all bracket generators."""
    _check_mutations(mutations)
    acc = alpha_tilde_bottom(bundle, p)
    for m in range(1, 2 * p + 1):
        acc = acc + alpha_bracket(bundle, p, m, mutations)
    return acc


def _ladder_components(bundle: GeometryBundle, p: int, mutations=()):
    tilde = alpha_tilde(bundle, p, mutations)
    total = 4 * p - 1
    return [tilde.extract_component(total - k, k) for k in range(2 * p + 1)]


def _ladder_residuals(bundle: GeometryBundle, comps, f):
    """Bidegree equations of (variation + derivative) = curvature trace."""
    residuals = [comps[0].body.exterior_d() - f.body]
    for k in range(len(comps) - 1):
        residuals.append(comps[k].image + comps[k + 1].body.exterior_d())
    residuals.append(comps[-1].image)
    return residuals


def lemma3_verify(bundle: GeometryBundle, p: int, ambient_n: int,
                  min_trust: Optional[int] = None,
                  mutations=()) -> CheckReport:
    """Total variation of the ladder form reproduces the curvature trace.

    Checked one bidegree at a time: the top equation carries the trace,
    the mixed equations telescope, the bottom is closed on its own.
    """
    _require_weyl_mode(bundle.ctx)
    if ambient_n != bundle.dim:
        raise ValueError("bundle dimension %d does not match ambient %d"
                         % (bundle.dim, ambient_n))
    if ambient_n < 4 * p - 1:
        raise ValueError(
            "dimension too small to host a %d-form" % (4 * p - 1))
    comps = _ladder_components(bundle, p, mutations)
    f = _trace_curv_power(bundle, 2 * p)
    residuals = _ladder_residuals(bundle, comps, f)
    notes = {}
    if ambient_n == 4 * p - 1:
        notes["top-form"] = "vacuous"
    for k, res in enumerate(residuals):
        notes["rung-%d" % k] = FAIL if res.certified_residual_terms() else PASS
    cap = _min_trust(_tensor_trust(comps, shift=1), _tensor_trust(f))
    return residual_report(
        "cs-ghost-ladder(p=%d)" % p, ambient_n, bundle.ctx.seed, residuals,
        min_trust=min_trust,
        anchor="ladder variation telescopes onto the curvature trace",
        notes=notes, trust_cap=cap)


# -- anomaly form and the dimension-(4p-1) descent ---------------------------

def anomaly_one_form(bundle: GeometryBundle, p: int) -> TaggedElement:
    """Ghost-1 ladder solution, summed over nonnegative curvature powers.

    Term m carries 2m-1 connection factors and 2p-m-1 curvature factors
    between a lowered differential and a raised ghost gradient; the sum
    stops at m = 2p-1, where the curvature power reaches zero.
    """
    n = bundle.dim
    G = bundle.conn_1form
    R = bundle.curv_2form
    dxd = bundle.dx_down
    up = _ghost_grad_raised(bundle)
    acc = None
    for m in range(1, 2 * p):
        mat = G if m == 1 else matform.mat_power(G, 2 * m - 1)
        if 2 * p - m - 1 > 0:
            mat = matform.mat_mul(mat, matform.mat_power(R, 2 * p - m - 1))
        coef = rat((-1) ** m, 2 * m - 1)
        for al in range(n):
            for be in range(n):
                term = dxd[al] * mat[al][be] * up[be] * coef
                acc = term if acc is None else acc + term
    return acc


def cs_descent_verify(bundle: GeometryBundle, p: int,
                      min_trust: Optional[int] = None,
                      mutations=()):
    """Ghost ladder in its home dimension 4p-1, rung by rung.

    Splits the total ladder form into bidegree components and verifies
    the chain, then replays the ghost-1 equation with the explicit
    anomaly form and pins the ghost-0 component to the transgression.
    """
    _require_weyl_mode(bundle.ctx)
    n = bundle.dim
    if n != 4 * p - 1:
        raise ValueError(
            "ambient dimension %d required for the ghost ladder"
            % (4 * p - 1))
    comps = _ladder_components(bundle, p, mutations)
    chain = TotalForm([(k, n - k, el) for k, el in enumerate(comps)])
    report = verify_descent_chain(
        chain, top_is_cocycle=True, name="cs-descent(p=%d)" % p, dim=n,
        seed=bundle.ctx.seed,
        anchor="transgression ladder closes in its home dimension")
    ladder_ghost1 = report.rungs[1].status

    L = cs_form(bundle, p)
    diff = comps[0] - L
    ghost0_ok = diff.body.certified_zero() and diff.image.certified_zero()
    report.notes["ghost0-equals-cs-form"] = PASS if ghost0_ok else FAIL

    a = anomaly_one_form(bundle, p)
    rung_res = L.image + a.body.exterior_d()
    bad = rung_res.certified_residual_terms()
    cap = _min_trust(_tensor_trust(L), _tensor_trust(a, shift=1))
    report.rungs.append(DescentRung(
        1, n, PASS if bad == 0 else FAIL,
        _min_trust(cap, rung_res.trust()), bad))
    report.notes["anomaly-rung"] = PASS if bad == 0 else FAIL
    if bad and ladder_ghost1 == PASS:
        # ladder closed but the explicit solution did not: the summation
        # range of the anomaly form is the suspect, not the arithmetic
        report.notes["anomaly-form"] = "unresolved"

    bottom = comps[-1] - alpha_tilde_bottom(bundle, p)
    bottom_ok = bottom.body.certified_zero() and bottom.image.certified_zero()
    report.notes["bottom-is-pure-ghost"] = PASS if bottom_ok else FAIL

    if not (ghost0_ok and bottom_ok) or bad:
        report.status = FAIL
    report.trust = _min_trust(report.trust, cap)
    _enforce_min_trust(report, min_trust)
    return report


# -- spectator products ------------------------------------------------------

def spectator_verify(bundle: GeometryBundle, p: int,
                     K_list: Sequence[int],
                     min_trust: Optional[int] = None) -> CheckReport:
    """Characteristic factors ride through the ladder unchanged.

    Verifies closure and scale-closure of each factor, then the ghost-1
    rung of the product of the transgression with all factors.
    """
    _require_weyl_mode(bundle.ctx)
    needed = 4 * p - 1 + 4 * sum(K_list)
    if bundle.dim != needed:
        raise ValueError("requires dimension %d" % needed)
    notes = {}
    residuals = []
    product = None
    for K in K_list:
        f = char_class(bundle, K).form
        closed = f.body.exterior_d()
        scale = f.image
        notes["d-closed-K%d" % K] = \
            FAIL if closed.certified_residual_terms() else PASS
        notes["scale-closed-K%d" % K] = \
            FAIL if scale.certified_residual_terms() else PASS
        residuals.extend([closed, scale])
        product = f if product is None else product * f

    L = cs_form(bundle, p)
    a = anomaly_one_form(bundle, p)
    if product is not None:
        L = L * product
        a = a * product
    rung = L.image + a.body.exterior_d()
    notes["product-rung"] = FAIL if rung.certified_residual_terms() else PASS
    residuals.append(rung)
    cap = _min_trust(_tensor_trust(L), _tensor_trust(a, shift=1))
    return residual_report(
        "cs-spectator(p=%d)" % p, bundle.dim, bundle.ctx.seed, residuals,
        min_trust=min_trust,
        anchor="characteristic factors are spectators in the ladder",
        notes=notes, trust_cap=cap)
