"""Curvature stack over a field context, with tagged variations throughout.

Builds the inverse metric by a terminating geometric series around the
flat basepoint, the volume factor by an exact determinant plus truncated
square root, then the connection coefficients and the curvature family
(Riemann, Ricci, scalar, Schouten, Weyl, Cotton) together with their
2-form packagings.  Every object is a TaggedElement, so the odd variation
of each tensor is available without extra work.

The relative sign between the Cotton tensor and the antisymmetrized
covariant derivative of the Schouten tensor is not fixed a priori; it is
resolved once per process by testing both candidates against the
covariant-differential identity for the Weyl 2-form on random
four-dimensional jets, and the winning sign is recorded in reports.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import List, Optional

from .numpoly import _min_trust, rat
from .superalg import SuperElement
from .brst import (
    FieldContext,
    TaggedElement,
    apply_d,
    build_context,
    lambda_compare,
    lambda_embed,
    strip_tags,
)
from . import matform
from .reports import CheckReport, residual_report

GEOMETRY_MUTATIONS = ("flip-cotton-sign",)

GEOMETRY_IDENTITIES = (
    "first-bianchi",
    "second-bianchi",
    "weyl-trace",
    "weyl-vanishes",
    "weyl-conformal",
    "nablaW-cotton",
    "trR-eq-trW",
    "curvature-2form-consistency",
    "sW-curvature-2form",
)


class ConventionResolutionError(RuntimeError):
    pass


def eps_sign(perm) -> int:
    """Sign of a permutation tuple; 0 when an entry repeats."""
    n = len(perm)
    seen = set(perm)
    if len(seen) != n:
        return 0
    sign = 1
    for i in range(n):
        for j in range(i + 1, n):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def eps_permutations(n: int):
    """All permutations of range(n) with their signs."""
    for perm in itertools.permutations(range(n)):
        yield perm, eps_sign(perm)


class GeometryBundle:
    """Curvature data for one field context; fields computed on demand."""

    def __init__(self, ctx: FieldContext, mutations=()):
        for mut in mutations:
            if mut not in GEOMETRY_MUTATIONS:
                raise ValueError("unknown mutation: %s" % mut)
        self.ctx = ctx
        self.dim = ctx.dim
        self.series_order = ctx.series_order
        self.mutations = tuple(mutations)
        self.markers = {}
        if ctx.dim == 2:
            self.markers["schouten"] = "undefined in n=2"
            self.markers["weyl"] = "undefined in n=2"
            self.markers["cotton"] = "undefined in n=2"
        self.cotton_sign: Optional[int] = None

    # -- base fields ---------------------------------------------------------

    @property
    def metric(self):
        return self.ctx.metric

    @cached_property
    def metric_inv(self):
        """Inverse metric via the geometric series around the flat point.

        The perturbation has no constant term, so the series terminates at
        the configured order, which also caps the certified trust.
        """
        n, order = self.dim, self.series_order
        eta = self.ctx.eta
        flat = [[TaggedElement.scalar(n, eta[i] if i == j else 0)
                 for j in range(n)] for i in range(n)]
        neg_step = [[(flat[i][i] * self.metric[i][j] * (-1)
                      + TaggedElement.scalar(n, 1 if i == j else 0)
                      ).truncate(order)
                     for j in range(n)] for i in range(n)]
        acc = flat
        term = flat
        for _ in range(order + 2):
            term = matform.mat_mul(neg_step, term)
            if all(e.body.is_zero() and e.image.is_zero()
                   for row in term for e in row):
                break
            acc = matform.mat_add(acc, term)
        return acc

    @cached_property
    def det(self) -> TaggedElement:
        """Determinant of the metric by subset expansion (exact)."""
        n = self.dim
        table = {0: TaggedElement.scalar(n, 1)}
        for row in range(n):
            new_table = {}
            for cols, minor in table.items():
                pos = 0
                for j in range(n):
                    bit = 1 << j
                    if cols & bit:
                        continue
                    term = minor * self.metric[row][j]
                    if pos % 2:
                        term = -term
                    key = cols | bit
                    prev = new_table.get(key)
                    new_table[key] = term if prev is None else prev + term
                    pos += 1
            table = new_table
        return table[(1 << n) - 1]


    @cached_property
    def sqrt_det(self) -> TaggedElement:
        """Volume factor: sqrt of -det (lorentzian) or det (euclidean)."""
        radicand = -self.det if self.ctx.signature == "lorentzian" else self.det
        return radicand.series_sqrt(self.series_order)

    # -- connection and curvature -------------------------------------------

    @cached_property
    def christoffel(self):
        """Levi-Civita coefficients, symmetric in the last two indices."""
        n = self.dim
        g, ginv = self.metric, self.metric_inv
        dg = [[[g[mu][nu].partial(rho) for rho in range(n)]
               for nu in range(n)] for mu in range(n)]
        half = rat(1, 2)
        out = []
        for mu in range(n):
            plane = []
            for nu in range(n):
                row = []
                for rho in range(n):
                    if rho < nu:
                        row.append(plane[rho][nu])
                        continue
                    acc = None
                    for sig in range(n):
                        combo = dg[sig][rho][nu] + dg[sig][nu][rho] \
                            - dg[nu][rho][sig]
                        term = ginv[mu][sig] * combo
                        acc = term if acc is None else acc + term
                    row.append(acc * half)
                plane.append(row)
            out.append(plane)
        return out

    @cached_property
    def riemann(self):
        """R^mu_nu,rho,sigma = d_rho G^mu_nu,sigma - d_sigma G^mu_nu,rho + GG - GG."""
        n = self.dim
        G = self.christoffel
        out = [[[[None] * n for _ in range(n)] for _ in range(n)]
               for _ in range(n)]
        zero = TaggedElement.zero(n, parity=0)
        for mu in range(n):
            for nu in range(n):
                for rho in range(n):
                    out[mu][nu][rho][rho] = zero
                    for sig in range(rho + 1, n):
                        acc = G[mu][nu][sig].partial(rho) \
                            - G[mu][nu][rho].partial(sig)
                        for lam in range(n):
                            acc = acc + G[mu][lam][rho] * G[lam][nu][sig]
                            acc = acc - G[mu][lam][sig] * G[lam][nu][rho]
                        out[mu][nu][rho][sig] = acc
                        out[mu][nu][sig][rho] = -acc
        return out

    @cached_property
    def ricci(self):
        n = self.dim
        R = self.riemann
        out = []
        for nu in range(n):
            row = []
            for sig in range(n):
                acc = R[0][nu][0][sig]
                for mu in range(1, n):
                    acc = acc + R[mu][nu][mu][sig]
                row.append(acc)
            out.append(row)
        return out

    @cached_property
    def ricci_scalar(self) -> TaggedElement:
        n = self.dim
        acc = None
        for nu in range(n):
            for sig in range(n):
                term = self.metric_inv[nu][sig] * self.ricci[nu][sig]
                acc = term if acc is None else acc + term
        return acc

    @cached_property
    def schouten(self):
        """Trace-adjusted Ricci; undefined in two dimensions."""
        n = self.dim
        if n < 3:
            return None
        coef = rat(1, n - 2)
        tcoef = rat(1, 2 * (n - 1))
        out = []
        for a in range(n):
            row = []
            for b in range(n):
                entry = (self.ricci[a][b]
                         - self.ricci_scalar * self.metric[a][b] * tcoef) * coef
                row.append(entry)
            out.append(row)
        return out

    @cached_property
    def schouten_mixed(self):
        """P^a_b with the first index raised."""
        n = self.dim
        if n < 3:
            return None
        P, ginv = self.schouten, self.metric_inv
        return [[_dot(ginv[a], [P[s][b] for s in range(n)])
                 for b in range(n)] for a in range(n)]

    @cached_property
    def weyl(self):
        """Totally trace-free curvature part, mixed first index."""
        n = self.dim
        if n < 3:
            return None
        R, P, Pm, g = self.riemann, self.schouten, self.schouten_mixed, self.metric
        out = [[[[None] * n for _ in range(n)] for _ in range(n)]
               for _ in range(n)]
        zero = TaggedElement.zero(n, parity=0)
        for mu in range(n):
            for nu in range(n):
                for rho in range(n):
                    out[mu][nu][rho][rho] = zero
                    for sig in range(rho + 1, n):
                        acc = R[mu][nu][rho][sig]
                        if mu == rho:
                            acc = acc - P[sig][nu]
                        if mu == sig:
                            acc = acc + P[rho][nu]
                        acc = acc + g[nu][rho] * Pm[mu][sig]
                        acc = acc - g[nu][sig] * Pm[mu][rho]
                        out[mu][nu][rho][sig] = acc
                        out[mu][nu][sig][rho] = -acc
        return out

    # -- form packagings -----------------------------------------------------

    @cached_property
    def dx(self):
        return [TaggedElement.dx(self.dim, mu) for mu in range(self.dim)]

    @cached_property
    def dx_down(self):
        """The 1-forms g_{a mu} dx^mu."""
        n = self.dim
        return [_dot(self.metric[a], self.dx) for a in range(n)]

    @cached_property
    def conn_1form(self):
        n = self.dim
        G = self.christoffel
        return [[_dot([G[a][b][mu] for mu in range(n)], self.dx)
                 for b in range(n)] for a in range(n)]

    @cached_property
    def curv_2form(self):
        """Matrix of 2-forms: sum over rho<sigma of dx dx R^a_b,rho,sigma."""
        return self._two_form(self.riemann)

    @cached_property
    def weyl_2form(self):
        if self.weyl is None:
            return None
        return self._two_form(self.weyl)

    @cached_property
    def weyl_2form_up(self):
        """Weyl 2-form with the second index raised; antisymmetric matrix."""
        if self.weyl is None:
            return None
        n = self.dim
        W2, ginv = self.weyl_2form, self.metric_inv
        return [[_dot(W2[a], ginv[b]) for b in range(n)] for a in range(n)]

    def _two_form(self, tensor):
        n = self.dim
        out = []
        for a in range(n):
            row = []
            for b in range(n):
                acc = None
                for rho in range(n):
                    for sig in range(rho + 1, n):
                        term = self.dx[rho] * self.dx[sig] \
                            * tensor[a][b][rho][sig]
                        acc = term if acc is None else acc + term
                row.append(acc)
            out.append(row)
        return out

    # -- Cotton tensor -------------------------------------------------------

    @cached_property
    def cotton(self):
        return cotton_tensor(self)

    def cotton_2form_up(self):
        """C^a as a 2-form: dx dx contraction of the index-raised Cotton."""
        n = self.dim
        C, ginv = self.cotton, self.metric_inv
        out = []
        for a in range(n):
            acc = None
            for mu in range(n):
                for nu in range(mu + 1, n):
                    up = _dot(ginv[a], [C[g][mu][nu] for g in range(n)])
                    term = self.dx[mu] * self.dx[nu] * up
                    acc = term if acc is None else acc + term
            out.append(acc)
        return out


def _dot(row, col):
    acc = None
    for x, y in zip(row, col):
        term = x * y
        acc = term if acc is None else acc + term
    return acc


def _tensor_trust(obj, shift: int = 0):
    """Minimum certified trust over a nested tensor of tagged entries.

    shift lowers the result, accounting for derivatives the caller is
    about to apply.  None means unbounded.
    """
    def walk(o):
        if isinstance(o, TaggedElement):
            return _min_trust(o.body.trust(), o.image.trust())
        t = None
        for sub in o:
            t = _min_trust(t, walk(sub))
        return t

    t = walk(obj)
    if t is None:
        return None
    return t - shift


def build_geometry(ctx: FieldContext, mutations=()) -> GeometryBundle:
    return GeometryBundle(ctx, mutations)


# -- covariant derivative ----------------------------------------------------

def covariant_derivative(bundle: GeometryBundle, tensor, variance: str,
                         weight: int = 0):
    """Covariant derivative; the new (first) index is the derivative index.

    tensor: nested lists of TaggedElement, one axis per character of
    variance ('u' upper, 'd' lower).  weight w subtracts w * trace(conn).
    A scalar (variance "") may be passed as a bare TaggedElement.
    """
    n = bundle.dim
    G = bundle.christoffel
    trace_conn = [None] * n
    if weight:
        for sig in range(n):
            acc = G[0][0][sig]
            for lam in range(1, n):
                acc = acc + G[lam][lam][sig]
            trace_conn[sig] = acc

    def entry(tens, idx):
        e = tens
        for i in idx:
            e = e[i]
        return e

    rank = len(variance)
    out = []
    for sig in range(n):
        if rank == 0:
            res = tensor.partial(sig)
            if weight:
                res = res - trace_conn[sig] * tensor * weight
            out.append(res)
            continue
        slot = {}
        for idx in itertools.product(range(n), repeat=rank):
            res = entry(tensor, idx).partial(sig)
            for k, var in enumerate(variance):
                a = idx[k]
                for lam in range(n):
                    swapped = idx[:k] + (lam,) + idx[k + 1:]
                    if var == "u":
                        res = res + G[a][lam][sig] * entry(tensor, swapped)
                    else:
                        res = res - G[lam][a][sig] * entry(tensor, swapped)
            if weight:
                res = res - trace_conn[sig] * entry(tensor, idx) * weight
            slot[idx] = res
        out.append(_nest(slot, n, rank))
    return out


def _nest(flat, n, rank):
    if rank == 1:
        return [flat[(i,)] for i in range(n)]
    out = []
    for i in range(n):
        sub = {k[1:]: v for k, v in flat.items() if k[0] == i}
        out.append(_nest(sub, n, rank - 1))
    return out


# -- Cotton sign resolution --------------------------------------------------

_COTTON_SIGN: Optional[int] = None


def _cotton_base(bundle: GeometryBundle):
    """Antisymmetrized covariant Schouten derivative, first-index slot last.

    base[a][mu][nu] = D_mu P_{nu a} - D_nu P_{mu a}
    """
    n = bundle.dim
    DP = covariant_derivative(bundle, bundle.schouten, "dd")
    return [[[DP[mu][nu][a] - DP[nu][mu][a] for nu in range(n)]
             for mu in range(n)] for a in range(n)]


def _nablaW_up(bundle: GeometryBundle):
    """Covariant exterior differential of the raised Weyl 2-form."""
    n = bundle.dim
    W2u = bundle.weyl_2form_up
    conn = bundle.conn_1form
    out = []
    for a in range(n):
        row = []
        for b in range(n):
            acc = apply_d(W2u[a][b])
            for lam in range(n):
                acc = acc + conn[a][lam] * W2u[lam][b]
                acc = acc + conn[b][lam] * W2u[a][lam]
            row.append(acc)
        out.append(row)
    return out


def _nablaW_cotton_residuals(bundle: GeometryBundle, cotton):
    n = bundle.dim
    nablaW = _nablaW_up(bundle)
    ginv = bundle.metric_inv
    c2up = []
    for a in range(n):
        acc = None
        for mu in range(n):
            for nu in range(mu + 1, n):
                up = _dot(ginv[a], [cotton[g][mu][nu] for g in range(n)])
                term = bundle.dx[mu] * bundle.dx[nu] * up
                acc = term if acc is None else acc + term
        c2up.append(acc)
    res = []
    for a in range(n):
        for b in range(a + 1, n):
            rhs = c2up[a] * bundle.dx[b] - c2up[b] * bundle.dx[a]
            res.append((nablaW[a][b] - rhs).body)
    return res


def resolve_cotton_sign() -> int:
    """Pick the Cotton sign by testing both candidates on 4d random jets.

    Cached per process; raises when neither or both candidates satisfy the
    covariant-differential identity.
    """
    global _COTTON_SIGN
    if _COTTON_SIGN is not None:
        return _COTTON_SIGN
    ctx = strip_tags(build_context(4, "euclidean", seed=97, met_degree=2,
                                   ghost_degree=0, series_order=5,
                                   mode="weyl-only"))
    probe = GeometryBundle(ctx)
    base = _cotton_base(probe)
    n = probe.dim
    neg = [[[-base[a][mu][nu] for nu in range(n)] for mu in range(n)]
           for a in range(n)]
    plus_ok = all(r.certified_zero()
                  for r in _nablaW_cotton_residuals(probe, base))
    minus_ok = all(r.certified_zero()
                   for r in _nablaW_cotton_residuals(probe, neg))
    if plus_ok == minus_ok:
        raise ConventionResolutionError("convention resolution failed")
    _COTTON_SIGN = 1 if plus_ok else -1
    return _COTTON_SIGN


def cotton_tensor(bundle: GeometryBundle):
    """Cotton tensor C[a][mu][nu], antisymmetric in (mu, nu).

    Built from the resolved-sign antisymmetrized covariant derivative of
    the Schouten tensor; a registered mutation flips the resolved sign.
    """
    if bundle.dim < 3:
        raise ValueError("dimension too small: cotton undefined in n=2")
    sign = resolve_cotton_sign()
    if "flip-cotton-sign" in bundle.mutations:
        sign = -sign
    bundle.cotton_sign = sign
    base = _cotton_base(bundle)
    if sign == 1:
        return base
    n = bundle.dim
    return [[[-base[a][mu][nu] for nu in range(n)] for mu in range(n)]
            for a in range(n)]


# -- identity checks ---------------------------------------------------------

def _mixed_weyl_2form(bundle: GeometryBundle):
    return bundle._two_form(bundle.weyl)


def verify_geometry_identity(bundle: GeometryBundle, name: str,
                             min_trust: Optional[int] = None,
                             m: int = 1) -> CheckReport:
    """Check one named curvature identity; residuals must vanish up to trust."""
    n = bundle.dim
    ctx = bundle.ctx
    residuals = []
    notes = {}
    vacuous = False
    cap = None

    if name == "first-bianchi":
        R = bundle.riemann
        cap = _tensor_trust(R)
        for a in range(n):
            for mu in range(n):
                for nu in range(mu + 1, n):
                    for rho in range(nu + 1, n):
                        residuals.append((R[a][mu][nu][rho]
                                          + R[a][nu][rho][mu]
                                          + R[a][rho][mu][nu]).body)
        if n == 2:
            vacuous = True
    elif name == "second-bianchi":
        DR = covariant_derivative(bundle, bundle.riemann, "uddd")
        cap = _tensor_trust(DR)
        for a in range(n):
            for nu in range(n):
                for lam in range(n):
                    for rho in range(lam + 1, n):
                        for sig in range(rho + 1, n):
                            residuals.append((DR[lam][a][nu][rho][sig]
                                              + DR[rho][a][nu][sig][lam]
                                              + DR[sig][a][nu][lam][rho]).body)
        if n == 2:
            vacuous = True
    elif name == "weyl-trace":
        W = _require_weyl(bundle)
        ginv = bundle.metric_inv
        # Cap from the ingredients, not from W itself: components of W can
        # cancel to a literal zero, which would overstate the certification.
        cap = _tensor_trust([bundle.riemann, bundle.schouten])
        for nu in range(n):
            for sig in range(n):
                acc = W[0][nu][0][sig]
                for mu in range(1, n):
                    acc = acc + W[mu][nu][mu][sig]
                residuals.append(acc.body)
        for mu in range(n):
            for rho in range(n):
                acc = None
                for nu in range(n):
                    for sig in range(n):
                        term = ginv[nu][sig] * W[mu][nu][rho][sig]
                        acc = term if acc is None else acc + term
                residuals.append(acc.body)
    elif name == "weyl-vanishes":
        if n != 3:
            raise ValueError("weyl-vanishes applies to n=3 only")
        W = _require_weyl(bundle)
        cap = _tensor_trust([bundle.riemann, bundle.schouten])
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for d in range(c + 1, n):
                        residuals.append(W[a][b][c][d].body)
    elif name == "weyl-conformal":
        _require_weyl_mode(ctx)
        W = _require_weyl(bundle)
        cap = _tensor_trust([bundle.riemann, bundle.schouten])
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for d in range(c + 1, n):
                        residuals.append(W[a][b][c][d].image)
    elif name == "nablaW-cotton":
        C = bundle.cotton
        cap = _min_trust(_tensor_trust(bundle.weyl_2form_up, shift=1),
                         _tensor_trust(C))
        residuals = _nablaW_cotton_residuals(bundle, C)
        notes["cotton_sign"] = bundle.cotton_sign
    elif name == "trR-eq-trW":
        _require_weyl(bundle)
        if n < 4 * m:
            vacuous = True
        Wm = _mixed_weyl_2form(bundle)
        cap = _tensor_trust([bundle.curv_2form, Wm])
        trR = matform.mat_trace_of_power(bundle.curv_2form, 2 * m)
        trW = matform.mat_trace_of_power(Wm, 2 * m)
        residuals = [(trR - trW).body]
        notes["power"] = 2 * m
    elif name == "curvature-2form-consistency":
        conn = bundle.conn_1form
        R2 = bundle.curv_2form
        cap = _tensor_trust([R2, conn], shift=1)
        for a in range(n):
            for b in range(n):
                acc = R2[a][b] - apply_d(conn[a][b])
                for lam in range(n):
                    acc = acc - conn[a][lam] * conn[lam][b]
                residuals.append(acc.body)
    elif name == "sW-curvature-2form":
        _require_weyl_mode(ctx)
        cap = _tensor_trust(bundle.curv_2form)
        residuals = _sw_curv_2form_residuals(bundle)
    else:
        raise ValueError("unknown identity: %s" % name)

    check_name = name if name != "trR-eq-trW" else "trR-eq-trW(m=%d)" % m
    return residual_report(check_name, n, ctx.seed, residuals,
                           min_trust=min_trust,
                           anchor=_IDENTITY_ANCHORS[name],
                           notes=notes, vacuous=vacuous,
                           trust_cap=cap)


_IDENTITY_ANCHORS = {
    "first-bianchi": "cyclic sum of curvature lower indices vanishes",
    "second-bianchi": "cyclic covariant derivative of curvature vanishes",
    "weyl-trace": "trace-free part of curvature has vanishing contractions",
    "weyl-vanishes": "trace-free curvature part vanishes in three dimensions",
    "weyl-conformal": "trace-free curvature part is scale invariant",
    "nablaW-cotton": "covariant differential of trace-free curvature reduces to Cotton",
    "trR-eq-trW": "curvature trace power equals its trace-free counterpart",
    "curvature-2form-consistency": "curvature 2-form matches structure equation",
    "sW-curvature-2form": "scale variation of curvature 2-form in closed form",
}


def _require_weyl(bundle: GeometryBundle):
    if bundle.weyl is None:
        raise ValueError("dimension too small: weyl undefined in n=2")
    return bundle.weyl


def _require_weyl_mode(ctx: FieldContext):
    if ctx.mode != "weyl-only":
        raise ValueError("weyl-only mode required for scale-variation checks")


def _sw_curv_2form_residuals(bundle: GeometryBundle):
    """Residuals of the closed form of the scale variation of R^a_b.

    The variation of the curvature 2-form should reduce to first covariant
    derivatives of the scale ghost wedged with coordinate differentials.
    """
    n = bundle.dim
    ctx = bundle.ctx
    ghost = ctx.weyl_ghost
    ginv = bundle.metric_inv
    G = bundle.christoffel
    # ghost gradient with lower and upper index
    grad_dn = [ghost.partial(b) for b in range(n)]
    grad_up = [_dot(ginv[a], grad_dn) for a in range(n)]
    # covariant derivatives
    cd_up = []
    for a in range(n):
        row = []
        for mu in range(n):
            acc = grad_up[a].partial(mu)
            for lam in range(n):
                acc = acc + G[a][lam][mu] * grad_up[lam]
            row.append(acc)
        cd_up.append(row)
    cd_dn = []
    for b in range(n):
        row = []
        for mu in range(n):
            acc = grad_dn[b].partial(mu)
            for lam in range(n):
                acc = acc - G[lam][b][mu] * grad_dn[lam]
            row.append(acc)
        cd_dn.append(row)
    # 1-forms with the derivative index contracted into dx
    no_up = [_dot(bundle.dx, cd_up[a]) for a in range(n)]
    no_dn = [_dot(bundle.dx, cd_dn[b]) for b in range(n)]
    res = []
    for a in range(n):
        for b in range(n):
            expected = no_up[a] * bundle.dx_down[b] \
                - no_dn[b] * bundle.dx[a]
            res.append(bundle.curv_2form[a][b].image - expected.body)
    return res


def verify_lambda_consistency(ctx: FieldContext,
                              min_trust: Optional[int] = None) -> CheckReport:
    """Tagged images of connection and curvature match the dual route.

    The dual route embeds every field as body + lam * image with a fresh
    odd generator lam and recomputes the geometry with plain arithmetic;
    the lam-component must reproduce the tagged images.
    """
    embedded, lam = lambda_embed(ctx)
    tagged = GeometryBundle(ctx)
    plain = GeometryBundle(embedded)
    residuals = []
    n = ctx.dim
    for mu in range(n):
        for nu in range(n):
            bd, img = lambda_compare(tagged.metric_inv[mu][nu],
                                     plain.metric_inv[mu][nu].body, lam)
            residuals.extend((bd, img))
            for rho in range(nu, n):
                bd, img = lambda_compare(
                    tagged.christoffel[mu][nu][rho],
                    plain.christoffel[mu][nu][rho].body, lam)
                residuals.extend((bd, img))
            for rho in range(n):
                for sig in range(rho + 1, n):
                    bd, img = lambda_compare(
                        tagged.riemann[mu][nu][rho][sig],
                        plain.riemann[mu][nu][rho][sig].body, lam)
                    residuals.extend((bd, img))
    bd, img = lambda_compare(tagged.sqrt_det, plain.sqrt_det.body, lam)
    residuals.extend((bd, img))
    return residual_report("tag-vs-dual-route", n, ctx.seed, residuals,
                           min_trust=min_trust,
                           anchor="forward tags agree with nilpotent perturbation",
                           notes={"mode": ctx.mode})
