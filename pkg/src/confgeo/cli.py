"""Suite runner and report emitter.

Schedules the verification operations over seeded field contexts and
emits one report line per check, as text or as a stable JSON document.
Checks run sequentially in a fixed schedule order (exact rational
arithmetic is CPU bound and single-process determinism is part of the
report contract); aggregation sorts by (suite, check, dim, seed).

Exit codes: 0 when every non-skipped check passes or is vacuous, 1 on
any failure or error, 2 on a configuration problem.  JSON output is
byte-identical across runs for an identical configuration; wall-clock
milliseconds are emitted as 0 unless --timings is given, which trades
the byte-identity away.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import __version__, matform
from .brst import (
    build_context,
    strip_tags,
    verify_anticommute_sd,
    verify_mode_split,
    verify_nilpotency,
)
from .chernsimons import (
    cs_descent_verify,
    cs_exterior_check,
    cs_form,
    lemma3_verify,
    spectator_verify,
)
from .descent import euler_verify, fit_euler_constant, lemma1_verify
from .geometry import _IDENTITY_ANCHORS, build_geometry, verify_geometry_identity
from .numpoly import rat
from .reports import ERROR, FAIL, PASS, SKIPPED, VACUOUS, CheckReport
from .variational import fit_cotton_constant, verify_noether

SUITES = ("core", "euler", "chern-simons", "variational", "extended", "all")
DEFAULT_SUITES = ("core", "euler", "chern-simons", "variational")
MODES = ("full", "weyl-only", "diffeo-only")

MUTATIONS = (
    "flip-sdxi-sign",
    "riemann-for-weyl",
    "flip-cotton-sign",
    "perturb-binomial",
    "drop-symmetrization",
)

DEFAULT_BUDGET_SECS = 900.0
BUDGET_ENV = "CONFGEO_EXTENDED_BUDGET_SECS"

# identity schedule per dimension; scale-variation checks need tags
_BODY_IDENTITIES = {
    2: ("first-bianchi", "second-bianchi", "curvature-2form-consistency"),
    3: ("first-bianchi", "second-bianchi", "weyl-trace", "weyl-vanishes",
        "nablaW-cotton", "curvature-2form-consistency"),
    4: ("first-bianchi", "second-bianchi", "weyl-trace", "nablaW-cotton",
        "curvature-2form-consistency", "trR-eq-trW"),
}
_TAGGED_IDENTITIES = {
    2: ("sW-curvature-2form",),
    3: ("sW-curvature-2form",),
    4: ("sW-curvature-2form", "weyl-conformal"),
}

# series order defaults per (suite, dim); chosen so the per-job trust
# budget (order minus derivative depth) covers the default trust floor
_SERIES_DEFAULTS = {
    "core": {2: 5, 3: 5, 4: 4},
    "euler": {2: 6, 4: 4, 6: 4},
    "chern-simons": {3: 5, 4: 4, 5: 4},
    "variational": {3: 6},
    "extended": {6: 4, 7: 4, 8: 4},
}
# ghost jet degree defaults; n>=4 lanes run with linear ghost jets since
# the second-derivative ghost channels are already probed at n=2 and n=3
_GHOST_DEFAULTS = {
    ("core", 4): 1,
    ("chern-simons", 4): 1,
    ("chern-simons", 5): 0,
    ("euler", 4): 1,
    ("extended", 6): 1,
    ("extended", 7): 1,
    ("extended", 8): 0,
}
# metric jet degree defaults; the extended lane runs linear metric jets
# to fit its wall-clock budget (quadratic jets are probed at n<=5)
_MET_DEFAULTS = {
    ("extended", 6): 1,
    ("extended", 7): 1,
    ("extended", 8): 1,
}


class ConfigError(ValueError):
    pass


@dataclass
class SuiteConfig:
    """Validated run parameters; one instance drives one run_suite call."""

    suite: str = "core"
    dim: Optional[int] = None
    seeds: Tuple[int, ...] = (1, 2, 3)
    met_degree: Optional[int] = None
    ghost_degree: Optional[int] = None
    series_order: Optional[int] = None
    min_trust: int = 2
    signature: str = "euclidean"
    fmt: str = "text"
    timings: bool = False
    mutation: Optional[str] = None
    budget_secs: Optional[float] = None

    def resolved_order(self, suite: str, dim: int, fallback: int = 4) -> int:
        if self.series_order is not None:
            return self.series_order
        return _SERIES_DEFAULTS.get(suite, {}).get(dim, fallback)

    def resolved_ghost(self, suite: str, dim: int) -> int:
        if self.ghost_degree is not None:
            return self.ghost_degree
        return _GHOST_DEFAULTS.get((suite, dim), 2)

    def resolved_met(self, suite: str, dim: int) -> int:
        if self.met_degree is not None:
            return self.met_degree
        return _MET_DEFAULTS.get((suite, dim), 2)


@dataclass
class Job:
    """One scheduled check: builder plus metadata for skip/error rows."""

    suite: str
    name: str
    dim: int
    seed: int
    fn: Callable[[], object]
    depth: Optional[int] = None
    order: Optional[int] = None
    extra_notes: dict = field(default_factory=dict)


def validate_config(cfg: SuiteConfig) -> None:
    if cfg.suite not in SUITES:
        raise ConfigError("unknown suite: %s" % cfg.suite)
    if not cfg.seeds:
        raise ConfigError("seeds must be nonempty")
    if cfg.min_trust < 1:
        raise ConfigError("min-trust must be at least 1")
    if cfg.signature not in ("euclidean", "lorentzian"):
        raise ConfigError("unknown signature: %s" % cfg.signature)
    if cfg.fmt not in ("text", "json"):
        raise ConfigError("unknown format: %s" % cfg.fmt)
    if cfg.mutation is not None and cfg.mutation not in MUTATIONS:
        raise ConfigError("unknown mutation: %s" % cfg.mutation)
    if any(deg is not None and deg < 0
           for deg in (cfg.met_degree, cfg.ghost_degree)):
        raise ConfigError("jet degrees must be nonnegative")
    if cfg.series_order is not None and cfg.series_order < 1:
        raise ConfigError("series order must be positive")
    for job in schedule(cfg):
        if job.depth is None or job.order is None:
            continue
        if cfg.min_trust > job.order - job.depth:
            raise ConfigError(
                "insufficient series order: %s at n=%d certifies at most "
                "trust %d" % (job.name, job.dim, job.order - job.depth))


# -- bundle cache ------------------------------------------------------------

class _Workspace:
    """Per-run cache of contexts and geometry bundles."""

    def __init__(self, cfg: SuiteConfig):
        self.cfg = cfg
        self._bundles: Dict[tuple, object] = {}
        self._contexts: Dict[tuple, object] = {}

    def context(self, dim, seed, mode, ghost_degree, order, met_degree=2):
        key = (dim, seed, mode, ghost_degree, order, met_degree)
        if key not in self._contexts:
            self._contexts[key] = build_context(
                dim, self.cfg.signature, seed, met_degree,
                ghost_degree, order, mode)
        return self._contexts[key]

    def bundle(self, dim, seed, order, ghost_degree=2, stripped=False,
               met_degree=2):
        key = (dim, seed, order, ghost_degree, stripped, met_degree)
        if key not in self._bundles:
            ctx = self.context(dim, seed, "weyl-only", ghost_degree, order,
                               met_degree)
            if stripped:
                ctx = strip_tags(ctx)
            self._bundles[key] = build_geometry(ctx)
        return self._bundles[key]


# -- schedule ----------------------------------------------------------------

def schedule(cfg: SuiteConfig, ws: Optional[_Workspace] = None) -> List[Job]:
    """Deterministic job list for the configured suite."""
    ws = ws or _Workspace(cfg)
    if cfg.mutation is not None:
        return _mutation_jobs(cfg, ws)
    suites = DEFAULT_SUITES if cfg.suite == "all" else (cfg.suite,)
    jobs: List[Job] = []
    for suite in suites:
        if suite == "core":
            jobs.extend(_core_jobs(cfg, ws))
        elif suite == "euler":
            jobs.extend(_euler_jobs(cfg, ws))
        elif suite == "chern-simons":
            jobs.extend(_cs_jobs(cfg, ws))
        elif suite == "variational":
            jobs.extend(_variational_jobs(cfg, ws))
        elif suite == "extended":
            jobs.extend(_extended_jobs(cfg, ws))
    return jobs


def _dims(cfg: SuiteConfig, default: Sequence[int]) -> Sequence[int]:
    if cfg.dim is None:
        return default
    if cfg.dim not in default:
        raise ConfigError("dimension %d is not part of this suite" % cfg.dim)
    return (cfg.dim,)


def _core_jobs(cfg, ws):
    jobs = []
    for dim in _dims(cfg, (2, 3, 4)):
        order = cfg.resolved_order("core", dim)
        kgh = cfg.resolved_ghost("core", dim)
        met = cfg.resolved_met("core", dim)
        for seed in cfg.seeds:
            for mode in MODES:
                jobs.append(Job(
                    "core", "brst-nilpotency", dim, seed,
                    lambda d=dim, s=seed, m=mode, k=kgh, o=order, mt=met:
                        verify_nilpotency(ws.context(d, s, m, k, o, mt),
                                          min_trust=cfg.min_trust),
                    depth=0, order=order, extra_notes={"mode": mode}))
                jobs.append(Job(
                    "core", "s-d-anticommute", dim, seed,
                    lambda d=dim, s=seed, m=mode, k=kgh, o=order, mt=met:
                        verify_anticommute_sd(ws.context(d, s, m, k, o, mt),
                                              min_trust=cfg.min_trust),
                    depth=0, order=order, extra_notes={"mode": mode}))
            jobs.append(Job(
                "core", "mode-split", dim, seed,
                lambda d=dim, s=seed, k=kgh, o=order, mt=met:
                    verify_mode_split(d, cfg.signature, s, mt, k, o),
                depth=0, order=order))
            for name in _BODY_IDENTITIES[dim]:
                jobs.append(Job(
                    "core", name, dim, seed,
                    lambda d=dim, s=seed, nm=name, k=kgh, o=order, mt=met:
                        verify_geometry_identity(
                            ws.bundle(d, s, o, k, stripped=True,
                                      met_degree=mt), nm,
                            min_trust=cfg.min_trust),
                    depth=2, order=order))
            for name in _TAGGED_IDENTITIES[dim]:
                jobs.append(Job(
                    "core", name, dim, seed,
                    lambda d=dim, s=seed, nm=name, k=kgh, o=order, mt=met:
                        verify_geometry_identity(
                            ws.bundle(d, s, o, k, met_degree=mt), nm,
                            min_trust=cfg.min_trust),
                    depth=2, order=order))
    return jobs


def _fit_jobs(suite, name, dim, cfg, runner):
    """Per-seed fit checks plus one cross-seed stability check."""
    jobs = []
    values: Dict[int, object] = {}

    def run_fit(seed):
        c = runner(seed)
        values[seed] = c
        return CheckReport(name, dim, seed, PASS, None, 0,
                           anchor="one rational constant against the "
                                  "classical reference density",
                           notes={"fitted-constant": str(c)})

    def run_stability():
        got = sorted(str(values[s]) for s in values)
        distinct = sorted(set(got))
        status = PASS if len(distinct) == 1 and len(values) == len(cfg.seeds) \
            else FAIL
        return CheckReport(name + "-stability", dim, 0, status, None, 0,
                           anchor="the fitted constant is seed independent",
                           notes={"values": ",".join(distinct) or "none"})

    for seed in cfg.seeds:
        jobs.append(Job(suite, name, dim, seed,
                        lambda s=seed: run_fit(s), depth=None, order=None))
    jobs.append(Job(suite, name + "-stability", dim, 0, run_stability,
                    depth=None, order=None))
    return jobs


def _euler_jobs(cfg, ws):
    jobs = []
    for dim in _dims(cfg, (2, 4)):
        order = cfg.resolved_order("euler", dim)
        kgh = cfg.resolved_ghost("euler", dim)
        met = cfg.resolved_met("euler", dim)
        for seed in cfg.seeds:
            jobs.append(Job(
                "euler", "euler-density-chain", dim, seed,
                lambda d=dim, s=seed, k=kgh, o=order, mt=met: euler_verify(
                    ws.bundle(d, s, o, k, met_degree=mt),
                    min_trust=cfg.min_trust),
                depth=2, order=order))
            if dim >= 4:
                jobs.append(Job(
                    "euler", "weyl-schouten-descent", dim, seed,
                    lambda d=dim, s=seed, k=kgh, o=order, mt=met:
                        lemma1_verify(ws.bundle(d, s, o, k, met_degree=mt),
                                      min_trust=cfg.min_trust),
                    depth=2, order=order))
        jobs.extend(_fit_jobs(
            "euler", "euler-constant-fit", dim, cfg,
            lambda seed, d=dim, k=kgh, o=order, mt=met: fit_euler_constant(
                ws.bundle(d, seed, o, k, met_degree=mt))))
    return jobs


def _cs_jobs(cfg, ws):
    jobs = []
    for dim in _dims(cfg, (3, 4, 5)):
        order = cfg.resolved_order("chern-simons", dim)
        kgh = cfg.resolved_ghost("chern-simons", dim)
        met = cfg.resolved_met("chern-simons", dim)
        for seed in cfg.seeds:
            if dim <= 4:
                jobs.append(Job(
                    "chern-simons", "cs-ghost-ladder(p=1)", dim, seed,
                    lambda d=dim, s=seed, k=kgh, o=order, mt=met:
                        lemma3_verify(ws.bundle(d, s, o, k, met_degree=mt),
                                      1, d, min_trust=cfg.min_trust),
                    depth=2, order=order))
            if dim == 3:
                jobs.append(Job(
                    "chern-simons", "cs-descent(p=1)", dim, seed,
                    lambda d=dim, s=seed, k=kgh, o=order, mt=met:
                        cs_descent_verify(
                            ws.bundle(d, s, o, k, met_degree=mt), 1,
                            min_trust=cfg.min_trust),
                    depth=2, order=order))
            stripped = dim == 5
            jobs.append(Job(
                "chern-simons", "cs-exterior(p=1)", dim, seed,
                lambda d=dim, s=seed, st=stripped, k=kgh, o=order, mt=met:
                    cs_exterior_check(
                        ws.bundle(d, s, o, k if not st else 0, stripped=st,
                                  met_degree=mt),
                        1, d, min_trust=cfg.min_trust),
                depth=2, order=order))
    return jobs


def _variational_jobs(cfg, ws):
    jobs = []
    for dim in _dims(cfg, (3,)):
        order = cfg.resolved_order("variational", dim)
        kgh = cfg.resolved_ghost("variational", dim)
        met = cfg.resolved_met("variational", dim)
        for seed in cfg.seeds:
            jobs.append(Job(
                "variational", "noether(p=1)", dim, seed,
                lambda d=dim, s=seed, k=kgh, o=order, mt=met: verify_noether(
                    ws.bundle(d, s, o, k, met_degree=mt), 1,
                    min_trust=cfg.min_trust),
                depth=3, order=order))
        jobs.extend(_fit_jobs(
            "variational", "cotton-york-fit", dim, cfg,
            lambda seed, d=dim, k=kgh, o=order, mt=met: fit_cotton_constant(
                ws.bundle(d, seed, o, k, met_degree=mt))))
    return jobs


def _transgression_fixture(bundle) -> CheckReport:
    """Degree-7 transgression against the explicit five-term trace form."""
    G = bundle.conn_1form
    dG = matform.mat_apply_d(G)
    G2 = matform.mat_mul(G, G)
    G3 = matform.mat_mul(G2, G)
    fixture = matform.mat_mul_trace(matform.mat_mul(G, matform.mat_mul(dG, dG)), dG) \
        + matform.mat_mul_trace(matform.mat_mul(G3, dG), dG) * rat(8, 5) \
        + matform.mat_mul_trace(matform.mat_mul(matform.mat_mul(G, dG), G2), dG) * rat(4, 5) \
        + matform.mat_mul_trace(matform.mat_mul(G3, G2), dG) * rat(2, 1) \
        + matform.mat_trace_of_power(G, 7) * rat(4, 7)
    diff = cs_form(bundle, 2) - fixture
    ok = diff.body.is_zero() and diff.image.is_zero()
    return CheckReport("cs-transgression-fixture(p=2)", bundle.dim,
                       bundle.ctx.seed, PASS if ok else FAIL, None,
                       diff.body.residual_terms() + diff.image.residual_terms(),
                       anchor="degree-7 transgression matches the five-term "
                              "closed form")


def _extended_jobs(cfg, ws):
    """High-dimension lane, ordered cheapest first.

    The wall-clock budget gates job starts but does not preempt a running
    job, so ordering by expected cost maximizes what a finite budget
    completes before the remainder is skipped.
    """
    jobs = []
    seeds = cfg.seeds[:1]
    for seed in seeds:
        o6 = cfg.resolved_order("extended", 6)
        k6 = cfg.resolved_ghost("extended", 6)
        m6 = cfg.resolved_met("extended", 6)
        o7 = cfg.resolved_order("extended", 7)
        k7 = cfg.resolved_ghost("extended", 7)
        m7 = cfg.resolved_met("extended", 7)
        o8 = cfg.resolved_order("extended", 8)
        m8 = cfg.resolved_met("extended", 8)
        jobs.append(Job(
            "extended", "cs-transgression-fixture(p=2)", 7, seed,
            lambda s=seed: _transgression_fixture(
                ws.bundle(7, s, 2, 0, stripped=True, met_degree=m7)),
            depth=None, order=None))
        jobs.append(Job(
            "extended", "euler-density-chain", 6, seed,
            lambda s=seed: euler_verify(
                ws.bundle(6, s, o6, k6, met_degree=m6),
                min_trust=cfg.min_trust),
            depth=2, order=o6))
        jobs.append(Job(
            "extended", "weyl-schouten-descent", 6, seed,
            lambda s=seed: lemma1_verify(
                ws.bundle(6, s, o6, k6, met_degree=m6),
                min_trust=cfg.min_trust),
            depth=2, order=o6))
        jobs.append(Job(
            "extended", "cs-spectator(p=1)", 7, seed,
            lambda s=seed: spectator_verify(
                ws.bundle(7, s, o7, k7, met_degree=m7), 1, [1],
                min_trust=cfg.min_trust),
            depth=2, order=o7))
        jobs.append(Job(
            "extended", "cs-ghost-ladder(p=2)", 7, seed,
            lambda s=seed: lemma3_verify(
                ws.bundle(7, s, o7, k7, met_degree=m7), 2, 7,
                min_trust=cfg.min_trust),
            depth=2, order=o7))
        jobs.append(Job(
            "extended", "cs-descent(p=2)", 7, seed,
            lambda s=seed: cs_descent_verify(
                ws.bundle(7, s, o7, k7, met_degree=m7), 2,
                min_trust=cfg.min_trust),
            depth=2, order=o7))
        jobs.append(Job(
            "extended", "noether(p=2)", 7, seed,
            lambda s=seed: verify_noether(
                ws.bundle(7, s, o7 + 1, k7, met_degree=m7), 2,
                min_trust=cfg.min_trust),
            depth=3, order=o7 + 1))
        jobs.append(Job(
            "extended", "cs-exterior(p=2)", 8, seed,
            lambda s=seed: cs_exterior_check(
                ws.bundle(8, s, o8, 0, stripped=True, met_degree=m8), 2, 8,
                min_trust=cfg.min_trust),
            depth=2, order=o8))
    return jobs


def _mutation_jobs(cfg, ws):
    """One designated sensitivity check per documented defect."""
    seed = cfg.seeds[0]
    mut = cfg.mutation
    if mut == "flip-sdxi-sign":
        def run():
            ctx = build_context(3, cfg.signature, seed,
                                cfg.resolved_met("core", 3),
                                cfg.resolved_ghost("core", 3),
                                cfg.resolved_order("core", 3), "full",
                                mutations=("flip-sdxi-sign",))
            return verify_nilpotency(ctx)
        return [Job("mutation", "brst-nilpotency", 3, seed, run)]
    if mut == "riemann-for-weyl":
        def run():
            return lemma1_verify(
                ws.bundle(4, seed, cfg.resolved_order("euler", 4), 1,
                          met_degree=cfg.resolved_met("euler", 4)),
                mutations=("riemann-for-weyl",))
        return [Job("mutation", "weyl-schouten-descent", 4, seed, run)]
    if mut == "flip-cotton-sign":
        def run():
            # n=3 satisfies the identity for either sign; probe in n=4
            ctx = strip_tags(ws.context(4, seed, "weyl-only", 0,
                                        cfg.resolved_order("core", 4),
                                        cfg.resolved_met("core", 4)))
            bundle = build_geometry(ctx, mutations=("flip-cotton-sign",))
            return verify_geometry_identity(bundle, "nablaW-cotton")
        return [Job("mutation", "nablaW-cotton", 4, seed, run)]
    if mut == "perturb-binomial":
        def run():
            return euler_verify(
                ws.bundle(2, seed, cfg.resolved_order("euler", 2),
                          met_degree=cfg.resolved_met("euler", 2)),
                mutations=("perturb-binomial",))
        return [Job("mutation", "euler-density-chain", 2, seed, run)]
    def run():
        return verify_noether(
            ws.bundle(3, seed, cfg.resolved_order("variational", 3),
                      cfg.resolved_ghost("variational", 3),
                      met_degree=cfg.resolved_met("variational", 3)),
            1, mutations=("drop-symmetrization",))
    return [Job("mutation", "noether(p=1)", 3, seed, run)]


# -- execution ---------------------------------------------------------------

def _flatten(job: Job, report, millis: int) -> dict:
    """Normalize any report object onto the emitted check schema."""
    data = report.to_dict()
    notes = dict(data.get("notes") or {})
    rungs = data.pop("rungs", None)
    if rungs is not None:
        notes["rungs"] = ",".join(r["status"] for r in rungs)
    notes.update(job.extra_notes)
    return {
        "name": data["name"],
        "anchor": data.get("anchor", ""),
        "dim": data["dim"],
        "seed": data["seed"],
        "status": data["status"],
        "trust": data["trust"],
        "residual_terms": data["residual_terms"],
        "millis": millis,
        "notes": {k: str(v) for k, v in sorted(notes.items())},
        "suite": job.suite,
    }


def _placeholder(job: Job, status: str, note: str, millis: int = 0) -> dict:
    notes = {"reason": note}
    notes.update(job.extra_notes)
    return {
        "name": job.name, "anchor": "", "dim": job.dim, "seed": job.seed,
        "status": status, "trust": -1, "residual_terms": 0, "millis": millis,
        "notes": {k: str(v) for k, v in sorted(notes.items())},
        "suite": job.suite,
    }


def run_suite(cfg: SuiteConfig) -> List[dict]:
    """Execute the schedule; returns normalized check dicts, sorted."""
    ws = _Workspace(cfg)
    jobs = schedule(cfg, ws)
    budget = cfg.budget_secs
    if budget is None:
        budget = float(os.environ.get(BUDGET_ENV, DEFAULT_BUDGET_SECS))
    start = time.monotonic()
    out = []
    for job in jobs:
        if job.suite == "extended" and time.monotonic() - start > budget:
            out.append(_placeholder(job, SKIPPED, "budget exhausted"))
            continue
        t0 = time.perf_counter()
        try:
            report = job.fn()
            millis = int((time.perf_counter() - t0) * 1000)
            out.append(_flatten(job, report, millis))
        except Exception as exc:  # noqa: BLE001 - reported as a check status
            millis = int((time.perf_counter() - t0) * 1000)
            out.append(_placeholder(job, ERROR, str(exc), millis))
    out.sort(key=lambda c: (c["suite"], c["name"], c["dim"], c["seed"],
                            c["notes"].get("mode", "")))
    return out


def exit_code(checks: List[dict]) -> int:
    for check in checks:
        if check["status"] not in (PASS, VACUOUS, SKIPPED):
            return 1
    return 0


# -- emission ----------------------------------------------------------------

def _config_dict(cfg: SuiteConfig) -> dict:
    return {
        "suite": cfg.suite,
        "dim": cfg.dim,
        "seeds": list(cfg.seeds),
        "met_degree": cfg.met_degree,
        "ghost_degree": cfg.ghost_degree,
        "series_order": cfg.series_order,
        "min_trust": cfg.min_trust,
        "signature": cfg.signature,
        "mutation": cfg.mutation,
    }


def emit_report(checks: List[dict], cfg: SuiteConfig) -> str:
    if cfg.fmt == "json":
        payload = {
            "version": __version__,
            "config": _config_dict(cfg),
            "checks": [
                {k: (0 if k == "millis" and not cfg.timings else v)
                 for k, v in check.items() if k != "suite"}
                for check in checks
            ],
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    lines = []
    for check in checks:
        notes = check["notes"]
        extra = " ".join("%s=%s" % (k, v) for k, v in sorted(notes.items()))
        line = "%-8s %-32s n=%d seed=%-3d trust=%-3s %5dms %s" % (
            check["status"], check["name"], check["dim"], check["seed"],
            check["trust"], check["millis"], extra)
        lines.append(line.rstrip())
    return "\n".join(lines) + "\n"


# -- catalog -----------------------------------------------------------------

def list_suites() -> dict:
    """Static suite catalog: checks, anchors, dimensions, rough runtimes."""
    catalog = {
        "core": {
            "dims": [2, 3, 4],
            "expected_runtime": "under a minute",
            "checks": [
                {"name": "brst-nilpotency",
                 "anchor": "s composed with s vanishes on generators"},
                {"name": "s-d-anticommute",
                 "anchor": "s anticommutes with d on generators"},
                {"name": "mode-split",
                 "anchor": "variation splits into scale and coordinate parts"},
            ] + [
                {"name": name, "anchor": _IDENTITY_ANCHORS[name]}
                for name in ("first-bianchi", "second-bianchi", "weyl-trace",
                             "weyl-vanishes", "nablaW-cotton",
                             "curvature-2form-consistency", "trR-eq-trW",
                             "sW-curvature-2form", "weyl-conformal")
            ],
        },
        "euler": {
            "dims": [2, 4],
            "expected_runtime": "about a minute",
            "checks": [
                {"name": "euler-density-chain",
                 "anchor": "ghost-gradient chain closes onto the Euler density"},
                {"name": "weyl-schouten-descent",
                 "anchor": "each covector and trace-free-curvature member "
                           "closes rung by rung"},
                {"name": "euler-constant-fit",
                 "anchor": "one rational constant against the classical "
                           "reference density"},
            ],
        },
        "chern-simons": {
            "dims": [3, 4, 5],
            "expected_runtime": "about a minute",
            "checks": [
                {"name": "cs-exterior(p=1)",
                 "anchor": "the transgression form differentiates onto the "
                           "curvature trace"},
                {"name": "cs-ghost-ladder(p=1)",
                 "anchor": "ladder variation telescopes onto the curvature trace"},
                {"name": "cs-descent(p=1)",
                 "anchor": "the ghost ladder solves the descent rung by rung"},
            ],
        },
        "variational": {
            "dims": [3],
            "expected_runtime": "under a minute",
            "checks": [
                {"name": "noether(p=1)",
                 "anchor": "the variation is traceless, conserved, and "
                           "strictly scale invariant with one index down"},
                {"name": "cotton-york-fit",
                 "anchor": "one rational constant against the classical "
                           "reference density"},
            ],
        },
        "extended": {
            "dims": [6, 7, 8],
            "expected_runtime": "minutes to an hour; budgeted via %s" % BUDGET_ENV,
            "checks": [
                {"name": "euler-density-chain", "anchor": "six-dimensional chain"},
                {"name": "weyl-schouten-descent", "anchor": "six-dimensional family"},
                {"name": "cs-transgression-fixture(p=2)",
                 "anchor": "degree-7 transgression matches the five-term "
                           "closed form"},
                {"name": "cs-ghost-ladder(p=2)", "anchor": "degree-7 ladder"},
                {"name": "cs-descent(p=2)", "anchor": "degree-7 descent"},
                {"name": "cs-spectator(p=1)",
                 "anchor": "closed curvature traces ride along the descent"},
                {"name": "noether(p=2)", "anchor": "degree-7 variation"},
                {"name": "cs-exterior(p=2)", "anchor": "degree-8 exterior check"},
            ],
        },
    }
    catalog["all"] = {
        "dims": sorted({d for s in DEFAULT_SUITES for d in catalog[s]["dims"]}),
        "expected_runtime": "a few minutes",
        "checks": [{"name": "(union of the four default suites)",
                    "anchor": "aggregate"}],
    }
    return catalog


def emit_catalog(fmt: str) -> str:
    catalog = list_suites()
    if fmt == "json":
        return json.dumps(catalog, sort_keys=True, indent=2) + "\n"
    lines = []
    for suite in SUITES:
        info = catalog[suite]
        lines.append("%s  (dims %s; %s)" % (
            suite, ",".join(str(d) for d in info["dims"]),
            info["expected_runtime"]))
        for check in info["checks"]:
            lines.append("  %-32s %s" % (check["name"], check["anchor"]))
    return "\n".join(lines) + "\n"


# -- entry point -------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="confgeo",
        description="exact-arithmetic verification suites for graded "
                    "curvature descent identities")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a verification suite")
    run.add_argument("--suite", choices=SUITES, default="core")
    run.add_argument("--dim", type=int, default=None,
                     help="restrict the suite to one of its dimensions")
    run.add_argument("--seed", type=int, nargs="+", default=None,
                     help="jet seeds (default 1 2 3)")
    run.add_argument("--met-degree", type=int, default=None,
                     help="metric jet degree (default 2; extended lane 1)")
    run.add_argument("--ghost-degree", type=int, default=None)
    run.add_argument("--series-order", type=int, default=None)
    run.add_argument("--min-trust", type=int, default=2)
    run.add_argument("--signature", choices=("euclidean", "lorentzian"),
                     default="euclidean")
    run.add_argument("--format", choices=("text", "json"), default="text")
    run.add_argument("--timings", action="store_true",
                     help="emit real milliseconds in JSON (breaks byte "
                          "determinism)")
    run.add_argument("--mutation", choices=MUTATIONS, default=None,
                     help="run only the designated sensitivity check with "
                          "this defect injected")

    lst = sub.add_parser("list", help="describe the available suites")
    lst.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def main(argv: Optional[Sequence[int]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list":
        sys.stdout.write(emit_catalog(args.format))
        return 0
    cfg = SuiteConfig(
        suite=args.suite,
        dim=args.dim,
        seeds=tuple(args.seed) if args.seed else (1, 2, 3),
        met_degree=args.met_degree,
        ghost_degree=args.ghost_degree,
        series_order=args.series_order,
        min_trust=args.min_trust,
        signature=args.signature,
        fmt=args.format,
        timings=args.timings,
        mutation=args.mutation,
    )
    try:
        validate_config(cfg)
        checks = run_suite(cfg)
    except ConfigError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    sys.stdout.write(emit_report(checks, cfg))
    counts: Dict[str, int] = {}
    for check in checks:
        counts[check["status"]] = counts.get(check["status"], 0) + 1
    summary = ", ".join("%d %s" % (counts[k], k) for k in sorted(counts))
    sys.stderr.write("%d checks: %s\n" % (len(checks), summary))
    return exit_code(checks)


if __name__ == "__main__":
    sys.exit(main())
