"""Check reports shared by the verification modules and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .numpoly import _min_trust

PASS = "pass"
FAIL = "fail"
VACUOUS = "vacuous"
SKIPPED = "skipped"
ERROR = "error"


class InsufficientTrustError(ArithmeticError):
    """Raised when a check's certified degree falls below the requested floor."""


@dataclass
class CheckReport:
    name: str
    dim: int
    seed: int
    status: str
    trust: Optional[int] = None
    residual_terms: int = 0
    millis: int = 0
    anchor: str = ""
    notes: dict = field(default_factory=dict)

    def ok(self) -> bool:
        return self.status in (PASS, VACUOUS, SKIPPED)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "dim": self.dim,
            "seed": self.seed,
            "status": self.status,
            "trust": -1 if self.trust is None else self.trust,
            "residual_terms": self.residual_terms,
            "millis": self.millis,
            "notes": self.notes,
        }


def residual_report(name, dim, seed, residuals, min_trust=None,
                    anchor="", notes=None, vacuous=False,
                    trust_cap=None) -> CheckReport:
    """Summarize a family of residual elements into one report.

    residuals: iterable of SuperElement values that must vanish up to trust.
    trust_cap: certified trust of the inputs; keeps the report honest when
    residuals cancel to literally zero and carry no trust of their own.
    Raises InsufficientTrustError when everything vanishes but the certified
    degree is below min_trust.
    """
    trust = trust_cap
    bad_terms = 0
    for res in residuals:
        trust = _min_trust(trust, res.trust())
        bad_terms += res.certified_residual_terms()
    if bad_terms:
        status = FAIL
    elif vacuous:
        status = VACUOUS
    else:
        status = PASS
    if status == PASS and min_trust is not None:
        if trust is not None and trust < min_trust:
            raise InsufficientTrustError("insufficient trust")
    return CheckReport(name=name, dim=dim, seed=seed, status=status,
                       trust=trust, residual_terms=bad_terms,
                       anchor=anchor, notes=dict(notes or {}))
