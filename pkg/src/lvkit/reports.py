"""Verification report objects and their JSON forms."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .algebra import EulerFactorDenom

# Full canonical rendering is kept up to this many Laurent terms; beyond it
# the string is a deterministic digest of the canonical rendering (equal
# polynomials always produce equal strings).  Keeps NDJSON lines bounded.
RENDER_TERM_BUDGET = 400


def render_denom(d: EulerFactorDenom) -> str:
    n = d.term_count()
    if n <= RENDER_TERM_BUDGET:
        return str(d)
    h = hashlib.sha256()
    for k, c in enumerate(d.coeffs):
        if c.is_zero():
            continue
        h.update(b"[%d]" % k)
        h.update(str(c).encode())
    return "poly{deg=%d; terms=%d; sha256=%s}" % (d.degree, n, h.hexdigest())


@dataclass(frozen=True)
class VerificationReport:
    case: str
    lhs: str
    rhs: str
    equal: bool
    elapsed_ms: float

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "equal": self.equal,
            "elapsed_ms": self.elapsed_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(", ", ": "))
