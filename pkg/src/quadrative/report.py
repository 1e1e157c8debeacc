"""Result records for sweeps and counterexample witnesses."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .algebra import Element


def fmt(x) -> str:
    """17 significant digits: enough for a float to round-trip exactly."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    return f"{float(x):.17g}"


@dataclass(frozen=True)
class Witness:
    """An element ``A`` with ``N(A)``, ``N(A**k)`` and their ratio ``N(A**k) / N(A)**k``."""

    element: Element
    norm: float
    norm_power: float
    k: int
    ratio: float

    @classmethod
    def from_norms(cls, element, norm, norm_power, k):
        return cls(element, float(norm), float(norm_power), int(k),
                   float(norm_power) / float(norm) ** k)

    def is_consistent(self, rel=1e-9) -> bool:
        expected = self.norm_power / self.norm ** self.k
        return math.isclose(self.ratio, expected, rel_tol=rel)

    def to_dict(self):
        return {"a": self.element.a, "b": self.element.b, "norm": self.norm,
                "norm_power": self.norm_power, "k": self.k, "ratio": self.ratio}

    def to_text(self) -> str:
        return (f"witness k={self.k} a={fmt(self.element.a)} b={fmt(self.element.b)} "
                f"norm={fmt(self.norm)} norm_power={fmt(self.norm_power)} "
                f"ratio={fmt(self.ratio)}")


@dataclass(frozen=True)
class Row:
    """One named inequality of a grid or sweep check.

    ``kind`` is ``"strict"`` (minimum slack must be positive), ``"tight"``
    (slack vanishes identically at the supremum and must stay within
    rounding of zero) or ``"allowance"`` (slack must exceed ``-allowance``).
    """

    name: str
    min_slack: float
    kind: str = "strict"
    allowance: float = 0.0
    argmin: float = math.nan
    certified_lower: float = math.nan
    lipschitz: float = math.nan

    @property
    def ok(self) -> bool:
        if self.kind == "strict":
            return self.min_slack > 0.0
        return self.min_slack > -self.allowance

    def to_dict(self):
        return {k: getattr(self, k) for k in ("name", "kind", "min_slack", "allowance",
                                              "argmin", "certified_lower", "lipschitz")} | {"ok": self.ok}

    def to_text(self) -> str:
        parts = [f"row {self.name}", f"kind={self.kind}", f"min_slack={fmt(self.min_slack)}"]
        if self.kind != "strict":
            parts.append(f"allowance={fmt(self.allowance)}")
        for key in ("argmin", "lipschitz", "certified_lower"):
            val = getattr(self, key)
            if not math.isnan(val):
                parts.append(f"{key}={fmt(val)}")
        parts.append("ok" if self.ok else "FAIL")
        return " ".join(parts)


@dataclass
class VerificationReport:
    """Outcome of one check.

    ``worst_margin`` is the smallest slack over the rows that decide the
    outcome (strict rows when there are any, otherwise every row);
    ``passed`` is true iff every row is ok.
    """

    name: str
    rows: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    witness_count: int = 0
    samples_used: int = 0
    seed: int | None = None
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(r.ok for r in self.rows)

    @property
    def worst_margin(self) -> float:
        strict = [r.min_slack for r in self.rows if r.kind == "strict"]
        pool = strict or [r.min_slack for r in self.rows]
        return min(pool) if pool else math.nan

    def row(self, name) -> Row:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "worst_margin": self.worst_margin,
                "witness_count": self.witness_count, "samples_used": self.samples_used,
                "seed": self.seed, "rows": [r.to_dict() for r in self.rows],
                "witnesses": [w.to_dict() for w in self.witnesses], "notes": list(self.notes)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"check {self.name}",
                 f"passed = {fmt(self.passed)}",
                 f"worst_margin = {fmt(self.worst_margin)}",
                 f"witness_count = {self.witness_count}",
                 f"samples_used = {self.samples_used}",
                 f"seed = {self.seed if self.seed is not None else '-'}"]
        lines += [r.to_text() for r in self.rows]
        lines += [w.to_text() for w in self.witnesses]
        lines += [f"note {n}" for n in self.notes]
        return "\n".join(lines)
