"""Arithmetic of the commutative algebra of real matrices ``[[a, b]]``.

``[[a, b]]`` stands for the upper-triangular matrix with rows ``(a, b)`` and
``(0, a)``.  The set is closed under addition, scaling and multiplication,
and multiplication is commutative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

E_INV = math.exp(-1.0)


@dataclass(frozen=True)
class Element:
    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError(f"non-finite element [[{a}, {b}]]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __add__(self, other: Element) -> Element:
        return Element(self.a + other.a, self.b + other.b)

    def __sub__(self, other: Element) -> Element:
        return Element(self.a - other.a, self.b - other.b)

    def __neg__(self) -> Element:
        return Element(-self.a, -self.b)

    def __mul__(self, other):
        if isinstance(other, Element):
            return mul(self, other)
        return Element(self.a * other, self.b * other)

    def __rmul__(self, scalar) -> Element:
        return Element(self.a * scalar, self.b * scalar)

    def __truediv__(self, scalar) -> Element:
        return Element(self.a / scalar, self.b / scalar)

    def __pow__(self, k: int) -> Element:
        return power(self, k)

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [0.0, self.a]])

    def isclose(self, other: Element, rel: float = 1e-12, abs_: float = 1e-12) -> bool:
        return (abs(self.a - other.a) <= abs_ + rel * abs(other.a)
                and abs(self.b - other.b) <= abs_ + rel * abs(other.b))

    def __repr__(self):
        return f"[[{self.a!r}, {self.b!r}]]"


IDENTITY = Element(1.0, 0.0)


def mul(x: Element, y: Element) -> Element:
    # written symmetrically so mul(x, y) == mul(y, x) bit for bit
    return Element(x.a * y.a, x.a * y.b + y.a * x.b)


def power(x: Element, k: int) -> Element:
    """Closed form ``[[a, b]]**k = [[a**k, k*b*a**(k-1)]]`` for ``k >= 1``."""
    if int(k) != k or k < 1:
        raise ValueError(f"power requires an integer k >= 1, got {k!r}")
    k = int(k)
    return Element(x.a ** k, k * x.b * x.a ** (k - 1))


def power_arrays(a, b, k: int):
    """Vectorized :func:`power` on parameter arrays."""
    if int(k) != k or k < 1:
        raise ValueError(f"power requires an integer k >= 1, got {k!r}")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a ** k, k * b * a ** (k - 1)


def semigroup_point(t: float) -> Element:
    """The element ``exp([[-t, t]]) = [[e^-t, t e^-t]]`` of the semigroup G."""
    if not t >= 0:
        raise ValueError(f"semigroup parameter must be >= 0, got {t!r}")
    s = math.exp(-t)
    return Element(s, t * s)


def _check_unit_interval(a, name):
    arr = np.asarray(a, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"{name} is defined on 0 <= a <= 1, got {a!r}")
    return arr


def f(a):
    """``-a log a`` on ``[0, 1]``, with ``f(0) = 0``.  Accepts arrays."""
    arr = _check_unit_interval(a, "f")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(arr > 0.0, -arr * np.log(np.where(arr > 0.0, arr, 1.0)), 0.0)
    return float(out) if out.ndim == 0 else out


def g(a):
    """``f`` capped at its maximum: ``f(a)`` for ``a >= 1/e``, ``1/e`` below.

    ``g(0) = 1/e`` by continuity.
    """
    arr = _check_unit_interval(a, "g")
    out = g_ext(arr)
    return float(out) if out.ndim == 0 else out


def g_ext(u):
    """``g`` continued past ``a = 1`` by ``-u log u``; concave on ``u >= 0``.

    No domain check; callers that need one use :func:`g`.
    """
    u = np.asarray(u, dtype=float)
    safe = np.maximum(u, E_INV)
    return np.where(u > E_INV, -safe * np.log(safe), E_INV)


P1 = Element(E_INV, E_INV)
P2 = Element(math.exp(-0.5), 0.5 * math.exp(-0.5))
P3 = Element(math.exp(-1.0 / 3.0), math.exp(-1.0 / 3.0) / 3.0)
