"""Unit balls in the ``[[a, b]]`` plane and their Minkowski gauges.

Three families are supported:

* :class:`Omega0`, ``|a| < 1, |b| < g(|a|)``;
* :class:`OmegaEps`, ``Omega0`` with three sliver cuts controlled by an
  :class:`EpsTriple`;
* :class:`Hull`, the convex hull of a ball with two spikes ``[[+-s, 0]]``.

Every family is symmetric under ``a -> -a`` and ``b -> -b`` separately, so
membership is decided on ``(|a|, |b|)``, i.e. in the first quadrant.  The
gauge is found by bisection along the ray through the point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import E_INV, Element, g_ext
from .report import Row, VerificationReport

CONSTRAINTS = ("a-cap", "g-curve", "flat-cap", "tangent-cut", "hull-segment")

E_HALF = math.exp(-0.5)
E_THIRD = math.exp(-1.0 / 3.0)
E_TWO_THIRDS = math.exp(-2.0 / 3.0)

# every family fits in this box; used for sampling and the boundedness check
BOX_A = 1.0
BOX_B = E_INV

DEFAULT_TOL = 1e-10
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class GaugeError(ValueError):
    pass


@dataclass(frozen=True)
class EpsTriple:
    eps1: float
    eps2: float
    eps3: float

    def __post_init__(self):
        vals = (self.eps1, self.eps2, self.eps3)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite eps triple {vals}")
        if not 0.0 < self.eps3 < self.eps2 < self.eps1 < 1.0:
            raise ValueError(f"need 0 < eps3 < eps2 < eps1 < 1, got {vals}")

    def as_tuple(self):
        return (self.eps1, self.eps2, self.eps3)


@dataclass(frozen=True)
class Omega0:
    """``{[[a, b]] : |a| < 1, |b| < g(|a|)}``."""

    a_max = 1.0
    label = "omega0"

    def margins(self, a, b):
        ua, ub = np.abs(a), np.abs(b)
        return {"a-cap": self.a_max - ua, "g-curve": g_ext(ua) - ub}

    def upper(self, u):
        return g_ext(np.minimum(u, self.a_max))

    def special_a(self):
        return (E_INV, E_HALF, E_THIRD)


@dataclass(frozen=True)
class OmegaEps:
    """``Omega0`` cut by ``|a| < e^-1/3``, ``|b| < 1/e - eps3`` and
    ``|b| < e^-1/2 - |a|/2 - eps1``."""

    eps: EpsTriple
    label = "omega"

    @property
    def a_max(self):
        return E_THIRD

    def margins(self, a, b):
        ua, ub = np.abs(a), np.abs(b)
        e1, e3 = self.eps.eps1, self.eps.eps3
        return {
            "a-cap": E_THIRD - ua,
            "g-curve": g_ext(ua) - ub,
            "flat-cap": (E_INV - e3) - ub,
            "tangent-cut": (E_HALF - 0.5 * ua - e1) - ub,
        }

    def upper(self, u):
        u = np.minimum(u, self.a_max)
        e1, e3 = self.eps.eps1, self.eps.eps3
        return np.minimum(np.minimum(g_ext(u), E_INV - e3), E_HALF - 0.5 * u - e1)

    def special_a(self):
        return (E_INV, E_HALF, E_THIRD)


@dataclass(frozen=True)
class Hull:
    """Convex hull of ``inner`` with the spikes ``[[s, 0]]`` and ``[[-s, 0]]``."""

    inner: object
    spikes: tuple = (Element(1.0, 0.0), Element(-1.0, 0.0))
    label = "hull"

    def __post_init__(self):
        if isinstance(self.inner, Hull):
            raise ValueError("nested hulls are not supported")
        spikes = tuple(self.spikes)
        s = abs(spikes[0].a) if spikes else 0.0
        ok = (len(spikes) == 2 and s > 0.0
              and all(p.b == 0.0 for p in spikes)
              and {spikes[0].a, spikes[1].a} == {s, -s})
        if not ok:
            raise ValueError("spikes must be the symmetric pair [[s, 0]], [[-s, 0]] with s > 0")
        if s < self.inner.a_max:
            raise ValueError("spikes must lie at or beyond the inner ball's a-extent")
        object.__setattr__(self, "spikes", spikes)

    @property
    def spike(self) -> float:
        return abs(self.spikes[0].a)

    @property
    def a_max(self):
        return self.spike

    def upper(self, u):
        """Upper boundary ``b = B(u)`` of the hull over ``0 <= u <= s``.

        A point ``(u, b)`` lies in the hull iff ``(u, b) = lam*(s, 0) +
        (1 - lam)*y`` for some ``y`` in the inner closure; one spike is
        enough in the first quadrant, since the reflection symmetries let
        any representation through ``-s`` be replaced by a point of the
        inner ball itself.  Maximizing ``(1 - lam) * B_inner(|u - lam*s| /
        (1 - lam))`` over ``lam`` is a concave problem (a perspective of a
        concave function), solved by golden-section search.
        """
        u = np.atleast_1d(np.asarray(u, dtype=float))
        s, am = self.spike, self.inner.a_max
        out = np.full(u.shape, -np.inf)
        out[u == s] = 0.0
        live = u < s
        if not np.any(live):
            return out
        uu = u[live]
        if s > am:
            lo = np.maximum(0.0, (uu - am) / (s - am))
        else:
            lo = np.zeros_like(uu)
        hi = (uu + am) / (s + am)

        def objective(lam):
            w = np.minimum(np.abs(uu - lam * s) / (1.0 - lam), am)
            return (1.0 - lam) * self.inner.upper(w)

        out[live] = golden_max(objective, lo, hi)
        return out

    def margins(self, a, b):
        ua, ub = np.abs(a), np.abs(b)
        with np.errstate(invalid="ignore"):
            seg = self.upper(np.minimum(ua, self.spike)).reshape(np.shape(ua)) - ub
        return {"a-cap": self.spike - ua, "hull-segment": seg}

    def special_a(self):
        return tuple(self.inner.special_a()) + (self.inner.a_max, self.spike)


def golden_max(fun, lo, hi, width=1e-12):
    """Vectorized golden-section maximization of concave ``fun`` on ``[lo, hi]``.

    ``fun`` maps an array of abscissae (one per problem) to values.  Returns
    the best value seen, endpoints included.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    best = np.maximum(fun(lo), fun(hi))
    span = float(np.max(hi - lo)) if lo.size else 0.0
    if span <= width:
        return np.maximum(best, fun(0.5 * (lo + hi)))
    n_iter = int(math.ceil(math.log(width / span) / math.log(INV_PHI)))
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(n_iter):
        right = f1 < f2
        lo = np.where(right, x1, lo)
        hi = np.where(right, hi, x2)
        nx1 = np.where(right, x2, hi - INV_PHI * (hi - lo))
        nx2 = np.where(right, lo + INV_PHI * (hi - lo), x1)
        fnew = fun(np.where(right, nx2, nx1))
        f1, f2 = np.where(right, f2, fnew), np.where(right, fnew, f1)
        x1, x2 = nx1, nx2
    return np.maximum(best, np.maximum(f1, f2))


def ball_from_name(name: str, eps: EpsTriple | None = None):
    if name == "omega0":
        return Omega0()
    if eps is None:
        raise ValueError(f"ball {name!r} needs an eps triple")
    if name == "omega":
        return OmegaEps(eps)
    if name == "hull":
        return Hull(OmegaEps(eps))
    raise ValueError(f"unknown ball {name!r}")


# -- membership ---------------------------------------------------------------

def _is_spike(ball, a, b):
    if not isinstance(ball, Hull):
        return np.zeros(np.shape(a), dtype=bool)
    return (np.abs(a) == ball.spike) & (b == 0.0)


def contains_many(ball, a, b, closure=False):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m = ball.margins(a, b)
    if closure:
        ok = np.logical_and.reduce([v >= 0.0 for v in m.values()])
    else:
        ok = np.logical_and.reduce([v > 0.0 for v in m.values()])
        ok = ok | _is_spike(ball, a, b)
    return ok


def contains(ball, x: Element, closure: bool = False) -> bool:
    """Membership of ``x`` in the open ball, or in its closure if ``closure``."""
    return bool(contains_many(ball, np.array([x.a]), np.array([x.b]), closure)[0])


# -- gauge --------------------------------------------------------------------

@dataclass(frozen=True)
class GaugeResult:
    value: float
    tolerance: float
    binding: str | None


def gauge_many(ball, a, b, tol=DEFAULT_TOL, bracket=False):
    """Gauges of the points ``(a[i], b[i])``, each within ``tol``.

    Doubling from ``4 * max(|a|, |b|)`` brackets the crossing of the ray
    with the boundary, then bisection narrows the bracket.  With
    ``bracket=True`` returns ``(lo, hi)`` instead of midpoints.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise GaugeError("non-finite input to gauge")
    m = np.maximum(np.abs(a), np.abs(b))
    zero = m == 0.0
    hi = np.where(zero, 1.0, 4.0 * m)

    def inside(idx, t):
        return contains_many(ball, a[idx] / t, b[idx] / t, closure=True)

    idx = np.flatnonzero(~zero)
    ok = inside(idx, hi[idx])
    for _ in range(60):
        if ok.all():
            break
        idx = idx[~ok]
        hi[idx] *= 2.0
        ok = inside(idx, hi[idx])
    else:
        if not ok.all():
            raise GaugeError("could not bracket the gauge within 2**60; is the ball absorbing?")

    lo = hi / 2.0
    idx = np.flatnonzero(~zero)
    ins = inside(idx, lo[idx])
    for _ in range(60):
        if not ins.any():
            break
        idx = idx[ins]
        hi[idx] = lo[idx]
        lo[idx] /= 2.0
        ins = inside(idx, lo[idx])

    idx = np.flatnonzero(~zero)
    while idx.size:
        mid = 0.5 * (lo[idx] + hi[idx])
        live = (hi[idx] - lo[idx] > 2.0 * tol) & (mid > lo[idx]) & (mid < hi[idx])
        idx, mid = idx[live], mid[live]
        if not idx.size:
            break
        ins = inside(idx, mid)
        hi[idx[ins]] = mid[ins]
        lo[idx[~ins]] = mid[~ins]

    lo[zero] = 0.0
    hi[zero] = 0.0
    if bracket:
        return lo, hi
    return 0.5 * (lo + hi)


def binding_constraint(ball, y: Element) -> str:
    """Name of the constraint closest to equality at ``y``."""
    if isinstance(ball, Hull):
        ua = abs(y.a)
        if ua <= ball.inner.a_max:
            gap = ball.upper(np.array([ua]))[0] - ball.inner.upper(np.array([ua]))[0]
            if gap <= 1e-9:
                return binding_constraint(ball.inner, y)
        m = ball.margins(np.array([y.a]), np.array([y.b]))
        return min(m, key=lambda k: m[k][0])
    m = ball.margins(np.array([y.a]), np.array([y.b]))
    return min(m, key=lambda k: m[k][0])


def gauge(ball, x: Element, tol: float = DEFAULT_TOL) -> GaugeResult:
    """Minkowski gauge ``inf{t > 0 : x in t*ball}`` with its binding constraint."""
    lo, hi = gauge_many(ball, [x.a], [x.b], tol=tol, bracket=True)
    lo, hi = float(lo[0]), float(hi[0])
    if hi == 0.0:
        return GaugeResult(0.0, tol, None)
    half = 0.5 * (hi - lo)
    return GaugeResult(0.5 * (lo + hi), half if half > 0 else tol,
                       binding_constraint(ball, x / hi))


def upper_boundary(ball, a):
    """Upper boundary ``b`` of the ball over ``|a|`` (first quadrant)."""
    a = np.abs(np.asarray(a, dtype=float))
    out = np.asarray(ball.upper(a), dtype=float).reshape(a.shape)
    return float(out) if out.ndim == 0 else out


def boundary_trace(ball, quadrant: int = 1, points: int = 200, a_values=None):
    """Polyline along the boundary in one quadrant as ``[(a, b), ...]``.

    The grid is uniform in ``a`` over ``[0, a_max]`` (or ``a_values``
    clipped to that range) with the ball's distinguished abscissae merged
    in.  A vertical edge at ``a_max`` is closed down to the axis.
    """
    if points < 2:
        raise ValueError("points must be >= 2")
    if quadrant not in (1, 2, 3, 4):
        raise ValueError("quadrant must be 1..4")
    am = ball.a_max
    if a_values is None:
        grid = np.linspace(0.0, am, points)
    else:
        grid = np.asarray(a_values, dtype=float)
        grid = grid[(grid >= 0.0) & (grid <= am)]
    extra = [x for x in ball.special_a() if 0.0 < x <= am] + [0.0, am]
    grid = np.unique(np.concatenate([grid, extra]))
    bs = np.asarray(upper_boundary(ball, grid), dtype=float)
    pts = list(zip(grid.tolist(), bs.tolist()))
    if bs[-1] > 0.0:
        pts.append((am, 0.0))
    sa, sb = {1: (1, 1), 2: (-1, 1), 3: (-1, -1), 4: (1, -1)}[quadrant]
    return [(sa * p + 0.0, sb * q + 0.0) for p, q in pts]


# -- sampled checks -----------------------------------------------------------

def sample_members(ball, n, rng):
    """``n`` strict members, uniform in the bounding box by rejection."""
    got_a, got_b, have = [], [], 0
    while have < n:
        m = max(2 * (n - have), 64)
        a = rng.uniform(-BOX_A, BOX_A, m)
        b = rng.uniform(-BOX_B, BOX_B, m)
        keep = contains_many(ball, a, b)
        got_a.append(a[keep])
        got_b.append(b[keep])
        have += int(keep.sum())
    return np.concatenate(got_a)[:n], np.concatenate(got_b)[:n]


def sample_boundary(ball, n, rng, tol=DEFAULT_TOL):
    """``n`` points of gauge one, half spread evenly in ``a`` along the upper
    boundary and half along rays with uniform angle, random quadrant."""
    n_a = n // 2
    u = rng.uniform(0.0, ball.a_max, n_a)
    bu = np.asarray(upper_boundary(ball, u), dtype=float).reshape(u.shape)
    th = rng.uniform(0.0, 0.5 * math.pi, n - n_a)
    a = np.concatenate([u, np.cos(th)])
    b = np.concatenate([bu, np.sin(th) * BOX_B])
    a = a * rng.choice([-1.0, 1.0], n)
    b = b * rng.choice([-1.0, 1.0], n)
    nrm = gauge_many(ball, a, b, tol=tol)
    return a / nrm, b / nrm


def norm_triangle_check(ball, samples=2000, seed=0, tol=DEFAULT_TOL):
    """Sampled triangle inequality, homogeneity and symmetry of the gauge."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    xa = rng.uniform(-2 * BOX_A, 2 * BOX_A, samples)
    xb = rng.uniform(-2 * BOX_B, 2 * BOX_B, samples)
    ya = rng.uniform(-2 * BOX_A, 2 * BOX_A, samples)
    yb = rng.uniform(-2 * BOX_B, 2 * BOX_B, samples)
    nx = gauge_many(ball, xa, xb, tol)
    ny = gauge_many(ball, ya, yb, tol)
    nxy = gauge_many(ball, xa + ya, xb + yb, tol)
    tri = nx + ny - nxy
    rows = [Row("triangle", float(tri.min()), "allowance", 3 * tol)]
    # reuse x as y: the x = y case of the triangle inequality is homogeneity
    for lam in (-3.0, -1.0, -0.5, 0.5, 2.0, 7.0):
        nl = gauge_many(ball, lam * xa, lam * xb, tol)
        dev = np.abs(nl - abs(lam) * nx)
        rows.append(Row(f"homogeneity[{lam:g}]", float(-dev.max()), "allowance",
                        2 * tol * (1 + abs(lam))))
    for name, (sa, sb) in {"symmetry[-x]": (-1, -1), "symmetry[a]": (-1, 1),
                           "symmetry[b]": (1, -1)}.items():
        nr = gauge_many(ball, sa * xa, sb * xb, tol)
        rows.append(Row(name, float(-np.abs(nr - nx).max()), "allowance", 2 * tol))
    return VerificationReport(f"norm-axioms[{ball.label}]", rows=rows,
                              samples_used=samples, seed=seed)


def ball_axiom_check(ball, samples=2000, seed=0, tol=DEFAULT_TOL):
    """Sampled convexity, symmetry, boundedness and non-emptiness."""
    rng = np.random.default_rng(seed)
    rows = []
    origin = ball.margins(np.zeros(1), np.zeros(1))
    rows.append(Row("origin-interior", float(min(v[0] for v in origin.values()))))

    pa = rng.uniform(-1.2 * BOX_A, 1.2 * BOX_A, samples)
    pb = rng.uniform(-1.2 * BOX_B, 1.2 * BOX_B, samples)
    inside = contains_many(ball, pa, pb)
    mismatch = 0
    for sa, sb in ((-1, -1), (-1, 1), (1, -1)):
        mismatch += int(np.count_nonzero(inside != contains_many(ball, sa * pa, sb * pb)))
    n = gauge_many(ball, pa, pb, tol)
    dev = max(float(np.abs(gauge_many(ball, -pa, -pb, tol) - n).max()),
              float(np.abs(gauge_many(ball, -pa, pb, tol) - n).max()))
    rows.append(Row("symmetry", -1.0 if mismatch else -dev, "allowance", 2 * tol))

    ma, mb = pa[inside], pb[inside]
    box = np.minimum(BOX_A + 1e-9 - np.abs(ma), BOX_B + 1e-9 - np.abs(mb))
    rows.append(Row("bounded", float(box.min()) if box.size else math.inf))

    # pairs mixing interior members and boundary points stress convexity
    half = samples // 2
    ia, ib = sample_members(ball, half, rng)
    ba, bb = sample_boundary(ball, samples - half, rng, tol)
    xa, xb = np.concatenate([ia, ba]), np.concatenate([ib, bb])
    perm = rng.permutation(xa.size)
    mid = gauge_many(ball, 0.5 * (xa + xa[perm]), 0.5 * (xb + xb[perm]), tol)
    rows.append(Row("convexity", float((1.0 - mid).min()), "allowance", 2 * tol))
    notes = [f"symmetry membership mismatches = {mismatch}"]
    return VerificationReport(f"ball-axioms[{ball.label}]", rows=rows,
                              samples_used=samples, seed=seed, notes=notes)
