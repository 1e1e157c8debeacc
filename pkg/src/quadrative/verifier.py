"""Executable versions of the boundedness arguments.

The grid checks evaluate each inequality of the case analysis at the
largest admissible ``b`` for every grid abscissa; the sampled checks sweep
the gauge over members and boundary points of a ball.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import E_INV, P3, Element, g_ext, power_arrays
from .balls import (DEFAULT_TOL, E_HALF, E_THIRD, E_TWO_THIRDS, EpsTriple, Hull,
                    Omega0, OmegaEps, gauge, gauge_many, sample_boundary, sample_members)
from .report import Row, VerificationReport, Witness

log = logging.getLogger(__name__)

BOUNDARY_SHRINK = 1.0 - 1e-6
DEFAULT_APPROACH = 1.0 - 1e-5
# rounding allowance for rows that vanish identically at the supremum
TIGHT_ALLOWANCE = 1e-14
MAX_WITNESSES = 10


class WitnessNotCertified(Exception):
    def __init__(self, witness, reason):
        super().__init__(reason)
        self.witness = witness
        self.reason = reason


class SearchExhausted(Exception):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


def certification_threshold(norm, k, tol=DEFAULT_TOL):
    """Smallest ``ratio - 1`` that bisection error cannot explain."""
    return 100.0 * (tol / norm ** k + tol)


def _as_ball(ball_or_eps):
    if isinstance(ball_or_eps, EpsTriple):
        return OmegaEps(ball_or_eps)
    return ball_or_eps


def grid_row(name, x, slack, kind="strict", allowance=0.0):
    """Row for ``slack`` sampled on the sorted grid ``x``.

    ``certified_lower`` bounds the slack between grid nodes using a local
    Lipschitz estimate: twice the steepest difference quotient over the
    interval and its two neighbours.
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(slack, dtype=float)
    i = int(np.argmin(s))
    lip, lower = math.nan, math.nan
    if x.size >= 2:
        h = np.diff(x)
        q = np.abs(np.diff(s)) / np.where(h > 0, h, 1.0)
        qpad = np.concatenate([[q[0]], q, [q[-1]]])
        local = 2.0 * np.maximum(np.maximum(qpad[:-2], qpad[1:-1]), qpad[2:])
        lows = 0.5 * (s[:-1] + s[1:]) - 0.5 * local * h
        lip = float(local.max())
        lower = float(min(lows.min(), s.min()))
    return Row(name, float(s[i]), kind, allowance, float(x[i]), lower, lip)


# -- Omega0 ------------------------------------------------------------------

def check_omega0_cases(grid=10_000, ks=range(2, 9)):
    """Both cases of the all-k argument for ``Omega0`` with ``b = g(a)``.

    For ``1/e <= a <= 1`` the image ``k g(a) a^(k-1) = f(a^k)`` sits on the
    boundary curve, so that row is tight.  For ``0 <= a <= 1/e`` the bound
    ``k a^(k-1)/e <= k e^-k <= 1/e`` has room to spare.
    """
    if grid < 10:
        raise ValueError("grid must be >= 10")
    rows = []
    hi = np.linspace(E_INV, 1.0, grid)
    lo = np.linspace(0.0, E_INV, grid)
    for k in ks:
        ak = hi ** k
        rows.append(grid_row(f"case1[k={k}]", hi,
                             g_ext(ak) - k * g_ext(hi) * hi ** (k - 1),
                             "tight", TIGHT_ALLOWANCE))
        rows.append(grid_row(f"case2[k={k}]", lo, E_INV - k * E_INV * lo ** (k - 1)))
        rows.append(Row(f"case2-peak[k={k}]", E_INV - k * math.exp(-k)))
    return VerificationReport("omega0-cases", rows=rows, samples_used=2 * grid)


# -- Omega(eps) --------------------------------------------------------------

def check_eps1_tangent_condition(eps: EpsTriple, grid=10_000):
    """The shifted tangent ``e^-1/2 - x/2 - eps1`` stays above ``g`` for
    ``0 < x <= e^-2/3``, which makes the tangent cut redundant for squares."""
    x = np.linspace(0.0, E_TWO_THIRDS, grid + 1)[1:]
    slack = E_HALF - 0.5 * x - eps.eps1 - g_ext(x)
    return VerificationReport("eps1-tangent", rows=[grid_row("tangent>g", x, slack)],
                              samples_used=grid)


def check_case_analysis(eps: EpsTriple, grid=10_000):
    """Cases 1-3 of the squaring argument for ``Omega(eps)``.

    Each case bounds ``b`` from above (case 1 and 3 by ``g(a)``, case 2 by
    the shifted tangent) and checks ``2ab < g(a^2)`` and
    ``2ab < 1/e - eps3`` at that bound.  In case 1 the first inequality is
    an identity, ``2a f(a) = f(a^2)``, valid because ``a^2 >= 1/e``; the
    row is tight and the branch condition is checked as its own row.
    """
    e1, e2, e3 = eps.as_tuple()
    pre = check_eps1_tangent_condition(eps, grid)
    rows = [Row("(a-3)-redundant", pre.worst_margin)]
    if not pre.passed:
        return VerificationReport("case-analysis", rows=rows,
                                  notes=["tangent condition fails; cases not evaluated"])
    cap = E_INV - e3

    a = np.linspace(E_HALF + e2, E_THIRD, grid)
    b = g_ext(a)
    rows += [
        grid_row("case1:(a-1)", a, g_ext(a * a) - 2 * a * b, "tight", TIGHT_ALLOWANCE),
        grid_row("case1:branch a^2>1/e", a, a * a - E_INV),
        grid_row("case1:a^2<e^-1/3", a, E_THIRD - a * a),
        grid_row("case1:(a-2)", a, cap - 2 * a * b),
    ]

    a = np.linspace(E_HALF - e2, E_HALF + e2, grid)
    b = E_HALF - 0.5 * a - e1
    rows += [
        grid_row("case2:(a-1)", a, g_ext(a * a) - 2 * a * b),
        grid_row("case2:(a-2)", a, cap - 2 * a * b),
    ]

    a = np.linspace(0.0, E_HALF - e2, grid)
    b = g_ext(a)
    low = a[a <= E_INV]
    rows += [
        grid_row("case3:(ab-2)", a, E_INV - a * a),
        grid_row("case3:(a-1)", a, g_ext(a * a) - 2 * a * b),
        grid_row("case3:(a-2)", a, cap - 2 * a * b),
        grid_row("case3:2ag<=2/e^2", low, 2 * E_INV ** 2 - 2 * low * g_ext(low),
                 "tight", TIGHT_ALLOWANCE),
        Row("case3:2/e^2<cap", cap - 2 * E_INV ** 2),
    ]
    return VerificationReport("case-analysis", rows=rows, samples_used=3 * grid)


# -- sampled sweeps ------------------------------------------------------------

def sweep_points(ball, samples, rng, tol=DEFAULT_TOL):
    """Half boundary points pulled in to gauge ``1 - 1e-6``, half uniform members."""
    nb = samples // 2
    ba, bb = sample_boundary(ball, nb, rng, tol)
    ma, mb = sample_members(ball, samples - nb, rng)
    return (np.concatenate([BOUNDARY_SHRINK * ba, ma]),
            np.concatenate([BOUNDARY_SHRINK * bb, mb]))


def check_k_bounded(ball, k, samples=20_000, seed=0, tol=DEFAULT_TOL):
    """Sweep ``N(A^k) <= N(A)^k`` over boundary-weighted samples."""
    if k < 2:
        raise ValueError("k must be >= 2")
    ball = _as_ball(ball)
    rng = np.random.default_rng(seed)
    a, b = sweep_points(ball, samples, rng, tol)
    n = gauge_many(ball, a, b, tol)
    ak, bk = power_arrays(a, b, k)
    nk = gauge_many(ball, ak, bk, tol)
    slack = n ** k - nk
    allowance = 10.0 * tol
    ratio = nk / n ** k
    bad = np.flatnonzero((slack < -allowance)
                         & (ratio - 1.0 > certification_threshold(n, k, tol)))
    order = bad[np.argsort(-ratio[bad], kind="stable")][:MAX_WITNESSES]
    witnesses = [Witness.from_norms(Element(a[i], b[i]), n[i], nk[i], k) for i in order]
    escapes = int(np.count_nonzero((n < 1.0) & (nk > 1.0 + allowance)))
    return VerificationReport(
        f"k-bounded[{ball.label},k={k}]",
        rows=[Row(f"N(A^{k})<=N(A)^{k}", float(slack.min()), "allowance", allowance)],
        witnesses=witnesses, witness_count=int(bad.size), samples_used=samples, seed=seed,
        notes=[f"max ratio = {ratio.max():.17g}", f"set-level escapes = {escapes}"])


def find_cube_witness(ball, approach=DEFAULT_APPROACH, tol=DEFAULT_TOL, k=3):
    """Witness ``A = approach * P3 / N(P3)`` for a failure of ``k``-boundedness.

    The ratio ``N(A^k) / N(A)^k`` does not depend on ``approach`` (both
    sides are homogeneous of degree ``k``); ``approach`` decides whether
    ``A^k`` also leaves the closed ball while ``A`` is inside it.  The
    witness is certified when the ratio clears the bisection error and
    ``A^k`` escapes; otherwise :class:`WitnessNotCertified` is raised.
    """
    if not 0.0 < approach < 1.0:
        raise ValueError("approach must lie in (0, 1)")
    ball = _as_ball(ball)
    p = P3 / gauge(ball, P3, tol).value
    A = approach * p
    n = gauge(ball, A, tol).value
    nk = gauge(ball, A ** k, tol).value
    w = Witness.from_norms(A, n, nk, k)
    if w.ratio - 1.0 <= certification_threshold(n, k, tol):
        raise WitnessNotCertified(w, f"ratio {w.ratio:.17g} not certified above 1")
    if nk <= 1.0 + 10.0 * tol:
        raise WitnessNotCertified(
            w, f"A^{k} stays in the ball (N = {nk:.17g}); approach too small for this eps3")
    return w


def check_hull_variant(eps: EpsTriple, samples=20_000, seed=0, tol=DEFAULT_TOL,
                       approach=DEFAULT_APPROACH):
    """The hull with ``[[+-1, 0]]``: identity of norm one, squares stay inside,
    cubes escape near ``P3``."""
    hull = Hull(OmegaEps(eps))
    unit = gauge(hull, Element(1.0, 0.0), tol).value
    rows = [Row("N(identity)=1", -abs(unit - 1.0), "allowance", tol)]
    sq = check_k_bounded(hull, 2, samples, seed, tol)
    rows.append(Row("2-bounded", sq.rows[0].min_slack, "allowance", sq.rows[0].allowance))
    witnesses, notes = [], [f"N(identity) = {unit:.17g}"]
    try:
        w = find_cube_witness(hull, approach, tol)
        witnesses.append(w)
        rows.append(Row("cube-witness", w.ratio - 1.0 - certification_threshold(w.norm, 3, tol)))
    except WitnessNotCertified as exc:
        rows.append(Row("cube-witness", exc.witness.ratio - 1.0
                        - certification_threshold(exc.witness.norm, 3, tol)))
        notes.append(exc.reason)
    return VerificationReport("hull-variant", rows=rows, witnesses=witnesses,
                              witness_count=len(witnesses), samples_used=samples,
                              seed=seed, notes=notes)


# -- eps search ---------------------------------------------------------------

def decade_values(hi_exp, lo_exp, mantissas=(1, 2, 3, 5, 7)):
    """Values ``m * 10**e`` for ``e`` from ``hi_exp`` down to ``lo_exp``, descending."""
    vals = {float(f"{m}e{e}") for e in range(lo_exp, hi_exp + 1) for m in mantissas}
    top = 10.0 ** hi_exp
    return sorted((v for v in vals if v <= top * (1 + 1e-12)), reverse=True)


DEFAULT_EPS1 = decade_values(-1, -3)
DEFAULT_EPS2 = decade_values(-2, -5)
DEFAULT_EPS3 = decade_values(-4, -8)


@dataclass
class SearchResult:
    eps: EpsTriple
    score: float
    reports: dict = field(default_factory=dict)
    witness: Witness | None = None
    candidates: int = 0
    rejected_order: int = 0


def _analytic(eps, grid, approach, tol, tangent_cache):
    tan = tangent_cache.get(eps.eps1)
    if tan is None:
        tan = tangent_cache[eps.eps1] = check_eps1_tangent_condition(eps, grid)
    reports = {"tangent": tan}
    if not tan.passed:
        return reports, None, tan.worst_margin
    cases = check_case_analysis(eps, grid)
    reports["cases"] = cases
    if not cases.passed:
        return reports, None, min(tan.worst_margin, cases.worst_margin)
    try:
        w = find_cube_witness(eps, approach, tol)
    except WitnessNotCertified as exc:
        return reports, None, min(tan.worst_margin, cases.worst_margin,
                                  exc.witness.norm_power - 1.0)
    score = min(tan.worst_margin, cases.worst_margin, w.ratio - 1.0, w.norm_power - 1.0)
    return reports, w, score


def search_eps(eps1_values=None, eps2_values=None, eps3_values=None, grid=10_000,
               samples=4_000, seed=0, approach=DEFAULT_APPROACH, tol=DEFAULT_TOL):
    """Find an eps triple for which the squaring argument goes through and
    cubes fail.

    Every ordered triple is screened by the tangent condition, the case
    analysis and the cube witness at ``approach``; survivors are ranked by
    the smallest of those margins (and the witness's escape ``N(A^3) - 1``)
    and the best one whose sampled sweeps confirm ``k = 2`` and refute
    ``k = 3`` is returned.
    """
    e1s = DEFAULT_EPS1 if eps1_values is None else list(eps1_values)
    e2s = DEFAULT_EPS2 if eps2_values is None else list(eps2_values)
    e3s = DEFAULT_EPS3 if eps3_values is None else list(eps3_values)
    cache, passing, rejected, total = {}, [], 0, 0
    best_fail = None
    for e1, e2, e3 in itertools.product(e1s, e2s, e3s):
        total += 1
        try:
            eps = EpsTriple(e1, e2, e3)
        except ValueError:
            rejected += 1
            continue
        reports, w, score = _analytic(eps, grid, approach, tol, cache)
        if w is None:
            if best_fail is None or score > best_fail[1]:
                best_fail = (eps, score, reports)
            continue
        passing.append((score, eps, reports, w))
    log.info("search: %d candidates, %d ordered, %d pass the analytic screen",
             total, total - rejected, len(passing))
    passing.sort(key=lambda t: (-t[0], t[1].as_tuple()))
    for score, eps, reports, w in passing:
        sq = check_k_bounded(eps, 2, samples, seed, tol)
        cube = check_k_bounded(eps, 3, samples, seed, tol)
        if sq.passed and cube.witness_count > 0:
            reports = dict(reports, square=sq, cube=cube)
            return SearchResult(eps, score, reports, w, total, rejected)
        if best_fail is None or score > best_fail[1]:
            best_fail = (eps, score, dict(reports, square=sq, cube=cube))
    raise SearchExhausted("no candidate triple passed every check; refine the grid",
                          best_fail)
