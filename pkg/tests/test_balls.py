import math

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from quadrative.algebra import E_INV, P1, P2, P3, Element, semigroup_point
from quadrative.balls import (DEFAULT_TOL, E_HALF, E_THIRD, EpsTriple, GaugeError, Hull,
                              Omega0, OmegaEps, ball_axiom_check, ball_from_name,
                              binding_constraint, boundary_trace, contains, contains_many,
                              gauge, gauge_many, golden_max, norm_triangle_check,
                              upper_boundary)

TOL = DEFAULT_TOL


def random_points(n, seed, scale=1.5):
    rng = np.random.default_rng(seed)
    return rng.uniform(-scale, scale, n), rng.uniform(-scale * E_INV, scale * E_INV, n)


@pytest.fixture(params=["omega0", "omega", "hull"])
def ball(request, omega0, omega, hull):
    return {"omega0": omega0, "omega": omega, "hull": hull}[request.param]


# -- EpsTriple and construction -----------------------------------------------

@pytest.mark.parametrize("triple", [(1e-2, 1e-3, 1e-3), (1e-2, 2e-2, 1e-4), (1.0, 0.1, 0.01),
                                    (1e-2, 1e-3, 0.0), (math.nan, 1e-3, 1e-4)])
def test_eps_triple_rejects_bad_order(triple):
    with pytest.raises(ValueError):
        EpsTriple(*triple)


def test_hull_validation(omega):
    with pytest.raises(ValueError):
        Hull(Hull(omega))
    with pytest.raises(ValueError):
        Hull(omega, (Element(1, 0), Element(0.5, 0)))
    with pytest.raises(ValueError):
        Hull(omega, (Element(0.5, 0), Element(-0.5, 0)))


def test_ball_from_name(eps_star):
    assert isinstance(ball_from_name("omega0"), Omega0)
    assert isinstance(ball_from_name("hull", eps_star), Hull)
    with pytest.raises(ValueError):
        ball_from_name("omega")
    with pytest.raises(ValueError):
        ball_from_name("disc", eps_star)


# -- membership -------------------------------------------------------------------

def test_contains_examples(omega0, omega):
    assert contains(omega0, Element(0, 0))
    assert not contains(omega0, P1)
    assert contains(omega0, P1, closure=True)
    assert not contains(omega, Element(E_THIRD, 0.0))
    assert contains(omega, Element(E_THIRD, 0.0), closure=True)


def test_p3_in_closure_of_omega_but_p1_p2_are_not(omega):
    # the cut ball reaches P3 but stays away from P1 and P2
    assert abs(gauge(omega, P3).value - 1) <= TOL
    assert not contains(omega, P1, closure=True)
    assert not contains(omega, P2, closure=True)
    assert contains(omega, 0.999999 * P3)


def test_hull_membership(hull):
    assert contains(hull, Element(1.0, 0.0))
    assert contains(hull, Element(-1.0, 0.0))
    assert contains(hull, Element(0.9, 0.01))
    for delta in (1e-12, 1e-6, 1e-3, 0.1):
        assert not contains(hull, Element(1.0, delta), closure=True)
        assert not contains(hull, Element(1.0, -delta), closure=True)
    assert not contains(hull, Element(1.0 + 1e-12, 0.0), closure=True)


def test_hull_upper_boundary_against_scipy_hull(hull, omega):
    # independent route: polygonal convex hull of a dense inner boundary plus the spikes
    u = np.linspace(0, omega.a_max, 20_001)
    b = upper_boundary(omega, u)
    pts = np.concatenate([np.c_[u, b], np.c_[u, -b], np.c_[-u, b], np.c_[-u, -b],
                          [[omega.a_max, 0.0], [1.0, 0.0], [-1.0, 0.0]]])
    ch = ConvexHull(pts)
    # each facet n.x + c <= 0; the top boundary at a is min over upward facets
    a = np.linspace(0, 1, 401)
    n, c = ch.equations[:, :2], ch.equations[:, 2]
    up = n[:, 1] > 1e-12
    top = np.min((-c[up][None, :] - n[up][None, :, 0] * a[:, None]) / n[up][None, :, 1], axis=1)
    assert np.max(np.abs(upper_boundary(hull, a) - top)) < 1e-6


def test_hull_segment_is_straight_line_to_p3(hull):
    slope = P3.b / (1.0 - P3.a)
    a = np.linspace(P3.a, 1.0, 50)
    assert np.allclose(upper_boundary(hull, a), slope * (1.0 - a), atol=1e-12)


def test_membership_is_symmetric(ball):
    a, b = random_points(5000, 11)
    m = contains_many(ball, a, b)
    for sa, sb in ((-1, 1), (1, -1), (-1, -1)):
        assert np.array_equal(m, contains_many(ball, sa * a, sb * b))


def test_golden_max_against_brute_force():
    rng = np.random.default_rng(12)
    centers = rng.uniform(-1, 2, 200)
    lo, hi = np.zeros(200), np.ones(200)

    def fun(x):
        return -np.abs(x - centers) - 0.3 * (x - centers) ** 2

    got = golden_max(fun, lo, hi)
    grid = np.linspace(0, 1, 200_001)
    brute = np.max(-np.abs(grid[None, :] - centers[:, None])
                   - 0.3 * (grid[None, :] - centers[:, None]) ** 2, axis=1)
    nearest = np.clip(centers, 0, 1)
    exact = -np.abs(nearest - centers) - 0.3 * (nearest - centers) ** 2
    assert np.all(got >= brute - 1e-12)
    assert np.allclose(got, exact, atol=1e-11)


# -- gauge ------------------------------------------------------------------------

def test_gauge_examples(omega0, omega, eps_star):
    assert gauge(omega0, Element(0, 0)).value == 0.0
    assert abs(gauge(omega0, P1).value - 1) <= TOL
    assert abs(gauge(omega0, Element(2 * E_INV, 2 * E_INV)).value - 2) <= 2 * TOL
    res = gauge(omega, P1)
    assert abs(res.value - 1 / (1 - math.e * eps_star.eps3)) <= TOL
    assert res.binding == "flat-cap"


def test_gauge_result_tolerance(omega0):
    for tol in (1e-6, 1e-9, 1e-12):
        res = gauge(omega0, P2, tol)
        assert 0 < res.tolerance <= tol
        assert abs(res.value - 1.0) <= tol


def test_gauge_semigroup_closed_form(omega0):
    # for t >= 1 the flat part of g binds: N(G(t)) = t e^(1-t)
    for t in np.linspace(1, 6, 200):
        res = gauge(omega0, semigroup_point(t))
        assert abs(res.value - t * math.exp(1 - t)) <= 5 * TOL
        assert res.binding == "g-curve"


def test_gauge_errors(omega0):
    with pytest.raises(GaugeError):
        gauge_many(omega0, [math.nan], [0.0])

    class Empty:
        a_max = 1.0
        label = "empty"

        def margins(self, a, b):
            return {"never": np.full(np.shape(a), -1.0)}

    with pytest.raises(GaugeError):
        gauge(Empty(), Element(1.0, 0.0))
    with pytest.raises(ValueError):
        gauge(omega0, P1, tol=0.0)


def test_gauge_membership_duality(ball):
    a, b = random_points(1000, 13)
    n = gauge_many(ball, a, b)
    outside_scale = n - 10 * TOL
    assert np.all(contains_many(ball, a / (n + 10 * TOL), b / (n + 10 * TOL)))
    pos = outside_scale > 0
    assert not np.any(contains_many(ball, a[pos] / outside_scale[pos], b[pos] / outside_scale[pos]))


@pytest.mark.parametrize("lam", [-3, -1, -0.5, 0.5, 2, 7])
def test_gauge_positive_homogeneity(ball, lam):
    a, b = random_points(300, 14)
    n = gauge_many(ball, a, b)
    nl = gauge_many(ball, lam * a, lam * b)
    assert np.all(np.abs(nl - abs(lam) * n) <= 2 * TOL * (1 + abs(lam)))


def test_gauge_monotone_under_inclusion(omega0, omega, hull):
    a, b = random_points(2000, 15)
    n0 = gauge_many(omega0, a, b)
    n1 = gauge_many(omega, a, b)
    nh = gauge_many(hull, a, b)
    assert np.all(n1 >= n0 - 2 * TOL)
    assert np.all(nh <= n1 + 2 * TOL)


def test_binding_constraint_is_tight(ball):
    a, b = random_points(200, 16)
    n = gauge_many(ball, a, b)
    for ya, yb in zip(a / n, b / n):
        name = binding_constraint(ball, Element(ya, yb))
        m = ball.margins(np.array([ya]), np.array([yb]))
        if isinstance(ball, Hull) and name not in m:
            m = ball.inner.margins(np.array([ya]), np.array([yb]))
        assert abs(m[name][0]) <= 1e-8, (ya, yb, name)


def test_binding_names(omega, hull):
    assert gauge(omega, Element(1.0, 0.0)).binding == "a-cap"
    assert gauge(omega, P2).binding == "tangent-cut"
    assert gauge(omega, Element(0.0, 1.0)).binding == "flat-cap"
    assert gauge(hull, Element(0.9, 0.05)).binding == "hull-segment"
    assert gauge(hull, Element(1.0, 0.0)).binding == "a-cap"
    assert binding_constraint(hull, Element(0.1, E_INV - 2e-5)) == "flat-cap"


# -- boundary trace --------------------------------------------------------------

def test_upper_boundary_examples(omega0, omega, eps_star):
    assert upper_boundary(omega0, E_HALF) == pytest.approx(0.5 * E_HALF, rel=1e-15)
    assert upper_boundary(omega0, math.exp(-2)) == E_INV
    assert upper_boundary(omega, E_HALF) == pytest.approx(0.5 * E_HALF - eps_star.eps1, rel=1e-15)


def test_boundary_trace_contains_special_points(omega0):
    pts = dict(boundary_trace(omega0, 1, 50))
    assert pts[E_HALF] == pytest.approx(0.5 * E_HALF, rel=1e-15)
    assert pts[E_INV] == pytest.approx(E_INV, rel=1e-15)
    assert pts[0.0] == E_INV
    assert pts[1.0] == 0.0


def test_boundary_trace_reflections(omega):
    q1 = boundary_trace(omega, 1, 30)
    assert q1[-1] == (E_THIRD, 0.0)  # closes the vertical cut
    for q, (sa, sb) in {2: (-1, 1), 3: (-1, -1), 4: (1, -1)}.items():
        assert boundary_trace(omega, q, 30) == [(sa * a + 0.0, sb * b + 0.0) for a, b in q1]


def test_boundary_trace_points_are_on_boundary(ball):
    pts = boundary_trace(ball, 1, 100)
    a = np.array([p[0] for p in pts])
    b = np.array([p[1] for p in pts])
    nonzero = (a != 0) | (b != 0)
    n = gauge_many(ball, a[nonzero], b[nonzero])
    assert np.all(np.abs(n - 1) <= 1e-8)


def test_hull_trace_reaches_identity(hull):
    pts = boundary_trace(hull, 1, 100)
    assert pts[-1] == (1.0, 0.0)


def test_boundary_trace_validation(omega0):
    with pytest.raises(ValueError):
        boundary_trace(omega0, 1, 1)
    with pytest.raises(ValueError):
        boundary_trace(omega0, 5, 10)


# -- sampled norm and ball checks ------------------------------------------------

def test_norm_triangle_check(ball):
    rep = norm_triangle_check(ball, samples=1000, seed=3)
    assert rep.passed, rep.to_text()
    assert rep.row("homogeneity[2]").ok


def test_ball_axiom_check(ball):
    rep = ball_axiom_check(ball, samples=1000, seed=4)
    assert rep.passed, rep.to_text()
    assert rep.row("origin-interior").min_slack > 0


def test_ball_axiom_check_catches_asymmetry():
    class Lopsided(Omega0):
        label = "lopsided"

        def margins(self, a, b):
            m = super().margins(a, b)
            m["shift"] = 0.5 - np.asarray(a)
            return m

    rep = ball_axiom_check(Lopsided(), samples=500, seed=1)
    assert not rep.passed
    assert not rep.row("symmetry").ok
