"""Figure data for the two ball pictures, as ``curve,a,b`` CSV and rendered plots.

Figure 1 shows ``Omega0`` in all four quadrants with the semigroup curve
``b = f(a)`` and the points P1, P2, P3.  Figure 2 shows the cut ball
``Omega(eps)`` in the first quadrant together with its three cut lines.
"""

from __future__ import annotations

import csv
import io
import math

import numpy as np

from .algebra import E_INV, P1, P2, P3, f
from .balls import E_HALF, E_THIRD, EpsTriple, Omega0, OmegaEps, boundary_trace
from .report import fmt

HEADER = ("curve", "a", "b")
CURVES = ("boundary-q1", "boundary-q2", "boundary-q3", "boundary-q4", "semigroup",
          "cut-vertical", "cut-horizontal", "cut-tangent", "point")


def figure_rows(figure, points=400, eps: EpsTriple | None = None):
    """Rows ``(curve, a, b)`` for figure 1 or 2."""
    if figure not in (1, 2):
        raise ValueError("figure must be 1 or 2")
    if points < 2:
        raise ValueError("points must be >= 2")
    # one shared grid so both figures sample the same abscissae
    grid = np.linspace(0.0, 1.0, points)
    rows = []
    if figure == 1:
        ball, quadrants = Omega0(), (1, 2, 3, 4)
    else:
        if eps is None:
            raise ValueError("figure 2 needs an eps triple")
        ball, quadrants = OmegaEps(eps), (1,)
    for q in quadrants:
        rows += [(f"boundary-q{q}", a, b)
                 for a, b in boundary_trace(ball, q, points, a_values=grid)]
    sg = grid[1:]
    rows += [("semigroup", a, b) for a, b in zip(sg.tolist(), f(sg).tolist())]
    if figure == 2:
        e1, _, e3 = eps.as_tuple()
        rows += [("cut-vertical", E_THIRD, 0.0), ("cut-vertical", E_THIRD, E_INV)]
        rows += [("cut-horizontal", 0.0, E_INV - e3), ("cut-horizontal", E_THIRD, E_INV - e3)]
        lo, hi = E_INV, E_THIRD
        rows += [("cut-tangent", lo, E_HALF - 0.5 * lo - e1),
                 ("cut-tangent", hi, E_HALF - 0.5 * hi - e1)]
    rows += [("point", p.a, p.b) for p in (P1, P2, P3)]
    return rows


def to_csv(rows) -> str:
    out = io.StringIO()
    out.write(",".join(HEADER) + "\n")
    for curve, a, b in rows:
        out.write(f"{curve},{fmt(a)},{fmt(b)}\n")
    return out.getvalue()


def parse_csv(text):
    """Parse and validate ``curve,a,b`` text; raises ``ValueError`` on schema errors."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if tuple(header or ()) != HEADER:
        raise ValueError(f"bad header {header!r}")
    rows = []
    for n, rec in enumerate(reader, start=2):
        if len(rec) != 3:
            raise ValueError(f"line {n}: expected 3 fields, got {len(rec)}")
        curve, a, b = rec
        if curve not in CURVES:
            raise ValueError(f"line {n}: unknown curve {curve!r}")
        a, b = float(a), float(b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError(f"line {n}: non-finite value")
        rows.append((curve, a, b))
    return rows


def render(rows, path, fmt_="svg", title=None):
    """Draw the rows with matplotlib and save to ``path``."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # fixed ids and no timestamp keep the SVG byte-stable
    matplotlib.rcParams["svg.hashsalt"] = "quadrative"
    fig, ax = plt.subplots(figsize=(7.5, 5.0))
    by_curve = {}
    for curve, a, b in rows:
        by_curve.setdefault(curve, []).append((a, b))
    styles = {"semigroup": dict(ls=":", color="0.3", lw=1.2),
              "cut-vertical": dict(ls="--", color="tab:red", lw=1.0),
              "cut-horizontal": dict(ls="--", color="tab:green", lw=1.0),
              "cut-tangent": dict(ls="--", color="tab:purple", lw=1.0)}
    for curve, pts in by_curve.items():
        if curve == "point":
            continue
        xs, ys = zip(*pts)
        style = styles.get(curve, dict(ls="-", color="k", lw=1.5))
        label = None if curve.startswith("boundary-q") and curve != "boundary-q1" else curve
        ax.plot(xs, ys, label=label, **style)
    for name, (a, b) in zip(("P1", "P2", "P3"), by_curve.get("point", [])):
        ax.plot([a], [b], "o", color="tab:blue", ms=4)
        ax.annotate(name, (a, b), textcoords="offset points", xytext=(4, 4))
    ax.set_xlabel("a")
    ax.set_ylabel("b")
    ax.axhline(0.0, color="0.8", lw=0.5)
    ax.axvline(0.0, color="0.8", lw=0.5)
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format=fmt_, metadata={"Date": None} if fmt_ == "svg" else None)
    plt.close(fig)
