"""Command line front end.

Exit status: 0 when every must-hold check passes, 1 on a property
violation (or an uncertified witness / exhausted search), 2 on usage
errors such as bad flags, unreadable config files or unwritable outputs.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from importlib import resources
from pathlib import Path

from . import plotting
from .balls import DEFAULT_TOL, EpsTriple, ball_axiom_check, ball_from_name, norm_triangle_check
from .report import fmt
from .verifier import (DEFAULT_APPROACH, SearchExhausted, WitnessNotCertified,
                       check_case_analysis, check_k_bounded, check_omega0_cases,
                       find_cube_witness, search_eps)

SEED_ENV = "QUADRATIVE_SEED"

DEFAULTS = {
    "ball": None,
    "eps": None,
    "eps_file": None,
    "k": "2",
    "samples": None,
    "axiom_samples": 2_000,
    "tol": DEFAULT_TOL,
    "report": None,
    "report_format": "text",
    "approach": DEFAULT_APPROACH,
    "figure": 1,
    "points": 400,
    "format": "csv",
    "out": None,
    "grid": 10_000,
    "eps1": None,
    "eps2": None,
    "eps3": None,
}
INT_KEYS = {"samples", "axiom_samples", "seed", "figure", "points", "grid"}
FLOAT_KEYS = {"tol", "approach"}


class UsageError(Exception):
    pass


def read_keyvalue(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    out = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def load_eps_file(path) -> EpsTriple:
    kv = read_keyvalue(path)
    try:
        return EpsTriple(float(kv["eps1"]), float(kv["eps2"]), float(kv["eps3"]))
    except (KeyError, ValueError) as exc:
        raise UsageError(f"{path}: bad eps file ({exc})") from exc


def default_eps() -> EpsTriple:
    with resources.as_file(resources.files("quadrative") / "data" / "default_eps.conf") as p:
        return load_eps_file(p)


def write_eps_file(path, result):
    lines = ["# eps triple written by `quadrative search-eps`",
             f"eps1 = {fmt(result.eps.eps1)}",
             f"eps2 = {fmt(result.eps.eps2)}",
             f"eps3 = {fmt(result.eps.eps3)}",
             f"score = {fmt(result.score)}"]
    for name, rep in result.reports.items():
        lines.append(f"margin_{name} = {fmt(rep.worst_margin)}")
        lines.append(f"passed_{name} = {fmt(rep.passed)}")
    if result.witness is not None:
        lines.append(f"witness_ratio = {fmt(result.witness.ratio)}")
        lines.append(f"witness_norm_power = {fmt(result.witness.norm_power)}")
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_eps(text) -> EpsTriple:
    try:
        parts = [float(x) for x in str(text).split(",")]
        if len(parts) != 3:
            raise ValueError("expected three comma-separated numbers")
        return EpsTriple(*parts)
    except ValueError as exc:
        raise UsageError(f"bad --eps {text!r}: {exc}") from exc


def _parse_list(text, cast):
    try:
        return [cast(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad list {text!r}") from exc


def resolve(args):
    """Merge built-in defaults, the config file and flags, in that order."""
    conf = dict(DEFAULTS)
    conf["seed"] = int(os.environ.get(SEED_ENV, "0"))
    if getattr(args, "config", None):
        conf.update(read_keyvalue(args.config))
    for key, val in vars(args).items():
        if val is not None and key not in ("cmd", "func", "config", "verbose"):
            conf[key] = val
    for key in INT_KEYS:
        if conf.get(key) is not None:
            try:
                conf[key] = int(conf[key])
            except ValueError as exc:
                raise UsageError(f"{key} must be an integer") from exc
    for key in FLOAT_KEYS:
        try:
            conf[key] = float(conf[key])
        except ValueError as exc:
            raise UsageError(f"{key} must be a number") from exc
    if conf["tol"] <= 0:
        raise UsageError("tol must be positive")
    if conf["samples"] is not None and conf["samples"] < 1:
        raise UsageError("samples must be >= 1")
    return conf


def resolve_eps(conf, required=True):
    if conf.get("eps"):
        return _parse_eps(conf["eps"])
    if conf.get("eps_file"):
        return load_eps_file(conf["eps_file"])
    return default_eps() if required else None


def _ball(conf):
    name = conf["ball"]
    if name not in ("omega0", "omega", "hull"):
        raise UsageError(f"unknown ball {name!r}")
    # parse any given triple even for omega0, so a bad --eps is still an error
    eps = resolve_eps(conf, required=name != "omega0")
    if name == "omega0":
        eps = None
    return ball_from_name(name, eps), eps


def _summary(rep):
    status = "PASS" if rep.passed else "FAIL"
    return f"{status} {rep.name} worst_margin={fmt(rep.worst_margin)} witnesses={rep.witness_count}"


def cmd_verify(conf, out=None):
    out = out or sys.stdout
    ball, eps = _ball(conf)
    ks = _parse_list(conf["k"], int)
    if not ks or any(k < 2 for k in ks):
        raise UsageError("--k entries must be integers >= 2")
    seed, tol = conf["seed"], conf["tol"]
    reports = [ball_axiom_check(ball, conf["axiom_samples"], seed, tol),
               norm_triangle_check(ball, conf["axiom_samples"], seed, tol)]
    if eps is None:
        reports.append(check_omega0_cases(conf["grid"]))
    else:
        reports.append(check_case_analysis(eps, conf["grid"]))
    for k in ks:
        reports.append(check_k_bounded(ball, k, conf["samples"] or 20_000, seed, tol))
    if eps is not None:
        print(f"eps = {fmt(eps.eps1)},{fmt(eps.eps2)},{fmt(eps.eps3)}", file=out)
    for rep in reports:
        print(_summary(rep), file=out)
        if not rep.passed:
            for w in rep.witnesses[:3]:
                print("  " + w.to_text(), file=out)
    if conf["report"]:
        if conf["report_format"] == "json":
            import json
            text = json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n"
        else:
            text = "\n\n".join(r.to_text() for r in reports) + "\n"
        _write(conf["report"], text)
    return 0 if all(r.passed for r in reports) else 1


def cmd_search_eps(conf, out=None):
    out = out or sys.stdout
    lists = {}
    for key in ("eps1", "eps2", "eps3"):
        if conf.get(key):
            lists[key + "_values"] = _parse_list(conf[key], float)
    try:
        result = search_eps(grid=conf["grid"], samples=conf["samples"] or 4_000,
                            seed=conf["seed"], approach=conf["approach"], tol=conf["tol"],
                            **lists)
    except SearchExhausted as exc:
        print(f"search exhausted: {exc}", file=out)
        if exc.best is not None:
            eps, score, reports = exc.best
            print(f"best failing eps = {fmt(eps.eps1)},{fmt(eps.eps2)},{fmt(eps.eps3)} "
                  f"score={fmt(score)}", file=out)
            for name, rep in reports.items():
                print(f"  {name}: {_summary(rep)}", file=out)
        return 1
    print(f"eps = {fmt(result.eps.eps1)},{fmt(result.eps.eps2)},{fmt(result.eps.eps3)}", file=out)
    print(f"score = {fmt(result.score)}", file=out)
    for name, rep in result.reports.items():
        print(f"  {name}: {_summary(rep)}", file=out)
    path = conf["out"] or "eps.conf"
    try:
        write_eps_file(path, result)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc
    print(f"wrote {path}", file=out)
    return 0


def cmd_witness(conf, out=None):
    out = out or sys.stdout
    ball, _ = _ball(conf)
    try:
        w = find_cube_witness(ball, conf["approach"], conf["tol"])
        certified, reason = True, "certified"
    except WitnessNotCertified as exc:
        w, certified, reason = exc.witness, False, exc.reason
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(f"A = [[{fmt(w.element.a)}, {fmt(w.element.b)}]]", file=out)
    print(f"N(A) = {fmt(w.norm)}", file=out)
    print(f"N(A^3) = {fmt(w.norm_power)}", file=out)
    print(f"ratio = {fmt(w.ratio)}", file=out)
    print(reason, file=out)
    return 0 if certified else 1


def cmd_plot(conf, out=None):
    out = out or sys.stdout
    figure = conf["figure"]
    if figure not in (1, 2):
        raise UsageError("--figure must be 1 or 2")
    eps = resolve_eps(conf) if figure == 2 else None
    rows = plotting.figure_rows(figure, conf["points"], eps)
    fmt_ = conf["format"]
    if fmt_ not in ("csv", "svg", "png"):
        raise UsageError("--format must be csv, svg or png")
    path = Path(conf["out"] or f"figure{figure}.{fmt_}")
    text = plotting.to_csv(rows)
    csv_path = path if fmt_ == "csv" else path.with_suffix(".csv")
    _write(csv_path, text)
    if fmt_ != "csv":
        try:
            plotting.render(rows, path, fmt_, title=f"Figure {figure}")
        except OSError as exc:
            raise UsageError(f"cannot write {path}: {exc}") from exc
    print(f"wrote {csv_path}" + ("" if fmt_ == "csv" else f" and {path}"), file=out)
    return 0


def _write(path, text):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def build_parser():
    parser = argparse.ArgumentParser(prog="quadrative", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p, ball=True):
        p.add_argument("--config", help="key = value file; flags override it")
        if ball:
            p.add_argument("--ball", choices=("omega0", "omega", "hull"))
        p.add_argument("--eps", help="eps1,eps2,eps3")
        p.add_argument("--eps-file", dest="eps_file")
        p.add_argument("--seed", type=int, help=f"default from ${SEED_ENV}, else 0")
        p.add_argument("--tol", type=float)

    p = sub.add_parser("verify", help="run the boundedness checks on one ball")
    common(p)
    p.add_argument("--k", help="comma-separated powers, e.g. 2,3")
    p.add_argument("--samples", type=int)
    p.add_argument("--axiom-samples", dest="axiom_samples", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--report", help="write the full report here")
    p.add_argument("--report-format", dest="report_format", choices=("text", "json"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search-eps", help="search a grid of eps triples")
    common(p, ball=False)
    for key in ("eps1", "eps2", "eps3"):
        p.add_argument(f"--{key}", help="comma-separated candidate values")
    p.add_argument("--grid", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--approach", type=float)
    p.add_argument("--out", help="parameter file to write (default eps.conf)")
    p.set_defaults(func=cmd_search_eps)

    p = sub.add_parser("witness", help="print a cube counterexample near P3")
    common(p)
    p.add_argument("--approach", type=float)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("plot", help="emit figure data (and a rendered figure)")
    common(p, ball=False)
    p.add_argument("--figure", type=int, choices=(1, 2))
    p.add_argument("--points", type=int)
    p.add_argument("--format", choices=("csv", "svg", "png"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        conf = resolve(args)
        if conf.get("ball") is None:
            conf["ball"] = "omega" if args.cmd == "witness" else "omega0"
        return args.func(conf)
    except UsageError as exc:
        print(f"quadrative: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
