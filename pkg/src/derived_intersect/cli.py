"""Command-line front end. Every command builds a canonical JSON report."""

from __future__ import annotations

import argparse
import configparser
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import ENGINE_VERSION
from .cech import ProjProduct, SheafPresentation, bott_dims, bundle_label, cech_dims, cotangent_data
from .complexes import formality_report, verify_splitting_identity
from .errors import EngineError, ParseError, UnknownSuiteError, WindowError
from .ext import bott_oracle_totals, degeneration_check, GlobalCI, named_ci, NAMED_CI
from .graded import GradedIdeal, GradedRing
from .hkr import FAILS, HKRAnalysis, analyze_embedding, build_embedding, det_conormal
from .linalg import rank
from .report import SCHEMA_VERSION, dumps, make_report

DEFAULT_WINDOW = 12
WINDOW_ENV = "DERIVED_INTERSECT_WINDOW"

PAPER_EXAMPLES = {
    "p1xp1-in-p5": ((1, 1), (1, 2)),
    "conic-in-p2": ((1,), (2,)),
    "p1-identity": ((1,), (1,)),
}

SUITES = ("splitting", "chain-maps", "cech-oracle", "paper-example", "degeneration")

CHAIN_MAP_CASES = (
    ("x,y", "x,y"),
    ("x,y,z", "x^2,y*z"),
    ("x,y,z", "x*y - z^2"),
    ("x,y,z,w", "x*y - z*w,x^2 + y^2 + z^2 + w^2"),
)


class SuiteFailure(EngineError):
    code = 8
    kind = "verification_failure"

    def __init__(self, message: str, reproducer: dict):
        super().__init__(message)
        self.reproducer = reproducer

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["reproducer"] = self.reproducer
        return out


def default_window() -> int:
    raw = os.environ.get(WINDOW_ENV)
    if raw is None:
        return DEFAULT_WINDOW
    try:
        w = int(raw)
    except ValueError:
        raise ParseError(f"{WINDOW_ENV} must be an integer, got {raw!r}")
    if w < 1:
        raise ParseError(f"{WINDOW_ENV} must be positive")
    return w


def parse_degree(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.replace("(", "").replace(")", "").split(",") if x.strip())
    except ValueError:
        raise ParseError(f"cannot parse multidegree {text!r}")


def split_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def run_parallel(fn, items, jobs: int) -> list:
    """Ordered map; results are assembled in input order either way."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------- commands


def cmd_paper_example(args) -> dict:
    if args.name not in PAPER_EXAMPLES:
        raise ParseError(f"unknown example {args.name!r}; known: {sorted(PAPER_EXAMPLES)}")
    dims, ell = PAPER_EXAMPLES[args.name]
    e = build_embedding(ProjProduct(dims), ell)
    grid = (-5, 5) if len(dims) == 2 else None
    res = analyze_embedding(e, args.window, grid=grid, stability_check=args.stability_check)
    res["verdict_text"] = f"condition (*) {res['condition_star']['verdict']}"
    return res


def _ring_from(ring_text: str, degrees_text: str | None) -> GradedRing:
    names = split_list(ring_text)
    if not names:
        raise ParseError("empty variable list")
    if degrees_text:
        degs = [int(x) for x in split_list(degrees_text)]
        if len(degs) != len(names):
            raise ParseError("one degree per variable")
        return GradedRing(tuple(names), tuple((d,) for d in degs))
    return GradedRing.standard(names)


def cmd_tor(args) -> dict:
    try:
        ring = _ring_from(args.ring, args.degrees)
    except ValueError as exc:
        raise ParseError(str(exc))
    ideal = GradedIdeal.parse(ring, split_list(args.ideal), declared_regular=True)
    rep = formality_report(ideal, args.degree_window)
    return {
        "ring": list(ring.names),
        "ideal": ideal.format(),
        "tor_dims": [rep["tor_total_dims"].get(k, 0) for k in range(len(ideal.generators) + 1)],
        "tor_bidegree_dims": {f"{k}|{','.join(map(str, d))}": n for (k, d), n in sorted(rep["tor_dims"].items()) if n},
        "formal": rep["formal"],
        "checks": rep["checks"],
        "regularity_witnesses": rep["regularity_certificate"]["witnesses"],
        "stability": {"degree_window": args.degree_window, "exact_per_degree": True},
    }


def _sheaf_from(space: ProjProduct, args) -> SheafPresentation:
    if args.sheaf == "omega":
        return cotangent_data(space)[0]
    if not args.bundle:
        raise ParseError("give --bundle (repeatable) or --sheaf omega")
    degs = [parse_degree(b) for b in args.bundle]
    for d in degs:
        if len(d) != space.ngroups:
            raise ParseError(f"multidegree {d} does not match {space.name}")
    return SheafPresentation.line_bundles(space, degs)


def cmd_cech(args) -> dict:
    space = ProjProduct.parse(args.space)
    sheaf = _sheaf_from(space, args)
    dims, cert = cech_dims(space, sheaf, args.window, args.stability_check)
    out = {"space": space.name, "sheaf": sheaf.name, "dims": dims, "stability": cert}
    if sheaf.kind == "sum":
        oracle = [0] * (space.dimension + 1)
        for d in sheaf.ambient.degrees:
            oracle = [a + b for a, b in zip(oracle, bott_dims(space, d))]
        out["bott_dims"] = oracle
        out["matches_bott"] = oracle == dims
    return out


def cmd_alpha(args) -> dict:
    space = ProjProduct.parse(args.space)
    e = build_embedding(space, parse_degree(args.ell))
    an = HKRAnalysis(e, args.window)
    bundles = [parse_degree(b) for b in args.bundle] if args.bundle else [e.ell, det_conormal(e)]
    items = []
    for d in bundles:
        if len(d) != space.ngroups:
            raise ParseError(f"multidegree {d} does not match {space.name}")
        a = an.alpha(d)
        items.append({"degree": list(d), "c1": an.c1(d).coordinates, "alpha": a.coordinates, "zero": a.is_zero()})
    return {
        "embedding": e.label,
        "eta_h1": [list(r) for r in an.eta.to_dense()],
        "alpha": items,
        "stability": _alpha_stability(e, an, bundles, args),
    }


def _alpha_stability(e, an: HKRAnalysis, bundles, args) -> dict:
    cert = {"window": args.window, "doubled_window": None, "stable": None, "mode": an.model.mode}
    if args.stability_check:
        twice = HKRAnalysis(e, 2 * args.window)
        stable = rank(twice.eta) == rank(an.eta) and all(
            twice.alpha(d).is_zero() == an.alpha(d).is_zero() for d in bundles
        )
        cert.update(doubled_window=2 * args.window, stable=stable)
        if not stable:
            raise WindowError("alpha results changed on doubling the window", suggested_window=2 * args.window)
    return cert


def _ci_from(args) -> GlobalCI:
    if args.ci:
        return named_ci(args.ci)
    if not (args.space and args.section):
        raise ParseError("give --ci NAME or --space with one or more --section")
    return GlobalCI.parse(ProjProduct.parse(args.space), args.section, "custom")


def cmd_ext_ci(args) -> dict:
    ci = _ci_from(args)
    return degeneration_check(ci, args.window, args.stability_check)


# ------------------------------------------------------------------ suites


def _splitting_item(item):
    dim, length, odd = item
    return {"dim": dim, "max_length": length, "odd": odd, "pass": verify_splitting_identity(dim, length, odd)}


def _chain_map_item(item):
    ring_text, ideal_text = item
    ring = GradedRing.standard(split_list(ring_text))
    ideal = GradedIdeal.parse(ring, split_list(ideal_text), declared_regular=True)
    rep = formality_report(ideal, 6)
    return {"ring": ring_text, "ideal": ideal_text, "checks": rep["checks"], "pass": rep["formal"]}


def _cech_item(item):
    space_dims, degree, window, stability = item
    space = ProjProduct(space_dims)
    dims, cert = cech_dims(space, SheafPresentation.line_bundles(space, [degree]), window, stability)
    oracle = bott_dims(space, degree)
    return {"space": space.name, "degree": list(degree), "dims": dims, "bott": oracle, "stable": cert["stable"], "pass": dims == oracle}


def _degeneration_item(item):
    name, window, stability = item
    rep = degeneration_check(named_ci(name), window, stability)
    oracle = bott_oracle_totals(name)
    ok = rep["degenerates"] and rep["ext_dims"] == oracle and rep["hkr_totals"] == oracle
    return {"name": name, "ext_dims": rep["ext_dims"], "hkr_totals": rep["hkr_totals"], "bott_oracle": oracle,
            "euler_agree": rep["euler_characteristic"]["agree"], "stable": rep["stability"]["stable"], "pass": ok}


def _paper_item(item):
    window, stability = item
    e = build_embedding(ProjProduct((1, 1)), (1, 2))
    rep = analyze_embedding(e, window, grid=(-5, 5), stability_check=stability)
    checks = {
        "h_pullback_cotangent": rep["h_pullback_cotangent"] == [0, 1, 0],
        "h_omega_X_1": rep["h_omega_X"][1] == 2,
        "eta_nonzero": rep["eta_h1"]["rank"] >= 1,
        "alpha_ell_zero": rep["alpha"]["ell"]["zero"],
        "alpha_det_nonzero": not rep["alpha"]["det_conormal"]["zero"],
        "det_conormal": rep["det_conormal"] == [-4, -10],
        "verdict_fails": rep["condition_star"]["verdict"] == FAILS,
        "eta_kernel_is_span_c1_ell": rep["eta_kernel_is_span_c1_ell"] is True,
        "grid_zero_iff_multiple": rep["grid_check"]["zero_iff_multiple_of_ell"],
        "grid_additive": rep["grid_check"]["additive"],
    }
    return {"name": "p1xp1-in-p5", "checks": checks, "pass": all(checks.values())}


def suite_items(suite: str, window: int, stability: bool) -> tuple:
    if suite == "splitting":
        return _splitting_item, [(d, 4, odd) for d in (1, 2, 3) for odd in (False, True)]
    if suite == "chain-maps":
        return _chain_map_item, list(CHAIN_MAP_CASES)
    if suite == "cech-oracle":
        items = [((1, 1), (a, b), window, stability) for a in range(-5, 6) for b in range(-5, 6)]
        items += [((2,), (a,), window, stability) for a in range(-6, 4)]
        return _cech_item, items
    if suite == "paper-example":
        return _paper_item, [(window, stability)]
    if suite == "degeneration":
        return _degeneration_item, [(n, window, stability) for n in sorted(NAMED_CI)]
    raise UnknownSuiteError(f"unknown suite {suite!r}; known: {', '.join(SUITES)}")


def cmd_verify(args) -> dict:
    fn, items = suite_items(args.suite, args.window, args.stability_check)
    results = run_parallel(fn, items, args.jobs)
    for r in results:
        if not r["pass"]:
            raise SuiteFailure(f"suite {args.suite} failed", r)
    return {"suite": args.suite, "cases": len(results), "pass": True, "details": results}


COMMANDS = {
    "paper-example": cmd_paper_example,
    "tor": cmd_tor,
    "cech": cmd_cech,
    "alpha": cmd_alpha,
    "ext-ci": cmd_ext_ci,
    "verify": cmd_verify,
}


# ------------------------------------------------------------------ parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--window", type=int, default=None, help=f"pole-order window (default {DEFAULT_WINDOW} or ${WINDOW_ENV})")
    common.add_argument("--stability-check", dest="stability_check", action="store_true", default=True,
                        help="recompute at twice the window and require equal results (default)")
    common.add_argument("--no-stability-check", dest="stability_check", action="store_false")
    common.add_argument("--json", action="store_true", help="print the JSON report instead of a summary")
    common.add_argument("--out", help="also write the JSON report to this file")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for independent sub-jobs")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")

    parser = argparse.ArgumentParser(prog="derived-intersect", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {ENGINE_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("paper-example", parents=[common], help="the worked embedding examples")
    p.add_argument("name", nargs="?", default="p1xp1-in-p5", choices=sorted(PAPER_EXAMPLES))

    p = sub.add_parser("tor", parents=[common], help="Tor algebra and formality of a complete intersection")
    p.add_argument("--ring", required=True, help='variables, e.g. "x,y,z"')
    p.add_argument("--degrees", help="positive weights of the variables (default all 1)")
    p.add_argument("--ideal", required=True, help='generators of a regular sequence, e.g. "x,y^2"')
    p.add_argument("--degree-window", type=int, default=8, help="largest total degree checked")

    p = sub.add_parser("cech", parents=[common], help="Čech cohomology of line-bundle sums or the cotangent sheaf")
    p.add_argument("--space", required=True, help='e.g. "P1xP1" or "P2"')
    p.add_argument("--bundle", action="append", help='multidegree "a,b"; repeat for a direct sum')
    p.add_argument("--sheaf", choices=["omega"], help="use the cotangent sheaf instead")

    p = sub.add_parser("alpha", parents=[common], help="obstruction classes of line bundles for an embedding")
    p.add_argument("--space", required=True)
    p.add_argument("--ell", required=True, help="embedding multidegree")
    p.add_argument("--bundle", action="append", help="line bundle multidegree (default: ell and det E)")

    p = sub.add_parser("ext-ci", parents=[common], help="self-Ext of a global complete intersection")
    p.add_argument("--ci", choices=sorted(NAMED_CI))
    p.add_argument("--space")
    p.add_argument("--section", action="append", help="a section polynomial; repeat for each")

    p = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    p.add_argument("suite", help=f"one of: {', '.join(SUITES)}")

    p = sub.add_parser("run", parents=[common], help="run a job described in an input file")
    p.add_argument("input", help="key = value job file")
    return parser


_JOB_KEYS = {
    "window", "stability-check", "name", "ring", "degrees", "ideal", "degree-window",
    "space", "bundle", "sheaf", "ell", "ci", "section", "suite",
}
_POSITIONAL = {"paper-example": "name", "verify": "suite"}


def job_file_argv(path: str) -> list[str]:
    """Translate a [job] section into the equivalent command line."""
    cfg = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            cfg.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ParseError(f"cannot read job file {path}: {exc}")
    if not cfg.has_section("job") or "command" not in cfg["job"]:
        raise ParseError("job file needs a [job] section with a command key")
    job = cfg["job"]
    command = job["command"].strip()
    if command not in COMMANDS:
        raise ParseError(f"unknown command {command!r} in job file")
    argv = [command]
    for key, value in job.items():
        k = key.replace("_", "-")
        value = value.strip()
        if k == "command":
            continue
        if k not in _JOB_KEYS:
            raise ParseError(f"unknown key {key!r} in job file")
        if k == _POSITIONAL.get(command):
            argv.insert(1, value)
        elif k == "stability-check":
            try:
                on = cfg.getboolean("job", key)
            except ValueError:
                raise ParseError(f"stability-check must be a boolean, got {value!r}")
            argv.append("--stability-check" if on else "--no-stability-check")
        elif k in ("bundle", "section"):
            argv += [f"--{k}={v.strip()}" for v in value.split(";") if v.strip()]
        else:
            argv.append(f"--{k}={value}")
    return argv


def _passthrough(args) -> list[str]:
    out = []
    if args.json:
        out.append("--json")
    if args.out:
        out.append(f"--out={args.out}")
    if args.timing:
        out.append("--timing")
    out.append(f"--jobs={args.jobs}")
    if args.window is not None:
        out.append(f"--window={args.window}")
    if not args.stability_check:
        out.append("--no-stability-check")
    return out


def job_echo(args) -> dict:
    skip = {"json", "out", "jobs", "timing"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def summarize(command: str, res: dict) -> str:
    lines = [f"derived-intersect {command}"]
    if command == "paper-example":
        lines.append(f"  H^k(X, i*Omega_Y) = {res['h_pullback_cotangent']}")
        lines.append(f"  H^k(X, Omega_X)   = {res['h_omega_X']}")
        lines.append(f"  det E = {bundle_label(res['det_conormal'])}")
        for key in ("ell", "det_conormal"):
            a = res["alpha"][key]
            lines.append(f"  alpha_{bundle_label(a['degree'])} {'= 0' if a['zero'] else '!= 0'}")
        lines.append(f"  {res['verdict_text']}")
    elif command == "tor":
        lines.append(f"  Tor dims {res['tor_dims']}, formal: {res['formal']}")
    elif command == "cech":
        lines.append(f"  {res['sheaf']} on {res['space']}: dims {res['dims']}")
    elif command == "alpha":
        for a in res["alpha"]:
            coords = [str(x) for x in a["alpha"]] if a["alpha"] else "0 (H^2(E) = 0)"
            lines.append(f"  alpha_{bundle_label(a['degree'])} = {coords}")
    elif command == "ext-ci":
        lines.append(f"  Ext dims {res['ext_dims']}, HKR totals {res['hkr_totals']}, degenerates: {res['degenerates']}")
    elif command == "verify":
        lines.append(f"  suite {res['suite']}: {res['cases']} cases, pass")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            args = parser.parse_args(job_file_argv(args.input) + _passthrough(args))
        if args.window is None:
            args.window = default_window()
        if args.window < 1:
            raise ParseError("window must be positive")
        if args.jobs < 1:
            raise ParseError("--jobs must be positive")
        start = time.perf_counter()
        try:
            results = COMMANDS[args.command](args)
        except (ValueError, IndexError) as exc:
            if isinstance(exc, EngineError):
                raise
            raise ParseError(str(exc)) from exc
        report = make_report(args.command, job_echo(args), results)
        if args.timing:
            report["timing"] = {"seconds": f"{time.perf_counter() - start:.3f}"}
        text = dumps(report)
    except EngineError as exc:
        err = dumps({"schema_version": SCHEMA_VERSION, "engine_version": ENGINE_VERSION, **exc.to_dict()})
        sys.stdout.write(err)
        return exc.code
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text if args.json else summarize(args.command, results) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
