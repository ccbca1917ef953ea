"""Command line entry point: ``solitonkit {list,verify,report,identities,sweep}``.

Exit codes: 0 when every check meets its expectation, 1 on a mismatch,
2 on usage errors (unknown scenario or checker, bad options), 3 when some
point could not be evaluated.  When several apply, 2 wins over 3, and 3
over 1.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import gallery
from .checks import CHECKERS, run_check
from .diffalg import golden_identities
from .errors import SolitonKitError, UnknownScenarioError
from .report import EXIT_INCONCLUSIVE, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, exit_code, render, to_csv, to_json, to_text
from .sampling import DEFAULT_POINTS


class UsageError(Exception):
    pass


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _common(p):
    p.add_argument("--scenario", action="append", default=None,
                   help="catalog id or family call such as 'gaussian(4, 2)' (repeatable)")
    p.add_argument("--config", type=Path, help="YAML file with extra scenario definitions")
    p.add_argument("--checker", action="append", default=None, help="checker id (repeatable)")
    p.add_argument("--points", type=_positive_int, default=DEFAULT_POINTS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=_positive_float, default=None, help="override every tolerance")
    p.add_argument("--set", action="append", default=[], metavar="NAME=VALUE",
                   help="override a scenario parameter")
    p.add_argument("--standalone", action="store_true",
                   help="treat every check as expected to pass")


def _parser():
    ap = argparse.ArgumentParser(prog="solitonkit", description="Residual checks for soliton-type equations.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="list scenarios and checkers")
    p.add_argument("--config", type=Path)
    p.add_argument("--checkers", action="store_true", help="list checker ids instead")
    p.add_argument("--yaml", metavar="ID", help="print one scenario as YAML")

    p = sub.add_parser("verify", help="run checks and print a report")
    _common(p)
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--out", type=Path, help="write the report here instead of stdout")

    p = sub.add_parser("report", help="write text, csv and json reports into a directory")
    _common(p)
    p.add_argument("--out", type=Path, required=True)

    sub.add_parser("identities", help="run the exact-algebra golden suite")

    p = sub.add_parser("sweep", help="rerun checks while varying one parameter")
    _common(p)
    p.add_argument("--param", required=True)
    p.add_argument("--values", required=True, help="comma list, or start:stop:count")
    p.add_argument("--out", type=Path)
    return ap


# scenario selection ----------------------------------------------------------------


def _load_extra(path):
    if path is None:
        return {}
    try:
        cfgs = gallery.load_configs(path.read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    return {c.get("id"): c for c in cfgs}


def _parse_set(items):
    out = {}
    for item in items:
        name, sep, val = item.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"--set expects NAME=VALUE, got {item!r}")
        out[name.strip()] = val.strip()
    return out


def _configs(args):
    extra = _load_extra(args.config)
    ids = args.scenario
    if ids is None:
        ids = list(extra) if extra else gallery.catalog_ids()
    out = []
    for sid in ids:
        if sid in extra:
            out.append(dict(extra[sid]))
            continue
        try:
            out.append(gallery.config(sid))
        except UnknownScenarioError:
            raise UsageError(f"unknown scenario {sid!r}") from None
    overrides = _parse_set(args.set)
    for cfg in out:
        if overrides:
            cfg["params"] = {**(cfg.get("params") or {}), **overrides}
    return out, args.scenario is not None


def _build(cfg):
    try:
        return gallery.build_from_config(cfg)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"scenario {cfg.get('id')!r}: {exc}") from None


def _plan(args, cfgs, explicit):
    checkers = args.checker
    if checkers:
        for c in checkers:
            if c not in CHECKERS:
                raise UsageError(f"unknown checker {c!r}")
    plan = []
    for cfg in cfgs:
        declared = list((cfg.get("checks") or {}).keys())
        for c in declared:
            if c not in CHECKERS:
                raise UsageError(f"scenario {cfg.get('id')!r} declares unknown checker {c!r}")
        if not checkers:
            names = declared
        elif args.standalone:
            names = list(checkers)
        else:
            names = [c for c in checkers if c in declared]
            missing = [c for c in checkers if c not in declared]
            if missing and explicit:
                raise UsageError(
                    f"scenario {cfg['id']!r} declares no expectation for {', '.join(missing)}; "
                    "use --standalone to run it anyway"
                )
        if names:
            plan.append((cfg, names))
    if not plan:
        raise UsageError("nothing to run")
    return plan


def _run(args):
    cfgs, explicit = _configs(args)
    reports = []
    for cfg, names in _plan(args, cfgs, explicit):
        scn = _build(cfg)
        for name in names:
            reports.append(run_check(
                scn, name, count=args.points, seed=args.seed, tol=args.tol,
                expect_pass=True if args.standalone else None,
            ))
    return reports


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="") as fh:
            fh.write(text)


# commands -------------------------------------------------------------------------


def cmd_list(args):
    extra = _load_extra(args.config)
    if args.checkers:
        for name in sorted(CHECKERS):
            c = CHECKERS[name]
            print(f"{name}\t{c.family}\t{c.description}")
        return EXIT_OK
    if args.yaml:
        try:
            cfg = extra.get(args.yaml) or gallery.config(args.yaml)
        except UnknownScenarioError:
            raise UsageError(f"unknown scenario {args.yaml!r}") from None
        sys.stdout.write(gallery.to_yaml(cfg))
        return EXIT_OK
    cat = {**gallery.catalog(), **extra}
    for sid, cfg in cat.items():
        print(f"{sid}\t{cfg['kind']}\t{cfg.get('description', '')}")
    print("families: " + ", ".join(f"{f}(...)" for f in gallery.families()))
    return EXIT_OK


def cmd_verify(args):
    reports = _run(args)
    _emit(render(reports, args.format, args.seed, args.points), args.out)
    return exit_code(reports)


def cmd_report(args):
    reports = _run(args)
    args.out.mkdir(parents=True, exist_ok=True)
    _emit(to_text(reports), args.out / "report.txt")
    _emit(to_csv(reports), args.out / "report.csv")
    _emit(to_json(reports, args.seed, args.points), args.out / "report.json")
    print(f"wrote {args.out / 'report.txt'}, report.csv, report.json")
    return exit_code(reports)


def cmd_identities(args=None):
    failures = 0
    for name, computed, expected in golden_identities():
        ok = str(computed) == str(expected)
        failures += not ok
        print(f"[{'ok' if ok else 'XX'}] {name}: {computed}")
        if not ok:
            print(f"     expected: {expected}")
    return EXIT_OK if failures == 0 else EXIT_MISMATCH


def _sweep_values(text):
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError("--values range must be start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise UsageError("sweep count must be at least 1")
        return [repr(float(v)) for v in np.linspace(start, stop, count)]
    vals = [v.strip() for v in text.split(",") if v.strip()]
    if not vals:
        raise UsageError("--values is empty")
    return vals


def cmd_sweep(args):
    import csv
    import io

    values = _sweep_values(args.values)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(("param", "value", "scenario", "checker", "max", "tol", "expect", "status"))
    all_reports = []
    base = list(args.set)
    for v in values:
        args.set = base + [f"{args.param}={v}"]
        for r in _run(args):
            all_reports.append(r)
            st = "inconclusive" if r.inconclusive else ("pass" if r.passed else "fail")
            w.writerow((args.param, v, r.scenario, r.equation, repr(r.max), repr(float(r.tol)),
                        "pass" if r.expect_pass else "fail", st))
    _emit(buf.getvalue(), args.out)
    # a sweep is exploratory: only inconclusive points change the exit code
    return 3 if any(r.inconclusive for r in all_reports) else EXIT_OK


COMMANDS = {
    "list": cmd_list,
    "verify": cmd_verify,
    "report": cmd_report,
    "identities": cmd_identities,
    "sweep": cmd_sweep,
}


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"solitonkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolitonKitError as exc:
        # raised while building a scenario, before any point could be evaluated
        print(f"solitonkit: inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


def entry():
    try:
        code = main()
        sys.stdout.flush()
    except BrokenPipeError:
        # output piped into a reader that closed early, e.g. head
        sys.stderr.close()
        code = 0
    sys.exit(code)


if __name__ == "__main__":
    entry()
