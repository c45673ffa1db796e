"""Command-line entry point: ``fourmove <subcommand> ...``.

Exit status is 0 when a command runs to completion and 2 on bad input
(unreadable files, malformed codes or presentations, bad options).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import knuthbendix as kb
from . import pipeline
from . import toddcoxeter as tc
from . import verify
from .fpgroup import Presentation, parse_presentation
from .knotcodes import GaussCodeError, parse_gauss_code

INPUT_FAULT = 2


class InputFault(Exception):
    pass


def _read_presentation(path: str) -> Presentation:
    try:
        return parse_presentation(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise InputFault(f"cannot read {path}: {e.strerror}") from e
    except ValueError as e:
        raise InputFault(f"{path}: {e}") from e


def _stage_config(source: str) -> pipeline.StageConfig:
    if source == "default":
        return pipeline.StageConfig.default()
    try:
        return pipeline.StageConfig.from_json(source)
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise InputFault(f"bad stage file {source}: {e}") from e


def cmd_classify(args) -> int:
    cfg = _stage_config(args.stages)
    target = Path(args.target)
    if target.is_file():
        def show(v):
            if args.verbose:
                print(f"line {v.line}: {v.status}", file=sys.stderr, flush=True)

        report = pipeline.run_census(target, cfg, args.workers, args.out, args.fail_out,
                                     timings=args.timings, progress=show)
        print(report)
        return 0
    try:
        gc = parse_gauss_code(args.target)
    except GaussCodeError as e:
        raise InputFault(f"not a file and not a Gauss code: {e}") from e
    verdict = pipeline.classify(gc, cfg)
    line = verdict.to_json(args.timings)
    if args.out:
        Path(args.out).write_text(line + "\n", encoding="utf-8")
    print(line)
    if args.fail_out:
        Path(args.fail_out).write_text(
            verdict.code + "\n" if verdict.status == pipeline.UNRESOLVED else "",
            encoding="utf-8")
    return 0


def cmd_probe(args) -> int:
    if args.n < 1 or args.kmax < 0:
        raise InputFault("need --n >= 1 and --kmax >= 0")

    def show(a):
        print(f"round {a.round} k={a.depth} budget={a.budget}: {a.result} "
              f"({a.seconds:.2f}s)", flush=True)

    res = pipeline.probe_gn(args.n, args.kmax, start_cosets=args.start_cosets,
                            max_cosets=args.max_cosets, strategy=args.strategy,
                            progress=show)
    print(res)
    return 0


def cmd_verify(args) -> int:
    trace_dir = Path(args.trace_dir)
    trace_dir.mkdir(parents=True, exist_ok=True)
    limits = kb.KbLimits(max_seconds=args.seconds)
    rows = []
    for slug, check in (("fourth_power", verify.verify_fourth_power_identity),
                        ("square_commutation", verify.verify_H_abelian_identity)):
        res = check(limits)
        (trace_dir / f"{slug}.json").write_text(res.to_json() + "\n", encoding="utf-8")
        rows.append((res.name, "verified", res.status, res.status == "verified"))
    for name, p, expected in verify.reference_orders():
        cc = verify.cross_check_order(p, kb_limits=kb.KbLimits(max_seconds=args.seconds * 10))
        seen = str(cc)
        rows.append((name, f"AGREE order={expected}", seen,
                     cc.status == "agree" and cc.order == expected))
    width = max(len(r[0]) for r in rows)
    for name, want, got, ok in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  expected {want:<22}  got {got}")
    print(f"traces written to {trace_dir}")
    return 0


def cmd_tc(args) -> int:
    p = _read_presentation(args.file)
    res = tc.order(p, tc.TcLimits.from_env(**({"max_cosets": args.max_cosets}
                                               if args.max_cosets else {})),
                   args.strategy)
    print(res)
    return 0


def cmd_kb(args) -> int:
    p = _read_presentation(args.file)
    over = {}
    if args.seconds is not None:
        over["max_seconds"] = args.seconds
    if args.max_rules is not None:
        over["max_rules"] = args.max_rules
    comp = kb.complete(p, limits=kb.KbLimits.from_env(**over))
    r = len(comp.system)
    if comp.confluent:
        m = comp.system.count_irreducible()
        print(f"CONFLUENT rules={r} order={'infinite' if m is None else m}")
    else:
        print(f"{comp.status.upper()} rules={r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fourmove", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify a Gauss code or a census file")
    c.add_argument("target", help="a Gauss code like 1,2,3,1,2,3 or a census file")
    c.add_argument("--stages", default="default", help="'default' or a JSON stage file")
    c.add_argument("--workers", type=int, default=None)
    c.add_argument("--out", help="JSON-lines verdicts")
    c.add_argument("--fail-out", help="codes of unresolved knots, one per line")
    c.add_argument("--timings", action="store_true", help="include stage wall times")
    c.add_argument("-v", "--verbose", action="store_true")
    c.set_defaults(func=cmd_classify)

    g = sub.add_parser("probe-gn", help="look for a finite G_{n,k}")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--kmax", type=int, required=True)
    g.add_argument("--start-cosets", type=int, default=100_000)
    g.add_argument("--max-cosets", type=int, default=tc.TcLimits.from_env().max_cosets)
    g.add_argument("--strategy", choices=("hlt", "felsch"), default="hlt")
    g.set_defaults(func=cmd_probe)

    v = sub.add_parser("verify-paper", help="identity checks and engine cross-checks")
    v.add_argument("--trace-dir", default="verify-traces")
    v.add_argument("--seconds", type=float, default=60.0, help="KB budget per identity")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("tc", help="coset enumeration over the trivial subgroup")
    t.add_argument("file")
    t.add_argument("--max-cosets", type=int)
    t.add_argument("--strategy", choices=("hlt", "felsch"), default="hlt")
    t.set_defaults(func=cmd_tc)

    k = sub.add_parser("kb", help="shortlex Knuth-Bendix completion")
    k.add_argument("file")
    k.add_argument("--seconds", type=float)
    k.add_argument("--max-rules", type=int)
    k.set_defaults(func=cmd_kb)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return INPUT_FAULT if e.code else 0
    try:
        return args.func(args)
    except (InputFault, ValueError) as e:
        print(f"fourmove: error: {e}", file=sys.stderr)
        return INPUT_FAULT


if __name__ == "__main__":
    sys.exit(main())
