"""Command-line entry point.

Exit status: 0 on success, 1 on a domain error (bad input, infeasible
program, enumeration cap), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from .casestudy import case_study
from .detectability import audit_placement, single_edge_audit
from .feeder import Feeder, LoadModel, load_feeder
from .hypotheses import DEFAULT_MAX_NODES, enumerate_hu, hypothesis_count
from .placement import Placement, build_program, solve_exact
from .render import render_dot, render_json
from .simkit import monte_carlo


def write_atomic(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _load_placement(feeder: Feeder, path: str) -> Placement:
    with open(path, encoding="utf-8") as fh:
        data = Placement.from_json(json.load(fh))
    return Placement.build(feeder, data.node_sensors, data.line_sensors)


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if not value >= 0 or value == float("inf"):
        raise argparse.ArgumentTypeError("must be a finite number >= 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sensorplace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, placement=None):
        p.add_argument("--feeder", required=True, help="feeder JSON file")
        p.add_argument("--out", help="output path (default: stdout)")
        if placement is not None:
            p.add_argument("--placement", required=placement, help="placement JSON file")

    p = sub.add_parser("solve", help="minimum-cost placement")
    common(p)

    p = sub.add_parser("verify", help="audit a placement for indistinguishable hypotheses")
    common(p, placement=True)
    p.add_argument("--scope", choices=["single-edge", "full-hu"], default="single-edge")
    p.add_argument("--max-nodes", type=_positive_int, default=DEFAULT_MAX_NODES)

    p = sub.add_parser("enumerate", help="list uniquely identifiable hypotheses")
    common(p)
    p.add_argument("--max-nodes", type=_positive_int, default=DEFAULT_MAX_NODES)
    p.add_argument("--max-outages", type=int)

    p = sub.add_parser("simulate", help="Monte-Carlo detection accuracy")
    common(p, placement=False)
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--sensor-sigma", type=_nonneg_float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-nodes", type=_positive_int, default=DEFAULT_MAX_NODES)

    p = sub.add_parser("render", help="export topology with sensors")
    common(p, placement=False)
    p.add_argument("--format", choices=["dot", "json"], default="dot")

    p = sub.add_parser("case-study", help="sweep node/line cost ratios and zero-injection sets")
    common(p)
    p.add_argument("--ratios", type=_float_list, default=[2.0, 3.0],
                   help="comma-separated node:line cost ratios (default 2,3)")
    p.add_argument("--zero-injection", type=_int_list, action="append",
                   help="comma-separated zero-injection set; repeat for more variants, '' for none")
    return parser


def _solve(args, feeder):
    placement = solve_exact(build_program(feeder))
    write_atomic(args.out, _dump(placement.to_json()))


def _verify(args, feeder):
    placement = _load_placement(feeder, args.placement)
    if args.scope == "single-edge":
        report = single_edge_audit(feeder, placement)
    else:
        report = audit_placement(feeder, placement, enumerate_hu(feeder, max_nodes=args.max_nodes))
    write_atomic(args.out, _dump(report.to_json()))
    if not report.claim_holds:
        print(f"{len(report.indistinguishable_pairs)} indistinguishable pair(s)", file=sys.stderr)


def _enumerate(args, feeder):
    hyps = enumerate_hu(feeder, max_outages=args.max_outages, max_nodes=args.max_nodes)
    doc = {
        "hypothesis_space": hypothesis_count(feeder),
        "count": len(hyps),
        "hypotheses": [h.to_json() for h in hyps],
    }
    write_atomic(args.out, _dump(doc))


def _simulate(args, feeder):
    if args.placement:
        placement = _load_placement(feeder, args.placement)
    else:
        placement = solve_exact(build_program(feeder))
    report = monte_carlo(feeder, placement, LoadModel.from_feeder(feeder), args.sensor_sigma,
                         args.trials, args.seed, max_nodes=args.max_nodes)
    write_atomic(args.out, _dump(report.to_json()))


def _render(args, feeder):
    placement = _load_placement(feeder, args.placement) if args.placement else None
    text = render_dot(feeder, placement) if args.format == "dot" else render_json(feeder, placement)
    write_atomic(args.out, text)


def _case_study(args, feeder):
    rows = case_study(feeder, args.ratios, args.zero_injection)
    write_atomic(args.out, _dump([r.to_json() for r in rows]))


COMMANDS = {
    "solve": _solve,
    "verify": _verify,
    "enumerate": _enumerate,
    "simulate": _simulate,
    "render": _render,
    "case-study": _case_study,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        feeder = load_feeder(args.feeder)
        COMMANDS[args.command](args, feeder)
    except (ValueError, OSError) as exc:
        print(f"sensorplace {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
