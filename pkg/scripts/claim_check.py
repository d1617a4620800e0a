"""Audit optimal placements on a random corpus and write the claim-check report."""

import argparse
import json
import sys

from sensorplace.cli import write_atomic
from sensorplace.experiments import claim_check, random_corpus


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--min-nodes", type=int, default=3)
    ap.add_argument("--max-nodes", type=int, default=10)
    ap.add_argument("--seed", type=int, default=20240601)
    ap.add_argument("--zero-prob", type=float, default=0.2)
    ap.add_argument("--out", default="claim_check.json")
    args = ap.parse_args(argv)

    corpus = random_corpus(args.count, (args.min_nodes, args.max_nodes), args.seed,
                           zero_prob=args.zero_prob)
    report = claim_check(corpus, full_hu_max_nodes=args.max_nodes)
    write_atomic(args.out, json.dumps(report, indent=2) + "\n")
    print(f"instances: {len(corpus)}")
    print(f"single-edge violations: {report['single_edge_violations']}")
    print(f"full H_U checked: {report['full_hu_checked']}, violations: {report['full_hu_violations']}")
    print(f"report written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
