"""Sensor mix on random 30-bus feeders as the node/line cost ratio grows."""

import argparse
import time

from sensorplace.casestudy import case_study, format_table
from sensorplace.experiments import random_corpus


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--nodes", type=int, default=30)
    ap.add_argument("--ratios", default="1,2,3,5")
    ap.add_argument("--seed", type=int, default=30)
    args = ap.parse_args(argv)

    ratios = [float(r) for r in args.ratios.split(",")]
    feeders = random_corpus(args.count, (args.nodes, args.nodes), args.seed)
    totals = {r: [0, 0] for r in ratios}
    start = time.perf_counter()
    for idx, f in enumerate(feeders):
        rows = case_study(f, ratios)
        print(f"# feeder {idx}")
        print(format_table(rows))
        for row in rows:
            totals[row.ratio][0] += row.node_sensors
            totals[row.ratio][1] += row.line_sensors
    print(f"\n{'ratio':>6} {'node':>6} {'line':>6}")
    for r in ratios:
        print(f"{r:>6g} {totals[r][0]:>6} {totals[r][1]:>6}")
    print(f"elapsed {time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    main()
