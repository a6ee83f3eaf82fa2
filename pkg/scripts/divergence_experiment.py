#!/usr/bin/env python3
"""Watch the sample-mean queue refuse to settle under an infinite-variance tail.

Builds a fluid on/off process whose silences are proportional to the
preceding bursts, then measures the time-average queue over growing
prefixes of the cycle sequence, replicated across seeds. With
tail_index < 2 the per-seed medians keep climbing as the prefix grows;
rerunning with a burst-length cap (--x-max) restores a finite second
moment and the curve flattens.

Writes <out>/divergence.csv (one row per prefix size: median, mean,
std, every replication) and <out>/divergence.gp for gnuplot. Run with
and without --x-max to overlay the two regimes.
"""
import argparse
import sys
from pathlib import Path

import numpy as np

import trafficlab as tl
from trafficlab.rng import substream


def run_sweep(tail, m, lam, sizes, reps, master_seed):
    """Median/mean/std of the prefix mean queue at each size."""
    per_size = {n: [] for n in sizes}
    for i in range(reps):
        u = 1.0 - substream(master_seed, i).random(max(sizes))
        on = np.asarray(tl.sample_heavy_tail(tail, u))
        proc = tl.reorder_nonoverlap(on, m, lam)
        for n, mq in tl.prefix_mean_queue(proc, sizes):
            per_size[n].append(mq)
    return per_size


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=1.5, help="burst tail index")
    ap.add_argument("--x-min", type=float, default=1.0, help="burst scale")
    ap.add_argument("--x-max", type=float, default=None,
                    help="cap burst lengths (control run)")
    ap.add_argument("--m", type=float, default=2.0, help="on-state input rate")
    ap.add_argument("--lam", type=float, default=0.5, help="target load")
    ap.add_argument("--sizes", type=int, nargs="+",
                    default=[100, 1000, 10_000, 100_000],
                    help="prefix lengths, in cycles")
    ap.add_argument("--reps", type=int, default=10, help="independent seeds")
    ap.add_argument("--seed", type=int, default=0, help="master seed")
    ap.add_argument("--out", type=Path, default=Path("divergence_out"))
    args = ap.parse_args(argv)

    tail = tl.HeavyTailSpec(args.alpha, args.x_min, x_max=args.x_max)
    sizes = sorted(args.sizes)
    per_size = run_sweep(tail, args.m, args.lam, sizes, args.reps, args.seed)

    args.out.mkdir(parents=True, exist_ok=True)
    csv_path = args.out / "divergence.csv"
    with open(csv_path, "w") as fh:
        fh.write("# prefix mean queue, %d replications, alpha=%g, x_max=%s\n"
                 % (args.reps, args.alpha, args.x_max))
        fh.write("# cycles,median,mean,std," +
                 ",".join(f"rep_{i + 1}" for i in range(args.reps)) + "\n")
        for n in sizes:
            vals = per_size[n]
            row = [n, float(np.median(vals)), float(np.mean(vals)),
                   float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0, *vals]
            fh.write(",".join(repr(v) for v in row) + "\n")

    gp_path = args.out / "divergence.gp"
    gp_path.write_text(
        "set datafile separator ','\n"
        "set logscale xy\n"
        "set xlabel 'cycles simulated'\n"
        "set ylabel 'mean queue'\n"
        f"plot '{csv_path.name}' using 1:2 with linespoints title 'median', \\\n"
        f"     '{csv_path.name}' using 1:3:4 with yerrorlines title 'mean +- std'\n"
    )

    print(f"{'cycles':>10} {'median':>12} {'mean':>12} {'std':>12}")
    for n in sizes:
        vals = per_size[n]
        print(f"{n:>10} {np.median(vals):>12.4f} {np.mean(vals):>12.4f} "
              f"{np.std(vals, ddof=1) if len(vals) > 1 else 0.0:>12.4f}")
    print(f"wrote {csv_path} and {gp_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
