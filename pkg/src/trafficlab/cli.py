"""Command-line front end.

Every file this tool writes is paired with a JSON manifest holding the
full parameter set, seeds, and input digests needed to reproduce it,
and every CSV begins with a ``# manifest: <digest>`` comment naming
its manifest. Rerunning the same command yields byte-identical output.
Commands that draw random numbers require an explicit --seed.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .estimators import bin_counts, empirical_ccdf, fit_tail_index, hurst_aggregated_variance
from .experiments import ReplicationPlan, blocksize_sweep, block_shuffle, sample_size_sweep
from .queue_sim import packet_fifo
from .rng import substream
from .synth import (
    GeneratorSpec,
    HeavyTailSpec,
    SyntheticSource,
    generate_onoff,
    generate_poisson,
    packetize,
)
from .traces import PacketTrace, bandwidth_for_utilization, load_trace, save_trace, summarize

OFF_MODEL_FLAGS = {
    "iid": "iid_matched_mean",
    "reordered": "theorem_reordered",
    "bounded": "bounded_q",
}


@dataclass
class RunManifest:
    """Reproduction record for one command invocation."""

    subcommand: str
    parameters: dict
    inputs: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    tool: str = "trafficlab"
    version: str = __version__

    def digest(self) -> str:
        body = {
            "tool": self.tool,
            "version": self.version,
            "subcommand": self.subcommand,
            "parameters": self.parameters,
            "inputs": self.inputs,
            "outputs": self.outputs,
        }
        blob = json.dumps(body, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def write(self, path: str) -> None:
        body = {
            "tool": self.tool,
            "version": self.version,
            "subcommand": self.subcommand,
            "parameters": self.parameters,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "digest": self.digest(),
        }
        with open(path, "w") as fh:
            json.dump(body, fh, sort_keys=True, indent=2)
            fh.write("\n")


def _sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _manifest_for(args: argparse.Namespace, outputs: list[str], skip=("func",)) -> RunManifest:
    params = {}
    inputs = {}
    for key, value in vars(args).items():
        if key in skip or key == "subcommand":
            continue
        if isinstance(value, (list, tuple)):
            value = list(value)
        params[key] = value
    if getattr(args, "trace", None):
        inputs[args.trace] = _sha256_file(args.trace)
    return RunManifest(
        subcommand=args.subcommand, parameters=params, inputs=inputs, outputs=list(outputs)
    )


def _write_row_csv(path: str, manifest: RunManifest, columns: list[str], row: list) -> None:
    with open(path, "w") as fh:
        fh.write(f"# manifest: {manifest.digest()}\n")
        fh.write("# " + ",".join(columns) + "\n")
        fh.write(",".join(repr(float(v)) if isinstance(v, (int, float, np.floating)) else str(v) for v in row) + "\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(part)) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {text!r}")


def _build_generator(args) -> SyntheticSource:
    tail = HeavyTailSpec(tail_index=args.alpha, x_min=args.xmin, x_max=args.xmax)
    spec = GeneratorSpec(
        m=args.m,
        tail=tail,
        n_cycles=args.cycles,
        lambda_target=args.lam,
        off_model=OFF_MODEL_FLAGS[args.off_model],
        q=args.q,
    )
    return SyntheticSource(spec=spec, packet_size=args.packet_size, server_rate=args.rate)


def _add_gen_flags(p: argparse.ArgumentParser, required: bool) -> None:
    p.add_argument("--model", choices=("onoff", "poisson"), required=required)
    p.add_argument("--alpha", type=float, help="tail index of on-period lengths, in (1,2)")
    p.add_argument("--xmin", type=float, default=1.0, help="smallest on-period length, seconds")
    p.add_argument("--xmax", type=float, default=None, help="cap on on-period lengths (off by default)")
    p.add_argument("--m", type=float, help="on-period send rate as a multiple of the server rate")
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="target long-run load, in (0,1)")
    p.add_argument("--cycles", type=int, help="number of on/off cycles")
    p.add_argument("--packet-size", type=int, default=1000, help="bytes per packet")
    p.add_argument(
        "--rate",
        type=float,
        help="onoff: server rate in bytes/s the source is scaled to; poisson: packet arrival rate in packets/s",
    )
    p.add_argument("--off-model", choices=tuple(OFF_MODEL_FLAGS), default="iid")
    p.add_argument("--q", type=float, default=None, help="mean-queue bound for --off-model bounded")
    p.add_argument("--n", type=int, default=None, help="packet count for --model poisson")


def _gen_trace(args) -> PacketTrace:
    if args.model == "poisson":
        if args.n is None or args.rate is None:
            raise ValueError("poisson model needs --rate and --n")
        return generate_poisson(args.rate, args.packet_size, args.n, substream(args.seed))
    for name in ("alpha", "m", "cycles", "rate"):
        if getattr(args, name) is None:
            raise ValueError(f"onoff model needs --{name}")
    source = _build_generator(args)
    process = generate_onoff(source.spec, substream(args.seed))
    trace, report = packetize(process, source.packet_size, source.server_rate)
    if report.silent_on_periods:
        print(
            f"note: {report.silent_on_periods} of {report.cycles} on periods "
            "were too short to emit a packet",
            file=sys.stderr,
        )
    return trace


def cmd_gen(args) -> int:
    trace = _gen_trace(args)
    manifest = _manifest_for(args, outputs=[args.output])
    save_trace(trace, args.output, comments=(f"manifest: {manifest.digest()}",))
    manifest.write(args.output + ".manifest.json")
    print(f"wrote {trace.packet_count} packets to {args.output}")
    return 0


def cmd_summarize(args) -> int:
    s = summarize(load_trace(args.trace, args.format))
    columns = ["packet_count", "duration", "total_bytes", "mean_rate"]
    row = [s.packet_count, s.duration, s.total_bytes, "" if s.mean_rate is None else s.mean_rate]
    if args.output:
        manifest = _manifest_for(args, outputs=[args.output])
        _write_row_csv(args.output, manifest, columns, row)
        manifest.write(args.output + ".manifest.json")
    else:
        print(",".join(columns))
        print(",".join(str(v) for v in row))
    return 0


def cmd_queue(args) -> int:
    trace = load_trace(args.trace, args.format)
    bandwidth = args.bandwidth
    if (bandwidth is None) == (args.rho is None):
        raise ValueError("give exactly one of --bandwidth or --rho")
    if bandwidth is None:
        bandwidth = bandwidth_for_utilization(trace, args.rho)
    stats, path = packet_fifo(trace, bandwidth)
    outputs = [args.output] + ([args.path_out] if args.path_out else [])
    manifest = _manifest_for(args, outputs=outputs)
    manifest.parameters["derived_bandwidth"] = bandwidth
    columns = ["mean_queue", "peak_queue", "horizon", "utilization", "empty_fraction", "area"]
    row = [stats.mean_queue, stats.peak_queue, stats.horizon, stats.utilization, stats.empty_fraction, stats.area]
    _write_row_csv(args.output, manifest, columns, row)
    if args.path_out:
        with open(args.path_out, "w") as fh:
            path.write_csv(fh, comments=(f"manifest: {manifest.digest()}",))
    manifest.write(args.output + ".manifest.json")
    return 0


def cmd_shuffle(args) -> int:
    trace = load_trace(args.trace, args.format)
    shuffled = block_shuffle(trace, args.block_size, substream(args.seed))
    manifest = _manifest_for(args, outputs=[args.output])
    save_trace(shuffled, args.output, comments=(f"manifest: {manifest.digest()}",))
    manifest.write(args.output + ".manifest.json")
    return 0


def _sweep_source(args):
    """(source object, label) from either --trace or generator flags."""
    if args.trace and args.model:
        raise ValueError("give either --trace or --model, not both")
    if args.trace:
        return load_trace(args.trace, args.format), None
    if not args.model:
        raise ValueError("give a --trace file or generator flags with --model")
    if args.model == "poisson":
        if args.n is None or args.rate is None:
            raise ValueError("poisson model needs --rate and --n")
        return generate_poisson(args.rate, args.packet_size, args.n, substream(args.seed)), None
    return _build_generator(args), None


def _write_sweep(args, sweep, xlabel: str, ylabel: str) -> int:
    csv_path = args.out_prefix + ".csv"
    gp_path = args.out_prefix + ".gp"
    manifest = _manifest_for(args, outputs=[csv_path, gp_path])
    with open(csv_path, "w") as fh:
        sweep.write_csv(fh, comments=(f"manifest: {manifest.digest()}",))
    with open(gp_path, "w") as fh:
        fh.write(f"# manifest: {manifest.digest()}\n")
        fh.write('set datafile separator ","\n')
        fh.write("set logscale x\n")
        fh.write(f'set xlabel "{xlabel}"\n')
        fh.write(f'set ylabel "{ylabel}"\n')
        fh.write("set terminal pngcairo size 900,600\n")
        fh.write(f'set output "{args.out_prefix}.png"\n')
        if sweep.baseline is not None:
            fh.write(f"baseline = {float(sweep.baseline)!r}\n")
            fh.write(
                f'plot "{csv_path}" using 1:2:3 with yerrorlines title "mean +/- std", '
                'baseline with lines dashtype 2 title "unshuffled"\n'
            )
        else:
            fh.write(f'plot "{csv_path}" using 1:2:3 with yerrorlines title "mean +/- std"\n')
    manifest.write(args.out_prefix + ".manifest.json")
    print(f"wrote {csv_path}, {gp_path}")
    return 0


def cmd_sweep_samples(args) -> int:
    source, _ = _sweep_source(args)
    plan = ReplicationPlan(master_seed=args.seed, replications=args.reps)
    sweep = sample_size_sweep(source, args.sizes, plan, bandwidth=args.bandwidth, rho=args.rho)
    return _write_sweep(args, sweep, "sample size (packets)", "mean queue (packets)")


def cmd_sweep_blocks(args) -> int:
    source, _ = _sweep_source(args)
    if isinstance(source, SyntheticSource):
        # materialize one trace; replications then vary only the permutation
        source = source.trace(substream(args.seed))
    plan = ReplicationPlan(master_seed=args.seed, replications=args.reps)
    sweep = blocksize_sweep(source, args.blocks, plan, bandwidth=args.bandwidth, rho=args.rho)
    return _write_sweep(args, sweep, "shuffle block size (packets)", "mean queue (packets)")


def cmd_hurst(args) -> int:
    trace = load_trace(args.trace, args.format)
    width = args.bin_width if args.bin_width else trace.duration / 4096
    series = bin_counts(trace, width, unit=args.unit)
    est = hurst_aggregated_variance(series, levels=args.levels)
    manifest = _manifest_for(args, outputs=[args.output])
    manifest.parameters["derived_bin_width"] = width
    columns = ["H", "slope", "fit_r2", "clipped", "levels"]
    row = [est.H, est.slope, est.fit_r2, est.clipped, ";".join(str(a) for a in est.levels_used)]
    _write_row_csv(args.output, manifest, columns, row)
    manifest.write(args.output + ".manifest.json")
    print(f"H = {est.H:.4f} (r2 {est.fit_r2:.4f})")
    return 0


def cmd_tailfit(args) -> int:
    trace = load_trace(args.trace, args.format)
    if args.field == "gaps":
        samples = np.diff(trace.timestamps)
        samples = samples[samples > 0]
    else:
        samples = trace.sizes.astype(np.float64)
    if len(samples) == 0:
        raise ValueError("no usable samples in the trace")
    lo = args.lo if args.lo is not None else float(np.quantile(samples, 0.5))
    hi = args.hi if args.hi is not None else float(np.quantile(samples, 0.999))
    fit = fit_tail_index(samples, (lo, hi))
    outputs = [args.output] + ([args.ccdf_out] if args.ccdf_out else [])
    manifest = _manifest_for(args, outputs=outputs)
    manifest.parameters["derived_fit_range"] = [fit.fit_range[0], fit.fit_range[1]]
    columns = ["alpha_hat", "fit_lo", "fit_hi", "fit_r2"]
    _write_row_csv(args.output, manifest, columns, [fit.alpha_hat, fit.fit_range[0], fit.fit_range[1], fit.fit_r2])
    if args.ccdf_out:
        xs, cc = empirical_ccdf(samples)
        with open(args.ccdf_out, "w") as fh:
            fh.write(f"# manifest: {manifest.digest()}\n")
            fh.write("# x,ccdf\n")
            for xv, cv in zip(xs, cc):
                fh.write(f"{xv!r},{cv!r}\n")
    manifest.write(args.output + ".manifest.json")
    print(f"alpha_hat = {fit.alpha_hat:.4f} over [{fit.fit_range[0]:g}, {fit.fit_range[1]:g}] (r2 {fit.fit_r2:.4f})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trafficlab",
        description="Generate bursty traffic, replay it through a FIFO queue, and measure what changes",
    )
    parser.add_argument("--version", action="version", version=f"trafficlab {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gen", help="synthesize a packet trace")
    _add_gen_flags(p, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen, trace=None)

    p = sub.add_parser("summarize", help="packet count, span, bytes, mean rate")
    p.add_argument("trace")
    p.add_argument("--format", choices=("csv_ts_bytes", "two_column_text"), default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("queue", help="FIFO simulation of a trace")
    p.add_argument("trace")
    p.add_argument("--format", choices=("csv_ts_bytes", "two_column_text"), default=None)
    p.add_argument("--bandwidth", type=float, default=None, help="service rate, bytes/s")
    p.add_argument("--rho", type=float, default=None, help="target load; bandwidth derived from the trace")
    p.add_argument("--path-out", default=None, help="also write the queue level breakpoints")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_queue)

    p = sub.add_parser("shuffle", help="block-shuffle a trace")
    p.add_argument("trace")
    p.add_argument("--format", choices=("csv_ts_bytes", "two_column_text"), default=None)
    p.add_argument("--block-size", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_shuffle)

    p = sub.add_parser("sweep-samples", help="mean queue versus sample size")
    p.add_argument("--trace", default=None)
    p.add_argument("--format", choices=("csv_ts_bytes", "two_column_text"), default=None)
    _add_gen_flags(p, required=False)
    p.add_argument("--sizes", type=_int_list, required=True, help="comma-separated packet counts")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_sweep_samples)

    p = sub.add_parser("sweep-blocks", help="mean queue versus shuffle block size")
    p.add_argument("--trace", default=None)
    p.add_argument("--format", choices=("csv_ts_bytes", "two_column_text"), default=None)
    _add_gen_flags(p, required=False)
    p.add_argument("--blocks", type=_int_list, required=True, help="comma-separated block sizes")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_sweep_blocks)

    p = sub.add_parser("hurst", help="variance-scaling Hurst estimate of a trace")
    p.add_argument("trace")
    p.add_argument("--format", choices=("csv_ts_bytes", "two_column_text"), default=None)
    p.add_argument("--bin-width", type=float, default=None, help="seconds; default duration/4096")
    p.add_argument("--unit", choices=("packets", "bytes"), default="packets")
    p.add_argument("--levels", type=_int_list, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_hurst)

    p = sub.add_parser("tailfit", help="log-log tail index of gaps or sizes")
    p.add_argument("trace")
    p.add_argument("--format", choices=("csv_ts_bytes", "two_column_text"), default=None)
    p.add_argument("--field", choices=("gaps", "sizes"), default="gaps")
    p.add_argument("--lo", type=float, default=None, help="fit range lower edge; default median")
    p.add_argument("--hi", type=float, default=None, help="fit range upper edge; default 99.9th pct")
    p.add_argument("--ccdf-out", default=None, help="also write empirical CCDF points")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_tailfit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
