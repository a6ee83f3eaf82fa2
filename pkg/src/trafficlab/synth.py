"""Synthetic traffic: heavy-tailed on/off fluid sources and packetization.

The on/off source alternates between transmitting at a fixed rate m
(in units of the server rate) for a heavy-tailed duration and staying
silent. Three off-period rules are provided: independent exponential
silences matched in mean to a target load, silences proportional to
the preceding burst (which pins the long-run load exactly and keeps
queue excursions from overlapping), and silences stretched so that no
single burst can push the mean queue above a chosen bound.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import as_generator
from .traces import PacketTrace

__all__ = [
    "HeavyTailSpec",
    "FluidOnOffProcess",
    "GeneratorSpec",
    "PacketizeReport",
    "SyntheticSource",
    "sample_heavy_tail",
    "generate_onoff",
    "reorder_nonoverlap",
    "bounded_queue_process",
    "packetize",
    "generate_poisson",
]

OFF_MODELS = ("iid_matched_mean", "theorem_reordered", "bounded_q")


@dataclass(frozen=True)
class HeavyTailSpec:
    """Pareto-form tail P[X > x] = (x_min/x)**tail_index.

    tail_index in (1, 2) gives a finite mean but infinite variance,
    the regime where burst sizes have no typical scale. x_max, when
    set, caps every sample (quantile capping), restoring all moments.
    """

    tail_index: float
    x_min: float
    x_max: float | None = None

    def __post_init__(self):
        if not 1.0 < self.tail_index < 2.0:
            raise ValueError("tail_index must lie in (1, 2)")
        if self.x_min <= 0:
            raise ValueError("x_min must be positive")
        if self.x_max is not None and self.x_max <= self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def mean(self) -> float:
        """Untruncated mean, tail_index * x_min / (tail_index - 1)."""
        return self.tail_index * self.x_min / (self.tail_index - 1.0)


@dataclass(eq=False)
class FluidOnOffProcess:
    """Alternating on/off cycles; cycle i is on for on_lengths[i] seconds
    then silent for off_lengths[i]. While on, work arrives at rate m
    (server rate normalized to 1)."""

    on_lengths: np.ndarray
    off_lengths: np.ndarray
    m: float

    def __post_init__(self):
        on = np.asarray(self.on_lengths, dtype=np.float64)
        off = np.asarray(self.off_lengths, dtype=np.float64)
        if on.ndim != 1 or off.ndim != 1 or len(on) != len(off):
            raise ValueError("on_lengths and off_lengths must be 1-d and equal length")
        if len(on) == 0:
            raise ValueError("process needs at least one cycle")
        if not (np.all(np.isfinite(on)) and np.all(np.isfinite(off))):
            raise ValueError("non-finite cycle length")
        if np.any(on <= 0):
            raise ValueError("on_lengths must be positive")
        if np.any(off < 0):
            raise ValueError("off_lengths must be nonnegative")
        if self.m <= 0:
            raise ValueError("on rate m must be positive")
        on.setflags(write=False)
        off.setflags(write=False)
        object.__setattr__(self, "on_lengths", on)
        object.__setattr__(self, "off_lengths", off)

    @property
    def n_cycles(self) -> int:
        return len(self.on_lengths)

    @property
    def horizon(self) -> float:
        return float(self.on_lengths.sum() + self.off_lengths.sum())

    @property
    def arrival_rate(self) -> float:
        """Long-run work arrival rate m * on_time / elapsed_time."""
        return float(self.m * self.on_lengths.sum() / self.horizon)

    def prefix(self, n_cycles: int) -> "FluidOnOffProcess":
        if not 1 <= n_cycles <= self.n_cycles:
            raise ValueError("prefix length out of range")
        return FluidOnOffProcess(
            self.on_lengths[:n_cycles], self.off_lengths[:n_cycles], self.m
        )


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for a random on/off process.

    lambda_target is the intended long-run work arrival rate for the
    matched-mean and proportional-silence models; bounded_q ignores it
    and needs the queue bound q instead.
    """

    m: float
    tail: HeavyTailSpec
    n_cycles: int
    lambda_target: float | None = None
    off_model: str = "iid_matched_mean"
    q: float | None = None

    def __post_init__(self):
        if self.m <= 1:
            raise ValueError("m must exceed 1, otherwise no queue can form")
        if self.n_cycles < 1:
            raise ValueError("n_cycles must be >= 1")
        if self.off_model not in OFF_MODELS:
            raise ValueError(f"off_model must be one of {OFF_MODELS}")
        if self.off_model == "bounded_q":
            if self.q is None or self.q <= 0:
                raise ValueError("bounded_q needs a positive queue bound q")
        else:
            if self.lambda_target is None or not 0 < self.lambda_target < 1:
                raise ValueError("lambda_target must lie in (0, 1)")


def sample_heavy_tail(spec: HeavyTailSpec, u):
    """Inverse-transform sample x_min * u**(-1/tail_index) for u in (0, 1].

    u may be a scalar or an array; the result matches. u=1 maps to
    x_min and u -> 0 walks out the tail. Samples are capped at x_max
    when the spec has one.
    """
    u_arr = np.asarray(u, dtype=np.float64)
    if np.any(u_arr <= 0) or np.any(u_arr > 1):
        raise ValueError("u must lie in (0, 1]")
    x = spec.x_min * u_arr ** (-1.0 / spec.tail_index)
    if spec.x_max is not None:
        x = np.minimum(x, spec.x_max)
    if np.isscalar(u) or u_arr.ndim == 0:
        return float(x)
    return x


def _off_lengths(spec: GeneratorSpec, on: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    if spec.off_model == "iid_matched_mean":
        mean_off = spec.tail.mean * (spec.m / spec.lambda_target - 1.0)
        return rng.exponential(mean_off, len(on))
    if spec.off_model == "theorem_reordered":
        return on * (spec.m / spec.lambda_target - 1.0)
    return _bounded_offs(on, spec.m, spec.q)


def generate_onoff(spec: GeneratorSpec, seed) -> FluidOnOffProcess:
    """Draw spec.n_cycles on/off cycles from a seed or Generator."""
    rng = as_generator(seed)
    u = 1.0 - rng.random(spec.n_cycles)  # (0, 1], never 0
    on = sample_heavy_tail(spec.tail, u)
    off = _off_lengths(spec, on, rng)
    return FluidOnOffProcess(on, off, spec.m)


def reorder_nonoverlap(on_lengths, m: float, lam: float) -> FluidOnOffProcess:
    """Pair each burst X with silence X*(m/lam - 1).

    Every queue excursion then drains completely inside its own cycle,
    and over whole cycles the arrival rate is exactly lam: work m*X
    arrives in elapsed time X*m/lam.
    """
    if m <= 1:
        raise ValueError("m must exceed 1")
    if not 0 < lam < 1:
        raise ValueError("lam must lie in (0, 1)")
    on = np.asarray(on_lengths, dtype=np.float64)
    off = on * (m / lam - 1.0)
    return FluidOnOffProcess(on, off, m)


def _bounded_offs(on: np.ndarray, m: float, q: float) -> np.ndarray:
    # first term lets the excursion drain; second stretches the cycle
    # until the burst's own triangular area, averaged over the cycle,
    # is at most q
    return np.maximum((m - 1.0) * on, (m - 1.0) * m * on * on / (2.0 * q) - on)


def bounded_queue_process(on_lengths, m: float, q: float) -> FluidOnOffProcess:
    """Silences long enough that each cycle's mean queue is at most q.

    off_i = max((m-1) X_i, (m-1) m X_i^2 / (2q) - X_i). Large bursts
    are followed by quadratically long silences, so the long-run
    arrival rate of the process tends to zero as bursts pile up.
    """
    if m <= 1:
        raise ValueError("m must exceed 1")
    if q <= 0:
        raise ValueError("q must be positive")
    on = np.asarray(on_lengths, dtype=np.float64)
    return FluidOnOffProcess(on, _bounded_offs(on, m, q), m)


@dataclass(frozen=True)
class PacketizeReport:
    cycles: int
    silent_on_periods: int  # on periods too short to emit a packet
    packets: int
    total_bytes: int


def _emit(on, off, m, packet_size, server_rate, t0):
    """Packet timestamps for one run of cycles; returns (times, end_time)."""
    rate_bytes = m * server_rate  # on-period send rate
    spacing = packet_size / rate_bytes
    counts = np.floor(on * rate_bytes / packet_size).astype(np.int64)
    cycle_len = on + off
    starts = t0 + np.concatenate(([0.0], np.cumsum(cycle_len)[:-1]))
    total = int(counts.sum())
    before = np.concatenate(([0], np.cumsum(counts)[:-1]))
    idx = np.arange(total) - np.repeat(before, counts)
    times = np.repeat(starts, counts) + idx * spacing
    return times, counts, float(t0 + cycle_len.sum())


def packetize(
    process: FluidOnOffProcess, packet_size: int, server_rate: float
) -> tuple[PacketTrace, PacketizeReport]:
    """Turn the fluid process into equal-size packets.

    During each on period packets of packet_size bytes leave every
    packet_size/(m*server_rate) seconds starting at the period start;
    floor(on * m * server_rate / packet_size) of them fit. On periods
    shorter than one spacing emit nothing; they are counted in the
    report rather than treated as errors.
    """
    if packet_size < 1:
        raise ValueError("packet_size must be >= 1 byte")
    if server_rate <= 0:
        raise ValueError("server_rate must be positive")
    times, counts, _ = _emit(
        process.on_lengths, process.off_lengths, process.m, packet_size, server_rate, 0.0
    )
    report = PacketizeReport(
        cycles=process.n_cycles,
        silent_on_periods=int(np.count_nonzero(counts == 0)),
        packets=len(times),
        total_bytes=len(times) * packet_size,
    )
    if len(times) == 0:
        raise ValueError("no packets emitted; every on period is shorter than one packet spacing")
    sizes = np.full(len(times), packet_size, dtype=np.int64)
    trace = PacketTrace(
        times, sizes, origin=f"onoff m={process.m} packetized size={packet_size} rate={server_rate}"
    )
    return trace, report


def generate_poisson(rate: float, packet_size: int, n: int, seed) -> PacketTrace:
    """n equal-size packets with exponential inter-arrivals (mean 1/rate),
    rebased so the first packet arrives at t=0."""
    if rate <= 0:
        raise ValueError("rate must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    if packet_size < 1:
        raise ValueError("packet_size must be >= 1 byte")
    rng = as_generator(seed)
    ts = np.cumsum(rng.exponential(1.0 / rate, n))
    ts -= ts[0]
    sizes = np.full(n, packet_size, dtype=np.int64)
    return PacketTrace(ts, sizes, origin=f"poisson rate={rate} size={packet_size}")


@dataclass(frozen=True)
class SyntheticSource:
    """A generator recipe plus the packetization that turns it into traces.

    server_rate doubles as the natural simulation bandwidth: at that
    service rate the packetized load approaches the recipe's
    lambda_target.
    """

    spec: GeneratorSpec
    packet_size: int
    server_rate: float

    def trace(self, rng, n_packets: int | None = None) -> PacketTrace:
        """Fresh trace from `rng`; exactly n_packets when given, else one
        full run of spec.n_cycles cycles."""
        rng = as_generator(rng)
        if n_packets is None:
            trace, _ = packetize(generate_onoff(self.spec, rng), self.packet_size, self.server_rate)
            return trace
        if n_packets < 1:
            raise ValueError("n_packets must be >= 1")
        pieces: list[np.ndarray] = []
        have = 0
        t0 = 0.0
        # a cycle yields about mean_on * m * rate / size packets; chunk by
        # what is still owed, not by n_cycles, so small requests on long
        # recipes stay small
        per_cycle = self.spec.tail.mean * self.spec.m * self.server_rate / self.packet_size
        rounds = 0
        while have < n_packets:
            rounds += 1
            if rounds > 1000 and have == 0:
                raise ValueError("packetization produced no packets; check packet_size vs on periods")
            chunk = int(np.clip((n_packets - have) / max(per_cycle, 1e-12), 256, 1 << 20))
            u = 1.0 - rng.random(chunk)
            on = np.asarray(sample_heavy_tail(self.spec.tail, u))
            off = _off_lengths(self.spec, on, rng)
            times, _, t0 = _emit(on, off, self.spec.m, self.packet_size, self.server_rate, t0)
            pieces.append(times)
            have += len(times)
        ts = np.concatenate(pieces)[:n_packets]
        sizes = np.full(n_packets, self.packet_size, dtype=np.int64)
        label = f"onoff m={self.spec.m} packetized size={self.packet_size} rate={self.server_rate}"
        return PacketTrace(ts, sizes, origin=f"{label} first {n_packets} packets")
