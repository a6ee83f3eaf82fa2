import numpy as np
import pytest
from hypothesis import given, strategies as st

import trafficlab as tl
from trafficlab.rng import substream
from trafficlab.synth import OFF_MODELS


class TestHeavyTailSpec:
    def test_mean_formula(self):
        # alpha * x_min / (alpha - 1)
        assert tl.HeavyTailSpec(1.5, 2.0).mean == pytest.approx(6.0)

    @pytest.mark.parametrize("alpha", [1.0, 2.0, 0.5, 2.5])
    def test_tail_index_outside_open_interval_rejected(self, alpha):
        with pytest.raises(ValueError):
            tl.HeavyTailSpec(alpha, 1.0)

    def test_nonpositive_x_min_rejected(self):
        with pytest.raises(ValueError):
            tl.HeavyTailSpec(1.5, 0.0)

    def test_cap_below_x_min_rejected(self):
        with pytest.raises(ValueError):
            tl.HeavyTailSpec(1.5, 2.0, x_max=2.0)


class TestSampleHeavyTail:
    def test_quantile_value(self):
        # x_min * u**(-1/alpha) at u=0.25, alpha=1.5
        x = tl.sample_heavy_tail(tl.HeavyTailSpec(1.5, 1.0), 0.25)
        assert x == pytest.approx(2.5198420997897464, rel=1e-12)

    def test_u_one_hits_the_floor(self):
        assert tl.sample_heavy_tail(tl.HeavyTailSpec(1.5, 3.0), 1.0) == pytest.approx(3.0)

    def test_scalar_in_scalar_out(self):
        assert isinstance(tl.sample_heavy_tail(tl.HeavyTailSpec(1.5, 1.0), 0.5), float)

    def test_array_in_array_out(self):
        x = tl.sample_heavy_tail(tl.HeavyTailSpec(1.5, 1.0), np.array([0.5, 1.0]))
        assert x.shape == (2,)

    @pytest.mark.parametrize("u", [0.0, -0.1, 1.1])
    def test_u_outside_half_open_interval_rejected(self, u):
        with pytest.raises(ValueError):
            tl.sample_heavy_tail(tl.HeavyTailSpec(1.5, 1.0), u)

    def test_cap_applies(self):
        spec = tl.HeavyTailSpec(1.5, 1.0, x_max=10.0)
        assert tl.sample_heavy_tail(spec, 1e-9) == pytest.approx(10.0)

    @given(u=st.lists(st.floats(1e-12, 1.0), min_size=1, max_size=50))
    def test_samples_never_fall_below_the_floor(self, u):
        spec = tl.HeavyTailSpec(1.7, 0.5)
        x = np.asarray(tl.sample_heavy_tail(spec, np.array(u)))
        assert np.all(x >= spec.x_min)

    @given(u=st.lists(st.floats(1e-12, 1.0), min_size=1, max_size=50))
    def test_cap_is_respected(self, u):
        spec = tl.HeavyTailSpec(1.2, 1.0, x_max=50.0)
        x = np.asarray(tl.sample_heavy_tail(spec, np.array(u)))
        assert np.all(x <= spec.x_max)

    @given(u1=st.floats(1e-9, 1.0), u2=st.floats(1e-9, 1.0))
    def test_smaller_u_means_larger_sample(self, u1, u2):
        spec = tl.HeavyTailSpec(1.5, 1.0)
        lo, hi = sorted((u1, u2))
        assert tl.sample_heavy_tail(spec, lo) >= tl.sample_heavy_tail(spec, hi)

    def test_sample_mean_matches_formula(self):
        # statistical check on a pinned stream; alpha=1.5, x_min=2 -> mean 6
        u = 1.0 - substream(0).random(1_000_000)
        x = tl.sample_heavy_tail(tl.HeavyTailSpec(1.5, 2.0), u)
        assert abs(x.mean() - 6.0) / 6.0 < 0.02

    def test_truncated_moments_match_formulas(self):
        # capping at c makes both moments finite:
        #   E[min(X,c)]   = x_min*a/(a-1) - x_min^a c^(1-a)/(a-1)
        #   E[min(X,c)^2] = x_min^2 + 2 x_min^a (c^(2-a) - x_min^(2-a))/(2-a)
        u = 1.0 - substream(1).random(1_000_000)
        x = np.asarray(tl.sample_heavy_tail(tl.HeavyTailSpec(1.5, 1.0, x_max=1000.0), u))
        assert abs(x.mean() - 2.9367544467966322) / 2.9367544467966322 < 0.02
        assert abs((x**2).mean() - 123.49110640673517) / 123.49110640673517 < 0.15


class TestGeneratorSpec:
    def test_off_model_names(self):
        assert OFF_MODELS == ("iid_matched_mean", "theorem_reordered", "bounded_q")

    def test_m_at_most_one_rejected(self):
        with pytest.raises(ValueError):
            tl.GeneratorSpec(m=1.0, tail=tl.HeavyTailSpec(1.5, 1.0), n_cycles=10, lambda_target=0.5)

    def test_unknown_off_model_rejected(self):
        with pytest.raises(ValueError):
            tl.GeneratorSpec(
                m=2.0, tail=tl.HeavyTailSpec(1.5, 1.0), n_cycles=10,
                lambda_target=0.5, off_model="magic",
            )

    def test_bounded_model_requires_q(self):
        with pytest.raises(ValueError):
            tl.GeneratorSpec(m=2.0, tail=tl.HeavyTailSpec(1.5, 1.0), n_cycles=10, off_model="bounded_q")

    def test_matched_mean_requires_lambda_in_unit_interval(self):
        with pytest.raises(ValueError):
            tl.GeneratorSpec(m=2.0, tail=tl.HeavyTailSpec(1.5, 1.0), n_cycles=10, lambda_target=1.0)
        with pytest.raises(ValueError):
            tl.GeneratorSpec(m=2.0, tail=tl.HeavyTailSpec(1.5, 1.0), n_cycles=10)


class TestFluidOnOffProcess:
    def test_properties(self):
        p = tl.FluidOnOffProcess(np.array([1.0, 2.0]), np.array([3.0, 4.0]), 2.0)
        assert p.n_cycles == 2
        assert p.horizon == pytest.approx(10.0)
        assert p.arrival_rate == pytest.approx(2.0 * 3.0 / 10.0)

    def test_prefix(self):
        p = tl.FluidOnOffProcess(np.array([1.0, 2.0, 3.0]), np.array([1.0, 1.0, 1.0]), 2.0)
        q = p.prefix(2)
        assert q.n_cycles == 2
        assert np.array_equal(q.on_lengths, [1.0, 2.0])
        with pytest.raises(ValueError):
            p.prefix(0)
        with pytest.raises(ValueError):
            p.prefix(4)

    def test_validation(self):
        with pytest.raises(ValueError):
            tl.FluidOnOffProcess(np.array([0.0]), np.array([1.0]), 2.0)
        with pytest.raises(ValueError):
            tl.FluidOnOffProcess(np.array([1.0]), np.array([-1.0]), 2.0)
        with pytest.raises(ValueError):
            tl.FluidOnOffProcess(np.array([1.0]), np.array([1.0]), 0.0)
        with pytest.raises(ValueError):
            tl.FluidOnOffProcess(np.array([]), np.array([]), 2.0)

    def test_sub_unit_m_is_allowed(self):
        # the queue simulator reports this as its degenerate case rather
        # than refusing to construct the process
        p = tl.FluidOnOffProcess(np.array([1.0]), np.array([1.0]), 0.5)
        assert p.m == 0.5


class TestGenerateOnOff:
    def test_cycle_count_and_positivity(self):
        spec = tl.GeneratorSpec(m=2.0, tail=tl.HeavyTailSpec(1.5, 1.0), n_cycles=50, lambda_target=0.5)
        p = tl.generate_onoff(spec, substream(3))
        assert p.n_cycles == 50
        assert np.all(p.on_lengths >= 1.0)
        assert np.all(p.off_lengths >= 0.0)

    def test_same_seed_same_process(self):
        spec = tl.GeneratorSpec(m=2.0, tail=tl.HeavyTailSpec(1.5, 1.0), n_cycles=20, lambda_target=0.5)
        a = tl.generate_onoff(spec, substream(4))
        b = tl.generate_onoff(spec, substream(4))
        assert np.array_equal(a.on_lengths, b.on_lengths)
        assert np.array_equal(a.off_lengths, b.off_lengths)

    def test_matched_mean_hits_target_load(self):
        # truncated tail so the sample mean converges fast
        spec = tl.GeneratorSpec(
            m=2.0, tail=tl.HeavyTailSpec(1.5, 1.0, x_max=1000.0),
            n_cycles=100_000, lambda_target=0.5,
        )
        p = tl.generate_onoff(spec, substream(0))
        assert abs(p.arrival_rate - 0.5) / 0.5 < 0.05

    def test_proportional_silences_pin_the_load_exactly(self):
        spec = tl.GeneratorSpec(
            m=2.0, tail=tl.HeavyTailSpec(1.5, 1.0), n_cycles=1000,
            lambda_target=0.5, off_model="theorem_reordered",
        )
        p = tl.generate_onoff(spec, substream(5))
        assert np.allclose(p.off_lengths, p.on_lengths * (2.0 / 0.5 - 1.0), rtol=1e-12)
        assert p.arrival_rate == pytest.approx(0.5, rel=1e-12)

    def test_generator_route_matches_direct_reordering(self):
        spec = tl.GeneratorSpec(
            m=2.0, tail=tl.HeavyTailSpec(1.5, 1.0), n_cycles=100,
            lambda_target=0.5, off_model="theorem_reordered",
        )
        p = tl.generate_onoff(spec, substream(6))
        on = np.asarray(tl.sample_heavy_tail(spec.tail, 1.0 - substream(6).random(100)))
        q = tl.reorder_nonoverlap(on, 2.0, 0.5)
        assert np.array_equal(p.on_lengths, q.on_lengths)
        assert np.array_equal(p.off_lengths, q.off_lengths)


class TestReorderNonOverlap:
    def test_off_rule(self):
        p = tl.reorder_nonoverlap(np.array([1.0, 4.0]), 2.0, 0.5)
        assert np.array_equal(p.off_lengths, [3.0, 12.0])

    def test_cycles_drain_completely(self):
        # off >= (m-1)*on whenever lam < 1, so no excursion spills over
        p = tl.reorder_nonoverlap(np.array([1.0, 2.0, 0.5]), 3.0, 0.8)
        assert np.all(p.off_lengths >= (p.m - 1.0) * p.on_lengths)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            tl.reorder_nonoverlap(np.array([1.0]), 1.0, 0.5)
        with pytest.raises(ValueError):
            tl.reorder_nonoverlap(np.array([1.0]), 2.0, 1.0)

    @given(
        lengths=st.lists(st.floats(0.01, 50.0), min_size=1, max_size=40),
        m=st.floats(1.05, 8.0),
        lam=st.floats(0.05, 0.95),
    )
    def test_rate_is_exactly_lambda(self, lengths, m, lam):
        p = tl.reorder_nonoverlap(np.array(lengths), m, lam)
        assert p.arrival_rate == pytest.approx(lam, rel=1e-9)


class TestBoundedQueueProcess:
    def test_off_rule_value(self):
        # X=2, m=3, q=1: max((m-1)X, (m-1)mX^2/(2q) - X) = max(4, 10) = 10
        p = tl.bounded_queue_process(np.array([2.0]), 3.0, 1.0)
        assert p.off_lengths[0] == pytest.approx(10.0)

    def test_per_cycle_mean_queue_is_capped(self):
        # the bound is tight for the cycle above: area 12 over length 12
        p = tl.bounded_queue_process(np.array([2.0]), 3.0, 1.0)
        area = p.m * (p.m - 1.0) * 4.0 / 2.0
        assert area / (p.on_lengths[0] + p.off_lengths[0]) == pytest.approx(1.0)

    @given(
        lengths=st.lists(st.floats(0.01, 100.0), min_size=1, max_size=40),
        m=st.floats(1.1, 6.0),
        q=st.floats(0.1, 10.0),
    )
    def test_cap_holds_for_every_cycle(self, lengths, m, q):
        on = np.array(lengths)
        p = tl.bounded_queue_process(on, m, q)
        # off >= (m-1)on means each excursion drains inside its cycle,
        # so its time-average is the triangle area over the cycle length
        assert np.all(p.off_lengths >= (m - 1.0) * on - 1e-12 * on)
        cycle_means = (m * (m - 1.0) * on**2 / 2.0) / (on + p.off_lengths)
        assert np.all(cycle_means <= q * (1.0 + 1e-9))

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            tl.bounded_queue_process(np.array([1.0]), 1.0, 1.0)
        with pytest.raises(ValueError):
            tl.bounded_queue_process(np.array([1.0]), 2.0, 0.0)


class TestPacketize:
    def test_worked_example(self):
        # on=1s at byte rate m*server_rate=200 B/s, 50 B packets:
        # four packets at 0, 0.25, 0.5, 0.75
        proc = tl.FluidOnOffProcess(np.array([1.0]), np.array([1.0]), 2.0)
        trace, report = tl.packetize(proc, 50, 100.0)
        assert np.allclose(trace.timestamps, [0.0, 0.25, 0.5, 0.75])
        assert np.all(trace.sizes == 50)
        assert report == tl.PacketizeReport(cycles=1, silent_on_periods=0, packets=4, total_bytes=200)

    def test_short_on_periods_are_counted_not_fatal(self):
        proc = tl.FluidOnOffProcess(np.array([0.01, 1.0]), np.array([1.0, 1.0]), 2.0)
        trace, report = tl.packetize(proc, 50, 100.0)
        assert report.silent_on_periods == 1
        assert trace.packet_count == report.packets == 4

    def test_all_silent_is_an_error(self):
        proc = tl.FluidOnOffProcess(np.array([0.01]), np.array([1.0]), 2.0)
        with pytest.raises(ValueError):
            tl.packetize(proc, 50, 100.0)

    def test_parameter_validation(self):
        proc = tl.FluidOnOffProcess(np.array([1.0]), np.array([1.0]), 2.0)
        with pytest.raises(ValueError):
            tl.packetize(proc, 0, 100.0)
        with pytest.raises(ValueError):
            tl.packetize(proc, 50, 0.0)

    def test_packets_stay_inside_their_on_periods(self):
        spec = tl.GeneratorSpec(m=2.0, tail=tl.HeavyTailSpec(1.5, 0.5), n_cycles=200, lambda_target=0.5)
        proc = tl.generate_onoff(spec, substream(8))
        trace, report = tl.packetize(proc, 100, 1000.0)
        starts = np.concatenate(([0.0], np.cumsum(proc.on_lengths + proc.off_lengths)[:-1]))
        ends = starts + proc.on_lengths
        # every timestamp must fall inside some on interval
        inside = np.zeros(trace.packet_count, dtype=bool)
        for s, e in zip(starts, ends):
            inside |= (trace.timestamps >= s - 1e-9) & (trace.timestamps < e + 1e-9)
        assert inside.all()
        assert report.total_bytes == trace.total_bytes


class TestGeneratePoisson:
    def test_shape_and_rebase(self):
        tr = tl.generate_poisson(100.0, 1000, 50, substream(2))
        assert tr.packet_count == 50
        assert tr.timestamps[0] == 0.0
        assert np.all(tr.sizes == 1000)

    def test_realized_rate(self):
        tr = tl.generate_poisson(100.0, 1000, 100_000, substream(4))
        rate = (tr.packet_count - 1) / tr.duration
        assert abs(rate - 100.0) / 100.0 < 0.02

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            tl.generate_poisson(0.0, 100, 10, 1)
        with pytest.raises(ValueError):
            tl.generate_poisson(10.0, 100, 0, 1)
        with pytest.raises(ValueError):
            tl.generate_poisson(10.0, 0, 10, 1)


class TestSyntheticSource:
    def _source(self, n_cycles=100):
        spec = tl.GeneratorSpec(
            m=2.0, tail=tl.HeavyTailSpec(1.5, 0.05), n_cycles=n_cycles,
            lambda_target=0.5, off_model="theorem_reordered",
        )
        return tl.SyntheticSource(spec=spec, packet_size=100, server_rate=10_000.0)

    def test_full_run_matches_manual_pipeline(self):
        src = self._source()
        a = src.trace(substream(3))
        proc = tl.generate_onoff(src.spec, substream(3))
        b, _ = tl.packetize(proc, 100, 10_000.0)
        assert np.array_equal(a.timestamps, b.timestamps)

    def test_exact_packet_count_on_request(self):
        src = self._source()
        tr = src.trace(substream(9), n_packets=777)
        assert tr.packet_count == 777

    def test_requested_count_is_deterministic(self):
        src = self._source()
        a = src.trace(substream(10), n_packets=500)
        b = src.trace(substream(10), n_packets=500)
        assert np.array_equal(a.timestamps, b.timestamps)

    def test_bad_count_rejected(self):
        with pytest.raises(ValueError):
            self._source().trace(substream(0), n_packets=0)
