import numpy as np
import pytest

from wiretaplab.channel import (
    AvcChannel,
    AvcSchedule,
    GaussianSpec,
    RngStream,
    UncertaintySet,
    snr_to_variance,
    transmit_avc,
    transmit_awgn,
)


class TestSnrToVariance:
    def test_zero_db(self):
        assert snr_to_variance(0.0) == 1.0

    def test_nine_db(self):
        assert snr_to_variance(9.0) == pytest.approx(0.125892541179, abs=1e-9)

    def test_negative_five_db(self):
        assert snr_to_variance(-5.0) == pytest.approx(3.162277660168, abs=1e-9)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            snr_to_variance(float("nan"))


class TestRngStream:
    def test_same_seed_label_same_samples(self):
        a = RngStream(42, "x").gen.standard_normal(16)
        b = RngStream(42, "x").gen.standard_normal(16)
        assert np.array_equal(a, b)

    def test_labels_decorrelate(self):
        a = RngStream(42, "x").gen.standard_normal(16)
        b = RngStream(42, "y").gen.standard_normal(16)
        assert not np.array_equal(a, b)

    def test_substream_is_deterministic(self):
        a = RngStream(7).substream("shard3").gen.standard_normal(4)
        b = RngStream(7).substream("shard3").gen.standard_normal(4)
        assert np.array_equal(a, b)


class TestTransmitAwgn:
    def test_vanishing_noise_is_identity(self):
        x = np.ones(8) / np.sqrt(8) * np.sqrt(8)  # unit-power codeword
        spec = GaussianSpec.from_snr_db(300.0)
        y = transmit_awgn(x, spec, RngStream(0))
        assert np.max(np.abs(y - x)) < 1e-10

    def test_empirical_variance(self):
        x = np.zeros(4)
        spec = GaussianSpec.from_snr_db(0.0)
        y = transmit_awgn(
            np.tile(x, (250_000, 1)), spec, RngStream(1), check_power=False
        )
        assert np.var(y) == pytest.approx(1.0, abs=0.01)

    def test_mean_is_codeword(self):
        rng = RngStream(2)
        x = np.array([1.0, -1.0, 0.5, -0.5])
        y = transmit_awgn(np.tile(x, (200_000, 1)), GaussianSpec.from_snr_db(0.0), rng)
        assert np.allclose(y.mean(axis=0), x, atol=0.02)

    def test_deterministic_given_stream(self):
        x = np.ones(6)
        y1 = transmit_awgn(x, GaussianSpec.from_snr_db(5), RngStream(3, "a"))
        y2 = transmit_awgn(x, GaussianSpec.from_snr_db(5), RngStream(3, "a"))
        assert np.array_equal(y1, y2)

    def test_power_violation_rejected(self):
        with pytest.raises(ValueError, match="power"):
            transmit_awgn(np.full(4, 2.0), GaussianSpec.from_snr_db(0), RngStream(0))

    def test_noise_uncorrelated_across_symbols(self):
        y = transmit_awgn(
            np.zeros((100_000, 8)), GaussianSpec.from_snr_db(0), RngStream(4),
        )
        corr = np.corrcoef(y.T)
        off_diag = corr[~np.eye(8, dtype=bool)]
        assert np.max(np.abs(off_diag)) < 3.0 / np.sqrt(100_000) * 3


class TestUncertaintySet:
    def test_design_points(self):
        legit = UncertaintySet((9.0, 10.0), "legitimate")
        eve = UncertaintySet((-8.0, -6.5, -5.0), "eavesdropper")
        assert legit.design_snr_db == 9.0  # worst legitimate SNR
        assert eve.design_snr_db == -5.0  # best eavesdropper SNR

    def test_from_range_grid_step(self):
        s = UncertaintySet.from_range(-8.0, -5.0, 0.01, "eavesdropper")
        assert len(s.snr_values_db) == 301
        assert s.snr_values_db[0] == pytest.approx(-8.0)
        assert s.snr_values_db[-1] == pytest.approx(-5.0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            UncertaintySet((), "legitimate")


class TestAvc:
    def test_singleton_set_matches_awgn(self):
        x = np.ones((100, 4))
        uset = UncertaintySet((3.0,), "legitimate")
        sched = AvcSchedule("per-symbol-uniform")
        y, log = transmit_avc(x, uset, sched, RngStream(5, "avc"))
        assert y.shape == x.shape
        # same variance every draw
        assert all(np.allclose(v, snr_to_variance(3.0)) for _, v in log)

    def test_per_symbol_uniform_long_run_mean(self):
        uset = UncertaintySet((-5.0, -8.0), "eavesdropper")
        chan = AvcChannel(uset, AvcSchedule("per-symbol-uniform"), 4, RngStream(6))
        y = chan.transmit(np.zeros((100_000, 4)))
        expected = np.mean([snr_to_variance(-5.0), snr_to_variance(-8.0)])
        assert np.var(y) == pytest.approx(expected, rel=0.01)

    def test_block_schedule_holds_variance_within_block(self):
        uset = UncertaintySet(tuple(np.arange(-8.0, -4.99, 0.5)), "eavesdropper")
        chan = AvcChannel(uset, AvcSchedule("per-codeword-block", 500), 3, RngStream(7))
        chan.transmit(np.zeros((1250, 3)))
        # draws at codeword indices 0, 500, 1000 only
        assert [i for i, _ in chan.variance_log] == [0, 500, 1000]

    def test_fixed_schedule_draws_once(self):
        uset = UncertaintySet((-8.0, -5.0), "eavesdropper")
        chan = AvcChannel(uset, AvcSchedule("fixed"), 3, RngStream(8))
        chan.transmit(np.zeros((100, 3)))
        chan.transmit(np.zeros((100, 3)))
        assert len(chan.variance_log) == 1

    def test_state_spans_calls(self):
        uset = UncertaintySet((-8.0, -5.0), "eavesdropper")
        chan = AvcChannel(uset, AvcSchedule("per-codeword-block", 150), 2, RngStream(9))
        chan.transmit(np.zeros((100, 2)))
        chan.transmit(np.zeros((100, 2)))
        assert [i for i, _ in chan.variance_log] == [0, 150]

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            UncertaintySet((), "eavesdropper")


class TestDegradationOrdering:
    def test_noisier_channel_equals_cleaner_plus_extra_noise(self):
        """Second moments of the sigma_b channel match the sigma_a channel
        plus independent top-up noise of variance sigma_b - sigma_a."""
        rng = RngStream(10)
        x = np.zeros((200_000, 2))
        var_a, var_b = 1.0, 2.5
        y_b = transmit_awgn(x, GaussianSpec.from_variance(var_b), rng.substream("b"))
        y_a = transmit_awgn(x, GaussianSpec.from_variance(var_a), rng.substream("a"))
        topped_up = y_a + np.sqrt(var_b - var_a) * rng.substream(
            "extra"
        ).gen.standard_normal(x.shape)
        assert np.var(y_b) == pytest.approx(np.var(topped_up), rel=0.02)
