import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from emsq.constants import HBAR, K_B
from emsq.errors import (
    BatchMismatch,
    CholeskyFailure,
    DegenerateDesign,
    EmptyRange,
    InsufficientPoints,
    InsufficientSamples,
    UnphysicalCovariance,
)
from emsq.gaussian import CovMat4, epr_duan, squeezing_vs_angle, tmst_from_cm
from emsq.lab import (
    CalibrationPoint,
    RfChain,
    calibrate_chain,
    difference_histogram,
    estimate_cm,
    estimate_duan,
    noise_density,
    rotate_detector,
    sample_quadratures,
    synthetic_sweep,
)
from emsq.lab.sampling import CHUNK_SIZE, QuadratureBatch

W1, W2 = 2 * math.pi * 10.17e9, 2 * math.pi * 12.13e9
CHAINS = (RfChain(83.20, 8.3, omega_c=W1), RfChain(79.99, 11.5, omega_c=W2))
QUIET = (RfChain(83.20, 0.0, omega_c=W1), RfChain(79.99, 0.0, omega_c=W2))
REPORTED = CovMat4.normal_form(oracles.REPORTED_V11, oracles.REPORTED_V33, oracles.REPORTED_V13)
TEMPS = (0.007, 0.007)


def reported_batches(n_on=216000, n_off=604800, seed=1):
    on = sample_quadratures(REPORTED, CHAINS, n_on, seed=seed)
    off = sample_quadratures(None, CHAINS, n_off, seed=seed + 1, pumps_on=False)
    return on, off


# -- chain -----------------------------------------------------------------


class TestChain:
    def test_zeta_definition(self):
        c = CHAINS[0]
        assert c.zeta == pytest.approx(10 ** (83.20 / 10) * 50 * 100 * HBAR * W1, rel=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(-20, 120), st.floats(1, 1e3), st.floats(1, 1e6))
    def test_zeta_invariant_any_path(self, gain, r, b):
        c = RfChain(gain, 1.0, r, b, W2)
        back = RfChain.from_zeta(c.zeta, 1.0, r, b, W2)
        assert back.gain_db == pytest.approx(gain, abs=1e-10)
        assert back.zeta == pytest.approx(c.zeta, rel=1e-12)
        assert back.zeta == pytest.approx(10 ** (back.gain_db / 10) * r * b * HBAR * W2, rel=1e-12)

    def test_invalid(self):
        with pytest.raises(ValueError):
            RfChain(80.0, -1.0)
        with pytest.raises(ValueError):
            RfChain.from_zeta(0.0, 1.0)


# -- sampling --------------------------------------------------------------


class TestSampling:
    def test_pumps_off_variance(self):
        off = sample_quadratures(None, CHAINS, 604800, seed=3, pumps_on=False)
        var = off.second_moments()
        se = 8.8 * math.sqrt(2 / (off.n - 1))
        assert abs(var[0, 0] - 8.8) <= 3 * se
        assert abs(var[2, 2] - 12.0) <= 3 * 12.0 * math.sqrt(2 / (off.n - 1))

    def test_vacuum_without_amplifier_noise(self):
        b = sample_quadratures(CovMat4.vacuum(), QUIET, 200000, seed=4)
        se = 0.5 * math.sqrt(2 / (b.n - 1))
        assert np.all(np.abs(np.diag(b.second_moments()) - 0.5) <= 3 * se)

    def test_deterministic(self):
        a = sample_quadratures(REPORTED, CHAINS, 150000, seed=9)
        b = sample_quadratures(REPORTED, CHAINS, 150000, seed=9)
        c = sample_quadratures(REPORTED, CHAINS, 150000, seed=10)
        assert np.array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, c.samples)

    def test_chunks_are_independent_of_total(self):
        # the first chunk of a longer run equals a one-chunk run of the same seed
        n = CHUNK_SIZE + 10
        long = sample_quadratures(REPORTED, CHAINS, n, seed=5)
        assert long.samples.shape == (n, 4)
        children = np.random.SeedSequence(5).spawn(2)
        z = np.random.default_rng(children[1]).standard_normal((10, 4))
        chol = np.linalg.cholesky(REPORTED.v + np.diag([8.3, 8.3, 11.5, 11.5]))
        assert np.allclose(long.samples[CHUNK_SIZE:], z @ chol.T, rtol=0, atol=0)

    def test_batch_is_read_only(self):
        b = sample_quadratures(REPORTED, CHAINS, 10, seed=0)
        with pytest.raises(ValueError):
            b.samples[0, 0] = 1.0

    def test_errors(self):
        with pytest.raises(InsufficientSamples):
            sample_quadratures(REPORTED, CHAINS, 1, seed=0)
        with pytest.raises(UnphysicalCovariance):
            sample_quadratures(CovMat4(0.1 * np.eye(4)), CHAINS, 10, seed=0)
        with pytest.raises(ValueError):
            QuadratureBatch(np.zeros((5, 3)), True)
        with pytest.raises(ValueError):
            QuadratureBatch(np.full((5, 4), np.nan), True)
        with pytest.raises(InsufficientSamples):
            QuadratureBatch(np.zeros((1, 4)), True)

    def test_cholesky_failure(self, monkeypatch):
        from emsq.lab import sampling

        # a physical state plus non-negative noise is always positive definite,
        # so the guard is reached by substituting an indefinite covariance
        monkeypatch.setattr(sampling, "detected_covariance", lambda *a: -np.eye(4))
        with pytest.raises(CholeskyFailure):
            sample_quadratures(None, CHAINS, 10, seed=0, pumps_on=False)

    def test_voltage_export(self):
        b = sample_quadratures(REPORTED, CHAINS, 10, seed=0)
        v = b.to_voltages(CHAINS)
        assert np.allclose(v[:, 0], b.samples[:, 0] * math.sqrt(CHAINS[0].zeta), rtol=1e-15)
        assert np.allclose(v[:, 3], b.samples[:, 3] * math.sqrt(CHAINS[1].zeta), rtol=1e-15)


# -- rotation --------------------------------------------------------------


@pytest.fixture(scope="module")
def batch():
    return sample_quadratures(REPORTED, CHAINS, 1000, seed=7)


class TestRotation:
    def test_identity(self, batch):
        assert np.array_equal(rotate_detector(batch, 0.0).samples, batch.samples)
        assert np.allclose(rotate_detector(batch, 2 * math.pi).samples, batch.samples, atol=1e-12 * 50)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-20, 20))
    def test_preserves_channel_norms(self, phi):
        b = sample_quadratures(REPORTED, CHAINS, 50, seed=8)
        r = rotate_detector(b, phi)
        s, t = b.samples, r.samples
        assert np.allclose(s[:, 0] ** 2 + s[:, 1] ** 2, t[:, 0] ** 2 + t[:, 1] ** 2, rtol=1e-12)
        assert np.array_equal(s[:, 2:], t[:, 2:])

    def test_matches_cm_rotation(self, batch):
        r = rotate_detector(batch, 0.4)
        c, s = math.cos(0.4), math.sin(0.4)
        assert np.allclose(r.samples[:, 0], c * batch.samples[:, 0] + s * batch.samples[:, 1])
        assert np.allclose(r.samples[:, 1], -s * batch.samples[:, 0] + c * batch.samples[:, 1])

    def test_angle_sweep_follows_squeezing_formula(self):
        on, off = reported_batches(seed=21)
        p = tmst_from_cm(REPORTED)
        values = []
        for phi in np.linspace(0, 2 * math.pi, 24, endpoint=False):
            d = estimate_duan(rotate_detector(on, phi), off, TEMPS, (W1, W2))
            expected = 2 * squeezing_vs_angle(p, phi)
            assert abs(d.delta_epr - expected) <= 3 * d.se
            values.append(d.delta_epr)
        assert int(np.argmin(values)) == 0


# -- estimation ------------------------------------------------------------


class TestEstimate:
    def test_round_trip_within_three_se(self):
        on, off = reported_batches()
        est = estimate_cm(on, off, TEMPS, (W1, W2))
        assert est.within(REPORTED).all()
        assert est.n_on == 216000 and est.n_off == 604800

    def test_diagonal_se_formula(self):
        on, off = reported_batches(20000, 20000)
        est = estimate_cm(on, off, TEMPS, (W1, W2))
        s_on, s_off = on.second_moments(), off.second_moments()
        expected = math.sqrt(
            (s_on[0, 0] * math.sqrt(2 / (on.n - 1))) ** 2 + (s_off[0, 0] * math.sqrt(2 / (off.n - 1))) ** 2
        )
        assert est.se[0, 0] == pytest.approx(expected, rel=1e-12)

    def test_no_signal_gives_vacuum(self):
        on = sample_quadratures(CovMat4.vacuum(), CHAINS, 200000, seed=11)
        off = sample_quadratures(None, CHAINS, 200000, seed=12, pumps_on=False)
        est = estimate_cm(on, off, TEMPS, (W1, W2))
        assert est.within(CovMat4.vacuum()).all()

    def test_warm_input_noise(self):
        on, off = reported_batches(1000, 1000)
        est = estimate_cm(on, off, (4.0, 4.0), (W1, W1))
        x = HBAR * W1 / (2 * K_B * 4.0)
        assert est.input_noise[0] == pytest.approx(0.5 / math.tanh(x), rel=1e-12)
        # well above the 0.5 vacuum value: hbar w / 2 k T is only 0.061 here
        assert est.input_noise[0] == pytest.approx(8.2055, abs=1e-4)

    def test_error_scales_as_inverse_sqrt_n(self):
        errs = {}
        for n in (100_000, 1_600_000):
            total = 0.0
            for seed in range(4):
                on = sample_quadratures(REPORTED, CHAINS, n, seed=100 + seed)
                off = sample_quadratures(None, CHAINS, n, seed=200 + seed, pumps_on=False)
                est = estimate_cm(on, off, TEMPS, (W1, W2))
                total += float(np.sum((est.cm.v - REPORTED.v) ** 2))
            errs[n] = math.sqrt(total / 4)
        ratio = errs[100_000] / errs[1_600_000]
        assert 2.0 <= ratio <= 8.0

    def test_duan_matches_cm(self):
        on, off = reported_batches(50000, 50000)
        cm = estimate_cm(on, off, TEMPS, (W1, W2)).cm
        d = estimate_duan(on, off, TEMPS, (W1, W2))
        assert d.delta_epr == pytest.approx(epr_duan(cm).delta_epr, rel=1e-10)
        assert d.se > 0

    def test_duan_round_trip(self):
        on, off = reported_batches(seed=31)
        d = estimate_duan(on, off, TEMPS, (W1, W2))
        assert abs(d.delta_epr - 0.46) <= 3 * d.se

    def test_mismatch(self):
        on, off = reported_batches(200, 200)
        with pytest.raises(BatchMismatch):
            estimate_cm(off, on, TEMPS, (W1, W2))
        with pytest.raises(BatchMismatch):
            estimate_cm(on, on, TEMPS, (W1, W2))
        small = sample_quadratures(REPORTED, CHAINS, 10, seed=0)
        with pytest.raises(InsufficientSamples):
            estimate_cm(small, off, TEMPS, (W1, W2))
        with pytest.raises(InsufficientSamples):
            estimate_duan(small, off, TEMPS, (W1, W2))

    def test_deterministic(self):
        a = estimate_cm(*reported_batches(5000, 5000), TEMPS, (W1, W2))
        b = estimate_cm(*reported_batches(5000, 5000), TEMPS, (W1, W2))
        assert np.array_equal(a.cm.v, b.cm.v) and np.array_equal(a.se, b.se)
        assert a.to_dict()["convention"] == "half"


# -- calibration -----------------------------------------------------------


def temps(n=10, lo=0.007, hi=0.3):
    return np.linspace(lo, hi, n)


class TestCalibration:
    def test_zero_temperature_limit(self):
        c = CHAINS[0]
        assert noise_density(1e-4, c) == pytest.approx(c.zeta * (0.5 + 8.3), rel=1e-12)

    def test_noiseless_round_trip(self):
        for chain in CHAINS:
            pts = synthetic_sweep(chain, temps(), 0.0)
            res = calibrate_chain(pts, chain.omega_c)
            assert res.gain_db == pytest.approx(chain.gain_db, abs=1e-9)
            assert res.n_add == pytest.approx(chain.n_add, abs=1e-9)
            assert res.zeta == pytest.approx(chain.zeta, rel=1e-9)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(40, 100), st.floats(0, 30))
    def test_noiseless_round_trip_random(self, gain, n_add):
        chain = RfChain(gain, n_add, omega_c=W1)
        res = calibrate_chain(synthetic_sweep(chain, temps(6, 0.01, 1.0), 0.0), W1)
        assert res.gain_db == pytest.approx(gain, abs=1e-9)
        assert res.n_add == pytest.approx(n_add, abs=1e-9)

    def test_errors_are_honest(self):
        # over many seeds the fitted gain lands within 3 SE about 99% of the time
        chain = CHAINS[0]
        hits = 0
        trials = 200
        for seed in range(trials):
            pts = synthetic_sweep(chain, temps(10, 0.007, 1.0), 0.002, rng=seed)
            res = calibrate_chain(pts, W1)
            hits += abs(res.gain_db - chain.gain_db) <= 3 * res.gain_db_se
        assert hits >= 0.95 * trials

    def test_wide_sweep_recovers_gain(self):
        chain = CHAINS[0]
        pts = synthetic_sweep(chain, temps(10, 0.007, 1.0), 0.002, rng=0)
        res = calibrate_chain(pts, W1)
        assert res.gain_db == pytest.approx(83.20, abs=0.1)
        assert res.n_add == pytest.approx(8.3, abs=0.3)

    def test_unweighted_fit(self):
        pts = synthetic_sweep(CHAINS[1], temps(), 0.0)
        res = calibrate_chain(pts, W2, weighted=False)
        assert res.gain_db == pytest.approx(79.99, abs=1e-9)
        assert res.residual_rms == pytest.approx(0.0, abs=1e-9 * pts[0].noise_density_v2hz)

    def test_errors(self):
        pts = synthetic_sweep(CHAINS[0], temps(3), 0.0)
        with pytest.raises(InsufficientPoints):
            calibrate_chain(pts[:2], W1)
        same = [CalibrationPoint(0.05, 1e-10), CalibrationPoint(0.05, 1.1e-10), CalibrationPoint(0.05, 1e-10)]
        with pytest.raises(DegenerateDesign):
            calibrate_chain(same, W1)
        falling = [CalibrationPoint(t, 1e-10 / t) for t in (0.1, 0.2, 0.4)]
        with pytest.raises(DegenerateDesign):
            calibrate_chain(falling, W1)
        with pytest.raises(ValueError):
            CalibrationPoint(0.0, 1.0)
        with pytest.raises(ValueError):
            CalibrationPoint(0.1, -1.0)

    def test_deterministic(self):
        a = synthetic_sweep(CHAINS[0], temps(), 0.01, rng=3)
        b = synthetic_sweep(CHAINS[0], temps(), 0.01, rng=3)
        assert a == b


# -- histograms ------------------------------------------------------------


@pytest.fixture(scope="module")
def batches():
    return reported_batches(216000, 604800, seed=41)


class TestHistogram:
    def test_ridges(self, batches):
        on, off = batches
        hx = difference_histogram(on, off, ("X1", "X2"))
        hp = difference_histogram(on, off, ("P1", "P2"))
        assert hx.diagonal_contrast() > 0.2
        assert hp.diagonal_contrast() < -0.2
        assert hx.values.shape == (64, 64)
        assert hx.values.sum() == pytest.approx(0.0, abs=1e-3)

    def test_default_range(self, batches):
        on, off = batches
        h = difference_histogram(on, off, (0, 2))
        sd = on.samples[:, 0].std()
        assert h.x_edges[0] == pytest.approx(-6 * sd) and h.x_edges[-1] == pytest.approx(6 * sd)
        meta = h.metadata()
        assert meta["pair"] == ["X1", "X2"] and meta["n_on"] == 216000 and meta["shape"] == [64, 64]

    def test_no_signal_is_flat(self):
        a = sample_quadratures(None, CHAINS, 200000, seed=51, pumps_on=False)
        b = sample_quadratures(None, CHAINS, 200000, seed=52, pumps_on=False)
        on = QuadratureBatch(a.samples, True)
        h = difference_histogram(on, b, (0, 2), bins=16)
        assert np.max(np.abs(h.values)) < 5 / math.sqrt(200000)

    def test_deterministic(self, batches):
        on, off = batches
        a = difference_histogram(on, off, (1, 3), bins=32)
        b = difference_histogram(on, off, (1, 3), bins=32)
        assert np.array_equal(a.values, b.values)

    def test_errors(self, batches):
        on, off = batches
        with pytest.raises(EmptyRange):
            difference_histogram(on, off, (0, 2), limits=[(1, 1), (0, 1)])
        with pytest.raises(ValueError):
            difference_histogram(on, off, (0, 0))
        with pytest.raises(ValueError):
            difference_histogram(on, off, ("X1", "Y2"))
        with pytest.raises(ValueError):
            difference_histogram(on, off, (0, 2), bins=0)
