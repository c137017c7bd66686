import math

import numpy as np
import pytest

from chshlab.chsh import coincidence_probabilities, s_parameter, state_phi
from chshlab.expsim import (
    CountsRecord,
    NoiseModel,
    SEstimate,
    estimate_s,
    noisy_state,
    prepare_via_hwp,
    run_setting,
    setting_probabilities,
)
from chshlab.linalg import IDENTITY_4, PAULI_X, PAULI_Z, projector, tensor, trace_expectation

SQRT2 = math.sqrt(2.0)
NO_NOISE = NoiseModel.ideal()


class TestNoiseModel:
    def test_defaults(self):
        noise = NoiseModel()
        assert noise.visibility == 0.96
        assert noise.analyzer_offset_a == 0.0
        assert noise.analyzer_offset_b == 0.0
        assert noise.accidental_fraction == 0.005

    def test_validation(self):
        with pytest.raises(ValueError):
            NoiseModel(visibility=1.2)
        with pytest.raises(ValueError):
            NoiseModel(accidental_fraction=1.0)
        with pytest.raises(ValueError):
            NoiseModel(analyzer_offset_a=math.inf)


class TestPrepareViaHwp:
    def test_singlet_fixed_point(self):
        # chi = 0: the rotation is the identity and the singlet passes through.
        out = prepare_via_hwp(math.pi / 2)
        assert np.allclose(out, np.array([0, 1, -1, 0]) / SQRT2, atol=1e-12)

    def test_rotation_to_phi_plus(self):
        # chi = -pi/2 maps |H> -> -|V>, |V> -> |H> on arm b; expanding on the
        # singlet by hand gives (|HH> + |VV>)/sqrt2.
        out = prepare_via_hwp(0.0)
        assert np.allclose(out, np.array([1, 0, 0, 1]) / SQRT2, atol=1e-12)
        assert np.allclose(out, state_phi(0.0), atol=1e-12)

    def test_equal_mixture(self):
        out = prepare_via_hwp(math.pi / 4)
        assert np.allclose(out, np.array([1, 1, -1, 1]) / 2.0, atol=1e-12)
        assert np.allclose(out, state_phi(math.pi / 4), atol=1e-12)

    def test_overlap_with_direct_construction(self):
        rng = np.random.default_rng(41)
        for xi in rng.uniform(0, math.pi, 100):
            overlap = abs(np.vdot(prepare_via_hwp(xi), state_phi(xi)))
            assert abs(overlap - 1.0) <= 1e-12


class TestNoisyState:
    def test_full_visibility(self):
        psi = state_phi(0.3)
        assert np.allclose(noisy_state(psi, NO_NOISE), projector(psi), atol=1e-12)

    def test_zero_visibility(self):
        rho = noisy_state(state_phi(0.3), NoiseModel(visibility=0.0, accidental_fraction=0.0))
        assert np.allclose(rho, IDENTITY_4 / 4.0, atol=1e-12)

    def test_mixture_expectation(self):
        rho = noisy_state(state_phi(0.0), NoiseModel(visibility=0.9, accidental_fraction=0.0))
        zz = tensor(PAULI_Z, PAULI_Z)
        assert trace_expectation(rho, zz) == pytest.approx(0.9, abs=1e-12)


class TestSettingProbabilities:
    def test_pure_phi_plus_aligned(self):
        rho = projector(state_phi(0.0))
        p = setting_probabilities(rho, 0.0, 0.0, NO_NOISE)
        assert p.as_tuple() == pytest.approx((0.5, 0.0, 0.0, 0.5), abs=1e-12)

    def test_maximally_mixed_is_uniform(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            alpha, beta = rng.uniform(0, 2 * math.pi, 2)
            p = setting_probabilities(IDENTITY_4 / 4.0, alpha, beta, NO_NOISE)
            assert p.as_tuple() == pytest.approx((0.25,) * 4, abs=1e-12)

    def test_convex_mixture_arithmetic(self):
        noise = NoiseModel(visibility=0.96, accidental_fraction=0.0)
        rho = noisy_state(state_phi(0.0), noise)
        p = setting_probabilities(rho, 0.0, 0.0, noise)
        # 0.96 * (1/2, 0, 0, 1/2) + 0.04 * (1/4, ...) by direct arithmetic
        assert p.as_tuple() == pytest.approx((0.49, 0.01, 0.01, 0.49), abs=1e-12)
        # cross-check one entry against the trace path
        ket = np.kron([1.0, 0.0], [1.0, 0.0]).astype(complex)
        assert trace_expectation(rho, projector(ket)) == pytest.approx(0.49, abs=1e-12)

    def test_accidental_floor(self):
        rho = projector(state_phi(0.0))
        p = setting_probabilities(rho, 0.0, 0.0, NoiseModel(visibility=1.0, accidental_fraction=0.2))
        assert p.as_tuple() == pytest.approx((0.45, 0.05, 0.05, 0.45), abs=1e-12)

    def test_offsets_shift_analyzers(self):
        rng = np.random.default_rng(43)
        rho = projector(state_phi(0.4))
        for _ in range(20):
            alpha, beta = rng.uniform(0, 2 * math.pi, 2)
            da, db = rng.uniform(-0.3, 0.3, 2)
            noise = NoiseModel(
                visibility=1.0,
                analyzer_offset_a=da,
                analyzer_offset_b=db,
                accidental_fraction=0.0,
            )
            shifted = coincidence_probabilities(alpha + da, beta + db, 0.4)
            assert setting_probabilities(rho, alpha, beta, noise).as_tuple() == pytest.approx(
                shifted.as_tuple(), abs=1e-12
            )

    def test_sums_to_one(self):
        rng = np.random.default_rng(44)
        rho = noisy_state(state_phi(1.1), NoiseModel())
        for _ in range(50):
            p = setting_probabilities(
                rho, rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi), NoiseModel()
            )
            assert abs(sum(p.as_tuple()) - 1.0) <= 1e-12


class TestRunSetting:
    def test_degenerate_distribution(self):
        # |HH> with both analyzers at 0 sends every pair to the ++ detectors.
        rho = projector(np.array([1, 0, 0, 0], dtype=complex))
        rec = run_setting(rho, 0.0, 0.0, 100, NO_NOISE, seed=5)
        assert (rec.n_pp, rec.n_pm, rec.n_mp, rec.n_mm) == (100, 0, 0, 0)

    def test_deterministic(self):
        rho = projector(state_phi(0.7))
        a = run_setting(rho, 0.3, 1.1, 5000, NoiseModel(), seed=99)
        b = run_setting(rho, 0.3, 1.1, 5000, NoiseModel(), seed=99)
        assert (a.n_pp, a.n_pm, a.n_mp, a.n_mm) == (b.n_pp, b.n_pm, b.n_mp, b.n_mm)

    def test_uniform_counts_within_five_sigma(self):
        rec = run_setting(IDENTITY_4 / 4.0, 0.2, 1.3, 1_000_000, NO_NOISE, seed=8)
        sigma = math.sqrt(1_000_000 * 0.25 * 0.75)
        for count in (rec.n_pp, rec.n_pm, rec.n_mp, rec.n_mm):
            assert abs(count - 250_000) < 5 * sigma

    def test_count_conservation(self):
        rng = np.random.default_rng(45)
        rho = noisy_state(state_phi(0.9), NoiseModel())
        for seed in range(20):
            pairs = int(rng.integers(1, 5000))
            rec = run_setting(
                rho, rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi), pairs, NoiseModel(), seed
            )
            assert rec.n_pp + rec.n_pm + rec.n_mp + rec.n_mm == rec.pairs_total == pairs

    def test_rejects_zero_pairs(self):
        with pytest.raises(ValueError):
            run_setting(IDENTITY_4 / 4.0, 0.0, 0.0, 0, NO_NOISE, seed=1)


class TestCountsRecord:
    def test_validates_total(self):
        with pytest.raises(ValueError):
            CountsRecord(n_pp=1, n_pm=1, n_mp=1, n_mm=1, alpha=0.0, beta=0.0, pairs_total=5)

    def test_correlation(self):
        rec = CountsRecord(n_pp=40, n_pm=10, n_mp=10, n_mm=40, alpha=0.0, beta=0.0, pairs_total=100)
        assert rec.correlation() == pytest.approx(0.6, abs=1e-15)


class TestEstimateS:
    def test_noiseless_hits_quantum_ceiling(self):
        est = estimate_s(math.pi / 4, 0.0, 100_000, NO_NOISE, seed=2024)
        assert est.std_err > 0.0
        assert abs(est.s_hat - 2 * SQRT2) < 5 * est.std_err

    def test_zero_visibility_estimates_zero(self):
        noise = NoiseModel(visibility=0.0, accidental_fraction=0.0)
        est = estimate_s(math.pi / 4, 0.0, 100_000, noise, seed=3)
        assert abs(est.s_hat) < 5 * est.std_err

    def test_visibility_scales_s(self):
        noise = NoiseModel(visibility=0.8, accidental_fraction=0.0)
        est = estimate_s(math.pi / 4, 0.0, 1_000_000, noise, seed=4)
        assert abs(est.s_hat - 0.8 * 2 * SQRT2) < 5 * est.std_err

    def test_consistency_over_seeds(self):
        target = s_parameter(math.pi / 8, 0.3)
        hits = 0
        for seed in range(50):
            est = estimate_s(math.pi / 8, 0.3, 10_000, NO_NOISE, seed=seed)
            if abs(est.s_hat - target) < 5 * est.std_err:
                hits += 1
        assert hits >= 49

    def test_consistency_large_sample(self):
        # 200 noiseless replications at 1e6 pairs per setting; the 5-sigma
        # band must hold in at least 99% of them.
        target = s_parameter(math.pi / 8, 0.3)
        hits = 0
        for seed in range(200):
            est = estimate_s(math.pi / 8, 0.3, 1_000_000, NO_NOISE, seed=seed)
            if abs(est.s_hat - target) < 5 * est.std_err:
                hits += 1
        assert hits >= 198

    def test_counts_attached_per_setting(self):
        est = estimate_s(0.7, 0.2, 500, NoiseModel(), seed=6)
        assert isinstance(est, SEstimate)
        assert len(est.counts) == 4
        assert all(rec.pairs_total == 500 for rec in est.counts)

    def test_std_err_combines_setting_variances(self):
        est = estimate_s(0.7, 0.2, 500, NoiseModel(), seed=6)
        expected = math.sqrt(
            sum((1.0 - rec.correlation() ** 2) / rec.pairs_total for rec in est.counts)
        )
        assert est.std_err == pytest.approx(expected, abs=1e-15)

    def test_deterministic(self):
        a = estimate_s(0.9, 0.1, 2000, NoiseModel(), seed=11)
        b = estimate_s(0.9, 0.1, 2000, NoiseModel(), seed=11)
        assert a.s_hat == b.s_hat and a.std_err == b.std_err

    def test_settings_use_independent_derived_seeds(self):
        # Each setting must reproduce standalone from its derived seed, so
        # settings can run concurrently and merge in index order.
        from chshlab.chsh import settings_quartet
        from chshlab.rng import derive_seed

        theta, xi, pairs, seed = 0.9, 0.1, 2000, 11
        noise = NoiseModel()
        est = estimate_s(theta, xi, pairs, noise, seed=seed)
        q = settings_quartet(theta)
        rho = noisy_state(prepare_via_hwp(xi), noise)
        plan = ((q.a1, q.b1), (q.a2, q.b1), (q.a1, q.b2), (q.a2, q.b2))
        for index, (a, b) in enumerate(plan):
            rec = run_setting(rho, a, b, pairs, noise, derive_seed(seed, index))
            got = est.counts[index]
            assert (rec.n_pp, rec.n_pm, rec.n_mp, rec.n_mm) == (
                got.n_pp,
                got.n_pm,
                got.n_mp,
                got.n_mm,
            )

    def test_rejects_single_pair(self):
        with pytest.raises(ValueError):
            estimate_s(0.5, 0.1, 1, NoiseModel(), seed=0)
