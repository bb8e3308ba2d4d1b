import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from penning_tomo.analysis import oracle_wigner
from penning_tomo.errors import ConstraintError, TomographyError
from penning_tomo.fock import coherent_state, fock_state, odd_cat_state
from penning_tomo.grids import PointGrid, square_grid
from penning_tomo.measurement import OhtProtocol, OhtRecord, run_protocol, sample_quadrature
from penning_tomo.oht import MarginalSet, analytic_marginals, build_marginals, default_r_max, inverse_radon

S = -0.25
GRID = square_grid(3.0, 21)


def rel_rmse(est, ref):
    return np.sqrt(np.mean((est - ref) ** 2)) / np.max(np.abs(ref))


@pytest.fixture(scope="module")
def vacuum_marginals():
    return analytic_marginals(fock_state(0), 64)


@pytest.fixture(scope="module")
def cat_marginals():
    return analytic_marginals(odd_cat_state(1.5), 64)


class TestBuildMarginals:
    def test_vacuum_histogram_mean(self):
        rec = sample_quadrature(fock_state(0), 0.0, 1000, seed=0)
        m = build_marginals([rec], 64, (-6, 6))
        mean = np.sum(m.centers * m.densities[0]) * m.bin_width
        assert abs(mean) <= 0.15

    def test_single_sample_two_bins(self):
        with pytest.warns(UserWarning):
            m = build_marginals([OhtRecord(0.0, np.array([0.0]), 0)], 2, (-1, 1))
        # x = 0 falls in the upper bin [0, 1]
        assert m.densities[0].tolist() == [0.0, 1.0]
        assert m.densities[0].sum() * m.bin_width == 1.0

    def test_duplicate_phase(self):
        a = OhtRecord(0.5, np.array([0.0, 1.0]), 0)
        b = OhtRecord(0.5, np.array([0.2]), 1)
        with pytest.raises(TomographyError):
            build_marginals([a, b])

    def test_empty(self):
        with pytest.raises(TomographyError):
            build_marginals([])

    def test_clipped_mass_reported(self):
        rec = OhtRecord(0.0, np.array([-7.0, 0.0, 0.5, 9.0]), 0)
        m = build_marginals([rec], 16, (-6, 6))
        assert m.clipped[0] == 0.5
        assert m.densities[0].sum() * m.bin_width == pytest.approx(1.0, abs=1e-12)

    def test_phases_sorted(self):
        recs = [OhtRecord(p, np.array([0.1]), 0) for p in (2.0, 0.1, 1.0)]
        m = build_marginals(recs, 16)
        assert m.phases.tolist() == [0.1, 1.0, 2.0]

    @given(seed=st.integers(0, 1000), n_bins=st.integers(16, 128))
    @settings(max_examples=20, deadline=None)
    def test_histograms_normalised(self, seed, n_bins):
        recs = run_protocol(odd_cat_state(1.5), OhtProtocol(3, 200), 1.0, seed)
        m = build_marginals(recs, n_bins)
        assert np.allclose(m.densities.sum(axis=1) * m.bin_width, 1.0, atol=1e-9)


class TestMarginalSet:
    def test_rejects_unsorted_phases(self):
        with pytest.raises(TomographyError):
            MarginalSet([1.0, 0.5], [0, 1], [[1.0], [1.0]], [0, 0])

    def test_rejects_nonuniform_bins(self):
        with pytest.raises(TomographyError):
            MarginalSet([0.0], [0, 1, 3], [[0.5, 0.25]], [0])

    def test_rejects_unnormalised(self):
        with pytest.raises(TomographyError):
            MarginalSet([0.0], [0, 1, 2], [[0.5, 0.6]], [0])

    def test_analytic_marginals_normalised(self, cat_marginals):
        assert np.allclose(cat_marginals.densities.sum(axis=1) * cat_marginals.bin_width, 1.0, atol=1e-12)


class TestInverseRadon:
    def test_vacuum_origin(self, vacuum_marginals):
        w = inverse_radon(vacuum_marginals, S, PointGrid.from_points([0])).values[0]
        ref = oracle_wigner(fock_state(0), PointGrid.from_points([0]), S).values[0]
        assert ref == pytest.approx(2 / (1 - S))
        assert w == pytest.approx(ref, rel=0.02)

    def test_zero_marginals_give_zero(self):
        m = MarginalSet(np.arange(8) * np.pi / 8, np.linspace(-6, 6, 65), np.zeros((8, 64)), np.zeros(8))
        assert np.all(inverse_radon(m, S, GRID).values == 0)

    @settings(max_examples=10, deadline=None)
    @given(weight=st.floats(0, 1), a=st.floats(-1.5, 1.5), b=st.floats(-1.5, 1.5))
    def test_linearity(self, weight, a, b):
        ma = analytic_marginals(coherent_state(a), 16, 128, (-6, 6), sub=2)
        mb = analytic_marginals(coherent_state(1j * b), 16, 128, (-6, 6), sub=2)
        grid = square_grid(2.0, 7)
        mixed = inverse_radon(ma.mixed_with(mb, weight), S, grid).values
        separate = weight * inverse_radon(ma, S, grid).values + (1 - weight) * inverse_radon(mb, S, grid).values
        assert np.allclose(mixed, separate, rtol=0, atol=1e-12)

    @pytest.mark.parametrize("delta", [0.3, 5 * np.pi / 64, 1.0, 2.9])
    def test_phase_shift_covariance(self, cat_marginals, delta):
        pts = GRID.points()
        a = inverse_radon(cat_marginals, S, PointGrid.from_points(pts)).values
        b = inverse_radon(cat_marginals.rotated(delta), S, PointGrid.from_points(pts * np.exp(1j * delta))).values
        assert np.max(np.abs(a - b)) <= 1e-10

    def test_convergence_monotone(self, vacuum_marginals):
        ref = oracle_wigner(fock_state(0), GRID, S).values
        errs = []
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for r_max, n_r in [(6, 64), (9, 128), (12, 192), (15, 256), (21, 512), (25, 1024)]:
                errs.append(rel_rmse(inverse_radon(vacuum_marginals, S, GRID, r_max, n_r).values, ref))
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 0.01

    def test_odd_cat_analytic(self, cat_marginals):
        ref = oracle_wigner(odd_cat_state(1.5), GRID, S)
        w = inverse_radon(cat_marginals, S, GRID)
        assert rel_rmse(w.values, ref.values) < 0.01
        assert w.value_at(0) < 0

    def test_imaginary_residue_small_on_sampled_data(self):
        recs = run_protocol(odd_cat_state(1.5), OhtProtocol(27, 1000), 1.0, 3)
        w = inverse_radon(build_marginals(recs), S, GRID)
        assert w.meta["imag_residue"] < 1e-2 * np.max(np.abs(w.values))
        assert np.all(np.isfinite(w.values))

    def test_meta(self, vacuum_marginals):
        w = inverse_radon(vacuum_marginals, S, GRID)
        assert w.meta["method"] == "OHT"
        assert w.meta["s"] == S
        assert w.meta["r_max"] == pytest.approx(default_r_max(S))
        assert w.meta["n_phases"] == 64

    def test_default_r_max(self):
        assert default_r_max(-0.25) == pytest.approx(21.02, abs=0.01)
        assert np.exp(-0.25 * default_r_max(-0.25) ** 2 / 8) == pytest.approx(1e-6)

    @pytest.mark.parametrize("s", [0.0, 0.5])
    def test_nonnegative_s_rejected(self, vacuum_marginals, s):
        with pytest.raises(ConstraintError, match="s < 0"):
            inverse_radon(vacuum_marginals, s, GRID)

    def test_short_r_grid_warns(self, vacuum_marginals):
        with pytest.warns(UserWarning, match="not decayed"):
            inverse_radon(vacuum_marginals, S, GRID, r_max=3.0)

    def test_coarse_r_grid_rejected(self, vacuum_marginals):
        with pytest.raises(ConstraintError):
            inverse_radon(vacuum_marginals, S, GRID, n_r=32)
