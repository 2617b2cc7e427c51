import math

import numpy as np
import pytest

from anyonloc.hamiltonian import (DisorderRealization, build_single,
                                  build_two_walker, sample_disorder)
from anyonloc.lattice import PairBasis, TorusLattice, pair_distances_from
from anyonloc.spectra import (LocalizationReport, StateFit,
                              aggregate_localization, diagonalize,
                              disorder_averaged_length,
                              fit_localization_length,
                              hamiltonian_localization_length,
                              localization_report, localization_samples,
                              locate_peak)


@pytest.fixture(scope="module")
def basis8():
    return PairBasis(TorusLattice(8))


def planted_vector(basis, peak_index, l0):
    d = pair_distances_from(basis, basis.pair_of(peak_index))
    v = np.exp(-d / (2 * l0))
    return v / np.linalg.norm(v)


class TestDiagonalize:
    def test_two_by_two(self):
        d = sample_disorder(3, 0.0, 1.0, 1.0, seed=0)
        H = build_single(d)
        H.matrix = np.array([[2.0, 0.5], [0.5, 2.0]])
        eig = diagonalize(H)
        np.testing.assert_allclose(eig.eigenvalues, [1.5, 2.5], atol=1e-12)

    def test_clean_band(self):
        d = sample_disorder(3, J=0.5, gamma=0.0, h=1.0, seed=0)
        eig = diagonalize(build_single(d))
        expected = np.sort([0.5 + 4.0, *(0.5 + 1.0,) * 4, *(0.5 - 2.0,) * 4])
        np.testing.assert_allclose(np.sort(eig.eigenvalues), expected,
                                   rtol=1e-10, atol=1e-10)

    def test_residual_invariants_random_matrix(self):
        rng = np.random.default_rng(1)
        A = rng.normal(size=(50, 50))
        d = sample_disorder(3, 0.0, 1.0, 1.0, seed=0)
        H = build_single(d)
        H.matrix = A + A.T
        eig = diagonalize(H)
        V = eig.eigenvectors
        assert np.abs(V.T @ V - np.eye(50)).max() <= 1e-9
        res = np.abs(H.matrix @ V - V * eig.eigenvalues).max()
        assert res <= 1e-8 * np.abs(eig.eigenvalues).max()

    def test_rejects_non_symmetric(self):
        d = sample_disorder(3, 0.0, 1.0, 1.0, seed=0)
        H = build_single(d)
        H.matrix = np.arange(9.0).reshape(3, 3)
        with pytest.raises(ValueError):
            diagonalize(H)


class TestLocatePeak:
    def test_one_hot(self, basis8):
        v = np.zeros(basis8.dimension)
        v[17] = 1.0
        assert locate_peak(v, basis8) == 17

    def test_uniform_ties_break_low(self, basis8):
        v = np.ones(basis8.dimension) / math.sqrt(basis8.dimension)
        assert locate_peak(v, basis8) == 0

    def test_planted_peak(self, basis8):
        v = planted_vector(basis8, 321, 2.0)
        assert locate_peak(v, basis8) == 321

    def test_zero_vector(self, basis8):
        with pytest.raises(ValueError):
            locate_peak(np.zeros(basis8.dimension), basis8)


class TestFitLocalizationLength:
    @pytest.mark.parametrize("l0", [0.5, 1.0, 1.5, 2.0, 3.0])
    def test_planted_exponential_within_5_percent(self, basis8, l0):
        v = planted_vector(basis8, 100, l0)
        fit = fit_localization_length(v, 100, basis8)
        assert not fit.delocalized
        assert abs(fit.l - l0) <= 0.05 * l0

    def test_planted_satisfies_envelope_inequality(self, basis8):
        # |amp| <= 3 A exp(-d / 2l) with A the fitted intercept
        v = planted_vector(basis8, 100, 1.5)
        fit = fit_localization_length(v, 100, basis8)
        d = pair_distances_from(basis8, basis8.pair_of(100))
        bound = 3.0 * fit.intercept * np.exp(-d / (2 * fit.l))
        assert np.all(np.abs(v) <= bound)

    def test_uniform_vector_flagged(self, basis8):
        v = np.ones(basis8.dimension) / math.sqrt(basis8.dimension)
        fit = fit_localization_length(v, 0, basis8)
        assert fit.delocalized
        assert "slope" in fit.reason

    def test_one_hot_flagged_insufficient_bins(self, basis8):
        v = np.zeros(basis8.dimension)
        v[0] = 1.0
        fit = fit_localization_length(v, 0, basis8)
        assert fit.delocalized
        assert fit.n_bins < 3
        assert "bins" in fit.reason

    def test_sign_flip_gauge_invariance(self, basis8):
        v = planted_vector(basis8, 50, 1.2)
        a = fit_localization_length(v, 50, basis8)
        b = fit_localization_length(-v, 50, basis8)
        assert a.l == b.l

    def test_long_length_flagged_delocalized(self, basis8):
        # decay so slow the fitted length exceeds half the lattice span
        v = planted_vector(basis8, 50, 40.0)
        fit = fit_localization_length(v, 50, basis8)
        assert fit.delocalized
        assert "span" in fit.reason


def make_report(ls, deloc_flags):
    fits = [StateFit(state=i, peak=(0, 1), l=l, slope=-1.0, slope_stderr=0.0,
                     intercept=1.0, n_bins=5, delocalized=f)
            for i, (l, f) in enumerate(zip(ls, deloc_flags))]
    n = sum(deloc_flags)
    localized = [l for l, f in zip(ls, deloc_flags) if not f]
    return LocalizationReport(fits=fits, l=max(localized) if localized else None,
                              delocalized=n > 0,
                              fraction_delocalized=n / len(fits),
                              dimension=len(fits))


class TestHamiltonianLength:
    def test_max_rule(self):
        rep = make_report([0.5, 1.0, 2.0], [False, False, False])
        assert hamiltonian_localization_length(rep) == 2.0

    def test_delocalized_state_flags_hamiltonian(self):
        rep = make_report([0.5, None, 2.0], [False, True, False])
        assert rep.delocalized
        assert hamiltonian_localization_length(rep) == 2.0

    def test_single_state(self):
        rep = make_report([0.7], [False])
        assert hamiltonian_localization_length(rep) == 0.7

    def test_empty_and_all_delocalized(self):
        with pytest.raises(ValueError):
            hamiltonian_localization_length(
                LocalizationReport([], None, False, 0.0, 0))
        with pytest.raises(ValueError):
            hamiltonian_localization_length(make_report([None], [True]))


class TestLocalizationReport:
    def test_disordered_small_lattice(self):
        d = sample_disorder(4, 0.0, 60.0, 1.0, seed=(7, 0))
        rep = localization_report(diagonalize(build_two_walker(d)))
        assert len(rep.fits) == 120
        assert not rep.delocalized
        assert rep.l > 0
        assert rep.l == hamiltonian_localization_length(rep)

    def test_offset_invariance(self):
        d = sample_disorder(4, 0.0, 60.0, 1.0, seed=(7, 0))
        shifted = DisorderRealization(L=4, J=2.5, gamma=d.gamma, h=d.h,
                                      seed=d.seed, J_v=d.J_v + 2.5)
        r1 = localization_report(diagonalize(build_two_walker(d)))
        r2 = localization_report(diagonalize(build_two_walker(shifted)))
        for a, b in zip(r1.fits, r2.fits):
            assert a.delocalized == b.delocalized
            if not a.delocalized:
                assert abs(a.l - b.l) <= 1e-9

    def test_json_serializable(self):
        import json
        d = sample_disorder(3, 0.0, 40.0, 1.0, seed=1)
        rep = localization_report(diagonalize(build_two_walker(d)))
        obj = json.loads(rep.to_json())
        assert obj["dimension"] == 36
        assert len(obj["states"]) == 36

    def test_requires_pair_basis(self):
        d = sample_disorder(3, 0.0, 40.0, 1.0, seed=1)
        with pytest.raises(ValueError):
            localization_report(diagonalize(build_single(d)))


class TestDisorderAveraging:
    def test_single_sample_has_no_stderr(self):
        mean, stderr, frac = disorder_averaged_length(4, 60.0, 1, master_seed=7)
        assert mean > 0
        assert stderr is None

    def test_clean_system_fully_delocalized(self):
        results = localization_samples(4, 0.0, 2, master_seed=0)
        _, _, frac = aggregate_localization(results)
        assert frac == 1.0
        with pytest.raises(ValueError):
            disorder_averaged_length(4, 0.0, 2, master_seed=0)

    def test_monotone_decrease_with_disorder(self):
        # stronger disorder localizes harder; 2-sigma over 20 samples
        m1, s1, _ = disorder_averaged_length(6, 50.0, 20, master_seed=0)
        m2, s2, _ = disorder_averaged_length(6, 100.0, 20, master_seed=0)
        assert m2 < m1
        assert (m1 - m2) > 2.0 * math.hypot(s1, s2)

    def test_deterministic_given_seed(self):
        a = disorder_averaged_length(4, 60.0, 3, master_seed=5)
        b = disorder_averaged_length(4, 60.0, 3, master_seed=5)
        assert a == b
