"""Empirical survival curves and the Pearson chi-square engine."""

import numpy as np
import pytest

from lomaxmix import (
    CountSample,
    DomainError,
    InsufficientResolutionError,
    MixtureModel,
    ValidationError,
    chi_square_test,
    empirical_ccdf,
    mixture_ccdf,
    sample_mixture,
)
from lomaxmix.gof import chi_square_statistic, chi_square_survival


def single(b, v):
    return MixtureModel.from_parameters([1.0], [b], [v])


class TestEmpiricalCcdf:
    def test_hand_counted(self):
        emp = empirical_ccdf(CountSample(np.array([1, 1, 2, 4])))
        assert emp.points == ((1, 1.0), (2, 0.5), (4, 0.25))

    def test_single_value(self):
        emp = empirical_ccdf(CountSample(np.array([7])))
        assert emp.points == ((7, 1.0),)

    def test_close_to_model_ccdf(self):
        # Dvoretzky-Kiefer-Wolfowitz: 1e5 draws stay within 0.01 of the model
        model = MixtureModel.from_parameters([0.6, 0.4], [1.5, 12.0], [1.1, 2.5])
        data = sample_mixture(model, 10**5, seed=29)
        emp = empirical_ccdf(data)
        ks = emp.ks()
        gap = np.abs(emp.fractions() - mixture_ccdf(model, ks))
        assert gap.max() < 0.01

    def test_monotone_and_normalized(self):
        data = sample_mixture(single(3.0, 1.0), 5000, seed=2)
        emp = empirical_ccdf(data)
        fr = emp.fractions()
        assert fr[0] == 1.0
        assert np.all(np.diff(fr) < 0.0)
        ks, counts = data.distinct()
        assert fr[-1] == counts[-1] / data.size


class TestChiSquareStatistic:
    def test_zero_when_equal(self):
        obs = np.array([10.0, 20.0, 30.0])
        assert chi_square_statistic(obs, obs) == 0.0
        assert chi_square_survival(0.0, 5) == 1.0

    def test_textbook_quantile(self):
        # upper tail of chi-square(5) at 11.0705 is 5%
        p = chi_square_survival(11.0705, 5)
        assert abs(p - 0.05) < 1e-4

    def test_survival_decreasing_in_statistic(self):
        ps = [chi_square_survival(x, 7) for x in np.linspace(0.1, 60.0, 200)]
        assert all(a > b for a, b in zip(ps, ps[1:]))

    def test_validates(self):
        with pytest.raises(DomainError):
            chi_square_survival(-1.0, 5)
        with pytest.raises(DomainError):
            chi_square_survival(1.0, 0)
        with pytest.raises(DomainError):
            chi_square_statistic([1.0], [0.0])


class TestChiSquareTest:
    def test_bin_construction(self):
        model = single(2.0, 1.5)
        data = sample_mixture(model, 10**4, seed=3)
        rep = chi_square_test(model, data, n_params=0, alpha=0.1)
        assert rep.bins[0].k_lo == 1
        assert rep.bins[-1].k_hi is None
        for left, right in zip(rep.bins[:-1], rep.bins[1:]):
            assert left.k_hi == right.k_lo
        assert all(b.expected >= 5.0 for b in rep.bins)
        assert sum(b.observed for b in rep.bins) == data.size
        np.testing.assert_allclose(
            sum(b.expected for b in rep.bins), data.size, atol=1e-6
        )
        assert rep.dof == len(rep.bins) - 1 - rep.n_params

    def test_true_model_not_rejected(self):
        model = single(2.0, 1.5)
        data = sample_mixture(model, 10**5, seed=11)
        rep = chi_square_test(model, data, n_params=0, alpha=0.001)
        assert not rep.rejected

    def test_alpha_is_a_parameter(self):
        model = single(2.0, 1.5)
        data = sample_mixture(model, 10**4, seed=5)
        lo = chi_square_test(model, data, n_params=0, alpha=1e-9)
        hi = chi_square_test(model, data, n_params=0, alpha=0.999999)
        assert lo.alpha == 1e-9 and hi.alpha == 0.999999
        assert not lo.rejected
        assert hi.rejected
        assert (lo.rejected == (lo.p_value < lo.alpha))
        assert (hi.rejected == (hi.p_value < hi.alpha))

    def test_representation_and_order_invariance(self):
        model = single(1.5, 1.2)
        values = sample_mixture(model, 4000, seed=6).values
        rng = np.random.default_rng(0)
        shuffled = values.copy()
        rng.shuffle(shuffled)
        ks, counts = CountSample(values).distinct()
        weighted = CountSample(ks, weights=counts)
        reps = [
            chi_square_test(model, CountSample(values), 0, 0.05),
            chi_square_test(model, CountSample(shuffled), 0, 0.05),
            chi_square_test(model, weighted, 0, 0.05),
        ]
        assert reps[0].chi2 == reps[1].chi2 == reps[2].chi2
        assert reps[0].p_value == reps[1].p_value == reps[2].p_value

    def test_too_small_sample(self):
        model = single(1.0, 1.0)
        with pytest.raises(ValidationError):
            chi_square_test(model, CountSample(np.arange(1, 11)), 0, 0.05)

    def test_insufficient_bins(self):
        # nearly all model mass at k = 1: only the tail bin survives merging
        model = single(0.01, 5.0)
        data = CountSample(np.ones(60, dtype=np.int64))
        with pytest.raises(InsufficientResolutionError):
            chi_square_test(model, data, n_params=0, alpha=0.05)

    def test_dof_exhausted_by_parameters(self):
        model = single(2.0, 1.5)
        data = sample_mixture(model, 200, seed=9)
        rep = chi_square_test(model, data, n_params=0, alpha=0.05)
        with pytest.raises(InsufficientResolutionError):
            chi_square_test(model, data, n_params=len(rep.bins) - 1, alpha=0.05)
