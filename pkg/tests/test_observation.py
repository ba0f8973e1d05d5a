"""Tests for the per-sensor observation models."""

import math

import numpy as np
import pytest

from src.models.observation import Bernoulli, GaussianMeanShift, ObservationModel
from src.utils.errors import DomainError

MODELS = [GaussianMeanShift(1.0), GaussianMeanShift(-0.5), Bernoulli(0.3, 0.7), Bernoulli(0.6, 0.2)]


class TestKlNumbers:
    def test_gaussian(self):
        assert GaussianMeanShift(1.0).kl_numbers() == pytest.approx((0.5, 0.5))

    def test_bernoulli(self):
        i0, i1 = Bernoulli(0.3, 0.7).kl_numbers()
        expected = 0.7 * math.log(7 / 3) + 0.3 * math.log(3 / 7)
        assert i1 == pytest.approx(expected, rel=1e-12)
        assert i1 == pytest.approx(0.3390, abs=1e-4)
        assert i0 == pytest.approx(i1, rel=1e-12)

    def test_gaussian_symmetric_in_mu(self):
        assert GaussianMeanShift(0.8).kl_numbers() == GaussianMeanShift(-0.8).kl_numbers()

    @pytest.mark.parametrize("model", MODELS)
    def test_positive_and_finite(self, model):
        for value in model.kl_numbers():
            assert math.isfinite(value) and value > 0.0


class TestSecondMoment:
    def test_gaussian(self):
        assert GaussianMeanShift(1.0).llr_second_moment() == pytest.approx(1.25)

    def test_bernoulli(self):
        on, off = math.log(7 / 3), math.log(3 / 7)
        expected = 0.7 * on * on + 0.3 * off * off
        assert Bernoulli(0.3, 0.7).llr_second_moment() == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(0.7179, abs=1e-4)

    @pytest.mark.parametrize("model", MODELS + [GaussianMeanShift(3.0), GaussianMeanShift(0.1)])
    def test_dominates_squared_mean(self, model):
        """Jensen: E_1[Z^2] >= (E_1[Z])^2."""
        assert model.llr_second_moment() >= model.kl_numbers()[1] ** 2


class TestLlrIncrement:
    def test_gaussian_formula(self):
        model = GaussianMeanShift(2.0)
        assert model.llr_increment(1.5) == pytest.approx(2.0 * 1.5 - 2.0)

    def test_bernoulli_values(self):
        model = Bernoulli(0.3, 0.7)
        assert model.llr_increment(1.0) == pytest.approx(math.log(7 / 3))
        assert model.llr_increment(0.0) == pytest.approx(math.log(3 / 7))

    def test_bernoulli_rejects_non_binary(self):
        with pytest.raises(DomainError):
            Bernoulli(0.3, 0.7).llr_increment(0.5)

    @pytest.mark.parametrize("model", MODELS)
    def test_deterministic(self, model):
        x = model.sample(True, np.random.default_rng(3))
        assert model.llr_increment(x) == model.llr_increment(x)

    @pytest.mark.parametrize("model", MODELS)
    def test_mean_matches_kl_numbers(self, model):
        """Average LLR over 10^6 draws is I_1 under f_1 and -I_0 under f_0, within 4 SE."""
        rng = np.random.default_rng(20240611)
        n = 1_000_000
        i0, i1 = model.kl_numbers()
        llr = np.vectorize(model.llr_increment, otypes=[float])
        for under_h1, target in ((True, i1), (False, -i0)):
            values = llr(model.sample_block(under_h1, rng, n))
            standard_error = values.std(ddof=1) / math.sqrt(n)
            assert abs(values.mean() - target) <= 4.0 * standard_error


class TestSampling:
    @pytest.mark.parametrize("model", MODELS)
    def test_block_equals_successive_draws(self, model):
        block = model.sample_block(True, np.random.default_rng(11), 64)
        rng = np.random.default_rng(11)
        single = [model.sample(True, rng) for _ in range(64)]
        np.testing.assert_array_equal(block, single)

    def test_bernoulli_draws_are_binary(self):
        draws = Bernoulli(0.3, 0.7).sample_block(False, np.random.default_rng(0), 1000)
        assert set(np.unique(draws)) <= {0.0, 1.0}


class TestValidation:
    @pytest.mark.parametrize("mu", [0.0, math.inf, math.nan])
    def test_gaussian_rejects_degenerate_mu(self, mu):
        with pytest.raises(DomainError):
            GaussianMeanShift(mu)

    @pytest.mark.parametrize("p0,p1", [(0.0, 0.5), (0.5, 1.0), (0.4, 0.4), (-0.1, 0.5)])
    def test_bernoulli_rejects_bad_probabilities(self, p0, p1):
        with pytest.raises(DomainError):
            Bernoulli(p0, p1)

    def test_domain_error_is_a_value_error(self):
        with pytest.raises(ValueError):
            GaussianMeanShift(0.0)


class TestFromDict:
    @pytest.mark.parametrize("model", MODELS)
    def test_to_dict_inverts(self, model):
        assert ObservationModel.from_dict(model.to_dict()) == model

    def test_integer_parameters_accepted(self):
        assert ObservationModel.from_dict({"kind": "gaussian_mean_shift", "mu": 1}).mu == 1.0

    def test_unknown_kind(self):
        with pytest.raises(DomainError, match="unknown model kind"):
            ObservationModel.from_dict({"kind": "poisson", "rate": 1.0})

    def test_non_string_kind(self):
        with pytest.raises(DomainError, match="unknown model kind"):
            ObservationModel.from_dict({"kind": ["gaussian_mean_shift"], "mu": 1.0})

    def test_missing_parameter(self):
        with pytest.raises(DomainError, match="bad parameters"):
            ObservationModel.from_dict({"kind": "bernoulli", "p0": 0.3})

    def test_non_numeric_parameter(self):
        with pytest.raises(DomainError, match="non-numeric"):
            ObservationModel.from_dict({"kind": "gaussian_mean_shift", "mu": "big"})

    def test_out_of_range_parameter(self):
        with pytest.raises(DomainError):
            ObservationModel.from_dict({"kind": "bernoulli", "p0": 0.3, "p1": 1.7})
