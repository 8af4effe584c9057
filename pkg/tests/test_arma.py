import datetime as dt
import math

import numpy as np
import pytest

from volcast.arma import ArmaFit, ArmaOrder, fit_arma, select_arma
from volcast.errors import InsufficientDataError, ValidationError
from volcast.timeseries import ReturnKind, ReturnSeries


def make_returns(values, start=dt.date(2015, 1, 1)):
    values = np.asarray(values, dtype=float)
    dates = tuple(start + dt.timedelta(days=i) for i in range(values.size))
    return ReturnSeries(dates=dates, values=values, kind=ReturnKind.LOG, source_symbol="T")


def simulate_ar1(phi, n, seed, mean=0.0):
    rng = np.random.default_rng(seed)
    x = np.empty(n)
    x[0] = mean + rng.normal()
    for t in range(1, n):
        x[t] = mean * (1 - phi) + phi * x[t - 1] + rng.normal()
    return x


def simulate_ma1(theta, n, seed):
    rng = np.random.default_rng(seed)
    eps = rng.normal(size=n + 1)
    return eps[1:] + theta * eps[:-1]


class TestOrder:
    def test_validation(self):
        with pytest.raises(ValidationError):
            ArmaOrder(p=-1, d=0, q=0, intercept=False)
        with pytest.raises(ValidationError):
            ArmaOrder(p=0, d=1, q=0, intercept=False)
        with pytest.raises(ValidationError):
            ArmaOrder(p=6, d=0, q=0, intercept=False)

    def test_param_count_includes_variance(self):
        assert ArmaOrder(p=0, d=0, q=0, intercept=False).n_params == 1
        assert ArmaOrder(p=1, d=0, q=1, intercept=True).n_params == 4


class TestFit:
    def test_identity_model_is_noop(self):
        rng = np.random.default_rng(1)
        series = make_returns(rng.normal(size=200))
        fit = fit_arma(series, ArmaOrder(p=0, d=0, q=0, intercept=False))
        np.testing.assert_array_equal(fit.residuals.values, series.values)
        assert fit.residuals.dates == series.dates
        assert fit.ar_coeffs.size == 0
        assert fit.ma_coeffs.size == 0
        assert fit.intercept_value == 0.0

    def test_identity_loglik_is_iid_gaussian(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=300)
        fit = fit_arma(make_returns(x), ArmaOrder(p=0, d=0, q=0, intercept=False))
        sigma2 = np.mean(x**2)
        expected = -0.5 * sum(
            math.log(2 * math.pi * sigma2) + v**2 / sigma2 for v in x
        )
        assert fit.loglik == pytest.approx(expected, abs=1e-8)

    def test_intercept_only_recovers_mean(self):
        rng = np.random.default_rng(3)
        x = rng.normal(loc=3.0, size=500)
        fit = fit_arma(make_returns(x), ArmaOrder(p=0, d=0, q=0, intercept=True))
        assert fit.intercept_value == pytest.approx(3.0, abs=0.15)
        assert fit.intercept_value == pytest.approx(np.mean(x), abs=1e-12)
        assert np.mean(fit.residuals.values) == pytest.approx(0.0, abs=1e-12)

    def test_ar1_recovery(self):
        x = simulate_ar1(0.7, 5000, seed=11)
        fit = fit_arma(make_returns(x), ArmaOrder(p=1, d=0, q=0, intercept=False))
        assert fit.ar_coeffs[0] == pytest.approx(0.7, abs=0.05)

    def test_ar1_recovery_with_intercept(self):
        x = simulate_ar1(0.6, 5000, seed=13, mean=2.0)
        fit = fit_arma(make_returns(x), ArmaOrder(p=1, d=0, q=0, intercept=True))
        assert fit.ar_coeffs[0] == pytest.approx(0.6, abs=0.05)

    def test_ma1_recovery(self):
        x = simulate_ma1(0.5, 5000, seed=17)
        fit = fit_arma(make_returns(x), ArmaOrder(p=0, d=0, q=1, intercept=False))
        assert fit.ma_coeffs[0] == pytest.approx(0.5, abs=0.05)

    def test_residual_length_equals_input(self):
        x = simulate_ar1(0.5, 400, seed=19)
        for order in (
            ArmaOrder(p=2, d=0, q=0, intercept=True),
            ArmaOrder(p=1, d=0, q=1, intercept=False),
        ):
            fit = fit_arma(make_returns(x), order)
            assert len(fit.residuals) == 400

    def test_information_criteria_identities(self):
        x = simulate_ar1(0.5, 600, seed=23)
        fit = fit_arma(make_returns(x), ArmaOrder(p=1, d=0, q=1, intercept=True))
        k = 1 + 1 + 1 + 1  # p + q + intercept + innovation variance
        assert fit.aic == pytest.approx(2 * k - 2 * fit.loglik, abs=1e-8)
        assert fit.bic == pytest.approx(k * math.log(600) - 2 * fit.loglik, abs=1e-8)

    def test_too_short(self):
        x = np.random.default_rng(0).normal(size=30)
        with pytest.raises(InsufficientDataError):
            fit_arma(make_returns(x), ArmaOrder(p=1, d=0, q=1, intercept=False))

    def test_ar_residuals_are_one_step_errors(self):
        x = simulate_ar1(0.7, 1000, seed=29)
        fit = fit_arma(make_returns(x), ArmaOrder(p=1, d=0, q=0, intercept=False))
        phi = fit.ar_coeffs[0]
        expected = x.copy()
        expected[1:] = x[1:] - phi * x[:-1]
        np.testing.assert_allclose(fit.residuals.values, expected, atol=1e-12)

    def test_to_dict_round_trips_fields(self):
        x = simulate_ar1(0.4, 500, seed=31)
        fit = fit_arma(make_returns(x), ArmaOrder(p=1, d=0, q=0, intercept=True))
        d = fit.to_dict()
        assert d["order"] == {"p": 1, "d": 0, "q": 0, "intercept": True}
        assert d["loglik"] == fit.loglik
        assert len(d["ar_coeffs"]) == 1
        assert d["candidates_evaluated"] == 1


class TestSelect:
    def test_white_noise_selects_identity(self):
        rng = np.random.default_rng(101)
        series = make_returns(rng.normal(size=2790))
        fit = select_arma(series)
        assert (fit.order.p, fit.order.q, fit.order.intercept) == (0, 0, False)

    def test_white_noise_selection_across_seeds(self):
        hits = 0
        for seed in range(20):
            rng = np.random.default_rng(7000 + seed)
            fit = select_arma(make_returns(rng.normal(size=2790)))
            hits += (fit.order.p, fit.order.q, fit.order.intercept) == (0, 0, False)
        assert hits >= 18

    def test_ar1_selects_positive_p(self):
        x = simulate_ar1(0.8, 3000, seed=41)
        fit = select_arma(make_returns(x))
        assert fit.order.p >= 1

    def test_winner_beats_all_candidates(self):
        x = simulate_ar1(0.5, 1500, seed=43)
        log = []
        fit = select_arma(make_returns(x), candidate_log=log)
        assert len(log) == fit.candidates_evaluated
        finite = [bic for _, bic in log if bic is not None]
        assert finite, "no candidate succeeded"
        assert fit.bic <= min(finite) + 1e-12

    def test_bic_identity_on_winner(self):
        rng = np.random.default_rng(47)
        fit = select_arma(make_returns(rng.normal(size=1200)))
        k = fit.order.n_params
        assert fit.bic == pytest.approx(k * math.log(fit.n) - 2 * fit.loglik, abs=1e-8)

    def test_candidates_evaluated_counts_fits(self):
        rng = np.random.default_rng(53)
        fit = select_arma(make_returns(rng.normal(size=1200)))
        # two starting orders times two intercept variants, plus neighbors
        assert fit.candidates_evaluated >= 4

    def test_aic_criterion_accepted(self):
        rng = np.random.default_rng(59)
        fit = select_arma(make_returns(rng.normal(size=1200)), criterion="aic")
        assert fit.order.p <= 5

    def test_bad_criterion_rejected(self):
        rng = np.random.default_rng(61)
        with pytest.raises(ValidationError):
            select_arma(make_returns(rng.normal(size=1200)), criterion="hqic")

    def test_too_short_for_largest_candidate(self):
        rng = np.random.default_rng(67)
        with pytest.raises(InsufficientDataError):
            select_arma(make_returns(rng.normal(size=100)))
