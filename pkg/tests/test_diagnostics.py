import math

import numpy as np
import pytest

from colgibbs import autocovariance, fit, fit_report, max_run_length, raftery_lewis
from colgibbs.diagnostics import PilotTooShortError


class TestFit:
    def test_exact(self):
        x = np.array([1.0, 2.0, 3.0])
        assert fit(x, x) == 100.0

    def test_zero_estimate(self):
        x = np.array([1.0, -2.0])
        assert np.isclose(fit(x, np.zeros(2)), 0.0)

    def test_three_four_five(self):
        assert np.isclose(fit(np.array([3.0, 4.0]), np.array([3.0, 0.0])), 20.0)

    def test_can_be_negative(self):
        assert fit(np.array([1.0]), np.array([5.0])) < 0

    def test_scale_covariance(self):
        rng = np.random.default_rng(0)
        x, xh = rng.standard_normal(10), rng.standard_normal(10)
        assert np.isclose(fit(x, xh), fit(3.7 * x, 3.7 * xh))
        assert np.isclose(fit(x, xh), fit(-2.0 * x, -2.0 * xh))

    def test_zero_reference(self):
        with pytest.raises(ValueError):
            fit(np.zeros(3), np.ones(3))

    def test_report_subsets(self):
        truth = np.array([1.0, 2.0, 3.0, 4.0])
        est = np.array([1.0, 2.0, 0.0, 0.0])
        rep = fit_report(truth, est, [0, 1], [2, 3])
        assert rep.fit_col == 100.0
        assert np.isclose(rep.fit_ind, 0.0)


class TestAutocovariance:
    def test_iid_lag1_near_zero(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(100_000)
        acov = autocovariance(x, 1)
        assert abs(acov[1]) < 0.01

    def test_ar1_ratio(self):
        rng = np.random.default_rng(2)
        T, phi = 200_000, 0.9
        x = np.empty(T)
        x[0] = rng.standard_normal()
        for t in range(1, T):
            x[t] = phi * x[t - 1] + rng.standard_normal()
        acov = autocovariance(x, 3)
        assert abs(acov[1] / acov[0] - phi) < 0.02
        assert abs(acov[2] / acov[1] - phi) < 0.02

    def test_constant_series(self):
        acov = autocovariance(np.full(100, 3.3), 2)
        assert acov[0] == 0.0

    def test_biased_normalization(self):
        x = np.array([1.0, -1.0, 1.0, -1.0])
        acov = autocovariance(x, 1)
        assert np.isclose(acov[0], 1.0)
        assert np.isclose(acov[1], -0.75)


def reference_run_length(x, q, r, s, eps=1e-3):
    """Independent transliteration of the canonical two-state procedure."""
    from scipy.stats import norm
    x = np.asarray(x, dtype=float)
    phi = norm.ppf(0.5 * (1 + s))
    u = np.quantile(x, q)
    z = (x <= u).astype(int)
    k = 0
    while True:
        k += 1
        zk = z[::k]
        t3 = np.zeros((2, 2, 2))
        for a, b, c in zip(zk[:-2], zk[1:-1], zk[2:]):
            t3[a, b, c] += 1
        g2 = 0.0
        for a in range(2):
            for b in range(2):
                for c in range(2):
                    if t3[a, b, c] > 0:
                        fitted = (t3[a, b, :].sum() * t3[:, b, c].sum()
                                  / t3[:, b, :].sum())
                        g2 += 2 * t3[a, b, c] * math.log(t3[a, b, c] / fitted)
        if g2 - 2 * math.log(len(zk) - 2) < 0:
            break
    pairs = np.zeros((2, 2))
    for a, b in zip(zk[:-1], zk[1:]):
        pairs[a, b] += 1
    alpha = pairs[0, 1] / pairs[0].sum()
    beta = pairs[1, 0] / pairs[1].sum()
    m_burn = math.ceil(math.log(eps * (alpha + beta) / max(alpha, beta))
                       / math.log(abs(1 - alpha - beta))) * k
    keep = math.ceil((2 - alpha - beta) * alpha * beta * phi ** 2
                     / ((alpha + beta) ** 3 * r ** 2)) * k
    return m_burn, m_burn + keep


class TestRafteryLewis:
    def test_iid_total_near_lower_bound(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(50_000)
        rep = raftery_lewis(x)
        assert rep.n_min == 235  # ceil of q(1-q) (phi/r)^2 = 234.09
        assert abs(rep.total - 234.09) < 0.1 * 234.09
        assert rep.dependence < 1.3

    def test_constant_trace_degenerate(self):
        with pytest.raises(PilotTooShortError):
            raftery_lewis(np.full(500, 2.0))

    def test_too_short(self):
        with pytest.raises(PilotTooShortError):
            raftery_lewis(np.arange(5.0))

    def test_strong_ar1_needs_many_samples(self):
        rng = np.random.default_rng(4)
        T, phi = 20_000, 0.95
        x = np.empty(T)
        x[0] = 0.0
        for t in range(1, T):
            x[t] = phi * x[t - 1] + rng.standard_normal()
        rep = raftery_lewis(x)
        assert rep.total >= 10 * rep.n_min

    def test_matches_reference_implementation(self):
        rng = np.random.default_rng(5)
        T, phi = 5_000, 0.8
        x = np.empty(T)
        x[0] = 0.0
        for t in range(1, T):
            x[t] = phi * x[t - 1] + rng.standard_normal()
        rep = raftery_lewis(x)
        m_ref, n_ref = reference_run_length(x, 0.025, 0.02, 0.95)
        assert rep.burn_in == m_ref
        assert rep.total == n_ref

    def test_monotone_in_autocorrelation(self):
        rng = np.random.default_rng(6)
        totals = []
        for phi in (0.0, 0.5, 0.9):
            x = np.empty(30_000)
            x[0] = 0.0
            for t in range(1, 30_000):
                x[t] = phi * x[t - 1] + rng.standard_normal()
            totals.append(raftery_lewis(x).total)
        assert totals[0] <= totals[1] <= totals[2]

    def test_absorbing_indicator_reports_infinite(self):
        # ones clustered at the start: no 0 -> 1 transitions
        x = np.concatenate([np.zeros(6), np.ones(194)])
        rep = raftery_lewis(x, q=0.025)
        assert math.isinf(rep.total)


class TestMaxRunLength:
    def test_maxima_over_columns(self):
        rng = np.random.default_rng(7)
        iid = rng.standard_normal((5_000, 2))
        ar = np.empty(5_000)
        ar[0] = 0.0
        for t in range(1, 5_000):
            ar[t] = 0.9 * ar[t - 1] + rng.standard_normal()
        cols = np.column_stack([iid, ar])
        m_max, n_max = max_run_length(cols)
        assert n_max >= raftery_lewis(ar).total

    def test_all_degenerate_raises(self):
        with pytest.raises(PilotTooShortError):
            max_run_length(np.ones((200, 3)))
