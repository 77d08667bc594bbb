import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from simbound import numerics as nm
from simbound.errors import DomainError
from simbound.oracle import enumerate_binom_cdf


def mp_cdf(n, p, m, dps=60):
    # exact-rational-style reference: sum of pmf terms at high precision
    with mpmath.workdps(dps):
        p = mpmath.mpf(p)
        if m < 0:
            return mpmath.mpf(0)
        m = min(m, n)
        lo_side = m <= n * p
        rng = range(0, m + 1) if lo_side else range(m + 1, n + 1)
        s = mpmath.fsum(mpmath.binomial(n, x) * p**x * (1 - p) ** (n - x) for x in rng)
        return s if lo_side else 1 - s


def rel_err(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


class TestLogBinomCoeff:
    def test_small(self):
        assert nm.log_binom_coeff(5, 0) == 0.0
        assert nm.log_binom_coeff(4, 2) == pytest.approx(math.log(6), rel=1e-15)

    def test_big_against_exact_integer(self):
        exact = math.comb(50000, 25000)
        ref = float(mpmath.log(mpmath.mpf(exact)))
        assert rel_err(nm.log_binom_coeff(50000, 25000), ref) <= 1e-13

    @pytest.mark.parametrize("n,j", [(-1, 0), (3, 4), (3, -1)])
    def test_domain(self, n, j):
        with pytest.raises(DomainError):
            nm.log_binom_coeff(n, j)


class TestBinomTails:
    def test_examples(self):
        assert nm.binom_cdf(2, 0.5, 1) == pytest.approx(0.75, abs=1e-15)
        assert nm.binom_cdf(10, 0.3, 3) == pytest.approx(0.6496107184, abs=1e-10)
        assert nm.binom_cdf(1, 0.7, -1) == 0.0
        assert nm.binom_sf(3, 0.5, 0) == 1.0
        assert nm.binom_sf(10, 0.3, 4) == pytest.approx(0.3503892816, abs=1e-10)
        assert nm.binom_sf(10, 0.0, 1) == 0.0

    def test_edges(self):
        assert nm.binom_cdf(7, 0.4, 7) == 1.0
        assert nm.binom_cdf(7, 0.4, 100) == 1.0
        assert nm.binom_logcdf(7, 0.4, -1) == -math.inf
        assert nm.binom_cdf(5, 1.0, 4) == 0.0
        assert nm.binom_sf(5, 1.0, 5) == 1.0
        assert nm.binom_cdf(0, 0.3, 0) == 1.0

    @pytest.mark.parametrize("p", [-0.1, 1.5, float("nan")])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            nm.binom_cdf(10, p, 3)

    def test_matches_enumeration_small_n(self):
        worst = 0.0
        for n in range(0, 21):
            for p in np.arange(1, 10) / 10:
                for m in range(-1, n + 2):
                    worst = max(worst, abs(nm.binom_cdf(n, float(p), m)
                                           - enumerate_binom_cdf(n, float(p), m)))
        assert worst <= 1e-14

    @pytest.mark.parametrize("n,p,m", [
        (50000, 0.244, 12000), (50000, 0.244, 12700), (50000, 0.244, 11700),
        (50000, 0.244, 11000), (1000, 0.03, 5), (1000, 0.03, 70),
        (100000, 0.5, 49000), (200, 0.999, 190), (3000, 1e-4, 4),
    ])
    def test_against_mpmath(self, n, p, m):
        ref = mp_cdf(n, p, m)
        got_cdf = nm.binom_logcdf(n, p, m)
        got_sf = nm.binom_logsf(n, p, m + 1)
        assert rel_err(math.exp(got_cdf), float(ref)) <= 1e-12
        assert rel_err(math.exp(got_sf), float(1 - ref)) <= 1e-12

    def test_deep_tail_log_accuracy(self):
        # result ~1e-250: only the log form can represent it faithfully
        n, p, m = 20000, 0.5, 6000
        with mpmath.workdps(50):
            ref = float(mpmath.log(mp_cdf(n, p, m, dps=50)))
        assert rel_err(nm.binom_logcdf(n, p, m), ref) <= 1e-12

    def test_complement_identity_random(self):
        rng = np.random.default_rng(20240601)
        for _ in range(1000):
            n = int(rng.integers(1, 100_001))
            p = float(rng.uniform())
            m = int(rng.integers(0, n + 1))
            total = nm.binom_cdf(n, p, m - 1) + nm.binom_sf(n, p, m)
            assert abs(total - 1.0) <= 1e-12, (n, p, m)

    def test_agrees_with_scipy(self):
        rng = np.random.default_rng(7)
        n = rng.integers(1, 5000, 200)
        p = rng.uniform(0.001, 0.999, 200)
        m = (rng.uniform(size=200) * n).astype(int)
        for ni, pi, mi in zip(n, p, m):
            ref = stats.binom.cdf(mi, ni, pi)
            if ref > 1e-250:
                assert rel_err(nm.binom_cdf(int(ni), float(pi), int(mi)), ref) <= 1e-9

    def test_vectorized(self):
        m = np.arange(-2, 12)
        out = nm.binom_cdf(10, 0.3, m)
        assert out.shape == m.shape
        assert np.all(np.diff(out) >= 0)
        assert out[0] == 0.0 and out[-1] == 1.0

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 20000), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_monotone_in_m(self, n, p, frac):
        m = int(frac * n)
        a, b = nm.binom_logcdf(n, p, m), nm.binom_logcdf(n, p, m + 1)
        assert b >= a - 1e-12 * abs(a)


class TestLogHelpers:
    def test_logsumexp(self):
        assert nm.logsumexp([]) == -math.inf
        assert nm.logsumexp([-math.inf, -math.inf]) == -math.inf
        assert nm.logsumexp([math.log(0.25), math.log(0.5)]) == pytest.approx(math.log(0.75), rel=1e-15)
        assert nm.logsumexp([-1000.0, -1000.0]) == pytest.approx(-1000 + math.log(2), rel=1e-15)

    def test_log1mexp(self):
        with mpmath.workdps(50):
            for x in (-1e-20, -1e-5, -0.5, -3.0, -50.0):
                ref = float(mpmath.log(-mpmath.expm1(mpmath.mpf(x))))
                assert nm.log1mexp(x) == pytest.approx(ref, rel=1e-13)
        assert nm.log1mexp(-math.inf) == 0.0

    def test_counts_snap(self):
        assert nm.ceil_count(50000 * (0.244 + 0.01)) == 12700
        assert nm.floor_count(50000 * (0.244 - 0.01)) == 11700
        assert nm.ceil_count(2.5) == 3
        assert nm.floor_count(2.5) == 2


class TestTwoSided:
    def test_trivial(self):
        assert nm.two_sided_dev_tail(1, 0.5, 0.6) == 0.0
        assert nm.two_sided_dev_tail(1, 0.5, 0.4) == 1.0
        assert nm.two_sided_dev_tail(10, 0.3, 0.0) == 1.0

    def test_headline(self):
        v = nm.two_sided_dev_tail(50000, 0.244, 0.01)
        assert math.floor(0.05 / v) == 257397

    def test_convention(self):
        n, p, eps = 50000, 0.244, 0.01
        lo, hi = nm.deviation_counts(n, p, eps)
        assert (lo, hi) == (11699, 12700)
        expected = nm.binom_sf(n, p, 12700) + nm.binom_cdf(n, p, 11699)
        assert nm.two_sided_dev_tail(n, p, eps) == pytest.approx(expected, rel=1e-14)

    def test_monotone_in_eps(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = int(rng.integers(1, 3000))
            p = float(rng.uniform())
            eps = np.sort(rng.uniform(0, 0.5, 10))
            vals = [nm.two_sided_dev_tail(n, p, float(e)) for e in eps]
            assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))

    def test_matches_enumeration(self):
        for n in range(1, 25):
            for p in (0.1, 0.244, 0.5, 0.8):
                for eps in (0.0, 0.05, 0.1, 0.3):
                    xs = np.arange(n + 1)
                    lo, hi = nm.deviation_counts(n, p, eps)
                    bad = (xs >= hi) | (xs <= lo)
                    ref = math.fsum(math.comb(n, int(x)) * p**x * (1 - p) ** (n - x) for x in xs[bad])
                    assert nm.two_sided_dev_tail(n, p, eps) == pytest.approx(ref, abs=1e-14)

    def test_deterministic(self):
        a = nm.two_sided_dev_logtail(50000, 0.244, 0.01)
        b = nm.two_sided_dev_logtail(50000, 0.244, 0.01)
        assert a == b
