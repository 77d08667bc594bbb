"""Log-space binomial machinery.

Everything here works on natural-log probabilities so that tails far below
the double-precision underflow threshold can still be multiplied and summed.
Point masses use Loader's saddle-point expansion (``stirlerr`` + ``bd0``),
which keeps the relative error of ``log_binom_pmf`` near machine precision
even for ``n`` in the millions.  Tail masses are obtained from the continued
fraction of the regularized incomplete beta function, anchored on that
accurate point mass.

All public functions broadcast over numpy arrays in ``n`` and ``m``.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

__all__ = [
    "LOG_ZERO",
    "log_binom_coeff",
    "log_binom_pmf",
    "binom_logcdf",
    "binom_logsf",
    "binom_cdf",
    "binom_sf",
    "log1mexp",
    "logsumexp",
    "deviation_counts",
    "floor_count",
    "ceil_count",
    "two_sided_dev_logtail",
    "two_sided_dev_tail",
]

LOG_ZERO = -math.inf

_LN_2PI = math.log(2.0 * math.pi)
_CF_EPS = 1e-15
_CF_MAXIT = 10_000
_FPMIN = 1e-300
# Relative slack when rounding n*(p +/- eps) to an integer count.  Decimal
# inputs like 0.244 + 0.01 must land on 12700 for n = 50000, not 12699.999...
_ROUND_TOL = 1e-9


# --------------------------------------------------------------------------
# Scalar / array helpers
# --------------------------------------------------------------------------

def logsumexp(logs) -> float:
    """Stable ``log(sum(exp(logs)))``; empty or all ``-inf`` input gives ``-inf``."""
    arr = np.asarray(logs, dtype=float).ravel()
    if arr.size == 0:
        return LOG_ZERO
    top = arr.max()
    if top == -np.inf:
        return LOG_ZERO
    return float(top + math.log(math.fsum(np.exp(arr - top))))


def log1mexp(x):
    """``log(1 - exp(x))`` for ``x <= 0`` without cancellation."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    near = x > -math.log(2.0)
    with np.errstate(divide="ignore"):
        out[near] = np.log(-np.expm1(x[near]))
        out[~near] = np.log1p(-np.exp(x[~near]))
    return out if out.ndim else float(out)


def floor_count(x: float) -> int:
    """``floor`` that treats values within rounding noise of an integer as that integer."""
    r = round(x)
    if abs(x - r) <= _ROUND_TOL * max(1.0, abs(x)):
        return int(r)
    return math.floor(x)


def ceil_count(x: float) -> int:
    """``ceil`` counterpart of :func:`floor_count`."""
    r = round(x)
    if abs(x - r) <= _ROUND_TOL * max(1.0, abs(x)):
        return int(r)
    return math.ceil(x)


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise DomainError(f"success probability must lie in [0, 1], got {p!r}")
    return p


def _check_counts(n, name="n"):
    n = np.asarray(n)
    if n.dtype.kind == "f":
        if np.any(n != np.floor(n)):
            raise DomainError(f"{name} must be integer-valued")
        n = n.astype(np.int64)
    elif n.dtype.kind not in "iu":
        raise DomainError(f"{name} must be integer-valued")
    if np.any(n < 0):
        raise DomainError(f"{name} must be nonnegative")
    return n.astype(np.int64)


def _as_int(m, name="m"):
    m = np.asarray(m)
    if m.dtype.kind == "f":
        if np.any(m != np.floor(m)):
            raise DomainError(f"{name} must be integer-valued")
    elif m.dtype.kind not in "iu":
        raise DomainError(f"{name} must be integer-valued")
    return m.astype(np.int64)


def _maybe_scalar(out):
    return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# Point masses
# --------------------------------------------------------------------------

def log_binom_coeff(n: int, j: int) -> float:
    """``ln C(n, j)`` through ``lgamma``."""
    if n < 0 or j < 0 or j > n:
        raise DomainError(f"need 0 <= j <= n, got n={n}, j={j}")
    if j == 0 or j == n:
        return 0.0
    return math.lgamma(n + 1) - math.lgamma(j + 1) - math.lgamma(n - j + 1)


_STIRLERR_TABLE = np.array(
    [0.0] + [math.lgamma(k + 1.0) - (k + 0.5) * math.log(k) + k - 0.5 * _LN_2PI
             for k in range(1, 16)]
)


def _stirlerr(k: np.ndarray) -> np.ndarray:
    # ln(k!) - ln(sqrt(2 pi k) (k/e)^k) for integer k >= 0
    k = np.asarray(k, dtype=np.int64)
    out = np.empty(k.shape, dtype=float)
    small = k <= 15
    out[small] = _STIRLERR_TABLE[k[small]]
    big = ~small
    if np.any(big):
        x = k[big].astype(float)
        xx = x * x
        s0, s1, s2, s3, s4 = 1 / 12, 1 / 360, 1 / 1260, 1 / 1680, 1 / 1188
        v = np.where(
            x > 500, (s0 - s1 / xx) / x,
            np.where(
                x > 80, (s0 - (s1 - s2 / xx) / xx) / x,
                np.where(
                    x > 35, (s0 - (s1 - (s2 - s3 / xx) / xx) / xx) / x,
                    (s0 - (s1 - (s2 - (s3 - s4 / xx) / xx) / xx) / xx) / x,
                ),
            ),
        )
        out[big] = v
    return out


def _bd0(x: np.ndarray, np_: np.ndarray) -> np.ndarray:
    # x ln(x/np) + np - x, with a series when x is close to np
    x = np.asarray(x, dtype=float)
    np_ = np.broadcast_to(np.asarray(np_, dtype=float), x.shape)
    out = np.empty(x.shape, dtype=float)
    close = np.abs(x - np_) < 0.1 * (x + np_)
    far = ~close
    if np.any(far):
        xf, mf = x[far], np_[far]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out[far] = np.where(xf > 0, xf * np.log(xf / mf), 0.0) + mf - xf
    if np.any(close):
        xc, mc = x[close], np_[close]
        v = (xc - mc) / (xc + mc)
        s = (xc - mc) * v
        ej = 2.0 * xc * v
        v2 = v * v
        active = np.ones(s.shape, dtype=bool)
        j = 1
        while np.any(active) and j < 1000:
            ej = ej * v2
            s1 = s + ej / (2 * j + 1)
            active = s1 != s
            s = s1
            j += 1
        out[close] = s
    return out


def log_binom_pmf(n, p: float, x):
    """``ln P(X = x)`` for ``X ~ Binomial(n, p)``; out-of-support gives ``-inf``."""
    p = _check_p(p)
    n = _check_counts(n)
    x = _as_int(x, "x")
    n, x = np.broadcast_arrays(n, x)
    out = np.full(n.shape, -np.inf)
    inside = (x >= 0) & (x <= n)
    q = 1.0 - p
    if p == 0.0:
        out[inside & (x == 0)] = 0.0
        return _maybe_scalar(out)
    if p == 1.0:
        out[inside & (x == n)] = 0.0
        return _maybe_scalar(out)
    lo = inside & (x == 0)
    hi = inside & (x == n) & (n > 0)
    out[lo] = n[lo] * math.log1p(-p)
    out[hi] = n[hi] * math.log(p)
    mid = inside & (x > 0) & (x < n)
    if np.any(mid):
        nm, xm = n[mid], x[mid]
        nf, xf = nm.astype(float), xm.astype(float)
        lc = (_stirlerr(nm) - _stirlerr(xm) - _stirlerr(nm - xm)
              - _bd0(xf, nf * p) - _bd0(nf - xf, nf * q))
        lf = _LN_2PI + np.log(xf) + np.log1p(-xf / nf)
        out[mid] = lc - 0.5 * lf
    return _maybe_scalar(out)


# --------------------------------------------------------------------------
# Tails
# --------------------------------------------------------------------------

def _log_betacf(a: np.ndarray, b: np.ndarray, x: np.ndarray):
    """Modified Lentz evaluation of the incomplete-beta continued fraction.

    Returns ``(log cf, converged mask)``.
    """
    a = a.astype(float)
    b = b.astype(float)
    x = np.broadcast_to(x, a.shape).astype(float)
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(a)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
    d = 1.0 / d
    h = d.copy()
    active = np.ones(a.shape, dtype=bool)
    idx = np.arange(a.size)
    for m in range(1, _CF_MAXIT + 1):
        if not active.any():
            break
        sel = idx[active]
        aa_, bb_, xx_ = a[sel], b[sel], x[sel]
        cc, dd, hh = c[sel], d[sel], h[sel]
        m2 = 2.0 * m
        num = m * (bb_ - m) * xx_ / ((qam[sel] + m2) * (aa_ + m2))
        dd = 1.0 + num * dd
        dd = np.where(np.abs(dd) < _FPMIN, _FPMIN, dd)
        cc = 1.0 + num / cc
        cc = np.where(np.abs(cc) < _FPMIN, _FPMIN, cc)
        dd = 1.0 / dd
        hh = hh * dd * cc
        num = -(aa_ + m) * (qab[sel] + m) * xx_ / ((aa_ + m2) * (qap[sel] + m2))
        dd = 1.0 + num * dd
        dd = np.where(np.abs(dd) < _FPMIN, _FPMIN, dd)
        cc = 1.0 + num / cc
        cc = np.where(np.abs(cc) < _FPMIN, _FPMIN, cc)
        dd = 1.0 / dd
        delta = dd * cc
        hh = hh * delta
        c[sel], d[sel], h[sel] = cc, dd, hh
        done = np.abs(delta - 1.0) < _CF_EPS
        active[sel[done]] = False
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(h), ~active


def _log_upper_direct(n: int, p: float, m: int) -> float:
    # fallback: sum the pmf over [m, n] in log space
    xs = np.arange(m, n + 1)
    return logsumexp(log_binom_pmf(n, p, xs))


def _log_tails(n: np.ndarray, p: float, m: np.ndarray):
    """Return ``(ln P(X <= m), ln P(X >= m + 1))`` for interior ``0 <= m < n``.

    The continued fraction is evaluated on whichever side converges quickly,
    the other side follows by complement.
    """
    q = 1.0 - p
    nf = n.astype(float)
    # P(X >= m+1) = I_p(m+1, n-m); fast when p < (m+2)/(n+3)
    upper_direct = p < (m + 2.0) / (nf + 3.0)
    log_upper = np.empty(n.shape)
    log_lower = np.empty(n.shape)

    if np.any(upper_direct):
        nn, mm = n[upper_direct], m[upper_direct]
        a, b = mm + 1, nn - mm
        lcf, ok = _log_betacf(a, b, np.full(a.shape, p))
        lu = log_binom_pmf(nn, p, mm + 1) + math.log(q) + lcf
        lu = np.atleast_1d(lu)
        for i in np.flatnonzero(~ok):
            lu[i] = _log_upper_direct(int(nn[i]), p, int(mm[i]) + 1)
        lu = np.minimum(lu, 0.0)
        log_upper[upper_direct] = lu
        log_lower[upper_direct] = log1mexp(lu)

    other = ~upper_direct
    if np.any(other):
        nn, mm = n[other], m[other]
        # P(X <= m) = I_q(n-m, m+1)
        a, b = nn - mm, mm + 1
        lcf, ok = _log_betacf(a, b, np.full(a.shape, q))
        ll = log_binom_pmf(nn, p, mm) + math.log(p) + lcf
        ll = np.atleast_1d(ll)
        for i in np.flatnonzero(~ok):
            ni, mi = int(nn[i]), int(mm[i])
            ll[i] = log1mexp(min(_log_upper_direct(ni, p, mi + 1), 0.0))
        ll = np.minimum(ll, 0.0)
        log_lower[other] = ll
        log_upper[other] = log1mexp(ll)
    return log_lower, log_upper


def binom_logcdf(n, p: float, m):
    """``ln P(X <= m)`` for ``X ~ Binomial(n, p)``.

    ``m < 0`` gives ``-inf`` and ``m >= n`` gives ``0``.  Broadcasts over
    ``n`` and ``m``.
    """
    p = _check_p(p)
    n = _check_counts(n)
    m = _as_int(m)
    n, m = np.broadcast_arrays(n, m)
    out = np.empty(n.shape)
    out[m < 0] = -np.inf
    out[m >= n] = 0.0
    interior = (m >= 0) & (m < n)
    if np.any(interior):
        if p == 0.0:
            out[interior] = 0.0
        elif p == 1.0:
            out[interior] = -np.inf
        else:
            lower, _ = _log_tails(n[interior], p, m[interior])
            out[interior] = lower
    return _maybe_scalar(out)


def binom_logsf(n, p: float, m):
    """``ln P(X >= m)``; note the inclusive threshold (unlike scipy's ``sf``)."""
    p = _check_p(p)
    n = _check_counts(n)
    m = _as_int(m)
    n, m = np.broadcast_arrays(n, m)
    out = np.empty(n.shape)
    out[m <= 0] = 0.0
    out[m > n] = -np.inf
    interior = (m > 0) & (m <= n)
    if np.any(interior):
        if p == 0.0:
            out[interior] = -np.inf
        elif p == 1.0:
            out[interior] = 0.0
        else:
            _, upper = _log_tails(n[interior], p, m[interior] - 1)
            out[interior] = upper
    return _maybe_scalar(out)


def binom_cdf(n, p: float, m):
    return _maybe_scalar(np.exp(binom_logcdf(n, p, m)))


def binom_sf(n, p: float, m):
    """``P(X >= m)``."""
    return _maybe_scalar(np.exp(binom_logsf(n, p, m)))


# --------------------------------------------------------------------------
# Deviation events
# --------------------------------------------------------------------------

def deviation_counts(n: int, p: float, eps: float) -> tuple[int, int]:
    """Integer thresholds ``(lo, hi)`` of the deviation event for ``n`` draws.

    A count ``x`` deviates iff ``x >= hi`` or ``x <= lo``, where
    ``hi = ceil(n (p + eps))`` and ``lo = ceil(n (p - eps)) - 1``: upward
    deviations of exactly ``eps`` count, downward ones must exceed ``eps``.
    This is the convention under which 50000 draws at error 0.244 admit
    257,397 models at eps = 0.01, delta = 0.05.
    """
    hi = ceil_count(n * (p + eps))
    lo = ceil_count(n * (p - eps)) - 1
    return lo, hi


def two_sided_dev_logtail(n: int, p: float, eps: float) -> float:
    """``ln P(|X/n - p| >= eps)`` with the threshold convention of :func:`deviation_counts`."""
    if n < 1:
        raise DomainError("n must be at least 1")
    p = _check_p(p)
    if eps < 0 or math.isnan(eps):
        raise DomainError("eps must be nonnegative")
    lo, hi = deviation_counts(n, p, eps)
    if lo >= hi - 1:
        return 0.0
    parts = [binom_logsf(n, p, hi), binom_logcdf(n, p, lo)]
    return logsumexp(parts)


def two_sided_dev_tail(n: int, p: float, eps: float) -> float:
    return math.exp(two_sided_dev_logtail(n, p, eps))
