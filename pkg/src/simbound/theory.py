"""Closed-form guarantees in terms of a similarity cover.

These are the Chernoff-style counterparts of :mod:`simbound.bounds`: cheap
to evaluate and valid for arbitrary (non-symmetric) query families, but
much looser in the practical regime.  Values are returned raw; clip to
``[0, 1]`` only when presenting them as probabilities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "TheoremInputs",
    "lemma1_bound",
    "thm1_eq4",
    "thm1_eq5_eps",
    "thm1_eq5_ceiling",
    "thm1_eq6_check",
    "corollary_adaptive",
    "NOT_APPLICABLE",
]

NOT_APPLICABLE = None


def _eta_from_growth(eps: float, log_growth: float) -> float:
    # 1 - eps / (4 (e^g - 1)); the correction underflows to 0 for huge g
    if log_growth > 700.0:
        return 1.0
    return 1.0 - eps / (4.0 * math.expm1(log_growth))


@dataclass(frozen=True)
class TheoremInputs:
    """``k`` queries, a cover of size ``n_eta`` at similarity ``eta``, test size ``n``."""

    n: int
    k: int
    n_eta: int
    eta: float
    delta: float = 0.05
    eps: float = 0.0

    def __post_init__(self):
        for name in ("n", "k", "n_eta"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be at least 1")
        if not 0.0 <= self.eta <= 1.0:
            raise DomainError("eta must lie in [0, 1]")
        if not 0.0 < self.delta <= 1.0:
            raise DomainError("delta must lie in (0, 1]")
        if self.eps < 0.0:
            raise DomainError("eps must be nonnegative")


def lemma1_bound(n: int, p1: float, p_neg1: float, t: float) -> float:
    """Tail bound for the mean of i.i.d. variables valued in {-1, 0, 1}.

    Bounds ``P(mean > p1 - p_neg1 + t)`` by
    ``exp(-(n t / 2) ln(1 + t / (2 p1)))``, where ``p1`` and ``p_neg1`` are
    the probabilities of +1 and -1.  Requires ``p1 - p_neg1 + t/2 >= 0``.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    if p1 < 0 or p_neg1 < 0 or p1 + p_neg1 > 1.0 + 1e-12:
        raise DomainError("p1 and p_neg1 must be probabilities with p1 + p_neg1 <= 1")
    if t < 0:
        raise DomainError("t must be nonnegative")
    if p1 - p_neg1 + t / 2.0 < 0:
        raise DomainError("need p1 - p_neg1 + t/2 >= 0")
    if t == 0:
        return 1.0
    if p1 == 0:
        return 0.0
    return math.exp(-(n * t / 2.0) * math.log1p(t / (2.0 * p1)))


def _second_term_exponent(n: int, eps: float, eta: float) -> float:
    # (n eps / 4) ln(1 + eps / (4 (1 - eta))); +inf at eta = 1
    if eps == 0:
        return 0.0
    if eta >= 1.0:
        return math.inf
    return (n * eps / 4.0) * math.log1p(eps / (4.0 * (1.0 - eta)))


def thm1_eq4(inputs: TheoremInputs) -> float:
    """``2 N e^{-n eps^2 / 2} + 2 k e^{-(n eps / 4) ln(1 + eps / (4 (1 - eta)))}``."""
    n, eps = inputs.n, inputs.eps
    first = 2.0 * inputs.n_eta * math.exp(-n * eps * eps / 2.0)
    second = 2.0 * inputs.k * math.exp(-_second_term_exponent(n, eps, inputs.eta))
    return first + second


def thm1_eq5_ceiling(n: int, k: int, n_eta: int, delta: float) -> float:
    """Largest ``eta`` for which :func:`thm1_eq5_eps` applies."""
    return 1.0 - max(2.0 * math.log(4.0 * k / delta) / n,
                     math.sqrt(math.log(4.0 * n_eta / delta) / (2.0 * n)))


def thm1_eq5_eps(n: int, k: int, n_eta: int, eta: float, delta: float):
    """Deviation certified with probability ``1 - delta``, or ``None`` when ``eta`` is too large.

    Returns ``max(sqrt(2 ln(4N/delta)/n), sqrt(32 (1 - eta) ln(4k/delta)/n))``.
    """
    TheoremInputs(n, k, n_eta, eta, delta)
    if eta > thm1_eq5_ceiling(n, k, n_eta, delta):
        return NOT_APPLICABLE
    return max(math.sqrt(2.0 * math.log(4.0 * n_eta / delta) / n),
               math.sqrt(32.0 * (1.0 - eta) * math.log(4.0 * k / delta) / n))


def thm1_eq6_check(n: int, k: int, n_eta: int, delta: float) -> tuple[float, float]:
    """``(eps, eta_threshold)``: similarity at least the threshold certifies ``eps``.

    ``eps = sqrt(ln((2N + 1)/delta)/n)``, independent of ``k`` as long as
    ``eta >= 1 - eps / (4 (e^{2 eps} (2k)^{4/(n eps)} - 1))``.
    """
    TheoremInputs(n, k, n_eta, 0.0, delta)
    eps = math.sqrt(math.log((2.0 * n_eta + 1.0) / delta) / n)
    log_growth = 2.0 * eps + (4.0 / (n * eps)) * math.log(2.0 * k)
    return eps, _eta_from_growth(eps, log_growth)


def corollary_adaptive(n: int, k: int, alpha: float, delta: float) -> tuple[float, float, float]:
    """Guarantee for ``k`` adaptively chosen queries answered by exact empirical means.

    Returns ``(eps, eta_required, log_cover_budget)``: if the analyst's
    reachable queries admit an ``eta_required`` cover of size at most
    ``exp(log_cover_budget) = (n + 1)^{k^{1 - alpha}}``, every answer is
    within ``eps`` with probability ``1 - delta``.
    """
    if not 0.0 <= alpha <= 1.0:
        raise DomainError("alpha must lie in [0, 1]")
    if n < 1 or k < 1:
        raise DomainError("n and k must be at least 1")
    if not 0.0 < delta <= 1.0:
        raise DomainError("delta must lie in (0, 1]")
    budget = k ** (1.0 - alpha) * math.log(n + 1.0)
    eps = math.sqrt(4.0 * (budget + math.log(2.0 / delta)) / n)
    eta = _eta_from_growth(eps, eps * k**alpha)
    return eps, eta, budget
