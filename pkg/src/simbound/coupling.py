"""Joint laws of two 0/1 losses and their factorization through Bernoulli variables.

Two losses with error rates ``p1``, ``p2`` and agreement probability ``eta``
have exactly one joint law.  When their errors are non-negatively
correlated that law equals the law of ``(X1 W, X2 W)`` for independent
Bernoulli ``X1``, ``X2``, ``W``.  ``W = 0`` marks an example nobody gets
wrong; given ``W = 1`` the two models err independently.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    CouplingInfeasibleError,
    DomainError,
    InfeasibleTripleError,
    NaiveBayesInfeasibleError,
)

__all__ = [
    "PairwiseJoint",
    "CouplingParams",
    "NaiveBayesParams",
    "joint_from_marginals",
    "factorize",
    "nb_params",
    "independence_similarity",
]

CLAMP_TOL = 1e-12


def independence_similarity(p1: float, p2: float) -> float:
    """Agreement of two losses that err independently with rates ``p1``, ``p2``."""
    return p1 * p2 + (1.0 - p1) * (1.0 - p2)


def _clamp_unit(x: float, what: str, exc=InfeasibleTripleError) -> float:
    if x < -CLAMP_TOL or x > 1.0 + CLAMP_TOL:
        raise exc(f"{what} = {x!r} lies outside [0, 1]")
    return min(max(x, 0.0), 1.0)


def _check_unit(x: float, name: str) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {x!r}")
    return x


@dataclass(frozen=True)
class PairwiseJoint:
    p1: float
    p2: float
    eta: float
    p11: float
    p10: float
    p01: float
    p00: float

    @property
    def cells(self) -> tuple[float, float, float, float]:
        return self.p11, self.p10, self.p01, self.p00

    def complement(self) -> "PairwiseJoint":
        """Law of ``(1 - q1, 1 - q2)``: error rates flip, agreement is unchanged."""
        return PairwiseJoint(
            1.0 - self.p1, 1.0 - self.p2, self.eta,
            self.p00, self.p01, self.p10, self.p11,
        )

    @property
    def positively_correlated(self) -> bool:
        return self.p11 >= self.p1 * self.p2 - CLAMP_TOL


@dataclass(frozen=True)
class CouplingParams:
    px1: float
    px2: float
    pw: float

    @property
    def cells(self) -> tuple[float, float, float, float]:
        """``(p11, p10, p01, p00)`` of the induced pair ``(X1 W, X2 W)``."""
        a, b, w = self.px1, self.px2, self.pw
        p11 = w * a * b
        p10 = w * a * (1 - b)
        p01 = w * (1 - a) * b
        return p11, p10, p01, 1.0 - p11 - p10 - p01


@dataclass(frozen=True)
class NaiveBayesParams:
    mu: float
    eta: float
    px: float
    pw: float


def joint_from_marginals(p1: float, p2: float, eta: float) -> PairwiseJoint:
    """Cell probabilities of the pair with error rates ``p1``, ``p2`` and agreement ``eta``.

    Raises :class:`InfeasibleTripleError` when a cell would leave ``[0, 1]``
    by more than ``1e-12``; smaller excursions are clamped.
    """
    p1 = _check_unit(p1, "p1")
    p2 = _check_unit(p2, "p2")
    eta = _check_unit(eta, "eta")
    p11 = _clamp_unit((p1 + p2 + eta - 1.0) / 2.0, "p11")
    p10 = _clamp_unit((1.0 + p1 - p2 - eta) / 2.0, "p10")
    p01 = _clamp_unit((1.0 + p2 - p1 - eta) / 2.0, "p01")
    p00 = _clamp_unit((1.0 + eta - p1 - p2) / 2.0, "p00")
    return PairwiseJoint(p1, p2, eta, p11, p10, p01, p00)


def factorize(joint: PairwiseJoint) -> CouplingParams:
    """Bernoulli parameters with ``(X1 W, X2 W)`` distributed as ``joint``.

    Requires ``p11 >= p1 p2``.  Degenerate margins (an error rate of 0) are
    handled by setting the matching ``X`` parameter to 0.
    """
    p11, p10, p01, _ = joint.cells
    m1, m2 = p10 + p11, p01 + p11
    if p11 < m1 * m2 - CLAMP_TOL:
        raise CouplingInfeasibleError(
            f"errors are negatively correlated (p11={p11:.6g} < p1*p2={m1 * m2:.6g})"
        )
    if m1 == 0.0 or m2 == 0.0:
        # one query never errs; W can carry the other alone
        return CouplingParams(1.0 if m1 > 0 else 0.0, 1.0 if m2 > 0 else 0.0, max(m1, m2))
    if p11 == 0.0:
        raise CouplingInfeasibleError("p11 = 0 with both error rates positive")
    px1 = min(p11 / m2, 1.0)
    px2 = min(p11 / m1, 1.0)
    pw = min(m1 * m2 / p11, 1.0)
    return CouplingParams(px1, px2, pw)


def nb_params(mu: float, eta: float) -> NaiveBayesParams:
    """Invert ``mu = px pw`` and ``eta = 1 - 2 pw px (1 - px)`` for ``(px, pw)``."""
    mu = _check_unit(mu, "mu")
    eta = _check_unit(eta, "eta")
    if mu <= 0.0:
        raise NaiveBayesInfeasibleError("mu must be positive")
    floor = 1.0 - 2.0 * mu * (1.0 - mu)
    if eta < floor - CLAMP_TOL:
        raise NaiveBayesInfeasibleError(
            f"eta={eta!r} is below the independence level {floor!r} for mu={mu!r}"
        )
    px = 1.0 - (1.0 - eta) / (2.0 * mu)
    if px <= 0.0 or px > 1.0 + CLAMP_TOL:
        raise NaiveBayesInfeasibleError(f"no Naive Bayes structure: px = {px!r}")
    px = min(px, 1.0)
    pw = mu / px
    if pw > 1.0:
        if pw > 1.0 + CLAMP_TOL:
            raise NaiveBayesInfeasibleError(f"no Naive Bayes structure: pw = {pw!r}")
        pw = 1.0
    return NaiveBayesParams(mu, eta, px, pw)
