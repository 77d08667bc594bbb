"""Turning bounds into decisions: how many models fit under a failure budget."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, replace
from functools import lru_cache

from . import theory
from . import bounds
from .bounds import EnsembleSpec, bound_probability
from .errors import DomainError, InfeasibleError

__all__ = [
    "PlanQuery",
    "PlanResult",
    "GainRow",
    "max_models",
    "gains",
    "gains_to_csv",
    "gains_to_json",
    "PLAN_METHODS",
    "DEFAULT_K_CAP",
    "clear_caches",
]

PLAN_METHODS = ("standard", "similarity", "naive-bayes", "thm1")
DEFAULT_K_CAP = 10**12


@dataclass(frozen=True)
class PlanQuery:
    method: str = "standard"
    n: int = 50_000
    mu: float = 0.244
    eta: float = 0.85
    eps: float = 0.01
    delta: float = 0.05
    k_cap: int = DEFAULT_K_CAP

    def __post_init__(self):
        if self.method not in PLAN_METHODS:
            raise DomainError(f"unknown method {self.method!r}; expected one of {PLAN_METHODS}")
        if not self.eps > 0:
            raise DomainError("eps must be positive")
        if not 0.0 < self.delta <= 1.0:
            raise DomainError("delta must lie in (0, 1]")
        if self.k_cap < 1:
            raise DomainError("k_cap must be at least 1")


@dataclass(frozen=True)
class PlanResult:
    k_max: int
    saturated: bool = False
    probability: float | None = None
    diagnostic: str | None = None

    def to_dict(self, query: PlanQuery) -> dict:
        flags = []
        if self.saturated:
            flags.append("saturated")
        if self.diagnostic:
            flags.append(self.diagnostic)
        return {
            "method": query.method,
            "params": {"n": query.n, "mu": query.mu, "eta": query.eta, "eps": query.eps,
                       "delta": query.delta, "k_cap": query.k_cap},
            "value": self.k_max,
            "truncation_error": 0.0,
            "flags": flags,
        }


@lru_cache(maxsize=100_000)
def _probability(method: str, n: int, mu: float, eta: float, eps: float, k: int) -> float:
    if method == "thm1":
        # symmetric ensemble: one member covers all others, so N_eta = 1
        inputs = theory.TheoremInputs(n, k, 1, eta, eps=eps)
        return min(1.0, theory.thm1_eq4(inputs))
    res = bound_probability(method, EnsembleSpec(n, mu, eta, k), eps)
    return min(1.0, res.probability + (0.0 if res.exact else res.truncation_error))


def clear_caches() -> None:
    _probability.cache_clear()
    bounds.clear_caches()


def bound_for(query: PlanQuery, k: int) -> float:
    """Failure probability the query's method assigns to ``k`` models (cached per run)."""
    return _probability(query.method, query.n, query.mu, query.eta, query.eps, int(k))


def max_models(query: PlanQuery) -> PlanResult:
    """Largest ``k <= k_cap`` whose bound is at most ``delta``.

    Doubling brackets the answer, bisection pins it; both rely on the bound
    being nondecreasing in ``k``.
    """
    try:
        return _search(query)
    except InfeasibleError as exc:
        return PlanResult(0, diagnostic=f"infeasible: {exc}")


def _search(query: PlanQuery) -> PlanResult:
    p1 = bound_for(query, 1)
    if p1 > query.delta:
        return PlanResult(0, probability=p1, diagnostic="even one model exceeds delta")
    cap = int(query.k_cap)
    good = 1
    bad = None
    step = 2
    while bad is None:
        k = min(step, cap)
        if bound_for(query, k) <= query.delta:
            good = k
            if k == cap:
                return PlanResult(cap, saturated=True, probability=bound_for(query, cap))
            step *= 2
        else:
            bad = k
    while bad - good > 1:
        mid = (good + bad) // 2
        if bound_for(query, mid) <= query.delta:
            good = mid
        else:
            bad = mid
    return PlanResult(good, probability=bound_for(query, good))


@dataclass(frozen=True)
class GainRow:
    grid_value: float
    k_standard: int | None
    k_method: int | None
    ratio: float | None


def gains(query: PlanQuery, grid: str, values) -> list[GainRow]:
    """Ratio of testable models, ``method`` over ``standard``, along an ``eta`` or ``eps`` grid.

    Infeasible points come back with ``None`` cells.
    """
    if grid not in ("eta", "eps"):
        raise DomainError("grid must be 'eta' or 'eps'")
    rows = []
    for v in values:
        q = replace(query, **{grid: float(v)})
        std = max_models(replace(q, method="standard"))
        meth = max_models(q)
        k_std = std.k_max if std.k_max > 0 else None
        k_m = meth.k_max if meth.k_max > 0 else None
        ratio = k_m / k_std if (k_m is not None and k_std) else None
        rows.append(GainRow(float(v), k_std, k_m, ratio))
    return rows


GAIN_COLUMNS = ("grid_value", "k_standard", "k_method", "ratio")


def gains_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(GAIN_COLUMNS)
    for r in rows:
        w.writerow(["" if getattr(r, c) is None else getattr(r, c) for c in GAIN_COLUMNS])
    return buf.getvalue()


def gains_to_json(rows) -> str:
    return json.dumps([{c: getattr(r, c) for c in GAIN_COLUMNS} for r in rows])
