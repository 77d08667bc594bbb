"""Cross-checks of the analytic computations against :mod:`simbound.oracle`."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import oracle
from .bounds import EnsembleSpec, joint_tail, naive_bayes_prob
from .coupling import factorize, joint_from_marginals, nb_params
from .dataio import PredictionMatrix
from .cover import greedy_cover
from .numerics import binom_cdf, two_sided_dev_tail
from .theory import lemma1_bound


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def random_pair_instance(rng: np.random.Generator, n_max: int = 12):
    """A random feasible, positively correlated ``(n, p1, p2, eta, alpha1, alpha2)``."""
    while True:
        n = int(rng.integers(1, n_max + 1))
        p1, p2 = (round(float(x), 3) for x in rng.uniform(0.02, 0.98, 2))
        lo = p1 * p2 + (1 - p1) * (1 - p2)
        hi = 1 - abs(p1 - p2)
        if hi <= lo:
            continue
        eta = round(float(rng.uniform(lo, hi)), 3)
        try:
            factorize(joint_from_marginals(p1, p2, eta))
        except ValueError:
            continue
        a1 = round(float(rng.uniform(-0.3, 0.5)), 3)
        a2 = round(float(rng.uniform(-0.3, 0.5)), 3)
        return n, p1, p2, eta, a1, a2


def random_nb_instance(rng: np.random.Generator, n_max: int = 12, k_max: int = 3):
    n = int(rng.integers(1, n_max + 1))
    k = int(rng.integers(1, k_max + 1))
    mu = round(float(rng.uniform(0.05, 0.6)), 3)
    floor = 1 - 2 * mu * (1 - mu)
    eta = round(float(rng.uniform(floor, 1.0)), 3)
    eta = max(eta, floor)
    eps = round(float(rng.uniform(0.01, 0.5)), 3)
    return n, k, mu, eta, eps


def _check_joint_tails(rng, count):
    worst = 0.0
    for _ in range(count):
        n, p1, p2, eta, a1, a2 = random_pair_instance(rng)
        exact = oracle.enumerate_joint_tail(n, joint_from_marginals(p1, p2, eta), a1, a2)
        worst = max(worst, abs(joint_tail(n, p1, p2, eta, a1, a2).probability - exact))
    return Check("joint_tail vs lattice enumeration", worst <= 1e-12,
                 f"{count} instances, max abs diff {worst:.2e}")


def _check_nb_exact(rng, count):
    worst = 0.0
    for _ in range(count):
        n, k, mu, eta, eps = random_nb_instance(rng)
        exact = oracle.enumerate_nb_prob(n, nb_params(mu, eta), k, eps)
        got = naive_bayes_prob(EnsembleSpec(n, mu, eta, k), eps).probability
        worst = max(worst, abs(got - exact))
    return Check("naive_bayes_prob vs lattice enumeration", worst <= 1e-12,
                 f"{count} instances, max abs diff {worst:.2e}")


def _check_binom(rng):
    worst = 0.0
    for n in range(0, 21):
        for p in np.arange(1, 10) / 10:
            for m in range(-1, n + 1):
                worst = max(worst, abs(binom_cdf(n, float(p), m) - oracle.enumerate_binom_cdf(n, float(p), m)))
    return Check("binom_cdf vs pmf summation (n <= 20)", worst <= 1e-14, f"max abs diff {worst:.2e}")


def _check_nb_mc(seed, trials):
    ok = True
    details = []
    params = nb_params(0.244, 0.85)
    for eps in (0.03, 0.05, 0.08):
        exact = naive_bayes_prob(EnsembleSpec(200, 0.244, 0.85, 5), eps).probability
        est = oracle.simulate_nb(params, 200, 5, eps, trials, seed)
        ok &= est.within(exact)
        details.append(f"eps={eps}: exact {exact:.5f} mc {est.frequency:.5f}±{est.stderr:.5f}")
    return Check("naive_bayes_prob vs Monte Carlo (n=200, k=5)", ok, "; ".join(details))


def _check_single_query_mc(seed, trials):
    exact = two_sided_dev_tail(200, 0.244, 0.05)
    est = oracle.simulate_nb(nb_params(0.244, 0.85), 200, 1, 0.05, trials, seed)
    return Check("two_sided_dev_tail vs Monte Carlo", est.within(exact),
                 f"exact {exact:.5f} mc {est.frequency:.5f}±{est.stderr:.5f}")


def _check_lemma1():
    worst = np.inf
    for n in range(1, 16):
        for p1 in (0.05, 0.2, 0.4):
            for pn in (0.0, 0.1, 0.3):
                for t in (0.05, 0.2, 0.5):
                    if p1 + pn > 1 or p1 - pn + t / 2 < 0:
                        continue
                    gap = lemma1_bound(n, p1, pn, t) - oracle.enumerate_trinomial_tail(n, p1, pn, t)
                    worst = min(worst, gap)
    return Check("lemma1_bound dominates trinomial tail (n <= 15)", worst >= -1e-15,
                 f"smallest margin {worst:.2e}")


def _check_covers(rng, count):
    ok = True
    for _ in range(count):
        n = int(rng.integers(5, 40))
        m = int(rng.integers(1, 8))
        mat = PredictionMatrix.from_array(rng.integers(0, 2, (n, m)))
        eta = float(rng.uniform(0.3, 1.0))
        r = greedy_cover(mat, eta)
        best = len(oracle.exhaustive_min_cover(mat.mistakes, eta))
        ok &= oracle.is_cover(mat.mistakes, r.cover_indices, eta) and r.size >= best
    return Check("greedy_cover sound vs brute force", ok, f"{count} random matrices")


def run_checks(seed: int = 0, quick: bool = False) -> list[Check]:
    rng = np.random.default_rng(seed)
    trials = 100_000 if quick else 1_000_000
    count = 100 if quick else 500
    return [
        _check_binom(rng),
        _check_joint_tails(rng, count),
        _check_nb_exact(rng, count),
        _check_single_query_mc(seed, trials),
        _check_nb_mc(seed, trials),
        _check_lemma1(),
        _check_covers(rng, 20 if quick else 100),
    ]


def main_report(seed: int = 0, quick: bool = False, out=print) -> bool:
    start = time.perf_counter()
    checks = run_checks(seed, quick)
    for c in checks:
        out(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
    out(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed "
        f"in {time.perf_counter() - start:.1f}s")
    return all(c.passed for c in checks)
