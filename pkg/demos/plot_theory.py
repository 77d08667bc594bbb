"""
Closed-form guarantees
======================

The exact computations assume a symmetric ensemble.  Chernoff-style bounds
in terms of a cover size apply to any collection, at the price of
looseness.  This script compares them and evaluates the adaptive-analyst
guarantee.
"""
# %%
from simbound import theory
from simbound.bounds import EnsembleSpec, naive_bayes_prob

n, delta = 50_000, 0.05

# %%
# Certified tolerance for k models with a small cover
# ---------------------------------------------------
for k in (10, 1000, 10**5):
    for eta in (0.9, 0.99):
        eps = theory.thm1_eq5_eps(n, k, 10, eta, delta)
        shown = "n/a" if eps is None else f"{eps:.4f}"
        print(f"k={k:>6}  eta={eta}  eps={shown}")

# %%
# How loose is the closed form?
# -----------------------------
# Plug the certified tolerance into the exact probability for a symmetric
# ensemble with the same parameters.
eps = theory.thm1_eq5_eps(n, 1000, 1, 0.95, delta)
exact = naive_bayes_prob(EnsembleSpec(n, 0.1, 0.95, 1000), eps).probability
print(f"closed form promises failure <= {delta}; exact failure probability is {exact:.2e}")

# %%
# Adaptive analysts
# -----------------
# With cover budget (n + 1)^(k^(1 - alpha)), larger alpha means the analyst
# explores fewer distinct directions and the tolerance shrinks.
for alpha in (0.0, 0.5, 1.0):
    eps, eta, budget = theory.corollary_adaptive(10_000, 100, alpha, delta)
    print(f"alpha={alpha}: eps={eps:.4f}, needs similarity >= {eta:.6f}")
