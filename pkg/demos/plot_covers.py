"""
Similarity covers of a model collection
=======================================

The closed-form guarantees depend on the size of a similarity cover: a
subset of models such that every model has a similar member with no more
error and a similar member with no less error.  Here we build a synthetic
collection of correlated models and trace cover size against the
similarity level.
"""
# %%
import numpy as np

from simbound.cover import cover_curve_results
from simbound.dataio import PredictionMatrix, difficulty_histogram, summarize

rng = np.random.default_rng(0)
n, m = 5000, 40
hard = rng.random(n) < 0.35          # examples any model may get wrong
skill = rng.uniform(0.45, 0.85, m)   # per-model error rate on hard examples
mistakes = hard[:, None] & (rng.random((n, m)) < skill)
mat = PredictionMatrix.from_array(mistakes.astype(int))

# %%
# Descriptive statistics
# ----------------------
summary = summarize(mat)
print(f"mean error {summary.error_rates.mean():.3f}")
print(f"mean pairwise agreement {summary.mean_similarity:.3f} "
      f"vs {summary.mean_baseline:.3f} if mistakes were independent")
hist = difficulty_histogram(mat)
print(f"{hist.fractions[0]:.1%} of examples are solved by every model")

# %%
# Cover sizes
# -----------
# Sizes never decrease with the level: a cover at a high level is also one
# at any lower level.
for r in cover_curve_results(mat, np.linspace(0.7, 1.0, 13)):
    print(f"eta={r.eta:.3f}  size={r.size:>2}  members={list(r.cover_indices)[:8]}")
