"""
How many models fit on one test set?
====================================

A test set of 50,000 examples, models with 24.4% error, and a tolerance of
one percentage point at 95% confidence.  Treating every model separately
caps the count at a few hundred thousand.  Accounting for how often the
models agree with each other raises it considerably.
"""
# %%
# Baseline: one exact binomial tail per model
# -------------------------------------------
from simbound.planner import PlanQuery, max_models

regime = dict(n=50_000, mu=0.244, eta=0.85, eps=0.01, delta=0.05)
standard = max_models(PlanQuery("standard", **regime))
print(f"standard union bound:   {standard.k_max:>12,d} models")

# %%
# Using pairwise similarity
# -------------------------
# One model acts as an anchor at a slightly reduced threshold; the others
# only pay for deviating while the anchor does not.  With 85% agreement the
# cross terms are small.
similarity = max_models(PlanQuery("similarity", **regime))
print(f"similarity union bound: {similarity.k_max:>12,d} models "
      f"({similarity.k_max / standard.k_max:.1f}x)")

# %%
# Exact probability under a shared-difficulty model
# -------------------------------------------------
# If every model errs only on "hard" examples (W = 1), and independently
# there, the failure probability can be computed exactly.
nb = max_models(PlanQuery("naive-bayes", **regime))
print(f"naive-bayes exact:      {nb.k_max:>12,d} models "
      f"({nb.k_max / standard.k_max:.0f}x)")

# %%
# The coupling behind it
# ----------------------
from simbound.coupling import joint_from_marginals, nb_params

joint = joint_from_marginals(0.244, 0.244, 0.85)
params = nb_params(0.244, 0.85)
print("cells p11, p10, p01, p00:", [round(c, 4) for c in joint.cells])
print(f"P(hard example) = {params.pw:.4f}, P(error | hard) = {params.px:.4f}")
