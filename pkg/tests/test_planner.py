import csv
import io
import json
import math

import pytest

from simbound.errors import DomainError
from simbound.planner import (
    GAIN_COLUMNS,
    PlanQuery,
    bound_for,
    gains,
    gains_to_csv,
    gains_to_json,
    max_models,
)


def test_standard_headline():
    res = max_models(PlanQuery("standard"))
    assert res.k_max == 257_397
    assert not res.saturated
    assert res.probability <= 0.05


@pytest.mark.parametrize("method", ["standard", "similarity", "naive-bayes"])
def test_bracketing(method):
    q = PlanQuery(method, n=5000, mu=0.1, eta=0.95, eps=0.02)
    res = max_models(q)
    assert bound_for(q, res.k_max) <= q.delta < bound_for(q, res.k_max + 1)


def test_delta_one_saturates():
    for method in ("standard", "similarity", "naive-bayes", "thm1"):
        res = max_models(PlanQuery(method, n=1000, eps=0.05, delta=1.0, k_cap=10**6))
        assert res.saturated and res.k_max == 10**6


def test_zero_when_single_model_fails():
    res = max_models(PlanQuery("standard", n=10, eps=0.01))
    assert res.k_max == 0
    assert "exceeds" in res.diagnostic


def test_infeasible_method():
    res = max_models(PlanQuery("naive-bayes", eta=0.5))
    assert res.k_max == 0 and res.diagnostic.startswith("infeasible")
    res = max_models(PlanQuery("similarity", mu=0.244, eta=0.3))
    assert res.k_max == 0 and res.diagnostic.startswith("infeasible")


def test_thm1_method():
    res = max_models(PlanQuery("thm1", n=10**6, eta=0.999, eps=0.01))
    assert res.k_max >= 1
    assert max_models(PlanQuery("thm1")).k_max == 0


def test_query_validation():
    with pytest.raises(DomainError):
        PlanQuery("bogus")
    with pytest.raises(DomainError):
        PlanQuery(eps=0.0)
    with pytest.raises(DomainError):
        PlanQuery(delta=0.0)


def test_deterministic():
    q = PlanQuery("similarity", n=10_000, mu=0.032, eta=0.975, eps=0.01)
    assert max_models(q) == max_models(q)


def test_gains_eta_grid():
    q = PlanQuery("naive-bayes", n=5000, mu=0.1, eps=0.02)
    floor = 1 - 2 * 0.1 * 0.9
    rows = gains(q, "eta", [floor, 0.9, 0.95, 1.0])
    assert rows[0].ratio == pytest.approx(1.0, abs=0.05)
    ratios = [r.ratio for r in rows]
    assert all(b >= a for a, b in zip(ratios, ratios[1:]))
    assert rows[-1].k_method == q.k_cap
    for r in rows:
        assert r.ratio >= 1 - 1 / r.k_standard


def test_gains_infeasible_points_are_null():
    q = PlanQuery("naive-bayes", n=5000, mu=0.1, eps=0.02)
    rows = gains(q, "eta", [0.5, 0.9])
    assert rows[0].k_method is None and rows[0].ratio is None
    assert rows[1].ratio is not None
    with pytest.raises(DomainError):
        gains(q, "mu", [0.1])


def test_gains_serialization():
    q = PlanQuery("similarity", n=2000, mu=0.1, eps=0.03)
    rows = gains(q, "eps", [0.03, 0.04])
    text = gains_to_csv(rows)
    assert text.splitlines()[0] == "grid_value,k_standard,k_method,ratio"
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert len(parsed) == 2 and float(parsed[1]["grid_value"]) == 0.04
    data = json.loads(gains_to_json(rows))
    assert [list(d) for d in data] == [list(GAIN_COLUMNS)] * 2
    assert math.isclose(data[0]["ratio"], rows[0].ratio)
