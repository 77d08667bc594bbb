"""Command-line entry point: ``simbound <subcommand> ...``.

Exit codes: 0 success, 1 failed ``verify`` check, 2 usage or domain error,
3 infeasible parameters, 4 unparsable input.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import theory
from .bounds import METHODS, EnsembleSpec, bound_probability, similarity_union_prob
from .cover import cover_curve_results
from .dataio import difficulty_histogram, load_matrix, summarize
from .errors import DomainError, InfeasibleError, ParseError
from .planner import DEFAULT_K_CAP, PLAN_METHODS, PlanQuery, gains, gains_to_csv, max_models

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_PARSE = 0, 1, 2, 3, 4

DEFAULTS = {"n": 50_000, "mu": 0.244, "eta": 0.85, "eps": 0.01, "delta": 0.05}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # one-line diagnostics instead of argparse's usage dump
    def error(self, message):
        raise _UsageError(message)


def parse_grid(text: str) -> list[float]:
    """``a:b:step`` (inclusive of ``b`` up to rounding) or a comma-separated list."""
    if ":" not in text:
        try:
            return [float(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise DomainError(f"bad grid {text!r}") from None
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"grid must look like a:b:step, got {text!r}")
    try:
        a, b, step = (float(p) for p in parts)
    except ValueError:
        raise DomainError(f"bad grid {text!r}") from None
    if step <= 0 or b < a:
        raise DomainError("grid needs step > 0 and b >= a")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + i * step, 12) for i in range(count)]


def _result(method: str, params: dict, value, truncation_error: float = 0.0, flags=()) -> dict:
    return {"method": method, "params": params, "value": value,
            "truncation_error": truncation_error, "flags": list(flags)}


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


# --------------------------------------------------------------------------
# subcommands; each returns (result dict, human-readable text)
# --------------------------------------------------------------------------

def _load(args):
    return load_matrix(args.matrix, example_id_col=args.example_id_col, correct=args.correct)


def cmd_stats(args):
    mat = _load(args)
    summ = summarize(mat)
    hist = difficulty_histogram(mat)
    value = {
        "n_examples": mat.n_examples,
        "model_ids": list(mat.model_ids),
        "error_rates": summ.error_rates,
        "mean_similarity": summ.mean_similarity,
        "mean_baseline": summ.mean_baseline,
        "min_similarity": summ.min_similarity,
        "similarity": summ.similarity,
        "difficulty_counts": hist.counts,
        "difficulty_cumulative": hist.cumulative,
    }
    if args.out:
        _write_csv(args.out, ("models_in_error", "count", "at_most"),
                   zip(range(len(hist.counts)), hist.counts.tolist(), hist.cumulative.tolist()))
    lines = [f"examples: {mat.n_examples}  models: {mat.n_models}"]
    lines += [f"  {mid}: error {e:.6g}" for mid, e in zip(mat.model_ids, summ.error_rates)]
    if mat.n_models >= 2:
        lines.append(f"similarity: mean {summ.mean_similarity:.6g}  min {summ.min_similarity:.6g}")
        lines.append(f"independence baseline: mean {summ.mean_baseline:.6g}")
    lines.append("difficulty (models in error: examples): "
                 + " ".join(f"{d}:{c}" for d, c in enumerate(hist.counts.tolist())))
    return _result("stats", {"matrix": args.matrix}, value), "\n".join(lines)


def cmd_cover(args):
    mat = _load(args)
    covers = cover_curve_results(mat, parse_grid(args.eta_grid))
    value = [{"eta": r.eta, "size": r.size,
              "cover": [mat.model_ids[i] for i in r.cover_indices]} for r in covers]
    if args.out:
        _write_csv(args.out, ("eta", "size"), [(r.eta, r.size) for r in covers])
    lines = ["eta\tsize\tcover (empirical)"]
    lines += [f"{v['eta']:g}\t{v['size']}\t{','.join(v['cover'])}" for v in value]
    return (_result("cover", {"matrix": args.matrix, "eta_grid": args.eta_grid}, value,
                    flags=["empirical cover"]), "\n".join(lines))


def _query(args) -> PlanQuery:
    return PlanQuery(args.method, args.n, args.mu, args.eta, args.eps, args.delta, args.k_cap)


def cmd_max_models(args):
    query = _query(args)
    res = max_models(query)
    if res.diagnostic and res.diagnostic.startswith("infeasible"):
        raise InfeasibleError(res.diagnostic.removeprefix("infeasible: "))
    text = str(res.k_max)
    if res.saturated:
        text += "  (saturated at k_cap)"
    elif res.diagnostic:
        text += f"  ({res.diagnostic})"
    return res.to_dict(query), text


def cmd_gains(args):
    query = _query(args)
    rows = gains(query, args.grid, parse_grid(args.values))
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            fh.write(gains_to_csv(rows))
    value = [{"grid_value": r.grid_value, "k_standard": r.k_standard,
              "k_method": r.k_method, "ratio": r.ratio} for r in rows]
    params = {k: getattr(query, k) for k in ("n", "mu", "eta", "eps", "delta", "k_cap")}
    params.update(grid=args.grid, values=args.values)
    return _result(query.method, params, value), gains_to_csv(rows).rstrip("\n")


def cmd_bound(args):
    spec = EnsembleSpec(args.n, args.mu, args.eta, args.k)
    if args.t is not None:
        if args.method != "similarity":
            raise DomainError("--t applies only to the similarity method")
        res = similarity_union_prob(spec, args.eps, t=args.t)
    else:
        res = bound_probability(args.method, spec, args.eps)
    text = f"{res.probability:.10g}"
    extras = []
    if res.slack_t is not None:
        extras.append(f"t={res.slack_t:.6g}")
    if res.truncation_error:
        extras.append(f"truncation<={res.truncation_error:.3g}")
    extras += list(res.flags)
    if extras:
        text += "  (" + ", ".join(extras) + ")"
    return res.to_dict(), text


def cmd_theory(args):
    which = args.which
    params = {k: v for k, v in vars(args).items()
              if k in ("n", "k", "n_eta", "eta", "eps", "delta", "p1", "p_neg1", "t", "alpha")}
    flags = []
    if which == "lemma1":
        raw = theory.lemma1_bound(args.n, args.p1, args.p_neg1, args.t)
        value = min(1.0, raw)
        text = f"{value:.10g}"
    elif which == "eq4":
        raw = theory.thm1_eq4(theory.TheoremInputs(args.n, args.k, args.n_eta, args.eta, eps=args.eps))
        value = min(1.0, raw)
        if raw > 1.0:
            flags.append("clipped")
        text = f"{value:.10g}"
    elif which == "eq5":
        value = theory.thm1_eq5_eps(args.n, args.k, args.n_eta, args.eta, args.delta)
        if value is None:
            flags.append("not-applicable")
            ceiling = theory.thm1_eq5_ceiling(args.n, args.k, args.n_eta, args.delta)
            text = f"not applicable: eta must be at most {ceiling:.6g}"
        else:
            text = f"eps = {value:.10g}"
    elif which == "eq6":
        eps, thr = theory.thm1_eq6_check(args.n, args.k, args.n_eta, args.delta)
        value = {"eps": eps, "eta_threshold": thr}
        text = f"eps = {eps:.10g}  for eta >= {thr:.10g}"
    else:
        eps, eta, budget = theory.corollary_adaptive(args.n, args.k, args.alpha, args.delta)
        value = {"eps": eps, "eta_required": eta, "log_cover_budget": budget}
        text = f"eps = {eps:.10g}  eta_required = {eta:.10g}  ln(cover budget) = {budget:.6g}"
    return _result(f"theory-{which}", params, value, flags=flags), text


def cmd_verify(args):
    from .verify import run_checks

    checks = run_checks(args.seed, args.quick)
    value = [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks]
    lines = [f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}" for c in checks]
    lines.append(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    flags = [] if all(c.passed for c in checks) else ["failed"]
    return _result("verify", {"seed": args.seed, "quick": args.quick}, value, flags=flags), "\n".join(lines)


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _add_plan_args(p, methods, default_method):
    p.add_argument("--method", choices=methods, default=default_method)
    p.add_argument("--n", type=int, default=DEFAULTS["n"])
    p.add_argument("--mu", type=float, default=DEFAULTS["mu"])
    p.add_argument("--eta", type=float, default=DEFAULTS["eta"])
    p.add_argument("--eps", type=float, default=DEFAULTS["eps"])


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="print results as JSON")
    common.add_argument("--out", metavar="PATH", default=argparse.SUPPRESS,
                        help="also write CSV data to PATH")

    parser = _Parser(prog="simbound", description="Overfitting bounds for test-set reuse "
                     "across many similar models.", parents=[common])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, parents=[common])
        p.set_defaults(func=func)
        return p

    for name, func, help_ in (("stats", cmd_stats, "error rates, similarities, difficulty histogram"),
                              ("cover", cmd_cover, "greedy similarity covers along an eta grid")):
        p = add(name, func, help_)
        p.add_argument("matrix", help="CSV mistake matrix (1 = model erred)")
        p.add_argument("--example-id-col", action="store_true")
        p.add_argument("--correct", action="store_true", help="cells mark correct predictions")
        if name == "cover":
            p.add_argument("--eta-grid", required=True, metavar="a:b:step")

    p = add("max-models", cmd_max_models, "largest k whose bound stays below delta")
    _add_plan_args(p, PLAN_METHODS, "standard")
    p.add_argument("--delta", type=float, default=DEFAULTS["delta"])
    p.add_argument("--k-cap", type=int, default=DEFAULT_K_CAP)

    p = add("gains", cmd_gains, "k_method / k_standard along an eta or eps grid")
    _add_plan_args(p, PLAN_METHODS, "similarity")
    p.add_argument("--delta", type=float, default=DEFAULTS["delta"])
    p.add_argument("--k-cap", type=int, default=DEFAULT_K_CAP)
    p.add_argument("--grid", choices=("eta", "eps"), required=True)
    p.add_argument("--values", required=True, metavar="a:b:step")

    p = add("bound", cmd_bound, "overfitting probability for k models")
    _add_plan_args(p, METHODS, "standard")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--t", type=float, default=None, help="fix the slack (similarity only)")

    p = add("theory", cmd_theory, "closed-form guarantees")
    p.add_argument("which", choices=("lemma1", "eq4", "eq5", "eq6", "adaptive"))
    p.add_argument("--n", type=int, default=DEFAULTS["n"])
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--n-eta", type=int, default=1)
    p.add_argument("--eta", type=float, default=DEFAULTS["eta"])
    p.add_argument("--eps", type=float, default=DEFAULTS["eps"])
    p.add_argument("--delta", type=float, default=DEFAULTS["delta"])
    p.add_argument("--p1", type=float, default=0.1)
    p.add_argument("--p-neg1", type=float, default=0.1)
    p.add_argument("--t", type=float, default=0.1)
    p.add_argument("--alpha", type=float, default=0.5)

    p = add("verify", cmd_verify, "cross-check computations against independent oracles")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quick", action="store_true")
    return parser


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(f"simbound: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    args.json = getattr(args, "json", False)
    args.out = getattr(args, "out", None)
    try:
        result, text = args.func(args)
    except ParseError as exc:
        code, msg = EXIT_PARSE, f"parse error: {exc}"
    except InfeasibleError as exc:
        code, msg = EXIT_INFEASIBLE, f"infeasible: {exc}"
    except (DomainError, ValueError) as exc:
        code, msg = EXIT_USAGE, str(exc)
    except OSError as exc:
        code, msg = EXIT_PARSE, f"cannot read input: {exc}"
    else:
        if args.json:
            stdout.write(json.dumps(_jsonable(result)) + "\n")
        else:
            stdout.write(text + "\n")
        return EXIT_FAILED if "failed" in result["flags"] else EXIT_OK
    print(f"simbound: error: {' '.join(msg.split())}", file=sys.stderr)
    return code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
