"""Command-line interface.

Function specs are compact strings of the form "variant:key=value,...":

    modular:w=1|2|3
    sqrtmodular:w=1|0.5|2
    truncation:n=5,alpha=2
    hidden:n=5,alpha=2,beta=1,seed=7      (R drawn uniformly from the seed)
    hidden:n=5,alpha=2,beta=1,r=0|1       (explicit R)
    concave:a=0.5,lam=1,w=4|9             (extra terms: ...,lam=2,w=1|1)
    modulated:kappa=0.5,base=(truncation:n=5,alpha=2)
    tabulated:values=0|1|1|2

Inner lists use '|' separators; a nested spec sits in parentheses.
"""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

import numpy as np

from .core import QuerySession, Subset
from .curvature import curve_normalize, total_curvature
from .experiments import emit_csv, parse_config, run_experiment
from .graphs import parse_graph
from .learn import (
    evaluate_pmac,
    learn_direct,
    pmac_learn_curvature,
    sample_dataset,
)
from .minimize import (
    CardinalityLB,
    PerfectMatching,
    STCut,
    STPath,
    SpanningTree,
    brute_force_min,
    minimize_ea,
    minimize_mub,
)
from .approx import (
    approximation_factor,
    corrected_surrogate,
    fit_sqrt_modular,
    modular_upper_bound,
    scaled_modular_fit,
)
from .oracles import (
    ValueOracle,
    make_concave_over_modular,
    make_hidden_set,
    make_modular,
    make_modulated,
    make_sqrt_modular,
    make_tabulated,
    make_truncation,
    singleton_vector,
)


def _split_top_level(text: str, sep: str) -> List[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _parse_kv(body: str) -> dict:
    out = {}
    for item in _split_top_level(body, ","):
        if not item:
            continue
        if "=" not in item:
            raise ValueError(f"expected key=value in function spec, got {item!r}")
        key, value = item.split("=", 1)
        out.setdefault(key.strip(), []).append(value.strip())
    return out


def _floats(value: str) -> List[float]:
    return [float(v) for v in value.split("|")]


def parse_function_spec(text: str) -> ValueOracle:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    if ":" not in text:
        raise ValueError(f"function spec needs 'variant:args', got {text!r}")
    variant, body = text.split(":", 1)
    variant = variant.strip().lower()
    kv = _parse_kv(body)

    def one(key, default=None):
        vals = kv.get(key)
        if vals is None:
            if default is None:
                raise ValueError(f"{variant} spec needs '{key}='")
            return default
        if len(vals) != 1:
            raise ValueError(f"duplicate '{key}=' in {variant} spec")
        return vals[0]

    if variant == "modular":
        return make_modular(_floats(one("w")))
    if variant == "sqrtmodular":
        return make_sqrt_modular(_floats(one("w")))
    if variant == "truncation":
        return make_truncation(int(one("n")), float(one("alpha")))
    if variant == "hidden":
        n = int(one("n"))
        alpha = int(one("alpha"))
        beta = float(one("beta"))
        if "r" in kv:
            r = Subset.from_indices(n, (int(v) for v in one("r").split("|")))
        else:
            rng = np.random.default_rng(int(one("seed", "0")))
            r = Subset.from_indices(n, (int(j) for j in rng.choice(n, alpha, replace=False)))
        return make_hidden_set(n, alpha, beta, r)
    if variant == "concave":
        a = float(one("a"))
        lams = [float(v) for v in kv.get("lam", ["1"])]
        ws = [_floats(v) for v in kv.get("w", [])]
        if not ws:
            raise ValueError("concave spec needs at least one 'w='")
        if len(lams) != len(ws):
            raise ValueError("concave spec needs matching counts of 'lam=' and 'w='")
        return make_concave_over_modular(list(zip(lams, ws)), a)
    if variant == "modulated":
        base = parse_function_spec(one("base"))
        return make_modulated(base, float(one("kappa")))
    if variant == "tabulated":
        return make_tabulated(_floats(one("values")))
    raise ValueError(f"unknown function variant {variant!r}")


def _parse_constraint(text: str, graph_path: Optional[str], n: int):
    if text.startswith("card:"):
        return CardinalityLB(n, int(text.split(":", 1)[1]))
    if graph_path is None:
        raise ValueError(f"constraint {text!r} needs --graph")
    with open(graph_path, encoding="utf-8") as fh:
        graph = parse_graph(fh.read())
    if graph.m != n:
        raise ValueError(f"function has n={n} but graph has m={graph.m} edges")
    if text == "tree":
        return SpanningTree(graph)
    if text == "path":
        return STPath(graph)
    if text == "cut":
        return STCut(graph)
    if text == "matching":
        return PerfectMatching(graph)
    raise ValueError(f"unknown constraint {text!r}")


def _print_kv(**kwargs) -> None:
    for key, value in kwargs.items():
        if isinstance(value, float):
            print(f"{key}={value:.10g}")
        else:
            print(f"{key}={value}")


def _cmd_curvature(args) -> int:
    oracle = parse_function_spec(args.function)
    session = QuerySession()
    report = total_curvature(oracle, session)
    _print_kv(kappa=report.total, argmin=report.argmin_element, queries=report.queries_used)
    return 0


def _cmd_approx(args) -> int:
    oracle = parse_function_spec(args.function)
    mode, count = ("exhaustive", 0)
    if args.mode.startswith("sampled:"):
        mode, count = "sampled", int(args.mode.split(":", 1)[1])
    elif args.mode != "exhaustive":
        raise ValueError(f"unknown mode {args.mode!r}")
    decomposed = curve_normalize(oracle)
    if args.method == "ea":
        fit = fit_sqrt_modular(
            decomposed.normalized, mode=mode, sample_count=count, seed=args.seed
        )
        factor_claim = fit.gamma
    elif args.method == "mub":
        fit = scaled_modular_fit(decomposed)
        factor_claim = fit.alpha
    else:
        raise ValueError(f"unknown method {args.method!r}")
    surrogate = corrected_surrogate(decomposed, fit)
    report = approximation_factor(
        oracle, surrogate, mode=mode, sample_count=count, seed=args.seed
    )
    _print_kv(
        method=args.method,
        inner_factor=factor_claim,
        corrected_factor=surrogate.upper_factor,
        worst_ratio=report.worst_ratio,
        witness=f"{report.witness.mask:#x}",
        mode=report.mode,
    )
    return 0


def _cmd_minimize(args) -> int:
    oracle = parse_function_spec(args.function)
    constraint = _parse_constraint(args.constraint, args.graph, oracle.n)
    session = QuerySession()
    if args.method == "mub":
        result = minimize_mub(oracle, constraint, session)
    elif args.method == "ea":
        decomposed = curve_normalize(oracle, session=session)
        mode = "exhaustive" if oracle.n <= 12 else "sampled"
        fit = fit_sqrt_modular(decomposed.normalized, mode=mode, seed=args.seed)
        result = minimize_ea(oracle, constraint, fit, session, decomposed=decomposed)
    elif args.method == "brute":
        result = brute_force_min(oracle, constraint)
    else:
        raise ValueError(f"unknown method {args.method!r}")
    _print_kv(
        solution=f"{result.solution.mask:#x}",
        f_value=result.true_value,
        surrogate_value=result.surrogate_value,
        bound=result.bound,
        feasible=result.feasible,
        method=result.method,
    )
    return 0


def _cmd_learn(args) -> int:
    oracle = parse_function_spec(args.function)
    dataset = sample_dataset(oracle, args.dist, args.m, args.seed)
    singles = singleton_vector(oracle)
    if args.mode == "curvature":
        kappa_upper = args.kappa_upper
        if kappa_upper is None:
            kappa_upper = total_curvature(oracle).total
        model = pmac_learn_curvature(dataset, singles, kappa_upper)
        factor = model.alpha_factor
    elif args.mode == "direct":
        # factor alpha(X) = |X| covers every monotone submodular function
        factor_fn = lambda s: float(max(1, s.cardinality))
        model = learn_direct(dataset, factor_fn)
        factor = lambda s: model.claimed_factor(s)
    else:
        raise ValueError(f"unknown learn mode {args.mode!r}")
    report = evaluate_pmac(oracle, model, args.dist, args.test, factor, args.seed + 1)
    _print_kv(
        success_fraction=report.success_fraction,
        factor=report.factor,
        test_count=report.test_count,
        nonzero_weights=int(np.count_nonzero(model.w)),
        z=model.z,
    )
    if args.dump_model:
        with open(args.dump_model, "w", encoding="utf-8") as fh:
            fh.write(f"{model.z:.10g}\n")
            for j, wj in enumerate(model.w):
                fh.write(f"{j} {wj:.10g}\n")
    return 0


def _cmd_experiment(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        config = parse_config(fh.read())
    rows = run_experiment(config)
    emit_csv(rows, args.out)
    errored = [r for r in rows if r.error]
    for row in errored:
        print(f"cell n={row.n} kappa={row.kappa} eps={row.epsilon}: {row.error}", file=sys.stderr)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 2 if errored else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvsub",
        description="Curvature-aware submodular approximation, learning, and minimization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curvature", help="total curvature of a function")
    p.add_argument("--function", required=True)
    p.set_defaults(func=_cmd_curvature)

    p = sub.add_parser("approx", help="fit and certify an everywhere-approximation")
    p.add_argument("--function", required=True)
    p.add_argument("--method", choices=["mub", "ea"], default="ea")
    p.add_argument("--mode", default="exhaustive", help="exhaustive or sampled:<count>")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_approx)

    p = sub.add_parser("minimize", help="constrained minimization via surrogates")
    p.add_argument("--constraint", required=True, help="card:<k>|tree|path|cut|matching")
    p.add_argument("--graph", help="edge-list file for graph constraints")
    p.add_argument("--function", required=True)
    p.add_argument("--method", choices=["mub", "ea", "brute"], default="mub")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_minimize)

    p = sub.add_parser("learn", help="PMAC-learn a function from samples")
    p.add_argument("--function", required=True)
    p.add_argument("--dist", default="uniform", help="uniform or product:<p>")
    p.add_argument("--m", type=int, default=1000)
    p.add_argument("--mode", choices=["curvature", "direct"], default="curvature")
    p.add_argument("--kappa-upper", dest="kappa_upper", type=float, default=None)
    p.add_argument("--test", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dump-model", dest="dump_model", default=None)
    p.set_defaults(func=_cmd_learn)

    p = sub.add_parser("experiment", help="run the constrained-minimization experiments")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
