"""Constrained-minimization experiments on the adversarial hidden-set family.

Instances follow the lower-bound construction: draw R uniformly without
replacement with |R| = alpha = round(n^(1/2+eps)), set beta = round(n^(2*eps)),
build

    f(X) = kappa * min(|X \\ R| + beta, |X|, alpha) + (1 - kappa) |X|

and minimize over the cardinality lower bound |X| >= alpha.  The optimum is
R itself with value kappa*beta + (1-kappa)*alpha, so per-trial empirical
approximation factors are exact; results aggregate over independent draws
and are emitted as deterministic CSV.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import QuerySession, Subset
from .curvature import curve_normalize
from .errors import InvalidInstanceError
from .minimize import (
    CardinalityLB,
    ConstraintFamily,
    brute_force_min,
    minimize_ea,
    minimize_mub,
)
from .approx import fit_sqrt_modular
from .oracles import ValueOracle, make_hidden_set, make_modulated

CSV_HEADER = "constraint,method,n,kappa,epsilon,alpha,beta,trials,empirical_mean,empirical_std,theoretical_bound"

_BRUTE_CROSSCHECK_LIMIT = 20
_EA_SAMPLED_COUNT = 4096


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def instance_shape(
    n: int,
    eps: Optional[float],
    alpha_override: Optional[int] = None,
    beta_override: Optional[int] = None,
) -> Tuple[int, int]:
    """Rounded (alpha, beta) for an instance; beta floors at 1, alpha must
    fit the ground set."""
    if alpha_override is None or beta_override is None:
        if eps is None:
            raise InvalidInstanceError("need eps unless both alpha and beta are overridden")
    alpha = alpha_override if alpha_override is not None else _round_half_up(n ** (0.5 + eps))
    beta = beta_override if beta_override is not None else max(1, _round_half_up(n ** (2 * eps)))
    if alpha > n:
        raise InvalidInstanceError(f"alpha={alpha} exceeds n={n}; regime out of range")
    if alpha < 1:
        raise InvalidInstanceError(f"alpha={alpha} must be positive")
    if beta < 1:
        raise InvalidInstanceError(f"beta={beta} must be at least 1")
    return int(alpha), int(beta)


def make_instance(
    n: int,
    kappa: float,
    eps: Optional[float],
    alpha_override: Optional[int] = None,
    beta_override: Optional[int] = None,
    seed: int = 0,
) -> Tuple[ValueOracle, ConstraintFamily, float]:
    """One experiment instance: oracle, constraint, and analytic optimum.

    R is drawn uniformly without replacement.  The optimum is f(R); for
    n <= 20 a brute-force cross-check runs automatically.
    """
    alpha, beta = instance_shape(n, eps, alpha_override, beta_override)
    rng = np.random.default_rng(seed)
    members = rng.choice(n, size=alpha, replace=False)
    r = Subset.from_indices(n, (int(j) for j in members))
    base = make_hidden_set(n, alpha, beta, r)
    oracle = make_modulated(base, kappa)
    constraint = CardinalityLB(n, alpha)
    optimum = oracle.value(r.mask)  # kappa*min(alpha,beta) + (1-kappa)*alpha
    if n <= _BRUTE_CROSSCHECK_LIMIT:
        exact = brute_force_min(oracle, constraint)
        if abs(exact.true_value - optimum) > 1e-9 * (1 + abs(optimum)):
            raise InvalidInstanceError(
                f"analytic optimum {optimum} disagrees with brute force {exact.true_value}"
            )
    return oracle, constraint, float(optimum)


def theoretical_curve(
    kind: str,
    n: int,
    kappa: float,
    eps: Optional[float] = None,
    k: Optional[int] = None,
    alpha: Optional[int] = None,
    beta: Optional[int] = None,
) -> float:
    """Reference curves: the a-priori surrogate bounds and the hardness ratio.

    mub_card: k / (1 + (k-1)(1-kappa)) with k = alpha when not given.
    ea_card:  t / (1 + (t-1)(1-kappa)) with t = sqrt(n) ln(n).
    hardness: alpha / ((1-kappa) alpha + kappa beta) with the instance's
              rounded alpha, beta.
    """
    if not 0.0 <= kappa <= 1.0:
        raise ValueError(f"kappa={kappa} outside [0, 1]")
    if kind == "mub_card":
        if k is None:
            k, _ = instance_shape(n, eps, alpha, beta)
        return k / (1 + (k - 1) * (1 - kappa))
    if kind == "ea_card":
        t = max(1.0, math.sqrt(n) * math.log(n))
        return t / (1 + (t - 1) * (1 - kappa))
    if kind == "hardness":
        if alpha is None or beta is None:
            alpha, beta = instance_shape(n, eps, alpha, beta)
        return alpha / ((1 - kappa) * alpha + kappa * beta)
    raise ValueError(f"unknown curve kind {kind!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    n_list: Tuple[int, ...]
    kappa_list: Tuple[float, ...]
    eps_list: Tuple[Optional[float], ...] = (None,)
    alpha_override: Optional[int] = None
    beta_override: Optional[int] = None
    trials: int = 20
    base_seed: int = 0
    methods: Tuple[str, ...] = ("MUB",)
    output: Optional[str] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for k in self.kappa_list:
            if not 0.0 <= k <= 1.0:
                raise ValueError(f"kappa={k} outside [0, 1]")
        for e in self.eps_list:
            if e is not None and not 0.0 < e < 0.5:
                raise ValueError(f"epsilon={e} outside (0, 1/2)")
        for meth in self.methods:
            if meth not in ("MUB", "EA"):
                raise ValueError(f"unknown method {meth!r}")


@dataclass(frozen=True)
class ResultRow:
    constraint: str
    method: str
    n: int
    kappa: float
    epsilon: Optional[float]
    alpha: int
    beta: int
    trials: int
    empirical_mean: float
    empirical_std: float
    theoretical_bound: float
    error: str = ""


def _trial_seed(base_seed: int, cell_index: int, trial_index: int) -> int:
    # Documented split: child streams spawn from (base_seed, cell, trial).
    seq = np.random.SeedSequence(entropy=base_seed, spawn_key=(cell_index, trial_index))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _run_trial(
    n: int,
    kappa: float,
    eps: Optional[float],
    method: str,
    config: ExperimentConfig,
    seed: int,
) -> float:
    oracle, constraint, optimum = make_instance(
        n, kappa, eps, config.alpha_override, config.beta_override, seed=seed
    )
    session = QuerySession()
    if method == "MUB":
        result = minimize_mub(oracle, constraint, session)
    else:
        decomposed = curve_normalize(oracle, session=session)
        mode = "exhaustive" if n <= 12 else "sampled"
        fit = fit_sqrt_modular(
            decomposed.normalized, mode=mode, sample_count=_EA_SAMPLED_COUNT, seed=seed
        )
        result = minimize_ea(oracle, constraint, fit, session, decomposed=decomposed)
    if not result.feasible:
        raise InvalidInstanceError("solver returned an infeasible set")
    return result.true_value / optimum


def run_experiment(config: ExperimentConfig) -> List[ResultRow]:
    """One row per (n, kappa, epsilon, method) cell, averaging `trials`
    independent draws; a failing cell becomes an error row, not a crash."""
    rows: List[ResultRow] = []
    cell_index = 0
    for n in config.n_list:
        for kappa in config.kappa_list:
            for eps in config.eps_list:
                for method in config.methods:
                    try:
                        alpha, beta = instance_shape(
                            n, eps, config.alpha_override, config.beta_override
                        )
                        factors = [
                            _run_trial(
                                n, kappa, eps, method, config,
                                _trial_seed(config.base_seed, cell_index, t),
                            )
                            for t in range(config.trials)
                        ]
                        bound = theoretical_curve(
                            "hardness", n, kappa, eps, alpha=alpha, beta=beta
                        )
                        rows.append(
                            ResultRow(
                                constraint=f"card:{alpha}",
                                method=method,
                                n=n,
                                kappa=kappa,
                                epsilon=eps,
                                alpha=alpha,
                                beta=beta,
                                trials=config.trials,
                                empirical_mean=float(np.mean(factors)),
                                empirical_std=float(np.std(factors)),
                                theoretical_bound=bound,
                            )
                        )
                    except Exception as exc:  # error row keeps the run alive
                        rows.append(
                            ResultRow(
                                constraint="card:?",
                                method=method,
                                n=n,
                                kappa=kappa,
                                epsilon=eps,
                                alpha=0,
                                beta=0,
                                trials=config.trials,
                                empirical_mean=float("nan"),
                                empirical_std=float("nan"),
                                theoretical_bound=float("nan"),
                                error=f"{type(exc).__name__}: {exc}",
                            )
                        )
                    cell_index += 1
    return rows


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def emit_csv(rows: Sequence[ResultRow], path: str) -> None:
    """Write the fixed-header CSV; byte-identical for identical inputs."""
    if not rows:
        raise ValueError("no rows to emit")
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [
                    r.constraint,
                    r.method,
                    str(r.n),
                    _fmt(float(r.kappa)),
                    _fmt(r.epsilon if r.epsilon is None else float(r.epsilon)),
                    str(r.alpha),
                    str(r.beta),
                    str(r.trials),
                    _fmt(r.empirical_mean),
                    _fmt(r.empirical_std),
                    _fmt(r.theoretical_bound),
                ]
            )
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


_CONFIG_KEYS = {
    "n": "n_list",
    "kappa": "kappa_list",
    "epsilon": "eps_list",
    "alpha": "alpha_override",
    "beta": "beta_override",
    "trials": "trials",
    "seed": "base_seed",
    "methods": "methods",
}


def parse_config(text: str) -> ExperimentConfig:
    """Flat key=value config; lists comma-separated; unknown keys rejected.

    Keys: n, kappa, epsilon, alpha, beta, trials, seed, methods.
    """
    kwargs = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line {line_no}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ValueError(f"config line {line_no}: unknown key {key!r}")
        if key == "n":
            kwargs["n_list"] = tuple(int(v) for v in value.split(","))
        elif key == "kappa":
            kwargs["kappa_list"] = tuple(float(v) for v in value.split(","))
        elif key == "epsilon":
            kwargs["eps_list"] = tuple(float(v) for v in value.split(","))
        elif key == "alpha":
            kwargs["alpha_override"] = int(value)
        elif key == "beta":
            kwargs["beta_override"] = int(value)
        elif key == "trials":
            kwargs["trials"] = int(value)
        elif key == "seed":
            kwargs["base_seed"] = int(value)
        elif key == "methods":
            kwargs["methods"] = tuple(v.strip().upper() for v in value.split(","))
    if "n_list" not in kwargs or "kappa_list" not in kwargs:
        raise ValueError("config must set at least 'n' and 'kappa'")
    return ExperimentConfig(**kwargs)
