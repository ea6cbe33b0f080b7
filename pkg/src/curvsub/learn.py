"""Learning submodular functions within a multiplicative factor.

The pipeline reduces sampled (X, f(X)) pairs to a binary linear-separation
problem: each positive-valued sample becomes the two labeled points

    (1_X, f(X))              -> +1
    (1_X, (alpha(X)+1) f(X)) -> -1

(the fair coin of the underlying argument is derandomized by emitting both),
and zero-valued samples pin their elements' weights to zero.  A separator
u = (w, -z) with w >= 0, z > 0 yields the estimate w(X)/z, which on every
correctly classified set is sandwiched between f(X) and (alpha(X)+1) f(X).

The curvature-aware learner transforms sample values to the curve-normalized
scale, learns that part in squared-value space (multiplier n+1, giving a
sqrt(n+1) sandwich for the inner part), and recombines with the exact
modular part, for an overall factor

    sqrt(n+1) / (1 + (sqrt(n+1) - 1)(1 - kappa)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linprog

from .core import QuerySession, Subset
from .errors import InvalidDatasetError, InvalidOverrideError, LearningFailureError
from .oracles import ValueOracle

_PERCEPTRON_CAP = 10**6
_VALUE_SLACK = 1e-9

FactorFn = Callable[[Subset], float]


@dataclass(frozen=True)
class Dataset:
    """Sampled (subset, oracle value) pairs from a named distribution."""

    samples: Tuple[Tuple[Subset, float], ...]
    distribution: str
    n: int
    seed: int

    def __len__(self) -> int:
        return len(self.samples)


def _parse_distribution(distribution: Union[str, Tuple[str, float]]) -> Tuple[str, Optional[float]]:
    if isinstance(distribution, tuple):
        name, p = distribution
        distribution = f"{name}:{p}"
    if distribution == "uniform":
        return "uniform", None
    if distribution.startswith("product:"):
        p = float(distribution.split(":", 1)[1])
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"product parameter {p} outside [0, 1]")
        return "product", p
    raise ValueError(f"unknown distribution {distribution!r}")


def _draw_mask(rng: np.random.Generator, n: int, kind: str, p: Optional[float]) -> int:
    if kind == "uniform":
        bits = rng.integers(0, 2, size=n)
    else:
        bits = (rng.random(n) < p).astype(int)
    mask = 0
    for j in range(n):
        if bits[j]:
            mask |= 1 << j
    return mask


def sample_dataset(
    oracle: ValueOracle,
    distribution: Union[str, Tuple[str, float]],
    m: int,
    seed: int,
    session: Optional[QuerySession] = None,
) -> Dataset:
    """m i.i.d. subsets with exact oracle values; deterministic given seed."""
    if m < 1:
        raise ValueError("need at least one sample")
    kind, p = _parse_distribution(distribution)
    descriptor = kind if p is None else f"{kind}:{p}"
    session = session if session is not None else QuerySession()
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(m):
        s = Subset(_draw_mask(rng, oracle.n, kind, p), oracle.n)
        samples.append((s, oracle.evaluate(s, session)))
    return Dataset(samples=tuple(samples), distribution=descriptor, n=oracle.n, seed=seed)


def reduce_to_separator(
    dataset: Dataset, factor_fn: FactorFn
) -> Tuple[np.ndarray, np.ndarray, frozenset]:
    """Labeled separator points plus zero-weight element constraints.

    Returns (points, labels, zero_set) where points has columns
    (indicator bits..., value).  factor_fn(X) must be >= 1.
    """
    n = dataset.n
    rows: List[np.ndarray] = []
    labels: List[int] = []
    zero: set = set()
    for subset, value in dataset.samples:
        if value < 0:
            raise InvalidDatasetError(f"negative sample value {value} at {subset!r}")
        if value == 0:
            zero.update(subset.indices())
            continue
        alpha = float(factor_fn(subset))
        if alpha < 1 - _VALUE_SLACK:
            raise InvalidDatasetError(f"factor {alpha} below 1 at {subset!r}")
        ind = np.zeros(n + 1)
        for j in subset:
            ind[j] = 1.0
        plus = ind.copy()
        plus[n] = value
        minus = ind.copy()
        minus[n] = (alpha + 1.0) * value
        rows.extend([plus, minus])
        labels.extend([1, -1])
    points = np.array(rows) if rows else np.zeros((0, n + 1))
    return points, np.array(labels, dtype=int), frozenset(zero)


@dataclass(frozen=True)
class LearnedModel:
    """Separator-derived estimator.

    inner_form selects how w, z turn into the PMAC lower estimate:
      - "linear": direct route; raw w(X)/z lies in [f, (alpha+1) f] on good
        sets, so predict() divides raw by factor_fn(X).
      - "sqrt": curvature route; w/z lives in squared normalized space and
        predict() recombines with the singleton part.
      - "modular": exact modular model from kappa = 0.
    """

    w: np.ndarray
    z: float
    zero_set: frozenset
    alpha_factor: float
    n: int
    inner_form: str
    kappa_used: Optional[float] = None
    singletons: Optional[np.ndarray] = None
    factor_fn: Optional[FactorFn] = None

    def raw(self, s: Subset) -> float:
        return float(sum(self.w[j] for j in s)) / self.z

    def predict(self, s: Subset) -> float:
        if self.inner_form == "linear":
            denom = self.factor_fn(s) + 1.0 if self.factor_fn is not None else self.alpha_factor
            return self.raw(s) / denom
        if self.inner_form == "sqrt":
            kappa = self.kappa_used
            inner = math.sqrt(max(self.raw(s), 0.0) / (self.n + 1))
            mod = float(sum(self.singletons[j] for j in s))
            return kappa * inner + (1 - kappa) * mod
        if self.inner_form == "modular":
            return float(sum(self.singletons[j] for j in s))
        raise ValueError(f"unknown inner form {self.inner_form!r}")

    def claimed_factor(self, s: Optional[Subset] = None) -> float:
        if self.inner_form == "linear" and self.factor_fn is not None and s is not None:
            return self.factor_fn(s) + 1.0
        return self.alpha_factor


def learn_separator(
    points: np.ndarray, labels: np.ndarray, zero_constraints: frozenset, n: int
) -> Tuple[np.ndarray, float]:
    """Find u = (w, -z), w >= 0, z > 0 separating the labeled points.

    Linear feasibility first (margin-1 scaling, canonical minimal-weight
    vertex); a margin perceptron capped at 1e6 updates is the fallback.
    Raises LearningFailureError when neither route separates.
    """
    if points.shape[0] == 0:
        w = np.zeros(n)
        return w, 1.0
    if points.shape[1] != n + 1:
        raise ValueError(f"points must have {n + 1} columns")

    ind = points[:, :n]
    vals = points[:, n]
    y = labels.astype(float)

    # LP variables: w_0..w_{n-1}, z.  Constraint y * (w . ind - z*val) >= 1.
    a_rows = np.hstack([ind, -vals[:, None]]) * y[:, None]
    a_ub = -a_rows
    b_ub = -np.ones(len(points))
    bounds = [(0, 0) if j in zero_constraints else (0, None) for j in range(n)]
    bounds.append((1, None))  # z >= 1; scale freedom makes this harmless
    cost = np.ones(n + 1)
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status == 0:
        return np.maximum(res.x[:n], 0.0), float(res.x[n])
    if res.status == 2:
        # Margin-1 infeasibility with w >= 0, z >= 1 rules out every strict
        # separator in the cone (scale freedom), so the perceptron cannot
        # succeed either.
        raise LearningFailureError(
            "separator LP infeasible; data is not realizable by a monotone reduction"
        )

    # Perceptron fallback on (ind, -val) with projection onto the feasible cone.
    u = np.zeros(n + 1)
    phi = np.hstack([ind, -vals[:, None]])
    updates = 0
    while updates < _PERCEPTRON_CAP:
        margins = y * (phi @ u)
        bad = np.nonzero(margins <= 0)[0]
        if len(bad) == 0:
            break
        i = bad[0]
        u += y[i] * phi[i]
        for j in zero_constraints:
            u[j] = 0.0
        u[:n] = np.maximum(u[:n], 0.0)
        u[n] = min(u[n], -1e-12)
        updates += 1
    margins = y * (phi @ u)
    if (margins <= 0).any():
        raise LearningFailureError(
            f"no separator after LP and {updates} perceptron updates; "
            "data may not come from a monotone submodular reduction"
        )
    return np.maximum(u[:n], 0.0), float(-u[n])


def learn_direct(dataset: Dataset, factor_fn: FactorFn) -> LearnedModel:
    """Lemma-style direct route: reduce, separate, keep the factor function."""
    points, labels, zero = reduce_to_separator(dataset, factor_fn)
    w, z = learn_separator(points, labels, zero, dataset.n)
    return LearnedModel(
        w=w,
        z=z,
        zero_set=zero,
        alpha_factor=float("nan"),
        n=dataset.n,
        inner_form="linear",
        factor_fn=factor_fn,
    )


def pmac_learn_curvature(
    dataset: Dataset, singletons: Sequence[float], kappa_upper: float
) -> LearnedModel:
    """Curvature-corrected learner from samples, singletons, and a curvature
    upper bound.

    Sample values are moved to the curve-normalized scale; a negative
    normalized value certifies that kappa_upper is below the true curvature
    and raises InvalidOverrideError.  The normalized part is learned in
    squared space with multiplier n+1 and recombined, with claimed factor
    sqrt(n+1) / (1 + (sqrt(n+1) - 1)(1 - kappa_upper)).
    """
    if not 0.0 <= kappa_upper <= 1.0:
        raise InvalidOverrideError(f"kappa_upper={kappa_upper} outside [0, 1]")
    n = dataset.n
    singles = np.asarray(singletons, dtype=float)
    if singles.shape != (n,):
        raise ValueError(f"expected {n} singleton values")

    scale = max(1.0, max((abs(v) for _, v in dataset.samples), default=1.0))
    if kappa_upper == 0.0:
        # kappa = 0 asserts f is modular; the samples must agree exactly.
        for subset, value in dataset.samples:
            mod = float(sum(singles[j] for j in subset))
            if abs(value - mod) > _VALUE_SLACK * scale:
                raise InvalidOverrideError(
                    f"kappa_upper=0 but sample at {subset!r} deviates from modular value"
                )
        return LearnedModel(
            w=singles.copy(),
            z=1.0,
            zero_set=frozenset(j for j in range(n) if singles[j] == 0),
            alpha_factor=1.0,
            n=n,
            inner_form="modular",
            kappa_used=0.0,
            singletons=singles,
        )

    normalized = []
    for subset, value in dataset.samples:
        mod = float(sum(singles[j] for j in subset))
        v = (value - (1 - kappa_upper) * mod) / kappa_upper
        if v < -_VALUE_SLACK * scale:
            raise InvalidOverrideError(
                f"normalized value {v} < 0 at {subset!r}: kappa_upper={kappa_upper} "
                "is below the function's curvature"
            )
        normalized.append((subset, max(v, 0.0) ** 2))

    squared = Dataset(
        samples=tuple(normalized), distribution=dataset.distribution, n=n, seed=dataset.seed
    )
    points, labels, zero = reduce_to_separator(squared, lambda s: float(n))
    w, z = learn_separator(points, labels, zero, n)
    root = math.sqrt(n + 1.0)
    claimed = root / (1 + (root - 1) * (1 - kappa_upper))
    return LearnedModel(
        w=w,
        z=z,
        zero_set=zero,
        alpha_factor=claimed,
        n=n,
        inner_form="sqrt",
        kappa_used=float(kappa_upper),
        singletons=singles,
    )


@dataclass(frozen=True)
class PmacReport:
    success_fraction: float
    factor: float
    test_count: int


def evaluate_pmac(
    oracle: ValueOracle,
    model: LearnedModel,
    test_distribution: Union[str, Tuple[str, float]],
    test_count: int,
    factor: Union[float, FactorFn],
    seed: int,
) -> PmacReport:
    """Fraction of fresh draws with fhat(X) <= f(X) <= factor * fhat(X)."""
    kind, p = _parse_distribution(test_distribution)
    rng = np.random.default_rng(seed)
    session = QuerySession()
    hits = 0
    factors = []
    for _ in range(test_count):
        s = Subset(_draw_mask(rng, oracle.n, kind, p), oracle.n)
        f = oracle.evaluate(s, session)
        fhat = model.predict(s)
        fct = float(factor(s)) if callable(factor) else float(factor)
        factors.append(fct)
        tol = _VALUE_SLACK * (1 + abs(f))
        if fhat <= f + tol and f <= fct * fhat + tol:
            hits += 1
    mean_factor = float(np.mean(factors)) if factors else float("nan")
    return PmacReport(
        success_fraction=hits / test_count if test_count else 0.0,
        factor=mean_factor,
        test_count=test_count,
    )


def explicit_separator(singletons: Sequence[float], dataset: Dataset) -> Tuple[np.ndarray, float]:
    """The constructive separator witness: w(j) = f(j) + delta on positive
    singletons (zero otherwise), z = 1, with delta = (min positive sample
    value) / (2n), strictly inside the delta*n < min f(X) requirement."""
    singles = np.asarray(singletons, dtype=float)
    n = dataset.n
    positive = [v for _, v in dataset.samples if v > 0]
    delta = (min(positive) / (2 * n)) if positive else 0.0
    w = np.where(singles > 0, singles + delta, 0.0)
    return w, 1.0


def classifies_all(points: np.ndarray, labels: np.ndarray, w: np.ndarray, z: float) -> bool:
    """True when sign(w . 1_X - z*value) matches every label strictly."""
    if points.shape[0] == 0:
        return True
    n = len(w)
    margins = labels * (points[:, :n] @ w - z * points[:, n])
    return bool((margins > 0).all())
