"""Approximating a submodular function everywhere.

Two surrogate families: the modular upper bound sum_{j in X} f(j), and a
best-fit sqrt-of-modular form sqrt(w(X)) with a certified sandwich factor
gamma, combined with the curve-normalized decomposition so that only the
curved part of f is approximated and the modular part is kept exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .core import TABLE_LIMIT, QuerySession, Subset, all_masks
from .curvature import DecomposedFunction
from .errors import CertificationError, ScaleError
from .oracles import ModularSpec, ValueOracle, singleton_vector

SANDWICH_SLACK = 1e-9
_BISECT_REL_TOL = 1e-6
_BISECT_MAX_ITER = 50


def modular_upper_bound(oracle: ValueOracle, session: Optional[QuerySession] = None) -> ValueOracle:
    """The modular surrogate sum_{j in X} f(j); upper-bounds f everywhere."""
    singles = singleton_vector(oracle, session)
    return ValueOracle(ModularSpec(tuple(singles)), oracle.n)


@dataclass(frozen=True)
class SqrtModularFit:
    """Nonnegative weights w and certified gamma with
    sqrt(w(X)) <= g(X) <= gamma * sqrt(w(X)) on the constraint set."""

    w: np.ndarray
    gamma: float
    constraint_mode: str

    @property
    def alpha(self) -> float:
        return self.gamma

    def value(self, mask: int) -> float:
        total = 0.0
        m = mask
        while m:
            lsb = m & -m
            total += self.w[lsb.bit_length() - 1]
            m ^= lsb
        return math.sqrt(total)


@dataclass(frozen=True)
class ScaledModularFit:
    """Modular lower bound w(X) with certified w(X) <= g(X) <= alpha * w(X);
    the modular-upper-bound surrogate rescaled into sandwich form."""

    w: np.ndarray
    alpha: float

    def value(self, mask: int) -> float:
        total = 0.0
        m = mask
        while m:
            lsb = m & -m
            total += self.w[lsb.bit_length() - 1]
            m ^= lsb
        return total


InnerFit = Union[SqrtModularFit, ScaledModularFit]


def scaled_modular_fit(decomposed: DecomposedFunction) -> ScaledModularFit:
    """Lower-bounding modular fit of the curve-normalized part.

    Uses sum_{j in X} f_norm(j) / n, which sandwiches f_norm within factor n
    by subadditivity and the modular bound (f_norm shares f's singletons).
    """
    n = decomposed.normalized.n
    return ScaledModularFit(w=np.asarray(decomposed.singletons, dtype=float) / n, alpha=float(n))


def _fit_masks_exhaustive(n: int, table_limit: int) -> list:
    if n > table_limit:
        raise ScaleError(f"exhaustive fit needs n <= {table_limit}, got {n}")
    return [int(m) for m in all_masks(n)[1:]]


def _fit_masks_sampled(n: int, count: int, seed: int) -> list:
    rng = np.random.default_rng(seed)
    masks = {1 << j for j in range(n)}
    masks.add((1 << n) - 1)
    for _ in range(count):
        bits = rng.integers(0, 2, size=n)
        masks.add(int(sum(1 << j for j in range(n) if bits[j])))
    masks.discard(0)
    return sorted(masks)


def fit_sqrt_modular(
    oracle_g: ValueOracle,
    mode: str = "exhaustive",
    sample_count: int = 4096,
    seed: int = 0,
    table_limit: int = TABLE_LIMIT,
) -> SqrtModularFit:
    """Best-fit sqrt-of-modular surrogate via bisection on gamma.

    For fixed gamma the sandwich sqrt(w(X)) <= g(X) <= gamma*sqrt(w(X)) is a
    pair of linear constraints in w (w(X) <= g(X)^2 and w(X) >= g(X)^2 /
    gamma^2), so each bisection step is one linear feasibility solve.  The
    bracket is [1, sqrt(n)*(1+1e-6)]: feasibility at sqrt(n) holds for every
    monotone submodular g at this scale, so infeasibility at the top signals
    a non-submodular input.  Sampled mode certifies the sandwich only on the
    sampled subsets (all singletons and V are always included).
    """
    n = oracle_g.n
    if mode == "exhaustive":
        masks = _fit_masks_exhaustive(n, table_limit)
        mode_tag = "exhaustive"
    elif mode == "sampled":
        masks = _fit_masks_sampled(n, sample_count, seed)
        mode_tag = f"sampled:{sample_count}:{seed}"
    else:
        raise ValueError(f"unknown fit mode {mode!r}")

    g2 = np.array([oracle_g.value(m) ** 2 for m in masks])
    if (g2 < -SANDWICH_SLACK).any():
        raise CertificationError("negative oracle value; fit requires nonnegative g")
    g2 = np.maximum(g2, 0.0)

    rows, cols = [], []
    for i, m in enumerate(masks):
        mm = m
        while mm:
            lsb = mm & -mm
            rows.append(i)
            cols.append(lsb.bit_length() - 1)
            mm ^= lsb
    data = np.ones(len(rows))
    ind = sparse.csr_matrix((data, (rows, cols)), shape=(len(masks), n))
    a_ub = sparse.vstack([ind, -ind], format="csr")

    def solve(gamma: float):
        b_ub = np.concatenate([g2, -g2 / gamma**2])
        res = linprog(np.zeros(n), A_ub=a_ub, b_ub=b_ub, bounds=(0, None), method="highs")
        return res.x if res.status == 0 else None

    lo, hi = 1.0, math.sqrt(n) * (1 + _BISECT_REL_TOL)
    w = solve(lo)
    if w is not None:
        gamma, best_w = lo, w
    else:
        best_w = solve(hi)
        if best_w is None:
            raise CertificationError(
                f"no sqrt-modular fit at gamma = sqrt(n) = {hi:.6g}; input looks non-submodular"
            )
        gamma = hi
        for _ in range(_BISECT_MAX_ITER):
            if gamma - lo <= _BISECT_REL_TOL * gamma:
                break
            mid = 0.5 * (lo + gamma)
            w = solve(mid)
            if w is not None:
                gamma, best_w = mid, w
            else:
                lo = mid

    fit = SqrtModularFit(w=np.asarray(best_w), gamma=float(gamma), constraint_mode=mode_tag)
    _validate_fit(fit, oracle_g, masks)
    return fit


def _validate_fit(fit: SqrtModularFit, oracle_g: ValueOracle, masks: Sequence[int]) -> None:
    # Independent re-check of the sandwich on every constrained subset.
    for m in masks:
        lo = fit.value(m)
        g = oracle_g.value(m)
        if lo > g * (1 + SANDWICH_SLACK) + SANDWICH_SLACK:
            raise CertificationError(f"fit lower bound violated at mask {m:#x}")
        if g > fit.gamma * lo * (1 + SANDWICH_SLACK) + SANDWICH_SLACK:
            raise CertificationError(f"fit upper bound violated at mask {m:#x}")


@dataclass(frozen=True)
class CorrectedSurrogate:
    """kappa * inner(X) + (1 - kappa) * sum_{j in X} singletons[j].

    With an inner fit satisfying inner <= f_norm <= alpha * inner, the
    combination satisfies

        fhat(X) <= f(X) <= alpha / (1 + (alpha - 1)(1 - kappa)) * fhat(X)
                <= fhat(X) / (1 - kappa).
    """

    kappa: float
    inner: InnerFit
    singletons: np.ndarray
    direction: str = "lower"

    def value(self, mask: int) -> float:
        mod = 0.0
        m = mask
        while m:
            lsb = m & -m
            mod += self.singletons[lsb.bit_length() - 1]
            m ^= lsb
        return self.kappa * self.inner.value(mask) + (1 - self.kappa) * mod

    @property
    def upper_factor(self) -> float:
        return corrected_factor(self.inner.alpha, self.kappa)


def corrected_factor(alpha: float, kappa: float) -> float:
    """alpha / (1 + (alpha - 1)(1 - kappa)), the curvature-corrected factor."""
    return alpha / (1 + (alpha - 1) * (1 - kappa))


def corrected_surrogate(decomposed: DecomposedFunction, inner_fit: InnerFit) -> CorrectedSurrogate:
    """Combine an inner fit of the curve-normalized part with the exact
    modular part; kappa = 0 keeps the modular part alone and is exact for
    modular f."""
    return CorrectedSurrogate(
        kappa=decomposed.kappa,
        inner=inner_fit,
        singletons=np.asarray(decomposed.singletons, dtype=float),
        direction="lower",
    )


@dataclass(frozen=True)
class FactorReport:
    """Worst observed approximation ratio and the subset attaining it."""

    worst_ratio: float
    witness: Subset
    mode: str


def approximation_factor(
    oracle: ValueOracle,
    surrogate,
    mode: str = "exhaustive",
    direction: str = "lower",
    sample_count: int = 4096,
    seed: int = 0,
    table_limit: int = TABLE_LIMIT,
) -> FactorReport:
    """Worst ratio of f against a surrogate over nonempty subsets.

    For a lower-bounding surrogate the ratio is f(X)/fhat(X) and the scan
    also certifies fhat <= f everywhere it looks (raising on violations
    beyond 1e-9 slack); direction="upper" mirrors this for upper bounds.
    Subsets with f = fhat = 0 carry no information and count as ratio 1.
    """
    n = oracle.n
    if mode == "exhaustive":
        if n > table_limit:
            raise ScaleError(f"exhaustive scan needs n <= {table_limit}, got {n}")
        masks = [int(m) for m in all_masks(n)[1:]]
        mode_tag = "exhaustive"
    elif mode == "sampled":
        masks = _fit_masks_sampled(n, sample_count, seed)
        mode_tag = f"sampled:{sample_count}:{seed}"
    else:
        raise ValueError(f"unknown scan mode {mode!r}")
    if direction not in ("lower", "upper"):
        raise ValueError(f"direction must be 'lower' or 'upper', got {direction!r}")

    worst, witness = 1.0, 0
    for m in masks:
        f = oracle.value(m)
        fh = surrogate.value(m)
        if direction == "lower":
            if fh > f * (1 + SANDWICH_SLACK) + SANDWICH_SLACK:
                raise CertificationError(
                    f"surrogate exceeds f at mask {m:#x}: {fh} > {f}"
                )
            num, den = f, fh
        else:
            if fh < f * (1 - SANDWICH_SLACK) - SANDWICH_SLACK:
                raise CertificationError(
                    f"surrogate below f at mask {m:#x}: {fh} < {f}"
                )
            num, den = fh, f
        if den <= 0:
            if num <= SANDWICH_SLACK:
                continue  # 0/0 subset, ratio defined as 1
            raise CertificationError(
                f"surrogate ratio undefined at mask {m:#x}: {num} / {den}"
            )
        ratio = num / den
        if ratio > worst:
            worst, witness = ratio, m
    return FactorReport(worst_ratio=worst, witness=Subset(witness, n), mode=mode_tag)
