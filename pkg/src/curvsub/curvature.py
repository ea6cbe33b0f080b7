"""Curvature quantities and the curve-normalized decomposition.

Total curvature of a monotone submodular f with positive singletons:

    kappa_f = 1 - min_j f(j | V \\ j) / f(j)

together with its set-restricted, averaged, and min-over-extensions
variants, and the decomposition

    f(X) = kappa * f_norm(X) + (1 - kappa) * sum_{j in X} f(j)

where f_norm is the curve-normalized part (curvature one when no
override is used).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from .core import TABLE_LIMIT, QuerySession, Subset, all_masks, popcount
from .errors import (
    InvalidOverrideError,
    IncompleteSampleError,
    NonSubmodularError,
    ZeroSingletonError,
)
from .oracles import CurveNormalizedSpec, ModularSpec, ValueOracle, singleton_vector

# Marginal-gain ratios may stray from [0, 1] by at most this much before the
# input is declared non-submodular rather than silently clamped.
RATIO_SLACK = 1e-9


@dataclass(frozen=True)
class CurvatureReport:
    """Total curvature, the element attaining it, and the query budget used."""

    total: float
    argmin_element: int
    queries_used: int


@dataclass(frozen=True)
class DecomposedFunction:
    """kappa, the curve-normalized oracle, and the singleton weight vector."""

    kappa: float
    normalized: ValueOracle
    singletons: np.ndarray

    def value(self, mask: int) -> float:
        """Reconstruct f(X) from the decomposition."""
        mod = sum(self.singletons[j] for j in range(self.normalized.n) if mask >> j & 1)
        return self.kappa * self.normalized.value(mask) + (1 - self.kappa) * mod


def _checked_ratio(gain: float, single: float, j: int) -> float:
    if single <= 0:
        raise ZeroSingletonError(
            f"f({{{j}}}) = {single}; prune zero-valued elements before curvature"
        )
    r = gain / single
    if r < -RATIO_SLACK or r > 1 + RATIO_SLACK:
        raise NonSubmodularError(
            f"gain ratio {r} for element {j} outside [0, 1]; input is not monotone submodular"
        )
    return min(max(r, 0.0), 1.0)


def total_curvature(oracle: ValueOracle, session: Optional[QuerySession] = None) -> CurvatureReport:
    """1 - min_j f(j | V \\ j)/f(j), using exactly 2n+1 oracle queries."""
    session = session if session is not None else QuerySession()
    start = session.count
    n = oracle.n
    singles = singleton_vector(oracle, session)
    full = Subset.full(n)
    co = [oracle.evaluate(full.remove(j), session) for j in range(n)]
    f_full = oracle.evaluate(full, session)
    best, arg = np.inf, 0
    for j in range(n):
        r = _checked_ratio(f_full - co[j], singles[j], j)
        if r < best:  # ties break toward the lowest element index
            best, arg = r, j
    used = session.count - start
    assert used == 2 * n + 1
    return CurvatureReport(total=1.0 - best, argmin_element=arg, queries_used=used)


def set_curvature(oracle: ValueOracle, s: Subset, session: Optional[QuerySession] = None) -> float:
    """kappa_f(S) = 1 - min_{j in S} f(j | S \\ j)/f(j)."""
    if s.mask == 0:
        raise ValueError("set curvature needs a nonempty set")
    session = session if session is not None else QuerySession()
    f_s = oracle.evaluate(s, session)
    best = np.inf
    for j in s:
        gain = f_s - oracle.evaluate(s.remove(j), session)
        single = oracle.evaluate(Subset(1 << j, s.n), session)
        best = min(best, _checked_ratio(gain, single, j))
    return 1.0 - best


def hat_curvature(oracle: ValueOracle, s: Subset, session: Optional[QuerySession] = None) -> float:
    """Averaged-gain curvature 1 - sum_j f(j | S \\ j) / sum_j f(j); never
    exceeds kappa_f(S)."""
    if s.mask == 0:
        raise ValueError("hat curvature needs a nonempty set")
    session = session if session is not None else QuerySession()
    f_s = oracle.evaluate(s, session)
    gain_sum, single_sum = 0.0, 0.0
    for j in s:
        gain = f_s - oracle.evaluate(s.remove(j), session)
        single = oracle.evaluate(Subset(1 << j, s.n), session)
        _checked_ratio(gain, single, j)
        gain_sum += gain
        single_sum += single
    return 1.0 - gain_sum / single_sum


def tilde_curvature(oracle: ValueOracle, s: Subset, table_limit: int = TABLE_LIMIT) -> float:
    """Min-over-extensions curvature

        1 - min_T [ f(T | S) + sum_{j in S & T} f(j | (S | T) \\ j) ] / f(T)

    with T ranging over subsets with f(T) > 0 (the empty set is always
    skipped).  Exhaustive over all T, so n is capped at ``table_limit``.
    Sits between kappa_f(S) and kappa_f.
    """
    if s.mask == 0:
        raise ValueError("tilde curvature needs a nonempty set")
    n = oracle.n
    table = oracle.value_table(table_limit)
    masks = all_masks(n)
    union = masks | np.uint64(s.mask)
    numer = table[union] - table[s.mask]
    for j in range(n):
        if not s.contains(j):
            continue
        bit = np.uint64(1 << j)
        in_t = (masks & bit).astype(bool)
        numer = numer + np.where(in_t, table[union] - table[union ^ bit], 0.0)
    denom = table[masks]
    ok = (denom > 0) & (masks != 0)
    if not ok.any():
        raise ZeroSingletonError("no subset with positive value to extend against")
    return 1.0 - float(np.min(numer[ok] / denom[ok]))


def curve_normalize(
    oracle: ValueOracle,
    kappa_override: Optional[float] = None,
    session: Optional[QuerySession] = None,
) -> DecomposedFunction:
    """Split f into its curve-normalized part and the scaled singleton part.

    With kappa = kappa_f (or an override >= kappa_f, which the sandwich
    results tolerate), the normalized part is

        f_norm(X) = (f(X) - (1 - kappa) sum_{j in X} f(j)) / kappa,

    a monotone nonnegative submodular function with curvature one when no
    override is used.  If kappa = 0 the normalized part is identically zero.
    """
    session = session if session is not None else QuerySession()
    report = total_curvature(oracle, session)
    kappa = report.total
    if kappa_override is not None:
        if kappa_override < kappa - RATIO_SLACK:
            raise InvalidOverrideError(
                f"override {kappa_override} is below the computed curvature {kappa}"
            )
        kappa = float(kappa_override)
    singles = singleton_vector(oracle, session)
    if kappa <= 0.0:
        zero = ValueOracle(ModularSpec(tuple(0.0 for _ in range(oracle.n))), oracle.n)
        return DecomposedFunction(kappa=0.0, normalized=zero, singletons=singles)
    spec = CurveNormalizedSpec(oracle.spec, kappa, tuple(singles))
    return DecomposedFunction(kappa=kappa, normalized=ValueOracle(spec, oracle.n), singletons=singles)


def estimate_curvature_from_samples(samples: Iterable[Tuple[Subset, float]]) -> float:
    """Total curvature from tabulated samples.

    Requires every singleton {j}, every co-singleton V \\ j, and V itself
    among the samples; raises IncompleteSampleError naming the first
    missing subset otherwise.
    """
    seen = {}
    n = None
    for subset, value in samples:
        if n is None:
            n = subset.n
        elif subset.n != n:
            raise ValueError("samples mix ground-set sizes")
        seen[subset.mask] = float(value)
    if n is None:
        raise IncompleteSampleError(0, "no samples given")
    full = (1 << n) - 1
    required = [full] + [1 << j for j in range(n)] + [full ^ (1 << j) for j in range(n)]
    for mask in required:
        if mask not in seen:
            raise IncompleteSampleError(mask, f"missing required sample {mask:#x}")
    best = np.inf
    for j in range(n):
        gain = seen[full] - seen[full ^ (1 << j)]
        best = min(best, _checked_ratio(gain, seen[1 << j], j))
    return 1.0 - best
