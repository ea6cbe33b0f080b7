"""Value oracles for the monotone submodular function zoo.

Every oracle is normalized (f(empty) = 0), nonnegative, and immutable after
construction.  Query accounting happens only through ``ValueOracle.evaluate``
with an explicit ``QuerySession``; internal helpers such as ``value_table``
bypass accounting and are meant for exhaustive desk-scale work.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .core import QuerySession, Subset, all_masks, indicator_columns, popcount
from .errors import InvalidInstanceError


def _as_weight_tuple(w: Sequence[float]) -> Tuple[float, ...]:
    w = tuple(float(x) for x in w)
    if any(x < 0 for x in w):
        raise InvalidInstanceError("weights must be nonnegative")
    return w


def _modular_sum(w: Tuple[float, ...], mask: int) -> float:
    total = 0.0
    m = mask
    while m:
        lsb = m & -m
        total += w[lsb.bit_length() - 1]
        m ^= lsb
    return total


class FunctionSpec:
    """Closed-form description of a set function; evaluates masks directly."""

    def value(self, mask: int, n: int) -> float:
        raise NotImplementedError

    def values(self, masks: np.ndarray, n: int) -> np.ndarray:
        # Vectorized path used by exhaustive scans; subclasses override.
        return np.array([self.value(int(m), n) for m in masks], dtype=float)

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class ModularSpec(FunctionSpec):
    """w(X) = sum of per-element weights."""

    w: Tuple[float, ...]

    def value(self, mask: int, n: int) -> float:
        return _modular_sum(self.w, mask)

    def values(self, masks: np.ndarray, n: int) -> np.ndarray:
        return indicator_columns(masks, n) @ np.asarray(self.w)

    def describe(self) -> str:
        return f"modular(n={len(self.w)})"


@dataclass(frozen=True)
class TruncationSpec(FunctionSpec):
    """h(X) = min(|X|, alpha); the canonical unit-curvature rank function."""

    alpha: float

    def value(self, mask: int, n: int) -> float:
        return float(min(mask.bit_count(), self.alpha))

    def values(self, masks: np.ndarray, n: int) -> np.ndarray:
        return np.minimum(popcount(masks), self.alpha).astype(float)

    def describe(self) -> str:
        return f"truncation(alpha={self.alpha})"


@dataclass(frozen=True)
class HiddenSetSpec(FunctionSpec):
    """f_R(X) = min(|X \\ R| + beta, |X|, alpha), the adversarial family."""

    r_mask: int
    alpha: int
    beta: float

    def value(self, mask: int, n: int) -> float:
        outside = (mask & ~self.r_mask).bit_count()
        return float(min(outside + self.beta, mask.bit_count(), self.alpha))

    def values(self, masks: np.ndarray, n: int) -> np.ndarray:
        outside = popcount(masks & np.uint64(((1 << n) - 1) ^ self.r_mask))
        return np.minimum(np.minimum(outside + self.beta, popcount(masks)), self.alpha).astype(float)

    def describe(self) -> str:
        return f"hidden(alpha={self.alpha},beta={self.beta})"


@dataclass(frozen=True)
class ConcaveOverModularSpec(FunctionSpec):
    """sum_i lam_i * (w_i(X))^a for a in (0, 1]."""

    terms: Tuple[Tuple[float, Tuple[float, ...]], ...]
    a: float

    def value(self, mask: int, n: int) -> float:
        return sum(lam * _modular_sum(w, mask) ** self.a for lam, w in self.terms)

    def values(self, masks: np.ndarray, n: int) -> np.ndarray:
        ind = indicator_columns(masks, n)
        out = np.zeros(len(masks))
        for lam, w in self.terms:
            out += lam * (ind @ np.asarray(w)) ** self.a
        return out

    def describe(self) -> str:
        return f"concave(a={self.a},terms={len(self.terms)})"


@dataclass(frozen=True)
class ModulatedSpec(FunctionSpec):
    """kappa * base(X) + (1 - kappa) * |X|; sets curvature to kappa for
    unit-singleton bases of curvature one."""

    base: FunctionSpec
    kappa: float

    def value(self, mask: int, n: int) -> float:
        return self.kappa * self.base.value(mask, n) + (1 - self.kappa) * mask.bit_count()

    def values(self, masks: np.ndarray, n: int) -> np.ndarray:
        return self.kappa * self.base.values(masks, n) + (1 - self.kappa) * popcount(masks)

    def describe(self) -> str:
        return f"modulated(kappa={self.kappa},base={self.base.describe()})"


@dataclass(frozen=True)
class SqrtModularSpec(FunctionSpec):
    """g(X) = sqrt(w(X)); exactly representable by the sqrt-of-modular fit."""

    w: Tuple[float, ...]

    def value(self, mask: int, n: int) -> float:
        return math.sqrt(_modular_sum(self.w, mask))

    def values(self, masks: np.ndarray, n: int) -> np.ndarray:
        return np.sqrt(indicator_columns(masks, n) @ np.asarray(self.w))

    def describe(self) -> str:
        return f"sqrtmodular(n={len(self.w)})"


@dataclass(frozen=True)
class TabulatedSpec(FunctionSpec):
    """Explicit table of 2^n values; mostly for handcrafted test instances."""

    table: Tuple[float, ...]

    def value(self, mask: int, n: int) -> float:
        return self.table[mask]

    def values(self, masks: np.ndarray, n: int) -> np.ndarray:
        return np.asarray(self.table, dtype=float)[masks.astype(np.int64)]

    def describe(self) -> str:
        return f"tabulated(n={int(math.log2(len(self.table)))})"


@dataclass(frozen=True)
class CurveNormalizedSpec(FunctionSpec):
    """(f(X) - (1 - kappa) * sum_{j in X} f(j)) / kappa for kappa > 0."""

    base: FunctionSpec
    kappa: float
    singletons: Tuple[float, ...]

    def value(self, mask: int, n: int) -> float:
        raw = self.base.value(mask, n) - (1 - self.kappa) * _modular_sum(self.singletons, mask)
        return raw / self.kappa

    def values(self, masks: np.ndarray, n: int) -> np.ndarray:
        mod = indicator_columns(masks, n) @ np.asarray(self.singletons)
        return (self.base.values(masks, n) - (1 - self.kappa) * mod) / self.kappa

    def describe(self) -> str:
        return f"curvenorm(kappa={self.kappa},base={self.base.describe()})"


@dataclass(frozen=True)
class ValueOracle:
    """Immutable evaluator for a set function over a ground set of size n."""

    spec: FunctionSpec
    n: int

    def evaluate(self, s: Subset, session: QuerySession) -> float:
        """f(S); increments the session counter by exactly one."""
        if s.n != self.n:
            raise ValueError(f"subset over ground set {s.n} fed to oracle over {self.n}")
        session.tick()
        return self.spec.value(s.mask, self.n)

    def value(self, mask: int) -> float:
        """Uncounted evaluation for surrogates and exhaustive scans."""
        return self.spec.value(mask, self.n)

    def value_table(self, limit: int = 22) -> np.ndarray:
        """All 2^n values, f indexed by mask; uncounted."""
        masks = all_masks(self.n, limit)
        return self.spec.values(masks, self.n)


def evaluate(oracle: ValueOracle, s: Subset, session: QuerySession) -> float:
    return oracle.evaluate(s, session)


def make_modular(w: Sequence[float]) -> ValueOracle:
    w = _as_weight_tuple(w)
    return ValueOracle(ModularSpec(w), len(w))


def make_truncation(n: int, alpha: float) -> ValueOracle:
    if alpha < 0:
        raise InvalidInstanceError("truncation level must be nonnegative")
    return ValueOracle(TruncationSpec(float(alpha)), n)


def make_hidden_set(n: int, alpha: int, beta: float, r: Subset) -> ValueOracle:
    """The hidden-set adversarial family f_R(X) = min(|X \\ R| + beta, |X|, alpha)."""
    if r.n != n:
        raise InvalidInstanceError(f"R lives on ground set {r.n}, expected {n}")
    if r.cardinality != alpha:
        raise InvalidInstanceError(f"|R|={r.cardinality} must equal alpha={alpha}")
    if beta < 1:
        raise InvalidInstanceError(f"beta={beta} must be at least 1")
    if alpha > n:
        raise InvalidInstanceError(f"alpha={alpha} exceeds ground set size {n}")
    return ValueOracle(HiddenSetSpec(r.mask, int(alpha), float(beta)), n)


def make_modulated(base: ValueOracle, kappa: float) -> ValueOracle:
    """kappa * base + (1 - kappa) * cardinality.

    For a unit-singleton base of curvature one the result has total
    curvature exactly kappa (checked in tests, not here).
    """
    if not 0.0 <= kappa <= 1.0:
        raise InvalidInstanceError(f"kappa={kappa} outside [0, 1]")
    return ValueOracle(ModulatedSpec(base.spec, float(kappa)), base.n)


def make_concave_over_modular(
    terms: Sequence[Tuple[float, Sequence[float]]], a: float, n: Optional[int] = None
) -> ValueOracle:
    if not 0.0 < a <= 1.0:
        raise InvalidInstanceError(f"exponent a={a} outside (0, 1]")
    if not terms:
        raise InvalidInstanceError("need at least one (lambda, weights) term")
    norm = []
    for lam, w in terms:
        if lam < 0:
            raise InvalidInstanceError("term coefficients must be nonnegative")
        norm.append((float(lam), _as_weight_tuple(w)))
    sizes = {len(w) for _, w in norm}
    if len(sizes) != 1:
        raise InvalidInstanceError("all weight vectors must share one length")
    size = sizes.pop()
    if n is not None and n != size:
        raise InvalidInstanceError(f"weight length {size} does not match n={n}")
    return ValueOracle(ConcaveOverModularSpec(tuple(norm), float(a)), size)


def make_sqrt_modular(w: Sequence[float]) -> ValueOracle:
    w = _as_weight_tuple(w)
    return ValueOracle(SqrtModularSpec(w), len(w))


def make_tabulated(values: Sequence[float]) -> ValueOracle:
    values = tuple(float(v) for v in values)
    n = (len(values) - 1).bit_length()
    if len(values) != 1 << n or len(values) < 2:
        raise InvalidInstanceError(f"table length {len(values)} is not a power of two >= 2")
    if abs(values[0]) > 0:
        raise InvalidInstanceError("tabulated oracle must be normalized: table[0] == 0")
    if any(v < 0 for v in values):
        raise InvalidInstanceError("tabulated values must be nonnegative")
    return ValueOracle(TabulatedSpec(values), n)


def singleton_vector(oracle: ValueOracle, session: Optional[QuerySession] = None) -> np.ndarray:
    """(f({0}), ..., f({n-1})) using exactly n oracle queries."""
    session = session if session is not None else QuerySession()
    n = oracle.n
    return np.array(
        [oracle.evaluate(Subset(1 << j, n), session) for j in range(n)], dtype=float
    )
