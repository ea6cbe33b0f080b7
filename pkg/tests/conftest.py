"""Shared fixtures: the function zoo and independent brute-force checkers.

The checkers work from plain value tables with their own formula loops so
they never share code paths with the library operations they validate.
"""
import math

import numpy as np
import pytest

from curvsub import (
    Subset,
    make_concave_over_modular,
    make_hidden_set,
    make_modular,
    make_modulated,
    make_sqrt_modular,
    make_tabulated,
    make_truncation,
)

TOL = 1e-9


def value_table_loop(oracle):
    """Scalar-path table of f over all masks (independent of spec.values)."""
    return np.array([oracle.value(m) for m in range(1 << oracle.n)])


def bf_is_monotone(table, n):
    for m in range(1 << n):
        for j in range(n):
            if not m >> j & 1 and table[m | (1 << j)] < table[m] - TOL:
                return False
    return True


def bf_is_submodular(table, n):
    # local exchange form: f(M+i) + f(M+j) >= f(M+i+j) + f(M)
    for m in range(1 << n):
        for i in range(n):
            if m >> i & 1:
                continue
            for j in range(i + 1, n):
                if m >> j & 1:
                    continue
                lhs = table[m | (1 << i)] + table[m | (1 << j)]
                rhs = table[m | (1 << i) | (1 << j)] + table[m]
                if lhs < rhs - TOL:
                    return False
    return True


def bf_total_curvature(table, n):
    full = (1 << n) - 1
    return 1.0 - min(
        (table[full] - table[full ^ (1 << j)]) / table[1 << j] for j in range(n)
    )


def bf_set_curvature(table, s_mask, n):
    js = [j for j in range(n) if s_mask >> j & 1]
    return 1.0 - min(
        (table[s_mask] - table[s_mask ^ (1 << j)]) / table[1 << j] for j in js
    )


def bf_hat_curvature(table, s_mask, n):
    js = [j for j in range(n) if s_mask >> j & 1]
    num = sum(table[s_mask] - table[s_mask ^ (1 << j)] for j in js)
    den = sum(table[1 << j] for j in js)
    return 1.0 - num / den


def bf_tilde_curvature(table, s_mask, n):
    best = math.inf
    for t_mask in range(1, 1 << n):
        ft = table[t_mask]
        if ft <= 0:
            continue
        u = s_mask | t_mask
        num = table[u] - table[s_mask]
        for j in range(n):
            if s_mask >> j & 1 and t_mask >> j & 1:
                num += table[u] - table[u ^ (1 << j)]
        best = min(best, num / ft)
    return 1.0 - best


def hidden_r(n, alpha, seed):
    rng = np.random.default_rng(seed)
    return Subset.from_indices(n, (int(j) for j in rng.choice(n, alpha, replace=False)))


def fixed_zoo():
    """One named instance per zoo variant plus curvature-spanning extras."""
    trunc_table = [min(m.bit_count(), 2.0) for m in range(1 << 4)]
    return [
        ("modular_123", make_modular([1, 2, 3])),
        ("modular_rand", make_modular([0.5, 2.25, 1.0, 3.5, 0.75, 1.5])),
        ("trunc_2_of_5", make_truncation(5, 2)),
        ("trunc_1_of_4", make_truncation(4, 1)),
        ("trunc_3_of_6", make_truncation(6, 3)),
        ("hidden_5", make_hidden_set(5, 2, 1, Subset.from_indices(5, [0, 1]))),
        ("hidden_8", make_hidden_set(8, 4, 2, hidden_r(8, 4, 11))),
        ("hidden_6", make_hidden_set(6, 3, 1, hidden_r(6, 3, 7))),
        ("sqrt_card_4", make_concave_over_modular([(1.0, [1, 1, 1, 1])], 0.5)),
        ("concave_49", make_concave_over_modular([(1.0, [4, 9])], 0.5)),
        ("concave_2term", make_concave_over_modular(
            [(1.0, [1, 2, 0.5, 1, 2]), (0.5, [2, 1, 1, 0.5, 1])], 0.25)),
        ("concave_a75", make_concave_over_modular([(2.0, [1, 0.5, 2, 1.5])], 0.75)),
        ("modulated_04", make_modulated(make_truncation(5, 2), 0.4)),
        ("modulated_05_hidden", make_modulated(
            make_hidden_set(5, 2, 1, Subset.from_indices(5, [0, 1])), 0.5)),
        ("lemma5_witness", make_modulated(make_truncation(6, 1), 0.5)),
        ("sqrtmodular", make_sqrt_modular([1, 0.5, 2, 1])),
        ("tabulated_trunc", make_tabulated(trunc_table)),
    ]


def random_zoo_oracle(rng, n):
    """A random monotone submodular instance with positive singletons."""
    kind = int(rng.integers(0, 6))
    if kind == 0:
        return make_modular(rng.uniform(0.2, 3.0, n))
    if kind == 1:
        return make_truncation(n, int(rng.integers(1, n + 1)))
    if kind == 2:
        alpha = int(rng.integers(1, n + 1))
        beta = int(rng.integers(1, alpha + 1))
        return make_hidden_set(n, alpha, beta, hidden_r(n, alpha, int(rng.integers(1 << 30))))
    if kind == 3:
        a = float(rng.choice([0.25, 0.5, 0.75, 1.0]))
        terms = [(float(rng.uniform(0.5, 2.0)), rng.uniform(0.2, 3.0, n))
                 for _ in range(int(rng.integers(1, 3)))]
        return make_concave_over_modular(terms, a)
    if kind == 4:
        return make_sqrt_modular(rng.uniform(0.2, 3.0, n))
    base = make_truncation(n, int(rng.integers(1, n)))
    return make_modulated(base, float(rng.uniform(0.0, 1.0)))


@pytest.fixture
def zoo():
    return fixed_zoo()
