"""Constrained minimization of monotone submodular functions.

Each constraint family carries an exact solver for nonnegative modular
objectives (k smallest weights, Kruskal, Dijkstra, max-flow min-cut,
exhaustive matchings).  The submodular minimizers route through surrogates:
MUB optimizes the singleton weights directly, EA runs a parametric sweep on
the sqrt-of-modular fit of the curve-normalized part and keeps the better
of its answer and the MUB answer.  Brute force enumerates the family at
desk scale and is the oracle for everything else.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .core import QuerySession, Subset
from .curvature import DecomposedFunction, curve_normalize, total_curvature
from .errors import InfeasibleConstraintError, ScaleError
from .graphs import Graph
from .oracles import ValueOracle, singleton_vector
from .approx import SqrtModularFit

_BRUTE_CARD_LIMIT = 20
_BRUTE_NODE_LIMIT = 8
_BRUTE_EDGE_LIMIT = 16
_FLOW_SCALE = 10**6
_SWEEP_POINTS = 64


class ConstraintFamily:
    """A family of feasible edge/element sets over a ground set of size n."""

    n: int
    kind: str

    def feasible(self, mask: int) -> bool:
        raise NotImplementedError

    def solve_modular(self, weights: np.ndarray) -> int:
        """Exact minimizer mask of w(X) over the family, deterministic."""
        raise NotImplementedError

    def feasible_masks(self) -> List[int]:
        """All members at desk scale, ascending by mask."""
        raise NotImplementedError

    def mub_bound_size(self) -> int:
        raise NotImplementedError

    def ea_bound_size(self) -> int:
        raise NotImplementedError

    def _check_weights(self, weights: np.ndarray) -> np.ndarray:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (self.n,):
            raise ValueError(f"expected {self.n} weights, got shape {weights.shape}")
        if (weights < 0).any():
            raise ValueError("modular solvers require nonnegative weights")
        return weights


class CardinalityLB(ConstraintFamily):
    """All X with |X| >= k."""

    kind = "card"

    def __init__(self, n: int, k: int):
        if not 1 <= k <= n:
            raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
        self.n = n
        self.k = k

    def feasible(self, mask: int) -> bool:
        return mask.bit_count() >= self.k

    def solve_modular(self, weights: np.ndarray) -> int:
        weights = self._check_weights(weights)
        order = np.argsort(weights, kind="stable")  # ties toward lowest index
        mask = 0
        for j in order[: self.k]:
            mask |= 1 << int(j)
        return mask

    def feasible_masks(self) -> List[int]:
        if self.n > _BRUTE_CARD_LIMIT:
            raise ScaleError(f"cardinality brute force capped at n={_BRUTE_CARD_LIMIT}")
        return [m for m in range(1 << self.n) if m.bit_count() >= self.k]

    def mub_bound_size(self) -> int:
        return self.k

    def ea_bound_size(self) -> int:
        return self.n


class _GraphFamily(ConstraintFamily):
    def __init__(self, graph: Graph):
        self.graph = graph
        self.n = graph.m

    def feasible_masks(self) -> List[int]:
        g = self.graph
        if g.node_count > _BRUTE_NODE_LIMIT or g.m > _BRUTE_EDGE_LIMIT:
            raise ScaleError(
                f"graph brute force capped at {_BRUTE_NODE_LIMIT} nodes / {_BRUTE_EDGE_LIMIT} edges"
            )
        return [m for m in range(1 << g.m) if self.feasible(m)]

    def _components_without(self, removed_mask: int) -> List[int]:
        """Component label per node using edges outside removed_mask."""
        g = self.graph
        adj = g.incident()
        label = [-1] * g.node_count
        comp = 0
        for start in range(g.node_count):
            if label[start] != -1:
                continue
            stack = [start]
            label[start] = comp
            while stack:
                u = stack.pop()
                for eid, v in adj[u]:
                    if removed_mask >> eid & 1:
                        continue
                    if label[v] == -1:
                        label[v] = comp
                        stack.append(v)
            comp += 1
        return label


class SpanningTree(_GraphFamily):
    """All spanning trees of the graph."""

    kind = "tree"

    def feasible(self, mask: int) -> bool:
        g = self.graph
        if mask.bit_count() != g.node_count - 1:
            return False
        parent = list(range(g.node_count))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for eid in range(g.m):
            if mask >> eid & 1:
                ru, rv = find(g.edges[eid][0]), find(g.edges[eid][1])
                if ru == rv:
                    return False
                parent[ru] = rv
        return len({find(v) for v in range(g.node_count)}) == 1

    def solve_modular(self, weights: np.ndarray) -> int:
        weights = self._check_weights(weights)
        g = self.graph
        parent = list(range(g.node_count))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        mask, picked = 0, 0
        for eid in sorted(range(g.m), key=lambda e: (weights[e], e)):
            u, v = g.edges[eid]
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                mask |= 1 << eid
                picked += 1
        if picked != g.node_count - 1:
            raise InfeasibleConstraintError("graph is disconnected; no spanning tree")
        return mask

    def mub_bound_size(self) -> int:
        return self.graph.node_count

    def ea_bound_size(self) -> int:
        return self.graph.m


class STPath(_GraphFamily):
    """All simple s-t paths (as edge sets)."""

    kind = "path"

    def __init__(self, graph: Graph, s: Optional[int] = None, t: Optional[int] = None):
        super().__init__(graph)
        self.s = graph.source if s is None else s
        self.t = graph.sink if t is None else t
        if self.s == self.t:
            raise ValueError("s-t path needs distinct endpoints")

    def feasible(self, mask: int) -> bool:
        g = self.graph
        deg = [0] * g.node_count
        for eid in range(g.m):
            if mask >> eid & 1:
                u, v = g.edges[eid]
                deg[u] += 1
                deg[v] += 1
        if deg[self.s] != 1 or deg[self.t] != 1:
            return False
        if any(d not in (0, 2) for i, d in enumerate(deg) if i not in (self.s, self.t)):
            return False
        # walk from s; a simple path uses every edge of the set exactly once
        adj = g.incident()
        used, node, steps = 0, self.s, 0
        while node != self.t:
            advanced = False
            for eid, v in adj[node]:
                if mask >> eid & 1 and not used >> eid & 1:
                    used |= 1 << eid
                    node = v
                    steps += 1
                    advanced = True
                    break
            if not advanced:
                return False
        return steps == mask.bit_count()

    def solve_modular(self, weights: np.ndarray) -> int:
        weights = self._check_weights(weights)
        g = self.graph
        dist = [math.inf] * g.node_count
        prev_edge = [-1] * g.node_count
        prev_node = [-1] * g.node_count
        dist[self.s] = 0.0
        heap = [(0.0, self.s)]
        adj = g.incident()
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for eid, v in adj[u]:
                nd = d + weights[eid]
                if nd < dist[v]:
                    dist[v] = nd
                    prev_edge[v] = eid
                    prev_node[v] = u
                    heapq.heappush(heap, (nd, v))
        if math.isinf(dist[self.t]):
            raise InfeasibleConstraintError(f"no path from {self.s} to {self.t}")
        mask, node = 0, self.t
        while node != self.s:
            mask |= 1 << prev_edge[node]
            node = prev_node[node]
        return mask

    def mub_bound_size(self) -> int:
        return self.graph.node_count

    def ea_bound_size(self) -> int:
        return self.graph.m


class STCut(_GraphFamily):
    """All edge sets whose removal disconnects s from t."""

    kind = "cut"

    def __init__(self, graph: Graph, s: Optional[int] = None, t: Optional[int] = None):
        super().__init__(graph)
        self.s = graph.source if s is None else s
        self.t = graph.sink if t is None else t
        if self.s == self.t:
            raise ValueError("s-t cut needs distinct endpoints")

    def feasible(self, mask: int) -> bool:
        labels = self._components_without(mask)
        return labels[self.s] != labels[self.t]

    def solve_modular(self, weights: np.ndarray) -> int:
        """Min cut via Edmonds-Karp max flow on integer-scaled capacities."""
        weights = self._check_weights(weights)
        g = self.graph
        caps = [int(round(w * _FLOW_SCALE)) for w in weights]
        # residual capacities per (edge id, direction); undirected edges get
        # full capacity both ways
        res = {}
        adj: List[List[int]] = [[] for _ in range(g.node_count)]
        for eid, (u, v) in enumerate(g.edges):
            res[(eid, 0)] = caps[eid]  # u -> v
            res[(eid, 1)] = caps[eid]  # v -> u
            adj[u].append(eid)
            adj[v].append(eid)

        def bfs():
            parent = {self.s: None}
            queue = [self.s]
            for u in queue:
                for eid in adj[u]:
                    a, b = g.edges[eid]
                    v = b if u == a else a
                    d = 0 if u == a else 1
                    if v not in parent and res[(eid, d)] > 0:
                        parent[v] = (eid, d, u)
                        if v == self.t:
                            return parent
                        queue.append(v)
            return None

        while True:
            parent = bfs()
            if parent is None:
                break
            # trace the augmenting path
            path = []
            node = self.t
            while parent[node] is not None:
                eid, d, u = parent[node]
                path.append((eid, d))
                node = u
            bottleneck = min(res[p] for p in path)
            for eid, d in path:
                res[(eid, d)] -= bottleneck
                res[(eid, 1 - d)] += bottleneck

        # source side of the residual graph gives the min cut
        reach = {self.s}
        queue = [self.s]
        for u in queue:
            for eid in adj[u]:
                a, b = g.edges[eid]
                v = b if u == a else a
                d = 0 if u == a else 1
                if v not in reach and res[(eid, d)] > 0:
                    reach.add(v)
                    queue.append(v)
        if self.t in reach:
            raise InfeasibleConstraintError("flow did not saturate; no finite cut found")
        mask = 0
        for eid, (u, v) in enumerate(g.edges):
            if (u in reach) != (v in reach):
                mask |= 1 << eid
        return mask

    def mub_bound_size(self) -> int:
        return self.graph.m

    def ea_bound_size(self) -> int:
        return self.graph.m


class PerfectMatching(_GraphFamily):
    """All perfect matchings; exhaustive at desk scale."""

    kind = "matching"

    def __init__(self, graph: Graph):
        super().__init__(graph)
        if graph.node_count % 2:
            raise ValueError("perfect matching needs an even node count")

    def feasible(self, mask: int) -> bool:
        g = self.graph
        covered = 0
        for eid in range(g.m):
            if mask >> eid & 1:
                u, v = g.edges[eid]
                bits = (1 << u) | (1 << v)
                if covered & bits:
                    return False
                covered |= bits
        return covered == (1 << g.node_count) - 1

    def _all_matchings(self) -> List[int]:
        g = self.graph
        if g.m > _BRUTE_EDGE_LIMIT:
            raise ScaleError(f"matching enumeration capped at {_BRUTE_EDGE_LIMIT} edges")
        adj = g.incident()
        out = []

        def extend(covered: int, mask: int):
            if covered == (1 << g.node_count) - 1:
                out.append(mask)
                return
            u = (~covered & -~covered).bit_length() - 1  # lowest uncovered node
            for eid, v in adj[u]:
                if not covered >> v & 1:
                    extend(covered | (1 << u) | (1 << v), mask | (1 << eid))

        extend(0, 0)
        return sorted(set(out))

    def solve_modular(self, weights: np.ndarray) -> int:
        weights = self._check_weights(weights)
        matchings = self._all_matchings()
        if not matchings:
            raise InfeasibleConstraintError("graph has no perfect matching")
        best_mask, best_val = None, math.inf
        for m in matchings:  # ascending masks: ties keep the lowest mask
            val = sum(weights[e] for e in range(self.graph.m) if m >> e & 1)
            if val < best_val:
                best_mask, best_val = m, val
        return best_mask

    def feasible_masks(self) -> List[int]:
        return self._all_matchings()

    def mub_bound_size(self) -> int:
        return self.graph.node_count

    def ea_bound_size(self) -> int:
        return self.graph.m


def solve_modular(constraint: ConstraintFamily, weights: Sequence[float]) -> Subset:
    """Exact minimizer of a nonnegative modular function over the family."""
    mask = constraint.solve_modular(np.asarray(weights, dtype=float))
    return Subset(mask, constraint.n)


def table1_bound(family_kind: str, method: str, size: float, kappa: float) -> float:
    """Closed-form a-priori factors for constrained minimization.

    MUB entries: card k/(1+(k-1)(1-kappa)); tree and path n/(1+(n-1)(1-kappa));
    matching n/(2+(n-2)(1-kappa)); cut m/(1+(m-1)(1-kappa)).  EA entries use
    sqrt(s)*ln(s) as the leading term (natural log, order of magnitude only,
    floored at 1 so the factor is never vacuous), with s = n for cardinality
    and s = m for the graph families.
    """
    if not 0.0 <= kappa <= 1.0:
        raise ValueError(f"kappa={kappa} outside [0, 1]")
    if method == "mub":
        if family_kind in ("card", "tree", "path", "cut"):
            t = float(size)
        elif family_kind == "matching":
            t = float(size)
            return t / (2 + (t - 2) * (1 - kappa))
        else:
            raise ValueError(f"unknown family kind {family_kind!r}")
        return t / (1 + (t - 1) * (1 - kappa))
    if method == "ea":
        if family_kind not in ("card", "tree", "path", "cut", "matching"):
            raise ValueError(f"unknown family kind {family_kind!r}")
        s = float(size)
        t = max(1.0, math.sqrt(s) * math.log(s)) if s > 1 else 1.0
        return t / (1 + (t - 1) * (1 - kappa))
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class SolveResult:
    solution: Subset
    true_value: float
    surrogate_value: float
    feasible: bool
    bound: float
    method: str


def minimize_mub(
    oracle: ValueOracle,
    constraint: ConstraintFamily,
    session: Optional[QuerySession] = None,
) -> SolveResult:
    """Minimize the modular upper bound sum f(j) over the family.

    The solution inherits the curvature-dependent factor
    |X*| / (1 + (|X*| - 1)(1 - kappa_f(X*))) against the true optimum; the
    reported bound is the family's closed-form relaxation of that factor.
    """
    session = session if session is not None else QuerySession()
    if oracle.n != constraint.n:
        raise ValueError("oracle and constraint ground sets differ")
    singles = singleton_vector(oracle, session)
    solution = solve_modular(constraint, singles)
    true_value = oracle.evaluate(solution, session)
    surrogate = float(sum(singles[j] for j in solution))
    kappa = total_curvature(oracle, session).total
    bound = table1_bound(constraint.kind, "mub", constraint.mub_bound_size(), kappa)
    return SolveResult(
        solution=solution,
        true_value=true_value,
        surrogate_value=surrogate,
        feasible=constraint.feasible(solution.mask),
        bound=bound,
        method="MUB",
    )


def _sweep_lambdas(kappa: float, w: np.ndarray, singletons: np.ndarray) -> np.ndarray:
    # Geometric grid centered on the scale where the concave and modular
    # parts of the objective balance; 12 decades cover the tangent point
    # kappa / (2 sqrt(w(X))) for any plausible X.
    num = 1.0 + (1 - kappa) * float(np.mean(singletons))
    den = 1.0 + math.sqrt(float(np.sum(w)))
    center = num / den
    grid = center * np.geomspace(1e-6, 1e6, _SWEEP_POINTS)
    return np.concatenate([[0.0], grid])


def minimize_ea(
    oracle: ValueOracle,
    constraint: ConstraintFamily,
    fit: SqrtModularFit,
    session: Optional[QuerySession] = None,
    decomposed: Optional[DecomposedFunction] = None,
) -> SolveResult:
    """Minimize kappa*sqrt(w(X)) + (1-kappa)*sum f(j) via a parametric sweep.

    Each lambda on a geometric grid turns the objective into a nonnegative
    modular function lambda*w + (1-kappa)*singletons solved exactly per
    family; the sweep evaluates the true surrogate at every linear optimum
    and keeps the best, standing in for the FPTAS on concave-plus-modular
    objectives.  The result is then compared with the MUB solution under f
    and the better set is returned, so EA never does worse than MUB.
    """
    session = session if session is not None else QuerySession()
    if oracle.n != constraint.n:
        raise ValueError("oracle and constraint ground sets differ")
    if decomposed is None:
        decomposed = curve_normalize(oracle, session=session)
    kappa = decomposed.kappa
    singles = np.asarray(decomposed.singletons, dtype=float)
    w = np.asarray(fit.w, dtype=float)

    def ea_objective(mask: int) -> float:
        wx = sum(w[j] for j in range(constraint.n) if mask >> j & 1)
        mx = sum(singles[j] for j in range(constraint.n) if mask >> j & 1)
        return kappa * math.sqrt(wx) + (1 - kappa) * mx

    mub_mask = constraint.solve_modular(singles)

    best_mask = None
    if float(np.sum(w)) > 0:
        best_obj = math.inf
        for lam in _sweep_lambdas(kappa, w, singles):
            mask = constraint.solve_modular(lam * w + (1 - kappa) * singles)
            obj = ea_objective(mask)
            if obj < best_obj - 1e-15 or (best_mask is None):
                best_obj, best_mask = obj, mask
    if best_mask is None:
        best_mask = mub_mask  # degenerate fit, fall back to MUB

    f_sweep = oracle.evaluate(Subset(best_mask, constraint.n), session)
    f_mub = oracle.evaluate(Subset(mub_mask, constraint.n), session)
    final_mask = best_mask if f_sweep <= f_mub else mub_mask
    solution = Subset(final_mask, constraint.n)
    bound = table1_bound(constraint.kind, "ea", constraint.ea_bound_size(), kappa)
    return SolveResult(
        solution=solution,
        true_value=min(f_sweep, f_mub),
        surrogate_value=ea_objective(final_mask),
        feasible=constraint.feasible(final_mask),
        bound=bound,
        method="EA",
    )


def brute_force_min(oracle: ValueOracle, constraint: ConstraintFamily) -> SolveResult:
    """Exact minimizer by enumeration, lowest-mask tie-break; the
    independent oracle for every solver above."""
    if oracle.n != constraint.n:
        raise ValueError("oracle and constraint ground sets differ")
    masks = constraint.feasible_masks()
    if not masks:
        raise InfeasibleConstraintError("constraint family is empty")
    best_mask, best_val = None, math.inf
    for m in masks:
        val = oracle.value(m)
        if val < best_val:
            best_mask, best_val = m, val
    solution = Subset(best_mask, constraint.n)
    return SolveResult(
        solution=solution,
        true_value=best_val,
        surrogate_value=best_val,
        feasible=True,
        bound=1.0,
        method="BruteForce",
    )
