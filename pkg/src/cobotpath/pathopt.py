"""Pick one IK solution per via-point by shortest path over the layered graph.

Layer i holds the solutions at via-point i; every solution in layer i has a
directed edge to every solution in layer i + 1. Six edge costs are
available: sum, max and population standard deviation of the joint
displacements, a weighted mix of those three, the manipulability of the
target configuration, and a weighted mix of the last two.
"""
from __future__ import annotations

import enum
import heapq
import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from cobotpath.kinematics import JointConfig, RobotGeometry, manipulability, position_jacobian, wrap_angle

BRUTE_FORCE_LIMIT = 10**6
NEGATED_EPS = 1e-9


class DisconnectedLayerError(RuntimeError):
    """A layer has no solutions, so no path crosses it."""

    def __init__(self, index: int, empty: Sequence[int] = ()):
        self.index = index
        self.empty = tuple(empty) or (index,)
        super().__init__(f"via-point {index} has no IK solution (empty layers: {list(self.empty)})")


class TooLargeError(RuntimeError):
    pass


class CostKind(str, enum.Enum):
    F1 = "f1"
    F2 = "f2"
    F3 = "f3"
    F4 = "f4"
    F5 = "f5"
    F6 = "f6"


class AngleDiff(str, enum.Enum):
    WRAPPED = "wrapped"
    RAW = "raw"


class F5Direction(str, enum.Enum):
    AS_PAPER = "as-paper"
    NEGATED = "negated"


@dataclass(frozen=True)
class CostFunctionSpec:
    """Edge-cost choice and its weights.

    ``f5_direction=NEGATED`` replaces the manipulability w by 1/(w + 1e-9) so
    that minimising favours well-conditioned configurations.
    """

    kind: CostKind = CostKind.F1
    w1: float = 0.4
    w2: float = 0.2
    w3: float = 0.4
    w4: float = 1 / (1 + 1e-6)
    w5: float = 1e-6 / (1 + 1e-6)
    angle_diff: AngleDiff = AngleDiff.WRAPPED
    f5_direction: F5Direction = F5Direction.AS_PAPER

    def __post_init__(self):
        object.__setattr__(self, "kind", CostKind(self.kind))
        object.__setattr__(self, "angle_diff", AngleDiff(self.angle_diff))
        object.__setattr__(self, "f5_direction", F5Direction(self.f5_direction))
        for group in ((self.w1, self.w2, self.w3), (self.w4, self.w5)):
            if any(w <= 0 for w in group):
                raise ValueError(f"weights must be positive, got {group}")
            if abs(sum(group) - 1.0) > 1e-9:
                raise ValueError(f"weights must sum to 1, got {group} (sum {sum(group)})")


def _theta(q) -> np.ndarray:
    return q.theta if isinstance(q, JointConfig) else np.asarray(q, dtype=float)


def _abs_diff(spec: CostFunctionSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = b - a
    if spec.angle_diff is AngleDiff.WRAPPED:
        d = wrap_angle(d)
    return np.abs(d)


def _displacement_cost(spec: CostFunctionSpec, J: np.ndarray) -> np.ndarray:
    """F1..F4 from absolute displacements J (last axis = the six joints)."""
    f1 = np.sum(J, axis=-1)
    if spec.kind is CostKind.F1:
        return f1
    f2 = np.max(J, axis=-1)
    if spec.kind is CostKind.F2:
        return f2
    mean = f1 / 6.0
    f3 = np.sqrt(np.sum((J - mean[..., None]) ** 2, axis=-1) / 6.0)
    if spec.kind is CostKind.F3:
        return f3
    return spec.w1 * f1 + spec.w2 * f2 + spec.w3 * f3


def _target_cost(spec: CostFunctionSpec, q, geom: RobotGeometry) -> float:
    w = manipulability(position_jacobian(geom, _theta(q)))
    if spec.f5_direction is F5Direction.NEGATED:
        return 1.0 / (w + NEGATED_EPS)
    return w


def edge_cost(spec: CostFunctionSpec, qs, qt, geom: RobotGeometry | None = None) -> float:
    """Cost of moving from configuration ``qs`` to ``qt``."""
    if spec.kind in (CostKind.F5, CostKind.F6):
        geom = geom or RobotGeometry.default()
        f5 = _target_cost(spec, qt, geom)
        if spec.kind is CostKind.F5:
            return f5
        f4 = float(_displacement_cost(replace_kind(spec, CostKind.F4), _abs_diff(spec, _theta(qs), _theta(qt))))
        return spec.w4 * f4 + spec.w5 * f5
    return float(_displacement_cost(spec, _abs_diff(spec, _theta(qs), _theta(qt))))


def replace_kind(spec: CostFunctionSpec, kind: CostKind | str) -> CostFunctionSpec:
    return replace(spec, kind=CostKind(kind))


def cost_matrix(spec: CostFunctionSpec, src: Sequence, dst: Sequence,
                geom: RobotGeometry | None = None, target_costs: np.ndarray | None = None) -> np.ndarray:
    """len(src) x len(dst) matrix of edge costs; agrees with `edge_cost` entrywise."""
    A = np.array([_theta(q) for q in src]).reshape(len(src), 6)
    B = np.array([_theta(q) for q in dst]).reshape(len(dst), 6)
    if spec.kind in (CostKind.F5, CostKind.F6):
        geom = geom or RobotGeometry.default()
        if target_costs is None:
            target_costs = np.array([_target_cost(spec, q, geom) for q in dst])
        if spec.kind is CostKind.F5:
            return np.broadcast_to(target_costs, (len(src), len(dst))).copy()
        f4 = _displacement_cost(replace_kind(spec, CostKind.F4), _abs_diff(spec, A[:, None, :], B[None, :, :]))
        return spec.w4 * f4 + spec.w5 * target_costs[None, :]
    return _displacement_cost(spec, _abs_diff(spec, A[:, None, :], B[None, :, :]))


@dataclass(frozen=True)
class SolutionGraph:
    """Layered DAG; edges are implicit (complete bipartite between neighbours)."""

    layers: tuple[tuple[JointConfig, ...], ...]
    via_index: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(tuple(layer) for layer in self.layers))
        if not self.via_index:
            object.__setattr__(self, "via_index", tuple(range(len(self.layers))))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(layer) for layer in self.layers)

    @property
    def n_edges(self) -> int:
        s = self.sizes
        return sum(a * b for a, b in zip(s[:-1], s[1:]))

    @property
    def empty_layers(self) -> tuple[int, ...]:
        return tuple(i for i, layer in enumerate(self.layers) if not layer)

    def require_connected(self) -> None:
        empty = self.empty_layers
        if empty:
            raise DisconnectedLayerError(self.via_index[empty[0]], [self.via_index[i] for i in empty])

    def cost_matrices(self, spec: CostFunctionSpec, geom: RobotGeometry | None = None) -> list[np.ndarray]:
        self.require_connected()
        geom = geom or RobotGeometry.default()
        mats = []
        for a, b in zip(self.layers[:-1], self.layers[1:]):
            tc = None
            if spec.kind in (CostKind.F5, CostKind.F6):
                tc = np.array([_target_cost(spec, q, geom) for q in b])
            mats.append(cost_matrix(spec, a, b, geom, target_costs=tc))
        return mats

    def truncated(self, n_layers: int) -> "SolutionGraph":
        return SolutionGraph(self.layers[:n_layers], self.via_index[:n_layers])


def build_graph(layers, allow_empty: bool = False) -> SolutionGraph:
    """Graph from `SolutionLayer`s (or plain lists of configurations).

    Raises DisconnectedLayerError naming the first empty via-point unless
    ``allow_empty`` is set.
    """
    nodes = [tuple(getattr(layer, "solutions", layer)) for layer in layers]
    graph = SolutionGraph(tuple(nodes))
    if not allow_empty:
        graph.require_connected()
    return graph


@dataclass(frozen=True)
class PathResult:
    indices: tuple[int, ...]
    chosen: tuple[JointConfig, ...]
    total_cost: float
    per_edge_costs: tuple[float, ...]
    start_index: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "start_index", self.indices[0] if self.indices else -1)


def _edge_costs(costs: Sequence[np.ndarray], path: Sequence[int]) -> tuple[float, ...]:
    return tuple(float(c[path[i], path[i + 1]]) for i, c in enumerate(costs))


def dijkstra_layered(costs: Sequence[np.ndarray], sizes: Sequence[int]) -> tuple[float, tuple[int, ...]]:
    """Minimum-cost path through a layered DAG given its edge-cost matrices.

    Runs Dijkstra from each node of the first layer and keeps the best
    result; ties go to the lexicographically smallest index sequence.
    """
    n = len(sizes)
    if any(s == 0 for s in sizes):
        raise DisconnectedLayerError(next(i for i, s in enumerate(sizes) if s == 0))
    best: tuple[float, tuple[int, ...]] | None = None
    for start in range(sizes[0]):
        settled = set()
        heap: list[tuple[float, tuple[int, ...]]] = [(0.0, (start,))]
        while heap:
            d, path = heapq.heappop(heap)
            layer = len(path) - 1
            node = (layer, path[-1])
            if node in settled:
                continue
            settled.add(node)
            if layer == n - 1:
                # heap order is (cost, path) so the first last-layer pop is the best one
                if best is None or (d, path) < best:
                    best = (d, path)
                break
            row = costs[layer][path[-1]]
            for t in range(sizes[layer + 1]):
                if (layer + 1, t) not in settled:
                    heapq.heappush(heap, (d + float(row[t]), path + (t,)))
    total, path = best
    return total, _lexicographic_path(costs, sizes, total)


def _max_prefix(w: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Largest float p >= 0 with fl(p + w) <= target, elementwise (-inf if none).

    fl(p + w) is nondecreasing in p, and for non-negative doubles the int64
    bit pattern is ordered like the value, so bisect on the bits.
    """
    w, target = np.broadcast_arrays(np.asarray(w, dtype=float), np.asarray(target, dtype=float))
    ok = (w <= target) & np.isfinite(target)
    lo = np.zeros(w.shape, dtype=np.int64)
    hi = np.where(ok, np.maximum(target, 0.0), 0.0).view(np.int64).copy()
    for _ in range(64):
        mid = lo + (hi - lo + 1) // 2
        good = mid.view(np.float64) + w <= target
        lo = np.where(good, mid, lo)
        hi = np.where(good, hi, mid - 1)
    return np.where(ok, lo.view(np.float64), -np.inf)


def _lexicographic_path(costs: Sequence[np.ndarray], sizes: Sequence[int], total: float) -> tuple[int, ...]:
    """Lexicographically smallest path whose left-to-right float sum equals ``total``.

    Different prefixes can round to the same final sum, so the labels that
    Dijkstra keeps per node do not settle ties on their own. A backward sweep
    finds, per node, the largest partial cost that can still finish at
    ``total``; the forward pass then takes the first child that stays viable.
    """
    n = len(sizes)
    limit = [np.empty(0)] * n
    limit[-1] = np.full(sizes[-1], total)
    for i in range(n - 2, -1, -1):
        limit[i] = np.max(_max_prefix(costs[i], limit[i + 1][None, :]), axis=1)
    p = 0.0
    path = [next(j for j in range(sizes[0]) if p <= limit[0][j])]
    for i in range(n - 1):
        row = costs[i][path[-1]]
        k = next(t for t in range(sizes[i + 1]) if p + float(row[t]) <= limit[i + 1][t])
        p = p + float(row[k])
        path.append(k)
    return tuple(path)


def brute_force_layered(costs: Sequence[np.ndarray], sizes: Sequence[int]) -> tuple[float, tuple[int, ...]]:
    """Exhaustive search with the same tie-break as `dijkstra_layered`."""
    if any(s == 0 for s in sizes):
        raise DisconnectedLayerError(next(i for i, s in enumerate(sizes) if s == 0))
    if math.prod(sizes) > BRUTE_FORCE_LIMIT:
        raise TooLargeError(f"{math.prod(sizes)} paths exceeds the brute-force limit {BRUTE_FORCE_LIMIT}")
    best_cost, best_path = math.inf, None
    for path in itertools.product(*(range(s) for s in sizes)):
        total = 0.0
        for i, c in enumerate(costs):
            total = total + float(c[path[i], path[i + 1]])
        if total < best_cost:
            best_cost, best_path = total, path
    return best_cost, tuple(best_path)


def _result(graph: SolutionGraph, costs, total: float, path: tuple[int, ...]) -> PathResult:
    return PathResult(
        indices=path,
        chosen=tuple(graph.layers[i][k] for i, k in enumerate(path)),
        total_cost=float(total),
        per_edge_costs=_edge_costs(costs, path),
    )


def shortest_path(graph: SolutionGraph, spec: CostFunctionSpec | None = None,
                  geom: RobotGeometry | None = None) -> PathResult:
    spec = spec or CostFunctionSpec()
    costs = graph.cost_matrices(spec, geom)
    total, path = dijkstra_layered(costs, graph.sizes)
    return _result(graph, costs, total, path)


def brute_force_path(graph: SolutionGraph, spec: CostFunctionSpec | None = None,
                     geom: RobotGeometry | None = None) -> PathResult:
    spec = spec or CostFunctionSpec()
    graph.require_connected()
    if math.prod(graph.sizes) > BRUTE_FORCE_LIMIT:
        raise TooLargeError(f"{math.prod(graph.sizes)} paths exceeds the brute-force limit {BRUTE_FORCE_LIMIT}")
    costs = graph.cost_matrices(spec, geom)
    total, path = brute_force_layered(costs, graph.sizes)
    return _result(graph, costs, total, path)


def path_cost(graph: SolutionGraph, indices: Sequence[int], spec: CostFunctionSpec | None = None,
              geom: RobotGeometry | None = None) -> PathResult:
    """Evaluate a given per-layer choice under ``spec``."""
    spec = spec or CostFunctionSpec()
    costs = graph.cost_matrices(spec, geom)
    return _result(graph, costs, layered_path_cost(costs, indices), tuple(int(i) for i in indices))


def layered_path_cost(costs: Sequence[np.ndarray], indices: Sequence[int]) -> float:
    """Total cost of a per-layer choice, accumulated left to right like the searches."""
    total = 0.0
    for c in _edge_costs(costs, indices):
        total = total + c
    return total


def random_indices(graph: SolutionGraph, seed: int) -> tuple[int, ...]:
    graph.require_connected()
    rng = np.random.default_rng(seed)
    return tuple(int(rng.integers(m)) for m in graph.sizes)


def random_path(graph: SolutionGraph, seed: int, spec: CostFunctionSpec | None = None,
                geom: RobotGeometry | None = None) -> PathResult:
    """Uniform random choice per layer (seeded), costed under ``spec``."""
    return path_cost(graph, random_indices(graph, seed), spec, geom)
