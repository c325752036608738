"""Empirical distributions on finite metric spaces and the transport metric.

Everything downstream compares name statistics through the Kantorovich
(earth mover) distance, so this module pins down the three ingredients:
the finite metric spaces names live on, exact rational empirical
distributions over them, and an exact transport solver.  The solver
cancels common mass first (for metric ground costs the value depends only
on the difference measure), takes a closed-form path under the discrete
metric, and otherwise runs successive shortest paths on the bipartite
transportation graph with Fraction arithmetic throughout.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import PositionOutOfRange, SpaceMismatch, ValidationError
from .groups import FiniteGroup


# ---------------------------------------------------------------------------
# metric spaces


@dataclass(frozen=True)
class DiscreteSpace:
    """Any hashables, distance 0/1."""

    def dist(self, a, b) -> Fraction:
        return Fraction(0) if a == b else Fraction(1)

    @property
    def discrete(self) -> bool:
        return True


@dataclass(frozen=True)
class GroupSpace:
    """Elements of a finite group under its bi-invariant metric."""

    group: FiniteGroup

    def dist(self, a, b) -> Fraction:
        return self.group.metric[a][b]

    @property
    def discrete(self) -> bool:
        return self.group.discrete


@dataclass(frozen=True)
class LabelGroupSpace:
    """Joint name coordinates (label, group element).

    Coordinate metric: 1 when the labels differ, the group metric
    otherwise.  Labels are open-ended ints so distributions from systems
    with different alphabets stay comparable.
    """

    group: FiniteGroup

    def dist(self, a, b) -> Fraction:
        if a[0] != b[0]:
            return Fraction(1)
        return self.group.metric[a[1]][b[1]]

    @property
    def discrete(self) -> bool:
        return self.group.discrete


@dataclass(frozen=True)
class BlockSpace:
    """Fixed-length tuples over a coordinate space, max metric."""

    coord: object
    length: int

    def dist(self, a, b) -> Fraction:
        if len(a) != self.length or len(b) != self.length:
            raise SpaceMismatch("block length mismatch")
        best = Fraction(0)
        cd = self.coord.dist
        for x, y in zip(a, b):
            d = cd(x, y)
            if d > best:
                best = d
                if best >= 1:
                    break
        return best

    @property
    def discrete(self) -> bool:
        return self.coord.discrete


@dataclass(frozen=True)
class TableMetricSpace:
    """An explicit finite metric, points indexed 0..len-1."""

    table: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.table)
        for i in range(n):
            if len(self.table[i]) != n:
                raise ValidationError("metric table must be square")
            if self.table[i][i] != 0:
                raise ValidationError("metric table diagonal must be zero")
            for j in range(n):
                d = self.table[i][j]
                if i != j and d <= 0:
                    raise ValidationError("metric table must be positive off diagonal")
                if d > 1:
                    raise ValidationError("metric table diameter must be at most 1")
                if d != self.table[j][i]:
                    raise ValidationError("metric table must be symmetric")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.table[i][j] > self.table[i][k] + self.table[k][j]:
                        raise ValidationError("metric table violates the triangle inequality")

    def dist(self, a, b) -> Fraction:
        return self.table[a][b]

    @property
    def discrete(self) -> bool:
        return all(d in (0, 1) for row in self.table for d in row)


# ---------------------------------------------------------------------------
# empirical distributions


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Finitely supported probability vector with exact rational weights.

    Construct through from_weights/from_samples; weights are stored sorted
    by key so equal distributions compare (and serialize) identically.
    """

    space: object
    weights: tuple[tuple[object, Fraction], ...]

    def __post_init__(self) -> None:
        total = Fraction(0)
        for _, w in self.weights:
            if w <= 0:
                raise ValidationError("weights must be positive")
            total += w
        if total != 1:
            raise ValidationError("weights must sum to 1")

    @staticmethod
    def from_weights(space, mapping: Mapping) -> "EmpiricalDistribution":
        total = Fraction(0)
        items = []
        for key, w in mapping.items():
            w = Fraction(w)
            if w < 0:
                raise ValidationError("negative weight at %r" % (key,))
            if w > 0:
                items.append((key, w))
                total += w
        if total <= 0:
            raise ValidationError("distribution has no mass")
        items.sort(key=lambda kv: kv[0])
        return EmpiricalDistribution(space, tuple((k, w / total) for k, w in items))

    @staticmethod
    def from_samples(space, samples: Iterable) -> "EmpiricalDistribution":
        counts: dict = {}
        n = 0
        for s in samples:
            counts[s] = counts.get(s, 0) + 1
            n += 1
        if n == 0:
            raise ValidationError("no samples")
        return EmpiricalDistribution.from_weights(
            space, {k: Fraction(c, n) for k, c in counts.items()}
        )

    def weight(self, key) -> Fraction:
        for k, w in self.weights:
            if k == key:
                return w
        return Fraction(0)

    def support(self) -> tuple:
        return tuple(k for k, _ in self.weights)

    def as_dict(self) -> dict:
        return dict(self.weights)

    def total(self) -> Fraction:
        return sum((w for _, w in self.weights), Fraction(0))


def _solve_transport(
    supply: list[tuple[object, Fraction]],
    demand: list[tuple[object, Fraction]],
    dist: Callable,
) -> Fraction:
    """Exact min-cost transport by successive shortest augmenting paths.

    Nodes: 0 = source, 1..ns = suppliers, ns+1..ns+nd = consumers,
    ns+nd+1 = sink.  Costs are Fractions; Johnson potentials keep reduced
    costs nonnegative so Dijkstra stays valid.  Ties break on node index.
    """
    ns = len(supply)
    nd = len(demand)
    n_nodes = ns + nd + 2
    src = 0
    snk = ns + nd + 1

    cost_sd = [[dist(supply[i][0], demand[j][0]) for j in range(nd)] for i in range(ns)]

    remaining_supply = [w for _, w in supply]
    remaining_demand = [w for _, w in demand]
    # flow on supplier->consumer arcs (reverse residuals derived from it)
    flow = [[Fraction(0)] * nd for _ in range(ns)]
    potential = [Fraction(0)] * n_nodes
    total_cost = Fraction(0)
    left = sum(remaining_supply, Fraction(0))

    while left > 0:
        dist_to = [None] * n_nodes
        prev = [None] * n_nodes
        dist_to[src] = Fraction(0)
        heap = [(Fraction(0), src)]
        while heap:
            d_u, u = heapq.heappop(heap)
            if dist_to[u] is None or d_u > dist_to[u]:
                continue
            if u == src:
                for i in range(ns):
                    if remaining_supply[i] > 0:
                        nd_i = d_u + potential[src] - potential[1 + i]
                        v = 1 + i
                        if dist_to[v] is None or nd_i < dist_to[v]:
                            dist_to[v] = nd_i
                            prev[v] = (src, None)
                            heapq.heappush(heap, (nd_i, v))
            elif 1 <= u <= ns:
                i = u - 1
                for j in range(nd):
                    w = d_u + cost_sd[i][j] + potential[u] - potential[1 + ns + j]
                    v = 1 + ns + j
                    if dist_to[v] is None or w < dist_to[v]:
                        dist_to[v] = w
                        prev[v] = (u, ("f", i, j))
                        heapq.heappush(heap, (w, v))
            elif u != snk:
                j = u - 1 - ns
                if remaining_demand[j] > 0:
                    w = d_u + potential[u] - potential[snk]
                    if dist_to[snk] is None or w < dist_to[snk]:
                        dist_to[snk] = w
                        prev[snk] = (u, None)
                        heapq.heappush(heap, (w, snk))
                for i in range(ns):
                    if flow[i][j] > 0:
                        w = d_u - cost_sd[i][j] + potential[u] - potential[1 + i]
                        v = 1 + i
                        if dist_to[v] is None or w < dist_to[v]:
                            dist_to[v] = w
                            prev[v] = (u, ("b", i, j))
                            heapq.heappush(heap, (w, v))
        if dist_to[snk] is None:
            raise ValidationError("transport network disconnected")  # pragma: no cover
        for v in range(n_nodes):
            if dist_to[v] is not None:
                potential[v] += dist_to[v]
        # walk the path, find bottleneck
        path = []
        v = snk
        while v != src:
            u, arc = prev[v]
            path.append((u, v, arc))
            v = u
        path.reverse()
        bottleneck = left
        for u, v, arc in path:
            if u == src:
                bottleneck = min(bottleneck, remaining_supply[v - 1])
            elif v == snk:
                bottleneck = min(bottleneck, remaining_demand[u - 1 - ns])
            elif arc is not None and arc[0] == "b":
                bottleneck = min(bottleneck, flow[arc[1]][arc[2]])
        for u, v, arc in path:
            if u == src:
                remaining_supply[v - 1] -= bottleneck
            elif v == snk:
                remaining_demand[u - 1 - ns] -= bottleneck
            elif arc[0] == "f":
                flow[arc[1]][arc[2]] += bottleneck
                total_cost += bottleneck * cost_sd[arc[1]][arc[2]]
            else:
                flow[arc[1]][arc[2]] -= bottleneck
                total_cost -= bottleneck * cost_sd[arc[1]][arc[2]]
        left -= bottleneck
    return total_cost


def kantorovich(
    d1: EmpiricalDistribution,
    d2: EmpiricalDistribution,
    *,
    method: str = "auto",
) -> Fraction:
    """Exact Kantorovich distance between two distributions on one space.

    method="auto" cancels common mass and uses the discrete closed form
    when available; method="flow" forces the general solver (used by the
    cross-checking tests).
    """
    if d1.space != d2.space:
        raise SpaceMismatch("distributions live on different spaces")
    if d1.weights == d2.weights:
        return Fraction(0)
    a = d1.as_dict()
    b = d2.as_dict()
    supply = []
    demand = []
    for k in sorted(set(a) | set(b)):
        wa = a.get(k, Fraction(0))
        wb = b.get(k, Fraction(0))
        if wa > wb:
            supply.append((k, wa - wb))
        elif wb > wa:
            demand.append((k, wb - wa))
    if not supply:
        return Fraction(0)
    if method == "auto" and d1.space.discrete:
        return sum((w for _, w in supply), Fraction(0))
    return _solve_transport(supply, demand, d1.space.dist)


# ---------------------------------------------------------------------------
# block (name) distributions


def block_distribution(
    seq: Sequence,
    n: int,
    positions: Sequence[int] | None = None,
    *,
    space,
) -> EmpiricalDistribution:
    """Distribution of the length-n blocks of seq at the given start positions.

    Positions default to every start that keeps the block inside the
    sequence; explicit positions that leave it raise PositionOutOfRange.
    """
    if n < 1:
        raise ValidationError("block length must be positive")
    if positions is None:
        if len(seq) < n:
            raise PositionOutOfRange("sequence shorter than one block")
        positions = range(len(seq) - n + 1)
    blocks = []
    for i in positions:
        if i < 0 or i + n > len(seq):
            raise PositionOutOfRange("block at %d leaves the sequence" % i)
        blocks.append(tuple(seq[i : i + n]))
    return EmpiricalDistribution.from_samples(BlockSpace(space, n), blocks)


# ---------------------------------------------------------------------------
# continuity partitions

@dataclass(frozen=True)
class ContinuityPartition:
    """Partition of a finite point set into cells of diameter < bound."""

    space: object
    bound: Fraction
    atoms: tuple[tuple[object, ...], ...]

    def atom_of(self, key) -> int:
        for i, cell in enumerate(self.atoms):
            if key in cell:
                return i
        raise ValidationError("%r not covered by the partition" % (key,))

    def index(self) -> dict:
        out = {}
        for i, cell in enumerate(self.atoms):
            for k in cell:
                out[k] = i
        return out


def continuity_partition(points: Sequence, bound, *, space) -> ContinuityPartition:
    """Greedy first-fit packing into cells of diameter strictly under bound."""
    bound = Fraction(bound)
    if bound <= 0:
        raise ValidationError("bound must be positive")
    pts = sorted(set(points))
    cells: list[list] = []
    for p in pts:
        placed = False
        for cell in cells:
            if all(space.dist(p, q) < bound for q in cell):
                cell.append(p)
                placed = True
                break
        if not placed:
            cells.append([p])
    return ContinuityPartition(space, bound, tuple(tuple(c) for c in cells))


# ---------------------------------------------------------------------------
# group-valued name helpers


def translate_name(gamma: Sequence[int], h: int, group: FiniteGroup) -> tuple[int, ...]:
    """Right-translate every coordinate of a group-valued name by h."""
    return tuple(group.mul[g][h] for g in gamma)


def uniformity_modulus(group: FiniteGroup, A: frozenset, epsilon) -> Fraction:
    """Largest eta with: names eta-close to Haar keep every translate's
    A-frequency above lambda(A) - epsilon.

    Closed form epsilon * gap(A, complement); by two-sided invariance the
    cross-distance gap controls how much mass can leak over the boundary.
    """
    epsilon = Fraction(epsilon)
    if not A or len(A) >= group.order:
        return Fraction(epsilon)
    gap = min(group.metric[a][b] for a in A for b in group.elements() if b not in A)
    return epsilon * gap


def density_lower_bound(
    gamma: Sequence[int],
    A: frozenset,
    group: FiniteGroup,
    epsilon,
) -> tuple[Fraction, bool]:
    """Worst A-frequency over all right translates of the name.

    Returns (min frequency, judgement min >= lambda(A) - epsilon).
    """
    epsilon = Fraction(epsilon)
    if not gamma:
        raise ValidationError("empty name")
    if not A:
        raise ValidationError("empty target set")
    worst = None
    for h in group.elements():
        hits = sum(1 for g in gamma if group.mul[g][h] in A)
        freq = Fraction(hits, len(gamma))
        if worst is None or freq < worst:
            worst = freq
    lam = Fraction(len(A), group.order)
    return worst, worst >= lam - epsilon
