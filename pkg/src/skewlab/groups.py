"""Finite groups with a bi-invariant metric.

A group element is an index into the multiplication table.  The metric is
stored as a table of Fractions, normalized so the diameter is at most 1,
and is required to be invariant under left and right translation.  The
cyclic constructor equips Z/m with the normalized circle distance
rho(a, b) = min(|a - b|, m - |a - b|) / floor(m / 2); for m <= 2 (and for
arbitrary tables that happen to be 0/1 valued) the metric is discrete, and
several downstream routines take a cheaper path in that case.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class FiniteGroup:
    order: int
    mul: tuple[tuple[int, ...], ...]
    inv: tuple[int, ...]
    identity: int
    metric: tuple[tuple[Fraction, ...], ...]
    name: str = field(default="group", compare=False)

    def __post_init__(self) -> None:
        from .errors import ValidationError

        m = self.order
        if m < 1:
            raise ValidationError("group order must be positive")
        if len(self.mul) != m or any(len(row) != m for row in self.mul):
            raise ValidationError("multiplication table must be order x order")
        if len(self.inv) != m or len(self.metric) != m:
            raise ValidationError("inverse and metric tables must have one row per element")
        if not (0 <= self.identity < m):
            raise ValidationError("identity index out of range")
        for a in range(m):
            if self.mul[self.identity][a] != a or self.mul[a][self.identity] != a:
                raise ValidationError("identity fails on element %d" % a)
            if self.mul[self.inv[a]][a] != self.identity or self.mul[a][self.inv[a]] != self.identity:
                raise ValidationError("inverse fails on element %d" % a)
        # associativity: order <= 64 in practice, cubic check is fine
        for a in range(m):
            for b in range(m):
                ab = self.mul[a][b]
                for c in range(m):
                    if self.mul[ab][c] != self.mul[a][self.mul[b][c]]:
                        raise ValidationError("associativity fails at (%d, %d, %d)" % (a, b, c))
        for a in range(m):
            if len(self.metric[a]) != m:
                raise ValidationError("metric row %d has wrong length" % a)
            if self.metric[a][a] != 0:
                raise ValidationError("metric not zero on diagonal")
            for b in range(m):
                d = self.metric[a][b]
                if a != b and d <= 0:
                    raise ValidationError("metric not positive off diagonal")
                if d > 1:
                    raise ValidationError("metric exceeds 1")
                if d != self.metric[b][a]:
                    raise ValidationError("metric not symmetric")
        for a in range(m):
            for b in range(m):
                for c in range(m):
                    if self.metric[a][b] > self.metric[a][c] + self.metric[c][b]:
                        raise ValidationError("triangle inequality fails")
                    # two-sided invariance
                    if self.metric[self.mul[c][a]][self.mul[c][b]] != self.metric[a][b]:
                        raise ValidationError("metric not left invariant")
                    if self.metric[self.mul[a][c]][self.mul[b][c]] != self.metric[a][b]:
                        raise ValidationError("metric not right invariant")

    @property
    def discrete(self) -> bool:
        """True when the metric only takes the values 0 and 1."""
        return all(d in (0, 1) for row in self.metric for d in row)

    def elements(self) -> range:
        return range(self.order)

    def haar(self) -> dict[int, Fraction]:
        w = Fraction(1, self.order)
        return {g: w for g in self.elements()}

    def product(self, gs: Sequence[int]) -> int:
        """Product with the newest factor on the left: gs[-1] * ... * gs[0]."""
        acc = self.identity
        for g in gs:
            acc = self.mul[g][acc]
        return acc

    def element_order(self, g: int) -> int:
        acc = g
        k = 1
        while acc != self.identity:
            acc = self.mul[g][acc]
            k += 1
        return k


def cyclic(m: int) -> FiniteGroup:
    """Z/m with the normalized circle metric."""
    from .errors import ValidationError

    if m < 1:
        raise ValidationError("cyclic group order must be positive")
    mul = tuple(tuple((a + b) % m for b in range(m)) for a in range(m))
    inv = tuple((-a) % m for a in range(m))
    half = max(m // 2, 1)
    metric = tuple(
        tuple(Fraction(min((a - b) % m, (b - a) % m), half) for b in range(m))
        for a in range(m)
    )
    return FiniteGroup(m, mul, inv, 0, metric, name="Z/%d" % m)


def trivial() -> FiniteGroup:
    return FiniteGroup(1, ((0,),), (0,), 0, ((Fraction(0),),), name="trivial")


def from_tables(
    mul: Sequence[Sequence[int]],
    metric: Sequence[Sequence[Fraction]] | None = None,
    name: str = "group",
) -> FiniteGroup:
    """Build a group from a multiplication table, deriving identity and inverses.

    Without an explicit metric the discrete one is used.
    """
    from .errors import ValidationError

    m = len(mul)
    table = tuple(tuple(int(v) for v in row) for row in mul)
    identity = None
    for e in range(m):
        if all(table[e][a] == a and table[a][e] == a for a in range(m)):
            identity = e
            break
    if identity is None:
        raise ValidationError("no identity element in table")
    inv = []
    for a in range(m):
        found = None
        for b in range(m):
            if table[a][b] == identity and table[b][a] == identity:
                found = b
                break
        if found is None:
            raise ValidationError("element %d has no inverse" % a)
        inv.append(found)
    if metric is None:
        rho = tuple(
            tuple(Fraction(0) if a == b else Fraction(1) for b in range(m))
            for a in range(m)
        )
    else:
        rho = tuple(tuple(Fraction(v) for v in row) for row in metric)
    return FiniteGroup(m, table, tuple(inv), identity, rho, name=name)
