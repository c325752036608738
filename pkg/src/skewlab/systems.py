"""Finite symbolic models of group extensions and their partial speedups.

A system here is a single base cycle x -> x+1 mod N carrying a label per
point and a skewing map into a finite group; the extension acts on
[N] x G by (x, g) -> (x+1, skew(x)*g).  Speedups replace the exponent 1
by a base-measurable exponent k(x) >= 1 on part of the base; keeping the
exponent on base coordinates is what makes every speedup commute with
the free right group action.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .distributions import (
    BlockSpace,
    EmpiricalDistribution,
    LabelGroupSpace,
)
from .errors import OutOfDomain, ValidationError
from .groups import FiniteGroup


@dataclass(frozen=True)
class ExtensionSystem:
    """Base cycle of given size with labels and a group-valued skewing map."""

    size: int
    labels: tuple[int, ...]
    group: FiniteGroup
    skew: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValidationError("size must be positive")
        if len(self.labels) != self.size:
            raise ValidationError("labels must cover every base point")
        if len(self.skew) != self.size:
            raise ValidationError("skew must cover every base point")
        m = self.group.order
        for g in self.skew:
            if not (0 <= g < m):
                raise ValidationError("skew value %r is not a group element" % (g,))
        for a in self.labels:
            if not isinstance(a, int):
                raise ValidationError("labels must be integers")

    def base_step(self, x: int) -> int:
        return (x + 1) % self.size

    def step(self, x: int, g: int) -> tuple[int, int]:
        return (x + 1) % self.size, self.group.mul[self.skew[x]][g]

    def alphabet(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.labels)))

    def name_space(self, n: int) -> BlockSpace:
        return BlockSpace(LabelGroupSpace(self.group), n)


def skew_orbit(
    ext: ExtensionSystem, start: tuple[int, int], length: int
) -> tuple[tuple[int, int], ...]:
    """(label, group) coordinates of the orbit segment from start."""
    if length < 1:
        raise ValidationError("length must be positive")
    x, g = start
    if not (0 <= x < ext.size):
        raise ValidationError("base point out of range")
    if not (0 <= g < ext.group.order):
        raise ValidationError("group element out of range")
    out = []
    for _ in range(length):
        out.append((ext.labels[x], g))
        x, g = ext.step(x, g)
    return tuple(out)


def cocycle_product(ext: ExtensionSystem, x: int, k: int) -> int:
    """Group element accumulated along k forward base steps from x.

    Newest factor multiplies on the left, so the composition identity
    holds: the product over a+b steps equals (product over b steps from
    the a-th image) times (product over a steps).
    """
    if k < 1:
        raise ValidationError("k must be positive")
    mul = ext.group.mul
    acc = ext.group.identity
    n = ext.size
    for i in range(k):
        acc = mul[ext.skew[(x + i) % n]][acc]
    return acc


@dataclass(frozen=True)
class Twist:
    """Total reassignment of fiber offsets, one group element per base point."""

    values: tuple[int, ...]

    def at(self, x: int) -> int:
        return self.values[x]

    @property
    def size(self) -> int:
        return len(self.values)

    @staticmethod
    def identity(n: int, group: FiniteGroup) -> "Twist":
        return Twist((group.identity,) * n)

    @staticmethod
    def compose(outer: "Twist", inner: "Twist", group: FiniteGroup) -> "Twist":
        """Pointwise product: twisting by inner then outer equals this."""
        if outer.size != inner.size:
            raise ValidationError("twist sizes differ")
        mul = group.mul
        return Twist(tuple(mul[outer.values[x]][inner.values[x]] for x in range(outer.size)))


def twist(ext: ExtensionSystem, alpha: Twist) -> ExtensionSystem:
    """Extension with the conjugated skewing alpha(x+1)*skew(x)*alpha(x)^-1.

    The map (x, g) -> (x, alpha(x)*g) carries orbits of the original skew
    product to orbits of the result.
    """
    if alpha.size != ext.size:
        raise ValidationError("twist does not match the base size")
    mul = ext.group.mul
    inv = ext.group.inv
    n = ext.size
    new_skew = tuple(
        mul[alpha.values[(x + 1) % n]][mul[ext.skew[x]][inv[alpha.values[x]]]]
        for x in range(n)
    )
    return ExtensionSystem(ext.size, ext.labels, ext.group, new_skew)


def twist_size(alpha: Twist, group: FiniteGroup) -> Fraction:
    """Mean distance of the twist from the identity."""
    e = group.identity
    tot = sum((group.metric[g][e] for g in alpha.values), Fraction(0))
    return tot / len(alpha.values)


@dataclass(frozen=True)
class ErgodicityWitness:
    ergodic: bool
    cycle_length: int
    splitting_point: tuple[int, int] | None


def check_extension_ergodic(ext: ExtensionSystem) -> ErgodicityWitness:
    """Single-cycle test for the skew product on [N] x G.

    The orbit of (0, id) returns to base 0 with the full-cycle product w;
    the product is one cycle exactly when w's powers sweep the whole
    group, so the cycle length is size times the order of w.
    """
    w = cocycle_product(ext, 0, ext.size)
    reached = {ext.group.identity}
    g = w
    while g != ext.group.identity:
        reached.add(g)
        g = ext.group.mul[w][g]
    cycle_len = ext.size * len(reached)
    if len(reached) == ext.group.order:
        return ErgodicityWitness(True, cycle_len, None)
    missing = min(h for h in ext.group.elements() if h not in reached)
    return ErgodicityWitness(False, cycle_len, (0, missing))


# ---------------------------------------------------------------------------
# partial speedups


@dataclass(frozen=True)
class PartialSpeedup:
    """Base-measurable exponent map; 0 marks points outside the domain.

    The induced base map x -> x + k(x) mod N must be injective on the
    domain; the constructor enforces it so downstream tower logic can
    rely on chains never merging.
    """

    parent: ExtensionSystem
    exponent: tuple[int, ...]
    k_max: int

    def __post_init__(self) -> None:
        n = self.parent.size
        if len(self.exponent) != n:
            raise ValidationError("exponent must cover every base point")
        if self.k_max < 1:
            raise ValidationError("k_max must be at least 1")
        seen = set()
        for x, k in enumerate(self.exponent):
            if k == 0:
                continue
            if k < 0 or k > self.k_max:
                raise ValidationError("exponent at %d outside [1, k_max]" % x)
            y = (x + k) % n
            if y in seen:
                raise ValidationError("induced base map is not injective")
            seen.add(y)

    @property
    def size(self) -> int:
        return self.parent.size

    def domain(self) -> tuple[int, ...]:
        return tuple(x for x, k in enumerate(self.exponent) if k > 0)

    def domain_mass(self) -> Fraction:
        return Fraction(sum(1 for k in self.exponent if k > 0), self.parent.size)

    def in_domain(self, x: int) -> bool:
        return self.exponent[x] > 0

    def k(self, x: int) -> int:
        k = self.exponent[x]
        if k == 0:
            raise OutOfDomain("base point %d outside the speedup domain" % x)
        return k

    def base_image(self, x: int) -> int:
        return (x + self.k(x)) % self.parent.size

    def max_exponent(self) -> int:
        return max((k for k in self.exponent if k > 0), default=0)

    @staticmethod
    def from_map(parent: ExtensionSystem, exponent: dict[int, int]) -> "PartialSpeedup":
        table = [0] * parent.size
        for x, k in exponent.items():
            if k < 1:
                raise ValidationError("exponents must be at least 1")
            table[x] = k
        k_max = max(exponent.values()) if exponent else 1
        return PartialSpeedup(parent, tuple(table), k_max)


def apply_speedup(speedup: PartialSpeedup, point: tuple[int, int]) -> tuple[int, int]:
    """One speedup step on the extension; right action commutes with it."""
    x, g = point
    k = speedup.k(x)
    ext = speedup.parent
    w = cocycle_product(ext, x, k)
    return (x + k) % ext.size, ext.group.mul[w][g]


def power_domain(speedup: PartialSpeedup, m: int) -> tuple[int, ...]:
    """Base points from which m consecutive speedup steps stay defined."""
    if m < 0:
        raise ValidationError("power must be nonnegative")
    out = []
    n = speedup.parent.size
    for x in range(n):
        y = x
        ok = True
        for _ in range(m):
            kk = speedup.exponent[y]
            if kk == 0:
                ok = False
                break
            y = (y + kk) % n
        if ok:
            out.append(x)
    return tuple(out)


def speedup_name(
    speedup: PartialSpeedup,
    labels: Sequence[int],
    x: int,
    g: int,
    length: int,
) -> tuple[tuple[int, int], ...]:
    """(label, group) name along the speedup orbit from (x, g).

    The last coordinate is observed without stepping, so a name of this
    length only needs length-1 applications to be defined.
    """
    ext = speedup.parent
    out = []
    for i in range(length):
        out.append((labels[x], g))
        if i < length - 1:
            x, g = apply_speedup(speedup, (x, g))
    return tuple(out)


def name_distribution(
    ext: ExtensionSystem,
    n: int,
    labels: Sequence[int] | None = None,
) -> EmpiricalDistribution:
    """Distribution of n-names over the whole extension [N] x G."""
    if labels is None:
        labels = ext.labels
    trivial = PartialSpeedup(ext, (1,) * ext.size, 1)
    space = ext.name_space(n)
    counts: dict = {}
    for x in range(ext.size):
        for g in ext.group.elements():
            nm = speedup_name(trivial, labels, x, g, n)
            counts[nm] = counts.get(nm, 0) + 1
    return EmpiricalDistribution.from_weights(
        space, {k: Fraction(v, ext.size * ext.group.order) for k, v in counts.items()}
    )


def speedup_name_distribution(
    speedup: PartialSpeedup,
    labels: Sequence[int],
    n: int,
    starts: Iterable[int] | None = None,
) -> EmpiricalDistribution:
    """Distribution of n-names over Dom(S^n) x G (or the given base starts)."""
    ext = speedup.parent
    if starts is None:
        starts = power_domain(speedup, n)
    starts = tuple(starts)
    if not starts:
        raise ValidationError("no start points for the name distribution")
    space = ext.name_space(n)
    counts: dict = {}
    for x in starts:
        for g in ext.group.elements():
            nm = speedup_name(speedup, labels, x, g, n)
            counts[nm] = counts.get(nm, 0) + 1
    total = len(starts) * ext.group.order
    return EmpiricalDistribution.from_weights(
        space, {k: Fraction(v, total) for k, v in counts.items()}
    )


# ---------------------------------------------------------------------------
# regularity certificates


@dataclass(frozen=True)
class RegularityCertificate:
    """Measured outcome of the five regularity conditions at (n, delta).

    Issued only when all conditions hold; the measured values stay
    available so callers can report margins.
    """

    n: int
    delta: Fraction
    tower_base: tuple[int, ...]
    height: int
    domain_mass: Fraction
    max_exponent: int
    ladder_distance: Fraction

    def __post_init__(self) -> None:
        if self.height % self.n != 0:
            raise ValidationError("tower height must be a multiple of the block length")
        if not self.tower_base:
            raise ValidationError("tower base is empty")
        if not self.domain_mass > 1 - self.delta:
            raise ValidationError("certificate requires domain mass above 1 - delta")
        # mass > 1 - delta with L - 1 levels of equal width forces this
        if not self.height > (1 - self.delta) / self.delta:
            raise ValidationError("height incompatible with the domain mass bound")

    @property
    def rungs(self) -> int:
        return self.height // self.n


@dataclass(frozen=True)
class RegularityRefusal:
    """Names the first regularity condition that failed, with a measurement."""

    condition: str
    detail: str
    measured: Fraction | None = None

    @property
    def ok(self) -> bool:
        return False
