"""Combinatorial matching devices used by the improvement step.

Three tools: spreading a finite domain onto a target distribution,
exhausting a set by disjoint equal-template samples, and building
index matchings between two name sequences whose distributions are
close.  Everything is deterministic; ties break at the lowest index.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Hashable, Mapping, Sequence

from .distributions import EmpiricalDistribution, continuity_partition
from .errors import (
    AtomTooSmall,
    DomainTooSmall,
    InfeasibleTemplate,
    PreconditionViolated,
    TooFar,
    TooShort,
    ValidationError,
)


def sample_onto(
    atoms: Sequence[Hashable],
    nu: EmpiricalDistribution,
    domain: Sequence[Hashable],
    zeta: Fraction,
    *,
    min_mass: Fraction | None = None,
    block_length: int = 0,
) -> dict:
    """Map the domain onto the atoms with distribution error below zeta.

    Cumulative weights are rounded down to multiples of 1/|domain| and
    the gaps between consecutive rounded endpoints become atom counts.
    min_mass and block_length tighten the domain-size precondition to
    1/|domain| < min(min_mass, zeta / 2**block_length) when provided.
    """
    atoms = sorted(atoms)
    points = sorted(domain)
    if not atoms:
        raise ValidationError("no atoms to sample onto")
    if not points:
        raise DomainTooSmall("empty domain")
    for key in nu.support():
        if key not in set(atoms):
            raise ValidationError("distribution charges a point outside the atom set")
    big_k = len(points)
    bound = Fraction(zeta, 2**block_length)
    if min_mass is not None:
        bound = min(bound, Fraction(min_mass))
    if not Fraction(1, big_k) < bound:
        raise DomainTooSmall(
            "domain of size %d cannot resolve tolerance %s" % (big_k, bound)
        )
    for key in atoms:
        if nu.weight(key) <= Fraction(1, big_k):
            raise AtomTooSmall("atom %r has mass at most 1/%d" % (key, big_k))
    counts = []
    cum = Fraction(0)
    prev_floor = 0
    for key in atoms:
        cum += nu.weight(key)
        here = (cum * big_k).numerator // (cum * big_k).denominator
        counts.append(here - prev_floor)
        prev_floor = here
    out: dict = {}
    pos = 0
    for key, c in zip(atoms, counts):
        for _ in range(c):
            out[points[pos]] = key
            pos += 1
    return out


@dataclass(frozen=True)
class SampleFamily:
    """Disjoint equal-size subsets of a ground set sharing exact atom counts."""

    ground: tuple
    sample_size: int
    samples: tuple[tuple, ...]
    template: tuple[tuple[Hashable, int], ...]

    def __post_init__(self) -> None:
        seen: set = set()
        for s in self.samples:
            if len(s) != self.sample_size:
                raise ValidationError("sample of wrong size")
            for z in s:
                if z in seen:
                    raise ValidationError("samples are not disjoint")
                seen.add(z)
        if sum(c for _, c in self.template) != self.sample_size:
            raise ValidationError("template counts do not add up to the sample size")

    def covered(self) -> set:
        return {z for s in self.samples for z in s}

    def leftover(self) -> tuple:
        hit = self.covered()
        return tuple(z for z in self.ground if z not in hit)

    def leftover_mass(self) -> Fraction:
        return Fraction(len(self.leftover()), len(self.ground))


def exhaust_samples(
    ground: Sequence[Hashable],
    atom_of: Mapping[Hashable, Hashable],
    sample_size: int,
    epsilon: Fraction,
    template: Mapping[Hashable, int],
    *,
    check_bounds: bool = True,
) -> SampleFamily:
    """Greedy maximal family of disjoint samples realizing the template.

    With the size and closeness preconditions the greedy family leaves
    at most an epsilon fraction of the ground set uncovered.  Passing
    check_bounds=False skips the precondition gate but still builds the
    family honestly.
    """
    ground = tuple(sorted(ground))
    if not ground:
        raise ValidationError("empty ground set")
    if sample_size < 1:
        raise ValidationError("sample size must be positive")
    tpl = tuple(sorted((k, int(c)) for k, c in template.items() if c))
    if any(c < 0 for _, c in tpl):
        raise ValidationError("template counts must be nonnegative")
    if sum(c for _, c in tpl) != sample_size:
        raise ValidationError("template counts must add up to the sample size")
    pools: dict = {}
    for z in ground:
        pools.setdefault(atom_of[z], []).append(z)
    for key, _ in tpl:
        if key not in pools:
            raise InfeasibleTemplate("template names the empty atom %r" % (key,))
    if check_bounds:
        if sample_size > len(ground):
            raise PreconditionViolated("sample size exceeds the ground set")
        min_mass = min(Fraction(len(p), len(ground)) for p in pools.values())
        need = Fraction(sample_size, 1) / (Fraction(epsilon) * min_mass / 2)
        if not len(ground) > need:
            raise PreconditionViolated(
                "ground set of %d points is not above the size bound %s"
                % (len(ground), need)
            )
        gap = Fraction(0)
        for key, pool in pools.items():
            want = Fraction(dict(tpl).get(key, 0), sample_size)
            gap += abs(want - Fraction(len(pool), len(ground)))
        if not gap / 2 < Fraction(epsilon) * min_mass / 2:
            raise PreconditionViolated(
                "template is %s away from the ground distribution" % (gap / 2)
            )
    cursor = {key: 0 for key in pools}
    samples = []
    while True:
        pick = []
        feasible = True
        for key, c in tpl:
            pool = pools[key]
            if cursor[key] + c > len(pool):
                feasible = False
                break
            pick.extend(pool[cursor[key] : cursor[key] + c])
        if not feasible:
            if not samples:
                raise InfeasibleTemplate("template counts exceed some atom on the first sample")
            break
        for key, c in tpl:
            cursor[key] += c
        samples.append(tuple(sorted(pick)))
    family = SampleFamily(ground, sample_size, tuple(samples), tpl)
    if check_bounds and family.leftover_mass() > Fraction(epsilon):
        raise PreconditionViolated(
            "greedy family left %s uncovered despite the bounds" % family.leftover_mass()
        )
    return family


def _atom_indices(seq: Sequence, partition) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for i, v in enumerate(seq):
        out.setdefault(partition.atom_of(v), []).append(i)
    return out


def match_bijection(gamma1: Sequence, gamma2: Sequence, zeta: Fraction, *, space):
    """Bijection phi on indices with gamma1[phi[i]] close to gamma2[i].

    Exact count matching inside continuity atoms of width zeta, with the
    cross-atom remainder paired lowest index to lowest index.  Raises
    TooFar when fewer than ceil((1-zeta)*n) pairs land within zeta.
    """
    n = len(gamma1)
    if n == 0 or len(gamma2) != n:
        raise ValidationError("sequences must share a positive length")
    zeta = Fraction(zeta)
    part = continuity_partition(tuple(gamma1) + tuple(gamma2), zeta, space=space)
    by1 = _atom_indices(gamma1, part)
    by2 = _atom_indices(gamma2, part)
    phi: list[int | None] = [None] * n
    left1: list[int] = []
    left2: list[int] = []
    for a in sorted(set(by1) | set(by2)):
        js = by1.get(a, [])
        is_ = by2.get(a, [])
        m = min(len(js), len(is_))
        for t in range(m):
            phi[is_[t]] = js[t]
        left1.extend(js[m:])
        left2.extend(is_[m:])
    for i, j in zip(sorted(left2), sorted(left1)):
        phi[i] = j
    good = sum(1 for i in range(n) if space.dist(gamma1[phi[i]], gamma2[i]) < zeta)
    if good < ceil((1 - zeta) * n):
        raise TooFar(
            "only %d of %d pairs within %s; need %d" % (good, n, zeta, ceil((1 - zeta) * n))
        )
    return tuple(phi)


def match_surjection(gamma1: Sequence, gamma2: Sequence, zeta: Fraction, *, space):
    """Balanced surjection phi: indices of gamma2 onto indices of gamma1.

    Fiber sizes are fixed up front by floor-rounding n1/n, so every
    fiber mass sits within zeta of 1/n; assignment then fills fibers
    inside continuity atoms round-robin, remainder to the lowest open
    fiber.  Raises TooShort when the balance bound is unreachable and
    TooFar when too few pairs land within zeta.
    """
    n = len(gamma1)
    n1 = len(gamma2)
    if n == 0 or n1 == 0:
        raise ValidationError("sequences must be nonempty")
    zeta = Fraction(zeta)
    if n1 < n:
        raise TooShort("cannot map %d points onto %d fibers" % (n1, n))
    if n1 % n != 0 and not Fraction(1, n1) < zeta:
        raise TooShort("length %d cannot balance fibers within %s" % (n1, zeta))
    sizes = [(j + 1) * n1 // n - j * n1 // n for j in range(n)]
    room = list(sizes)
    part = continuity_partition(tuple(gamma1) + tuple(gamma2), zeta, space=space)
    by1 = _atom_indices(gamma1, part)
    by2 = _atom_indices(gamma2, part)
    phi: list[int | None] = [None] * n1
    for a in sorted(set(by2)):
        fibers = by1.get(a, [])
        if not fibers:
            continue
        turn = 0
        for i in by2[a]:
            placed = False
            for _ in range(len(fibers)):
                j = fibers[turn % len(fibers)]
                turn += 1
                if room[j] > 0:
                    phi[i] = j
                    room[j] -= 1
                    placed = True
                    break
            if not placed:
                break
    for i in range(n1):
        if phi[i] is None:
            j = next(j for j in range(n) if room[j] > 0)
            phi[i] = j
            room[j] -= 1
    good = sum(1 for i in range(n1) if space.dist(gamma1[phi[i]], gamma2[i]) < zeta)
    if good < ceil((1 - zeta) * n1):
        raise TooFar(
            "only %d of %d pairs within %s; need %d" % (good, n1, zeta, ceil((1 - zeta) * n1))
        )
    return tuple(phi)
