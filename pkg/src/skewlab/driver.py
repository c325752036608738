"""Iterated constructions on top of single improvement steps.

The factor loop bootstraps a regular speedup, improves it under a
tolerance schedule while twisting the carrying extension between
steps, and finally extends the last partial map to a total one.  The
isomorphism loop interleaves partition copying and generator tracking.
Everything returns logs whose quantities are recomputed from outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .distributions import EmpiricalDistribution, kantorovich
from .errors import (
    GeneratorCheckFailed,
    Infeasible,
    NoGoodOrbit,
    NotReachable,
    TowerInfeasible,
    ValidationError,
)
from .improvement import ImprovementReport, check_regular, improve
from .systems import (
    ErgodicityWitness,
    ExtensionSystem,
    PartialSpeedup,
    RegularityCertificate,
    RegularityRefusal,
    Twist,
    cocycle_product,
    name_distribution,
    skew_orbit,
    speedup_name_distribution,
    twist,
)


# ---------------------------------------------------------------------------
# schedules and logs


@dataclass(frozen=True)
class IterationSchedule:
    """Per-iteration tolerances, target rectangles, and the budget.

    steps holds (n, delta, n1, delta1) per iteration; iterations beyond
    the last entry reuse it.  rectangles cycle with the iteration index.
    The strict flag turns on the conservative sufficient conditions
    (epsilon series summing under epsilon/2, delta below half of each
    epsilon, every rectangle recurring); the tuned desk schedules used
    by the experiments do not satisfy them and run with strict off.
    """

    epsilon: Fraction
    epsilons: tuple[Fraction, ...]
    steps: tuple[tuple[int, Fraction, int, Fraction], ...]
    rectangles: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    budget: int
    strict: bool = False

    def __post_init__(self) -> None:
        if self.budget < 0:
            raise ValidationError("budget must be nonnegative")
        if not (0 < Fraction(self.epsilon) < 1):
            raise ValidationError("epsilon must sit in (0,1)")
        if not self.epsilons or not self.steps or not self.rectangles:
            raise ValidationError("schedule needs tolerances, steps, and rectangles")
        last = None
        for e in self.epsilons:
            e = Fraction(e)
            if not (0 < e < 1):
                raise ValidationError("iteration tolerances must sit in (0,1)")
            if last is not None and not e < last:
                raise ValidationError("iteration tolerances must decrease")
            last = e
        for n, d, n1, d1 in self.steps:
            if n < 1 or n1 < n:
                raise ValidationError("block lengths must satisfy 1 <= n <= n1")
            for t in (Fraction(d), Fraction(d1)):
                if not (0 < t < 1):
                    raise ValidationError("step tolerances must sit in (0,1)")
        if self.strict:
            used = [Fraction(e) for e in self.epsilons[: self.budget]]
            if sum(used, Fraction(0)) >= Fraction(self.epsilon) / 2:
                raise ValidationError("iteration tolerances must sum below epsilon/2")
            for k in range(self.budget):
                _, d, _, _ = self.step_for(k)
                if not Fraction(d) < self.eps_for(k) / 2:
                    raise ValidationError("delta must stay below half the iteration tolerance")
            if self.budget < len(self.rectangles):
                raise ValidationError("budget too small for every rectangle to recur")

    def step_for(self, k: int) -> tuple[int, Fraction, int, Fraction]:
        n, d, n1, d1 = self.steps[min(k, len(self.steps) - 1)]
        return n, Fraction(d), n1, Fraction(d1)

    def eps_for(self, k: int) -> Fraction:
        return Fraction(self.epsilons[min(k, len(self.epsilons) - 1)])

    def rect_for(self, k: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.rectangles[k % len(self.rectangles)]


@dataclass(frozen=True)
class GeneratorRecord:
    stage: int
    window: int
    defect: Fraction
    bound: Fraction
    copy_distance: Fraction


@dataclass(frozen=True)
class ConstructionLog:
    reports: tuple[ImprovementReport, ...]
    beta: Twist
    change_mass: Fraction
    change_bound: Fraction
    witness: ErgodicityWitness
    generator: tuple[GeneratorRecord, ...] = ()
    separation_failure: Fraction | None = None


@dataclass(frozen=True)
class FactorResult:
    speedup: PartialSpeedup
    partial: PartialSpeedup
    labels: tuple[int, ...]
    beta: Twist
    log: ConstructionLog
    chain: tuple[int, ...]
    model_start: int


# ---------------------------------------------------------------------------
# bootstrap and completion


def bootstrap_regular(
    source: ExtensionSystem,
    pbar: Sequence[int],
    n: int,
    delta: Fraction,
    epsilon: Fraction,
) -> tuple[PartialSpeedup, RegularityCertificate]:
    """Initial regular speedup: the rotation trimmed to a constant height.

    The whole cycle is one orbit block, so grouping into n-blocks only
    trims the top partial block; the change against the full rotation
    is the trimmed mass plus the single open top point.
    """
    size = source.size
    height = n * (size // n)
    if height < n:
        raise Infeasible("cycle of %d points cannot host blocks of %d" % (size, n))
    exponent = tuple(1 if x < height - 1 else 0 for x in range(size))
    speedup = PartialSpeedup(source, exponent, 1)
    change = Fraction(size - height + 1, size)
    if not change < Fraction(epsilon) / 2:
        raise Infeasible(
            "trim changes mass %s, not below epsilon/2 = %s" % (change, Fraction(epsilon) / 2)
        )
    cert = check_regular(speedup, pbar, n, delta)
    if isinstance(cert, RegularityRefusal):
        raise Infeasible("bootstrap failed %s: %s" % (cert.condition, cert.detail))
    return speedup, cert


def complete_speedup(speedup: PartialSpeedup) -> PartialSpeedup:
    """Extend a partial speedup to a total one, touching only open points.

    Points without an exponent are sent, in cyclic order starting from
    the tower top, to the nearest base point that nothing maps to yet;
    for a single full-length chain this reproduces the plain rotation.
    """
    size = speedup.parent.size
    dom = set(speedup.domain())
    images = {speedup.base_image(x) for x in dom}
    missing = [v for v in range(size) if v not in dom]
    if not missing:
        return speedup
    unused = set(range(size)) - images
    tops = sorted(v for v in missing if v in images)
    anchor = tops[0] if tops else min(missing)
    order = sorted(missing, key=lambda v: (v - anchor) % size)
    exponent = list(speedup.exponent)
    k_max = speedup.k_max
    for v in order:
        for step in range(1, size + 1):
            u = (v + step) % size
            if u in unused:
                unused.remove(u)
                exponent[v] = step
                k_max = max(k_max, step)
                break
        else:
            raise ValidationError("no open target left for %d" % v)  # pragma: no cover
    return PartialSpeedup(speedup.parent, tuple(exponent), k_max)


def total_extension_witness(speedup: PartialSpeedup) -> ErgodicityWitness:
    """Single-cycle test for the sped-up extension on the product space."""
    size = speedup.parent.size
    group = speedup.parent.group
    x = 0
    w = group.identity
    steps = 0
    while True:
        k = speedup.exponent[x]
        if k == 0:
            raise ValidationError("witness needs a total speedup")
        w = group.mul[cocycle_product(speedup.parent, x, k)][w]
        x = (x + k) % size
        steps += 1
        if x == 0:
            break
        if steps > size:
            raise ValidationError("base walk does not close")  # pragma: no cover
    reached = {group.identity}
    g = w
    while g != group.identity:
        reached.add(g)
        g = group.mul[w][g]
    base_ok = steps == size
    group_ok = len(reached) == group.order
    cycle = steps * len(reached)
    if base_ok and group_ok:
        return ErgodicityWitness(True, cycle, None)
    if not base_ok:
        off = min(set(range(size)) - _cycle_points(speedup))
        return ErgodicityWitness(False, cycle, (off, group.identity))
    missing = min(h for h in group.elements() if h not in reached)
    return ErgodicityWitness(False, cycle, (0, missing))


def _cycle_points(speedup: PartialSpeedup) -> set[int]:
    pts = {0}
    x = speedup.base_image(0)
    while x != 0:
        pts.add(x)
        x = speedup.base_image(x)
    return pts


# ---------------------------------------------------------------------------
# the factor loop


def run_factor(
    target: ExtensionSystem,
    source: ExtensionSystem,
    pbar0: Sequence[int],
    schedule: IterationSchedule,
) -> FactorResult:
    """Iterate improvement steps, twisting the extension between them.

    Each iteration verifies its own hypothesis against the freshly
    twisted extension; the accumulated twist composes newest-first.
    The returned speedup is the last partial map extended to a total
    one, and the log's change quantities are recomputed directly.
    """
    n0, d0, _, _ = schedule.step_for(0)
    current, _ = bootstrap_regular(source, pbar0, n0, d0, schedule.epsilon)
    boot_exponent = current.exponent
    pbar = tuple(pbar0)
    beta = Twist.identity(source.size, source.group)
    parent = source
    reports: list[ImprovementReport] = []
    fold = Fraction(sum(1 for k in boot_exponent if k != 1), source.size)
    chain: tuple[int, ...] = ()
    model_start = 0
    for k in range(schedule.budget):
        n, d, n1, d1 = schedule.step_for(k)
        a1, a2 = schedule.rect_for(k)
        res = improve(
            target, current, pbar, n, d, n1, d1, a1, a2,
            schedule.eps_for(k), strict=schedule.strict,
        )
        fold += Fraction(
            sum(1 for x in range(source.size) if res.speedup.exponent[x] != current.exponent[x]),
            source.size,
        )
        parent = twist(parent, res.alpha)
        current = PartialSpeedup(parent, res.speedup.exponent, res.speedup.k_max)
        pbar = res.labels
        beta = Twist.compose(res.alpha, beta, source.group)
        reports.append(res.report)
        chain = res.chain
        model_start = res.model.start
    completed = complete_speedup(current)
    change = Fraction(
        sum(1 for x in range(source.size) if completed.exponent[x] != 1), source.size
    )
    witness = total_extension_witness(completed)
    log = ConstructionLog(
        reports=tuple(reports),
        beta=beta,
        change_mass=change,
        change_bound=fold,
        witness=witness,
    )
    return FactorResult(completed, current, pbar, beta, log, chain, model_start)


# ---------------------------------------------------------------------------
# ergodicity certificates


@dataclass(frozen=True)
class FullGroupWitness:
    """Piecewise powers carrying most of one set into another."""

    pieces: tuple[tuple[int, int, int], ...]
    matched: Fraction

    def carried(self) -> tuple[int, ...]:
        return tuple(t for _, _, t in self.pieces)


def ergodicity_certificate(
    speedup: PartialSpeedup,
    pairs: Sequence[tuple[Sequence[int], Sequence[int]]],
    epsilon: Fraction,
) -> tuple[FullGroupWitness, ...]:
    """Full-group witnesses carrying (1-epsilon) of each first set into the second.

    Walks the speedup's base orbit from each point of the first set to
    the first unused point of the second; pieces are (point, power,
    target) with pairwise distinct targets.
    """
    epsilon = Fraction(epsilon)
    size = speedup.parent.size
    if any(k == 0 for k in speedup.exponent):
        raise ValidationError("certificate needs a total speedup")
    out = []
    for ci, cj in pairs:
        ci = sorted(set(ci))
        cj_set = set(cj)
        if not ci or not cj_set:
            raise ValidationError("certificate sets must be nonempty")
        used: set[int] = set()
        pieces = []
        for x in ci:
            y = x
            power = 0
            while True:
                if y in cj_set and y not in used:
                    used.add(y)
                    pieces.append((x, power, y))
                    break
                y = speedup.base_image(y)
                power += 1
                if power > size:
                    break
        matched = Fraction(len(pieces), len(ci))
        if not matched >= 1 - epsilon:
            raise NotReachable(
                "only %s of the first set reaches the second within the orbit" % matched
            )
        out.append(FullGroupWitness(tuple(pieces), matched))
    return tuple(out)


# ---------------------------------------------------------------------------
# partition copying


@dataclass(frozen=True)
class FactorMap:
    """Partial base factor map from a chain onto a cyclic segment."""

    big_size: int
    small_size: int
    chain: tuple[int, ...]
    start: int

    def mapping(self) -> dict[int, int]:
        return {z: (self.start + t) % self.small_size for t, z in enumerate(self.chain)}


def verify_factor_map(
    fmap: FactorMap, big: PartialSpeedup, target: ExtensionSystem
) -> None:
    """Check the chain's dynamics and skewing match the target's exactly."""
    if big.parent.size != fmap.big_size or target.size != fmap.small_size:
        raise ValidationError("factor map sizes do not match the systems")
    for t, z in enumerate(fmap.chain[:-1]):
        if big.base_image(z) != fmap.chain[t + 1]:
            raise ValidationError("chain breaks at position %d" % t)
        inc = cocycle_product(big.parent, z, big.exponent[z])
        x = (fmap.start + t) % target.size
        if inc != target.skew[x]:
            raise ValidationError("skewing mismatch at position %d" % t)


def copy_partition(
    fmap: FactorMap,
    big: PartialSpeedup,
    pbar: Sequence[int],
    target: ExtensionSystem,
    qbar: Sequence[int],
    zeta: Fraction,
    n: int,
) -> tuple[tuple[int, ...], Fraction]:
    """Copy a partition of the big base down through the factor map.

    Each small point takes the atom of its first chain preimage;
    points without preimages take the largest atom.  Returns the copied
    partition with the measured joint name distance, which the caller
    compares against zeta.
    """
    if not (0 < Fraction(zeta) < 1):
        raise ValidationError("zeta must sit in (0,1)")
    if n > target.size:
        raise TowerInfeasible("block length %d exceeds the small cycle" % n)
    verify_factor_map(fmap, big, target)
    counts: dict[int, int] = {}
    for q in qbar:
        counts[q] = counts.get(q, 0) + 1
    default = max(counts, key=lambda q: (counts[q], -q))
    small = [default] * target.size
    seen: set[int] = set()
    for t, z in enumerate(fmap.chain):
        x = (fmap.start + t) % target.size
        if x not in seen:
            seen.add(x)
            small[x] = qbar[z]
    joint_small = tuple(
        (target.labels[x], small[x]) for x in range(target.size)
    )
    joint_big = tuple((pbar[z], qbar[z]) for z in range(big.parent.size))
    dist = kantorovich(
        name_distribution(target, n, joint_small),
        speedup_name_distribution(big, joint_big, n),
    )
    return tuple(small), dist


# ---------------------------------------------------------------------------
# the isomorphism loop


def _cylinder_sets(labels: Sequence[int], size: int, count: int) -> list[tuple[int, ...]]:
    """First `count` cylinder sets of the rotation names, lengths increasing."""
    out: list[tuple[int, ...]] = []
    length = 1
    while len(out) < count and length <= size:
        words: dict[tuple[int, ...], list[int]] = {}
        for x in range(size):
            w = tuple(labels[(x + i) % size] for i in range(length))
            words.setdefault(w, []).append(x)
        for w in sorted(words):
            out.append(tuple(words[w]))
            if len(out) == count:
                break
        length += 1
    if not out:
        raise ValidationError("no cylinder sets available")
    return out


def _majority_defect_schedule(
    speedup: PartialSpeedup,
    labels: Sequence[int],
    target_set: Sequence[int],
    bound: Fraction,
) -> tuple[int, Fraction]:
    """Smallest window with majority-vote defect within the bound.

    Classes are the (2m+1)-name atoms under the total speedup; the
    defect of a class is whichever of its inside/outside parts is
    smaller.  Classes only refine as m grows, so the defect is
    monotone and the search walks m upward.
    """
    size = speedup.parent.size
    inside = set(target_set)
    forward = [speedup.base_image(x) for x in range(size)]
    backward = [0] * size
    for x, y in enumerate(forward):
        backward[y] = x
    ids = list(labels)
    fwd_pt = list(range(size))
    bwd_pt = list(range(size))

    def defect_of(current_ids) -> Fraction:
        split: dict[int, list[int]] = {}
        for x, c in enumerate(current_ids):
            split.setdefault(c, []).append(x)
        bad = 0
        for pts in split.values():
            ins = sum(1 for x in pts if x in inside)
            bad += min(ins, len(pts) - ins)
        return Fraction(bad, size)

    m = 0
    d = defect_of(ids)
    while d > bound and m < size:
        m += 1
        fwd_pt = [forward[x] for x in fwd_pt]
        bwd_pt = [backward[x] for x in bwd_pt]
        fresh = {}
        new_ids = []
        for x in range(size):
            key = (ids[x], labels[bwd_pt[x]], labels[fwd_pt[x]])
            if key not in fresh:
                fresh[key] = len(fresh)
            new_ids.append(fresh[key])
        ids = new_ids
        d = defect_of(ids)
    return m, d


def _separation_failure(speedup: PartialSpeedup, labels: Sequence[int]) -> Fraction:
    size = speedup.parent.size
    names: dict[tuple[int, ...], int] = {}
    for x in range(size):
        z = x
        nm = []
        for _ in range(size):
            nm.append(labels[z])
            z = speedup.base_image(z)
        key = tuple(nm)
        names[key] = names.get(key, 0) + 1
    clashes = sum(c for c in names.values() if c > 1)
    return Fraction(clashes, size)


def run_isomorphism(
    target: ExtensionSystem,
    source: ExtensionSystem,
    pbar0: Sequence[int],
    schedule: IterationSchedule,
    *,
    copy_zeta: Fraction = Fraction(1, 10),
) -> FactorResult:
    """Factor loop with generator tracking and partition copying.

    Requires the target labels to separate points.  After each
    improvement the current base sets from a fixed cylinder enumeration
    are approximated by name windows (majority vote) and one partition
    is copied down through the constructed chain; the log records the
    window sizes, defects, and copy distances, plus the final fraction
    of base points not separated by full-length names.
    """
    tn = target.size
    tnames = {tuple(target.labels[(x + i) % tn] for i in range(tn)) for x in range(tn)}
    if len(tnames) != tn:
        raise GeneratorCheckFailed(
            "target labels leave %d points unseparated" % (tn - len(tnames))
        )
    n0, d0, _, _ = schedule.step_for(0)
    current, _ = bootstrap_regular(source, pbar0, n0, d0, schedule.epsilon)
    boot_exponent = current.exponent
    pbar = tuple(pbar0)
    beta = Twist.identity(source.size, source.group)
    parent = source
    reports: list[ImprovementReport] = []
    records: list[GeneratorRecord] = []
    fold = Fraction(sum(1 for k in boot_exponent if k != 1), source.size)
    cylinders = _cylinder_sets(pbar0, source.size, max(schedule.budget, 1))
    chain: tuple[int, ...] = ()
    model_start = 0
    for k in range(schedule.budget):
        n, d, n1, d1 = schedule.step_for(k)
        a1, a2 = schedule.rect_for(k)
        res = improve(
            target, current, pbar, n, d, n1, d1, a1, a2,
            schedule.eps_for(k), strict=schedule.strict,
        )
        fold += Fraction(
            sum(1 for x in range(source.size) if res.speedup.exponent[x] != current.exponent[x]),
            source.size,
        )
        parent = twist(parent, res.alpha)
        current = PartialSpeedup(parent, res.speedup.exponent, res.speedup.k_max)
        pbar = res.labels
        beta = Twist.compose(res.alpha, beta, source.group)
        reports.append(res.report)
        chain = res.chain
        model_start = res.model.start
        snapshot = complete_speedup(current)
        target_set = set(cylinders[k % len(cylinders)])
        bound = 2 * schedule.eps_for(k)
        window, defect = _majority_defect_schedule(snapshot, pbar, target_set, bound)
        qbar = tuple(1 if x in target_set else 0 for x in range(source.size))
        fmap = FactorMap(source.size, target.size, chain, model_start)
        _, dist = copy_partition(fmap, current, pbar, target, qbar, copy_zeta, n)
        records.append(GeneratorRecord(k, window, defect, bound, dist))
    completed = complete_speedup(current)
    change = Fraction(
        sum(1 for x in range(source.size) if completed.exponent[x] != 1), source.size
    )
    log = ConstructionLog(
        reports=tuple(reports),
        beta=beta,
        change_mass=change,
        change_bound=fold,
        witness=total_extension_witness(completed),
        generator=tuple(records),
        separation_failure=_separation_failure(completed, pbar),
    )
    return FactorResult(completed, current, pbar, beta, log, chain, model_start)


# ---------------------------------------------------------------------------
# orbit seeding and truncation


def seed_from_orbit(
    target: ExtensionSystem,
    source: ExtensionSystem,
    n_len: int,
    zeta: Fraction,
    *,
    n: int,
) -> tuple[tuple[int, ...], Twist]:
    """Copy one good target orbit segment onto the source's initial tower.

    Searches target start points for a segment whose n-name statistics
    sit within zeta of the target's (after averaging over right group
    translates), then defines labels and a twist level by level so the
    copied tower reads exactly like the orbit segment.
    """
    zeta = Fraction(zeta)
    if n_len < n or n_len > source.size:
        raise ValidationError("segment length must satisfy n <= n_len <= source size")
    group = target.group
    if group.order != source.group.order or group.mul != source.group.mul:
        raise ValidationError("seeding needs matching groups")
    reference = name_distribution(target, n)
    space = target.name_space(n)
    found = None
    for x in range(target.size):
        word = skew_orbit(target, (x, group.identity), n_len)
        counts: dict = {}
        for t in range(n_len - n + 1):
            base_name = word[t : t + n]
            for h in group.elements():
                nm = tuple((a, group.mul[g][h]) for a, g in base_name)
                counts[nm] = counts.get(nm, 0) + 1
        emp = EmpiricalDistribution.from_weights(
            space,
            {k: Fraction(v, (n_len - n + 1) * group.order) for k, v in counts.items()},
        )
        if kantorovich(emp, reference) < zeta:
            found = (x, word)
            break
    if found is None:
        raise NoGoodOrbit("no segment of length %d sits within %s" % (n_len, zeta))
    x_star, word = found
    junk = max(target.alphabet()) + 1
    labels = [junk] * source.size
    alpha = [group.identity] * source.size
    src_acc = group.identity
    for i in range(n_len):
        labels[i] = word[i][0]
        alpha[i] = group.mul[word[i][1]][group.inv[src_acc]]
        src_acc = group.mul[source.skew[i]][src_acc]
    return tuple(labels), Twist(tuple(alpha))


def truncate_partition(labels: Sequence[int], n_cut: int) -> tuple[int, ...]:
    """Merge all but the first n_cut atoms (in label order) into one."""
    if n_cut < 1:
        raise ValidationError("must keep at least one atom")
    atoms = sorted(set(labels))
    if len(atoms) <= n_cut:
        return tuple(labels)
    keep = set(atoms[:n_cut])
    merged = max(keep) + 1
    return tuple(l if l in keep else merged for l in labels)
