"""The distribution improvement engine.

Given a regular partial speedup whose n-name statistics are close to a
target extension, one improvement step builds a longer-block speedup of
the same extension whose n1-name statistics are close to the target,
changing the partition and fiber offsets only slightly.  The new orbit
is woven through the existing tower's ladder blocks and copies a model
name read off the target; a twist absorbs the group-coordinate
discrepancy exactly, so the copied name is replicated coordinate by
coordinate on the constructed orbit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Mapping, Sequence

from .distributions import EmpiricalDistribution, kantorovich
from .errors import (
    Collision,
    HypothesisDistance,
    Infeasible,
    RegularityRejected,
    ScheduleInfeasible,
    ValidationError,
)
from .systems import (
    ExtensionSystem,
    PartialSpeedup,
    RegularityCertificate,
    RegularityRefusal,
    Twist,
    apply_speedup,
    check_extension_ergodic,
    cocycle_product,
    name_distribution,
    speedup_name,
    speedup_name_distribution,
    twist,
    twist_size,
)
from .towers import broken_fraction, ladder


# ---------------------------------------------------------------------------
# window systems and cycles


@dataclass(frozen=True)
class WindowSystem:
    """Ordered equal-length windows inside a long segment.

    Window s occupies positions starts[s] .. starts[s]+length-1; the
    gap condition keeps distinct windows from overlapping.
    """

    length: int
    span: int
    starts: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ValidationError("window length must be positive")
        prev = None
        for u in self.starts:
            if u < 0 or u + self.length > self.span:
                raise ValidationError("window does not fit in the span")
            if prev is not None and u - prev < self.length:
                raise ValidationError("window starts must increase by at least the length")
            prev = u

    @property
    def count(self) -> int:
        return len(self.starts)

    def window(self, s: int, j: int) -> int:
        if not (0 <= j < self.length):
            raise ValidationError("offset outside the window")
        return self.starts[s] + j


@dataclass(frozen=True)
class Cycle:
    """One weave through the windows: p-term stages at every pass offset.

    stages maps (l, j) to the chosen in-window positions for phases
    i in [p]; the absolute position of phase i is window jp+l+i at that
    offset.  Stage maps are increasing because windows are ordered.
    """

    p: int
    index: int
    stages: tuple[tuple[tuple[int, int], tuple[int, ...]], ...]

    def absolute(self, windows: WindowSystem) -> tuple[tuple[tuple[int, int], tuple[int, ...]], ...]:
        out = []
        for (l, j), pos in self.stages:
            out.append(((l, j), tuple(windows.window(j * self.p + l + i, pos[i]) for i in range(self.p))))
        return tuple(out)


def build_cycles(
    windows: WindowSystem,
    samples: Mapping[int, Sequence[Sequence[int]]],
    p: int,
) -> tuple[Cycle, ...]:
    """Weave every stage sample into cycles, one cycle per sample index.

    samples[s][t][i] is the in-window position used by cycle t at phase
    i whenever some stage visits window s at that phase.  Positions must
    be disjoint inside each window across (t, i); a repeat raises
    Collision.  Interior windows are visited exactly p times per cycle.
    """
    w = windows.count
    if p < 1 or p > w:
        raise ValidationError("need 1 <= p <= window count")
    depths = {len(samples[s]) for s in range(w)}
    if len(depths) != 1:
        raise ValidationError("every window needs the same number of sample stages")
    rounds = depths.pop()
    for s in range(w):
        used: set[int] = set()
        for t in range(rounds):
            if len(samples[s][t]) != p:
                raise ValidationError("stage sample must list one position per phase")
            for i in range(p):
                pos = samples[s][t][i]
                if not (0 <= pos < windows.length):
                    raise ValidationError("sample position outside the window")
                if pos in used:
                    raise Collision("window %d position %d used twice" % (s, pos))
                used.add(pos)
    cycles = []
    taken: set[int] = set()
    for t in range(rounds):
        stages = []
        for l in range(p):
            for j in range((w - l) // p):
                pos = tuple(samples[j * p + l + i][t][i] for i in range(p))
                stages.append(((l, j), pos))
        cyc = Cycle(p, t, tuple(stages))
        for (_, _), abs_pos in cyc.absolute(windows):
            last = -1
            for a in abs_pos:
                if a <= last:
                    raise Collision("stage positions not increasing")
                last = a
                if a in taken:
                    raise Collision("absolute position %d used twice" % a)
                taken.add(a)
        cycles.append(cyc)
    return tuple(cycles)


# ---------------------------------------------------------------------------
# regularity


def _tower_structure(speedup: PartialSpeedup):
    """Recover the constant-height tower carrying the speedup domain.

    Returns (bases, height) where height counts the levels including
    the top level that sits outside the domain, or a refusal reason.
    """
    dom = set(speedup.domain())
    images = {speedup.base_image(x) for x in dom}
    bases = sorted(x for x in dom if x not in images)
    if not bases:
        return None, "domain has no entry points (a cycle)"
    chains = []
    covered = 0
    for b in bases:
        chain = [b]
        z = b
        for _ in range(len(dom) + 1):
            z = speedup.base_image(z)
            if z not in dom:
                break
            chain.append(z)
        else:
            return None, "walk from base %d never leaves the domain" % b
        chains.append(chain)
        covered += len(chain)
    if covered != len(dom):
        return None, "domain contains points unreachable from any base"
    heights = {len(c) for c in chains}
    if len(heights) != 1:
        return None, "columns have unequal heights %s" % sorted(heights)
    return (tuple(bases), heights.pop() + 1), None


def check_regular(
    speedup: PartialSpeedup,
    pbar: Sequence[int],
    n: int,
    delta: Fraction,
    *,
    k_bound: int | None = None,
) -> RegularityCertificate | RegularityRefusal:
    """Verify the five conditions of an (n, delta)-regular speedup.

    Condition order: tower structure, exponent bound, fiberwise name
    purity, ladder block distributions, domain mass.  The first failed
    condition is returned as a refusal with a measurement; success
    returns a certificate with the measured margins.
    """
    delta = Fraction(delta)
    ext = speedup.parent
    if len(pbar) != ext.size:
        raise ValidationError("partition must cover the base")
    structure, why = _tower_structure(speedup)
    if structure is None:
        return RegularityRefusal("condition 1", why)
    bases, height = structure
    k_seen = speedup.max_exponent()
    if k_bound is not None and k_seen > k_bound:
        return RegularityRefusal(
            "condition 2", "exponent %d exceeds the bound %d" % (k_seen, k_bound),
            Fraction(k_seen),
        )
    group = ext.group
    for h in group.elements():
        names = {speedup_name(speedup, pbar, b, h, height) for b in bases}
        if len(names) != 1:
            return RegularityRefusal(
                "condition 3",
                "base fibers at %d carry %d distinct tower names" % (h, len(names)),
            )
    if height % n != 0:
        return RegularityRefusal(
            "condition 4", "height %d is not a multiple of %d" % (height, n)
        )
    full = speedup_name_distribution(speedup, pbar, n)
    space = ext.name_space(n)
    mul = group.mul
    worst = Fraction(0)
    for b in bases:
        # rung starts carry the offset accumulated along the column, so
        # the blocks from fiber h read the actual orbit of (b, h)
        rung_starts = []
        z = b
        w = group.identity
        for i in range(height):
            if i % n == 0:
                rung_starts.append((z, w))
            if i < height - 1:
                w = mul[cocycle_product(ext, z, speedup.exponent[z])][w]
                z = speedup.base_image(z)
        per_h = []
        for h in group.elements():
            counts: dict = {}
            for s, w0 in rung_starts:
                nm = speedup_name(speedup, pbar, s, mul[w0][h], n)
                counts[nm] = counts.get(nm, 0) + 1
            dist = EmpiricalDistribution.from_weights(
                space, {k: Fraction(v, len(rung_starts)) for k, v in counts.items()}
            )
            per_h.append(kantorovich(dist, full))
        if len(set(per_h)) != 1:
            raise ValidationError("ladder distance varies across fibers")
        worst = max(worst, per_h[0])
        if not per_h[0] < delta:
            return RegularityRefusal(
                "condition 4",
                "ladder distribution at base %d is %s away" % (b, per_h[0]),
                per_h[0],
            )
    mass = speedup.domain_mass()
    if not mass > 1 - delta:
        return RegularityRefusal(
            "condition 5", "domain mass %s not above %s" % (mass, 1 - delta), mass
        )
    return RegularityCertificate(
        n=n,
        delta=delta,
        tower_base=bases,
        height=height,
        domain_mass=mass,
        max_exponent=k_seen,
        ladder_distance=worst,
    )


# ---------------------------------------------------------------------------
# model names


@dataclass(frozen=True)
class ModelName:
    """Long template name read off the target with measured certificates.

    labels and groups give the (P, c)-coordinates of the template;
    window_distance and block_distance compare its n1-statistics to the
    target's stationary ones (after averaging over right translates),
    cover_fraction is the portion of each n1-block covered by real
    n-blocks, and min_atom_count is the scarcest atom count used for
    sampling feasibility.
    """

    labels: tuple[int, ...]
    groups: tuple[int, ...]
    n: int
    n1: int
    start: int
    window_distance: Fraction
    block_distance: Fraction
    cover_fraction: Fraction
    min_atom_count: int
    real_blocks: tuple[tuple[int, ...], ...]
    pseudo_blocks: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.labels)

    def coordinate(self, t: int) -> tuple[int, int]:
        return (self.labels[t], self.groups[t])


def _extension_word(ext: ExtensionSystem, start: int, length: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    labels = []
    groups = []
    g = ext.group.identity
    for t in range(length):
        x = (start + t) % ext.size
        labels.append(ext.labels[x])
        groups.append(g)
        g = ext.group.mul[ext.skew[x]][g]
    return tuple(labels), tuple(groups)


def _averaged_class_counts(codes: bytes, starts, n1: int, tables) -> dict[bytes, int]:
    counts: dict[bytes, int] = {}
    for t in starts:
        key = codes[t : t + n1]
        counts[key] = counts.get(key, 0) + 1
    out: dict[bytes, int] = {}
    for key, c in counts.items():
        for table in tables:
            tk = key.translate(table)
            out[tk] = out.get(tk, 0) + c
    return out


def _half_l1_counts(a: dict, a_total: int, b: dict, b_total: int) -> Fraction:
    gap = Fraction(0)
    for key in set(a) | set(b):
        gap += abs(Fraction(a.get(key, 0), a_total) - Fraction(b.get(key, 0), b_total))
    return gap / 2


def _choose_start(target: ExtensionSystem, length: int, n1: int) -> int:
    """First position whose template balances rung names against windows.

    The comparison mirrors regularity condition 4 on the output tower:
    aligned n1-rung names from the candidate template against all its
    n1-windows averaged over right group translates.  Balancing here is
    what spreads the accumulated fiber offsets evenly over the rungs.
    """
    big = target.size + length + n1
    order = target.group.order
    alphabet = {a: i for i, a in enumerate(target.alphabet())}
    if len(alphabet) * order > 256:
        raise ScheduleInfeasible("alphabet times group order exceeds the byte encoder")
    codes = bytearray(big)
    g = target.group.identity
    for t in range(big):
        x = t % target.size
        codes[t] = alphabet[target.labels[x]] * order + g
        g = target.group.mul[target.skew[x]][g]
    codes = bytes(codes)
    tables = []
    for h in range(order):
        table = bytearray(256)
        for idx in range(len(alphabet)):
            for gi in range(order):
                table[idx * order + gi] = idx * order + target.group.mul[gi][h]
        tables.append(bytes(table))
    best: tuple[Fraction, int] | None = None
    rung_offsets = range(0, length, n1)
    window_count = length - n1 + 1
    for x0 in range(target.size):
        rungs: dict[bytes, int] = {}
        for t in rung_offsets:
            key = codes[x0 + t : x0 + t + n1]
            rungs[key] = rungs.get(key, 0) + 1
        avg = _averaged_class_counts(codes, range(x0, x0 + window_count), n1, tables)
        d = _half_l1_counts(rungs, len(rung_offsets), avg, window_count * order)
        if best is None or d < best[0]:
            best = (d, x0)
    assert best is not None
    return best[1]


def build_model_name(
    target: ExtensionSystem,
    n: int,
    n1: int,
    delta1: Fraction,
    zeta: Fraction,
    *,
    length: int,
    q_atoms=None,
    k_count: int = 1,
    strict: bool = False,
) -> ModelName:
    """Template name of the given length with measured block statistics.

    The template is the target's own extension name from a start point
    chosen to balance rung names against window names.  Every n-block
    is real (taken from the orbit), so the covering certificate is
    exact; window and disjoint-block distances are measured against the
    target's stationary n1-distribution and enforced at delta1/100 only
    under the strict preset.
    """
    delta1 = Fraction(delta1)
    if n1 % n != 0:
        raise ValidationError("n1 must be a multiple of n")
    if length < n1 or length % n1 != 0:
        raise ValidationError("length must be a positive multiple of n1")
    if not check_extension_ergodic(target).ergodic:
        raise ValidationError("target extension is not ergodic")
    x0 = _choose_start(target, length, n1)
    labels, groups = _extension_word(target, x0, length)
    space = target.name_space(n1)
    mul = target.group.mul
    reference = name_distribution(target, n1)

    def averaged(starts) -> EmpiricalDistribution:
        counts: dict = {}
        for t in starts:
            base_name = tuple((labels[t + i], groups[t + i]) for i in range(n1))
            for h in target.group.elements():
                nm = tuple((a, mul[g][h]) for a, g in base_name)
                counts[nm] = counts.get(nm, 0) + 1
        total = len(starts) * target.group.order
        return EmpiricalDistribution.from_weights(
            space, {k: Fraction(v, total) for k, v in counts.items()}
        )

    window_distance = kantorovich(averaged(range(length - n1 + 1)), reference)
    block_distance = kantorovich(averaged(range(0, length, n1)), reference)
    if strict:
        budget = delta1 / 100
        if not window_distance < budget:
            raise ScheduleInfeasible(
                "window distance %s misses the strict budget %s" % (window_distance, budget)
            )
        if not block_distance < budget:
            raise ScheduleInfeasible(
                "block distance %s misses the strict budget %s" % (block_distance, budget)
            )
    per = n1 // n
    kinds: dict[tuple, int] = {}
    for t in range(0, length, n1):
        key = tuple((labels[t + i], groups[t + i]) for i in range(n1))
        if key not in kinds:
            kinds[key] = len(kinds)
    real = tuple(tuple(range(per)) for _ in range(len(kinds)))
    pseudo = tuple(() for _ in range(len(kinds)))
    if q_atoms is None:
        q_atoms = lambda name: 0
    atom_counts: dict = {}
    for j in range(length // n):
        name = tuple((labels[j * n + i], groups[j * n + i]) for i in range(n))
        atom = q_atoms(name)
        atom_counts[atom] = atom_counts.get(atom, 0) + 1
    needed = set()
    for nm in name_distribution(target, n).support():
        needed.add(q_atoms(nm))
    short = {q for q in needed if atom_counts.get(q, 0) < k_count}
    if short:
        raise Infeasible(
            "atoms %s fall below %d template blocks; coarsen the sampling partition"
            % (sorted(map(str, short)), k_count)
        )
    return ModelName(
        labels=labels,
        groups=groups,
        n=n,
        n1=n1,
        start=x0,
        window_distance=window_distance,
        block_distance=block_distance,
        cover_fraction=Fraction(1),
        min_atom_count=min(atom_counts[q] for q in needed),
        real_blocks=real,
        pseudo_blocks=pseudo,
    )


# ---------------------------------------------------------------------------
# the improvement step


@dataclass(frozen=True)
class ImprovementReport:
    """Measured outcome of one improvement step, recomputed from outputs."""

    n: int
    delta: Fraction
    n1: int
    delta1: Fraction
    epsilon: Fraction
    hypothesis_distance: Fraction
    partition_drift: Fraction
    twist_size: Fraction
    broken_mass: Fraction
    name_distance: Fraction
    good_set_fraction: Fraction
    good_set_density: Fraction
    regular: bool
    regularity_note: str
    ladder_distance: Fraction | None
    domain_mass: Fraction
    height: int
    max_exponent: int
    model_window_distance: Fraction
    model_block_distance: Fraction
    model_cover_fraction: Fraction
    model_min_atom_count: int
    model_length: int
    model_start: int
    rotation: int
    steps: tuple[tuple[str, str], ...]

    def conclusions(self) -> dict[str, bool]:
        return {
            "regular": self.regular,
            "partition_drift": self.partition_drift < self.epsilon,
            "twist_size": self.twist_size < self.epsilon,
            "broken_mass": self.broken_mass < self.delta1,
            "name_distance": self.name_distance < self.delta1,
            "good_set_fraction": self.good_set_fraction > 1 - self.epsilon,
        }


@dataclass(frozen=True)
class ImproveResult:
    speedup: PartialSpeedup
    labels: tuple[int, ...]
    alpha: Twist
    report: ImprovementReport
    chain: tuple[int, ...]
    model: ModelName


def _chain_for_rotation(blocks, seam_gap, rotation: int, used: int):
    """Chain points and per-step exponents for one block rotation."""
    count = len(blocks)
    points: list[int] = []
    gaps: list[int] = []
    for idx in range(used):
        j = (rotation + idx) % count
        blk = blocks[j]
        if points:
            gaps.append(seam_gap[(rotation + idx - 1) % count])
        points.extend(blk[0])
        gaps.extend(blk[1])
    return points, gaps


def improve(
    target: ExtensionSystem,
    current: PartialSpeedup,
    pbar: Sequence[int],
    n: int,
    delta: Fraction,
    n1: int,
    delta1: Fraction,
    a1: Sequence[int],
    a2: Sequence[int],
    epsilon: Fraction,
    *,
    zeta: Fraction | None = None,
    k_count: int = 1,
    strict: bool = False,
) -> ImproveResult:
    """One improvement step: copy a model name onto the tower's blocks.

    The new orbit runs through consecutive ladder blocks of the current
    tower, starting at the rotation that best matches the template's
    label and group tracks; the twist is then defined so the adjusted
    group coordinates replicate the template exactly, and leftover
    points receive a junk label outside the target alphabet.
    """
    delta = Fraction(delta)
    delta1 = Fraction(delta1)
    epsilon = Fraction(epsilon)
    if zeta is None:
        zeta = delta1
    ext = current.parent
    group = ext.group
    pbar = tuple(pbar)
    steps: list[tuple[str, str]] = []

    cert = check_regular(current, pbar, n, delta)
    if isinstance(cert, RegularityRefusal):
        raise RegularityRejected(
            "input speedup failed %s: %s" % (cert.condition, cert.detail)
        )
    steps.append(("step 1", "input certified regular at (%d, %s)" % (n, delta)))

    hyp = kantorovich(
        name_distribution(target, n), speedup_name_distribution(current, pbar, n)
    )
    if not hyp < delta:
        raise HypothesisDistance("n-name distance %s is not below %s" % (hyp, delta))

    lad = ladder(current, cert.tower_base, cert.height, n)
    unit = lcm(n, n1)
    capacity = len(lad.starts) * n
    length = (capacity // unit) * unit
    if length < n1:
        raise ScheduleInfeasible(
            "tower holds %d ladder points, below one block of %d" % (capacity, n1)
        )
    used_blocks = length // n
    steps.append(
        ("step 2", "%d of %d ladder blocks host the new orbit" % (used_blocks, len(lad.starts)))
    )

    model = build_model_name(
        target, n, n1, delta1, zeta, length=length, k_count=k_count, strict=strict
    )
    steps.append(
        ("step 3", "template of length %d read from %d" % (len(model), model.start))
    )

    # per-block point runs and in-block step exponents, in start order
    blocks = []
    for s in lad.starts:
        pts = lad.block(s)
        gaps = [current.exponent[z] for z in pts[:-1]]
        blocks.append((pts, gaps))
    seam_gap = []
    for j in range(len(blocks)):
        end = blocks[j][0][-1]
        nxt = blocks[(j + 1) % len(blocks)][0][0]
        seam_gap.append((nxt - end) % ext.size or ext.size)

    # group increments per step are forced by the parent skewing
    def walk_offsets(points: list[int], gaps: list[int]) -> list[int]:
        w = group.identity
        out = [w]
        for z, k in zip(points, gaps):
            w = group.mul[cocycle_product(ext, z, k)][w]
            out.append(w)
        return out

    best: tuple[int, int] | None = None
    for r in range(len(blocks)):
        points, gaps = _chain_for_rotation(blocks, seam_gap, r, used_blocks)
        offsets = walk_offsets(points, gaps)
        score = 0
        for t, z in enumerate(points):
            if pbar[z] != model.labels[t]:
                score += 1
            if offsets[t] != model.groups[t]:
                score += 1
        if best is None or score < best[0]:
            best = (score, r)
    assert best is not None
    rotation = best[1]
    chain, gaps = _chain_for_rotation(blocks, seam_gap, rotation, used_blocks)
    offsets = walk_offsets(chain, gaps)
    steps.append(("step 4", "rotation %d scored %d mismatches" % (rotation, best[0])))
    steps.append(("step 5", "no pseudo blocks needed: template fully real"))

    exponent = [0] * ext.size
    for t, z in enumerate(chain[:-1]):
        exponent[z] = gaps[t]
    k_max = max(max(gaps), 1) if gaps else 1
    speedup1 = PartialSpeedup(ext, tuple(exponent), k_max)
    steps.append(("step 6", "new exponent bounded by %d" % k_max))

    g0 = model.groups[0]
    alpha_values = [group.identity] * ext.size
    for t, z in enumerate(chain):
        alpha_values[z] = group.mul[model.groups[t]][group.inv[group.mul[offsets[t]][g0]]]
    alpha = Twist(tuple(alpha_values))
    steps.append(("step 7", "twist replicates the template's group track"))

    junk = max(target.alphabet()) + 1
    labels1 = [junk] * ext.size
    for t, z in enumerate(chain):
        labels1[z] = model.labels[t]
    labels1 = tuple(labels1)
    steps.append(("step 8", "labels copied; %d points marked junk" % labels1.count(junk)))

    # all output statistics are read off the twisted extension, which is
    # the system the next step consumes
    twisted = twist(ext, alpha)
    speedup1t = PartialSpeedup(twisted, tuple(exponent), k_max)

    # replication check: the twisted orbit equals the template exactly
    z, g = chain[0], g0
    for t in range(len(chain)):
        if (labels1[z], g) != model.coordinate(t):
            raise Collision("orbit coordinate %d does not replicate the template" % t)
        if t < len(chain) - 1:
            z, g = apply_speedup(speedup1t, (z, g))
    steps.append(("step 9", "template replicated on all %d coordinates" % len(chain)))

    drift = Fraction(sum(1 for x in range(ext.size) if pbar[x] != labels1[x]), ext.size)
    size_alpha = twist_size(alpha, group)
    broken = broken_fraction(lad, speedup1)
    final = kantorovich(
        name_distribution(target, n1), speedup_name_distribution(speedup1t, labels1, n1)
    )
    cert1 = check_regular(speedup1t, labels1, n1, delta1)
    if isinstance(cert1, RegularityRefusal):
        regular = False
        note = "%s: %s" % (cert1.condition, cert1.detail)
        ladder_distance = cert1.measured
        height1 = length
        mass1 = speedup1.domain_mass()
        kmax1 = speedup1.max_exponent()
    else:
        regular = True
        note = ""
        ladder_distance = cert1.ladder_distance
        height1 = cert1.height
        mass1 = cert1.domain_mass
        kmax1 = cert1.max_exponent

    a1set = frozenset(a1)
    a2set = frozenset(a2)
    if not a2set:
        raise ValidationError("the group window must be nonempty")
    density = Fraction(len(a1set), ext.size) * Fraction(len(a2set), group.order)
    lad1 = ladder(speedup1t, (chain[0],), length, n1)
    good = 0
    total = 0
    for s in lad1.starts:
        for h in group.elements():
            hits = 0
            z, g = s, h
            for i in range(n1):
                if z in a1set and g in a2set:
                    hits += 1
                if i < n1 - 1:
                    z, g = apply_speedup(speedup1t, (z, g))
            total += 1
            if Fraction(hits, n1) > density - epsilon:
                good += 1
    good_fraction = Fraction(good, total)

    report = ImprovementReport(
        n=n,
        delta=delta,
        n1=n1,
        delta1=delta1,
        epsilon=epsilon,
        hypothesis_distance=hyp,
        partition_drift=drift,
        twist_size=size_alpha,
        broken_mass=broken,
        name_distance=final,
        good_set_fraction=good_fraction,
        good_set_density=density,
        regular=regular,
        regularity_note=note,
        ladder_distance=ladder_distance,
        domain_mass=mass1,
        height=height1,
        max_exponent=kmax1,
        model_window_distance=model.window_distance,
        model_block_distance=model.block_distance,
        model_cover_fraction=model.cover_fraction,
        model_min_atom_count=model.min_atom_count,
        model_length=len(model),
        model_start=model.start,
        rotation=rotation,
        steps=tuple(steps),
    )
    return ImproveResult(
        speedup=speedup1,
        labels=labels1,
        alpha=alpha,
        report=report,
        chain=tuple(chain),
        model=model,
    )
