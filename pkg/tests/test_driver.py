"""Iteration schedules, the factor and isomorphism loops, witnesses,
factor maps, and orbit seeding."""

from fractions import Fraction

import pytest

from skewlab import (
    ExtensionSystem,
    FactorMap,
    GeneratorCheckFailed,
    Infeasible,
    IterationSchedule,
    NoGoodOrbit,
    NotReachable,
    PartialSpeedup,
    TowerInfeasible,
    Twist,
    ValidationError,
    bootstrap_regular,
    complete_speedup,
    copy_partition,
    cyclic,
    ergodicity_certificate,
    run_factor,
    run_isomorphism,
    seed_from_orbit,
    total_extension_witness,
    trivial,
    truncate_partition,
    verify_factor_map,
)
from skewlab.driver import _cylinder_sets


def marker_system(size, marker, group=None, flips=()):
    g = group if group is not None else trivial()
    return ExtensionSystem(
        size=size,
        labels=tuple(1 if x == marker else 0 for x in range(size)),
        group=g,
        skew=tuple(1 if x in flips else 0 for x in range(size)),
    )


def plain_schedule(size, budget, epsilons=(Fraction(1, 10), Fraction(1, 20))):
    return IterationSchedule(
        epsilon=Fraction(3, 10),
        epsilons=epsilons[:budget] if budget else epsilons[:1],
        steps=((4, Fraction(3, 10), 8, Fraction(3, 10)),),
        rectangles=((tuple(range(size)), (0,)),),
        budget=budget,
    )


# ---------------------------------------------------------------------------
# schedules


def test_schedule_accessors_cycle_and_clamp():
    s = IterationSchedule(
        epsilon=Fraction(1, 2),
        epsilons=(Fraction(1, 4), Fraction(1, 8)),
        steps=((2, Fraction(1, 4), 4, Fraction(1, 8)), (4, Fraction(1, 8), 8, Fraction(1, 16))),
        rectangles=(((0,), (0,)), ((1,), (0,))),
        budget=5,
    )
    assert s.step_for(0)[0] == 2
    assert s.step_for(7)[0] == 4
    assert s.eps_for(9) == Fraction(1, 8)
    assert s.rect_for(2) == ((0,), (0,))
    assert s.rect_for(3) == ((1,), (0,))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(budget=-1),
        dict(epsilon=Fraction(3, 2)),
        dict(epsilons=()),
        dict(epsilons=(Fraction(1, 8), Fraction(1, 4))),
        dict(epsilons=(Fraction(1, 4), Fraction(1, 4))),
        dict(steps=()),
        dict(steps=((8, Fraction(1, 4), 4, Fraction(1, 8)),)),
        dict(steps=((4, Fraction(0), 8, Fraction(1, 8)),)),
        dict(rectangles=()),
    ],
)
def test_schedule_validation(kwargs):
    base = dict(
        epsilon=Fraction(1, 2),
        epsilons=(Fraction(1, 4), Fraction(1, 8)),
        steps=((4, Fraction(1, 8), 8, Fraction(1, 16)),),
        rectangles=(((0,), (0,)),),
        budget=2,
    )
    base.update(kwargs)
    with pytest.raises(ValidationError):
        IterationSchedule(**base)


def test_schedule_strict_gates():
    ok = IterationSchedule(
        epsilon=Fraction(1, 2),
        epsilons=(Fraction(1, 8), Fraction(1, 16)),
        steps=((4, Fraction(1, 40), 8, Fraction(1, 40)),),
        rectangles=(((0,), (0,)),),
        budget=2,
        strict=True,
    )
    assert ok.strict
    # tolerances summing past epsilon/2
    with pytest.raises(ValidationError):
        IterationSchedule(
            epsilon=Fraction(1, 4),
            epsilons=(Fraction(1, 8), Fraction(1, 16)),
            steps=((4, Fraction(1, 40), 8, Fraction(1, 40)),),
            rectangles=(((0,), (0,)),),
            budget=2,
            strict=True,
        )
    # delta at half the iteration tolerance
    with pytest.raises(ValidationError):
        IterationSchedule(
            epsilon=Fraction(1, 2),
            epsilons=(Fraction(1, 8), Fraction(1, 16)),
            steps=((4, Fraction(1, 16), 8, Fraction(1, 20)),),
            rectangles=(((0,), (0,)),),
            budget=2,
            strict=True,
        )
    # budget too small to revisit every rectangle
    with pytest.raises(ValidationError):
        IterationSchedule(
            epsilon=Fraction(1, 2),
            epsilons=(Fraction(1, 8), Fraction(1, 16)),
            steps=((4, Fraction(1, 20), 8, Fraction(1, 20)),),
            rectangles=(((0,), (0,)), ((1,), (0,)), ((2,), (0,))),
            budget=2,
            strict=True,
        )


# ---------------------------------------------------------------------------
# bootstrap and completion


def test_bootstrap_trims_to_block_multiple():
    src = marker_system(48, 20)
    sp, cert = bootstrap_regular(src, src.labels, 4, Fraction(3, 10), Fraction(2, 5))
    assert sp.exponent == tuple(1 if x < 47 else 0 for x in range(48))
    assert cert.height == 48
    assert cert.rungs == 12


def test_bootstrap_change_gate():
    src = marker_system(10, 9)
    # height 8, trimmed mass (10 - 8 + 1)/10 = 3/10 not below epsilon/2
    with pytest.raises(Infeasible):
        bootstrap_regular(src, src.labels, 4, Fraction(1, 2), Fraction(1, 2))


def test_bootstrap_too_small():
    src = marker_system(3, 2)
    with pytest.raises(Infeasible):
        bootstrap_regular(src, src.labels, 4, Fraction(1, 2), Fraction(1, 2))


def test_bootstrap_unbalanced_track_refused():
    # a flip right at the chain start piles every rung onto one fiber
    src = marker_system(64, 63, group=cyclic(2), flips=(0,))
    with pytest.raises(Infeasible) as exc:
        bootstrap_regular(src, src.labels, 4, Fraction(3, 10), Fraction(2, 5))
    assert "condition 4" in str(exc.value)


def test_complete_trimmed_rotation_is_rotation():
    src = marker_system(10, 9)
    sp, _ = bootstrap_regular(src, src.labels, 2, Fraction(1, 2), Fraction(1, 2))
    comp = complete_speedup(sp)
    assert comp.exponent == (1,) * 10


def test_complete_total_returns_same_object():
    ext = marker_system(6, 5)
    unit = PartialSpeedup(ext, (1,) * 6, 1)
    assert complete_speedup(unit) is unit


def test_complete_constant_two_stays_constant():
    ext = ExtensionSystem(size=6, labels=(0,) * 6, group=trivial(), skew=(0,) * 6)
    comp = complete_speedup(PartialSpeedup(ext, (2, 2, 2, 0, 0, 0), 2))
    assert comp.exponent == (2,) * 6
    assert comp.k_max == 2


def test_complete_images_stay_disjoint():
    ext = ExtensionSystem(size=12, labels=(0,) * 12, group=trivial(), skew=(0,) * 12)
    sp = PartialSpeedup(ext, (3, 1, 2, 0, 1, 1, 0, 2, 0, 1, 0, 0), 3)
    comp = complete_speedup(sp)
    images = [comp.base_image(x) for x in range(12)]
    assert sorted(images) == list(range(12))
    for x in sp.domain():
        assert comp.exponent[x] == sp.exponent[x]


# ---------------------------------------------------------------------------
# witnesses


def test_witness_rotation_by_two_splits():
    ext = ExtensionSystem(size=6, labels=(0,) * 6, group=trivial(), skew=(0,) * 6)
    comp = complete_speedup(PartialSpeedup(ext, (2, 2, 2, 0, 0, 0), 2))
    w = total_extension_witness(comp)
    assert not w.ergodic
    assert w.cycle_length == 3
    assert w.splitting_point == (1, 0)


def test_witness_flip_parity():
    g2 = cyclic(2)
    odd = ExtensionSystem(size=4, labels=(0,) * 4, group=g2, skew=(1, 0, 0, 0))
    even = ExtensionSystem(size=4, labels=(0,) * 4, group=g2, skew=(1, 0, 1, 0))
    wo = total_extension_witness(PartialSpeedup(odd, (1,) * 4, 1))
    we = total_extension_witness(PartialSpeedup(even, (1,) * 4, 1))
    assert wo.ergodic and wo.cycle_length == 8
    assert not we.ergodic and we.cycle_length == 4
    assert we.splitting_point == (0, 1)


def test_witness_requires_total():
    ext = marker_system(6, 5)
    with pytest.raises(ValidationError):
        total_extension_witness(PartialSpeedup(ext, (1, 1, 1, 1, 1, 0), 1))


def test_certificate_full_cycle_matches_everything():
    ext = ExtensionSystem(size=6, labels=(0,) * 6, group=trivial(), skew=(0,) * 6)
    full = PartialSpeedup(ext, (1,) * 6, 1)
    a, b = ergodicity_certificate(full, [((0, 1, 2), (3, 4, 5)), ((0,), (0,))], Fraction(0))
    assert a.pieces == ((0, 3, 3), (1, 3, 4), (2, 3, 5))
    assert a.matched == 1
    assert a.carried() == (3, 4, 5)
    assert b.pieces == ((0, 0, 0),)


def test_certificate_split_orbit_unreachable():
    ext = ExtensionSystem(size=6, labels=(0,) * 6, group=trivial(), skew=(0,) * 6)
    rot2 = complete_speedup(PartialSpeedup(ext, (2, 2, 2, 0, 0, 0), 2))
    with pytest.raises(NotReachable):
        ergodicity_certificate(rot2, [((0,), (1,))], Fraction(1, 10))


def test_certificate_validation():
    ext = ExtensionSystem(size=6, labels=(0,) * 6, group=trivial(), skew=(0,) * 6)
    full = PartialSpeedup(ext, (1,) * 6, 1)
    with pytest.raises(ValidationError):
        ergodicity_certificate(full, [((), (1,))], Fraction(0))
    part = PartialSpeedup(ext, (1, 1, 1, 1, 1, 0), 1)
    with pytest.raises(ValidationError):
        ergodicity_certificate(part, [((0,), (1,))], Fraction(0))


# ---------------------------------------------------------------------------
# factor maps and partition copying


@pytest.fixture
def eight_cycle():
    ext = marker_system(8, 7)
    return ext, PartialSpeedup(ext, (1,) * 8, 1)


def test_factor_map_mapping(eight_cycle):
    _, big = eight_cycle
    fmap = FactorMap(8, 8, tuple(range(8)), 0)
    assert fmap.mapping() == {x: x for x in range(8)}
    fmap2 = FactorMap(8, 4, (2, 3, 4), 3)
    assert fmap2.mapping() == {2: 3, 3: 0, 4: 1}


def test_verify_factor_map_identity(eight_cycle):
    ext, big = eight_cycle
    verify_factor_map(FactorMap(8, 8, tuple(range(8)), 0), big, ext)


def test_verify_factor_map_chain_break(eight_cycle):
    ext, big = eight_cycle
    with pytest.raises(ValidationError) as exc:
        verify_factor_map(FactorMap(8, 8, (0, 2, 3), 0), big, ext)
    assert "position 0" in str(exc.value)


def test_verify_factor_map_skew_mismatch():
    g2 = cyclic(2)
    flat = ExtensionSystem(size=8, labels=(0,) * 8, group=g2, skew=(0,) * 8)
    target = ExtensionSystem(
        size=8, labels=(0, 0, 0, 0, 0, 0, 0, 1), group=g2, skew=(1,) + (0,) * 7
    )
    big = PartialSpeedup(flat, (1,) * 8, 1)
    with pytest.raises(ValidationError) as exc:
        verify_factor_map(FactorMap(8, 8, (0, 1, 2), 0), big, target)
    assert "skewing mismatch" in str(exc.value)


def test_verify_factor_map_size_check(eight_cycle):
    ext, big = eight_cycle
    with pytest.raises(ValidationError):
        verify_factor_map(FactorMap(9, 8, (0, 1), 0), big, ext)


def test_copy_constant_partition_is_exact(eight_cycle):
    ext, big = eight_cycle
    fmap = FactorMap(8, 8, tuple(range(8)), 0)
    copied, dist = copy_partition(fmap, big, ext.labels, ext, (0,) * 8, Fraction(1, 2), 4)
    assert copied == (0,) * 8
    assert dist == 0


def test_copy_pullback_round_trips(eight_cycle):
    ext, big = eight_cycle
    fmap = FactorMap(8, 8, tuple(range(8)), 0)
    q = (0, 1, 1, 0, 2, 2, 0, 1)
    copied, dist = copy_partition(fmap, big, ext.labels, ext, q, Fraction(1, 2), 4)
    assert copied == q
    assert dist == 0


def test_copy_fills_uncovered_points_with_largest_atom(eight_cycle):
    ext, big = eight_cycle
    fmap = FactorMap(8, 8, tuple(range(6)), 0)
    copied, _ = copy_partition(
        fmap, big, ext.labels, ext, (5, 5, 5, 5, 7, 7, 7, 7), Fraction(1, 2), 4
    )
    assert copied == (5, 5, 5, 5, 7, 7, 5, 5)


def test_copy_validation(eight_cycle):
    ext, big = eight_cycle
    fmap = FactorMap(8, 8, tuple(range(8)), 0)
    q = (0,) * 8
    with pytest.raises(ValidationError):
        copy_partition(fmap, big, ext.labels, ext, q, Fraction(3, 2), 4)
    with pytest.raises(TowerInfeasible):
        copy_partition(fmap, big, ext.labels, ext, q, Fraction(1, 2), 9)


def test_cylinder_sets_enumeration():
    assert _cylinder_sets((0, 1, 0, 1), 4, 3) == [(0, 2), (1, 3), (0, 2)]
    assert _cylinder_sets((0, 0, 0, 1), 4, 4) == [(0, 1, 2), (3,), (0, 1), (2,)]


# ---------------------------------------------------------------------------
# the loops


def test_factor_budget_zero_is_bootstrap():
    src = marker_system(48, 20)
    res = run_factor(src, src, src.labels, plain_schedule(48, 0))
    assert res.speedup.exponent == (1,) * 48
    assert res.log.reports == ()
    assert res.beta.values == (0,) * 48
    assert res.log.change_mass == 0
    assert res.log.change_bound == Fraction(1, 48)
    assert res.log.witness.ergodic and res.log.witness.cycle_length == 48
    assert res.chain == ()


def test_factor_constant_self_pair_fixed_point():
    c = ExtensionSystem(size=32, labels=(0,) * 32, group=trivial(), skew=(0,) * 32)
    res = run_factor(c, c, c.labels, plain_schedule(32, 2))
    assert [r.name_distance for r in res.log.reports] == [0, 0]
    assert [r.twist_size for r in res.log.reports] == [0, 0]
    assert res.log.change_mass == 0
    assert res.labels == c.labels
    assert res.log.witness.ergodic


def test_factor_marker_pair_converges():
    target = marker_system(48, 47)
    source = marker_system(48, 20)
    res = run_factor(target, source, source.labels, plain_schedule(48, 2))
    assert [r.name_distance for r in res.log.reports] == [Fraction(1, 6), Fraction(1, 6)]
    assert res.log.change_mass == 0
    assert res.log.witness.ergodic and res.log.witness.cycle_length == 48
    assert len(res.chain) == 48
    assert res.model_start == 0
    for rep, eps in zip(res.log.reports, (Fraction(1, 10), Fraction(1, 20))):
        assert rep.twist_size < eps


def test_factor_accumulated_twist_composes():
    g2 = cyclic(2)
    target = marker_system(64, 63, group=g2, flips=(32,))
    source = marker_system(64, 63, group=g2, flips=(20,))
    res = run_factor(target, source, source.labels, plain_schedule(64, 1))
    twisted = res.speedup.parent
    expected = Twist.compose(res.beta, Twist.identity(64, g2), g2)
    for x in range(64):
        acc = expected.values[(x + 1) % 64]
        inv = g2.inv[expected.values[x]]
        assert twisted.skew[x] == g2.mul[acc][g2.mul[source.skew[x]][inv]]


def test_isomorphism_tracks_generators():
    target = marker_system(48, 47)
    source = marker_system(48, 20)
    res = run_isomorphism(
        target, source, source.labels, plain_schedule(48, 2), copy_zeta=Fraction(1, 2)
    )
    assert [r.name_distance for r in res.log.reports] == [Fraction(1, 6), Fraction(1, 6)]
    assert len(res.log.generator) == 2
    for rec in res.log.generator:
        assert rec.defect <= rec.bound
        assert rec.defect == Fraction(1, 48)
        assert rec.window == 0
        assert rec.copy_distance == Fraction(1, 12)
    assert res.log.separation_failure == 0


def test_isomorphism_needs_separating_target():
    c = ExtensionSystem(size=16, labels=(0,) * 16, group=trivial(), skew=(0,) * 16)
    with pytest.raises(GeneratorCheckFailed):
        run_isomorphism(c, c, c.labels, plain_schedule(16, 1))


# ---------------------------------------------------------------------------
# orbit seeding and truncation


def test_seed_identical_constant_systems():
    c = ExtensionSystem(size=16, labels=(0,) * 16, group=trivial(), skew=(0,) * 16)
    labels, alpha = seed_from_orbit(c, c, 16, Fraction(1, 10), n=4)
    assert labels == c.labels
    assert set(alpha.values) == {0}


def test_seed_marker_segment_carries_marker():
    m = marker_system(16, 15)
    labels, alpha = seed_from_orbit(m, m, 16, Fraction(1, 10), n=4)
    assert labels == (0,) * 13 + (1, 0, 0)
    assert set(alpha.values) == {0}


def test_seed_shorter_segment_leaves_junk_tail():
    m = marker_system(16, 15)
    big = marker_system(24, 23)
    labels, _ = seed_from_orbit(m, big, 16, Fraction(1, 10), n=4)
    assert labels[:16] == (0,) * 13 + (1, 0, 0)
    assert labels[16:] == (2,) * 8


def test_seed_matches_skewing_on_twisted_source():
    # after twisting, the source's group track reads exactly like the
    # copied target segment's
    g2 = cyclic(2)
    target = marker_system(16, 15, group=g2, flips=(8,))
    source = marker_system(16, 15, group=g2, flips=(5,))
    labels, alpha = seed_from_orbit(target, source, 16, Fraction(1, 2), n=4)
    from skewlab import skew_orbit, twist

    twisted = twist(source, alpha)
    word = skew_orbit(twisted, (0, 0), 16)
    expect_start = next(
        x for x in range(16)
        if tuple(target.labels[(x + i) % 16] for i in range(16)) == labels
    )
    expect = skew_orbit(target, (expect_start, 0), 16)
    assert [g for _, g in word] == [g for _, g in expect]
    assert [labels[i] for i in range(16)] == [a for a, _ in expect]


def test_seed_refuses_bad_statistics():
    m = marker_system(16, 15)
    with pytest.raises(NoGoodOrbit):
        seed_from_orbit(m, m, 8, Fraction(1, 100), n=4)


def test_seed_validation():
    m = marker_system(16, 15)
    with pytest.raises(ValidationError):
        seed_from_orbit(m, m, 2, Fraction(1, 10), n=4)
    with pytest.raises(ValidationError):
        seed_from_orbit(m, m, 17, Fraction(1, 10), n=4)
    z2 = marker_system(16, 15, group=cyclic(2))
    with pytest.raises(ValidationError):
        seed_from_orbit(z2, m, 16, Fraction(1, 10), n=4)


def test_truncate_keeps_small_partitions():
    labels = (0, 1, 2, 0, 1, 2)
    assert truncate_partition(labels, 3) == labels
    assert truncate_partition(labels, 5) == labels


def test_truncate_to_one_atom_leaves_two():
    labels = (0, 1, 2, 0, 1, 2)
    assert truncate_partition(labels, 1) == (0, 1, 1, 0, 1, 1)


def test_truncate_merges_tail():
    labels = tuple(range(16))
    assert truncate_partition(labels, 8) == tuple(min(l, 8) for l in labels)


def test_truncate_validation():
    with pytest.raises(ValidationError):
        truncate_partition((0, 1), 0)
