"""Finite skew products, their speedups, and name-statistics machinery."""

from .distributions import (
    BlockSpace,
    ContinuityPartition,
    DiscreteSpace,
    EmpiricalDistribution,
    GroupSpace,
    LabelGroupSpace,
    TableMetricSpace,
    block_distribution,
    continuity_partition,
    density_lower_bound,
    kantorovich,
    translate_name,
    uniformity_modulus,
)
from .driver import (
    ConstructionLog,
    FactorMap,
    FactorResult,
    FullGroupWitness,
    GeneratorRecord,
    IterationSchedule,
    bootstrap_regular,
    complete_speedup,
    copy_partition,
    ergodicity_certificate,
    run_factor,
    run_isomorphism,
    seed_from_orbit,
    total_extension_witness,
    truncate_partition,
    verify_factor_map,
)
from .errors import (
    AtomTooSmall,
    Collision,
    DomainTooSmall,
    GeneratorCheckFailed,
    HypothesisDistance,
    Infeasible,
    InfeasibleTemplate,
    NoGoodOrbit,
    NotMultiple,
    NotReachable,
    OutOfDomain,
    ParseError,
    PositionOutOfRange,
    PreconditionViolated,
    RegularityRejected,
    ScheduleInfeasible,
    SkewlabError,
    SpaceMismatch,
    TooFar,
    TooShort,
    TowerInfeasible,
    ValidationError,
)
from .groups import FiniteGroup, cyclic, from_tables, trivial
from .improvement import (
    Cycle,
    ImproveResult,
    ImprovementReport,
    ModelName,
    WindowSystem,
    build_cycles,
    build_model_name,
    check_regular,
    improve,
)
from .matching import (
    SampleFamily,
    exhaust_samples,
    match_bijection,
    match_surjection,
    sample_onto,
)
from .systems import (
    ErgodicityWitness,
    ExtensionSystem,
    PartialSpeedup,
    RegularityCertificate,
    RegularityRefusal,
    Twist,
    apply_speedup,
    check_extension_ergodic,
    cocycle_product,
    name_distribution,
    power_domain,
    skew_orbit,
    speedup_name,
    speedup_name_distribution,
    twist,
    twist_size,
)
from .towers import (
    Column,
    Ladder,
    RokhlinTower,
    broken_fraction,
    build_tower,
    ladder,
    pure_columns,
    rotation_tower,
)

__all__ = [name for name in dir() if not name.startswith("_")]
