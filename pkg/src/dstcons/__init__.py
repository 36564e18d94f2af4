"""Dempster-Shafer belief combination and best-of-n consensus dynamics."""

from .evidence import (
    NoiseSpec,
    QualityProfile,
    default_qualities,
    evidence_mass,
    select_state,
)
from .fixedpoint import (
    FixedPointReport,
    classify,
    dp_polynomial_map,
    numeric_jacobian,
    self_combine_residual,
    spectral_radius_eig,
    spectral_radius_power,
)
from .harness import (
    CellSummary,
    RunRecord,
    SweepSpec,
    SweepResult,
    derive_seed,
    emit_csv,
    preset_spec,
    reproduce,
    run_sweep,
    summarize_convergence_time,
)
from .mass import (
    COMBINERS,
    EPS_NORM,
    EPS_PRUNE,
    FrameOfDiscernment,
    MassFunction,
    PignisticDistribution,
    TotalConflictError,
    approx_eq,
    bel,
    combine_average,
    combine_dempster,
    combine_dubois_prade,
    combine_yager,
    conflict,
    format_mass,
    get_combiner,
    make_vacuous,
    pignistic,
    pl,
    renormalize,
)
from .simulation import (
    EPS_CONV,
    AgentPopulation,
    RunResult,
    SimConfig,
    check_convergence,
    consensus_step,
    evidence_step,
    init_population,
    population_mean_bel,
    population_mean_pl,
    run,
)

__version__ = "0.1.0"

__all__ = [
    "AgentPopulation",
    "CellSummary",
    "COMBINERS",
    "EPS_CONV",
    "EPS_NORM",
    "EPS_PRUNE",
    "FixedPointReport",
    "FrameOfDiscernment",
    "MassFunction",
    "NoiseSpec",
    "PignisticDistribution",
    "QualityProfile",
    "RunRecord",
    "RunResult",
    "SimConfig",
    "SweepResult",
    "SweepSpec",
    "TotalConflictError",
    "approx_eq",
    "bel",
    "check_convergence",
    "classify",
    "combine_average",
    "combine_dempster",
    "combine_dubois_prade",
    "combine_yager",
    "conflict",
    "consensus_step",
    "default_qualities",
    "derive_seed",
    "dp_polynomial_map",
    "emit_csv",
    "evidence_mass",
    "evidence_step",
    "format_mass",
    "get_combiner",
    "init_population",
    "make_vacuous",
    "numeric_jacobian",
    "pignistic",
    "pl",
    "population_mean_bel",
    "population_mean_pl",
    "preset_spec",
    "renormalize",
    "reproduce",
    "run",
    "run_sweep",
    "select_state",
    "self_combine_residual",
    "spectral_radius_eig",
    "spectral_radius_power",
    "summarize_convergence_time",
]
