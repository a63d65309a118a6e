"""Correlated node behavior model: semi-Markov survivability toolkit."""

from ncbm._core import (  # noqa: F401
    Adjustment,
    BehaviorParams,
    BehaviorState,
    ClusterState,
    CorrelatedCluster,
    CorrelatedFunctions,
    CorrelatedFunctionsReport,
    DegenerateRowError,
    EmbeddedTpm,
    FeasibleProjection,
    FoldNormalization,
    InfeasibleSweepError,
    LifetimeStats,
    NumericalError,
    ObservedLevels,
    OccupancyStats,
    ParseError,
    RawEstimate,
    Scenario,
    SojournFamily,
    SojournSpec,
    StatusThresholds,
    SteadyState,
    SurvivabilityMetric,
    SurvivabilityValue,
    SweepConfig,
    SweepResult,
    SweepRow,
    TrafficRecord,
    Trajectory,
    TrajectoryEntry,
    ValidationError,
    ZeroDenominatorError,
    __version__,
    aggregate_records,
    apply_scenario_constraints,
    build_tpm,
    classify_status,
    compose_cluster,
    compose_pair,
    correlated_functions,
    correlated_functions_report,
    estimate_params,
    lifetime,
    limiting_distribution,
    occupancy_estimate,
    project_feasible,
    run_sweep,
    simulate,
    simulate_many,
    stationary,
    stationary_matrix,
    survivability,
    transient_occupancy,
    transient_occupancy_matrix,
    validate_params,
    validate_thresholds,
)
