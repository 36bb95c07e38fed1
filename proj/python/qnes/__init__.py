"""Quasi-Newton and Hessian estimation evolution strategies."""

from ._core import (
    Algorithm,
    CsaMode,
    GradientMode,
    InitialConditions,
    InvalidInput,
    IterationRecord,
    NumericalAbort,
    Objective,
    RateSummary,
    RestartPolicy,
    RunLog,
    StoppingCriteria,
    StrategyParams,
    benchmark_names,
    chi_mean,
    default_params,
    ipop_run,
    make_benchmark,
    make_diagonal_quadratic,
    objective,
    params_for,
    progress_factors,
    read_csv,
    run,
    summarize_rate,
    switch_probabilities,
    sym_exp,
    write_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
