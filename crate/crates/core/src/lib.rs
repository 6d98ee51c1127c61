//! Stochastic Cournot equilibria by discretizing the random factors into
//! cells, solving one monotone box-constrained variational inequality per
//! cell, and aggregating the resulting step function.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below fix the precision.

pub mod aggregate;
pub mod cournot;
pub mod discretize;
pub mod distributions;
pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod summation;
pub mod vi;

pub use aggregate::{
    convergence_report, expectation, write_convergence_csv, ConvergenceRow, LadderLevel,
    MomentAccumulator, MomentReport,
};
pub use cournot::{benchmark, cost, CournotInstance, CournotOperator, FirmParams, Scenario};
pub use discretize::{
    build_cell_problem, enumerate_cells, lp_norm_of, mean_truncation, solve_all, solve_streaming,
    CellAverages, CellIndex, CellProblem, CellReport, FactorResolution, FactorRole, Grid,
    GridSpec, StepSolution, SweepOptions, SweepSummary,
};
pub use distributions::{
    make_partition, normal_cdf, normal_pdf, normal_quantile, normal_sf,
    step_approximation_error, Partition1D, RandomFactor, RepresentativeRule,
};
pub use error::{Error, Result};
pub use oracle::{monte_carlo_mean, sample_scenario, OracleReport};
pub use quadrature::GaussLegendre;
pub use scalar::Scalar;
pub use summation::{compensated_sum, CompensatedSum};
pub use vi::{
    check_monotone, natural_residual, project, solve_vi, AffineOperator, BoxSet, Extragradient,
    FnOperator, MonotonicityReport, Operator, SolveReport, SolverConfig, VIProblem,
};

pub type BoxSet64 = BoxSet<f64>;
pub type BoxSet32 = BoxSet<f32>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type SolverConfig32 = SolverConfig<f32>;
pub type RandomFactor64 = RandomFactor<f64>;
pub type RandomFactor32 = RandomFactor<f32>;
pub type FirmParams64 = FirmParams<f64>;
pub type FirmParams32 = FirmParams<f32>;
pub type CournotInstance64 = CournotInstance<f64>;
pub type CournotInstance32 = CournotInstance<f32>;
pub type Grid64 = Grid<f64>;
pub type Grid32 = Grid<f32>;
pub type StepSolution64 = StepSolution<f64>;
pub type StepSolution32 = StepSolution<f32>;
pub type MomentReport64 = MomentReport<f64>;
pub type MomentReport32 = MomentReport<f32>;
