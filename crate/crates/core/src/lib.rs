//! Numerical laboratory for the rate of convergence in Selberg's central
//! limit theorem.

pub mod arith;
pub mod chain_runner;
pub mod checks;
pub mod dirichlet;
pub mod error;
pub mod mc;
pub mod metrics;
pub mod parallel;
pub mod params;
pub mod sum;
pub mod zeta;

pub use arith::{build_tables, ArithTables, MollifierShape};
pub use dirichlet::{DirichletPolynomial, Mollifier, PolyLabel, PreparedMollifier, PreparedPoly};
pub use error::{Error, Result};
pub use parallel::Parallelism;
pub use params::{ExperimentParams, Overrides, ParamInputs};
pub use zeta::{log_abs_zeta, zeta_eval, ZetaBackend, ZetaLog, ZetaMode};
pub use mc::{GaussianSpec, SampleChain};
pub use metrics::{dudley_estimate, DistanceReport, FamilyConfig, Source, TestFunctionFamily};
pub use chain_runner::{rate_curve, run_ladder, LadderConfig, LadderResult, RatePoint};
