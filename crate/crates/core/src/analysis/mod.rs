//! Monte Carlo statistics, quadrature oracles, scaling fits and exact audits.

pub mod audit;
pub mod ks;
pub mod quadrature;
pub mod report;
pub mod scaling;
pub mod stats;
pub mod taylor;

pub use audit::{covar_bound_audit, orthogonality_audit, AuditItem, CovarAudit};
pub use ks::{ks_critical_001, ks_statistic, ks_two_sample, KsResult};
pub use quadrature::{hermite_mean_limit, hermite_second_moment_limit, NormalRule, QuadratureResolution};
pub use report::{CheckResult, ExperimentReport};
pub use scaling::{moment_scaling, MomentEstimator, ScalingFit, ScalingOutcome, ScalingRequest};
pub use stats::{mc_moment, MomentEstimate, SampleSet};
pub use taylor::{taylor_residual, TaylorResidual, GAMMA};
