//! Generalized renewal process tools for repairable systems with preventive
//! (PM) and corrective (CM) maintenance under Kijima virtual-age dynamics and
//! a Weibull baseline: simulation, exact log-likelihood, Cross-Entropy
//! maximum-likelihood fitting and replication studies.

pub mod ce;
pub mod error;
pub mod estimator;
pub mod io;
pub mod model;
pub mod sampler;
pub mod study;

pub use ce::{ce_maximize, BoxDomain, CeConfig, CeDiagnostics, CeOutcome};
pub use error::{GrpError, Result};
pub use estimator::{evaluate, fit_mle, ExtremeFlags, FitResult, FitSpace, StartResult};
pub use model::{
    event_log_likelihood, history_log_likelihood, trajectory, virtual_age_step, Event, EventHistory,
    EventKind, Item, RestorationFactors, WeibullParams,
};
pub use sampler::{conditional_quantile, generate, next_event, GenerationConfig};
pub use study::{run_study, StudyConfig, StudyReport, StudyRow, StudySummary};
