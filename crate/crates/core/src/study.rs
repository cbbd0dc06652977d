//! Replication studies: generate a sample from known parameters, fit it, and
//! tally how often the restoration factors land on the edges of `[0, 1]`.
//!
//! Replication `r` (1-based) generates with seed `base_seed + r`; its
//! optimizer seed is `splitmix64(base_seed + r)`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::ce::CeConfig;
use crate::estimator::{fit_mle, ExtremeFlags, FitSpace};
use crate::model::{RestorationFactors, WeibullParams};
use crate::sampler::{generate, GenerationConfig};

#[derive(Debug, Clone, Serialize)]
pub struct StudyConfig {
    pub params: WeibullParams,
    pub factors: RestorationFactors,
    pub k_cm: f64,
    pub events_per_item: usize,
    pub n_items: usize,
    pub replications: usize,
    pub base_seed: u64,
    pub space: FitSpace,
    pub ce: CeConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyFit {
    pub a: f64,
    pub b: f64,
    pub theta: f64,
    pub q_pm: f64,
    pub q_cm: f64,
    pub log_likelihood: f64,
    pub truth_log_likelihood: f64,
    pub pm_events: usize,
    pub cm_events: usize,
    pub extreme_flags: ExtremeFlags,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub replication: usize,
    pub seed: u64,
    pub fit: Option<StudyFit>,
    pub error: Option<String>,
}

/// Fractions are over replications whose fit succeeded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudySummary {
    pub replications: usize,
    pub failed: usize,
    pub any_extreme_fraction: f64,
    pub q_pm_extreme_fraction: f64,
    pub q_cm_extreme_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub rows: Vec<StudyRow>,
    pub summary: StudySummary,
}

pub fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn replication_seed(base_seed: u64, replication: usize) -> u64 {
    base_seed.wrapping_add(replication as u64)
}

pub fn run_replication(config: &StudyConfig, replication: usize) -> StudyRow {
    let seed = replication_seed(config.base_seed, replication);
    let outcome = (|| {
        let gen = GenerationConfig {
            params: config.params,
            factors: config.factors,
            k_cm: config.k_cm,
            events_per_item: config.events_per_item,
            n_items: config.n_items,
            seed,
        };
        let history = generate(&gen)?;
        let truth_ll = crate::model::history_log_likelihood(&config.params, &config.factors, &history)?;
        let ce = CeConfig {
            seed: splitmix64(seed),
            ..config.ce.clone()
        };
        let fit = fit_mle(&history, &config.space, &ce)?;
        let (pm_events, cm_events) = history.counts();
        Ok::<_, crate::GrpError>(StudyFit {
            a: fit.params.a(),
            b: fit.params.b(),
            theta: fit.params.theta(),
            q_pm: fit.factors.q_pm(),
            q_cm: fit.factors.q_cm(),
            log_likelihood: fit.log_likelihood,
            truth_log_likelihood: truth_ll,
            pm_events,
            cm_events,
            extreme_flags: fit.extreme_flags,
        })
    })();
    match outcome {
        Ok(fit) => StudyRow {
            replication,
            seed,
            fit: Some(fit),
            error: None,
        },
        Err(e) => StudyRow {
            replication,
            seed,
            fit: None,
            error: Some(e.to_string()),
        },
    }
}

pub fn summarize(rows: &[StudyRow]) -> StudySummary {
    let fits: Vec<&StudyFit> = rows.iter().filter_map(|r| r.fit.as_ref()).collect();
    let n = fits.len();
    let fraction = |pred: &dyn Fn(&ExtremeFlags) -> bool| {
        if n == 0 {
            0.0
        } else {
            fits.iter().filter(|f| pred(&f.extreme_flags)).count() as f64 / n as f64
        }
    };
    StudySummary {
        replications: rows.len(),
        failed: rows.len() - n,
        any_extreme_fraction: fraction(&|f| f.any()),
        q_pm_extreme_fraction: fraction(&|f| f.q_pm),
        q_cm_extreme_fraction: fraction(&|f| f.q_cm),
    }
}

/// Runs replications `1..=config.replications`; rows come back in
/// replication order.
pub fn run_study(config: &StudyConfig) -> StudyReport {
    let rows: Vec<StudyRow> = (1..=config.replications)
        .into_par_iter()
        .map(|r| run_replication(config, r))
        .collect();
    let summary = summarize(&rows);
    StudyReport { rows, summary }
}

impl StudyReport {
    /// Table with one decimal for b, theta and the restoration factors.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:>6} {:>6} {:>6} {:>6} {:>6} {:>12}", "sample", "b", "theta", "q_pm", "q_cm", "loglik");
        for row in &self.rows {
            match (&row.fit, &row.error) {
                (Some(f), _) => {
                    let _ = writeln!(
                        out,
                        "{:>6} {:>6.1} {:>6.1} {:>6.1} {:>6.1} {:>12.4}",
                        row.replication, f.b, f.theta, f.q_pm, f.q_cm, f.log_likelihood
                    );
                }
                (None, err) => {
                    let _ = writeln!(
                        out,
                        "{:>6} failed (seed {}): {}",
                        row.replication,
                        row.seed,
                        err.as_deref().unwrap_or("unknown error")
                    );
                }
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "extreme fraction: any {:.2}, q_pm {:.2}, q_cm {:.2} ({} failed of {})",
            s.any_extreme_fraction, s.q_pm_extreme_fraction, s.q_cm_extreme_fraction, s.failed, s.replications
        );
        out
    }
}
