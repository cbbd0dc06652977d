//! Maximum-likelihood fitting of `(a, b, q_pm, q_cm)` by multi-start
//! Cross-Entropy search over `(ln a, b, q_pm, q_cm)`.

use serde::Serialize;

use crate::ce::{ce_maximize, BoxDomain, CeConfig};
use crate::error::{GrpError, Result};
use crate::model::{history_log_likelihood, EventHistory, RestorationFactors, WeibullParams};

/// Distance from 0 or 1 within which a restoration factor counts as extreme.
pub const EXTREME_THRESHOLD: f64 = 0.05;

/// Search region. Restoration factors range over `[0, 1]` unless pinned.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSpace {
    pub ln_a: (f64, f64),
    pub b: (f64, f64),
    pub fixed_q_pm: Option<f64>,
    pub fixed_q_cm: Option<f64>,
    pub starts: usize,
}

impl Default for FitSpace {
    fn default() -> Self {
        Self {
            ln_a: (1e-8_f64.ln(), 1e3_f64.ln()),
            b: (0.1, 10.0),
            fixed_q_pm: None,
            fixed_q_cm: None,
            starts: 5,
        }
    }
}

impl FitSpace {
    fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("ln(a)", self.ln_a), ("b", self.b)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(GrpError::invalid(format!(
                    "{name} bounds must be finite with lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        if self.b.0 <= 0.0 {
            return Err(GrpError::invalid(format!("b lower bound must be > 0, got {}", self.b.0)));
        }
        RestorationFactors::new(self.fixed_q_pm.unwrap_or(0.0), self.fixed_q_cm.unwrap_or(0.0))?;
        if self.starts == 0 {
            return Err(GrpError::invalid("at least one start is required"));
        }
        Ok(())
    }

    fn domain(&self) -> Result<BoxDomain> {
        let mut lower = vec![self.ln_a.0, self.b.0];
        let mut upper = vec![self.ln_a.1, self.b.1];
        for fixed in [self.fixed_q_pm, self.fixed_q_cm] {
            if fixed.is_none() {
                lower.push(0.0);
                upper.push(1.0);
            }
        }
        BoxDomain::new(lower, upper)
    }

    /// Optimizer vector to model parameters. Restoration factors are clamped
    /// into `[0, 1]`, which only matters for values already on the bound.
    fn decode(&self, x: &[f64]) -> Result<(WeibullParams, RestorationFactors)> {
        let params = WeibullParams::new(x[0].exp(), x[1])?;
        let mut free = x[2..].iter().map(|q| q.clamp(0.0, 1.0));
        let q_pm = self.fixed_q_pm.unwrap_or_else(|| free.next().unwrap_or(0.0));
        let q_cm = self.fixed_q_cm.unwrap_or_else(|| free.next().unwrap_or(0.0));
        Ok((params, RestorationFactors::new(q_pm, q_cm)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExtremeFlags {
    pub q_pm: bool,
    pub q_cm: bool,
}

impl ExtremeFlags {
    pub fn of(factors: &RestorationFactors) -> Self {
        Self {
            q_pm: is_extreme(factors.q_pm()),
            q_cm: is_extreme(factors.q_cm()),
        }
    }

    pub fn any(&self) -> bool {
        self.q_pm || self.q_cm
    }
}

pub fn is_extreme(q: f64) -> bool {
    q <= EXTREME_THRESHOLD || q >= 1.0 - EXTREME_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartResult {
    pub seed: u64,
    /// Optimizer coordinates: `ln a`, `b`, then any free restoration factors.
    pub point: Vec<f64>,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub params: WeibullParams,
    pub factors: RestorationFactors,
    pub log_likelihood: f64,
    pub per_start: Vec<StartResult>,
    pub extreme_flags: ExtremeFlags,
}

/// Seed of restart `index` for a base optimizer seed.
pub fn start_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn fit_mle(history: &EventHistory, space: &FitSpace, ce: &CeConfig) -> Result<FitResult> {
    if history.is_empty() {
        return Err(GrpError::invalid("cannot fit an empty history"));
    }
    space.validate()?;
    let domain = space.domain()?;

    let objective = |x: &[f64]| match space.decode(x) {
        Ok((p, f)) => history_log_likelihood(&p, &f, history).unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    };

    let mut per_start: Vec<StartResult> = Vec::with_capacity(space.starts);
    let mut best: Option<usize> = None;
    for s in 0..space.starts {
        let config = CeConfig {
            seed: start_seed(ce.seed, s),
            ..ce.clone()
        };
        let out = ce_maximize(objective, &domain, &config)?;
        if best.is_none_or(|b| out.best_value > per_start[b].log_likelihood) {
            best = Some(s);
        }
        per_start.push(StartResult {
            seed: config.seed,
            point: out.best_point,
            log_likelihood: out.best_value,
            iterations: out.diagnostics.iterations,
            evaluations: out.diagnostics.evaluations,
            converged: out.diagnostics.converged,
        });
    }

    let winner = &per_start[best.expect("at least one start")];
    let (params, factors) = space.decode(&winner.point)?;
    let log_likelihood = history_log_likelihood(&params, &factors, history)?;
    Ok(FitResult {
        params,
        factors,
        log_likelihood,
        extreme_flags: ExtremeFlags::of(&factors),
        per_start,
    })
}

/// Log-likelihood of `history` at a fixed external parameter set.
pub fn evaluate(
    history: &EventHistory,
    params: &WeibullParams,
    factors: &RestorationFactors,
) -> Result<f64> {
    history_log_likelihood(params, factors, history)
}
