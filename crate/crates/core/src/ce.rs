//! Cross-Entropy maximization over a box.
//!
//! Each iteration samples a population from independent normals truncated to
//! the box, keeps the best `elite_fraction`, and moves the sampling mean and
//! standard deviation towards the elite statistics with exponential
//! smoothing. The best point ever evaluated is returned.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GrpError, Result};

/// Rejection attempts per coordinate before clamping to the box.
const MAX_REJECTIONS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(GrpError::invalid(format!(
                "box needs matching non-empty bounds, got {} lower and {} upper",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(GrpError::invalid(format!(
                    "coordinate {i}: bounds must be finite with lower < upper, got [{l}, {u}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&l, &u))| l <= v && v <= u)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CeConfig {
    pub population: usize,
    pub elite_fraction: f64,
    pub smoothing: f64,
    pub max_iterations: usize,
    /// Stop once every coordinate's sampling std is below this.
    pub convergence_epsilon: f64,
    /// Dynamic std smoothing `beta_t = beta - beta (1 - 1/t)^power`; `None`
    /// applies `smoothing` to the std as well.
    pub std_smoothing: Option<DynamicSmoothing>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DynamicSmoothing {
    pub beta: f64,
    pub power: f64,
}

impl DynamicSmoothing {
    /// Weight on the elite std at 1-based iteration `t`.
    pub fn at(&self, t: usize) -> f64 {
        self.beta - self.beta * (1.0 - 1.0 / t as f64).powf(self.power)
    }
}

impl Default for CeConfig {
    fn default() -> Self {
        Self {
            population: 1000,
            elite_fraction: 0.1,
            smoothing: 0.7,
            max_iterations: 200,
            convergence_epsilon: 1e-6,
            std_smoothing: Some(DynamicSmoothing { beta: 0.8, power: 5.0 }),
            seed: 0,
        }
    }
}

impl CeConfig {
    pub fn elite_count(&self) -> usize {
        (self.population as f64 * self.elite_fraction).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.elite_fraction > 0.0 && self.elite_fraction < 1.0) {
            return Err(GrpError::invalid(format!(
                "elite fraction must lie in (0, 1), got {}",
                self.elite_fraction
            )));
        }
        if !(self.smoothing > 0.0 && self.smoothing <= 1.0) {
            return Err(GrpError::invalid(format!(
                "smoothing must lie in (0, 1], got {}",
                self.smoothing
            )));
        }
        if self.population as f64 * self.elite_fraction < 2.0 {
            return Err(GrpError::invalid(format!(
                "population * elite fraction must be at least 2, got {} * {}",
                self.population, self.elite_fraction
            )));
        }
        if self.max_iterations == 0 {
            return Err(GrpError::invalid("max iterations must be at least 1"));
        }
        if !(self.convergence_epsilon.is_finite() && self.convergence_epsilon >= 0.0) {
            return Err(GrpError::invalid(format!(
                "convergence epsilon must be finite and >= 0, got {}",
                self.convergence_epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CeDiagnostics {
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best value seen up to and including each iteration.
    pub best_by_iteration: Vec<f64>,
    pub final_mean: Vec<f64>,
    pub final_std: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CeOutcome {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub diagnostics: CeDiagnostics,
}

fn truncated_normal<R: Rng + ?Sized>(rng: &mut R, mean: f64, std: f64, lo: f64, hi: f64) -> f64 {
    if std <= 0.0 {
        return mean.clamp(lo, hi);
    }
    for _ in 0..MAX_REJECTIONS {
        let z: f64 = rng.sample(StandardNormal);
        let x = mean + std * z;
        if lo <= x && x <= hi {
            return x;
        }
    }
    let z: f64 = rng.sample(StandardNormal);
    (mean + std * z).clamp(lo, hi)
}

/// Maximizes `objective` over `domain`. Non-finite objective values mark
/// invalid points and rank below every finite value.
pub fn ce_maximize<F>(objective: F, domain: &BoxDomain, config: &CeConfig) -> Result<CeOutcome>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    let dim = domain.dim();
    let n_elite = config.elite_count();
    let alpha = config.smoothing;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut mean = domain.center();
    let mut std: Vec<f64> = domain
        .lower
        .iter()
        .zip(&domain.upper)
        .map(|(l, u)| 0.5 * (u - l))
        .collect();

    let mut best_point = mean.clone();
    let mut best_value = f64::NEG_INFINITY;
    let mut best_by_iteration = Vec::with_capacity(config.max_iterations);
    let mut evaluations = 0;
    let mut converged = false;

    let mut population: Vec<Vec<f64>> = vec![vec![0.0; dim]; config.population];
    for iteration in 0..config.max_iterations {
        for x in population.iter_mut() {
            for (k, xk) in x.iter_mut().enumerate() {
                *xk = truncated_normal(&mut rng, mean[k], std[k], domain.lower[k], domain.upper[k]);
            }
        }
        let values: Vec<f64> = population.par_iter().map(|x| objective(x)).collect();
        evaluations += values.len();

        let mut order: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_finite()).collect();
        if order.is_empty() {
            return Err(GrpError::DegenerateObjective { iteration });
        }
        // Stable sort keeps the earliest sample first among equal values.
        order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
        order.truncate(n_elite);

        let top = order[0];
        if values[top] > best_value {
            best_value = values[top];
            best_point.clone_from(&population[top]);
        }
        best_by_iteration.push(best_value);

        let beta = config.std_smoothing.map_or(alpha, |d| d.at(iteration + 1));
        let m = order.len() as f64;
        for k in 0..dim {
            let elite_mean = order.iter().map(|&i| population[i][k]).sum::<f64>() / m;
            let elite_var = order
                .iter()
                .map(|&i| (population[i][k] - elite_mean).powi(2))
                .sum::<f64>()
                / m;
            mean[k] = alpha * elite_mean + (1.0 - alpha) * mean[k];
            std[k] = beta * elite_var.sqrt() + (1.0 - beta) * std[k];
        }

        if std.iter().all(|&s| s < config.convergence_epsilon) {
            converged = true;
            break;
        }
    }

    Ok(CeOutcome {
        best_point,
        best_value,
        diagnostics: CeDiagnostics {
            iterations: best_by_iteration.len(),
            evaluations,
            converged,
            best_by_iteration,
            final_mean: mean,
            final_std: std,
        },
    })
}
