//! Seeded Monte-Carlo generation of PM/CM histories.
//!
//! Each step draws two independent conditional-Weibull remaining lives from
//! the current virtual age: the first uniform gives the CM candidate, the
//! second (scaled by `k_cm`) the PM candidate. The strictly smaller candidate
//! wins; a tie goes to PM.
//!
//! Item `i` (zero-based) of a history draws from a `ChaCha8Rng` seeded with
//! `seed` and switched to stream `i`, so items are independent and can be
//! generated in any order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{GrpError, Result};
use crate::model::{Event, EventHistory, EventKind, RestorationFactors, WeibullParams};

#[derive(Debug, Clone, Serialize)]
pub struct GenerationConfig {
    pub params: WeibullParams,
    pub factors: RestorationFactors,
    pub k_cm: f64,
    pub events_per_item: usize,
    pub n_items: usize,
    pub seed: u64,
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_cm.is_finite() && self.k_cm > 0.0) {
            return Err(GrpError::invalid(format!("k_cm must be finite and > 0, got {}", self.k_cm)));
        }
        if self.events_per_item == 0 {
            return Err(GrpError::invalid("events per item must be at least 1"));
        }
        if self.n_items == 0 {
            return Err(GrpError::invalid("item count must be at least 1"));
        }
        Ok(())
    }
}

/// The `u`-quantile of the remaining life given survival to virtual age `v`:
/// `(v^b - ln(1 - u)/a)^(1/b) - v`.
pub fn conditional_quantile(params: &WeibullParams, v: f64, u: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return Err(GrpError::invalid(format!("uniform variate must lie in [0, 1), got {u}")));
    }
    if !(v.is_finite() && v >= 0.0) {
        return Err(GrpError::invalid(format!("virtual age must be finite and >= 0, got {v}")));
    }
    Ok(quantile(params, v, u))
}

fn quantile(params: &WeibullParams, v: f64, u: f64) -> f64 {
    let (a, b) = (params.a(), params.b());
    // Cumulative hazard to spend: -ln(1 - u) / a.
    let h = -(-u).ln_1p() / a;
    if v == 0.0 {
        return h.powf(1.0 / b);
    }
    let vb = v.powf(b);
    let y = (h / vb).ln_1p() / b;
    if y < std::f64::consts::LN_2 {
        v * y.exp_m1()
    } else {
        (vb + h).powf(1.0 / b) - v
    }
}

/// Applies the competing-candidate rule to explicit uniforms. Returns the
/// event and the virtual age after it. A zero-length winner is reported as
/// an error since it cannot form a valid event.
pub fn next_event_from_uniforms(
    params: &WeibullParams,
    factors: &RestorationFactors,
    k_cm: f64,
    v: f64,
    u_cm: f64,
    u_pm: f64,
) -> Result<(Event, f64)> {
    let t_cm = conditional_quantile(params, v, u_cm)?;
    let t_pm = k_cm * conditional_quantile(params, v, u_pm)?;
    let event = if t_cm < t_pm {
        Event::new(EventKind::Cm, t_cm)?
    } else {
        Event::new(EventKind::Pm, t_pm)?
    };
    let v_next = v + factors.for_kind(event.kind()) * event.t();
    Ok((event, v_next))
}

/// Draws the next event from `rng`: uniform for CM first, then PM.
/// Uniforms equal to zero, and candidates that round to zero, are redrawn.
pub fn next_event<R: Rng + ?Sized>(
    params: &WeibullParams,
    factors: &RestorationFactors,
    k_cm: f64,
    v: f64,
    rng: &mut R,
) -> (Event, f64) {
    let t_cm = positive_draw(rng, |u| quantile(params, v, u));
    let t_pm = positive_draw(rng, |u| k_cm * quantile(params, v, u));
    let (kind, t) = if t_cm < t_pm {
        (EventKind::Cm, t_cm)
    } else {
        (EventKind::Pm, t_pm)
    };
    let event = Event::new(kind, t).expect("positive finite draw");
    (event, v + factors.for_kind(kind) * t)
}

fn positive_draw<R: Rng + ?Sized>(rng: &mut R, f: impl Fn(f64) -> f64) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u == 0.0 {
            continue;
        }
        let t = f(u);
        if t > 0.0 && t.is_finite() {
            return t;
        }
    }
}

/// Generator for item `index` of a history seeded with `seed`.
pub fn item_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Generates one item of `n` events starting from virtual age zero.
pub fn generate_item<R: Rng + ?Sized>(
    params: &WeibullParams,
    factors: &RestorationFactors,
    k_cm: f64,
    n: usize,
    rng: &mut R,
) -> Vec<Event> {
    let mut v = 0.0;
    (0..n)
        .map(|_| {
            let (event, v_next) = next_event(params, factors, k_cm, v, rng);
            v = v_next;
            event
        })
        .collect()
}

pub fn generate(config: &GenerationConfig) -> Result<EventHistory> {
    config.validate()?;
    let sequences = (0..config.n_items)
        .map(|i| {
            let mut rng = item_rng(config.seed, i);
            generate_item(
                &config.params,
                &config.factors,
                config.k_cm,
                config.events_per_item,
                &mut rng,
            )
        })
        .collect();
    Ok(EventHistory::from_sequences(sequences))
}
