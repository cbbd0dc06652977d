//! Kijima virtual-age dynamics and the exact log-likelihood of PM/CM event
//! histories under a Weibull baseline.
//!
//! The baseline CDF is `F(t) = 1 - exp(-a t^b)`. After the i-th event the
//! virtual age moves by `V_i = V_{i-1} + q_i t_i`, where `q_i` is the
//! restoration factor of that event's kind. A preventive event contributes
//! the conditional survival of its inter-arrival time, a corrective event the
//! conditional density.

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{GrpError, Result};

/// Weibull scale/shape pair. `(a, b)` is the canonical form; `theta` is the
/// characteristic-life view `(1/a)^(1/b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibullParams {
    a: f64,
    b: f64,
}

impl WeibullParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(GrpError::invalid(format!("scale a must be finite and > 0, got {a}")));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(GrpError::invalid(format!("shape b must be finite and > 0, got {b}")));
        }
        Ok(Self { a, b })
    }

    /// Builds the pair from the characteristic life: `a = theta^(-b)`.
    pub fn from_theta(theta: f64, b: f64) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(GrpError::invalid(format!("theta must be finite and > 0, got {theta}")));
        }
        Self::new(theta.powf(-b), b)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn theta(&self) -> f64 {
        (1.0 / self.a).powf(1.0 / self.b)
    }
}

impl Serialize for WeibullParams {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("WeibullParams", 3)?;
        s.serialize_field("a", &self.a)?;
        s.serialize_field("b", &self.b)?;
        s.serialize_field("theta", &self.theta())?;
        s.end()
    }
}

/// Restoration factors for preventive and corrective events, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestorationFactors {
    q_pm: f64,
    q_cm: f64,
}

impl RestorationFactors {
    pub fn new(q_pm: f64, q_cm: f64) -> Result<Self> {
        check_factor("q_pm", q_pm)?;
        check_factor("q_cm", q_cm)?;
        Ok(Self { q_pm, q_cm })
    }

    /// Same factor for both kinds.
    pub fn constant(q: f64) -> Result<Self> {
        Self::new(q, q)
    }

    pub fn q_pm(&self) -> f64 {
        self.q_pm
    }

    pub fn q_cm(&self) -> f64 {
        self.q_cm
    }

    pub fn for_kind(&self, kind: EventKind) -> f64 {
        match kind {
            EventKind::Pm => self.q_pm,
            EventKind::Cm => self.q_cm,
        }
    }
}

fn check_factor(name: &str, q: f64) -> Result<()> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(GrpError::invalid(format!("{name} must lie in [0, 1], got {q}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EventKind {
    #[serde(rename = "PM")]
    Pm,
    #[serde(rename = "CM")]
    Cm,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Pm => "PM",
            EventKind::Cm => "CM",
        })
    }
}

impl FromStr for EventKind {
    type Err = GrpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "PM" => Ok(EventKind::Pm),
            "CM" => Ok(EventKind::Cm),
            other => Err(GrpError::invalid(format!("event type must be PM or CM, got {other:?}"))),
        }
    }
}

/// One maintenance event and the time elapsed since the previous one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Event {
    kind: EventKind,
    t: f64,
}

impl Event {
    pub fn new(kind: EventKind, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(GrpError::invalid(format!(
                "inter-arrival time must be finite and > 0, got {t}"
            )));
        }
        Ok(Self { kind, t })
    }

    pub fn pm(t: f64) -> Result<Self> {
        Self::new(EventKind::Pm, t)
    }

    pub fn cm(t: f64) -> Result<Self> {
        Self::new(EventKind::Cm, t)
    }

    pub fn kind(&self) -> EventKind {
        self.kind
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// Event sequence of one item. Every item starts from virtual age zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Item {
    pub id: u64,
    pub events: Vec<Event>,
}

/// Independent per-item event sequences.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EventHistory {
    items: Vec<Item>,
}

impl EventHistory {
    pub fn new(items: Vec<Item>) -> Self {
        Self { items }
    }

    /// Items numbered `1..=n` in the given order.
    pub fn from_sequences(sequences: Vec<Vec<Event>>) -> Self {
        let items = sequences
            .into_iter()
            .enumerate()
            .map(|(i, events)| Item {
                id: i as u64 + 1,
                events,
            })
            .collect();
        Self { items }
    }

    pub fn single(events: Vec<Event>) -> Self {
        Self::from_sequences(vec![events])
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn into_items(self) -> Vec<Item> {
        self.items
    }

    pub fn total_events(&self) -> usize {
        self.items.iter().map(|item| item.events.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_events() == 0
    }

    /// `(pm, cm)` event counts over all items.
    pub fn counts(&self) -> (usize, usize) {
        self.items
            .iter()
            .flat_map(|item| item.events.iter())
            .fold((0, 0), |(pm, cm), e| match e.kind {
                EventKind::Pm => (pm + 1, cm),
                EventKind::Cm => (pm, cm + 1),
            })
    }

    /// Replaces the final inter-arrival time of a single-item history.
    pub fn with_last_time(&self, t: f64) -> Result<Self> {
        if self.items.len() != 1 {
            return Err(GrpError::invalid(format!(
                "overriding the last time requires single-item data, found {} items",
                self.items.len()
            )));
        }
        let mut out = self.clone();
        let last = out.items[0]
            .events
            .last_mut()
            .ok_or_else(|| GrpError::invalid("cannot override the last time of an empty item"))?;
        *last = Event::new(last.kind, t)?;
        Ok(out)
    }
}

/// `V_i = V_{i-1} + q t`.
pub fn virtual_age_step(v_prev: f64, q: f64, t: f64) -> Result<f64> {
    if !(v_prev.is_finite() && v_prev >= 0.0) {
        return Err(GrpError::invalid(format!("virtual age must be finite and >= 0, got {v_prev}")));
    }
    check_factor("q", q)?;
    if !(t.is_finite() && t > 0.0) {
        return Err(GrpError::invalid(format!("inter-arrival time must be finite and > 0, got {t}")));
    }
    Ok(v_prev + q * t)
}

/// Virtual age after each event of one item, starting from `V_0 = 0`.
pub fn trajectory(events: &[Event], factors: &RestorationFactors) -> Vec<f64> {
    events
        .iter()
        .scan(0.0_f64, |v, e| {
            *v += factors.for_kind(e.kind) * e.t;
            Some(*v)
        })
        .collect()
}

/// `(v + t)^b - v^b` without cancellation.
///
/// When `v^b` is more than half of `(v + t)^b` the difference is taken as
/// `v^b * expm1(b * log1p(t / v))`.
pub fn power_increment(v: f64, t: f64, b: f64) -> f64 {
    if v == 0.0 {
        return t.powf(b);
    }
    let x = b * (t / v).ln_1p();
    if x < std::f64::consts::LN_2 {
        v.powf(b) * x.exp_m1()
    } else {
        (v + t).powf(b) - v.powf(b)
    }
}

#[inline]
fn event_term(params: &WeibullParams, v_prev: f64, kind: EventKind, t: f64) -> f64 {
    let cumulative = params.a * power_increment(v_prev, t, params.b);
    match kind {
        EventKind::Pm => -cumulative,
        EventKind::Cm => {
            params.a.ln() + params.b.ln() + (params.b - 1.0) * (v_prev + t).ln() - cumulative
        }
    }
}

/// Log-likelihood contribution of one event entered at virtual age `v_prev`.
///
/// An overflow is reported at item 0, event 0.
pub fn event_log_likelihood(params: &WeibullParams, v_prev: f64, event: &Event) -> Result<f64> {
    if !(v_prev.is_finite() && v_prev >= 0.0) {
        return Err(GrpError::invalid(format!("virtual age must be finite and >= 0, got {v_prev}")));
    }
    let value = event_term(params, v_prev, event.kind, event.t);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(GrpError::NumericOverflow { item: 0, event: 0 })
    }
}

/// Log-likelihood of one item.
pub fn item_log_likelihood(
    params: &WeibullParams,
    factors: &RestorationFactors,
    events: &[Event],
) -> Result<f64> {
    item_sum(params, factors, events, 0)
}

fn item_sum(
    params: &WeibullParams,
    factors: &RestorationFactors,
    events: &[Event],
    item: usize,
) -> Result<f64> {
    let mut v = 0.0;
    let mut total = 0.0;
    for (i, e) in events.iter().enumerate() {
        let term = event_term(params, v, e.kind, e.t);
        if !term.is_finite() {
            return Err(GrpError::NumericOverflow { item, event: i });
        }
        total += term;
        v += factors.for_kind(e.kind) * e.t;
    }
    Ok(total)
}

/// Total log-likelihood; independent items add in log space.
pub fn history_log_likelihood(
    params: &WeibullParams,
    factors: &RestorationFactors,
    history: &EventHistory,
) -> Result<f64> {
    history
        .items
        .iter()
        .enumerate()
        .try_fold(0.0, |acc, (i, item)| {
            Ok(acc + item_sum(params, factors, &item.events, i)?)
        })
}
