//! Oracles shared by the integration tests. Each one is coded from the
//! textbook formula and does not call into the crate's likelihood or
//! sampling code.
#![allow(dead_code)]

use std::path::PathBuf;

use grp_core::{Event, EventHistory, EventKind};
use serde::Deserialize;

#[derive(Deserialize)]
pub struct LikelihoodCase {
    pub a: f64,
    pub b: f64,
    pub q_pm: f64,
    pub q_cm: f64,
    pub items: Vec<Vec<(String, f64)>>,
    pub event_terms: Vec<Vec<String>>,
    pub total: String,
}

impl LikelihoodCase {
    pub fn history(&self) -> EventHistory {
        EventHistory::from_sequences(
            self.items
                .iter()
                .map(|item| {
                    item.iter()
                        .map(|(k, t)| Event::new(k.parse().unwrap(), *t).unwrap())
                        .collect()
                })
                .collect(),
        )
    }

    pub fn total(&self) -> f64 {
        self.total.parse().unwrap()
    }
}

/// Cases evaluated in 50-digit arithmetic by `tests/oracle/likelihood_cases.py`.
pub fn likelihood_cases() -> Vec<LikelihoodCase> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/likelihood_cases.json");
    let text = std::fs::read_to_string(path).expect("fixture present");
    serde_json::from_str(&text).expect("fixture parses")
}

/// Ordinary renewal process: every gap is a fresh Weibull(theta, b) life.
pub fn renewal_log_likelihood(theta: f64, b: f64, history: &EventHistory) -> f64 {
    let mut total = 0.0;
    for item in history.items() {
        for e in &item.events {
            let z = e.t() / theta;
            let log_survival = -z.powf(b);
            total += match e.kind() {
                EventKind::Pm => log_survival,
                EventKind::Cm => (b / theta).ln() + (b - 1.0) * z.ln() + log_survival,
            };
        }
    }
    total
}

/// Power-law NHPP observed until its last failure.
pub fn nhpp_log_likelihood(a: f64, b: f64, failure_gaps: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut total = 0.0;
    for &t in failure_gaps {
        s += t;
        total += a.ln() + b.ln() + (b - 1.0) * s.ln();
    }
    total - a * s.powf(b)
}

/// Ordinary Weibull MLE for complete i.i.d. lifetimes: golden-section search
/// on the profile likelihood in `b`, with `a = n / sum t^b`.
pub fn weibull_mle(times: &[f64], b_range: (f64, f64)) -> (f64, f64) {
    let n = times.len() as f64;
    let sum_log: f64 = times.iter().map(|t| t.ln()).sum();
    let profile = |b: f64| {
        let s: f64 = times.iter().map(|t| t.powf(b)).sum();
        let a = n / s;
        n * a.ln() + n * b.ln() + (b - 1.0) * sum_log - n
    };
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = b_range;
    let mut x1 = hi - golden * (hi - lo);
    let mut x2 = lo + golden * (hi - lo);
    let (mut f1, mut f2) = (profile(x1), profile(x2));
    while hi - lo > 1e-12 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = profile(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = profile(x1);
        }
    }
    let b = 0.5 * (lo + hi);
    let a = n / times.iter().map(|t| t.powf(b)).sum::<f64>();
    (a, b)
}

/// One-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(x: &mut [f64], y: &mut [f64]) -> f64 {
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic Kolmogorov critical value at significance 0.01.
pub const KS_C_001: f64 = 1.6276;

/// Adaptive Simpson quadrature.
pub fn integrate(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(lo), f(hi), f(0.5 * (lo + hi)));
    let whole = simpson(lo, hi, fa, fm, fb);
    recurse(f, lo, hi, fa, fm, fb, whole, tol, 40)
}

/// Brute-force maximum over a box: a full grid at `resolution` points per
/// axis, then repeated zooms onto the neighbourhood of the best node.
pub fn grid_maximum(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    lower: &[f64],
    upper: &[f64],
    resolution: usize,
    zooms: usize,
    zoom_resolution: usize,
) -> (Vec<f64>, f64) {
    let dim = lower.len();
    let mut lo = lower.to_vec();
    let mut hi = upper.to_vec();
    let mut best = (lo.clone(), f64::NEG_INFINITY);
    for level in 0..=zooms {
        let res = if level == 0 { resolution } else { zoom_resolution };
        let step: Vec<f64> = (0..dim).map(|k| (hi[k] - lo[k]) / (res - 1) as f64).collect();
        let total = res.pow(dim as u32);
        let mut x = vec![0.0; dim];
        for idx in 0..total {
            let mut rem = idx;
            for k in 0..dim {
                x[k] = lo[k] + (rem % res) as f64 * step[k];
                rem /= res;
            }
            let v = f(&x);
            if v > best.1 {
                best = (x.clone(), v);
            }
        }
        for k in 0..dim {
            lo[k] = (best.0[k] - step[k]).max(lower[k]);
            hi[k] = (best.0[k] + step[k]).min(upper[k]);
        }
    }
    best
}
