use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{PapError, Result};
use crate::units::wavenumber_to_angular;

/// Free-evolution autocorrelation `F(t) = |Σ_k |c_k|² e^{−iK·E_k·t}|²` of a
/// normalised packet, sampled on a grid plus its ranked local maxima.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevivalTrace {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    /// `(time, fidelity)` of refined local maxima above the threshold,
    /// best first.
    pub revivals: Vec<(f64, f64)>,
}

/// Autocorrelation fidelity at one time; weights are normalised internally.
pub fn revival_fidelity(weights: &[f64], energies: &[f64], t: f64) -> f64 {
    let total: f64 = weights.iter().sum();
    let z: C64 = weights
        .iter()
        .zip(energies)
        .map(|(&w, &e)| C64::from_polar(w / total, -wavenumber_to_angular(e) * t))
        .sum();
    z.norm_sqr()
}

/// Samples `F(t)` on `(0, t_max]` with step `dt` and ranks the local maxima
/// above `threshold`, each refined by golden-section search.
pub fn revival_diagnostics(
    amplitudes: &[C64],
    energies: &[f64],
    t_max: f64,
    dt: f64,
    threshold: f64,
) -> Result<RevivalTrace> {
    if amplitudes.len() != energies.len() {
        return Err(PapError::InvalidArgument("amplitudes and energies differ in length".into()));
    }
    let weights: Vec<f64> = amplitudes.iter().map(|c| c.norm_sqr()).collect();
    if !(weights.iter().sum::<f64>() > 0.0) {
        return Err(PapError::InvalidArgument("wave packet has no amplitude".into()));
    }
    if !(dt > 0.0) || !(t_max > dt) {
        return Err(PapError::InvalidArgument("need 0 < dt < t_max".into()));
    }
    let n = (t_max / dt).floor() as usize;
    let times: Vec<f64> = (1..=n).map(|i| i as f64 * dt).collect();
    let fidelity: Vec<f64> = times.iter().map(|&t| revival_fidelity(&weights, energies, t)).collect();

    let mut revivals = Vec::new();
    for i in 1..n.saturating_sub(1) {
        let (a, b, c) = (fidelity[i - 1], fidelity[i], fidelity[i + 1]);
        if b >= a && b > c && b >= threshold {
            let f = |t: f64| revival_fidelity(&weights, energies, t);
            revivals.push(golden_max(f, times[i] - dt, times[i] + dt));
        }
    }
    revivals.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.total_cmp(&y.0)));
    Ok(RevivalTrace {
        times,
        fidelity,
        revivals,
    })
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    let t = 0.5 * (lo + hi);
    (t, f(t))
}
