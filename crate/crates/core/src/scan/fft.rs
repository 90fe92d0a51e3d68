use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{PapError, Result};
use crate::scan::EfficiencyMap;
use crate::units::SPEED_OF_LIGHT_CM_PER_PS;

/// Minimum number of δT samples accepted by [`fft_delta_t`].
pub const MIN_FFT_SAMPLES: usize = 8;

/// Half spectrum (DC to Nyquist) of a δT column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeatSpectrum {
    /// cm⁻¹
    pub frequency: Vec<f64>,
    /// `|X_k|` of the mean-subtracted (optionally windowed) column.
    pub magnitude: Vec<f64>,
    /// Spacing of the frequency axis (cm⁻¹).
    pub bin_width: f64,
}

impl BeatSpectrum {
    /// Strongest non-DC component as `(frequency, magnitude)`.
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.frequency
            .iter()
            .zip(&self.magnitude)
            .skip(1)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(&f, &m)| (f, m))
    }

    /// CSV with columns `frequency_cm1,magnitude`.
    pub fn write_csv<W: Write>(&self, mut out: W, header_comments: &[String]) -> std::io::Result<()> {
        for c in header_comments {
            writeln!(out, "# {c}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["frequency_cm1", "magnitude"])?;
        for (f, m) in self.frequency.iter().zip(&self.magnitude) {
            w.write_record([f.to_string(), m.to_string()])?;
        }
        w.flush()
    }
}

/// Checks that an axis is uniform to a relative tolerance and returns its step.
fn uniform_step(axis: &[f64]) -> Result<f64> {
    let step = (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64;
    if !(step > 0.0) {
        return Err(PapError::InvalidArgument("δT axis must be increasing".into()));
    }
    for (i, &x) in axis.iter().enumerate() {
        if (x - (axis[0] + i as f64 * step)).abs() > 1e-6 * step {
            return Err(PapError::InvalidArgument(format!(
                "δT axis is not uniform at index {i} ({x} ps)"
            )));
        }
    }
    Ok(step)
}

/// Full complex DFT of the mean-subtracted, optionally Hann-windowed samples.
pub fn centered_dft(samples: &[f64], hann: bool) -> Vec<C64> {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<C64> = samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let w = if hann {
                0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos()
            } else {
                1.0
            };
            C64::new((x - mean) * w, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf
}

/// Magnitude spectrum of `samples` taken on the uniform δT axis `axis` (ps).
pub fn beat_spectrum(samples: &[f64], axis: &[f64], hann: bool) -> Result<BeatSpectrum> {
    if samples.len() != axis.len() {
        return Err(PapError::InvalidArgument("samples and axis differ in length".into()));
    }
    if samples.len() < MIN_FFT_SAMPLES {
        return Err(PapError::InvalidArgument(format!(
            "need at least {MIN_FFT_SAMPLES} δT samples (got {})",
            samples.len()
        )));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(PapError::Numerical("column contains missing cells".into()));
    }
    let step = uniform_step(axis)?;
    let n = samples.len();
    let spectrum = centered_dft(samples, hann);
    // 1/(N·step) ps⁻¹ → cm⁻¹
    let bin_width = 1.0 / (n as f64 * step * SPEED_OF_LIGHT_CM_PER_PS);
    let half = n / 2 + 1;
    Ok(BeatSpectrum {
        frequency: (0..half).map(|k| k as f64 * bin_width).collect(),
        magnitude: spectrum[..half].iter().map(|z| z.norm()).collect(),
        bin_width,
    })
}

/// Beat spectrum of the δT column at row `delta_t_large_index` of a map.
pub fn fft_delta_t(map: &EfficiencyMap, delta_t_large_index: usize, hann: bool) -> Result<BeatSpectrum> {
    beat_spectrum(map.column(delta_t_large_index)?, &map.delta_t_small, hann)
}

/// Relative Parseval mismatch `|Σ|x−x̄|² − Σ|X|²/N| / Σ|x−x̄|²` of the
/// unwindowed transform (0 for a constant column).
pub fn parseval_mismatch(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let time: f64 = samples.iter().map(|x| (x - mean).powi(2)).sum();
    let freq: f64 = centered_dft(samples, false).iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
    if time == 0.0 {
        freq
    } else {
        (time - freq).abs() / time
    }
}
