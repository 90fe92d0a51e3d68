use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{PapError, Result};
use crate::units::{self, FS_PER_PS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Envelope {
    /// Field ∝ sin²(πt/T) on a finite support of length T.
    Sin2,
    /// Field ∝ exp(−t²/2σ²), truncated at ±8σ.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Pump,
    Dump,
}

impl Channel {
    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Pump => "pump",
            Channel::Dump => "dump",
        }
    }
}

/// Number of standard deviations kept on each side of a Gaussian pulse.
pub const GAUSSIAN_TRUNCATION_SIGMAS: f64 = 8.0;

/// Intensity FWHM of a sin² field as a fraction of its support:
/// sin⁴(πt/T) = ½ at πt/T = asin(2^{−1/4}).
pub fn sin2_fwhm_fraction() -> f64 {
    1.0 - 2.0 * 0.5f64.powf(0.25).asin() / PI
}

/// One femtosecond kick.
///
/// The Rabi profile `Ω(t)` integrates to `area` over the support; `area` is
/// quoted for a unit dipole. Phases (`carrier_phase`, `chirp`, `phase_mask`)
/// are Raman-path phases: they enter pump couplings as `e^{−iφ}` and dump
/// couplings as `e^{+iφ}`, so a phase common to both channels adds along the
/// `initial → excited → target` path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    pub shape: Envelope,
    /// Intensity FWHM in fs.
    pub fwhm: f64,
    /// Pulse area θ = ∫Ω dt (rad).
    pub area: f64,
    /// Offset of the carrier from the channel's nominal carrier (cm⁻¹).
    #[serde(default)]
    pub carrier_detuning: f64,
    /// Carrier phase (rad).
    #[serde(default)]
    pub carrier_phase: f64,
    pub channel: Channel,
    /// Extra phase per excited level (rad).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_mask: Option<Vec<f64>>,
    /// Quadratic phase about the pulse center, `chirp·(t − t_c)²/2` (rad/ps²).
    #[serde(default)]
    pub chirp: f64,
}

/// Builds a pulse, rejecting non-positive widths and negative areas.
pub fn make_pulse(
    shape: Envelope,
    fwhm_fs: f64,
    area: f64,
    carrier_detuning: f64,
    carrier_phase: f64,
    channel: Channel,
) -> Result<PulseSpec> {
    let pulse = PulseSpec {
        shape,
        fwhm: fwhm_fs,
        area,
        carrier_detuning,
        carrier_phase,
        channel,
        phase_mask: None,
        chirp: 0.0,
    };
    pulse.check()?;
    Ok(pulse)
}

impl PulseSpec {
    pub fn check(&self) -> Result<()> {
        if !(self.fwhm > 0.0) || !self.fwhm.is_finite() {
            return Err(PapError::InvalidPulse(format!("fwhm must be > 0 (got {})", self.fwhm)));
        }
        if !(self.area >= 0.0) || !self.area.is_finite() {
            return Err(PapError::InvalidPulse(format!("area must be ≥ 0 (got {})", self.area)));
        }
        if !self.carrier_detuning.is_finite() || !self.carrier_phase.is_finite() || !self.chirp.is_finite() {
            return Err(PapError::InvalidPulse("non-finite carrier parameters".into()));
        }
        if let Some(mask) = &self.phase_mask {
            if mask.iter().any(|p| !p.is_finite()) {
                return Err(PapError::InvalidPulse("non-finite phase mask".into()));
            }
        }
        Ok(())
    }

    pub fn with_area(mut self, area: f64) -> Self {
        self.area = area;
        self
    }

    pub fn with_phase_mask(mut self, mask: Vec<f64>) -> Self {
        self.phase_mask = Some(mask);
        self
    }

    /// sin² support length or Gaussian σ, in ps.
    fn width_parameter(&self) -> f64 {
        let fwhm_ps = self.fwhm / FS_PER_PS;
        match self.shape {
            Envelope::Sin2 => fwhm_ps / sin2_fwhm_fraction(),
            Envelope::Gaussian => fwhm_ps / (2.0 * std::f64::consts::LN_2.sqrt()),
        }
    }

    /// Length of the interval on which the field is non-zero (ps).
    pub fn support(&self) -> f64 {
        match self.shape {
            Envelope::Sin2 => self.width_parameter(),
            Envelope::Gaussian => 2.0 * GAUSSIAN_TRUNCATION_SIGMAS * self.width_parameter(),
        }
    }

    pub fn half_support(&self) -> f64 {
        0.5 * self.support()
    }

    /// Gaussian σ of the field in ps (`None` for sin²).
    pub fn sigma(&self) -> Option<f64> {
        match self.shape {
            Envelope::Sin2 => None,
            Envelope::Gaussian => Some(self.width_parameter()),
        }
    }

    /// Rabi frequency (rad/ps) at time `dt` ps from the pulse center.
    pub fn rabi(&self, dt: f64) -> f64 {
        if self.area == 0.0 || dt.abs() > self.half_support() {
            return 0.0;
        }
        let w = self.width_parameter();
        match self.shape {
            Envelope::Sin2 => {
                // sin²(π(dt + T/2)/T) = cos²(π dt / T); ∫ = T/2
                let c = (PI * dt / w).cos();
                self.area * c * c / (0.5 * w)
            }
            Envelope::Gaussian => {
                let x = dt / w;
                self.area * (-0.5 * x * x).exp() / (w * (2.0 * PI).sqrt())
            }
        }
    }

    /// Peak Rabi frequency (rad/ps).
    pub fn peak_rabi(&self) -> f64 {
        self.rabi(0.0)
    }

    /// Raman-path phase contributed at `dt` ps from the center, excluding the
    /// carrier-frequency term.
    pub fn phase_at(&self, dt: f64) -> f64 {
        self.carrier_phase + 0.5 * self.chirp * dt * dt
    }

    /// Normalised Fourier amplitude of the field envelope at a detuning (cm⁻¹),
    /// `∫Ω(t)e^{iωt}dt / ∫Ω(t)dt`. Real because the envelopes are symmetric.
    pub fn spectral_amplitude(&self, detuning: f64) -> f64 {
        let omega = units::wavenumber_to_angular(detuning);
        let w = self.width_parameter();
        match self.shape {
            Envelope::Sin2 => {
                let x = 0.5 * omega * w;
                sinc(x) + 0.5 * (sinc(x - PI) + sinc(x + PI))
            }
            Envelope::Gaussian => (-0.5 * (omega * w).powi(2)).exp(),
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Composite Simpson quadrature of the Rabi profile between two offsets from
/// the pulse center.
pub fn integrate_rabi(pulse: &PulseSpec, from: f64, to: f64, intervals: usize) -> f64 {
    let n = intervals.max(2) & !1;
    let h = (to - from) / n as f64;
    let mut sum = pulse.rabi(from) + pulse.rabi(to);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * pulse.rabi(from + i as f64 * h);
    }
    sum * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sin2(area: f64) -> PulseSpec {
        make_pulse(Envelope::Sin2, 110.0, area, 0.0, 0.0, Channel::Pump).unwrap()
    }

    #[test]
    fn sin2_support_from_fwhm() {
        // sin⁴(πt/T) = 1/2 → FWHM = 0.364057·T
        let frac = sin2_fwhm_fraction();
        assert!((frac - 0.364_057).abs() < 1e-6);
        let p = sin2(PI);
        assert!((p.support() * 1000.0 - 302.15).abs() < 0.01, "{}", p.support());
    }

    #[test]
    fn sin2_intensity_fwhm_matches() {
        let p = sin2(1.0);
        let peak = p.peak_rabi().powi(2);
        let half = p.fwhm / 2000.0;
        let i_half = p.rabi(half).powi(2);
        assert!((i_half / peak - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gaussian_intensity_fwhm_matches() {
        let p = make_pulse(Envelope::Gaussian, 250.0, 1.0, 0.0, 0.0, Channel::Dump).unwrap();
        let peak = p.peak_rabi().powi(2);
        let i_half = p.rabi(0.125).powi(2);
        assert!((i_half / peak - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_area_is_zero_field() {
        let p = sin2(0.0);
        for i in 0..50 {
            assert_eq!(p.rabi(-0.2 + i as f64 * 0.008), 0.0);
        }
    }

    #[test]
    fn quadrature_recovers_area() {
        for shape in [Envelope::Sin2, Envelope::Gaussian] {
            let p = make_pulse(shape, 110.0, 1.7, 0.0, 0.0, Channel::Pump).unwrap();
            let h = p.half_support();
            let q = integrate_rabi(&p, -h, h, 20_000);
            assert!((q - 1.7).abs() < 1e-9, "{shape:?}: {q}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(make_pulse(Envelope::Sin2, 0.0, 1.0, 0.0, 0.0, Channel::Pump).is_err());
        assert!(make_pulse(Envelope::Sin2, -5.0, 1.0, 0.0, 0.0, Channel::Pump).is_err());
        assert!(make_pulse(Envelope::Sin2, 110.0, -1.0, 0.0, 0.0, Channel::Pump).is_err());
    }

    #[test]
    fn spectral_amplitude_matches_numeric_transform() {
        for shape in [Envelope::Sin2, Envelope::Gaussian] {
            let p = make_pulse(shape, 110.0, 1.0, 0.0, 0.0, Channel::Pump).unwrap();
            for det in [0.0, 12.5, 45.0, 130.0] {
                let omega = units::wavenumber_to_angular(det);
                let h = p.half_support();
                let n = 20_000;
                let dt = 2.0 * h / n as f64;
                let (mut re, mut im) = (0.0, 0.0);
                for i in 0..=n {
                    let t = -h + i as f64 * dt;
                    let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                    re += w * p.rabi(t) * (omega * t).cos() * dt;
                    im += w * p.rabi(t) * (omega * t).sin() * dt;
                }
                assert!((re - p.spectral_amplitude(det)).abs() < 1e-6, "{shape:?} {det}");
                assert!(im.abs() < 1e-9);
            }
        }
    }
}
