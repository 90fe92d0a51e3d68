use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{PapError, Result};
use crate::fields::Channel;
use crate::units;

/// Two phase-locked frequency combs sharing one repetition rate.
///
/// Tooth `N` of a channel sits at `N·f_rep + f0` (THz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombSpec {
    /// THz
    pub f_rep: f64,
    /// THz, in `[0, f_rep)`
    pub f0_pump: f64,
    /// THz, in `[0, f_rep)`
    pub f0_dump: f64,
    pub n_pump: i64,
    pub n_dump: i64,
}

impl CombSpec {
    pub fn check(&self) -> Result<()> {
        if !(self.f_rep > 0.0) || !self.f_rep.is_finite() {
            return Err(PapError::InvalidComb(format!("f_rep must be > 0 (got {})", self.f_rep)));
        }
        for (name, f0) in [("f0_pump", self.f0_pump), ("f0_dump", self.f0_dump)] {
            if !(0.0..self.f_rep).contains(&f0) {
                return Err(PapError::InvalidComb(format!(
                    "{name} = {f0} outside [0, f_rep = {})",
                    self.f_rep
                )));
            }
        }
        Ok(())
    }

    /// Period `ΔT = 1/f_rep` in ps.
    pub fn period(&self) -> f64 {
        1.0 / self.f_rep
    }

    /// Combs whose teeth `n_pump`, `n_dump` fall exactly (to rounding) on the
    /// given carriers (cm⁻¹). The dump offset is obtained through
    /// [`raman_lock_f0_dump`] so that the two-photon condition holds for any
    /// repetition rate.
    pub fn locked_to_carriers(f_rep: f64, pump_carrier: f64, dump_carrier: f64) -> Result<Self> {
        if !(f_rep > 0.0) || !f_rep.is_finite() {
            return Err(PapError::InvalidComb(format!("f_rep must be > 0 (got {f_rep})")));
        }
        let (n_pump, f0_pump) = decompose(units::wavenumber_to_thz(pump_carrier), f_rep);
        let (n_dump, _) = decompose(units::wavenumber_to_thz(dump_carrier), f_rep);
        let lock = raman_lock_f0_dump(f_rep, n_dump - n_pump, dump_carrier - pump_carrier, f0_pump);
        let comb = CombSpec {
            f_rep,
            f0_pump,
            f0_dump: lock.f0_dump,
            n_pump,
            n_dump: n_dump + lock.tooth_adjustment,
        };
        comb.check()?;
        Ok(comb)
    }

    /// Tooth frequency of a channel in cm⁻¹.
    pub fn carrier_wavenumber(&self, channel: Channel) -> f64 {
        units::angular_to_wavenumber(comb_frequency(self, channel))
    }

    /// Carrier-envelope phase slip between consecutive pulses, `2π·f0·ΔT`.
    pub fn phase_slip(&self, channel: Channel) -> f64 {
        let f0 = match channel {
            Channel::Pump => self.f0_pump,
            Channel::Dump => self.f0_dump,
        };
        TAU * f0 * self.period()
    }
}

fn decompose(freq: f64, f_rep: f64) -> (i64, f64) {
    let n = (freq / f_rep).floor();
    let mut f0 = freq - n * f_rep;
    let mut n = n as i64;
    if f0 >= f_rep {
        f0 -= f_rep;
        n += 1;
    }
    if f0 < 0.0 {
        f0 += f_rep;
        n -= 1;
    }
    (n, f0.clamp(0.0, f_rep * (1.0 - f64::EPSILON)))
}

/// Angular frequency of the channel's locked tooth, `2π(N·f_rep + f0)` (rad/ps).
pub fn comb_frequency(comb: &CombSpec, channel: Channel) -> f64 {
    let (n, f0) = match channel {
        Channel::Pump => (comb.n_pump, comb.f0_pump),
        Channel::Dump => (comb.n_dump, comb.f0_dump),
    };
    TAU * (n as f64 * comb.f_rep + f0)
}

/// Dump-comb offset that keeps pump and dump teeth two-photon resonant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanLock {
    /// Unreduced value `f0_pump + R·c − N·f_rep` (THz).
    pub f0_dump_raw: f64,
    /// Value reduced into `[0, f_rep)`.
    pub f0_dump: f64,
    /// Integer `k` with `f0_dump_raw = f0_dump + k·f_rep`; the dump tooth index
    /// must be raised by `k` to keep the same optical frequency.
    pub tooth_adjustment: i64,
}

/// Carrier-envelope offset of the dump comb for a Raman shift `R` (cm⁻¹,
/// dump carrier minus pump carrier) bridged by `N = N_dump − N_pump` teeth.
pub fn raman_lock_f0_dump(f_rep: f64, n: i64, raman_shift: f64, f0_pump: f64) -> RamanLock {
    let raw = f0_pump + units::wavenumber_to_thz(raman_shift) - n as f64 * f_rep;
    let k = (raw / f_rep).floor();
    let mut reduced = raw - k * f_rep;
    let mut k = k as i64;
    if reduced >= f_rep {
        reduced -= f_rep;
        k += 1;
    }
    RamanLock {
        f0_dump_raw: raw,
        f0_dump: reduced.max(0.0),
        tooth_adjustment: k,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tooth_frequency() {
        let comb = CombSpec {
            f_rep: 1.0,
            f0_pump: 0.25,
            f0_dump: 0.0,
            n_pump: 100,
            n_dump: 7,
        };
        assert!((comb_frequency(&comb, Channel::Pump) - TAU * 100.25).abs() < 1e-12);
        assert_eq!(comb_frequency(&comb, Channel::Dump), TAU * 7.0);
    }

    #[test]
    fn shared_rep_rate_gives_equal_tooth_spacing() {
        let mut comb = CombSpec {
            f_rep: 0.75,
            f0_pump: 0.1,
            f0_dump: 0.6,
            n_pump: 40,
            n_dump: 90,
        };
        let p0 = comb_frequency(&comb, Channel::Pump);
        let d0 = comb_frequency(&comb, Channel::Dump);
        comb.n_pump += 1;
        comb.n_dump += 1;
        let dp = comb_frequency(&comb, Channel::Pump) - p0;
        let dd = comb_frequency(&comb, Channel::Dump) - d0;
        assert!((dp - dd).abs() < 1e-12);
        assert!((dp - TAU * 0.75).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        let mut comb = CombSpec {
            f_rep: 1.0,
            f0_pump: 0.0,
            f0_dump: 0.5,
            n_pump: 0,
            n_dump: 0,
        };
        assert!(comb.check().is_ok());
        comb.f0_dump = 1.0;
        assert!(comb.check().is_err());
        comb.f0_dump = 0.0;
        comb.f_rep = 0.0;
        assert!(comb.check().is_err());
    }

    #[test]
    fn lock_is_identity_when_teeth_bridge_raman_shift() {
        let n = 1_781;
        let raman = 2333.0;
        let f_rep = units::wavenumber_to_thz(raman) / n as f64;
        let lock = raman_lock_f0_dump(f_rep, n, raman, 0.3 * f_rep);
        assert!((lock.f0_dump - 0.3 * f_rep).abs() < 1e-12 * f_rep.max(1.0));
        assert_eq!(lock.tooth_adjustment, 0);
    }

    #[test]
    fn lock_without_shift_reduces_to_pump_offset() {
        let f_rep = 1.0 / 1310.59;
        let f0 = 0.4 * f_rep;
        let lock = raman_lock_f0_dump(f_rep, 12, 0.0, f0);
        assert!((lock.f0_dump_raw - (f0 - 12.0 * f_rep)).abs() < 1e-15);
        assert!((lock.f0_dump - f0).abs() < 1e-15);
        assert_eq!(lock.tooth_adjustment, -12);
    }

    #[test]
    fn locked_combs_stay_two_photon_resonant_over_rep_rate_scan() {
        let pump = 11_324.5;
        let dump = 13_657.5;
        let base = 1.0 / 1310.59;
        for i in 0..=20 {
            let f_rep = base * (1.0 + 0.01 * (i as f64 / 20.0 - 0.5));
            let comb = CombSpec::locked_to_carriers(f_rep, pump, dump).unwrap();
            let diff = comb.carrier_wavenumber(Channel::Dump) - comb.carrier_wavenumber(Channel::Pump);
            assert!((diff - (dump - pump)).abs() < 1e-8, "{diff}");
            assert!((comb.carrier_wavenumber(Channel::Pump) - pump).abs() < 1e-8);
            // accumulated pump-minus-dump optical phase per period is a multiple of 2π
            // once the Raman shift is removed
            let per_period = (comb_frequency(&comb, Channel::Pump) - comb_frequency(&comb, Channel::Dump)
                + units::wavenumber_to_angular(dump - pump))
                * comb.period();
            let turns = per_period / TAU;
            assert!((turns - turns.round()).abs() < 1e-6, "{turns}");
        }
    }

    #[test]
    fn phase_slip_per_pulse() {
        let comb = CombSpec {
            f_rep: 0.5,
            f0_pump: 0.125,
            f0_dump: 0.0,
            n_pump: 3,
            n_dump: 3,
        };
        assert!((comb.phase_slip(Channel::Pump) - TAU * 0.25).abs() < 1e-15);
        assert_eq!(comb.phase_slip(Channel::Dump), 0.0);
    }
}
