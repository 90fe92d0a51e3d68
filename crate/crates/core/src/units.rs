//! Unit conventions.
//!
//! Energies and carrier frequencies are wavenumbers (cm⁻¹), times are
//! picoseconds, repetition rates and offsets are THz (= ps⁻¹) and Rabi
//! frequencies are rad/ps. A single constant converts a wavenumber into an
//! angular frequency.

use std::f64::consts::TAU;

/// Speed of light in cm/ps.
pub const SPEED_OF_LIGHT_CM_PER_PS: f64 = 0.029_979_245_8;

/// Angular frequency (rad/ps) per wavenumber (cm⁻¹): `2π·c`.
pub const ANGULAR_PER_WAVENUMBER: f64 = TAU * SPEED_OF_LIGHT_CM_PER_PS;

/// Femtoseconds per picosecond.
pub const FS_PER_PS: f64 = 1000.0;

/// Picoseconds per nanosecond.
pub const PS_PER_NS: f64 = 1000.0;

/// Wavenumber (cm⁻¹) → angular frequency (rad/ps).
#[inline]
pub fn wavenumber_to_angular(wavenumber: f64) -> f64 {
    ANGULAR_PER_WAVENUMBER * wavenumber
}

/// Angular frequency (rad/ps) → wavenumber (cm⁻¹).
#[inline]
pub fn angular_to_wavenumber(omega: f64) -> f64 {
    omega / ANGULAR_PER_WAVENUMBER
}

/// Wavenumber (cm⁻¹) → ordinary frequency (THz).
#[inline]
pub fn wavenumber_to_thz(wavenumber: f64) -> f64 {
    wavenumber * SPEED_OF_LIGHT_CM_PER_PS
}

/// Ordinary frequency (THz) → wavenumber (cm⁻¹).
#[inline]
pub fn thz_to_wavenumber(freq: f64) -> f64 {
    freq / SPEED_OF_LIGHT_CM_PER_PS
}

/// Population decay rate (ps⁻¹) for a lifetime given in nanoseconds.
#[inline]
pub fn decay_rate_from_lifetime_ns(lifetime_ns: f64) -> f64 {
    1.0 / (lifetime_ns * PS_PER_NS)
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase(phase: f64) -> f64 {
    use std::f64::consts::PI;
    let wrapped = (phase + PI).rem_euclid(TAU) - PI;
    if wrapped <= -PI {
        wrapped + TAU
    } else {
        wrapped
    }
}
