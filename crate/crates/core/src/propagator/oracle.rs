//! Reference propagator: dense Hamiltonian, fourth-order Magnus steps and
//! matrix exponentials. Slow, meant for validating the RK4 path on small
//! systems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{PapError, Result};
use crate::fields::{Channel, TrainEvent, TrainSchedule};
use crate::model::LevelSystem;
use crate::propagator::{PhaseFrame, QuantumState};
use crate::units::wavenumber_to_angular;

/// Largest system the oracle accepts.
pub const ORACLE_MAX_LEVELS: usize = 32;

/// Dense `H(t)` (rad/ps), including `−iΓ/2` on the diagonal.
pub fn dense_hamiltonian(
    levels: &LevelSystem,
    events: &[&TrainEvent],
    frame: &PhaseFrame,
    t: f64,
) -> DMatrix<C64> {
    let n = levels.len();
    let (na, ne, _) = levels.dims();
    let energies = levels.frame_energies(frame.pump_reference, frame.dump_reference);
    let rates = levels.decay_rates();
    let mut h = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(wavenumber_to_angular(energies[i]), -0.5 * rates[i])
        } else {
            C64::new(0.0, 0.0)
        }
    });
    for e in events {
        let p = &e.pulse;
        let omega = p.rabi(t - e.time);
        if omega == 0.0 {
            continue;
        }
        let carrier = wavenumber_to_angular(frame.offset(p)) * t;
        let raman = p.phase_at(t - e.time);
        for k in 0..ne {
            let mask = p.phase_mask.as_ref().map_or(0.0, |m| m[k]);
            let row = na + k;
            match p.channel {
                Channel::Pump => {
                    let field = C64::from_polar(0.5 * omega, -(carrier + raman + mask));
                    for j in 0..na {
                        let v = field * levels.pump_coupling(j, k);
                        h[(row, j)] += v;
                        h[(j, row)] += v.conj();
                    }
                }
                Channel::Dump => {
                    let field = C64::from_polar(0.5 * omega, raman + mask - carrier);
                    for b in 0..levels.ground_b.len() {
                        let col = na + ne + b;
                        let v = field * levels.dump_coupling(b, k);
                        h[(row, col)] += v;
                        h[(col, row)] += v.conj();
                    }
                }
            }
        }
    }
    h
}

/// Propagates through a schedule with 4th-order Magnus steps
/// (`steps_per_pulse` per narrowest support) and exact free evolution.
pub fn oracle_propagate(
    levels: &LevelSystem,
    schedule: &TrainSchedule,
    frame: &PhaseFrame,
    initial: &QuantumState,
    steps_per_pulse: usize,
) -> Result<QuantumState> {
    let n = levels.len();
    if n > ORACLE_MAX_LEVELS {
        return Err(PapError::InvalidArgument(format!(
            "oracle limited to {ORACLE_MAX_LEVELS} levels (got {n})"
        )));
    }
    if steps_per_pulse == 0 {
        return Err(PapError::InvalidArgument("steps_per_pulse must be ≥ 1".into()));
    }
    for e in &schedule.events {
        if let Some(m) = &e.pulse.phase_mask {
            if m.len() != levels.excited.len() {
                return Err(PapError::InvalidPulse("phase mask length".into()));
            }
        }
    }
    let energies = levels.frame_energies(frame.pump_reference, frame.dump_reference);
    let rates = levels.decay_rates();
    let mut a = DVector::from_vec(initial.amplitudes.clone());
    let mut t = initial.time;

    // pulse intervals merged independently of the production path
    let mut spans: Vec<(f64, f64, Vec<&TrainEvent>)> = Vec::new();
    let mut events: Vec<&TrainEvent> = schedule.events.iter().collect();
    events.sort_by(|x, y| x.start().total_cmp(&y.start()));
    for e in events {
        let joined = spans.last().is_some_and(|s| e.start() < s.1);
        if joined {
            let s = spans.last_mut().unwrap();
            s.1 = s.1.max(e.end());
            s.2.push(e);
        } else {
            spans.push((e.start(), e.end(), vec![e]));
        }
    }

    let gauss = 3f64.sqrt() / 6.0;
    let mi = C64::new(0.0, -1.0);
    for (start, end, members) in spans {
        let gap = start - t;
        for k in 0..n {
            a[k] *= (C64::new(-0.5 * rates[k], -wavenumber_to_angular(energies[k])) * gap).exp();
        }
        let narrow = members
            .iter()
            .map(|e| e.pulse.support())
            .fold(f64::INFINITY, f64::min);
        let steps = (((end - start) / narrow) * steps_per_pulse as f64).ceil() as usize;
        let h = (end - start) / steps as f64;
        for s in 0..steps {
            let t0 = start + s as f64 * h;
            let a1 = dense_hamiltonian(levels, &members, frame, t0 + (0.5 - gauss) * h) * mi;
            let a2 = dense_hamiltonian(levels, &members, frame, t0 + (0.5 + gauss) * h) * mi;
            let comm = &a2 * &a1 - &a1 * &a2;
            let generator = (&a1 + &a2) * C64::from(0.5 * h) + comm * C64::from(3f64.sqrt() / 12.0 * h * h);
            a = generator.exp() * a;
        }
        t = end;
    }
    if !a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(PapError::Numerical("oracle produced non-finite amplitudes".into()));
    }
    Ok(QuantumState::new(a.iter().copied().collect(), t))
}
