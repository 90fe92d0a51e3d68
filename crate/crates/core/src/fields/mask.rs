use num_complex::Complex64 as C64;

use crate::error::{PapError, Result};
use crate::units::wrap_phase;

/// Per-level dump phase mask that makes every dump path add in phase.
///
/// For an excited wave packet `c_k` and dump couplings `d_k`, the mask is
/// `φ_k = arg c_k − arg d_k`, shifted so the largest-amplitude level gets 0.
/// Levels with a vanishing amplitude or coupling get 0.
pub fn design_dump_phase_mask(wavepacket: &[C64], dump_dipoles: &[C64]) -> Result<Vec<f64>> {
    if wavepacket.len() != dump_dipoles.len() {
        return Err(PapError::InvalidArgument(format!(
            "wave packet has {} levels but {} dump couplings",
            wavepacket.len(),
            dump_dipoles.len()
        )));
    }
    let active = |k: usize| wavepacket[k].norm() > 0.0 && dump_dipoles[k].norm() > 0.0;
    let anchor = (0..wavepacket.len())
        .filter(|&k| active(k))
        .max_by(|&a, &b| wavepacket[a].norm().total_cmp(&wavepacket[b].norm()))
        .ok_or_else(|| {
            PapError::InvalidArgument("wave packet has no amplitude on a dump-coupled level".into())
        })?;

    let raw = |k: usize| wavepacket[k].arg() - dump_dipoles[k].arg();
    let offset = raw(anchor);
    Ok((0..wavepacket.len())
        .map(|k| if active(k) { wrap_phase(raw(k) - offset) } else { 0.0 })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn single_level() {
        let mask = design_dump_phase_mask(&[C64::from_polar(0.7, 1.3)], &[C64::new(0.4, 0.0)]).unwrap();
        assert_eq!(mask, vec![0.0]);
    }

    #[test]
    fn quarter_turn() {
        let c = [C64::new(1.0, 0.0), C64::new(0.0, 0.8)];
        let d = [C64::new(1.0, 0.0), C64::new(0.5, 0.0)];
        let mask = design_dump_phase_mask(&c, &d).unwrap();
        assert!(mask[0].abs() < 1e-15);
        assert!((mask[1] - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn anchors_largest_amplitude() {
        let c = [C64::from_polar(0.2, 0.3), C64::from_polar(0.9, -1.0), C64::from_polar(0.1, 2.0)];
        let d = [C64::from_polar(1.0, 0.5), C64::from_polar(1.0, 0.25), C64::new(0.0, 0.0)];
        let mask = design_dump_phase_mask(&c, &d).unwrap();
        assert_eq!(mask[1], 0.0);
        assert_eq!(mask[2], 0.0);
        assert!((mask[0] - wrap_phase((0.3 - 0.5) - (-1.0 - 0.25))).abs() < 1e-15);
        // masked paths all share one phase
        let phases: Vec<f64> = (0..2)
            .map(|k| wrap_phase((d[k].conj() * c[k] * C64::from_polar(1.0, -mask[k])).arg()))
            .collect();
        assert!((phases[0] - phases[1]).abs() < 1e-12);
    }

    #[test]
    fn empty_packet_is_error() {
        let c = [C64::new(0.0, 0.0); 3];
        let d = [C64::new(1.0, 0.0); 3];
        assert!(design_dump_phase_mask(&c, &d).is_err());
        assert!(design_dump_phase_mask(&[C64::new(1.0, 0.0)], &d).is_err());
    }
}
