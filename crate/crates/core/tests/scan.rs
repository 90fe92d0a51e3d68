use std::path::Path;

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use pap_core::fields::Protocol;
use pap_core::model::{build_synthetic_molecule, SyntheticMoleculeSpec};
use pap_core::propagator::{IntegratorConfig, RecordPolicy};
use pap_core::protocols::{run_train, TrainSetup};
use pap_core::scan::{
    beat_spectrum, parseval_mismatch, revival_diagnostics, revival_fidelity, scan_2d, uniform_grid, EfficiencyMap,
    ScanBase,
};
use pap_core::units::wavenumber_to_angular;
use pap_core::ErrorCategory;

#[test]
fn constant_column_has_empty_spectrum() {
    let axis = uniform_grid(0.0, 0.1, 64);
    let spectrum = beat_spectrum(&[0.7; 64], &axis, false).unwrap();
    assert!(spectrum.magnitude.iter().all(|m| m.abs() < 1e-12));
}

#[test]
fn cosine_peaks_at_its_wavenumber() {
    let axis = uniform_grid(0.5, 0.1, 256);
    let samples: Vec<f64> = axis.iter().map(|&t| 0.5 + 0.3 * (wavenumber_to_angular(45.0) * t).cos()).collect();
    for hann in [false, true] {
        let spectrum = beat_spectrum(&samples, &axis, hann).unwrap();
        let (peak, _) = spectrum.peak().unwrap();
        assert!((peak - 45.0).abs() <= spectrum.bin_width, "{peak}");
    }
}

#[test]
fn spectrum_input_checks() {
    assert!(beat_spectrum(&[0.0; 4], &[0.0, 1.0, 2.0, 3.0], false).is_err());
    let axis = [0.0, 0.1, 0.2, 0.35, 0.4, 0.5, 0.6, 0.7];
    assert!(beat_spectrum(&[0.0; 8], &axis, false).is_err());
    let mut samples = vec![0.1; 8];
    samples[3] = f64::NAN;
    let err = beat_spectrum(&samples, &uniform_grid(0.0, 0.1, 8), false).unwrap_err();
    assert_eq!(err.category(), ErrorCategory::Numerical);
}

proptest! {
    #[test]
    fn parseval_holds(samples in prop::collection::vec(-1.0..1.0f64, 8..200)) {
        prop_assert!(parseval_mismatch(&samples) <= 1e-9);
    }

    #[test]
    fn map_csv_round_trips(
        values in prop::collection::vec(prop::option::weighted(0.9, 0.0..1.0f64), 6),
        start in -3.0..3.0f64,
    ) {
        let map = EfficiencyMap {
            delta_t_large: vec![10.0, 10.5],
            delta_t_small: uniform_grid(start, 0.1, 3),
            efficiency: values.chunks(3).map(|r| r.iter().map(|v| v.unwrap_or(f64::NAN)).collect()).collect(),
            config_fingerprint: "abc123".into(),
        };
        let mut bytes = Vec::new();
        map.write_csv(&mut bytes, &["pap test fingerprint=abc123".into()]).unwrap();
        let back = EfficiencyMap::read_csv(bytes.as_slice(), Path::new("mem")).unwrap();
        prop_assert_eq!(&back.delta_t_large, &map.delta_t_large);
        prop_assert_eq!(&back.delta_t_small, &map.delta_t_small);
        prop_assert_eq!(&back.config_fingerprint, &map.config_fingerprint);
        for (a, b) in back.efficiency.iter().flatten().zip(map.efficiency.iter().flatten()) {
            prop_assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()));
        }
    }
}

#[test]
fn one_cell_scan_equals_single_run() {
    let spec = SyntheticMoleculeSpec::equally_spaced(2, 11_145.0, 45.0, 0.0, 2333.0);
    let levels = build_synthetic_molecule(&spec).unwrap();
    let setup = TrainSetup::new(5, 20.0, 1.0, 1.0);
    let base = ScanBase {
        protocol: Protocol::FlatPairs,
        setup: setup.clone(),
        integrator: IntegratorConfig::default(),
    };
    let map = scan_2d(&levels, &base, &[20.0], &[0.7], "").unwrap();
    let direct = run_train(
        &levels,
        Protocol::FlatPairs,
        &setup.with_delta_t_small(0.7),
        &IntegratorConfig::default(),
        RecordPolicy::FinalOnly,
    )
    .unwrap();
    assert_eq!(map.efficiency[0][0], direct.final_target);
}

#[test]
fn revivals() {
    let t = 3.7;
    assert!((revival_fidelity(&[1.0], &[123.0], t) - 1.0).abs() < 1e-12);

    // equally spaced levels rephase after 1/(c·Δ)
    let energies = [0.0, 30.0, 60.0, 90.0];
    let period = std::f64::consts::TAU / wavenumber_to_angular(30.0);
    assert!((revival_fidelity(&[1.0; 4], &energies, period) - 1.0).abs() < 1e-12);
    let amplitudes = vec![C64::new(0.5, 0.0); 4];
    let trace = revival_diagnostics(&amplitudes, &energies, 2.5 * period, period / 50.0, 0.5).unwrap();
    let (t_best, f_best) = trace.revivals[0];
    assert!(f_best > 1.0 - 1e-8);
    assert!(((t_best / period) - (t_best / period).round()).abs() < 1e-4);

    // incommensurate spacings never fully rephase in the window
    let energies = [0.0, 30.0, 30.0 * 2f64.sqrt(), 30.0 * 5f64.sqrt()];
    let trace = revival_diagnostics(&amplitudes, &energies, 2.0 * period, period / 100.0, 0.0).unwrap();
    assert!(trace.fidelity.iter().all(|&f| f < 0.999));
}
