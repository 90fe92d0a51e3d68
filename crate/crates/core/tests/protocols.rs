use pap_core::fields::{make_pulse, Channel, Envelope, Protocol};
use pap_core::model::{build_synthetic_molecule, build_three_level, DipoleProfile, SyntheticMoleculeSpec};
use pap_core::propagator::{IntegratorConfig, RecordPolicy};
use pap_core::protocols::{
    coarse_grain, reference_schedule, run_piecewise_crp, run_piecewise_stirap, run_reference_ap, run_train,
    MaskPolicy, ReferenceSetup, RunResult, TrainSetup,
};
use pap_core::scan::{robustness_sweep, SweepParameter};
use pap_core::units::SPEED_OF_LIGHT_CM_PER_PS;

fn stirap(setup: &TrainSetup) -> RunResult {
    let levels = build_three_level(0.0, 0.0, 0.0);
    run_piecewise_stirap(&levels, setup, &IntegratorConfig::default(), RecordPolicy::Compressed).unwrap()
}

fn fractions_sum(r: &RunResult) -> f64 {
    r.final_target + r.final_initial + r.leaked_ground_a + r.leaked_ground_b + r.residual_excited + r.decayed_loss
}

#[test]
fn three_level_stirap_transfers() {
    let r = stirap(&TrainSetup::new(50, 10.0, 20.0, 20.0));
    assert!(r.final_target >= 0.95, "{}", r.final_target);
    assert!(r.max_transient_excited <= 0.1);
    assert!((fractions_sum(&r) - 1.0).abs() < 1e-10);
    assert!(r.decayed_loss.abs() < 1e-10);
}

#[test]
fn no_dump_means_no_target_population() {
    let r = stirap(&TrainSetup::new(20, 10.0, 20.0, 0.0));
    assert!(r.final_target < 1e-20);
}

#[test]
fn zero_pairs_is_identity() {
    let r = stirap(&TrainSetup::new(0, 10.0, 20.0, 20.0));
    assert_eq!(r.final_initial, 1.0);
    assert_eq!(r.final_target, 0.0);
}

#[test]
fn area_scale_robustness() {
    let levels = build_three_level(0.0, 0.0, 0.0);
    let rows = robustness_sweep(
        &levels,
        Protocol::Stirap,
        &TrainSetup::new(50, 10.0, 20.0, 20.0),
        &IntegratorConfig::default(),
        SweepParameter::AreaScale,
        &[0.8, 1.0, 1.2],
    )
    .unwrap();
    for row in &rows {
        assert!(row.efficiency() >= 0.9, "scale {} → {}", row.value, row.efficiency());
    }
}

#[test]
fn single_value_sweep_matches_direct_run() {
    let levels = build_three_level(0.0, 0.0, 0.0);
    let setup = TrainSetup::new(30, 10.0, 20.0, 20.0);
    let config = IntegratorConfig::default();
    let rows = robustness_sweep(&levels, Protocol::Stirap, &setup, &config, SweepParameter::NPairs, &[30.0]).unwrap();
    let direct = run_train(&levels, Protocol::Stirap, &setup, &config, RecordPolicy::FinalOnly).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].efficiency(), direct.final_target);
}

#[test]
fn piecewise_crp_transfers() {
    let levels = build_three_level(0.0, 0.0, 0.0);
    let setup = TrainSetup::new(40, 10.0, 30.0, 30.0).with_alphas(0.2, 0.2);
    let r = run_piecewise_crp(&levels, &setup, &IntegratorConfig::default(), RecordPolicy::FinalOnly).unwrap();
    assert!(r.final_target >= 0.9, "{}", r.final_target);
}

fn reference(protocol: Protocol, peak: f64, chirp: f64) -> RunResult {
    let levels = build_three_level(0.0, 0.0, 0.0);
    let setup = ReferenceSetup {
        protocol,
        duration: 100.0,
        peak_rabi_pump: peak,
        peak_rabi_dump: peak,
        chirp,
    };
    run_reference_ap(&levels, &setup, &IntegratorConfig::default(), RecordPolicy::FinalOnly).unwrap()
}

#[test]
fn smooth_references() {
    let s = reference(Protocol::Stirap, 1.5, 0.0);
    assert!(s.final_target >= 0.99, "{}", s.final_target);
    let c = reference(Protocol::Crp, 2.0, 0.1);
    assert!(c.final_target >= 0.95, "{}", c.final_target);
    assert!(c.max_transient_excited > 0.0);
    let off = reference(Protocol::Stirap, 0.0, 0.0);
    assert_eq!(off.final_initial, 1.0);
}

#[test]
fn coarse_graining_conserves_action() {
    let setup = ReferenceSetup {
        protocol: Protocol::Stirap,
        duration: 100.0,
        peak_rabi_pump: 1.0,
        peak_rabi_dump: 0.7,
        chirp: 0.0,
    };
    let schedule = reference_schedule(&setup).unwrap();
    let kick = make_pulse(Envelope::Sin2, 110.0, 1.0, 0.0, 0.0, Channel::Dump).unwrap();
    let (t0, t1) = (schedule.start_time().unwrap(), schedule.end_time().unwrap());
    let coarse = coarse_grain(&schedule, 80, t0, t1, &kick, -1.1 * kick.support()).unwrap();
    for channel in [Channel::Pump, Channel::Dump] {
        let smooth: f64 = schedule.channel_events(channel).map(|e| e.pulse.area).sum();
        let kicks: f64 = coarse.channel_events(channel).map(|e| e.pulse.area).sum();
        assert!((smooth - kicks).abs() < 1e-6 * smooth, "{channel:?}: {smooth} vs {kicks}");
    }
}

#[test]
fn designed_mask_beats_no_mask() {
    let spacing = 25.0;
    let delta_t_large = 982.0 / (SPEED_OF_LIGHT_CM_PER_PS * spacing);
    let mut spec = SyntheticMoleculeSpec::equally_spaced(6, 11_000.0, spacing, 0.0, 2333.0);
    spec.dipole_profile = DipoleProfile::Gaussian { center: 2.5, width: 2.0 };
    let levels = build_synthetic_molecule(&spec).unwrap();
    let config = IntegratorConfig::default();
    let base = TrainSetup::new(60, delta_t_large, 10.0, 10.0);
    let plain = run_piecewise_stirap(&levels, &base, &config, RecordPolicy::FinalOnly).unwrap();
    let masked = run_piecewise_stirap(&levels, &base.with_mask(MaskPolicy::Designed), &config, RecordPolicy::FinalOnly)
        .unwrap();
    assert!(masked.final_target > plain.final_target + 0.2, "{} vs {}", masked.final_target, plain.final_target);
    assert!((fractions_sum(&masked) - 1.0).abs() < 1e-9);
}
