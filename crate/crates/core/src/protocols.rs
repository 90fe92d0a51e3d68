//! Protocol runners: piecewise STIRAP and CRP trains, smooth reference
//! pulses, and the coarse-graining that turns one into the other.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{PapError, Result};
use crate::fields::{
    build_train, design_dump_phase_mask, integrate_rabi, Channel, CombSpec, Envelope, PulseSpec,
    Protocol, TrainEvent, TrainParams, TrainSchedule,
};
use crate::model::LevelSystem;
use crate::propagator::{
    propagate_pulse, run_schedule, IntegratorConfig, PhaseFrame, QuantumState, RecordPolicy,
    SystemOperator, Trajectory,
};

/// How the dump pulses of a train are phase-shaped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum MaskPolicy {
    None,
    /// Designed from the excited wave packet a weak pump pulse creates.
    Designed,
    Explicit { phases: Vec<f64> },
}

fn default_fwhm() -> f64 {
    110.0
}

fn default_ramp() -> (f64, f64) {
    (0.0, 1.0)
}

/// Everything needed to lay out a pulse-pair train on a level system.
///
/// `pump_action` and `dump_action` are the summed pulse areas of each
/// channel; the protocol's train envelope distributes them over the pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSetup {
    pub n_pairs: usize,
    /// ΔT (ps).
    pub delta_t_large: f64,
    /// δT (ps); `None` places each pump just before its dump.
    #[serde(default)]
    pub delta_t_small: Option<f64>,
    #[serde(default = "default_shape")]
    pub shape: Envelope,
    /// fs
    #[serde(default = "default_fwhm")]
    pub fwhm: f64,
    pub pump_action: f64,
    pub dump_action: f64,
    #[serde(default)]
    pub pump_detuning: f64,
    #[serde(default)]
    pub dump_detuning: f64,
    #[serde(default)]
    pub alpha_pump: f64,
    #[serde(default)]
    pub alpha_dump: f64,
    #[serde(default)]
    pub extra_dump_delay: f64,
    #[serde(default)]
    pub crp_width: Option<f64>,
    #[serde(default = "default_ramp")]
    pub stirap_ramp: (f64, f64),
    #[serde(default = "default_mask")]
    pub mask: MaskPolicy,
}

fn default_shape() -> Envelope {
    Envelope::Sin2
}

fn default_mask() -> MaskPolicy {
    MaskPolicy::None
}

impl TrainSetup {
    pub fn new(n_pairs: usize, delta_t_large: f64, pump_action: f64, dump_action: f64) -> Self {
        TrainSetup {
            n_pairs,
            delta_t_large,
            delta_t_small: None,
            shape: Envelope::Sin2,
            fwhm: default_fwhm(),
            pump_action,
            dump_action,
            pump_detuning: 0.0,
            dump_detuning: 0.0,
            alpha_pump: 0.0,
            alpha_dump: 0.0,
            extra_dump_delay: 0.0,
            crp_width: None,
            stirap_ramp: default_ramp(),
            mask: MaskPolicy::None,
        }
    }

    pub fn with_alphas(mut self, alpha_pump: f64, alpha_dump: f64) -> Self {
        self.alpha_pump = alpha_pump;
        self.alpha_dump = alpha_dump;
        self
    }

    pub fn with_mask(mut self, mask: MaskPolicy) -> Self {
        self.mask = mask;
        self
    }

    pub fn with_delta_t_small(mut self, delta_t_small: f64) -> Self {
        self.delta_t_small = Some(delta_t_small);
        self
    }

    fn template(&self, channel: Channel, detuning: f64) -> Result<PulseSpec> {
        let pulse = PulseSpec {
            shape: self.shape,
            fwhm: self.fwhm,
            area: 1.0,
            carrier_detuning: detuning,
            carrier_phase: 0.0,
            channel,
            phase_mask: None,
            chirp: 0.0,
        };
        pulse.check()?;
        Ok(pulse)
    }

    /// δT actually used: the configured value or the pump-before-dump default.
    pub fn resolved_delta_t_small(&self) -> Result<f64> {
        if let Some(d) = self.delta_t_small {
            return Ok(d);
        }
        let support = self.template(Channel::Pump, 0.0)?.support();
        Ok(-1.1 * support)
    }
}

/// Schedule, frame and comb for a train on a given system.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainPlan {
    pub schedule: TrainSchedule,
    pub frame: PhaseFrame,
    pub comb: CombSpec,
    pub dump_mask: Option<Vec<f64>>,
}

/// Lays out a train: per-pulse areas, comb-locked frame, and the dump mask.
pub fn plan_train(
    levels: &LevelSystem,
    protocol: Protocol,
    setup: &TrainSetup,
    integrator: &IntegratorConfig,
) -> Result<TrainPlan> {
    if !(setup.pump_action >= 0.0) || !(setup.dump_action >= 0.0) {
        return Err(PapError::InvalidArgument("actions must be ≥ 0".into()));
    }
    if !(setup.delta_t_large > 0.0) || !setup.delta_t_large.is_finite() {
        return Err(PapError::InvalidSchedule(format!(
            "ΔT must be > 0 (got {})",
            setup.delta_t_large
        )));
    }
    let comb = CombSpec::locked_to_carriers(
        1.0 / setup.delta_t_large,
        levels.carriers.pump,
        levels.carriers.dump,
    )?;
    let frame = PhaseFrame::from_comb(levels, &comb);

    let mut params = TrainParams::new(
        protocol,
        setup.n_pairs,
        setup.delta_t_large,
        setup.resolved_delta_t_small()?,
        setup.template(Channel::Pump, setup.pump_detuning)?,
        setup.template(Channel::Dump, setup.dump_detuning)?,
    )
    .with_alphas(setup.alpha_pump, setup.alpha_dump);
    params.extra_dump_delay = setup.extra_dump_delay;
    params.crp_width = setup.crp_width;
    params.stirap_ramp = setup.stirap_ramp;

    let (sum_pump, sum_dump) = (0..setup.n_pairs)
        .map(|n| params.weights(n))
        .fold((0.0, 0.0), |(p, d), (wp, wd)| (p + wp, d + wd));
    params.pump_pulse.area = if sum_pump > 0.0 { setup.pump_action / sum_pump } else { 0.0 };
    params.dump_pulse.area = if sum_dump > 0.0 { setup.dump_action / sum_dump } else { 0.0 };

    let dump_mask = match &setup.mask {
        MaskPolicy::None => None,
        MaskPolicy::Explicit { phases } => Some(phases.clone()),
        MaskPolicy::Designed => Some(designed_mask(levels, &params, &frame, integrator)?),
    };
    if let Some(mask) = &dump_mask {
        if mask.len() != levels.excited.len() {
            return Err(PapError::InvalidArgument(format!(
                "dump mask has {} phases for {} excited levels",
                mask.len(),
                levels.excited.len()
            )));
        }
        params.dump_pulse.phase_mask = Some(mask.clone());
    }

    let schedule = build_train(&params)?;
    Ok(TrainPlan {
        schedule,
        frame,
        comb,
        dump_mask,
    })
}

/// Mask matched to the excited packet left by a weak first pump pulse when
/// the following dump pulse arrives.
fn designed_mask(
    levels: &LevelSystem,
    params: &TrainParams,
    frame: &PhaseFrame,
    integrator: &IntegratorConfig,
) -> Result<Vec<f64>> {
    let pump = TrainEvent {
        time: params.delta_t_small,
        pulse: params.pump_pulse.clone().with_area(1e-3),
    };
    let dump_time = if params.delta_t_small + params.extra_dump_delay < 0.0 {
        params.extra_dump_delay
    } else {
        params.delta_t_large + params.extra_dump_delay
    };
    let start = QuantumState::initial(levels, pump.start());
    let mut packet = propagate_pulse(&start, levels, &pump, frame, integrator)?;
    let wait = dump_time - packet.time;
    if wait > 0.0 {
        SystemOperator::new(levels, frame).free_evolve(&mut packet, wait);
    }
    let excited = &packet.amplitudes[levels.excited_range()];
    design_dump_phase_mask(excited, &levels.target_dump_couplings())
}

/// Populations summarising one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub final_target: f64,
    pub final_initial: f64,
    /// Population on `ground_a` levels other than the initial one.
    pub leaked_ground_a: f64,
    /// Population on `ground_b` levels other than the target.
    pub leaked_ground_b: f64,
    pub residual_excited: f64,
    /// `1 − ‖a‖²` at the end.
    pub decayed_loss: f64,
    pub max_transient_excited: f64,
    #[serde(skip)]
    pub trajectory: Trajectory,
}

impl RunResult {
    fn from_trajectory(levels: &LevelSystem, trajectory: Trajectory) -> Self {
        let s = &trajectory.final_state;
        let (na, _, _) = levels.dims();
        let final_initial = s.amplitudes[levels.initial_global()].norm_sqr();
        let final_target = s.amplitudes[levels.target_global()].norm_sqr();
        RunResult {
            final_target,
            final_initial,
            leaked_ground_a: s.population_in(0..na) - final_initial,
            leaked_ground_b: s.population_in(levels.ground_b_range()) - final_target,
            residual_excited: s.population_in(levels.excited_range()),
            decayed_loss: 1.0 - s.norm_sqr(),
            max_transient_excited: trajectory.max_excited,
            trajectory,
        }
    }

    /// One-line JSON summary (without the trajectory).
    pub fn summary_json(&self) -> String {
        serde_json::to_string(self).unwrap_or_default()
    }
}

/// Runs an arbitrary schedule from the system's initial level. An empty
/// schedule returns the initial state unchanged.
pub fn run_pair_train(
    levels: &LevelSystem,
    schedule: &TrainSchedule,
    frame: &PhaseFrame,
    integrator: &IntegratorConfig,
    record: RecordPolicy,
) -> Result<RunResult> {
    let t0 = schedule.start_time().unwrap_or(0.0);
    let initial = QuantumState::initial(levels, t0);
    let trajectory = run_schedule(levels, schedule, frame, &initial, integrator, record)?;
    Ok(RunResult::from_trajectory(levels, trajectory))
}

/// Plans and runs a train of the given protocol; `n_pairs = 0` is the identity.
pub fn run_train(
    levels: &LevelSystem,
    protocol: Protocol,
    setup: &TrainSetup,
    integrator: &IntegratorConfig,
    record: RecordPolicy,
) -> Result<RunResult> {
    if setup.n_pairs == 0 {
        let empty = TrainSchedule::custom(Vec::new())?;
        return run_pair_train(levels, &empty, &PhaseFrame::nominal(levels), integrator, record);
    }
    let plan = plan_train(levels, protocol, setup, integrator)?;
    run_pair_train(levels, &plan.schedule, &plan.frame, integrator, record)
}

/// Piecewise STIRAP: counter-ramped train envelopes, dump envelope first.
pub fn run_piecewise_stirap(
    levels: &LevelSystem,
    setup: &TrainSetup,
    integrator: &IntegratorConfig,
    record: RecordPolicy,
) -> Result<RunResult> {
    run_train(levels, Protocol::Stirap, setup, integrator, record)
}

/// Piecewise chirped rapid passage: Gaussian train envelopes with a quadratic
/// pulse-to-pulse phase set by `alpha_pump`/`alpha_dump`.
pub fn run_piecewise_crp(
    levels: &LevelSystem,
    setup: &TrainSetup,
    integrator: &IntegratorConfig,
    record: RecordPolicy,
) -> Result<RunResult> {
    run_train(levels, Protocol::Crp, setup, integrator, record)
}

/// Smooth adiabatic-passage reference made of two long Gaussian pulses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSetup {
    pub protocol: Protocol,
    /// Overall duration (ps); pulses have σ = duration/10.
    pub duration: f64,
    /// Peak Rabi frequencies (rad/ps).
    pub peak_rabi_pump: f64,
    pub peak_rabi_dump: f64,
    /// Chirp of both pulses for CRP (rad/ps²).
    #[serde(default)]
    pub chirp: f64,
}

impl ReferenceSetup {
    pub fn sigma(&self) -> f64 {
        self.duration / 10.0
    }
}

/// Smooth reference schedule: STIRAP has the dump centered σ before and the
/// pump σ after `duration/2`; CRP has coincident chirped pulses.
pub fn reference_schedule(setup: &ReferenceSetup) -> Result<TrainSchedule> {
    if !(setup.duration > 0.0) {
        return Err(PapError::InvalidArgument("duration must be > 0".into()));
    }
    let sigma = setup.sigma();
    let fwhm_fs = sigma * 2.0 * std::f64::consts::LN_2.sqrt() * 1000.0;
    let norm = sigma * (2.0 * PI).sqrt();
    let pulse = |channel, peak: f64| PulseSpec {
        shape: Envelope::Gaussian,
        fwhm: fwhm_fs,
        area: peak * norm,
        carrier_detuning: 0.0,
        carrier_phase: 0.0,
        channel,
        phase_mask: None,
        chirp: if setup.protocol == Protocol::Crp { setup.chirp } else { 0.0 },
    };
    let mid = 0.5 * setup.duration;
    let (t_pump, t_dump) = match setup.protocol {
        Protocol::Stirap => (mid + sigma, mid - sigma),
        _ => (mid, mid),
    };
    TrainSchedule::custom(vec![
        TrainEvent {
            time: t_dump,
            pulse: pulse(Channel::Dump, setup.peak_rabi_dump),
        },
        TrainEvent {
            time: t_pump,
            pulse: pulse(Channel::Pump, setup.peak_rabi_pump),
        },
    ])
}

/// Runs the smooth reference in the system's nominal frame.
pub fn run_reference_ap(
    levels: &LevelSystem,
    setup: &ReferenceSetup,
    integrator: &IntegratorConfig,
    record: RecordPolicy,
) -> Result<RunResult> {
    let schedule = reference_schedule(setup)?;
    run_pair_train(levels, &schedule, &PhaseFrame::nominal(levels), integrator, record)
}

/// Replaces smooth pulses by one kick per channel and interval.
///
/// `[t_start, t_end]` is cut into `n_intervals`; each kick carries the
/// channel's Rabi integral over its interval and the smooth pulse's phase at
/// the interval center. Dump kicks sit at interval centers, pump kicks
/// `pump_offset` ps from them. Empty kicks are dropped.
pub fn coarse_grain(
    reference: &TrainSchedule,
    n_intervals: usize,
    t_start: f64,
    t_end: f64,
    kick: &PulseSpec,
    pump_offset: f64,
) -> Result<TrainSchedule> {
    if n_intervals == 0 || !(t_end > t_start) {
        return Err(PapError::InvalidArgument(
            "coarse graining needs n_intervals ≥ 1 and t_end > t_start".into(),
        ));
    }
    let width = (t_end - t_start) / n_intervals as f64;
    let mut events = Vec::new();
    for i in 0..n_intervals {
        let a = t_start + i as f64 * width;
        let b = a + width;
        let center = a + 0.5 * width;
        for channel in [Channel::Pump, Channel::Dump] {
            let mut action = 0.0;
            let mut phase_weight = num_complex::Complex64::new(0.0, 0.0);
            for e in reference.channel_events(channel) {
                let lo = (a - e.time).max(-e.pulse.half_support());
                let hi = (b - e.time).min(e.pulse.half_support());
                if hi <= lo {
                    continue;
                }
                let part = integrate_rabi(&e.pulse, lo, hi, 64);
                action += part;
                phase_weight += num_complex::Complex64::from_polar(part, e.pulse.phase_at(center - e.time));
            }
            if action <= 0.0 {
                continue;
            }
            let mut pulse = kick.clone();
            pulse.channel = channel;
            pulse.area = action;
            pulse.carrier_phase = phase_weight.arg();
            pulse.chirp = 0.0;
            let time = match channel {
                Channel::Pump => center + pump_offset,
                Channel::Dump => center,
            };
            events.push(TrainEvent { time, pulse });
        }
    }
    let schedule = TrainSchedule::custom(events)?;
    crate::fields::check_no_overlap(&schedule.events)?;
    Ok(schedule)
}
