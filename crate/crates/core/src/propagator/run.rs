use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{PapError, Result};
use crate::fields::{TrainEvent, TrainSchedule};
use crate::model::LevelSystem;
use crate::propagator::{IntegratorConfig, PhaseFrame, QuantumState, SystemOperator};

/// What [`run_schedule`] stores besides the final state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RecordPolicy {
    /// Nothing but the final state.
    FinalOnly,
    /// One sample before the first pulse and one after every integration window.
    Compressed,
    /// Additionally every `stride` RK4 steps inside the windows.
    Dense { stride: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub time: f64,
    pub populations: Vec<f64>,
    pub norm: f64,
}

impl Sample {
    fn of(state: &QuantumState) -> Self {
        let populations = state.populations();
        let norm = populations.iter().sum();
        Sample {
            time: state.time,
            populations,
            norm,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub final_state: QuantumState,
    /// Largest excited-manifold population seen at any integration step.
    pub max_excited: f64,
}

impl Trajectory {
    /// CSV with columns `time_ps`, one population per level, `norm`.
    pub fn write_csv<W: Write>(&self, out: W, labels: &[String]) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["time_ps".to_string()];
        header.extend(labels.iter().map(|l| format!("pop_{l}")));
        header.push("norm".into());
        w.write_record(&header).map_err(csv_error)?;
        for s in &self.samples {
            let mut row = vec![s.time.to_string()];
            row.extend(s.populations.iter().map(f64::to_string));
            row.push(s.norm.to_string());
            w.write_record(&row).map_err(csv_error)?;
        }
        w.flush().map_err(|e| PapError::Format {
            path: "<trajectory>".into(),
            message: e.to_string(),
        })
    }
}

fn csv_error(e: csv::Error) -> PapError {
    PapError::Format {
        path: "<trajectory>".into(),
        message: e.to_string(),
    }
}

/// Groups time-sorted events into windows of mutually overlapping supports.
pub(crate) fn integration_windows(events: &[TrainEvent]) -> Vec<(f64, f64, Vec<&TrainEvent>)> {
    let mut sorted: Vec<&TrainEvent> = events.iter().collect();
    sorted.sort_by(|a, b| a.start().total_cmp(&b.start()));
    let mut windows: Vec<(f64, f64, Vec<&TrainEvent>)> = Vec::new();
    for e in sorted {
        match windows.last_mut() {
            Some((_, end, members)) if e.start() < *end => {
                *end = end.max(e.end());
                members.push(e);
            }
            _ => windows.push((e.start(), e.end(), vec![e])),
        }
    }
    windows
}

/// Propagates `initial` through every pulse of a schedule.
///
/// Pulses are integrated with RK4 inside windows covering their supports
/// (overlapping pulses share a window); gaps use exact diagonal evolution.
/// Windows holding only zero-area pulses are free evolution. The returned
/// state sits at the end of the last pulse, or at `initial.time` for an
/// empty schedule.
pub fn run_schedule(
    levels: &LevelSystem,
    schedule: &TrainSchedule,
    frame: &PhaseFrame,
    initial: &QuantumState,
    config: &IntegratorConfig,
    policy: RecordPolicy,
) -> Result<Trajectory> {
    config.check()?;
    if initial.len() != levels.len() {
        return Err(PapError::InvalidArgument(format!(
            "state has {} amplitudes for {} levels",
            initial.len(),
            levels.len()
        )));
    }
    let stride = match policy {
        RecordPolicy::Dense { stride: 0 } => {
            return Err(PapError::InvalidArgument("dense stride must be ≥ 1".into()))
        }
        RecordPolicy::Dense { stride } => Some(stride),
        _ => None,
    };
    let record = policy != RecordPolicy::FinalOnly;
    let excited = levels.excited_range();

    let op = SystemOperator::new(levels, frame);
    let mut ws = op.workspace();
    let mut state = initial.clone();
    let mut max_excited = state.population_in(excited.clone());
    let mut samples = Vec::new();
    if record {
        samples.push(Sample::of(&state));
    }

    for (start, end, members) in integration_windows(&schedule.events) {
        let gap = start - state.time;
        if gap < -1e-9 {
            return Err(PapError::InvalidArgument(format!(
                "initial state at t = {} ps is later than the pulse starting at {start} ps",
                state.time
            )));
        }
        op.free_evolve(&mut state, gap.max(0.0));
        state.time = start;
        if members.iter().all(|e| e.pulse.area == 0.0) {
            op.free_evolve(&mut state, end - start);
            state.time = end;
            if record {
                samples.push(Sample::of(&state));
            }
            continue;
        }
        let steps = config.steps_for(end - start, &members)?;
        op.integrate(&mut state, &members, end, steps, &mut ws, |s, step| {
            max_excited = max_excited.max(s.population_in(excited.clone()));
            if let Some(stride) = stride {
                if (step + 1) % stride == 0 && step + 1 < steps {
                    samples.push(Sample::of(s));
                }
            }
        })?;
        if record {
            samples.push(Sample::of(&state));
        }
    }

    Ok(Trajectory {
        samples,
        final_state: state,
        max_excited,
    })
}
