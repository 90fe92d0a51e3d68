use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PapError, Result};
use crate::fields::Protocol;
use crate::model::LevelSystem;
use crate::propagator::{IntegratorConfig, RecordPolicy};
use crate::protocols::{run_train, RunResult, TrainSetup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Number of pairs at fixed total action.
    NPairs,
    /// Common factor on both channel actions.
    AreaScale,
    /// Pulse-to-pulse chirp applied to both channels.
    Alpha,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub result: Result<RunResult, String>,
}

impl SweepRow {
    pub fn efficiency(&self) -> f64 {
        self.result.as_ref().map_or(f64::NAN, |r| r.final_target)
    }
}

/// One run per value with everything else held at `base`.
pub fn robustness_sweep(
    levels: &LevelSystem,
    protocol: Protocol,
    base: &TrainSetup,
    integrator: &IntegratorConfig,
    parameter: SweepParameter,
    values: &[f64],
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(PapError::InvalidArgument("sweep needs at least one value".into()));
    }
    let rows = values
        .par_iter()
        .map(|&value| {
            let mut setup = base.clone();
            match parameter {
                SweepParameter::NPairs => {
                    if value < 0.0 || value.fract() != 0.0 {
                        return SweepRow {
                            value,
                            result: Err(format!("n_pairs must be a non-negative integer (got {value})")),
                        };
                    }
                    setup.n_pairs = value as usize;
                }
                SweepParameter::AreaScale => {
                    setup.pump_action *= value;
                    setup.dump_action *= value;
                }
                SweepParameter::Alpha => {
                    setup.alpha_pump = value;
                    setup.alpha_dump = value;
                }
            }
            SweepRow {
                value,
                result: run_train(levels, protocol, &setup, integrator, RecordPolicy::FinalOnly)
                    .map_err(|e| e.to_string()),
            }
        })
        .collect();
    Ok(rows)
}

/// `max − min` of the finite efficiencies in a sweep.
pub fn efficiency_spread(rows: &[SweepRow]) -> f64 {
    let finite = rows.iter().map(SweepRow::efficiency).filter(|e| e.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e), hi.max(e)));
    if hi >= lo {
        hi - lo
    } else {
        f64::NAN
    }
}
