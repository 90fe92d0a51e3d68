use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{PapError, Result};
use crate::fields::{Channel, PulseSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Linear counter-ramps of the train envelopes, constant phase.
    Stirap,
    /// Gaussian train envelopes with a quadratic pulse-to-pulse phase.
    Crp,
    /// Constant weights and phase.
    FlatPairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeProfile {
    StirapLinear,
    CrpGaussian,
    Flat,
    /// Arbitrary per-pulse areas (coarse-grained or smooth references).
    Custom,
}

/// One pulse placed on the timeline; `time` is the pulse center in ps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainEvent {
    pub time: f64,
    pub pulse: PulseSpec,
}

impl TrainEvent {
    pub fn start(&self) -> f64 {
        self.time - self.pulse.half_support()
    }

    pub fn end(&self) -> f64 {
        self.time + self.pulse.half_support()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSchedule {
    pub events: Vec<TrainEvent>,
    pub n_pairs: usize,
    /// Inter-pair period ΔT (ps).
    pub delta_t_large: f64,
    /// Intra-pair delay δT (ps); positive means the pump comes after the dump.
    pub delta_t_small: f64,
    pub envelope_profile: EnvelopeProfile,
    pub chirp_alpha_pump: f64,
    pub chirp_alpha_dump: f64,
    /// Pair index at the center of the quadratic phase schedule.
    pub n0: f64,
}

/// Parameters of [`build_train`].
///
/// `pump_pulse.area` and `dump_pulse.area` are the areas at unit train weight.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainParams {
    pub protocol: Protocol,
    pub n_pairs: usize,
    /// ΔT (ps).
    pub delta_t_large: f64,
    /// δT (ps); dump centers sit at `n·ΔT`, pump centers at `n·ΔT + δT`.
    pub delta_t_small: f64,
    pub pump_pulse: PulseSpec,
    pub dump_pulse: PulseSpec,
    pub alpha_pump: f64,
    pub alpha_dump: f64,
    /// Extra delay (ps) added to every dump pulse.
    pub extra_dump_delay: f64,
    /// Gaussian width (in pairs) of CRP envelopes; defaults to `n_pairs/4`.
    pub crp_width: Option<f64>,
    /// Pump weight at the first and last pair of a STIRAP train; the dump
    /// envelope is its mirror image.
    pub stirap_ramp: (f64, f64),
}

impl TrainParams {
    pub fn new(
        protocol: Protocol,
        n_pairs: usize,
        delta_t_large: f64,
        delta_t_small: f64,
        pump_pulse: PulseSpec,
        dump_pulse: PulseSpec,
    ) -> Self {
        TrainParams {
            protocol,
            n_pairs,
            delta_t_large,
            delta_t_small,
            pump_pulse,
            dump_pulse,
            alpha_pump: 0.0,
            alpha_dump: 0.0,
            extra_dump_delay: 0.0,
            crp_width: None,
            stirap_ramp: (0.0, 1.0),
        }
    }

    pub fn with_alphas(mut self, alpha_pump: f64, alpha_dump: f64) -> Self {
        self.alpha_pump = alpha_pump;
        self.alpha_dump = alpha_dump;
        self
    }

    pub fn n0(&self) -> f64 {
        0.5 * (self.n_pairs as f64 - 1.0)
    }

    /// Train weights `(pump, dump)` of pair `n`.
    pub fn weights(&self, n: usize) -> (f64, f64) {
        let count = self.n_pairs;
        match self.protocol {
            Protocol::Stirap => {
                let (first, last) = self.stirap_ramp;
                if count == 1 {
                    let mid = 0.5 * (first + last);
                    return (mid, mid);
                }
                let ramp = |i: usize| {
                    let x = i as f64 / (count - 1) as f64;
                    first + (last - first) * x
                };
                (ramp(n), ramp(count - 1 - n))
            }
            Protocol::Crp => {
                let width = self.crp_width.unwrap_or(count as f64 / 4.0);
                let x = (n as f64 - self.n0()) / width;
                let w = (-0.5 * x * x).exp();
                (w, w)
            }
            Protocol::FlatPairs => (1.0, 1.0),
        }
    }

    /// Quadratic schedule phase `(pump, dump)` of pair `n`.
    pub fn schedule_phases(&self, n: usize) -> (f64, f64) {
        match self.protocol {
            Protocol::Crp => {
                let d = n as f64 - self.n0();
                (
                    0.5 * self.alpha_pump * d * d,
                    0.5 * self.alpha_dump * d * d,
                )
            }
            _ => (0.0, 0.0),
        }
    }
}

/// Generates the event timeline of a pulse-pair train.
pub fn build_train(params: &TrainParams) -> Result<TrainSchedule> {
    if params.n_pairs == 0 {
        return Err(PapError::InvalidSchedule("n_pairs must be ≥ 1".into()));
    }
    params.pump_pulse.check()?;
    params.dump_pulse.check()?;
    if params.pump_pulse.channel != Channel::Pump || params.dump_pulse.channel != Channel::Dump {
        return Err(PapError::InvalidSchedule("pulse channels do not match their roles".into()));
    }
    if !params.delta_t_small.is_finite() || !params.extra_dump_delay.is_finite() {
        return Err(PapError::InvalidSchedule("non-finite delay".into()));
    }
    let widest = params.pump_pulse.support().max(params.dump_pulse.support());
    if !(params.delta_t_large > widest) || !params.delta_t_large.is_finite() {
        return Err(PapError::InvalidSchedule(format!(
            "ΔT = {} ps must exceed the pulse support {widest} ps",
            params.delta_t_large
        )));
    }
    if let Some(w) = params.crp_width {
        if !(w > 0.0) {
            return Err(PapError::InvalidSchedule("crp_width must be > 0".into()));
        }
    }

    let mut events = Vec::with_capacity(2 * params.n_pairs);
    for n in 0..params.n_pairs {
        let base = n as f64 * params.delta_t_large;
        let (w_pump, w_dump) = params.weights(n);
        let (phi_pump, phi_dump) = params.schedule_phases(n);

        let mut pump = params.pump_pulse.clone();
        pump.area *= w_pump;
        pump.carrier_phase += phi_pump;
        let mut dump = params.dump_pulse.clone();
        dump.area *= w_dump;
        dump.carrier_phase += phi_dump;

        events.push(TrainEvent {
            time: base + params.delta_t_small,
            pulse: pump,
        });
        events.push(TrainEvent {
            time: base + params.extra_dump_delay,
            pulse: dump,
        });
    }
    events.sort_by(|a, b| a.time.total_cmp(&b.time));
    check_no_overlap(&events)?;

    Ok(TrainSchedule {
        events,
        n_pairs: params.n_pairs,
        delta_t_large: params.delta_t_large,
        delta_t_small: params.delta_t_small,
        envelope_profile: match params.protocol {
            Protocol::Stirap => EnvelopeProfile::StirapLinear,
            Protocol::Crp => EnvelopeProfile::CrpGaussian,
            Protocol::FlatPairs => EnvelopeProfile::Flat,
        },
        chirp_alpha_pump: params.alpha_pump,
        chirp_alpha_dump: params.alpha_dump,
        n0: params.n0(),
    })
}

/// Fails when two consecutive (time-sorted) pulse supports intersect.
pub fn check_no_overlap(events: &[TrainEvent]) -> Result<()> {
    for pair in events.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if !(b.time > a.time) || b.start() < a.end() {
            return Err(PapError::Overlap {
                first: a.time,
                first_half: a.pulse.half_support(),
                second: b.time,
                second_half: b.pulse.half_support(),
            });
        }
    }
    Ok(())
}

impl TrainSchedule {
    /// Schedule made of arbitrary events; overlapping pulses are allowed and
    /// are integrated together.
    pub fn custom(mut events: Vec<TrainEvent>) -> Result<Self> {
        for e in &events {
            e.pulse.check()?;
            if !e.time.is_finite() {
                return Err(PapError::InvalidSchedule("non-finite event time".into()));
            }
        }
        events.sort_by(|a, b| a.time.total_cmp(&b.time));
        Ok(TrainSchedule {
            events,
            n_pairs: 0,
            delta_t_large: 0.0,
            delta_t_small: 0.0,
            envelope_profile: EnvelopeProfile::Custom,
            chirp_alpha_pump: 0.0,
            chirp_alpha_dump: 0.0,
            n0: 0.0,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn start_time(&self) -> Option<f64> {
        self.events.iter().map(TrainEvent::start).reduce(f64::min)
    }

    pub fn end_time(&self) -> Option<f64> {
        self.events.iter().map(TrainEvent::end).reduce(f64::max)
    }

    pub fn channel_events(&self, channel: Channel) -> impl Iterator<Item = &TrainEvent> {
        self.events.iter().filter(move |e| e.pulse.channel == channel)
    }

    /// Writes `time_ps channel area phase` lines.
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# time_ps channel area phase")?;
        for e in &self.events {
            writeln!(
                out,
                "{} {} {} {}",
                e.time,
                e.pulse.channel.as_str(),
                e.pulse.area,
                e.pulse.carrier_phase
            )?;
        }
        Ok(())
    }
}
