use serde::{Deserialize, Serialize};

use crate::fields::{Channel, CombSpec, PulseSpec};
use crate::model::LevelSystem;
use crate::units;

/// Rotating frames of the pump and dump channels plus the carriers that
/// actually drive them (all cm⁻¹).
///
/// The carrier phase of a pulse is an exact function of its time:
/// `K·(carrier + detuning − reference)·t` plus the pulse's Raman-path phase.
/// For carriers on comb teeth this is the constant absolute optical phase of
/// a phase-locked train; no optical cycles are integrated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseFrame {
    pub pump_reference: f64,
    pub dump_reference: f64,
    pub pump_carrier: f64,
    pub dump_carrier: f64,
}

impl PhaseFrame {
    /// Frame and carriers both at the system's nominal carriers.
    pub fn nominal(levels: &LevelSystem) -> Self {
        PhaseFrame {
            pump_reference: levels.carriers.pump,
            dump_reference: levels.carriers.dump,
            pump_carrier: levels.carriers.pump,
            dump_carrier: levels.carriers.dump,
        }
    }

    /// Frame at the nominal carriers, driven by the locked comb teeth.
    pub fn from_comb(levels: &LevelSystem, comb: &CombSpec) -> Self {
        PhaseFrame {
            pump_reference: levels.carriers.pump,
            dump_reference: levels.carriers.dump,
            pump_carrier: comb.carrier_wavenumber(Channel::Pump),
            dump_carrier: comb.carrier_wavenumber(Channel::Dump),
        }
    }

    /// Same carriers, frame references moved by the given amounts.
    pub fn shifted_references(mut self, pump_shift: f64, dump_shift: f64) -> Self {
        self.pump_reference += pump_shift;
        self.dump_reference += dump_shift;
        self
    }

    /// Carrier minus frame reference for a pulse (cm⁻¹).
    pub fn offset(&self, pulse: &PulseSpec) -> f64 {
        let (carrier, reference) = match pulse.channel {
            Channel::Pump => (self.pump_carrier, self.pump_reference),
            Channel::Dump => (self.dump_carrier, self.dump_reference),
        };
        carrier + pulse.carrier_detuning - reference
    }

    /// Frequency part of the coupling phase at absolute time `t` (rad).
    pub fn frequency_phase(&self, pulse: &PulseSpec, t: f64) -> f64 {
        units::wavenumber_to_angular(self.offset(pulse)) * t
    }

    /// Carrier phase of a pulse evaluated at its center.
    pub fn event_phase(&self, pulse: &PulseSpec, center: f64) -> f64 {
        let raman = match pulse.channel {
            Channel::Pump => pulse.carrier_phase,
            Channel::Dump => -pulse.carrier_phase,
        };
        units::wrap_phase(self.frequency_phase(pulse, center) + raman)
    }
}
