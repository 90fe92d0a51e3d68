//! Pulses, frequency combs, pulse-train schedules and dump phase masks.

mod comb;
mod mask;
mod pulse;
mod train;

pub use comb::{comb_frequency, raman_lock_f0_dump, CombSpec, RamanLock};
pub use mask::design_dump_phase_mask;
pub use pulse::{
    integrate_rabi, make_pulse, sin2_fwhm_fraction, Channel, Envelope, PulseSpec,
    GAUSSIAN_TRUNCATION_SIGMAS,
};
pub use train::{
    build_train, check_no_overlap, EnvelopeProfile, Protocol, TrainEvent, TrainParams,
    TrainSchedule,
};
