//! Delay scans, beat spectra, revival diagnostics and robustness sweeps.

mod fft;
mod map;
mod revival;
mod sweep;

pub use fft::{beat_spectrum, centered_dft, fft_delta_t, parseval_mismatch, BeatSpectrum, MIN_FFT_SAMPLES};
pub use map::{scan_2d, scan_2d_with_workers, uniform_grid, EfficiencyMap, ScanBase, MAP_CORNER};
pub use revival::{revival_diagnostics, revival_fidelity, RevivalTrace};
pub use sweep::{efficiency_spread, robustness_sweep, SweepParameter, SweepRow};
