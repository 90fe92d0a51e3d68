use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::model::LevelSystem;

/// Amplitudes over `ground_a ++ excited ++ ground_b` at a given time (ps).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QuantumState {
    pub amplitudes: Vec<C64>,
    pub time: f64,
}

impl QuantumState {
    pub fn new(amplitudes: Vec<C64>, time: f64) -> Self {
        QuantumState { amplitudes, time }
    }

    /// All population in the system's initial level.
    pub fn initial(levels: &LevelSystem, time: f64) -> Self {
        Self::basis(levels.len(), levels.initial_global(), time)
    }

    pub fn basis(len: usize, index: usize, time: f64) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); len];
        amplitudes[index] = C64::new(1.0, 0.0);
        QuantumState { amplitudes, time }
    }

    pub fn at_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Squared norm ‖a‖².
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn population_in(&self, range: std::ops::Range<usize>) -> f64 {
        self.amplitudes[range].iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// Largest `|a_k − b_k|` against another state.
    pub fn max_deviation(&self, other: &QuantumState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(mut self, factor: C64) -> Self {
        for a in &mut self.amplitudes {
            *a *= factor;
        }
        self
    }
}
