//! Level systems: three manifolds of discrete levels joined by pump and dump
//! dipole couplings.
//!
//! Amplitude vectors are laid out as `ground_a ++ excited ++ ground_b`. The
//! initial state lives in `ground_a`, the intermediate wave packet in
//! `excited`, and the transfer target in `ground_b`.

use std::fmt;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{PapError, Result};
use crate::units;

/// Current version of the level-system file schema.
pub const LEVEL_FILE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Level {
    pub label: String,
    /// cm⁻¹
    pub energy: f64,
    /// Population decay rate Γ in ps⁻¹ (population ∝ e^{−Γt}).
    #[serde(default)]
    pub decay_rate: f64,
}

impl Level {
    pub fn new(label: impl Into<String>, energy: f64, decay_rate: f64) -> Self {
        Level {
            label: label.into(),
            energy,
            decay_rate,
        }
    }
}

/// Real dense matrix stored row-major as nested rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CouplingMatrix(pub Vec<Vec<f64>>);

impl CouplingMatrix {
    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        CouplingMatrix(vec![vec![value; cols]; rows])
    }

    pub fn rows(&self) -> usize {
        self.0.len()
    }

    /// Column count of the first row (0 when empty).
    pub fn cols(&self) -> usize {
        self.0.first().map_or(0, Vec::len)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[row][col]
    }

    fn has_shape(&self, rows: usize, cols: usize) -> bool {
        self.0.len() == rows && self.0.iter().all(|r| r.len() == cols)
    }
}

/// Nominal carrier frequencies (cm⁻¹) of the two channels.
///
/// Level energies are interpreted relative to these: the pump detuning of
/// excited level `k` is `E_k − E_initial − pump`, and the dump carrier couples
/// `ground_b` to the excited manifold with frequency `dump`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Carriers {
    pub pump: f64,
    pub dump: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSystem {
    pub ground_a: Vec<Level>,
    pub excited: Vec<Level>,
    pub ground_b: Vec<Level>,
    /// `ground_a × excited`, dimensionless.
    pub pump_dipoles: CouplingMatrix,
    /// `ground_b × excited`, dimensionless.
    pub dump_dipoles: CouplingMatrix,
    /// Optional phases (rad) on the pump couplings, same shape as `pump_dipoles`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump_dipole_phases: Option<CouplingMatrix>,
    /// Optional phases (rad) on the dump couplings, same shape as `dump_dipoles`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump_dipole_phases: Option<CouplingMatrix>,
    pub initial_index: usize,
    pub target_index: usize,
    pub carriers: Carriers,
}

/// One broken invariant reported by [`validate_system`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyManifold(&'static str),
    NonFiniteEnergy(String),
    NegativeDecay(String),
    DipoleShape(&'static str),
    NonFiniteDipole(&'static str),
    InitialIndex(usize),
    TargetIndex(usize),
    NoPumpCoupling,
    NoDumpCoupling,
    NonFiniteCarrier,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyManifold(m) => write!(f, "manifold {m} is empty"),
            Violation::NonFiniteEnergy(l) => write!(f, "level {l} has non-finite energy"),
            Violation::NegativeDecay(l) => write!(f, "level {l} has negative decay rate"),
            Violation::DipoleShape(m) => write!(f, "{m} matrix shape does not match manifolds"),
            Violation::NonFiniteDipole(m) => write!(f, "{m} matrix has non-finite entries"),
            Violation::InitialIndex(i) => write!(f, "initial_index {i} out of range"),
            Violation::TargetIndex(i) => write!(f, "target_index {i} out of range"),
            Violation::NoPumpCoupling => write!(f, "no pump coupling"),
            Violation::NoDumpCoupling => write!(f, "no dump coupling"),
            Violation::NonFiniteCarrier => write!(f, "non-finite carrier frequency"),
        }
    }
}

/// Checks every structural invariant; an empty list means the system is usable.
pub fn validate_system(levels: &LevelSystem) -> Vec<Violation> {
    let mut out = Vec::new();
    for (name, manifold) in [
        ("ground_a", &levels.ground_a),
        ("excited", &levels.excited),
        ("ground_b", &levels.ground_b),
    ] {
        if manifold.is_empty() {
            out.push(Violation::EmptyManifold(name));
        }
        for level in manifold {
            if !level.energy.is_finite() {
                out.push(Violation::NonFiniteEnergy(level.label.clone()));
            }
            if !(level.decay_rate >= 0.0) || !level.decay_rate.is_finite() {
                out.push(Violation::NegativeDecay(level.label.clone()));
            }
        }
    }

    let (na, ne, nb) = levels.dims();
    let matrices = [
        ("pump_dipoles", Some(&levels.pump_dipoles), na),
        ("dump_dipoles", Some(&levels.dump_dipoles), nb),
        ("pump_dipole_phases", levels.pump_dipole_phases.as_ref(), na),
        ("dump_dipole_phases", levels.dump_dipole_phases.as_ref(), nb),
    ];
    let mut shapes_ok = true;
    for (name, matrix, rows) in matrices {
        let Some(matrix) = matrix else { continue };
        if !matrix.has_shape(rows, ne) {
            out.push(Violation::DipoleShape(name));
            shapes_ok = false;
        } else if matrix.0.iter().flatten().any(|v| !v.is_finite()) {
            out.push(Violation::NonFiniteDipole(name));
        }
    }

    if levels.initial_index >= na {
        out.push(Violation::InitialIndex(levels.initial_index));
    }
    if levels.target_index >= nb {
        out.push(Violation::TargetIndex(levels.target_index));
    }
    if shapes_ok {
        if !levels.pump_dipoles.0.iter().flatten().any(|&d| d != 0.0) {
            out.push(Violation::NoPumpCoupling);
        }
        if !levels.dump_dipoles.0.iter().flatten().any(|&d| d != 0.0) {
            out.push(Violation::NoDumpCoupling);
        }
    }
    if !levels.carriers.pump.is_finite() || !levels.carriers.dump.is_finite() {
        out.push(Violation::NonFiniteCarrier);
    }
    out
}

impl LevelSystem {
    /// Manifold sizes `(ground_a, excited, ground_b)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.ground_a.len(), self.excited.len(), self.ground_b.len())
    }

    pub fn len(&self) -> usize {
        self.ground_a.len() + self.excited.len() + self.ground_b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Returns the system or an error listing every violation.
    pub fn validated(self) -> Result<Self> {
        let violations = validate_system(&self);
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(PapError::InvalidSystem(
                violations.iter().map(ToString::to_string).collect(),
            ))
        }
    }

    /// Global index of the initial state.
    pub fn initial_global(&self) -> usize {
        self.initial_index
    }

    /// Global index of the target state.
    pub fn target_global(&self) -> usize {
        self.ground_a.len() + self.excited.len() + self.target_index
    }

    pub fn excited_range(&self) -> std::ops::Range<usize> {
        let start = self.ground_a.len();
        start..start + self.excited.len()
    }

    pub fn ground_b_range(&self) -> std::ops::Range<usize> {
        let start = self.ground_a.len() + self.excited.len();
        start..start + self.ground_b.len()
    }

    /// All levels in amplitude order.
    pub fn levels(&self) -> impl Iterator<Item = &Level> {
        self.ground_a
            .iter()
            .chain(self.excited.iter())
            .chain(self.ground_b.iter())
    }

    pub fn labels(&self) -> Vec<String> {
        self.levels().map(|l| l.label.clone()).collect()
    }

    pub fn initial_energy(&self) -> f64 {
        self.ground_a[self.initial_index].energy
    }

    pub fn target_energy(&self) -> f64 {
        self.ground_b[self.target_index].energy
    }

    /// Complex pump coupling `d·e^{iφ}` between `ground_a[row]` and `excited[col]`.
    pub fn pump_coupling(&self, row: usize, col: usize) -> C64 {
        let phase = self
            .pump_dipole_phases
            .as_ref()
            .map_or(0.0, |p| p.get(row, col));
        C64::from_polar(self.pump_dipoles.get(row, col), phase)
    }

    /// Complex dump coupling `d·e^{iφ}` between `ground_b[row]` and `excited[col]`.
    pub fn dump_coupling(&self, row: usize, col: usize) -> C64 {
        let phase = self
            .dump_dipole_phases
            .as_ref()
            .map_or(0.0, |p| p.get(row, col));
        C64::from_polar(self.dump_dipoles.get(row, col), phase)
    }

    /// Dump couplings of the target level to every excited level.
    pub fn target_dump_couplings(&self) -> Vec<C64> {
        (0..self.excited.len())
            .map(|k| self.dump_coupling(self.target_index, k))
            .collect()
    }

    /// Pump couplings of the initial level to every excited level.
    pub fn initial_pump_couplings(&self) -> Vec<C64> {
        (0..self.excited.len())
            .map(|k| self.pump_coupling(self.initial_index, k))
            .collect()
    }

    /// Copy with every decay rate set to zero.
    pub fn without_decay(&self) -> Self {
        let mut out = self.clone();
        for level in out
            .ground_a
            .iter_mut()
            .chain(out.excited.iter_mut())
            .chain(out.ground_b.iter_mut())
        {
            level.decay_rate = 0.0;
        }
        out
    }

    /// Copy with the excited manifold's decay set from a lifetime in ns.
    pub fn with_excited_lifetime_ns(&self, lifetime_ns: f64) -> Self {
        let mut out = self.clone();
        let rate = units::decay_rate_from_lifetime_ns(lifetime_ns);
        for level in &mut out.excited {
            level.decay_rate = rate;
        }
        out
    }

    /// Level energies measured in the frame rotating with the given channel
    /// reference frequencies (cm⁻¹), with the initial level at zero.
    pub fn frame_energies(&self, pump_reference: f64, dump_reference: f64) -> Vec<f64> {
        let e0 = self.initial_energy();
        let a = self.ground_a.iter().map(|l| l.energy - e0);
        let e = self
            .excited
            .iter()
            .map(|l| l.energy - e0 - pump_reference);
        let b = self
            .ground_b
            .iter()
            .map(|l| l.energy - e0 - pump_reference + dump_reference);
        a.chain(e).chain(b).collect()
    }

    pub fn decay_rates(&self) -> Vec<f64> {
        self.levels().map(|l| l.decay_rate).collect()
    }
}

/// Two-photon shift `E(initial) − E(target)` in cm⁻¹; positive when the target
/// lies below the initial level.
pub fn raman_shift(levels: &LevelSystem) -> f64 {
    levels.initial_energy() - levels.target_energy()
}

/// Resonant-frame Λ system `|1⟩, |2⟩, |3⟩` with unit dipoles.
///
/// Energies are already rotating-frame values with both nominal carriers at
/// zero: `(0, pump_detuning, pump_detuning − dump_detuning)`. The decay rate
/// (ps⁻¹) applies to the intermediate level.
pub fn build_three_level(pump_detuning: f64, dump_detuning: f64, decay_rate: f64) -> LevelSystem {
    LevelSystem {
        ground_a: vec![Level::new("1", 0.0, 0.0)],
        excited: vec![Level::new("2", pump_detuning, decay_rate)],
        ground_b: vec![Level::new("3", pump_detuning - dump_detuning, 0.0)],
        pump_dipoles: CouplingMatrix(vec![vec![1.0]]),
        dump_dipoles: CouplingMatrix(vec![vec![1.0]]),
        pump_dipole_phases: None,
        dump_dipole_phases: None,
        initial_index: 0,
        target_index: 0,
        carriers: Carriers { pump: 0.0, dump: 0.0 },
    }
}

/// Coupling-strength rule over intermediate-level index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DipoleProfile {
    Uniform,
    Gaussian { center: f64, width: f64 },
    Explicit { values: Vec<f64> },
}

impl DipoleProfile {
    fn values(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            DipoleProfile::Uniform => Ok(vec![1.0; n]),
            DipoleProfile::Gaussian { center, width } => {
                if !(*width > 0.0) {
                    return Err(PapError::InvalidArgument(
                        "gaussian dipole profile needs width > 0".into(),
                    ));
                }
                Ok((0..n)
                    .map(|k| {
                        let x = (k as f64 - center) / width;
                        (-0.5 * x * x).exp()
                    })
                    .collect())
            }
            DipoleProfile::Explicit { values } => {
                if values.len() != n {
                    return Err(PapError::InvalidArgument(format!(
                        "explicit dipole profile has {} values for {n} levels",
                        values.len()
                    )));
                }
                Ok(values.clone())
            }
        }
    }
}

fn default_neighbor_coupling() -> f64 {
    1.0
}

/// Recipe for a molecule-like system: one band of intermediate levels and two
/// ground manifolds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticMoleculeSpec {
    pub n_intermediate: usize,
    /// Energy of the lowest intermediate level (cm⁻¹).
    pub center_energy: f64,
    /// Successive gaps (cm⁻¹); cycled when shorter than `n_intermediate − 1`.
    pub spacing_pattern: Vec<f64>,
    pub dipole_profile: DipoleProfile,
    /// Separate profile for the dump couplings (defaults to `dipole_profile`).
    #[serde(default)]
    pub dump_profile: Option<DipoleProfile>,
    /// Intermediate-manifold lifetime in ns; `None` means no decay.
    #[serde(default)]
    pub decay_lifetime: Option<f64>,
    pub ground_a_energies: Vec<f64>,
    pub ground_b_energies: Vec<f64>,
    #[serde(default)]
    pub initial_index: usize,
    #[serde(default)]
    pub target_index: usize,
    /// Excited-band energy the pump carrier is tuned to; defaults to the
    /// midpoint of the band.
    #[serde(default)]
    pub carrier_energy: Option<f64>,
    /// Scale applied to couplings of ground levels other than initial/target.
    #[serde(default = "default_neighbor_coupling")]
    pub neighbor_coupling: f64,
}

impl SyntheticMoleculeSpec {
    /// Minimal spec: `n` intermediate levels with a constant gap, uniform
    /// dipoles, single initial and target levels.
    pub fn equally_spaced(
        n_intermediate: usize,
        center_energy: f64,
        spacing: f64,
        initial_energy: f64,
        target_energy: f64,
    ) -> Self {
        SyntheticMoleculeSpec {
            n_intermediate,
            center_energy,
            spacing_pattern: vec![spacing],
            dipole_profile: DipoleProfile::Uniform,
            dump_profile: None,
            decay_lifetime: None,
            ground_a_energies: vec![initial_energy],
            ground_b_energies: vec![target_energy],
            initial_index: 0,
            target_index: 0,
            carrier_energy: None,
            neighbor_coupling: 1.0,
        }
    }

    /// Intermediate energies: `center_energy` plus the cumulative gaps.
    pub fn intermediate_energies(&self) -> Vec<f64> {
        let mut energies = Vec::with_capacity(self.n_intermediate);
        let mut e = self.center_energy;
        for k in 0..self.n_intermediate {
            if k > 0 {
                e += self.spacing_pattern[(k - 1) % self.spacing_pattern.len()];
            }
            energies.push(e);
        }
        energies
    }
}

/// Builds a level system from a [`SyntheticMoleculeSpec`].
pub fn build_synthetic_molecule(spec: &SyntheticMoleculeSpec) -> Result<LevelSystem> {
    if spec.n_intermediate == 0 {
        return Err(PapError::InvalidArgument("n_intermediate must be ≥ 1".into()));
    }
    if spec.n_intermediate > 1 && spec.spacing_pattern.is_empty() {
        return Err(PapError::InvalidArgument("spacing_pattern is empty".into()));
    }
    if let Some(bad) = spec.spacing_pattern.iter().find(|&&g| !(g > 0.0) || !g.is_finite()) {
        return Err(PapError::InvalidArgument(format!(
            "spacing_pattern entries must be > 0 (got {bad})"
        )));
    }
    if spec.ground_a_energies.is_empty() || spec.ground_b_energies.is_empty() {
        return Err(PapError::InvalidArgument("ground manifolds must be non-empty".into()));
    }
    if spec.initial_index >= spec.ground_a_energies.len()
        || spec.target_index >= spec.ground_b_energies.len()
    {
        return Err(PapError::InvalidArgument("initial/target index out of range".into()));
    }
    let decay = match spec.decay_lifetime {
        Some(ns) if ns > 0.0 => units::decay_rate_from_lifetime_ns(ns),
        Some(ns) => {
            return Err(PapError::InvalidArgument(format!(
                "decay_lifetime must be > 0 ns (got {ns})"
            )))
        }
        None => 0.0,
    };

    let energies = spec.intermediate_energies();
    let excited = energies
        .iter()
        .enumerate()
        .map(|(k, &e)| Level::new(format!("e{k}"), e, decay))
        .collect::<Vec<_>>();
    let ground_a = spec
        .ground_a_energies
        .iter()
        .enumerate()
        .map(|(j, &e)| Level::new(format!("a{j}"), e, 0.0))
        .collect::<Vec<_>>();
    let ground_b = spec
        .ground_b_energies
        .iter()
        .enumerate()
        .map(|(j, &e)| Level::new(format!("b{j}"), e, 0.0))
        .collect::<Vec<_>>();

    let pump_profile = spec.dipole_profile.values(spec.n_intermediate)?;
    let dump_profile = spec
        .dump_profile
        .as_ref()
        .unwrap_or(&spec.dipole_profile)
        .values(spec.n_intermediate)?;
    let rows = |profile: &[f64], n: usize, special: usize| {
        CouplingMatrix(
            (0..n)
                .map(|j| {
                    let scale = if j == special { 1.0 } else { spec.neighbor_coupling };
                    profile.iter().map(|d| d * scale).collect()
                })
                .collect(),
        )
    };

    let carrier_energy = spec
        .carrier_energy
        .unwrap_or_else(|| 0.5 * (energies[0] + energies[energies.len() - 1]));
    let e_init = spec.ground_a_energies[spec.initial_index];
    let e_target = spec.ground_b_energies[spec.target_index];

    LevelSystem {
        pump_dipoles: rows(&pump_profile, ground_a.len(), spec.initial_index),
        dump_dipoles: rows(&dump_profile, ground_b.len(), spec.target_index),
        ground_a,
        excited,
        ground_b,
        pump_dipole_phases: None,
        dump_dipole_phases: None,
        initial_index: spec.initial_index,
        target_index: spec.target_index,
        carriers: Carriers {
            pump: carrier_energy - e_init,
            dump: carrier_energy - e_target,
        },
    }
    .validated()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelFile {
    schema_version: u32,
    system: LevelSystem,
}

/// Serialises a level system to the versioned TOML schema.
pub fn level_system_to_toml(levels: &LevelSystem) -> Result<String> {
    let doc = LevelFile {
        schema_version: LEVEL_FILE_VERSION,
        system: levels.clone(),
    };
    let body = toml::to_string(&doc).map_err(|e| PapError::Config(e.to_string()))?;
    Ok(format!("# pap level system\n{body}"))
}

/// Parses and validates a level system document.
pub fn level_system_from_toml(text: &str) -> Result<LevelSystem> {
    let doc: LevelFile = toml::from_str(text).map_err(|e| PapError::Config(e.to_string()))?;
    if doc.schema_version != LEVEL_FILE_VERSION {
        return Err(PapError::Config(format!(
            "unsupported level-system schema_version {} (expected {LEVEL_FILE_VERSION})",
            doc.schema_version
        )));
    }
    doc.system.validated()
}

pub fn load_level_system(path: &Path) -> Result<LevelSystem> {
    let text = std::fs::read_to_string(path).map_err(|e| PapError::io(path, e))?;
    level_system_from_toml(&text).map_err(|e| match e {
        PapError::Config(msg) => PapError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn save_level_system(levels: &LevelSystem, path: &Path) -> Result<()> {
    let text = level_system_to_toml(levels)?;
    std::fs::write(path, text).map_err(|e| PapError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_level_resonant() {
        let s = build_three_level(0.0, 0.0, 0.0);
        assert!(validate_system(&s).is_empty());
        assert_eq!(s.dims(), (1, 1, 1));
        assert_eq!(s.pump_dipoles.get(0, 0), 1.0);
        assert_eq!(s.dump_dipoles.get(0, 0), 1.0);
        assert!(s.levels().all(|l| l.energy == 0.0 && l.decay_rate == 0.0));
    }

    #[test]
    fn three_level_with_decay() {
        let s = build_three_level(0.0, 0.0, 1.0 / 15000.0);
        assert_eq!(s.excited[0].decay_rate, 1.0 / 15000.0);
        assert!((1.0 / s.excited[0].decay_rate - 15_000.0).abs() < 1e-9);
        assert_eq!(s.ground_a[0].decay_rate, 0.0);
    }

    #[test]
    fn three_level_detuned() {
        let s = build_three_level(5.0, 0.0, 0.0);
        assert!(validate_system(&s).is_empty());
        assert_eq!(s.excited[0].energy, 5.0);
        assert_eq!(s.frame_energies(0.0, 0.0), vec![0.0, 5.0, 5.0]);
        assert_eq!(raman_shift(&s), -5.0);
    }

    #[test]
    fn raman_shift_values() {
        let mut s = build_three_level(0.0, 0.0, 0.0);
        s.ground_a[0].energy = -157.0;
        s.ground_b[0].energy = -2490.0;
        assert!((raman_shift(&s) - 2333.0).abs() < 1e-12);

        let s = build_three_level(0.0, 0.0, 0.0);
        assert_eq!(raman_shift(&s), 0.0);

        let s = build_three_level(0.0, 7.0, 0.0);
        assert_eq!(raman_shift(&s), 7.0 - 0.0);
    }

    #[test]
    fn raman_shift_antisymmetric() {
        let mut s = build_three_level(0.0, 0.0, 0.0);
        s.ground_a[0].energy = -157.0;
        s.ground_b[0].energy = -2490.0;
        let mut swapped = s.clone();
        std::mem::swap(&mut swapped.ground_a, &mut swapped.ground_b);
        std::mem::swap(&mut swapped.pump_dipoles, &mut swapped.dump_dipoles);
        assert_eq!(raman_shift(&swapped), -raman_shift(&s));
    }

    #[test]
    fn validation_reports_violations() {
        let mut s = build_three_level(0.0, 0.0, 0.0);
        s.dump_dipoles = CouplingMatrix(vec![vec![0.0]]);
        let v = validate_system(&s);
        assert_eq!(v, vec![Violation::NoDumpCoupling]);
        assert_eq!(v[0].to_string(), "no dump coupling");

        let mut s = build_three_level(0.0, 0.0, 0.0);
        s.excited[0].decay_rate = -1.0;
        assert!(matches!(validate_system(&s)[..], [Violation::NegativeDecay(_)]));

        let mut s = build_three_level(0.0, 0.0, 0.0);
        s.pump_dipoles = CouplingMatrix(vec![vec![1.0, 1.0]]);
        s.target_index = 3;
        let v = validate_system(&s);
        assert!(v.contains(&Violation::DipoleShape("pump_dipoles")));
        assert!(v.contains(&Violation::TargetIndex(3)));

        let mut s = build_three_level(0.0, 0.0, 0.0);
        s.excited.clear();
        assert!(validate_system(&s).contains(&Violation::EmptyManifold("excited")));
    }

    #[test]
    fn synthetic_two_level_beat_system() {
        let spec = SyntheticMoleculeSpec::equally_spaced(2, 11145.0, 45.0, -157.0, -2490.0);
        let s = build_synthetic_molecule(&spec).unwrap();
        assert_eq!(s.excited.len(), 2);
        assert_eq!(s.excited[0].energy, 11145.0);
        assert_eq!(s.excited[1].energy, 11190.0);
        assert!((s.carriers.pump - (11167.5 + 157.0)).abs() < 1e-9);
        assert!((s.carriers.dump - s.carriers.pump - raman_shift(&s)).abs() < 1e-9);
        let fe = s.frame_energies(s.carriers.pump, s.carriers.dump);
        assert!((fe[1] + 22.5).abs() < 1e-9 && (fe[2] - 22.5).abs() < 1e-9);
        assert!(fe[3].abs() < 1e-9);
    }

    #[test]
    fn synthetic_single_level_is_three_level_topology() {
        let spec = SyntheticMoleculeSpec::equally_spaced(1, 11200.0, 40.0, -157.0, -2490.0);
        let s = build_synthetic_molecule(&spec).unwrap();
        assert_eq!(s.dims(), (1, 1, 1));
        let fe = s.frame_energies(s.carriers.pump, s.carriers.dump);
        assert!(fe.iter().all(|e| e.abs() < 1e-9));
    }

    #[test]
    fn synthetic_spacing_and_decay() {
        let mut spec = SyntheticMoleculeSpec::equally_spaced(10, 11000.0, 40.0, -157.0, -2490.0);
        spec.spacing_pattern = vec![40.0, 37.5, 41.25];
        spec.decay_lifetime = Some(15.0);
        let s = build_synthetic_molecule(&spec).unwrap();
        for k in 1..10 {
            let gap = s.excited[k].energy - s.excited[k - 1].energy;
            assert_eq!(gap, spec.spacing_pattern[(k - 1) % 3]);
        }
        assert!(s.excited.iter().all(|l| l.decay_rate == 1.0 / 15000.0));
    }

    #[test]
    fn synthetic_rejects_bad_spacing() {
        let mut spec = SyntheticMoleculeSpec::equally_spaced(3, 11000.0, 40.0, -157.0, -2490.0);
        spec.spacing_pattern = vec![40.0, 0.0];
        assert!(build_synthetic_molecule(&spec).is_err());
        spec.spacing_pattern = vec![-3.0];
        assert!(build_synthetic_molecule(&spec).is_err());
        spec.spacing_pattern = vec![40.0];
        spec.n_intermediate = 0;
        assert!(build_synthetic_molecule(&spec).is_err());
    }

    #[test]
    fn gaussian_profile_and_neighbors() {
        let mut spec = SyntheticMoleculeSpec::equally_spaced(5, 11000.0, 40.0, -157.0, -2490.0);
        spec.dipole_profile = DipoleProfile::Gaussian { center: 2.0, width: 1.0 };
        spec.ground_a_energies = vec![-190.0, -157.0, -125.0];
        spec.initial_index = 1;
        spec.neighbor_coupling = 0.5;
        let s = build_synthetic_molecule(&spec).unwrap();
        assert_eq!(s.pump_dipoles.get(1, 2), 1.0);
        assert!((s.pump_dipoles.get(1, 0) - (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(s.pump_dipoles.get(0, 2), 0.5);
        assert_eq!(s.initial_energy(), -157.0);
    }

    #[test]
    fn toml_round_trip() {
        let mut spec = SyntheticMoleculeSpec::equally_spaced(3, 11000.0, 40.0, -157.0, -2490.0);
        spec.decay_lifetime = Some(15.0);
        let mut s = build_synthetic_molecule(&spec).unwrap();
        s.dump_dipole_phases = Some(CouplingMatrix(vec![vec![0.0, 0.5, -0.25]]));
        let text = level_system_to_toml(&s).unwrap();
        let back = level_system_from_toml(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn toml_rejects_unknown_keys_and_versions() {
        let s = build_three_level(0.0, 0.0, 0.0);
        let text = level_system_to_toml(&s).unwrap();
        let bumped = text.replace("schema_version = 1", "schema_version = 9");
        assert!(level_system_from_toml(&bumped).is_err());
        let extra = format!("bogus = 3\n{text}");
        assert!(level_system_from_toml(&extra).is_err());
    }
}
