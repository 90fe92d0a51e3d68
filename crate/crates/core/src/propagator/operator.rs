//! Block-structured RWA generator and the fixed-step RK4 integrator.
//!
//! `i·da/dt = H(t)·a` with
//!
//! * diagonal `K·ε_k − iΓ_k/2` (ε are frame energies),
//! * pump block `H[e_k, a_j] = Ω_P/2 · d_jk · e^{−i(K·δ_P·t + φ_P + m_k)}`,
//! * dump block `H[e_k, b_t] = Ω_D/2 · d_tk · e^{−iK·δ_D·t} · e^{+i(φ_D + m_k)}`,
//!
//! and the Hermitian-conjugate blocks. Only the coupling blocks are stored;
//! the generator is never assembled as a dense matrix.

use num_complex::Complex64 as C64;

use crate::error::{PapError, Result};
use crate::fields::{Channel, TrainEvent};
use crate::model::LevelSystem;
use crate::propagator::{PhaseFrame, QuantumState};
use crate::units;

const MINUS_I: C64 = C64 { re: 0.0, im: -1.0 };

/// Fixed-step integrator settings.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    /// RK4 steps across one pulse support (≥ 400).
    pub steps_per_pulse: usize,
    /// Upper bound on the step (ps), relevant for long smooth pulses.
    pub max_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            steps_per_pulse: 1000,
            max_step: 0.01,
        }
    }
}

impl IntegratorConfig {
    pub const MIN_STEPS_PER_PULSE: usize = 400;
    const MIN_STEP: f64 = 1e-12;

    pub fn check(&self) -> Result<()> {
        if self.steps_per_pulse < Self::MIN_STEPS_PER_PULSE {
            return Err(PapError::InvalidArgument(format!(
                "steps_per_pulse must be ≥ {} (got {})",
                Self::MIN_STEPS_PER_PULSE,
                self.steps_per_pulse
            )));
        }
        if !(self.max_step > 0.0) {
            return Err(PapError::InvalidArgument("max_step must be > 0".into()));
        }
        Ok(())
    }

    /// Step count for integrating `length` ps containing the given pulses.
    pub(crate) fn steps_for(&self, length: f64, events: &[&TrainEvent]) -> Result<usize> {
        let mut h = self.max_step;
        for e in events {
            h = h.min(e.pulse.support() / self.steps_per_pulse as f64);
        }
        if !(h >= Self::MIN_STEP) {
            return Err(PapError::Numerical(format!("step size {h:e} ps underflows")));
        }
        Ok(((length / h).ceil() as usize).max(1))
    }
}

/// Pulse prepared for fast coupling evaluation.
struct Prepared<'a> {
    event: &'a TrainEvent,
    /// rad/ps
    offset: f64,
    /// Per-level mask factors, already carrying the channel sign.
    mask: Option<Vec<C64>>,
}

/// Time-independent parts of the generator for one system and frame.
#[derive(Debug, Clone)]
pub struct SystemOperator {
    na: usize,
    ne: usize,
    nb: usize,
    /// `−i·K·ε − Γ/2` for every level.
    diag: Vec<C64>,
    /// `[j * ne + k]`
    pump: Vec<C64>,
    /// `[t * ne + k]`
    dump: Vec<C64>,
    frame: PhaseFrame,
}

/// Scratch buffers reused across steps.
pub(crate) struct Workspace {
    g_pump: Vec<C64>,
    g_dump: Vec<C64>,
    g_pump_mid: Vec<C64>,
    g_dump_mid: Vec<C64>,
    g_pump_end: Vec<C64>,
    g_dump_end: Vec<C64>,
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
}

impl Workspace {
    pub(crate) fn new(n: usize, ne: usize) -> Self {
        let z = |len| vec![C64::new(0.0, 0.0); len];
        Workspace {
            g_pump: z(ne),
            g_dump: z(ne),
            g_pump_mid: z(ne),
            g_dump_mid: z(ne),
            g_pump_end: z(ne),
            g_dump_end: z(ne),
            k1: z(n),
            k2: z(n),
            k3: z(n),
            k4: z(n),
            tmp: z(n),
        }
    }
}

impl SystemOperator {
    pub fn new(levels: &LevelSystem, frame: &PhaseFrame) -> Self {
        let (na, ne, nb) = levels.dims();
        let energies = levels.frame_energies(frame.pump_reference, frame.dump_reference);
        let diag = energies
            .iter()
            .zip(levels.decay_rates())
            .map(|(&e, g)| C64::new(-0.5 * g, -units::wavenumber_to_angular(e)))
            .collect();
        let pump = (0..na)
            .flat_map(|j| (0..ne).map(move |k| (j, k)))
            .map(|(j, k)| levels.pump_coupling(j, k))
            .collect();
        let dump = (0..nb)
            .flat_map(|t| (0..ne).map(move |k| (t, k)))
            .map(|(t, k)| levels.dump_coupling(t, k))
            .collect();
        SystemOperator {
            na,
            ne,
            nb,
            diag,
            pump,
            dump,
            frame: *frame,
        }
    }

    pub fn len(&self) -> usize {
        self.na + self.ne + self.nb
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn frame(&self) -> &PhaseFrame {
        &self.frame
    }

    pub(crate) fn workspace(&self) -> Workspace {
        Workspace::new(self.len(), self.ne)
    }

    /// Exact diagonal evolution over `dt ≥ 0` ps.
    pub fn free_evolve(&self, state: &mut QuantumState, dt: f64) {
        if dt == 0.0 {
            return;
        }
        for (a, g) in state.amplitudes.iter_mut().zip(&self.diag) {
            *a *= (g * dt).exp();
        }
        state.time += dt;
    }

    fn prepare<'a>(&self, event: &'a TrainEvent) -> Result<Prepared<'a>> {
        let sign = match event.pulse.channel {
            Channel::Pump => -1.0,
            Channel::Dump => 1.0,
        };
        let mask = match &event.pulse.phase_mask {
            Some(m) if m.len() != self.ne => {
                return Err(PapError::InvalidPulse(format!(
                    "phase mask has {} entries for {} excited levels",
                    m.len(),
                    self.ne
                )))
            }
            Some(m) => Some(m.iter().map(|&p| C64::from_polar(1.0, sign * p)).collect()),
            None => None,
        };
        Ok(Prepared {
            event,
            offset: units::wavenumber_to_angular(self.frame.offset(&event.pulse)),
            mask,
        })
    }

    /// Per-level coupling coefficients of both channels at time `t`.
    /// Returns which channels are active.
    fn couplings(&self, pulses: &[Prepared<'_>], t: f64, gp: &mut [C64], gd: &mut [C64]) -> (bool, bool) {
        gp.fill(C64::new(0.0, 0.0));
        gd.fill(C64::new(0.0, 0.0));
        let (mut pump_on, mut dump_on) = (false, false);
        for p in pulses {
            let dt = t - p.event.time;
            let half_rabi = 0.5 * p.event.pulse.rabi(dt);
            if half_rabi == 0.0 {
                continue;
            }
            let raman = p.event.pulse.phase_at(dt);
            let freq = p.offset * t;
            let (g, target) = match p.event.pulse.channel {
                Channel::Pump => {
                    pump_on = true;
                    (C64::from_polar(half_rabi, -(freq + raman)), &mut *gp)
                }
                Channel::Dump => {
                    dump_on = true;
                    (C64::from_polar(half_rabi, raman - freq), &mut *gd)
                }
            };
            match &p.mask {
                Some(mask) => target.iter_mut().zip(mask).for_each(|(x, m)| *x += g * m),
                None => target.iter_mut().for_each(|x| *x += g),
            }
        }
        (pump_on, dump_on)
    }

    /// `out = −i·H·a` for the given coupling coefficients.
    fn derivative(&self, gp: &[C64], gd: &[C64], active: (bool, bool), a: &[C64], out: &mut [C64]) {
        let (na, ne) = (self.na, self.ne);
        for ((o, &x), d) in out.iter_mut().zip(a).zip(&self.diag) {
            *o = d * x;
        }
        let (ga, rest) = a.split_at(na);
        let (ge, gb) = rest.split_at(ne);
        let (oa, orest) = out.split_at_mut(na);
        let (oe, ob) = orest.split_at_mut(ne);

        if active.0 {
            for (j, &aj) in ga.iter().enumerate() {
                let row = &self.pump[j * ne..(j + 1) * ne];
                let mut back = C64::new(0.0, 0.0);
                for k in 0..ne {
                    let h = gp[k] * row[k];
                    oe[k] += MINUS_I * h * aj;
                    back += h.conj() * ge[k];
                }
                oa[j] += MINUS_I * back;
            }
        }
        if active.1 {
            for (t, &at) in gb.iter().enumerate() {
                let row = &self.dump[t * ne..(t + 1) * ne];
                let mut back = C64::new(0.0, 0.0);
                for k in 0..ne {
                    let h = gd[k] * row[k];
                    oe[k] += MINUS_I * h * at;
                    back += h.conj() * ge[k];
                }
                ob[t] += MINUS_I * back;
            }
        }
    }

    /// RK4 from `state.time` to `t_end` with `steps` equal steps. The observer
    /// sees the state after every step.
    pub(crate) fn integrate(
        &self,
        state: &mut QuantumState,
        events: &[&TrainEvent],
        t_end: f64,
        steps: usize,
        ws: &mut Workspace,
        mut observer: impl FnMut(&QuantumState, usize),
    ) -> Result<()> {
        let prepared = events
            .iter()
            .map(|e| self.prepare(e))
            .collect::<Result<Vec<_>>>()?;
        let t0 = state.time;
        let h = (t_end - t0) / steps as f64;
        if !(h > 0.0) {
            return Err(PapError::Numerical(format!("empty integration window at t = {t0}")));
        }

        let n = self.len();
        let mut act = self.couplings(&prepared, t0, &mut ws.g_pump, &mut ws.g_dump);
        for step in 0..steps {
            // step grid t_i = t0 + i·h, computed without accumulation
            let t_mid = t0 + (step as f64 + 0.5) * h;
            let t_next = t0 + (step + 1) as f64 * h;
            let act_mid = self.couplings(&prepared, t_mid, &mut ws.g_pump_mid, &mut ws.g_dump_mid);
            let act_end = self.couplings(&prepared, t_next, &mut ws.g_pump_end, &mut ws.g_dump_end);
            let a = &mut state.amplitudes;

            self.derivative(&ws.g_pump, &ws.g_dump, act, a, &mut ws.k1);
            for i in 0..n {
                ws.tmp[i] = a[i] + 0.5 * h * ws.k1[i];
            }
            self.derivative(&ws.g_pump_mid, &ws.g_dump_mid, act_mid, &ws.tmp, &mut ws.k2);
            for i in 0..n {
                ws.tmp[i] = a[i] + 0.5 * h * ws.k2[i];
            }
            self.derivative(&ws.g_pump_mid, &ws.g_dump_mid, act_mid, &ws.tmp, &mut ws.k3);
            for i in 0..n {
                ws.tmp[i] = a[i] + h * ws.k3[i];
            }
            self.derivative(&ws.g_pump_end, &ws.g_dump_end, act_end, &ws.tmp, &mut ws.k4);
            for i in 0..n {
                a[i] += h / 6.0 * (ws.k1[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]);
            }
            state.time = t_next;

            std::mem::swap(&mut ws.g_pump, &mut ws.g_pump_end);
            std::mem::swap(&mut ws.g_dump, &mut ws.g_dump_end);
            act = act_end;
            observer(state, step);
        }
        state.time = t_end;
        if !state.is_finite() {
            return Err(PapError::Numerical(format!(
                "non-finite amplitude after integrating to t = {t_end} ps"
            )));
        }
        Ok(())
    }
}

/// Advances a state across one pulse with RK4.
///
/// The state must sit at the pulse's support start (within 1 fs).
pub fn propagate_pulse(
    state: &QuantumState,
    levels: &LevelSystem,
    event: &TrainEvent,
    frame: &PhaseFrame,
    config: &IntegratorConfig,
) -> Result<QuantumState> {
    config.check()?;
    if (state.time - event.start()).abs() > 1e-3 {
        return Err(PapError::InvalidArgument(format!(
            "state time {} ps is not the pulse start {} ps",
            state.time,
            event.start()
        )));
    }
    let op = SystemOperator::new(levels, frame);
    let mut ws = op.workspace();
    let mut out = state.clone().at_time(event.start());
    let steps = config.steps_for(event.pulse.support(), &[event])?;
    op.integrate(&mut out, &[event], event.end(), steps, &mut ws, |_, _| {})?;
    Ok(out)
}

/// Exact free evolution `a_k ← a_k·exp(−iK·ε_k·dt − Γ_k·dt/2)`.
pub fn free_evolve(
    state: &QuantumState,
    levels: &LevelSystem,
    frame: &PhaseFrame,
    dt: f64,
) -> Result<QuantumState> {
    if !(dt >= 0.0) {
        return Err(PapError::InvalidArgument(format!("dt must be ≥ 0 (got {dt})")));
    }
    let op = SystemOperator::new(levels, frame);
    let mut out = state.clone();
    op.free_evolve(&mut out, dt);
    Ok(out)
}
