use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use pap_core::config::{RunConfig, WORKERS_ENV};
use pap_core::export::{header_line, write_file, write_json};
use pap_core::fields::{Channel, Protocol, TrainEvent};
use pap_core::propagator::{propagate_pulse, PhaseFrame, QuantumState};
use pap_core::protocols::{plan_train, run_pair_train, RunResult, TrainSetup};
use pap_core::scan::{
    efficiency_spread, fft_delta_t, revival_diagnostics, robustness_sweep, scan_2d, EfficiencyMap,
    ScanBase,
};
use pap_core::{PapError, Result};

#[derive(Parser)]
#[command(name = "pap", version, about = "Piecewise adiabatic population transfer with pulse trains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long, short)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel scans and sweeps.
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Piecewise STIRAP train.
    Stirap(Common),
    /// Piecewise chirped Raman passage train.
    Crp(Common),
    /// Pair train with the config's protocol (flat pairs by default).
    Pairs(Common),
    /// (ΔT, δT) efficiency map.
    Scan(Common),
    /// Revival fidelity of the pump-excited wave packet.
    Revivals(Common),
    /// Robustness sweep over one train parameter.
    Sweep(Common),
    /// Fourier analysis of a δT column of a saved map.
    AnalyzeFft {
        #[command(flatten)]
        common: Common,
        /// Map CSV; overrides `[fft].map`.
        #[arg(long)]
        map: Option<PathBuf>,
    },
}

struct Context {
    config: RunConfig,
    base_dir: PathBuf,
    out_dir: PathBuf,
    fingerprint: String,
}

impl Context {
    fn load(common: &Common) -> Result<Self> {
        let mut config = RunConfig::load(&common.config)?;
        if let Some(seed) = common.seed {
            config.seed = seed;
        }
        if let Some(n) = common.workers {
            if n == 0 {
                return Err(PapError::Config("worker count must be ≥ 1".into()));
            }
            // a global pool can only be installed once; later calls are no-ops
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        let base_dir = common
            .config
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default();
        let out_dir = common.out.clone().unwrap_or_else(|| config.output.dir.clone());
        let fingerprint = config.fingerprint();
        Ok(Context {
            config,
            base_dir,
            out_dir,
            fingerprint,
        })
    }

    fn header(&self) -> Vec<String> {
        vec![header_line(&self.fingerprint), format!("seed={}", self.config.seed)]
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

fn run_protocol(common: &Common, forced: Option<Protocol>, name: &str) -> Result<String> {
    let ctx = Context::load(common)?;
    let levels = ctx.config.level_system(&ctx.base_dir)?;
    let protocol = forced
        .or(ctx.config.protocol)
        .unwrap_or(Protocol::FlatPairs);
    let setup = ctx.config.train()?;
    let plan = plan_train(&levels, protocol, setup, &ctx.config.integrator)?;
    let result = run_pair_train(
        &levels,
        &plan.schedule,
        &plan.frame,
        &ctx.config.integrator,
        ctx.config.output.trajectory,
    )?;

    let header = ctx.header();
    write_file(&ctx.path("trajectory.csv"), |out| {
        for h in &header {
            std::io::Write::write_fmt(out, format_args!("# {h}\n"))?;
        }
        result
            .trajectory
            .write_csv(&mut *out, &levels.labels())
            .map_err(std::io::Error::other)
    })?;
    write_file(&ctx.path("schedule.txt"), |out| {
        for h in &header {
            std::io::Write::write_fmt(out, format_args!("# {h}\n"))?;
        }
        plan.schedule.write_text(out)
    })?;
    let mut summary = serde_json::to_value(&result).map_err(|e| PapError::Numerical(e.to_string()))?;
    summary["protocol"] = json!(protocol);
    summary["dump_mask"] = json!(plan.dump_mask);
    write_json(&ctx.path("summary.json"), &ctx.fingerprint, &summary)?;
    Ok(format!("{name} {}", summary_fields(&result)))
}

fn summary_fields(r: &RunResult) -> String {
    format!(
        "final_target={:.6} final_initial={:.6} leaked_ground_a={:.6} leaked_ground_b={:.6} residual_excited={:.6} decayed_loss={:.6} max_transient_excited={:.6}",
        r.final_target,
        r.final_initial,
        r.leaked_ground_a,
        r.leaked_ground_b,
        r.residual_excited,
        r.decayed_loss,
        r.max_transient_excited
    )
}

fn run_scan(common: &Common) -> Result<String> {
    let ctx = Context::load(common)?;
    let levels = ctx.config.level_system(&ctx.base_dir)?;
    let section = ctx
        .config
        .scan
        .as_ref()
        .ok_or_else(|| PapError::Config("missing [scan] section".into()))?;
    let base = ScanBase {
        protocol: ctx.config.protocol.unwrap_or(Protocol::FlatPairs),
        setup: ctx.config.train()?.clone(),
        integrator: ctx.config.integrator,
    };
    let map = scan_2d(
        &levels,
        &base,
        &section.delta_t_large.values(),
        &section.delta_t_small.values(),
        &ctx.fingerprint,
    )?;
    let header = ctx.header();
    write_file(&ctx.path("map.csv"), |out| map.write_csv(out, &header))?;

    let cells = map.efficiency.iter().flatten();
    let missing = cells.clone().filter(|v| v.is_nan()).count();
    let best = cells.copied().filter(|v| !v.is_nan()).fold(f64::NAN, f64::max);
    Ok(format!(
        "scan rows={} cols={} best_efficiency={best:.6} missing_cells={missing}",
        map.delta_t_large.len(),
        map.delta_t_small.len()
    ))
}

fn run_revivals(common: &Common) -> Result<String> {
    let ctx = Context::load(common)?;
    let levels = ctx.config.level_system(&ctx.base_dir)?;
    let section = ctx
        .config
        .revivals
        .as_ref()
        .ok_or_else(|| PapError::Config("missing [revivals] section".into()))?;
    let setup = ctx
        .config
        .train
        .clone()
        .unwrap_or_else(|| TrainSetup::new(1, 1.0, 0.0, 0.0));
    let pulse = pap_core::fields::make_pulse(
        setup.shape,
        setup.fwhm,
        1e-3,
        setup.pump_detuning,
        0.0,
        Channel::Pump,
    )?;
    let event = TrainEvent { time: 0.0, pulse };
    let frame = PhaseFrame::nominal(&levels);
    let start = QuantumState::initial(&levels, event.start());
    let packet = propagate_pulse(&start, &levels, &event, &frame, &ctx.config.integrator)?;
    let excited = &packet.amplitudes[levels.excited_range()];
    let energies: Vec<f64> = levels.excited.iter().map(|l| l.energy).collect();
    let trace = revival_diagnostics(excited, &energies, section.t_max, section.dt, section.threshold)?;

    let header = ctx.header();
    write_file(&ctx.path("revivals.csv"), |out| {
        for h in &header {
            std::io::Write::write_fmt(out, format_args!("# {h}\n"))?;
        }
        let mut w = csv_writer(out);
        w.write_record(["time_ps", "fidelity"])?;
        for (t, f) in trace.times.iter().zip(&trace.fidelity) {
            w.write_record([t.to_string(), f.to_string()])?;
        }
        w.flush()
    })?;
    write_json(
        &ctx.path("revival_peaks.json"),
        &ctx.fingerprint,
        &json!(trace
            .revivals
            .iter()
            .map(|(t, f)| json!({"time_ps": t, "fidelity": f}))
            .collect::<Vec<_>>()),
    )?;
    let best = trace.revivals.first().copied().unwrap_or((f64::NAN, f64::NAN));
    Ok(format!(
        "revivals peaks={} best_time_ps={:.6} best_fidelity={:.6}",
        trace.revivals.len(),
        best.0,
        best.1
    ))
}

fn csv_writer<W: std::io::Write>(out: W) -> csv::Writer<W> {
    csv::Writer::from_writer(out)
}

fn run_sweep(common: &Common) -> Result<String> {
    let ctx = Context::load(common)?;
    let levels = ctx.config.level_system(&ctx.base_dir)?;
    let section = ctx
        .config
        .sweep
        .as_ref()
        .ok_or_else(|| PapError::Config("missing [sweep] section".into()))?;
    let protocol = ctx.config.protocol.unwrap_or(Protocol::Stirap);
    let rows = robustness_sweep(
        &levels,
        protocol,
        ctx.config.train()?,
        &ctx.config.integrator,
        section.parameter,
        &section.values,
    )?;
    let header = ctx.header();
    write_file(&ctx.path("sweep.csv"), |out| {
        for h in &header {
            std::io::Write::write_fmt(out, format_args!("# {h}\n"))?;
        }
        let mut w = csv_writer(out);
        w.write_record(["value", "final_target", "residual_excited", "decayed_loss", "error"])?;
        for row in &rows {
            match &row.result {
                Ok(r) => w.write_record([
                    row.value.to_string(),
                    r.final_target.to_string(),
                    r.residual_excited.to_string(),
                    r.decayed_loss.to_string(),
                    String::new(),
                ])?,
                Err(e) => w.write_record([
                    row.value.to_string(),
                    "NaN".into(),
                    "NaN".into(),
                    "NaN".into(),
                    e.replace(',', ";"),
                ])?,
            }
        }
        w.flush()
    })?;
    let failed = rows.iter().filter(|r| r.result.is_err()).count();
    Ok(format!(
        "sweep rows={} spread={:.6} failed={failed}",
        rows.len(),
        efficiency_spread(&rows)
    ))
}

fn run_fft(common: &Common, map_override: Option<&Path>) -> Result<String> {
    let ctx = Context::load(common)?;
    let section = ctx.config.fft.clone();
    let map_path = match (map_override, &section) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(s)) => ctx.base_dir.join(&s.map),
        (None, None) => return Err(PapError::Config("missing [fft] section or --map".into())),
    };
    let index = section.as_ref().map_or(0, |s| s.delta_t_large_index);
    let hann = section.as_ref().is_some_and(|s| s.hann_window);
    let file = std::fs::File::open(&map_path).map_err(|e| PapError::io(&map_path, e))?;
    let map = EfficiencyMap::read_csv(file, &map_path)?;
    let spectrum = fft_delta_t(&map, index, hann)?;
    let header = ctx.header();
    write_file(&ctx.path("spectrum.csv"), |out| spectrum.write_csv(out, &header))?;
    let (freq, mag) = spectrum.peak().unwrap_or((f64::NAN, f64::NAN));
    Ok(format!(
        "analyze-fft bins={} bin_width_cm1={:.6} peak_cm1={freq:.6} peak_magnitude={mag:.6}",
        spectrum.frequency.len(),
        spectrum.bin_width
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Stirap(c) => run_protocol(c, Some(Protocol::Stirap), "stirap"),
        Command::Crp(c) => run_protocol(c, Some(Protocol::Crp), "crp"),
        Command::Pairs(c) => run_protocol(c, None, "pairs"),
        Command::Scan(c) => run_scan(c),
        Command::Revivals(c) => run_revivals(c),
        Command::Sweep(c) => run_sweep(c),
        Command::AnalyzeFft { common, map } => run_fft(common, map.as_deref()),
    };
    match outcome {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let category = e.category();
            eprintln!("error[{}]: {e}", category.as_str());
            ExitCode::from(category.exit_code() as u8)
        }
    }
}
