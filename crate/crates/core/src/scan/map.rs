use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PapError, Result};
use crate::fields::Protocol;
use crate::model::LevelSystem;
use crate::propagator::{IntegratorConfig, RecordPolicy};
use crate::protocols::{run_train, TrainSetup};

/// Train parameters shared by every cell of a scan; the grids override
/// `delta_t_large` and `delta_t_small`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanBase {
    pub protocol: Protocol,
    pub setup: TrainSetup,
    pub integrator: IntegratorConfig,
}

/// Transfer efficiency over `(ΔT, δT)`; rows follow ΔT, columns δT.
/// Cells whose run failed hold NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyMap {
    pub delta_t_large: Vec<f64>,
    pub delta_t_small: Vec<f64>,
    pub efficiency: Vec<Vec<f64>>,
    pub config_fingerprint: String,
}

fn strictly_increasing(axis: &[f64]) -> bool {
    axis.iter().all(|x| x.is_finite()) && axis.windows(2).all(|w| w[1] > w[0])
}

/// Label of the corner cell in exported maps.
pub const MAP_CORNER: &str = "delta_T_ps\\delta_t_ps";

impl EfficiencyMap {
    pub fn check(&self) -> Result<()> {
        if self.delta_t_large.is_empty() || self.delta_t_small.is_empty() {
            return Err(PapError::InvalidArgument("map axes must be non-empty".into()));
        }
        if !strictly_increasing(&self.delta_t_large) || !strictly_increasing(&self.delta_t_small) {
            return Err(PapError::InvalidArgument("map axes must be strictly increasing".into()));
        }
        if self.efficiency.len() != self.delta_t_large.len()
            || self.efficiency.iter().any(|r| r.len() != self.delta_t_small.len())
        {
            return Err(PapError::InvalidArgument("map shape does not match its axes".into()));
        }
        Ok(())
    }

    /// Efficiencies along δT at one ΔT row.
    pub fn column(&self, delta_t_large_index: usize) -> Result<&[f64]> {
        self.efficiency
            .get(delta_t_large_index)
            .map(Vec::as_slice)
            .ok_or_else(|| {
                PapError::InvalidArgument(format!("ΔT index {delta_t_large_index} out of range"))
            })
    }

    /// CSV: optional comment lines, then a header row of δT values and one
    /// row per ΔT. Failed cells are written as `NaN`.
    pub fn write_csv<W: Write>(&self, mut out: W, header_comments: &[String]) -> std::io::Result<()> {
        for c in header_comments {
            writeln!(out, "# {c}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![MAP_CORNER.to_string()];
        header.extend(self.delta_t_small.iter().map(f64::to_string));
        w.write_record(&header)?;
        for (dt, row) in self.delta_t_large.iter().zip(&self.efficiency) {
            let mut rec = vec![dt.to_string()];
            rec.extend(row.iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        w.flush()
    }

    /// Reads a map written by [`EfficiencyMap::write_csv`]. The fingerprint
    /// is taken from a `fingerprint=` token in the comments when present.
    pub fn read_csv<R: Read>(mut input: R, path: &Path) -> Result<Self> {
        let format = |message: String| PapError::Format {
            path: path.to_path_buf(),
            message,
        };
        let mut text = String::new();
        input
            .read_to_string(&mut text)
            .map_err(|e| PapError::io(path, e))?;
        let config_fingerprint = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .flat_map(str::split_whitespace)
            .find_map(|tok| tok.strip_prefix("fingerprint="))
            .unwrap_or_default()
            .to_string();

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .has_headers(false)
            .from_reader(text.as_bytes());
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| format(format!("bad number {s:?}: {e}")));
        let mut rows = reader.records();
        let header = rows
            .next()
            .ok_or_else(|| format("empty map file".into()))?
            .map_err(|e| format(e.to_string()))?;
        let delta_t_small = header.iter().skip(1).map(parse).collect::<Result<Vec<_>>>()?;
        let mut delta_t_large = Vec::new();
        let mut efficiency = Vec::new();
        for rec in rows {
            let rec = rec.map_err(|e| format(e.to_string()))?;
            let mut fields = rec.iter();
            let first = fields.next().ok_or_else(|| format("empty row".into()))?;
            delta_t_large.push(parse(first)?);
            efficiency.push(fields.map(parse).collect::<Result<Vec<_>>>()?);
        }
        let map = EfficiencyMap {
            delta_t_large,
            delta_t_small,
            efficiency,
            config_fingerprint,
        };
        map.check().map_err(|e| format(e.to_string()))?;
        Ok(map)
    }
}

/// Runs one train per `(ΔT, δT)` cell on the current rayon pool.
///
/// Cells are independent and collected in grid order, so the result does not
/// depend on the number of workers. A failing cell (e.g. overlapping pulses)
/// becomes NaN.
pub fn scan_2d(
    levels: &LevelSystem,
    base: &ScanBase,
    delta_t_large: &[f64],
    delta_t_small: &[f64],
    config_fingerprint: &str,
) -> Result<EfficiencyMap> {
    if delta_t_large.is_empty() || delta_t_small.is_empty() {
        return Err(PapError::InvalidArgument("scan grids must be non-empty".into()));
    }
    if !strictly_increasing(delta_t_large) || !strictly_increasing(delta_t_small) {
        return Err(PapError::InvalidArgument("scan grids must be strictly increasing".into()));
    }
    base.integrator.check()?;
    let cols = delta_t_small.len();
    let values: Vec<f64> = (0..delta_t_large.len() * cols)
        .into_par_iter()
        .map(|cell| {
            let mut setup = base.setup.clone();
            setup.delta_t_large = delta_t_large[cell / cols];
            setup.delta_t_small = Some(delta_t_small[cell % cols]);
            run_train(levels, base.protocol, &setup, &base.integrator, RecordPolicy::FinalOnly)
                .map_or(f64::NAN, |r| r.final_target)
        })
        .collect();
    Ok(EfficiencyMap {
        delta_t_large: delta_t_large.to_vec(),
        delta_t_small: delta_t_small.to_vec(),
        efficiency: values.chunks(cols).map(<[f64]>::to_vec).collect(),
        config_fingerprint: config_fingerprint.to_string(),
    })
}

/// [`scan_2d`] on a dedicated pool of `workers` threads.
pub fn scan_2d_with_workers(
    levels: &LevelSystem,
    base: &ScanBase,
    delta_t_large: &[f64],
    delta_t_small: &[f64],
    config_fingerprint: &str,
    workers: usize,
) -> Result<EfficiencyMap> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| PapError::InvalidArgument(format!("worker pool: {e}")))?;
    pool.install(|| scan_2d(levels, base, delta_t_large, delta_t_small, config_fingerprint))
}

/// Evenly spaced grid `start, start + step, …` with `count` points.
pub fn uniform_grid(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start + i as f64 * step).collect()
}
