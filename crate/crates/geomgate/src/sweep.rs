//! Parameter sweeps over linear grids.
//!
//! Each `--axis key=start:stop:count` adds one grid dimension; the
//! Cartesian product is traversed with the last axis fastest and every
//! point contributes one row: the swept values, the four gate phases,
//! the entangling phase, the worst residual displacement, and the
//! largest photon occupation.  Points that fail validation (a swept
//! parameter can cross a mode resonance) keep their row with the data
//! cells empty and the error recorded, so a sweep never aborts halfway.
//!
//! Points are distributed over a worker pool (`GEOMGATE_THREADS` caps
//! the size); rows are assembled by grid index, so the thread count
//! never changes the output.

use geomgate_core::gatephase::{
    build_gate_from_couplings, entangling_measure, occupation_table,
};
use geomgate_core::model::{chi_table, derive_couplings, eta_values};

use crate::config::{ComplexSpec, RunConfig};
use crate::document::{SweepAxisDoc, SweepResult};
use crate::CliError;

/// Hard cap on grid size.
pub const MAX_POINTS: usize = 100_000;

/// Config keys that may be swept.  Complex couplings are swept along the
/// real axis.
pub const SWEEPABLE_KEYS: [&str; 11] = [
    "nu_mhz",
    "g0_mhz",
    "g1_mhz",
    "omega0_mhz",
    "omega1_mhz",
    "omega0p_mhz",
    "omega1p_mhz",
    "delta_cap0_mhz",
    "delta_cap1_mhz",
    "delta_small_mhz",
    "time_us",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub key: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepAxis {
    /// Parses `key=start:stop:count`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = |why: &str| {
            CliError::Config(format!(
                "invalid --axis '{text}': {why} (expected key=start:stop:count)"
            ))
        };
        let (key, grid) = text.split_once('=').ok_or_else(|| bad("missing '='"))?;
        let parts: Vec<&str> = grid.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("grid must have three ':'-separated fields"));
        }
        let num = |s: &str, what: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| bad(&format!("{what} is not a number")))
        };
        let start = num(parts[0], "start")?;
        let stop = num(parts[1], "stop")?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| bad("count is not an integer"))?;
        if !start.is_finite() || !stop.is_finite() {
            return Err(bad("start and stop must be finite"));
        }
        if count < 2 {
            return Err(bad("count must be at least 2"));
        }
        let key = key.trim().to_string();
        if !SWEEPABLE_KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "'{key}' is not sweepable; choose one of: {}",
                SWEEPABLE_KEYS.join(", ")
            )));
        }
        Ok(SweepAxis { key, start, stop, count })
    }

    /// Grid value at index `i`; the endpoints are exact.
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.stop
        } else {
            self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64
        }
    }
}

fn set_key(cfg: &mut RunConfig, key: &str, value: f64) {
    match key {
        "nu_mhz" => cfg.nu_mhz = value,
        "g0_mhz" => cfg.g0_mhz = ComplexSpec::real(value),
        "g1_mhz" => cfg.g1_mhz = ComplexSpec::real(value),
        "omega0_mhz" => cfg.omega0_mhz = ComplexSpec::real(value),
        "omega1_mhz" => cfg.omega1_mhz = ComplexSpec::real(value),
        "omega0p_mhz" => cfg.omega0p_mhz = Some(ComplexSpec::real(value)),
        "omega1p_mhz" => cfg.omega1p_mhz = Some(ComplexSpec::real(value)),
        "delta_cap0_mhz" => cfg.delta_cap0_mhz = value,
        "delta_cap1_mhz" => cfg.delta_cap1_mhz = value,
        "delta_small_mhz" => cfg.delta_small_mhz = value,
        "time_us" => cfg.time_us = Some(value),
        other => unreachable!("unvalidated sweep key {other}"),
    }
}

/// Worker-pool size: `GEOMGATE_THREADS` if set, otherwise the available
/// parallelism, never more than one worker per point.
fn thread_count(points: usize) -> Result<usize, CliError> {
    let n = match std::env::var("GEOMGATE_THREADS") {
        Ok(s) => s.trim().parse::<usize>().ok().filter(|&n| n >= 1).ok_or_else(|| {
            CliError::Config(format!("GEOMGATE_THREADS must be a positive integer, got '{s}'"))
        })?,
        Err(std::env::VarError::NotPresent) => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
        Err(std::env::VarError::NotUnicode(_)) => {
            return Err(CliError::Config("GEOMGATE_THREADS is not valid unicode".into()))
        }
    };
    Ok(n.min(points).max(1))
}

const DATA_COLUMNS: [&str; 7] = [
    "gamma_00_rad",
    "gamma_01_rad",
    "gamma_10_rad",
    "gamma_11_rad",
    "entangling_phase_rad",
    "max_residual_amplitude",
    "max_photon_occupation",
];

struct Row {
    axis_values: Vec<f64>,
    data: Result<[f64; 7], String>,
}

fn compute_row(base: &RunConfig, axes: &[SweepAxis], index: usize) -> Row {
    let mut rem = index;
    let mut axis_values = vec![0.0; axes.len()];
    for (j, axis) in axes.iter().enumerate().rev() {
        axis_values[j] = axis.value(rem % axis.count);
        rem /= axis.count;
    }
    let mut cfg = base.clone();
    for (axis, &v) in axes.iter().zip(axis_values.iter()) {
        set_key(&mut cfg, &axis.key, v);
    }
    let data = (|| -> Result<[f64; 7], String> {
        let t = cfg.time_us.ok_or("time_us is not set")?;
        let params = cfg.system_params().validated().map_err(|e| e.to_string())?;
        let couplings = derive_couplings(&params).map_err(|e| e.to_string())?;
        let chi = chi_table(&couplings);
        let eta = eta_values(&params).map_err(|e| e.to_string())?;
        let gate = build_gate_from_couplings(&chi, &eta, t).map_err(|e| e.to_string())?;
        let occ = occupation_table(&chi, &eta, t);
        let (_, _) = entangling_measure(&gate, cfg.entangle_tol);
        let max_residual = gate
            .residual_amplitudes
            .iter()
            .flatten()
            .fold(0.0_f64, |a, &b| a.max(b));
        let max_occ = occ
            .iter()
            .flat_map(|row| row.iter().map(|o| o.max))
            .fold(0.0_f64, f64::max);
        Ok([
            gate.phases[0],
            gate.phases[1],
            gate.phases[2],
            gate.phases[3],
            gate.entangling_phase,
            max_residual,
            max_occ,
        ])
    })();
    Row { axis_values, data }
}

/// Runs the sweep; `base` must be resolved.  `time_us` may come from the
/// base config or from a `time_us` axis.
pub fn run_sweep(base: &RunConfig, axes: &[SweepAxis]) -> Result<SweepResult, CliError> {
    if axes.is_empty() {
        return Err(CliError::Config(
            "sweep requires at least one --axis key=start:stop:count".into(),
        ));
    }
    let mut total = 1usize;
    for axis in axes {
        total = total
            .checked_mul(axis.count)
            .filter(|&t| t <= MAX_POINTS)
            .ok_or_else(|| {
                CliError::Config(format!("sweep grid exceeds {MAX_POINTS} points"))
            })?;
    }
    if base.time_us.is_none() && !axes.iter().any(|a| a.key == "time_us") {
        return Err(CliError::Config(
            "sweep requires time_us in the config or a time_us axis".into(),
        ));
    }

    let workers = thread_count(total)?;
    let mut rows: Vec<Option<Row>> = Vec::with_capacity(total);
    rows.resize_with(total, || None);
    let chunk = total.div_ceil(workers);
    std::thread::scope(|scope| {
        for (w, slots) in rows.chunks_mut(chunk).enumerate() {
            let start = w * chunk;
            scope.spawn(move || {
                for (offset, slot) in slots.iter_mut().enumerate() {
                    *slot = Some(compute_row(base, axes, start + offset));
                }
            });
        }
    });

    let mut columns: Vec<String> = axes.iter().map(|a| a.key.clone()).collect();
    columns.extend(DATA_COLUMNS.iter().map(|s| s.to_string()));
    let mut out_rows = Vec::with_capacity(total);
    let mut errors = Vec::with_capacity(total);
    for slot in rows {
        let row = slot.expect("every grid point is computed");
        let mut cells: Vec<Option<f64>> = row.axis_values.into_iter().map(Some).collect();
        match row.data {
            Ok(data) => {
                cells.extend(data.into_iter().map(Some));
                errors.push(None);
            }
            Err(msg) => {
                cells.extend(core::iter::repeat(None).take(DATA_COLUMNS.len()));
                errors.push(Some(msg));
            }
        }
        out_rows.push(cells);
    }
    Ok(SweepResult {
        axes: axes
            .iter()
            .map(|a| SweepAxisDoc {
                key: a.key.clone(),
                start: a.start,
                stop: a.stop,
                count: a.count,
            })
            .collect(),
        columns,
        rows: out_rows,
        errors,
    })
}
