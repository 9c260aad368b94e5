//! Parameter sweeps over the isotropic and Werner families, written as CSV.

use std::io::Write;
use std::str::FromStr;

use crate::convexroof::{optimize_cren, OptimizerConfig};
use crate::error::{Error, Result};
use crate::measures::{cren_isotropic, cren_werner, negativity};
use crate::states::{fidelity_param, isotropic_state, werner_param, werner_state, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    Isotropic,
    Werner,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Isotropic => "isotropic",
            Family::Werner => "werner",
        }
    }

    pub fn state(&self, param: f64, d: usize) -> Result<DensityMatrix> {
        match self {
            Family::Isotropic => isotropic_state(param, d),
            Family::Werner => werner_state(param, d),
        }
    }

    pub fn closed_form(&self, param: f64, d: usize) -> Result<f64> {
        match self {
            Family::Isotropic => cren_isotropic(param, d).map(|m| m.value),
            Family::Werner => cren_werner(param, d).map(|m| m.value),
        }
    }

    /// Parameter of the family state closest to `rho` (its twirl).
    pub fn param_of(&self, rho: &DensityMatrix) -> Result<f64> {
        match self {
            Family::Isotropic => fidelity_param(rho),
            Family::Werner => werner_param(rho),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepMode {
    Closed,
    Optimized,
    Both,
}

impl SweepMode {
    fn method(&self) -> &'static str {
        match self {
            SweepMode::Closed => "closed_form",
            SweepMode::Optimized => "optimized",
            SweepMode::Both => "closed_form+optimized",
        }
    }

    fn header(&self) -> Vec<&'static str> {
        let mut cols = vec!["parameter", "negativity"];
        match self {
            SweepMode::Closed => cols.push("cren_closed"),
            SweepMode::Optimized => cols.push("cren_optimized"),
            SweepMode::Both => cols.extend(["cren_closed", "cren_optimized", "abs_gap"]),
        }
        cols.extend(["method", "seed"]);
        cols
    }
}

/// Inclusive grid `start:stop:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    /// Points `start + i·step` up to `stop`; the last point snaps to `stop`
    /// when it lands within rounding of it.
    pub fn points(&self) -> Vec<f64> {
        let span = (self.stop - self.start) / self.step;
        let n = (span + 1e-9).floor() as usize;
        let mut pts: Vec<f64> = (0..=n).map(|i| self.start + i as f64 * self.step).collect();
        if let Some(last) = pts.last_mut() {
            if (*last - self.stop).abs() <= 1e-9 * self.step.abs().max(1.0) {
                *last = self.stop;
            }
        }
        pts
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid `{s}` is not of the form start:stop:step"));
        }
        let mut vals = [0.0; 3];
        for (v, p) in vals.iter_mut().zip(&parts) {
            *v = p
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("grid component `{p}`: {e}"))?;
            if !v.is_finite() {
                return Err(format!("grid component `{p}` is not finite"));
            }
        }
        let [start, stop, step] = vals;
        if step <= 0.0 {
            return Err(format!("grid step must be positive, got {step}"));
        }
        if stop < start {
            return Err(format!("grid stop {stop} is below start {start}"));
        }
        Ok(Grid { start, stop, step })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub parameter: f64,
    pub negativity: f64,
    pub cren_closed: Option<f64>,
    pub cren_optimized: Option<f64>,
    /// Whether the optimizer stopped on a tolerance; `None` in closed mode.
    pub converged: Option<bool>,
}

impl SweepRow {
    pub fn abs_gap(&self) -> Option<f64> {
        Some((self.cren_optimized? - self.cren_closed?).abs())
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub family: Family,
    pub d: usize,
    pub grid: Grid,
    pub mode: SweepMode,
    pub optimizer: OptimizerConfig,
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.d < 2 {
        return Err(Error::InvalidDimension(spec.d));
    }
    spec.grid
        .points()
        .into_iter()
        .map(|p| {
            let rho = spec.family.state(p, spec.d)?;
            let neg = negativity(&rho)?.value;
            let closed = match spec.mode {
                SweepMode::Optimized => None,
                _ => Some(spec.family.closed_form(p, spec.d)?),
            };
            let opt = match spec.mode {
                SweepMode::Closed => None,
                _ => Some(optimize_cren(&rho, &spec.optimizer)?),
            };
            for cren in [closed, opt.as_ref().map(|r| r.value)]
                .into_iter()
                .flatten()
            {
                if cren < neg - 1e-10 {
                    return Err(Error::Inconsistent(format!(
                        "cren {cren} below negativity {neg} at parameter {p}"
                    )));
                }
            }
            Ok(SweepRow {
                parameter: p,
                negativity: neg,
                cren_closed: closed,
                cren_optimized: opt.as_ref().map(|r| r.value),
                converged: opt.as_ref().map(|r| r.converged),
            })
        })
        .collect()
}

fn fmt(x: f64) -> String {
    format!("{x:?}")
}

/// Writes rows with LF line endings; doubles use shortest round-trip form.
pub fn write_csv<W: Write>(rows: &[SweepRow], spec: &SweepSpec, out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Inconsistent(format!("csv output failed: {e}"));
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(spec.mode.header()).map_err(io)?;
    let seed = spec.optimizer.seed.to_string();
    for row in rows {
        let mut rec = vec![fmt(row.parameter), fmt(row.negativity)];
        rec.extend(row.cren_closed.map(fmt));
        rec.extend(row.cren_optimized.map(fmt));
        rec.extend(row.abs_gap().map(fmt));
        rec.push(spec.mode.method().to_string());
        rec.push(seed.clone());
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Inconsistent(format!("csv output failed: {e}")))
}
