//! Command-line front end: `measure`, `family` and `sweep`.
//!
//! Exit codes: 0 success, 2 input error, 3 unsupported measure or dimension,
//! 4 optimizer did not converge under `--strict`.

pub mod state_file;
pub mod sweep;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::convexroof::{optimize_cren, OptimizerConfig};
use crate::error::Error;
use crate::measures::{self, Method};
use crate::states::{twirl_isotropic, twirl_werner, DensityMatrix};

pub use state_file::{load_state, parse_state, write_state, FileError, LoadedState, StateFile};
pub use sweep::{run_sweep, write_csv, Family, Grid, SweepMode, SweepRow, SweepSpec};

/// Largest entrywise distance from a family's twirl accepted as membership.
pub const FAMILY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    InputError = 2,
    Unsupported = 3,
    NotConverged = 4,
}

#[derive(Debug, Error)]
#[error("{message}")]
pub struct CliError {
    pub code: ExitCode,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: ExitCode::InputError,
            message: message.into(),
        }
    }

    fn unsupported(message: impl Into<String>) -> Self {
        Self {
            code: ExitCode::Unsupported,
            message: message.into(),
        }
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotTwoQubit(_)
            | Error::DegenerateDimension(_)
            | Error::NotSquareBipartition(_)
            | Error::InvalidDimension(_) => ExitCode::Unsupported,
            _ => ExitCode::InputError,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cren",
    version,
    about = "Negativity and convex-roof extended negativity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an entanglement measure on a state file.
    Measure(MeasureArgs),
    /// Write an isotropic or Werner state to a file.
    Family(FamilyArgs),
    /// Tabulate a family over a parameter grid as CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureKind {
    /// Partial-transpose negativity.
    Negativity,
    /// Closed form for pure states.
    CrenPure,
    /// Upper bound from the convex-roof optimizer.
    CrenOpt,
    /// Wootters concurrence (2⊗2 only).
    Concurrence,
    /// Closed form for isotropic states.
    CrenIsotropic,
    /// Closed form for Werner states.
    CrenWerner,
    /// Fidelity parameter of the isotropic twirl.
    IsotropicParam,
    /// Parameter of the Werner twirl.
    WernerParam,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long = "max-iter", default_value_t = 2000)]
    pub max_iter: usize,
    #[arg(long = "ensemble-size")]
    pub ensemble_size: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

impl OptimizerArgs {
    pub fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            ensemble_size: self.ensemble_size,
            restarts: self.restarts,
            max_iterations: self.max_iter,
            seed: self.seed,
            ..OptimizerConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct MeasureArgs {
    pub file: PathBuf,
    #[arg(long, value_enum)]
    pub measure: MeasureKind,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// Exit with status 4 when the optimizer hits its iteration cap.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(value_enum)]
    pub family: Family,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub param: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub family: Family,
    #[arg(long)]
    pub d: usize,
    /// Inclusive grid `start:stop:step`.
    #[arg(long)]
    pub grid: Grid,
    #[arg(long, value_enum, default_value_t = SweepMode::Closed)]
    pub mode: SweepMode,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

/// JSON record printed by `measure`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureRecord {
    pub measure: &'static str,
    pub value: f64,
    /// `closed_form`, `partial_transpose`, `schmidt`, `oracle` or `optimized`.
    pub method: &'static str,
    pub dims: [usize; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl MeasureKind {
    fn name(&self) -> &'static str {
        match self {
            MeasureKind::Negativity => "negativity",
            MeasureKind::CrenPure => "cren-pure",
            MeasureKind::CrenOpt => "cren-opt",
            MeasureKind::Concurrence => "concurrence",
            MeasureKind::CrenIsotropic => "cren-isotropic",
            MeasureKind::CrenWerner => "cren-werner",
            MeasureKind::IsotropicParam => "isotropic-param",
            MeasureKind::WernerParam => "werner-param",
        }
    }
}

fn family_member(rho: &DensityMatrix, family: Family) -> Result<f64, CliError> {
    let twirled = match family {
        Family::Isotropic => twirl_isotropic(rho),
        Family::Werner => twirl_werner(rho),
    }?;
    let dev = twirled.matrix().max_abs_diff(rho.matrix());
    if dev > FAMILY_TOL {
        return Err(CliError::unsupported(format!(
            "state is not a {} state (twirl changes it by {dev:e})",
            family.as_str()
        )));
    }
    Ok(family.param_of(rho)?)
}

pub fn cmd_measure(args: &MeasureArgs) -> Result<MeasureRecord, CliError> {
    let file = parse_state(&args.file)?;
    let label = file.label.clone();
    let state = file.validate()?;
    let dims = state.dims();
    let mut record = MeasureRecord {
        measure: args.measure.name(),
        value: 0.0,
        method: Method::ClosedForm.as_str(),
        dims: [dims.a, dims.b],
        label,
        restarts: None,
        iterations: None,
        converged: None,
        seed: None,
    };
    let single = |m: measures::MeasureValue| (m.value, m.method.as_str());
    let (value, method) = match args.measure {
        MeasureKind::Negativity => single(measures::negativity(&state.density())?),
        MeasureKind::CrenPure => match &state {
            LoadedState::Pure(psi) => single(measures::cren_pure(psi)?),
            LoadedState::Density(_) => {
                return Err(CliError::unsupported(
                    "cren-pure needs a file of kind `pure`",
                ))
            }
        },
        MeasureKind::Concurrence => single(measures::wootters_concurrence(&state.density())?),
        MeasureKind::CrenOpt => {
            let result = optimize_cren(&state.density(), &args.optimizer.config())?;
            record.restarts = Some(result.restarts_used);
            record.iterations = Some(result.iterations);
            record.converged = Some(result.converged);
            record.seed = Some(result.seed);
            if args.strict && !result.converged {
                return Err(CliError {
                    code: ExitCode::NotConverged,
                    message: format!(
                        "optimizer hit the iteration cap; best bound {}",
                        result.value
                    ),
                });
            }
            (result.value, "optimized")
        }
        MeasureKind::CrenIsotropic | MeasureKind::IsotropicParam => {
            let p = family_member(&state.density(), Family::Isotropic)?;
            match args.measure {
                MeasureKind::CrenIsotropic => single(measures::cren_isotropic(p, dims.a)?),
                _ => (p, Method::ClosedForm.as_str()),
            }
        }
        MeasureKind::CrenWerner | MeasureKind::WernerParam => {
            let p = family_member(&state.density(), Family::Werner)?;
            match args.measure {
                MeasureKind::CrenWerner => single(measures::cren_werner(p, dims.a)?),
                _ => (p, Method::ClosedForm.as_str()),
            }
        }
    };
    record.value = value;
    record.method = method;
    Ok(record)
}

pub fn cmd_family(args: &FamilyArgs) -> Result<StateFile, CliError> {
    if args.d < 2 {
        return Err(CliError::input(format!(
            "families need d >= 2, got {}",
            args.d
        )));
    }
    let rho = args.family.state(args.param, args.d)?;
    let label = format!(
        "{} d={} param={:?}",
        args.family.as_str(),
        args.d,
        args.param
    );
    let file = StateFile::from_density(&rho, Some(label));
    write_state(&args.out, &file)?;
    Ok(file)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Vec<SweepRow>, CliError> {
    if args.d < 2 {
        return Err(CliError::input(format!(
            "families need d >= 2, got {}",
            args.d
        )));
    }
    if args.grid.start < 0.0 || args.grid.stop > 1.0 {
        return Err(CliError::input(format!(
            "grid {}:{}:{} leaves [0, 1]",
            args.grid.start, args.grid.stop, args.grid.step
        )));
    }
    let spec = SweepSpec {
        family: args.family,
        d: args.d,
        grid: args.grid,
        mode: args.mode,
        optimizer: args.optimizer.config(),
    };
    let rows = run_sweep(&spec)?;
    write_csv_file(&args.out, &rows, &spec)?;
    Ok(rows)
}

fn write_csv_file(path: &Path, rows: &[SweepRow], spec: &SweepSpec) -> Result<(), CliError> {
    let f = File::create(path)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(f);
    write_csv(rows, spec, &mut w)?;
    w.flush()
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

/// Runs a parsed command, writing the primary output to `out`.
pub fn run<W: Write>(cli: &Cli, out: &mut W) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::input(format!("cannot write output: {e}"));
    match &cli.command {
        Command::Measure(args) => {
            let rec = cmd_measure(args)?;
            let json = serde_json::to_string(&rec).expect("record serializes");
            writeln!(out, "{json}").map_err(io)
        }
        Command::Family(args) => {
            cmd_family(args)?;
            writeln!(out, "wrote {}", args.out.display()).map_err(io)
        }
        Command::Sweep(args) => {
            let rows = cmd_sweep(args)?;
            writeln!(out, "wrote {} rows to {}", rows.len(), args.out.display()).map_err(io)
        }
    }
}

/// Parses `std::env::args`, runs, and returns the process exit status.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::InputError as i32
            } else {
                ExitCode::Ok as i32
            };
        }
    };
    let stdout = std::io::stdout();
    match run(&cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::Ok as i32,
        Err(e) => {
            eprintln!("error: {e}");
            e.code as i32
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{isotropic_state, PureState};

    fn opt() -> OptimizerArgs {
        OptimizerArgs {
            restarts: 2,
            max_iter: 2000,
            ensemble_size: None,
            seed: 42,
        }
    }

    fn measure(path: &Path, kind: MeasureKind) -> Result<MeasureRecord, CliError> {
        cmd_measure(&MeasureArgs {
            file: path.to_path_buf(),
            measure: kind,
            optimizer: opt(),
            strict: false,
        })
    }

    #[test]
    fn family_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.json");
        cmd_family(&FamilyArgs {
            family: Family::Werner,
            d: 3,
            param: 0.8,
            out: path.clone(),
        })
        .unwrap();
        let p = measure(&path, MeasureKind::WernerParam).unwrap();
        assert!((p.value - 0.8).abs() < 1e-12);
        let c = measure(&path, MeasureKind::CrenWerner).unwrap();
        assert!((c.value - 0.3).abs() < 1e-12);
        let err = measure(&path, MeasureKind::IsotropicParam).unwrap_err();
        assert_eq!(err.code, ExitCode::Unsupported);
    }

    #[test]
    fn unsupported_measures() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("iso.json");
        write_state(
            &path,
            &StateFile::from_density(&isotropic_state(0.9, 3).unwrap(), None),
        )
        .unwrap();
        assert_eq!(
            measure(&path, MeasureKind::Concurrence).unwrap_err().code,
            ExitCode::Unsupported
        );
        assert_eq!(
            measure(&path, MeasureKind::CrenPure).unwrap_err().code,
            ExitCode::Unsupported
        );
        let n = measure(&path, MeasureKind::Negativity).unwrap();
        assert!((n.value - 0.85).abs() < 1e-10);
        assert_eq!(n.method, "partial_transpose");
    }

    #[test]
    fn pure_bell_measures() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bell.json");
        let bell = PureState::maximally_entangled(2).unwrap();
        write_state(&path, &StateFile::from_pure(&bell, Some("bell".into()))).unwrap();
        for kind in [
            MeasureKind::Negativity,
            MeasureKind::CrenPure,
            MeasureKind::CrenOpt,
            MeasureKind::Concurrence,
        ] {
            let r = measure(&path, kind).unwrap();
            assert!((r.value - 1.0).abs() < 1e-9, "{kind:?}: {}", r.value);
            assert_eq!(r.label.as_deref(), Some("bell"));
        }
    }

    #[test]
    fn missing_file_is_input_error() {
        let err = measure(
            Path::new("/nonexistent/state.json"),
            MeasureKind::Negativity,
        )
        .unwrap_err();
        assert_eq!(err.code, ExitCode::InputError);
    }

    #[test]
    fn strict_reports_non_convergence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("iso.json");
        write_state(
            &path,
            &StateFile::from_density(&isotropic_state(0.7, 3).unwrap(), None),
        )
        .unwrap();
        let args = MeasureArgs {
            file: path,
            measure: MeasureKind::CrenOpt,
            optimizer: OptimizerArgs {
                restarts: 1,
                max_iter: 1,
                ensemble_size: None,
                seed: 1,
            },
            strict: true,
        };
        assert_eq!(cmd_measure(&args).unwrap_err().code, ExitCode::NotConverged);
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
