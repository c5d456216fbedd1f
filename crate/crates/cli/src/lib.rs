//! `entwit` command-line front end.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use entwit_core::measures::{full_report, MeasureSelection};
use entwit_core::selftest::{format_table, Selftest};
use entwit_core::states::builtin;
use entwit_core::sweep::{run_sweep, Column, Family, SweepSpec, DEFAULT_POINTS};
use entwit_core::{solve, DensityOperator, Dims, Error, PartitionScheme, SolverConfig, WitnessProblem};
use serde::Serialize;

pub mod statefile;

use statefile::StateFile;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    pub fn internal(e: impl fmt::Display) -> Self {
        CliError {
            code: EXIT_INTERNAL,
            message: e.to_string(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::internal(format!("cannot write {}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NumericalBreakdown(_) | Error::Lp(_) => CliError::internal(e),
            _ => CliError::invalid(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "entwit", version, about = "Witnessed entanglement of multipartite states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute entanglement measures of one state and print a JSON report.
    Measure(MeasureArgs),
    /// Tabulate measures along a state family as CSV.
    Sweep(SweepArgs),
    /// Write the optimal witness of a state and a JSON sidecar.
    Witness(WitnessArgs),
    /// Run the built-in invariant checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Feasibility and objective tolerance.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Random restarts per partition in the separation oracle.
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Cut budget; exceeding it exits with code 3.
    #[arg(long)]
    pub max_cuts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        let mut c = SolverConfig::default().with_seed(self.seed);
        if let Some(eps) = self.eps {
            c.eps_feasibility = eps;
            c.eps_objective = eps;
        }
        if let Some(r) = self.restarts {
            c.restarts = r;
        }
        if let Some(m) = self.max_cuts {
            c.max_cuts = m;
        }
        c
    }
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// State file path or `builtin:NAME[:p]` (bell, ghz, w, werner:p, wghz:p).
    #[arg(long)]
    pub state: String,
    /// Local dimensions, e.g. `2,3`; must agree with the state if given.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// `m=K` for K-separability or `cut=I,J,..` for a fixed bipartition.
    #[arg(long, default_value = "m=1")]
    pub scheme: String,
}

impl StateArgs {
    pub fn load(&self) -> Result<(DensityOperator, PartitionScheme), CliError> {
        let rho = match self.state.strip_prefix("builtin:") {
            Some(spec) => builtin(spec)?,
            None => StateFile::read(Path::new(&self.state))?.to_state()?,
        };
        if let Some(d) = &self.dims {
            let dims = Dims::new(d.clone())?;
            if &dims != rho.dims() {
                return Err(CliError::invalid(format!(
                    "--dims {dims} does not match the state's dims {}",
                    rho.dims()
                )));
            }
        }
        let scheme = parse_scheme(&self.scheme, rho.dims().parties())?;
        Ok((rho, scheme))
    }
}

pub fn parse_scheme(text: &str, parties: usize) -> Result<PartitionScheme, CliError> {
    let bad = || CliError::invalid(format!("bad scheme `{text}`: expected m=K or cut=I,J,.."));
    let (key, value) = text.split_once('=').ok_or_else(bad)?;
    match key.trim() {
        "m" => {
            let m = value.trim().parse().map_err(|_| bad())?;
            Ok(PartitionScheme::m_separable(parties, m)?)
        }
        "cut" => {
            let cut = value
                .trim()
                .trim_start_matches('{')
                .trim_end_matches('}')
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(PartitionScheme::bipartite(parties, &cut)?)
        }
        _ => Err(bad()),
    }
}

#[derive(Debug, Clone, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Comma list of e_w, e_dw, neg, rr, schmidt, or `all`.
    #[arg(long, default_value = "e_w")]
    pub measures: String,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, default_value = "wghz")]
    pub family: String,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    pub points: usize,
    /// Comma list of tri, cut, reduced, dw_cut.
    #[arg(long, default_value = "tri,cut,reduced,dw_cut")]
    pub measures: String,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Witness matrix in state-file format.
    #[arg(long)]
    pub out: PathBuf,
    /// Sidecar path; defaults to the output path with `.sidecar.json`.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    /// Reduced sample counts.
    #[arg(long)]
    pub quick: bool,
}

/// Output of a command: text for stdout and the exit code.
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Measure(a) => measure(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Witness(a) => witness(&a),
        Command::Selftest(a) => selftest(&a),
    }
}

fn converged_code(converged: bool) -> i32 {
    if converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(CliError::internal)?;
    s.push('\n');
    Ok(s)
}

pub fn measure(a: &MeasureArgs) -> Result<Outcome, CliError> {
    let (rho, scheme) = a.state.load()?;
    let which = MeasureSelection::parse(&a.measures)?;
    let config = a.solver.config();
    config.check()?;
    let report = full_report(&rho, &scheme, &config, which)?;
    Ok(Outcome {
        stdout: to_json(&report)?,
        code: converged_code(report.converged()),
    })
}

pub fn sweep(a: &SweepArgs) -> Result<Outcome, CliError> {
    let family: Family = a.family.parse()?;
    let columns = Column::parse_list(&a.measures)?;
    let spec = SweepSpec::new(family, a.points, columns, a.solver.config());
    let table = run_sweep(&spec)?;
    std::fs::write(&a.out, table.to_csv()).map_err(|e| CliError::io(&a.out, e))?;
    Ok(Outcome {
        stdout: String::new(),
        code: converged_code(table.converged()),
    })
}

#[derive(Debug, Serialize)]
pub struct Certificate {
    pub partition: String,
    /// One unit vector per block, as `[re, im]` pairs.
    pub factors: Vec<Vec<[f64; 2]>>,
    /// `<π|W|π>` under the written witness.
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct WitnessSidecar {
    pub scheme: String,
    pub e_w: f64,
    pub detected: bool,
    pub converged: bool,
    pub cuts_used: usize,
    pub rounds: usize,
    pub certificate: Certificate,
}

pub fn witness(a: &WitnessArgs) -> Result<Outcome, CliError> {
    let (rho, scheme) = a.state.load()?;
    let config = a.solver.config();
    let result = solve(&WitnessProblem::new(rho.clone(), scheme.clone(), config)?)?;
    let file = StateFile::from_matrix(result.witness.matrix(), rho.dims(), Some("witness".into()));
    file.write(&a.out)?;
    let sidecar = WitnessSidecar {
        scheme: scheme.to_string(),
        e_w: result.e_w,
        detected: result.detected(),
        converged: result.converged,
        cuts_used: result.cuts_used,
        rounds: result.rounds,
        certificate: Certificate {
            partition: result.certificate.partition().to_string(),
            factors: result
                .certificate
                .factors()
                .iter()
                .map(|f| f.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            value: result.certificate_value,
        },
    };
    let path = a
        .sidecar
        .clone()
        .unwrap_or_else(|| a.out.with_extension("sidecar.json"));
    std::fs::write(&path, to_json(&sidecar)?).map_err(|e| CliError::io(&path, e))?;
    Ok(Outcome {
        stdout: to_json(&sidecar)?,
        code: converged_code(result.converged),
    })
}

pub fn selftest(a: &SelftestArgs) -> Result<Outcome, CliError> {
    let out = Selftest::new(a.quick).run();
    let code = if out.iter().all(|o| o.passed) { EXIT_OK } else { EXIT_INTERNAL };
    Ok(Outcome {
        stdout: format_table(&out),
        code,
    })
}
