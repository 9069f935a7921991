//! `triqap`: teleportation capability, GHZ-distillability and Mermin
//! nonlocality of three-qubit states from the command line.
//!
//! Exit codes: 0 on success, 1 on usage or I/O errors, 2 when the input is
//! not a physical state (or a sweep grid is empty), 3 when a verification
//! campaign records violations.

mod report;
mod spec;
mod sweep;

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use triqap::harness::{run_campaign, CAMPAIGNS};
use triqap::matcore::{euler_unitary, hadamard};
use triqap::protosim::{estimate_fidelity, BellFrame, ProtocolConfig};
use triqap::telecap::capability;
use triqap::Party;

use report::{write_csv, write_json, CampaignDoc, SimulationReport, TeleportReport};
use spec::StateSpec;

#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Physical(triqap::Error),
    EmptyGrid,
    Violations(usize),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Physical(_) | Failure::EmptyGrid => 2,
            Failure::Violations(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(e) => write!(f, "{e:#}"),
            Failure::Physical(e) => write!(f, "invalid state: {e}"),
            Failure::EmptyGrid => write!(f, "no canonical grid point satisfies the constraints"),
            Failure::Violations(n) => write!(f, "{n} violation(s)"),
        }
    }
}

impl From<triqap::Error> for Failure {
    fn from(e: triqap::Error) -> Self {
        Failure::Physical(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Frame {
    Auto,
    Identity,
}

#[derive(Debug, Parser)]
#[command(
    name = "triqap",
    version,
    about = "Teleportation, distillability and Mermin analysis of three-qubit states"
)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "TRIQAP_SEED", default_value_t = 0)]
    seed: u64,

    /// Margin applied to the report flags (useful, npt_all_cuts, violates).
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Output format for analyze, simulate and verify; sweep always writes CSV.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Suppress progress and summary messages on standard error.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full report for one state document (`-` reads standard input).
    Analyze { input: PathBuf },

    /// CSV table over a grid of canonical GHZ-diagonal weights.
    Sweep {
        /// Grid points per free axis.
        #[arg(long, default_value_t = 21, value_parser = clap::value_parser!(u32).range(2..))]
        steps: u32,

        /// Pin a coordinate, e.g. `l0m=0`. Coordinates: l0p, l0m, l1, l2, l3.
        #[arg(long, value_parser = sweep::parse_fix)]
        fix: Vec<(usize, f64)>,

        /// Tie coordinates together, e.g. `l1,l2,l3`.
        #[arg(long, value_parser = sweep::parse_tie)]
        tie: Vec<Vec<usize>>,

        /// Output file; standard output when omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },

    /// Run a seeded verification campaign.
    Verify {
        /// Campaign name (theorem1, theorem2, closed-forms, depolarization-monotonicity).
        campaign: String,

        /// Number of samples.
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },

    /// Monte-Carlo estimate of the protocol's average fidelity.
    Simulate {
        input: PathBuf,

        /// Measured party (1, 2 or 3).
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        system: u8,

        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,

        /// Receiver correction frame.
        #[arg(long, value_enum, default_value_t = Frame::Identity)]
        frame: Frame,

        /// Measurement basis as Euler angles `theta,phi,psi`; Hadamard (X basis) when omitted.
        #[arg(long, value_delimiter = ',', num_args = 3)]
        euler: Option<Vec<f64>>,
    },
}

fn emit<T: serde::Serialize>(format: Format, doc: &T, header: &[&str], row: Vec<String>) -> anyhow::Result<()> {
    let out = io::stdout().lock();
    match format {
        Format::Json => write_json(out, doc),
        Format::Csv => write_csv(out, header, [row]),
    }
}

fn analyze(cli: &Cli, input: &Path) -> Result<(), Failure> {
    let state = StateSpec::read(input)?.build()?;
    let r = TeleportReport::analyze(&state, cli.tol);
    emit(cli.format, &r, &TeleportReport::CSV_HEADER, r.csv_row())?;
    Ok(())
}

fn run_sweep(
    cli: &Cli,
    steps: u32,
    fix: &[(usize, f64)],
    tie: &[Vec<usize>],
    output: Option<&PathBuf>,
) -> Result<(), Failure> {
    let constraints = sweep::Constraints {
        fixed: fix.to_vec(),
        ties: tie.to_vec(),
    };
    let rows = sweep::sweep(steps as usize, &constraints, cli.tol);
    if rows.is_empty() {
        return Err(Failure::EmptyGrid);
    }
    let records = rows.iter().map(sweep::Row::csv_row);
    match output {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            write_csv(BufWriter::new(file), &sweep::CSV_HEADER, records)?;
            if !cli.quiet {
                eprintln!("wrote {} rows to {}", rows.len(), path.display());
            }
        }
        None => write_csv(io::stdout().lock(), &sweep::CSV_HEADER, records)?,
    }
    Ok(())
}

fn verify(cli: &Cli, campaign: &str, n: usize) -> Result<(), Failure> {
    let report = run_campaign(campaign, n, cli.seed).ok_or_else(|| {
        anyhow::anyhow!(
            "unknown campaign {campaign:?}; valid campaigns: {}",
            CAMPAIGNS.join(", ")
        )
    })?;
    let doc = CampaignDoc::new(&report, cli.seed);
    emit(cli.format, &doc, &CampaignDoc::CSV_HEADER, doc.csv_row())?;
    if !cli.quiet {
        eprintln!(
            "{}: {} samples, {} violations, {:.2}s",
            report.campaign_name, report.samples, report.violations, report.elapsed
        );
    }
    if report.violations > 0 {
        return Err(Failure::Violations(report.violations));
    }
    Ok(())
}

fn simulate(
    cli: &Cli,
    input: &Path,
    system: u8,
    samples: u64,
    frame: Frame,
    euler: Option<&[f64]>,
) -> Result<(), Failure> {
    let state = StateSpec::read(input)?.build()?;
    let party = Party::new(system as usize)?;
    let measurement = match euler {
        Some(a) => euler_unitary(a[0], a[1], a[2]),
        None => hadamard(),
    };
    let cfg = ProtocolConfig {
        system: party,
        measurement,
        frame: match frame {
            Frame::Auto => BellFrame::Auto,
            Frame::Identity => BellFrame::Identity,
        },
        samples: samples as usize,
        seed: cli.seed,
    };
    let est = estimate_fidelity(&state, &cfg)?;
    let analytic = capability(&state).fidelity[party.index() - 1];
    let name = frame
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    let r = SimulationReport::new(party.index(), &name, cli.seed, &est, analytic);
    emit(cli.format, &r, &SimulationReport::CSV_HEADER, r.csv_row())?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Analyze { input } => analyze(cli, input),
        Command::Sweep {
            steps,
            fix,
            tie,
            output,
        } => run_sweep(cli, *steps, fix, tie, output.as_ref()),
        Command::Verify { campaign, n } => verify(cli, campaign, *n),
        Command::Simulate {
            input,
            system,
            samples,
            frame,
            euler,
        } => simulate(cli, input, *system, *samples, *frame, euler.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !matches!(f, Failure::Violations(_)) || !cli.quiet {
                eprintln!("error: {f}");
            }
            let _ = io::stderr().flush();
            ExitCode::from(f.code())
        }
    }
}
