use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{self, Circuit, Format, Object, RunArgs};
use crate::error::{CliError, Result};
use crate::report::Report;
use crate::scenario::run_scenario;
use crate::sweep::{check_agreement, render, run_sweep};
use crate::verify::{verify_all, Fault};

const RUN_HELP: &str = "\
CSV report: `# key=value` summary lines (values are JSON literals), then
columns outcome,count,frequency,probability. `outcome` is the detected bit
string of the output qubits (1 = particle on the |1> rail; for ifm_gate the
occupancies x a b), `lost` when the particle was absorbed, or `inconclusive`
when a Bell measurement failed. `probability` is the Born probability averaged
over shots. Numbers carry 12 significant digits.

Exit codes: 0 success, 1 configuration or runtime error, 2 verification failure.";

const SWEEP_HELP: &str = "\
CSV columns: N,theta,p_success_simulated,p_success_formula,abs_error,p_loss.
Exits with 2 if any row's abs_error exceeds 1e-10.";

#[derive(Debug, Parser)]
#[command(name = "ifm-sim", version, about = "Dual-rail interaction-free-measurement gate simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a circuit and write its outcome distribution.
    #[command(after_help = RUN_HELP)]
    Run(RunArgs),
    /// Success probability against stage count.
    #[command(after_help = SWEEP_HELP)]
    Sweep(SweepArgs),
    /// Run the self-check suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Comma-separated stage counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub stages: Vec<u32>,
    #[arg(long, value_enum, default_value = "ifm_gate")]
    pub circuit: Circuit,
    #[arg(long, value_enum, default_value = "present")]
    pub object: Object,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Root seed; defaults to $IFM_SIM_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(args: &RunArgs) -> Result<()> {
    let config = config::resolve(args)?;
    let report: Report = run_scenario(&config)?;
    emit(&report.render(config.format)?, config.out.as_deref())
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let rows = run_sweep(args.circuit, args.object, &args.stages)?;
    let format = args.format.unwrap_or(match args.out.as_deref().and_then(Path::extension) {
        Some(e) if e == "json" => Format::Json,
        _ => Format::Csv,
    });
    emit(&render(&rows, args.circuit, args.object, format)?, args.out.as_deref())?;
    check_agreement(&rows)
}

fn verify(args: &VerifyArgs) -> Result<()> {
    let seed = match args.seed {
        Some(s) => s,
        None => config::seed_from_env()?.unwrap_or(0),
    };
    let checks = verify_all(seed, args.inject_fault);
    for c in &checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("{}/{} checks passed (seed {seed})", checks.len() - failed, checks.len());
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} check(s) failed")));
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
    }
}
