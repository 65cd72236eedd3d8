//! Scenario configuration: command-line flags layered over an optional JSON
//! file, with the seed falling back to `IFM_SIM_SEED` and then zero.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use ifm_core::Stages;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SEED_ENV: &str = "IFM_SIM_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
pub enum Circuit {
    BellGen,
    BellMeasure,
    ChiGen,
    GcCnot,
    Swap,
    EeCnot,
    IfmGate,
}

impl Circuit {
    pub fn name(self) -> &'static str {
        match self {
            Circuit::BellGen => "bell_gen",
            Circuit::BellMeasure => "bell_measure",
            Circuit::ChiGen => "chi_gen",
            Circuit::GcCnot => "gc_cnot",
            Circuit::Swap => "swap",
            Circuit::EeCnot => "ee_cnot",
            Circuit::IfmGate => "ifm_gate",
        }
    }

    pub fn default_input(self) -> &'static str {
        match self {
            Circuit::BellMeasure => "phi+",
            Circuit::ChiGen => "none",
            Circuit::Swap => "1",
            Circuit::IfmGate => "01",
            _ => "00",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Ideal,
    Finite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Object {
    #[default]
    Present,
    Absent,
}

/// Flags of `ifm-sim run`. Every field is optional so a config file can
/// supply it instead.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON file with any of the fields below; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub circuit: Option<Circuit>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// IFM stage count; required with `--mode finite`.
    #[arg(long)]
    pub stages: Option<u32>,
    /// Bitstring (`01`), product of `0 1 + -` per qubit, `phi+|phi-|psi+|psi-`,
    /// or comma-separated complex amplitudes (`0.6,0.8i`).
    #[arg(long, allow_hyphen_values = true)]
    pub input: Option<String>,
    /// Absorber on the IFM control path (`ifm_gate` only).
    #[arg(long, value_enum)]
    pub object: Option<Object>,
    #[arg(long)]
    pub shots: Option<u64>,
    /// Root seed; defaults to $IFM_SIM_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Defaults to json for a `.json` output path, csv otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Report path; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub circuit: Option<Circuit>,
    pub mode: Option<Mode>,
    pub stages: Option<u32>,
    pub input: Option<String>,
    pub object: Option<Object>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub circuit: Circuit,
    pub mode: Mode,
    pub stages: Option<u32>,
    pub input: String,
    pub object: Object,
    pub shots: u64,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn stage_setting(&self) -> Stages {
        match (self.mode, self.stages) {
            (Mode::Finite, Some(n)) => Stages::Finite(n),
            _ => Stages::Ideal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.mode, self.stages) {
            (Mode::Finite, None) => {
                return Err(CliError::Config("--stages is required with --mode finite".into()))
            }
            (Mode::Finite, Some(0)) => return Err(CliError::Config("--stages must be at least 1".into())),
            (Mode::Ideal, Some(_)) => {
                return Err(CliError::Config("--stages only applies to --mode finite".into()))
            }
            _ => {}
        }
        if self.shots == 0 {
            return Err(CliError::Config("--shots must be at least 1".into()));
        }
        Ok(())
    }
}

pub fn seed_from_env() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{SEED_ENV}={v} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

fn infer_format(out: Option<&Path>) -> Format {
    match out.and_then(Path::extension).and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
        _ => Format::Csv,
    }
}

/// Merge flags over the config file over defaults.
pub fn resolve(args: &RunArgs) -> Result<ScenarioConfig> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let circuit = args
        .circuit
        .or(file.circuit)
        .ok_or_else(|| CliError::Config("--circuit is required".into()))?;
    let seed = match args.seed.or(file.seed) {
        Some(s) => s,
        None => seed_from_env()?.unwrap_or(0),
    };
    let out = args.out.clone().or(file.out);
    let config = ScenarioConfig {
        circuit,
        mode: args.mode.or(file.mode).unwrap_or(Mode::Ideal),
        stages: args.stages.or(file.stages),
        input: args
            .input
            .clone()
            .or(file.input)
            .unwrap_or_else(|| circuit.default_input().to_string()),
        object: args.object.or(file.object).unwrap_or_default(),
        shots: args.shots.or(file.shots).unwrap_or(1000),
        seed,
        format: args
            .format
            .or(file.format)
            .unwrap_or_else(|| infer_format(out.as_deref())),
        out,
    };
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(circuit: Circuit) -> RunArgs {
        RunArgs {
            circuit: Some(circuit),
            seed: Some(1),
            ..RunArgs::default()
        }
    }

    #[test]
    fn defaults_fill_in() {
        let c = resolve(&args(Circuit::BellMeasure)).unwrap();
        assert_eq!(c.input, "phi+");
        assert_eq!(c.mode, Mode::Ideal);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.stage_setting(), Stages::Ideal);
    }

    #[test]
    fn stages_required_iff_finite() {
        let mut a = args(Circuit::IfmGate);
        a.mode = Some(Mode::Finite);
        assert!(resolve(&a).is_err());
        a.stages = Some(4);
        assert_eq!(resolve(&a).unwrap().stage_setting(), Stages::Finite(4));
        a.mode = Some(Mode::Ideal);
        assert!(resolve(&a).is_err());
    }

    #[test]
    fn zero_shots_rejected() {
        let mut a = args(Circuit::GcCnot);
        a.shots = Some(0);
        assert!(matches!(resolve(&a), Err(CliError::Config(_))));
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("ifm-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.json");
        std::fs::write(&path, r#"{"circuit":"gc_cnot","shots":7,"seed":3,"out":"r.json"}"#).unwrap();
        let mut a = RunArgs {
            config: Some(path.clone()),
            ..RunArgs::default()
        };
        let c = resolve(&a).unwrap();
        assert_eq!((c.circuit, c.shots, c.seed, c.format), (Circuit::GcCnot, 7, 3, Format::Json));
        a.shots = Some(9);
        assert_eq!(resolve(&a).unwrap().shots, 9);
        std::fs::write(&path, r#"{"circuit":"gc_cnot","shotz":7}"#).unwrap();
        assert!(resolve(&a).is_err());
        std::fs::remove_dir_all(dir).unwrap();
    }
}
