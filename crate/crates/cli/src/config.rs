//! Experiment configuration: defaults, an optional `key = value` file with
//! `[command]` sections, and command-line overrides, in that order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use weakstrat::experiment::DEFAULT_GRID_LADDER;
use weakstrat::kernel::DEFAULT_TRUNCATION;
use weakstrat::{SamplingMethod, SmoothMap};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Kappa,
    Converge,
    Variations,
    Sextic,
    Hermite,
    Scaling,
    Taylor,
    Audit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Kappa => "kappa",
            Command::Converge => "converge",
            Command::Variations => "variations",
            Command::Sextic => "sextic",
            Command::Hermite => "hermite",
            Command::Scaling => "scaling",
            Command::Taylor => "taylor",
            Command::Audit => "audit",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const REFINEMENT_FACTORS: [u64; 3] = [2, 4, 8];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub n_list: Vec<u64>,
    pub horizon: f64,
    pub replications: usize,
    pub master_seed: u64,
    #[serde(serialize_with = "as_display")]
    pub integrand: SmoothMap,
    #[serde(serialize_with = "as_display")]
    pub method: SamplingMethod,
    /// Oracle grid size is `refinement_factor * n`.
    pub refinement_factor: u64,
    pub truncation: u64,
    pub output_dir: PathBuf,
}

fn as_display<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl ExperimentConfig {
    pub fn defaults(command: Command) -> Self {
        let n_list = match command {
            Command::Scaling => vec![1 << 10],
            _ => DEFAULT_GRID_LADDER.to_vec(),
        };
        Self {
            command,
            n_list,
            horizon: 1.0,
            replications: 500,
            master_seed: 2024,
            integrand: SmoothMap::sin(),
            method: SamplingMethod::Circulant,
            refinement_factor: 4,
            truncation: DEFAULT_TRUNCATION,
            output_dir: PathBuf::from("out"),
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        let bad = |what: &str| CliError::Config(format!("invalid {what} '{value}'"));
        match key.trim() {
            "n_list" | "n" => {
                self.n_list = value
                    .split(',')
                    .map(|s| s.trim().parse::<u64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad("n_list"))?;
            }
            "horizon" | "t" => self.horizon = value.parse().map_err(|_| bad("horizon"))?,
            "replications" | "m" => self.replications = value.parse().map_err(|_| bad("replications"))?,
            "master_seed" | "seed" => self.master_seed = value.parse().map_err(|_| bad("master_seed"))?,
            "integrand" | "g" => {
                self.integrand = SmoothMap::from_str(value).map_err(|e| CliError::Config(e.to_string()))?
            }
            "method" => {
                self.method = SamplingMethod::from_str(value).map_err(|e| CliError::Config(e.to_string()))?
            }
            "refinement_factor" => {
                self.refinement_factor = value.parse().map_err(|_| bad("refinement_factor"))?
            }
            "truncation" => self.truncation = value.parse().map_err(|_| bad("truncation"))?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            other => return Err(CliError::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Reads settings for this config's command from a file. Keys before the
    /// first section header apply to every command.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        let mut active = true;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(section) = line.strip_prefix('[') {
                let name = section
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::Config(format!("line {}: unterminated section header", lineno + 1)))?;
                active = name.trim() == self.command.name();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            if active {
                self.set(key, value)
                    .map_err(|e| CliError::Config(format!("line {}: {e}", lineno + 1)))?;
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return Err(CliError::Config("grid sizes must be positive".into()));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(CliError::Config(format!("horizon must be positive, got {}", self.horizon)));
        }
        for &n in &self.n_list {
            let steps = n as f64 * self.horizon;
            if (steps - steps.round()).abs() > 1e-9 {
                return Err(CliError::Config(format!("n * T = {steps} is not an integer for n = {n}")));
            }
        }
        if self.replications == 0 {
            return Err(CliError::Config("replications must be positive".into()));
        }
        if !REFINEMENT_FACTORS.contains(&self.refinement_factor) {
            return Err(CliError::Config(format!(
                "refinement_factor must be one of {REFINEMENT_FACTORS:?}, got {}",
                self.refinement_factor
            )));
        }
        if self.method == SamplingMethod::Independent {
            return Err(CliError::Config("method must be cholesky or circulant".into()));
        }
        Ok(())
    }

    /// Canonical `key = value` rendering, used in manifests.
    pub fn echo(&self) -> String {
        let ns: Vec<String> = self.n_list.iter().map(u64::to_string).collect();
        format!(
            "[{}]\nn_list = {}\nhorizon = {}\nreplications = {}\nmaster_seed = {}\nintegrand = {}\nmethod = {}\nrefinement_factor = {}\ntruncation = {}\noutput_dir = {}\n",
            self.command,
            ns.join(","),
            self.horizon,
            self.replications,
            self.master_seed,
            self.integrand,
            self.method,
            self.refinement_factor,
            self.truncation,
            self.output_dir.display()
        )
    }
}
