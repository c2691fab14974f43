//! Run configuration: flags, then `CZEROS_PRECISION`, then a config file,
//! then defaults.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use czeros::specfun::Precision;

pub const PRECISION_ENV: &str = "CZEROS_PRECISION";
pub const MIN_DIGITS: u32 = 20;
pub const MAX_DIGITS: u32 = 200;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for Format {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        <Format as ValueEnum>::from_str(s, true).map_err(|e| anyhow!(e))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub precision: Precision,
    pub format: Format,
    /// Worker threads; `None` lets the pool pick.
    pub threads: Option<usize>,
    pub config_path: Option<PathBuf>,
}

/// Values read from a flat `key = value` file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FileConfig {
    pub precision: Option<u32>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

/// Settings given on the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub precision: Option<u32>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub config: Option<PathBuf>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = FileConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key = value", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let ctx = || format!("line {}: bad value for `{key}`", i + 1);
            match key {
                "precision" => cfg.precision = Some(value.parse().with_context(ctx)?),
                "format" => cfg.format = Some(value.parse().with_context(ctx)?),
                "threads" => cfg.threads = Some(value.parse().with_context(ctx)?),
                _ => bail!("line {}: unknown key `{key}`", i + 1),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config file {}", path.display()))?;
        FileConfig::parse(&text).with_context(|| format!("in config file {}", path.display()))
    }
}

fn check_digits(d: u32) -> Result<Precision> {
    if !(MIN_DIGITS..=MAX_DIGITS).contains(&d) {
        bail!("precision {d} outside [{MIN_DIGITS}, {MAX_DIGITS}]");
    }
    Precision::new(d).map_err(|e| anyhow!("{e}"))
}

impl RunConfig {
    /// Merges the sources; `env` is the raw value of `CZEROS_PRECISION`.
    pub fn resolve(flags: &Overrides, env: Option<&str>, file: &FileConfig) -> Result<Self> {
        let env = match env.map(str::trim).filter(|s| !s.is_empty()) {
            Some(s) => Some(s.parse::<u32>().with_context(|| format!("{PRECISION_ENV}=`{s}` is not an integer"))?),
            None => None,
        };
        let digits = flags.precision.or(env).or(file.precision).unwrap_or(Precision::default().digits());
        let threads = flags.threads.or(file.threads);
        if threads == Some(0) {
            bail!("thread count must be positive");
        }
        Ok(RunConfig {
            precision: check_digits(digits)?,
            format: flags.format.or(file.format).unwrap_or_default(),
            threads,
            config_path: flags.config.clone(),
        })
    }

    /// Reads the environment and the config file named in `flags`.
    pub fn from_sources(flags: &Overrides) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let env = std::env::var(PRECISION_ENV).ok();
        RunConfig::resolve(flags, env.as_deref(), &file)
    }
}
