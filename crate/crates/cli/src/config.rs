//! Effective settings from flags, environment and an optional TOML file.
//! Precedence: flags, then `LTL4C_THREADS`, then the file, then defaults.

use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Human,
    JsonLines,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OnMalformed {
    Skip,
    Abort,
}

/// Keys accepted in a `--config` TOML file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub threads: Option<usize>,
    pub batch_size: Option<usize>,
    pub batch_latency_ms: Option<u64>,
    pub format: Option<Format>,
    pub on_malformed: Option<OnMalformed>,
}

pub fn load_file(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

/// Everything a command needs after precedence resolution.
#[derive(Clone, Copy, Debug)]
pub struct Settings {
    /// 0 means one worker per available core.
    pub threads: usize,
    pub batch_size: usize,
    pub batch_latency_ms: u64,
    pub format: Format,
    pub on_malformed: OnMalformed,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub threads: Option<usize>,
    pub batch_size: Option<usize>,
    pub batch_latency_ms: Option<u64>,
    pub format: Option<Format>,
    pub on_malformed: Option<OnMalformed>,
}

pub fn resolve(flags: Overrides, file: &FileConfig) -> Result<Settings> {
    let env_threads = match std::env::var("LTL4C_THREADS") {
        Ok(text) => Some(
            text.trim()
                .parse::<usize>()
                .context("LTL4C_THREADS must be a non-negative integer")?,
        ),
        Err(_) => None,
    };
    Ok(Settings {
        threads: flags.threads.or(env_threads).or(file.threads).unwrap_or(0),
        batch_size: flags
            .batch_size
            .or(file.batch_size)
            .unwrap_or(1024)
            .max(1),
        batch_latency_ms: flags
            .batch_latency_ms
            .or(file.batch_latency_ms)
            .unwrap_or(50),
        format: flags.format.or(file.format).unwrap_or(Format::Human),
        on_malformed: flags
            .on_malformed
            .or(file.on_malformed)
            .unwrap_or(OnMalformed::Skip),
    })
}
