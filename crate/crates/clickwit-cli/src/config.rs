//! Key = value configuration files. Precedence: CLI flags override config
//! entries, which override built-in defaults. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use crate::{CliError, LayoutArg, LayoutOpts, SourceOpts, SweepVar};

pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn empty() -> Self {
        ConfigFile {
            entries: BTreeMap::new(),
        }
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn load(path: &Path, known_keys: &[&str]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config line {}: expected `key = value`, got `{raw}`",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if !known_keys.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("config key `{key}`: bad number `{v}`")))
            })
            .transpose()
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| CliError::Usage(format!("config key `{key}`: bad integer `{v}`")))
            })
            .transpose()
    }

    pub fn string(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

pub fn layout_keys() -> &'static [&'static str] {
    &["layout", "t", "t1", "t2", "phase"]
}

pub fn source_keys() -> &'static [&'static str] {
    &["eta", "nbar", "coherence", "noise_coherence", "indist"]
}

/// Fills unset layout flags from the config file.
pub fn merge_layout(opts: &mut LayoutOpts, cfg: &ConfigFile) -> Result<(), CliError> {
    if opts.layout.is_none() {
        opts.layout = match cfg.string("layout") {
            None => None,
            Some("bs") => Some(LayoutArg::Bs),
            Some("mz") => Some(LayoutArg::Mz),
            Some("hom") => Some(LayoutArg::Hom),
            Some("twocopy") => Some(LayoutArg::Twocopy),
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "config key `layout`: unknown layout `{other}`"
                )))
            }
        };
    }
    opts.t = opts.t.or(cfg.f64("t")?);
    opts.t1 = opts.t1.or(cfg.f64("t1")?);
    opts.t2 = opts.t2.or(cfg.f64("t2")?);
    opts.phase = opts.phase.or(cfg.f64("phase")?);
    Ok(())
}

/// Fills unset source flags from the config file.
pub fn merge_source(opts: &mut SourceOpts, cfg: &ConfigFile) -> Result<(), CliError> {
    opts.eta = opts.eta.or(cfg.f64("eta")?);
    opts.nbar = opts.nbar.or(cfg.f64("nbar")?);
    opts.coherence = opts.coherence.or(cfg.f64("coherence")?);
    opts.noise_coherence = opts.noise_coherence.or(cfg.f64("noise_coherence")?);
    opts.indist = opts.indist.or(cfg.f64("indist")?);
    Ok(())
}

pub fn sweep_var_from(cfg: &ConfigFile) -> Result<Option<SweepVar>, CliError> {
    match cfg.string("sweep") {
        None => Ok(None),
        Some("eta") => Ok(Some(SweepVar::Eta)),
        Some("nbar") => Ok(Some(SweepVar::Nbar)),
        Some(other) => Err(CliError::Usage(format!(
            "config key `sweep`: expected eta or nbar, got `{other}`"
        ))),
    }
}
