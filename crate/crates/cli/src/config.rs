use std::fs;
use std::path::{Path, PathBuf};

use askframe::detect::{DetectConfig, VariantScope};
use askframe::evalkit::{MatchMode, DEFAULT_ALPHA};
use askframe::lexicon::LexiconFormat;
use askframe::respond::Bands;
use serde::Deserialize;

use crate::CliError;

/// Settings read from `--config`; command-line flags override them.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub lexicons: Vec<PathBuf>,
    pub lexicon_format: Option<String>,
    pub variants: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub match_mode: MatchMode,
    pub alpha: f64,
    pub analyzer: String,
    pub variant_scope: VariantScope,
    pub suffix_fallback: bool,
    pub bands: Bands,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            lexicons: Vec::new(),
            lexicon_format: None,
            variants: None,
            templates: None,
            match_mode: MatchMode::Category,
            alpha: DEFAULT_ALPHA,
            analyzer: "rule".into(),
            variant_scope: VariantScope::All,
            suffix_fallback: true,
            bands: Bands::default(),
            out: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        // relative paths are taken from the config file's directory
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.lexicons.iter_mut().for_each(rebase);
        cfg.variants.as_mut().map(rebase);
        cfg.templates.as_mut().map(rebase);
        cfg.out.as_mut().map(rebase);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.analyzer != "rule" {
            return Err(CliError::Config(format!("unknown analyzer {:?} (available: rule)", self.analyzer)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(CliError::Config(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        if !(self.bands.mid <= self.bands.high) {
            return Err(CliError::Config("bands.mid must not exceed bands.high".into()));
        }
        if let Some(f) = &self.lexicon_format {
            f.parse::<LexiconFormat>().map_err(|_| CliError::Config(format!("unknown lexicon format {f:?}")))?;
        }
        let missing = self
            .lexicons
            .iter()
            .chain(&self.variants)
            .chain(&self.templates)
            .find(|p| !p.exists());
        if let Some(p) = missing {
            return Err(CliError::Config(format!("{}: no such file", p.display())));
        }
        Ok(())
    }

    pub fn detect_config(&self) -> DetectConfig {
        DetectConfig {
            variant_scope: self.variant_scope,
            suffix_fallback: self.suffix_fallback,
        }
    }
}
