//! Run configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tailored_surface::experiments::{ExperimentSpec, LatticeSize};

use crate::recipes::Recipe;
use crate::CliError;

/// Overrides applied to every sweep a figure recipe expands to.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecipeOverrides {
    #[serde(default)]
    pub trials: Option<u64>,
    #[serde(default)]
    pub distances: Option<Vec<LatticeSize>>,
    #[serde(default)]
    pub p: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub figure: Option<String>,
    #[serde(default)]
    pub recipe: RecipeOverrides,
    #[serde(default, rename = "experiment")]
    pub experiments: Vec<ExperimentSpec>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.experiments.is_empty() && self.figure.is_none() {
            return Err(CliError::Config("config has no [[experiment]] tables and no figure".into()));
        }
        if self.workers == Some(0) {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        if let Some(name) = &self.figure {
            Recipe::by_name(name)?;
        }
        for (i, spec) in self.experiments.iter().enumerate() {
            spec.validate().map_err(|e| CliError::Config(format!("experiment[{i}]: {e}")))?;
        }
        let specs = self.resolved_specs(None, None)?;
        let mut names: Vec<&str> = specs.iter().map(|s| s.name.as_deref().unwrap_or("")).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(CliError::Config(format!("duplicate experiment name {:?}", w[0])));
        }
        Ok(())
    }

    /// Every sweep to run: the recipe's sweeps first, then the explicit
    /// experiments, each with a unique name.
    pub fn resolved_specs(&self, seed: Option<u64>, trials: Option<u64>) -> Result<Vec<ExperimentSpec>, CliError> {
        let mut specs = Vec::new();
        if let Some(name) = &self.figure {
            for mut s in Recipe::by_name(name)?.sweeps() {
                if let Some(t) = self.recipe.trials {
                    s.trials = t;
                }
                if let Some(d) = &self.recipe.distances {
                    s.distances = d.clone();
                }
                if let Some(p) = &self.recipe.p {
                    s.p = p.clone();
                }
                specs.push(s);
            }
        }
        for (i, s) in self.experiments.iter().enumerate() {
            let mut s = s.clone();
            if s.name.is_none() {
                s.name = Some(format!("exp{i}-{}-{}", s.family.name(), s.metric.name()));
            }
            specs.push(s);
        }
        for s in &mut specs {
            if let Some(seed) = seed {
                s.seed = seed;
            }
            if let Some(t) = trials {
                s.trials = t;
            }
            s.validate()
                .map_err(|e| CliError::Config(format!("{}: {e}", s.name.as_deref().unwrap_or("?"))))?;
        }
        Ok(specs)
    }
}
