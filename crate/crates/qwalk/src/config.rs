//! Experiment configuration: flat key=value files with flag overrides.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};

use crate::error::{QwalkError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindSelection {
    Classical,
    Quantum,
    Both,
}

impl KindSelection {
    pub fn classical(&self) -> bool {
        matches!(self, KindSelection::Classical | KindSelection::Both)
    }

    pub fn quantum(&self) -> bool {
        matches!(self, KindSelection::Quantum | KindSelection::Both)
    }
}

/// Everything a batch run needs. Defaults reproduce the desk-scale
/// experiment set; every field can come from a config file or a flag.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub p_values: Vec<f64>,
    pub m_values: Vec<usize>,
    pub gamma: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub grid: GridKind,
    pub realizations: usize,
    pub base_seed: u64,
    pub kinds: KindSelection,
    pub out_dir: PathBuf,
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 40,
            p_values: vec![0.11, 0.5, 0.95],
            m_values: vec![1],
            gamma: 0.1,
            t_min: 1e-1,
            t_max: 1e4,
            points: 400,
            grid: GridKind::Log,
            realizations: 100,
            base_seed: default_seed(),
            kinds: KindSelection::Both,
            out_dir: PathBuf::from("out"),
            workers: 0,
        }
    }
}

/// `QWALK_SEED` acts as base-seed fallback before the built-in default.
pub fn default_seed() -> u64 {
    std::env::var("QWALK_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(12345)
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|_| QwalkError::Config(format!("bad value {tok:?} for key {key}")))
        })
        .collect()
}

impl ExperimentConfig {
    /// Apply one `key=value` setting; errors name the offending key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |k: &str, v: &str| QwalkError::Config(format!("bad value {v:?} for key {k}"));
        match key {
            "n" => self.n = value.parse().map_err(|_| bad(key, value))?,
            "p" => self.p_values = parse_list(key, value)?,
            "m" => self.m_values = parse_list(key, value)?,
            "gamma" => self.gamma = value.parse().map_err(|_| bad(key, value))?,
            "t_min" => self.t_min = value.parse().map_err(|_| bad(key, value))?,
            "t_max" => self.t_max = value.parse().map_err(|_| bad(key, value))?,
            "points" => self.points = value.parse().map_err(|_| bad(key, value))?,
            "grid" => {
                self.grid = match value {
                    "log" => GridKind::Log,
                    "linear" => GridKind::Linear,
                    _ => return Err(bad(key, value)),
                }
            }
            "realizations" | "r" => {
                self.realizations = value.parse().map_err(|_| bad(key, value))?
            }
            "seed" => self.base_seed = value.parse().map_err(|_| bad(key, value))?,
            "kinds" => {
                self.kinds = match value {
                    "classical" => KindSelection::Classical,
                    "quantum" => KindSelection::Quantum,
                    "both" => KindSelection::Both,
                    _ => return Err(bad(key, value)),
                }
            }
            "out_dir" => self.out_dir = PathBuf::from(value),
            "workers" => self.workers = value.parse().map_err(|_| bad(key, value))?,
            _ => return Err(QwalkError::Config(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Load a flat key=value file; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                QwalkError::Config(format!(
                    "{}:{}: expected key=value, got {line:?}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(QwalkError::Config(format!("n must be >= 2, got {}", self.n)));
        }
        for &p in &self.p_values {
            if !(0.0..=1.0).contains(&p) {
                return Err(QwalkError::Config(format!("p must be in [0,1], got {p}")));
            }
        }
        if self.p_values.is_empty() {
            return Err(QwalkError::Config("p list must not be empty".into()));
        }
        for &m in &self.m_values {
            if m >= self.n {
                return Err(QwalkError::TooManyTraps { m, n: self.n });
            }
        }
        if self.m_values.is_empty() {
            return Err(QwalkError::Config("m list must not be empty".into()));
        }
        if self.gamma < 0.0 {
            return Err(QwalkError::Config(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        if self.points < 2 {
            return Err(QwalkError::Config("points must be >= 2".into()));
        }
        if self.grid == GridKind::Log && self.t_min <= 0.0 {
            return Err(QwalkError::Config("log grid needs t_min > 0".into()));
        }
        if self.t_max <= self.t_min {
            return Err(QwalkError::Config("t_max must exceed t_min".into()));
        }
        if self.realizations < 1 {
            return Err(QwalkError::Config("realizations must be >= 1".into()));
        }
        Ok(())
    }

    pub fn time_grid(&self) -> Result<crate::dynamics::TimeGrid> {
        match self.grid {
            GridKind::Log => crate::dynamics::TimeGrid::log(self.t_min, self.t_max, self.points),
            GridKind::Linear => {
                crate::dynamics::TimeGrid::linear(self.t_min, self.t_max, self.points)
            }
        }
    }

    /// Canonical rendering; also the hashing input for provenance headers.
    pub fn canonical_string(&self) -> String {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mlist = self
            .m_values
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "n={} p={} m={} gamma={} t_min={} t_max={} points={} grid={} realizations={} seed={} kinds={}",
            self.n,
            list(&self.p_values),
            mlist,
            self.gamma,
            self.t_min,
            self.t_max,
            self.points,
            match self.grid {
                GridKind::Log => "log",
                GridKind::Linear => "linear",
            },
            self.realizations,
            self.base_seed,
            match self.kinds {
                KindSelection::Classical => "classical",
                KindSelection::Quantum => "quantum",
                KindSelection::Both => "both",
            },
        )
    }

    pub fn hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.canonical_string().hash(&mut h);
        h.finish()
    }
}
