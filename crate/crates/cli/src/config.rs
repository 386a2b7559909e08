//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::Path;

use rotational_orbits::solver::SolverConfig;
use rotational_orbits::BuiltinSystem;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum SweepGrid {
    Explicit(Vec<f64>),
    LogSpaced { min: f64, max: f64, points: usize },
}

impl SweepGrid {
    pub fn periods(&self) -> Vec<f64> {
        match self {
            SweepGrid::Explicit(p) => p.clone(),
            SweepGrid::LogSpaced { min, max, points } => {
                if *points <= 1 {
                    return vec![*min];
                }
                let (a, b) = (min.ln(), max.ln());
                (0..*points)
                    .map(|i| (a + (b - a) * i as f64 / (*points - 1) as f64).exp())
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: BuiltinSystem,
    pub n: usize,
    pub k: usize,
    pub r: Option<f64>,
    pub period: f64,
    pub v: Vec<i64>,
    pub solver: SolverConfig,
    /// Initial RK4 step count for shooting.
    pub steps: usize,
    /// Samples per written trajectory.
    pub samples: usize,
    pub hypothesis_samples: usize,
    pub sweep: Option<SweepGrid>,
}

const KEYS: &[&str] = &[
    "system",
    "mu",
    "epsilon",
    "s",
    "n",
    "k",
    "r",
    "period",
    "v",
    "modes",
    "nodes",
    "steps",
    "samples",
    "hypothesis_samples",
    "tol_g",
    "max_iterations",
    "random_starts",
    "torus_grid",
    "dedup_tol",
    "theta_grid",
    "seed",
    "sweep_periods",
    "sweep_min",
    "sweep_max",
    "sweep_points",
];

struct Entries(BTreeMap<String, (usize, String)>);

impl Entries {
    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some((line, raw)) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("line {line}: cannot parse {key} = {raw}"))),
        }
    }

    fn require<T: std::str::FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.get(key)?
            .ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError> {
        let Some((line, raw)) = self.0.get(key) else {
            return Ok(None);
        };
        raw.split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|_| CliError::Config(format!("line {line}: bad entry `{s}` in {key}")))
            })
            .collect::<Result<Vec<T>, _>>()
            .map(Some)
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
            let key = key.trim().to_string();
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("line {}: unknown key `{key}`", i + 1)));
            }
            if map.insert(key.clone(), (i + 1, value.trim().to_string())).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key `{key}`", i + 1)));
            }
        }
        let e = Entries(map);

        let mu: f64 = e.require("mu")?;
        let tag: String = e.require("system")?;
        let system = match tag.as_str() {
            "decoupled_power" => BuiltinSystem::DecoupledPower { mu },
            "perturbed_pendulum_product" => BuiltinSystem::PerturbedPendulumProduct {
                mu,
                epsilon: e.require("epsilon")?,
            },
            "coupled_growth_pendulum" => BuiltinSystem::CoupledGrowthPendulum {
                mu,
                epsilon: e.require("epsilon")?,
                s: e.require("s")?,
            },
            other => return Err(CliError::Config(format!("unknown system `{other}`"))),
        };

        let defaults = SolverConfig::default();
        let modes = e.get("modes")?.unwrap_or(defaults.modes);
        let solver = SolverConfig {
            modes,
            nodes: e.get("nodes")?.unwrap_or(4 * modes + 1),
            max_iterations: e.get("max_iterations")?.unwrap_or(defaults.max_iterations),
            tol_g: e.get("tol_g")?.unwrap_or(defaults.tol_g),
            random_starts: e.get("random_starts")?.unwrap_or(defaults.random_starts),
            torus_grid: e.get("torus_grid")?.unwrap_or(defaults.torus_grid),
            dedup_tol: e.get("dedup_tol")?.unwrap_or(defaults.dedup_tol),
            theta_grid: e.get("theta_grid")?.unwrap_or(defaults.theta_grid),
            polish_steps: defaults.polish_steps,
            seed: e.get("seed")?.unwrap_or(defaults.seed),
        };

        let sweep = match (
            e.list::<f64>("sweep_periods")?,
            e.get::<f64>("sweep_min")?,
            e.get::<f64>("sweep_max")?,
        ) {
            (Some(p), None, None) => Some(SweepGrid::Explicit(p)),
            (None, Some(min), Some(max)) => Some(SweepGrid::LogSpaced {
                min,
                max,
                points: e.get("sweep_points")?.unwrap_or(8),
            }),
            (None, None, None) => None,
            _ => {
                return Err(CliError::Config(
                    "give either sweep_periods or both sweep_min and sweep_max".into(),
                ))
            }
        };

        let cfg = Self {
            system,
            n: e.require("n")?,
            k: e.require("k")?,
            r: e.get("r")?,
            period: e.get("period")?.unwrap_or(1.0),
            v: e.list("v")?.ok_or_else(|| CliError::Config("missing required key `v`".into()))?,
            solver,
            steps: e.get("steps")?.unwrap_or(1000),
            samples: e.get("samples")?.unwrap_or(256),
            hypothesis_samples: e.get("hypothesis_samples")?.unwrap_or(10_000),
            sweep,
        };
        if cfg.v.len() != cfg.k {
            return Err(CliError::Config(format!(
                "v has {} components but k = {}",
                cfg.v.len(),
                cfg.k
            )));
        }
        Ok(cfg)
    }

    /// Applies `--seed`, `--modes` and `--quad`; `--modes` alone resets the node count to `4M + 1`.
    pub fn apply_overrides(&mut self, seed: Option<u64>, modes: Option<usize>, quad: Option<usize>) {
        if let Some(s) = seed {
            self.solver.seed = s;
        }
        if let Some(m) = modes {
            self.solver.modes = m;
            self.solver.nodes = 4 * m + 1;
        }
        if let Some(q) = quad {
            self.solver.nodes = q;
        }
    }
}
