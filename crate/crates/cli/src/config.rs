//! Settings assembled from defaults, a `key=value` file and flags.

use std::collections::BTreeMap;
use std::path::Path;

use exprays::approximation::SearchBudget;
use exprays::numerics::{Derivative, SolverConfig, TraceConfig};
use exprays::render::{Palette, DEFAULT_ESCAPE_THRESHOLD};
use exprays::separation::SeparationConfig;

#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub solver: SolverConfig,
    pub separation: SeparationConfig,
    pub enumeration_limit: usize,
    pub max_iter: u32,
    pub escape_threshold: f64,
    pub palette: Palette,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            solver: SolverConfig::default(),
            separation: SeparationConfig::default(),
            enumeration_limit: exprays::combinatorics::DEFAULT_ENUMERATION_LIMIT,
            max_iter: 100,
            escape_threshold: DEFAULT_ESCAPE_THRESHOLD,
            palette: Palette::Gray,
        }
    }
}

pub const KEYS: &[&str] = &[
    "tol",
    "ratio",
    "max_step",
    "t_big",
    "strip_potential",
    "bucket_width",
    "collision_radius",
    "derivative",
    "newton_max_iter",
    "parameter_residual_tol",
    "ray_t_hi",
    "landing_t",
    "landing_tol",
    "seed_t",
    "seed_t_min",
    "seed_agreement",
    "parabolic_seed_t",
    "parameter_landing_tol",
    "parameter_landing_t_min",
    "margin",
    "truncation",
    "clearance_factor",
    "n_min",
    "max_period",
    "enumeration_limit",
    "max_iter",
    "escape_threshold",
    "palette",
];

/// Parses `key=value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(format!("line {}: unknown key {k}", i + 1));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("invalid value {v:?} for {key}"))
}

impl Settings {
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        let trace: &mut TraceConfig = &mut self.solver.trace;
        match key {
            "tol" => self.solver.tol = num(key, v)?,
            "ratio" => trace.ratio = num(key, v)?,
            "max_step" => trace.max_step = num(key, v)?,
            "t_big" => trace.t_big = num(key, v)?,
            "strip_potential" => trace.strip_potential = num(key, v)?,
            "bucket_width" => trace.bucket_width = num(key, v)?,
            "collision_radius" => trace.collision_radius = num(key, v)?,
            "derivative" => {
                trace.derivative = match v {
                    "analytic" => Derivative::Analytic,
                    "central-difference" | "fd" => Derivative::CentralDifference,
                    _ => return Err(format!("invalid derivative {v:?}")),
                }
            }
            "newton_max_iter" => {
                trace.newton_max_iter = num(key, v)?;
                self.solver.newton_max_iter = trace.newton_max_iter;
            }
            "parameter_residual_tol" => trace.parameter_residual_tol = num(key, v)?,
            "ray_t_hi" => self.solver.ray_t_hi = num(key, v)?,
            "landing_t" => self.solver.landing_t = num(key, v)?,
            "landing_tol" => self.solver.landing_tol = num(key, v)?,
            "seed_t" => self.solver.seed_t = num(key, v)?,
            "seed_t_min" => self.solver.seed_t_min = num(key, v)?,
            "seed_agreement" => self.solver.seed_agreement = num(key, v)?,
            "parabolic_seed_t" => self.solver.parabolic_seed_t = num(key, v)?,
            "parameter_landing_tol" => self.solver.parameter_landing_tol = num(key, v)?,
            "parameter_landing_t_min" => self.solver.parameter_landing_t_min = num(key, v)?,
            "margin" => self.separation.margin = num(key, v)?,
            "truncation" => self.separation.truncation = num(key, v)?,
            "clearance_factor" => self.separation.clearance_factor = num(key, v)?,
            "n_min" => self.separation.n_min = num(key, v)?,
            "max_period" => {
                self.separation.budget = SearchBudget {
                    max_period: Some(num(key, v)?),
                    ..self.separation.budget.clone()
                }
            }
            "enumeration_limit" => self.enumeration_limit = num(key, v)?,
            "max_iter" => self.max_iter = num(key, v)?,
            "escape_threshold" => self.escape_threshold = num(key, v)?,
            "palette" => {
                self.palette = match v {
                    "gray" => Palette::Gray,
                    "color" => Palette::Color,
                    _ => return Err(format!("invalid palette {v:?}")),
                }
            }
            _ => return Err(format!("unknown key {key}")),
        }
        Ok(())
    }

    /// Defaults, then the config file, then `key=value` overrides.
    pub fn load(file: Option<&Path>, overrides: &[(String, String)]) -> Result<Self, String> {
        let mut s = Settings::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            for (k, v) in parse_config(&text)? {
                s.set(&k, &v)?;
            }
        }
        for (k, v) in overrides {
            s.set(k, v)?;
        }
        s.separation.solver = s.solver.clone();
        Ok(s)
    }
}
