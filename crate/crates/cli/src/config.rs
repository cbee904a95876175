//! Flat `key = value` run configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use hybrid_minnorm::benchmarks::Params;
use hybrid_minnorm::{
    make_pendulum, make_rotate_dissipate, make_timers, BenchmarkF64, PendulumParams, Priority, RotateParams,
    TimersParams,
};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Rotate,
    Pendulum,
    Timers,
}

impl SystemKind {
    pub fn param_keys(self) -> &'static [&'static str] {
        match self {
            SystemKind::Rotate => <RotateParams<f64> as Params>::KEYS,
            SystemKind::Pendulum => <PendulumParams<f64> as Params>::KEYS,
            SystemKind::Timers => <TimersParams<f64> as Params>::KEYS,
        }
    }

    /// Flow-time budget used when `solver.max_t` is not given.
    pub fn default_max_t(self) -> f64 {
        match self {
            SystemKind::Rotate => 20.0,
            SystemKind::Pendulum => 60.0,
            SystemKind::Timers => 40.0,
        }
    }
}

impl FromStr for SystemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rotate" => Ok(SystemKind::Rotate),
            "pendulum" => Ok(SystemKind::Pendulum),
            "timers" => Ok(SystemKind::Timers),
            other => Err(format!("unknown system '{other}' (expected rotate, pendulum or timers)")),
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemKind::Rotate => "rotate",
            SystemKind::Pendulum => "pendulum",
            SystemKind::Timers => "timers",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Practical,
    Global,
    Common,
}

impl FromStr for ModeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "practical" => Ok(ModeKind::Practical),
            "global" => Ok(ModeKind::Global),
            "common" => Ok(ModeKind::Common),
            other => Err(format!("unknown controller mode '{other}' (expected practical, global or common)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: SystemKind,
    /// Parameter overrides in the order given.
    pub params: Vec<(String, f64)>,
    pub x0: Option<Vec<f64>>,
    pub dt: f64,
    pub max_t: Option<f64>,
    pub max_j: usize,
    pub event_tol: f64,
    pub priority: Priority,
    pub mode: ModeKind,
    pub r: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: String,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            system: SystemKind::Rotate,
            params: Vec::new(),
            x0: None,
            dt: 1e-3,
            max_t: None,
            max_j: 100,
            event_tol: 1e-10,
            priority: Priority::Jump,
            mode: ModeKind::Practical,
            r: None,
            out: None,
            format: "csv".into(),
            seed: 0,
        }
    }
}

fn bad(key: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_num<V: FromStr>(key: &str, value: &str) -> Result<V, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| bad(key, format!("cannot parse '{value}'")))
}

pub fn parse_vector(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value.split(',').map(|p| parse_num::<f64>(key, p)).collect()
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key {
            "system" | "system.name" => self.system = value.parse().map_err(|e: String| bad(key, e))?,
            "x0" | "system.x0" => self.x0 = Some(parse_vector(key, value)?),
            "solver.dt" => self.dt = parse_num(key, value)?,
            "solver.max_t" => self.max_t = Some(parse_num(key, value)?),
            "solver.max_j" => self.max_j = parse_num(key, value)?,
            "solver.event_tol" => self.event_tol = parse_num(key, value)?,
            "solver.priority" => self.priority = value.parse().map_err(|e: hybrid_minnorm::Error| bad(key, e.to_string()))?,
            "controller.mode" => self.mode = value.parse().map_err(|e: String| bad(key, e))?,
            "controller.r" => self.r = Some(parse_num(key, value)?),
            "output.path" => self.out = Some(PathBuf::from(value)),
            "output.format" => {
                if value != "csv" {
                    return Err(bad(key, format!("unsupported format '{value}' (only csv)")));
                }
                self.format = value.to_string();
            }
            "seed" => self.seed = parse_num(key, value)?,
            _ => match key.strip_prefix("system.") {
                Some(p) if !p.is_empty() => self.params.push((p.to_string(), parse_num(key, value)?)),
                _ => return Err(bad(key, "unknown key")),
            },
        }
        Ok(())
    }

    /// Reads settings from config-file text. `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| bad(line, format!("line {} is not key = value", n + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn max_t(&self) -> f64 {
        self.max_t.unwrap_or_else(|| self.system.default_max_t())
    }

    /// Checks invariants that do not need the system built.
    pub fn validate(&self) -> Result<(), CliError> {
        for (k, _) in &self.params {
            if !self.system.param_keys().contains(&k.as_str()) {
                return Err(bad(
                    &format!("system.{k}"),
                    format!("not a parameter of {} (valid: {})", self.system, self.system.param_keys().join(", ")),
                ));
            }
        }
        if !(self.dt > 0.0) {
            return Err(bad("solver.dt", "must be positive"));
        }
        if !(self.max_t() > 0.0) {
            return Err(bad("solver.max_t", "must be positive"));
        }
        if !(self.event_tol > 0.0) {
            return Err(bad("solver.event_tol", "must be positive"));
        }
        if let Some(r) = self.r {
            if !(r >= 0.0) || (self.mode != ModeKind::Global && r == 0.0) {
                return Err(bad("controller.r", "must be > 0 in practical mode"));
            }
        }
        Ok(())
    }

    /// Builds the configured benchmark with its parameter overrides.
    pub fn benchmark(&self) -> Result<BenchmarkF64, CliError> {
        self.validate()?;
        fn apply<P: Params>(p: &mut P, params: &[(String, f64)]) -> Result<(), CliError> {
            for (k, v) in params {
                p.set(k, *v).map_err(|e| bad(&format!("system.{k}"), e.to_string()))?;
            }
            Ok(())
        }
        let built = match self.system {
            SystemKind::Rotate => {
                let mut p = RotateParams::default();
                apply(&mut p, &self.params)?;
                make_rotate_dissipate(p)
            }
            SystemKind::Pendulum => {
                let mut p = PendulumParams::default();
                apply(&mut p, &self.params)?;
                make_pendulum(p)
            }
            SystemKind::Timers => {
                let mut p = TimersParams::default();
                apply(&mut p, &self.params)?;
                make_timers(p)
            }
        };
        built.map_err(|e| CliError::Construction(e.to_string()))
    }
}
