//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment. A `preset` key, wherever it
//! appears, is applied first and the remaining keys override it.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::frac_kernel::TimeMesh;
use crate::models::{ModelKind, ModelSpec};
use crate::schemes::SchemeKind;
use crate::spectral::Grid;

#[derive(Clone, Debug, PartialEq)]
pub enum MeshSpec {
    Uniform { dt: f64, nsteps: usize },
    Graded { n: usize, r: f64, t_end: f64 },
    /// Whitespace-separated time points in a text file.
    File(PathBuf),
}

impl MeshSpec {
    pub fn build(&self) -> Result<TimeMesh> {
        match self {
            MeshSpec::Uniform { dt, nsteps } => TimeMesh::uniform(*dt, *nsteps),
            MeshSpec::Graded { n, r, t_end } => TimeMesh::graded(*n, *r, *t_end),
            MeshSpec::File(path) => {
                let text = std::fs::read_to_string(path)?;
                let points = text
                    .split_whitespace()
                    .map(|s| {
                        s.parse::<f64>().map_err(|e| Error::Config {
                            key: "mesh_file".into(),
                            msg: format!("{}: bad time point `{s}`: {e}", path.display()),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                TimeMesh::from_points(points)
            }
        }
    }
}

/// Named initial data, or a snapshot file.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    /// Six-fold flower interface centred in the domain.
    Flower,
    /// I.i.d. uniform values on `[-1, 1]`, seeded by the run seed.
    Random,
    /// `0.1 [sin 3x sin 2y + sin 5x sin 5y]`.
    MbeWaves,
    /// `amp sin(2 pi x / Lx) cos(2 pi y / Ly)` plus an offset.
    Smooth { amp: f64, offset: f64 },
    Constant(f64),
    Snapshot(PathBuf),
}

impl FromStr for InitialCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Config {
            key: "initial".into(),
            msg,
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| bad(format!("`{v}`: {e}")));
        match s.split_once(':') {
            Some(("snapshot", path)) => Ok(InitialCondition::Snapshot(PathBuf::from(path.trim()))),
            Some(("constant", v)) => Ok(InitialCondition::Constant(num(v)?)),
            Some(("smooth", v)) => {
                let mut it = v.split(',');
                let amp = num(it.next().unwrap_or("0.5"))?;
                let offset = it.next().map(num).transpose()?.unwrap_or(0.0);
                Ok(InitialCondition::Smooth { amp, offset })
            }
            None => match s {
                "flower" => Ok(InitialCondition::Flower),
                "random" => Ok(InitialCondition::Random),
                "mbe_waves" => Ok(InitialCondition::MbeWaves),
                "smooth" => Ok(InitialCondition::Smooth { amp: 0.5, offset: 0.0 }),
                other => Err(bad(format!(
                    "unknown initial condition `{other}` (expected flower, random, mbe_waves, smooth[:amp,offset], constant:<c> or snapshot:<path>)"
                ))),
            },
            Some((other, _)) => Err(bad(format!("unknown initial condition `{other}`"))),
        }
    }
}

impl fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialCondition::Flower => write!(f, "flower"),
            InitialCondition::Random => write!(f, "random"),
            InitialCondition::MbeWaves => write!(f, "mbe_waves"),
            InitialCondition::Smooth { amp, offset } => write!(f, "smooth:{amp},{offset}"),
            InitialCondition::Constant(c) => write!(f, "constant:{c}"),
            InitialCondition::Snapshot(p) => write!(f, "snapshot:{}", p.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub epsilon: f64,
    pub gamma: f64,
    pub s: f64,
    pub l_cap: f64,
    pub c0: f64,
    pub alpha: f64,
    pub scheme: SchemeKind,
    pub mesh: MeshSpec,
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub initial: InitialCondition,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Number of snapshots written after the initial one; 0 disables them.
    pub snapshots: usize,
    pub check_residuals: bool,
    /// Two-thirds filter on the explicit nonlinear term.
    pub dealias: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        crate::harness::presets::preset("ac_flower").expect("built-in preset")
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| Error::Config {
        key: key.into(),
        msg: format!("cannot parse `{value}`: {e}"),
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config {
            key: key.into(),
            msg: format!("expected a boolean, got `{value}`"),
        }),
    }
}

impl RunConfig {
    /// Parses the text format described in the module docs.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.apply_str(text)?;
        Ok(cfg)
    }

    /// Applies the keys of `text` on top of `self`; a `preset` key replaces
    /// `self` before the other keys are applied.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config {
                key: format!("line {}", lineno + 1),
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        if let Some((_, name)) = pairs.iter().find(|(k, _)| k == "preset") {
            *self = crate::harness::presets::preset(name)?;
        }
        for (k, v) in pairs.iter().filter(|(k, _)| k != "preset") {
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse_str(&std::fs::read_to_string(path)?)
    }

    /// Applies one `key = value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "model" => self.model = parse(key, value)?,
            "epsilon" | "eps" => self.epsilon = parse(key, value)?,
            "epsilon2" | "eps2" => self.epsilon = parse::<f64>(key, value)?.sqrt(),
            "gamma" => self.gamma = parse(key, value)?,
            "S" | "s" => self.s = parse(key, value)?,
            "L" | "l_cap" => self.l_cap = parse(key, value)?,
            "C0" | "c0" => self.c0 = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "scheme" => self.scheme = parse(key, value)?,
            "mesh" => {
                self.mesh = match value {
                    "uniform" => match self.mesh {
                        MeshSpec::Uniform { .. } => self.mesh.clone(),
                        _ => MeshSpec::Uniform { dt: 0.01, nsteps: 100 },
                    },
                    "graded" => match self.mesh {
                        MeshSpec::Graded { .. } => self.mesh.clone(),
                        _ => MeshSpec::Graded { n: 100, r: 1.2, t_end: 1.0 },
                    },
                    _ => {
                        return Err(Error::Config {
                            key: key.into(),
                            msg: format!("expected uniform or graded (or set mesh_file), got `{value}`"),
                        })
                    }
                }
            }
            "dt" | "nsteps" => {
                let (mut dt, mut nsteps) = match self.mesh {
                    MeshSpec::Uniform { dt, nsteps } => (dt, nsteps),
                    _ => (0.01, 100),
                };
                if key == "dt" {
                    dt = parse(key, value)?;
                } else {
                    nsteps = parse(key, value)?;
                }
                self.mesh = MeshSpec::Uniform { dt, nsteps };
            }
            "N" | "r" | "T" => {
                let (mut n, mut r, mut t_end) = match self.mesh {
                    MeshSpec::Graded { n, r, t_end } => (n, r, t_end),
                    _ => (100, 1.2, 1.0),
                };
                match key {
                    "N" => n = parse(key, value)?,
                    "r" => r = parse(key, value)?,
                    _ => t_end = parse(key, value)?,
                }
                self.mesh = MeshSpec::Graded { n, r, t_end };
            }
            "mesh_file" => self.mesh = MeshSpec::File(PathBuf::from(value)),
            "nx" => self.nx = parse(key, value)?,
            "ny" => self.ny = parse(key, value)?,
            "grid" => {
                let (a, b) = value.split_once('x').unwrap_or((value, value));
                self.nx = parse(key, a.trim())?;
                self.ny = parse(key, b.trim())?;
            }
            "Lx" | "lx" => self.lx = parse(key, value)?,
            "Ly" | "ly" => self.ly = parse(key, value)?,
            "domain" => {
                let l = parse(key, value)?;
                self.lx = l;
                self.ly = l;
            }
            "initial" => self.initial = value.parse()?,
            "seed" => self.seed = parse(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "snapshots" => self.snapshots = parse(key, value)?,
            "check_residuals" => self.check_residuals = parse_bool(key, value)?,
            "dealias" => self.dealias = parse_bool(key, value)?,
            _ => {
                return Err(Error::Config {
                    key: key.into(),
                    msg: "unknown key".into(),
                })
            }
        }
        Ok(())
    }

    pub fn model_spec(&self) -> Result<ModelSpec> {
        ModelSpec::new(self.model, self.epsilon, self.gamma, self.s, self.l_cap, self.c0)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.nx, self.ny, self.lx, self.ly)
    }

    /// Checks every field that can be checked without running.
    pub fn validate(&self) -> Result<()> {
        let wrap = |key: &str, e: Error| Error::Config {
            key: key.into(),
            msg: e.to_string(),
        };
        self.model_spec().map_err(|e| wrap("model", e))?;
        self.grid().map_err(|e| wrap("grid", e))?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config {
                key: "alpha".into(),
                msg: format!("must lie in (0, 1], got {}", self.alpha),
            });
        }
        if self.scheme == SchemeKind::StabilizedL1 && self.model == ModelKind::MbeSlope {
            return Err(Error::Config {
                key: "scheme".into(),
                msg: "mbe_slope has no stabilized scheme; use sav1 or l1_sav".into(),
            });
        }
        if !matches!(self.mesh, MeshSpec::File(_)) {
            self.mesh.build().map_err(|e| wrap("mesh", e))?;
        }
        Ok(())
    }

    /// The configuration in the text format, with every key explicit.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            s.push_str(&format!("{k} = {v}\n"));
        };
        kv("model", self.model.name().into());
        kv("epsilon", format!("{}", self.epsilon));
        kv("gamma", format!("{}", self.gamma));
        kv("S", format!("{}", self.s));
        kv("L", format!("{}", self.l_cap));
        kv("C0", format!("{}", self.c0));
        kv("alpha", format!("{}", self.alpha));
        kv("scheme", self.scheme.name().into());
        match &self.mesh {
            MeshSpec::Uniform { dt, nsteps } => {
                kv("dt", format!("{dt}"));
                kv("nsteps", format!("{nsteps}"));
            }
            MeshSpec::Graded { n, r, t_end } => {
                kv("N", format!("{n}"));
                kv("r", format!("{r}"));
                kv("T", format!("{t_end}"));
            }
            MeshSpec::File(p) => kv("mesh_file", p.display().to_string()),
        }
        kv("grid", format!("{}x{}", self.nx, self.ny));
        kv("Lx", format!("{}", self.lx));
        kv("Ly", format!("{}", self.ly));
        kv("initial", self.initial.to_string());
        kv("seed", format!("{}", self.seed));
        if let Some(out) = &self.out {
            kv("out", out.display().to_string());
        }
        kv("snapshots", format!("{}", self.snapshots));
        kv("check_residuals", format!("{}", self.check_residuals));
        kv("dealias", format!("{}", self.dealias));
        s
    }
}
