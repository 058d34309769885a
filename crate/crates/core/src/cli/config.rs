use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{g_bound, is_admissible, z_of_kn, ConeFamilyPoint, Quintuple};
use crate::solver::{solve_with, Grid, ScalarField, SolveOptions, Trajectory, DEFAULT_BLOWUP_CAP};
use crate::verifier::{Variant, VerifyOptions, CLAIM_THRESHOLD, DEFAULT_LAYERS, DEFAULT_RADIUS, DEFAULT_TOLERANCE};

/// Point `(z+1, k, 1, z+1, k+1)·scale` of the canonical family; `z` defaults
/// to the maximiser `z(k, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub k: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

fn default_stride() -> usize {
    1
}

fn default_true() -> bool {
    true
}

fn default_cap() -> f64 {
    DEFAULT_BLOWUP_CAP
}

fn default_wave() -> [i64; 2] {
    [1, 0]
}

/// Initial data; `wave` is the integer wave vector `m`, so the phase is
/// `2π m·x / L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `mean + amplitude · sin(phase)`.
    Sine {
        mean: f64,
        amplitude: f64,
        #[serde(default = "default_wave")]
        wave: [i64; 2],
    },
    /// `scale · exp(−cos(phase))`, strongly concave `log u` near `phase = π`.
    ExpCos {
        scale: f64,
        #[serde(default = "default_wave")]
        wave: [i64; 2],
    },
    Constant { value: f64 },
}

impl InitialData {
    pub fn sample(&self, grid: Grid) -> Result<ScalarField> {
        let phase = |x: &[f64], wave: [i64; 2]| {
            let dot = wave[0] as f64 * x[0] + x.get(1).map_or(0.0, |y| wave[1] as f64 * y);
            2.0 * PI * dot / grid.length
        };
        match *self {
            InitialData::Sine { mean, amplitude, wave } => {
                ScalarField::from_fn(grid, 0.0, |x| mean + amplitude * phase(x, wave).sin())
            }
            InitialData::ExpCos { scale, wave } => {
                ScalarField::from_fn(grid, 0.0, |x| scale * (-phase(x, wave).cos()).exp())
            }
            InitialData::Constant { value } => ScalarField::constant(grid, value, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default = "default_claim")]
    pub claim_threshold: f64,
}

fn default_margin() -> f64 {
    DEFAULT_TOLERANCE
}

fn default_claim() -> f64 {
    CLAIM_THRESHOLD
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { margin: DEFAULT_TOLERANCE, claim_threshold: CLAIM_THRESHOLD }
    }
}

fn default_count() -> usize {
    50
}

fn default_layers() -> usize {
    DEFAULT_LAYERS
}

fn default_radius() -> usize {
    DEFAULT_RADIUS
}

/// Random Harnack queries drawn when no queries file is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnackSpec {
    pub variant: Variant,
    /// Quintuple for the path estimates; defaults to the run quintuple.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quintuple: Option<Quintuple>,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default = "default_radius")]
    pub radius: usize,
    #[serde(default)]
    pub midpoint: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: u32,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quintuple: Option<Quintuple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    pub grid: Grid,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_stride")]
    pub stride: usize,
    pub initial: InitialData,
    #[serde(default = "default_true")]
    pub reaction: bool,
    #[serde(default = "default_cap")]
    pub blowup_cap: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub harnack: Option<HarnackSpec>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.check_shape()?;
        Ok(config)
    }

    /// Structural checks that do not involve the estimates themselves.
    pub fn check_shape(&self) -> Result<()> {
        self.grid.validate().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::Config(format!("p must exceed 1, got {}", self.p)));
        }
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if self.quintuple.is_some() && self.family.is_some() {
            return Err(Error::Config("give either quintuple or family, not both".into()));
        }
        if !(self.tolerances.margin >= 0.0 && self.tolerances.claim_threshold.is_finite()) {
            return Err(Error::Config("tolerances must be non-negative and finite".into()));
        }
        Ok(())
    }

    /// The quintuple, resolving a family point if needed.
    pub fn resolved_quintuple(&self) -> Result<Quintuple> {
        match (self.quintuple, self.family) {
            (Some(q), None) => Ok(q),
            (None, Some(f)) => {
                let z = match f.z {
                    Some(z) => z,
                    None => z_of_kn(f.k, self.n)?,
                };
                Ok(ConeFamilyPoint::new(self.n, f.k, z, f.scale).quintuple())
            }
            (None, None) => Err(Error::Config("config needs a quintuple or a family point".into())),
            (Some(_), Some(_)) => Err(Error::Config("give either quintuple or family, not both".into())),
        }
    }

    /// Admissibility and `1 < p < 1 + G(q)` for `q`, as configuration errors.
    pub fn check_theorem(&self, q: &Quintuple) -> Result<()> {
        let report = is_admissible(q, self.n, q.default_tolerance())?;
        if !report.member {
            return Err(Error::Config(format!(
                "quintuple {q} is not admissible in dimension {} (margins {:?})",
                self.n,
                report.margins()
            )));
        }
        let g = g_bound(q)?;
        if self.p >= 1.0 + g {
            return Err(Error::Config(format!(
                "p = {} violates the exponent bound p < 1 + G = {:.12}",
                self.p,
                1.0 + g
            )));
        }
        if self.n as usize != self.grid.dim {
            return Err(Error::Config(format!(
                "n = {} must equal the grid dimension {}",
                self.n, self.grid.dim
            )));
        }
        Ok(())
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions { stride: self.stride, reaction: self.reaction, blowup_cap: self.blowup_cap }
    }

    pub fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            tolerance: self.tolerances.margin,
            claim_threshold: self.tolerances.claim_threshold,
        }
    }

    pub fn solve(&self) -> Result<Trajectory> {
        let u0 = self.initial.sample(self.grid)?;
        solve_with(&u0, self.t_end, self.dt, self.p, &self.solve_options())
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}
