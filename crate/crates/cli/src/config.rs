use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use glie::geometry::ArcGeometry;
use glie::vector::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::CliError;

/// Parses `1.5`, `-2e-3`, `pi`, `0.5pi` or `-pi`.
fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.strip_suffix("pi") {
        Some("") => PI,
        Some("-") => -PI,
        Some(m) => m.parse::<f64>().map_err(|e| format!("bad number '{s}': {e}"))? * PI,
        None => s.parse::<f64>().map_err(|e| format!("bad number '{s}': {e}"))?,
    };
    if !value.is_finite() {
        return Err(format!("number '{s}' is not finite"));
    }
    Ok(value)
}

/// Inclusive linear grid `a:b:n`; a bare `a` means the single point `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRange {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl GridRange {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.end
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for GridRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [a] => {
                let a = parse_number(a)?;
                Ok(GridRange {
                    start: a,
                    end: a,
                    count: 1,
                })
            }
            [a, b, n] => {
                let count: usize = n.trim().parse().map_err(|e| format!("bad grid count '{n}': {e}"))?;
                if count == 0 {
                    return Err("grid count must be at least 1".into());
                }
                Ok(GridRange {
                    start: parse_number(a)?,
                    end: parse_number(b)?,
                    count,
                })
            }
            _ => Err(format!("expected a:b:n, got '{s}'")),
        }
    }
}

impl fmt::Display for GridRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.count)
    }
}

/// Comma-separated triple `x,y,z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple(pub [f64; 3]);

impl FromStr for Triple {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(format!("expected x,y,z, got '{s}'"));
        }
        Ok(Triple([
            parse_number(parts[0])?,
            parse_number(parts[1])?,
            parse_number(parts[2])?,
        ]))
    }
}

impl From<Triple> for Vec3 {
    fn from(t: Triple) -> Vec3 {
        Vec3(t.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Evaluator {
    Oracle,
    Elliptic,
    Local,
    Glie,
    Lia,
}

impl Evaluator {
    pub fn name(self) -> &'static str {
        match self {
            Evaluator::Oracle => "oracle",
            Evaluator::Elliptic => "elliptic",
            Evaluator::Local => "local",
            Evaluator::Glie => "glie",
            Evaluator::Lia => "lia",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Relative or absolute accuracy target, in (0, 1e-3]; the oracle needs at most 1e-6.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl OutputArgs {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0 && self.tol <= 1e-3) {
            return Err(CliError::Config(format!(
                "--tol must lie in (0, 1e-3], got {}",
                self.tol
            )));
        }
        Ok(())
    }

    pub fn metadata(&self, meta: &mut Map<String, Value>) {
        meta.insert("tol".into(), json!(self.tol));
        meta.insert(
            "format".into(),
            json!(match self.format {
                Format::Csv => "csv",
                Format::Json => "json",
            }),
        );
    }
}

#[derive(Debug, Clone, Args)]
pub struct ArcArgs {
    /// Radius of curvature R.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Arc half-angle L in radians, at most pi.
    #[arg(long, default_value = "0.1")]
    pub half_angle: Number,
    /// Multiplier applied to every velocity (Γ/4π).
    #[arg(long, default_value_t = 1.0)]
    pub circulation_scale: f64,
    /// Core cutoff as a fraction of R.
    #[arg(long, default_value_t = glie::geometry::DEFAULT_CORE_CUTOFF)]
    pub core_cutoff: f64,
}

/// Scalar flag that accepts the same number syntax as the grid ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Number(pub f64);

impl FromStr for Number {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_number(s).map(Number)
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl ArcArgs {
    pub fn arc(&self) -> Result<ArcGeometry, CliError> {
        if self.core_cutoff.is_nan() || self.core_cutoff <= 0.0 {
            return Err(CliError::Config(format!(
                "--core-cutoff must be positive, got {}",
                self.core_cutoff
            )));
        }
        if !self.circulation_scale.is_finite() {
            return Err(CliError::Config("--circulation-scale must be finite".into()));
        }
        let arc = ArcGeometry::new(self.radius, self.half_angle.0).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(arc
            .with_circulation_scale(self.circulation_scale)
            .with_core_cutoff(self.core_cutoff))
    }

    pub fn metadata(&self, meta: &mut Map<String, Value>) {
        meta.insert("radius".into(), json!(self.radius));
        meta.insert("half_angle".into(), json!(self.half_angle.0));
        meta.insert("circulation_scale".into(), json!(self.circulation_scale));
        meta.insert("core_cutoff".into(), json!(self.core_cutoff));
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Distances ε = |x|/R as a:b:n.
    #[arg(long, default_value = "0.01:0.05:5")]
    pub eps_range: GridRange,
    /// Azimuthal angles γ₁ as a:b:n.
    #[arg(long, default_value = "0:pi:5")]
    pub gamma1_range: GridRange,
    /// Polar angles γ₂ as a:b:n.
    #[arg(long, default_value = "0.5pi")]
    pub gamma2_range: GridRange,
    /// Draw this many random points instead of the tensor grid.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Seed for --samples.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Grid point as (ε, unit direction).
pub type GridPoint = (f64, Vec3);

impl GridArgs {
    pub fn points(&self) -> Result<Vec<GridPoint>, CliError> {
        let (e0, e1) = (self.eps_range.start, self.eps_range.end);
        if !(e0 > 0.0 && e1 > 0.0) {
            return Err(CliError::Config(format!(
                "--eps-range must be positive, got {}",
                self.eps_range
            )));
        }
        if let Some(n) = self.samples {
            if n == 0 {
                return Err(CliError::Config("--samples must be at least 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            let (lo, hi) = (e0.min(e1), e0.max(e1));
            return Ok((0..n)
                .map(|_| {
                    let eps = if hi > lo { rng.gen_range(lo..hi) } else { lo };
                    let z: f64 = rng.gen_range(-1.0..1.0);
                    let az: f64 = rng.gen_range(-PI..PI);
                    let s = (1.0 - z * z).sqrt();
                    (eps, Vec3::new(s * az.cos(), s * az.sin(), z))
                })
                .collect());
        }
        let mut out = Vec::new();
        for eps in self.eps_range.points() {
            for g1 in self.gamma1_range.points() {
                for g2 in self.gamma2_range.points() {
                    out.push((eps, glie::induction::direction_from_angles(g1, g2)));
                }
            }
        }
        Ok(out)
    }

    pub fn metadata(&self, meta: &mut Map<String, Value>) {
        meta.insert("eps_range".into(), json!(self.eps_range.to_string()));
        meta.insert("gamma1_range".into(), json!(self.gamma1_range.to_string()));
        meta.insert("gamma2_range".into(), json!(self.gamma2_range.to_string()));
        meta.insert("samples".into(), json!(self.samples));
        meta.insert("seed".into(), json!(self.seed));
    }
}
