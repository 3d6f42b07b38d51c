//! Arc geometry, field points and the coefficients of the reduced Biot–Savart denominator.
//!
//! The arc is `ξ(θ) = (R sin θ, R − R cos θ, 0)` for `θ ∈ (−L, L]`. It passes through the origin
//! with tangent `x̂`, normal `ŷ` and binormal `ẑ` there. For a field point `x̃ = |x|·(x₁, x₂, x₃)`
//! and `ε = |x|/R`,
//!
//! ```text
//! |x̃ − ξ(θ)|² = R² (c₁ + c₂ cos θ + c₃ sin θ)
//! c₁ = ε² + 2 − 2εx₂,   c₂ = 2εx₂ − 2,   c₃ = −2εx₁
//! ```
//!
//! `c₁` is often written with `x̃₂` and `c₂, c₃` with `|x|x₂, |x|x₁`; since `x̃ᵢ = |x|xᵢ` these agree.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::vector::Vec3;

/// Relative size of the default core cutoff.
pub const DEFAULT_CORE_CUTOFF: f64 = 1e-6;

/// A circular vortex arc of radius `R` spanning `θ ∈ (−L, L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcGeometry {
    pub radius: f64,
    pub kappa: f64,
    pub half_angle: f64,
    /// Prefactor applied to every velocity. `1` drops `Γ/4π`; see [`ArcGeometry::with_circulation`].
    pub circulation_scale: f64,
    /// Points closer than this to the filament are rejected.
    pub core_cutoff: f64,
}

impl ArcGeometry {
    pub fn new(radius: f64, half_angle: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return domain(format!("radius must be positive and finite, got {radius}"));
        }
        if !(half_angle > 0.0 && half_angle <= PI) {
            return domain(format!("half-angle must lie in (0, pi], got {half_angle}"));
        }
        Ok(ArcGeometry {
            radius,
            kappa: 1.0 / radius,
            half_angle,
            circulation_scale: 1.0,
            core_cutoff: DEFAULT_CORE_CUTOFF * radius,
        })
    }

    pub fn full_ring(radius: f64) -> Result<Self> {
        Self::new(radius, PI)
    }

    pub fn with_circulation_scale(mut self, scale: f64) -> Self {
        self.circulation_scale = scale;
        self
    }

    /// Restores physical units: velocities carry `Γ/4π`.
    pub fn with_circulation(self, gamma: f64) -> Self {
        self.with_circulation_scale(gamma / (4.0 * PI))
    }

    pub fn with_core_cutoff(mut self, cutoff: f64) -> Self {
        self.core_cutoff = cutoff;
        self
    }

    /// Point of the filament at parameter `θ`.
    pub fn point(&self, theta: f64) -> Vec3 {
        let (s, c) = theta.sin_cos();
        Vec3::new(self.radius * s, self.radius * (1.0 - c), 0.0)
    }

    /// `dξ/dθ`.
    pub fn tangent(&self, theta: f64) -> Vec3 {
        let (s, c) = theta.sin_cos();
        Vec3::new(self.radius * c, self.radius * s, 0.0)
    }
}

/// A field point in Cartesian and spherical form, measured from the arc's midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    pub cartesian: Vec3,
    pub norm: f64,
    /// Unit direction `(x₁, x₂, x₃)`; `ẑ` when `|x| = 0`.
    pub direction: Vec3,
    /// Azimuthal angle in the arc plane, measured from the tangent.
    pub gamma1: f64,
    /// Polar angle from the binormal.
    pub gamma2: f64,
}

impl FieldPoint {
    pub fn from_cartesian(x: Vec3) -> Self {
        let norm = x.norm();
        let direction = if norm > 0.0 {
            x * (1.0 / norm)
        } else {
            Vec3::new(0.0, 0.0, 1.0)
        };
        FieldPoint {
            cartesian: x,
            norm,
            direction,
            gamma1: direction.y().atan2(direction.x()),
            gamma2: direction.z().clamp(-1.0, 1.0).acos(),
        }
    }

    /// `x₁ = cos γ₁ sin γ₂`, `x₂ = sin γ₁ sin γ₂`, `x₃ = cos γ₂`.
    pub fn from_spherical(norm: f64, gamma1: f64, gamma2: f64) -> Self {
        let (s1, c1) = gamma1.sin_cos();
        let (s2, c2) = gamma2.sin_cos();
        let direction = Vec3::new(c1 * s2, s1 * s2, c2);
        FieldPoint {
            cartesian: direction * norm,
            norm,
            direction,
            gamma1,
            gamma2,
        }
    }

    /// Point at `ε = |x|/R` along the unit `direction`.
    pub fn from_epsilon(arc: &ArcGeometry, epsilon: f64, direction: Vec3) -> Self {
        let d = direction * (1.0 / direction.norm());
        let mut p = Self::from_cartesian(d * (epsilon * arc.radius));
        p.direction = d;
        p
    }

    pub fn epsilon(&self, arc: &ArcGeometry) -> f64 {
        self.norm * arc.kappa
    }
}

/// Scalars derived from one (arc, point) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub r: f64,
    /// `atan2(c₃, c₂)`, so that `c₂ cos θ + c₃ sin θ = r cos(θ − φ)`.
    pub phi: f64,
    pub k: f64,
    /// `1 − k²`, computed without cancellation.
    pub kc2: f64,
    pub l_plus: f64,
    pub l_minus: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub epsilon: f64,
    pub half_angle: f64,
    pub direction: Vec3,
}

impl EllipticParams {
    /// Derives the parameters without checking proximity to the filament.
    pub fn from_epsilon(epsilon: f64, direction: Vec3, half_angle: f64) -> Self {
        let [x1, x2, x3] = direction.0;
        let c1 = epsilon * epsilon + 2.0 - 2.0 * epsilon * x2;
        let c2 = 2.0 * epsilon * x2 - 2.0;
        let c3 = -2.0 * epsilon * x1;
        let r = c2.hypot(c3);
        let phi = c3.atan2(c2);
        let phi = if phi <= -PI { PI } else { phi };
        let p = c1 + r;
        // c₁² − r² = ε²[(2x₂ − ε)² + 4x₃²]
        let t = 2.0 * x2 - epsilon;
        let kc2 = epsilon * epsilon * (t * t + 4.0 * x3 * x3) / (p * p);
        let k = (2.0 * r / p).sqrt().min(1.0);
        let l_plus = 0.5 * (phi + half_angle);
        let l_minus = 0.5 * (phi - half_angle);
        EllipticParams {
            c1,
            c2,
            c3,
            r,
            phi,
            k,
            kc2,
            l_plus,
            l_minus,
            lambda_plus: l_plus.sin(),
            lambda_minus: l_minus.sin(),
            epsilon,
            half_angle,
            direction,
        }
    }

    /// `c₁ + r`.
    pub fn p(&self) -> f64 {
        self.c1 + self.r
    }

    /// `D(θ) = c₁ + c₂ cos θ + c₃ sin θ`, evaluated as `P(1 − k² + k² cos²((θ − φ)/2))`.
    pub fn denominator(&self, theta: f64) -> f64 {
        let c = (0.5 * (theta - self.phi)).cos();
        self.p() * (self.kc2 + self.k * self.k * c * c)
    }

    /// Parameter of the closest filament point, `φ + π` wrapped into `(−π, π]`.
    pub fn closest_theta(&self) -> f64 {
        let t = self.phi + PI;
        if t > PI {
            t - 2.0 * PI
        } else {
            t
        }
    }

    /// Minimum of `D` over `[−L, L]`.
    pub fn min_denominator(&self) -> f64 {
        let t = self.closest_theta();
        if t.abs() <= self.half_angle {
            self.kc2 * self.p()
        } else {
            self.denominator(self.half_angle)
                .min(self.denominator(-self.half_angle))
        }
    }
}

/// Coefficients for `x` relative to `arc`, rejecting points inside the core cutoff.
pub fn coefficients(arc: &ArcGeometry, x: &FieldPoint) -> Result<EllipticParams> {
    let p = EllipticParams::from_epsilon(x.epsilon(arc), x.direction, arc.half_angle);
    let distance = arc.radius * p.min_denominator().max(0.0).sqrt();
    if !(distance > arc.core_cutoff) {
        return Err(Error::CoreProximity {
            distance,
            cutoff: arc.core_cutoff,
        });
    }
    Ok(p)
}
