//! Ground-truth velocities by adaptive quadrature.
//!
//! Two independent routes are provided: the reduced component integrals
//!
//! ```text
//! v₁ = −εκ x₃ ∫ sin θ D^{−3/2}
//! v₂ =  εκ x₃ ∫ cos θ D^{−3/2}
//! v₃ =  εκ ∫ (x₁ sin θ − x₂ cos θ) D^{−3/2} + κ ∫ (cos θ − 1) D^{−3/2}
//! ```
//!
//! and the raw integrand `(x − ξ) × dξ / |x − ξ|³`.

use crate::error::{domain, Result};
use crate::geometry::{coefficients, ArcGeometry, EllipticParams, FieldPoint};
use crate::quad::{integrate, QuadOptions};
use crate::vector::Vec3;

/// Velocity in the tangent/normal/binormal frame at the arc midpoint.
///
/// That frame coincides with the global basis, so `tangent = v₁`, `normal = v₂`, `binormal = v₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameVelocity {
    pub tangent: f64,
    pub normal: f64,
    pub binormal: f64,
    pub cartesian: Vec3,
}

impl FrameVelocity {
    pub fn from_cartesian(v: Vec3) -> Self {
        FrameVelocity {
            tangent: v.x(),
            normal: v.y(),
            binormal: v.z(),
            cartesian: v,
        }
    }

    pub fn binormal_only(b: f64) -> Self {
        Self::from_cartesian(Vec3::new(0.0, 0.0, b))
    }

    pub fn norm(&self) -> f64 {
        self.cartesian.norm()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_cartesian(self.cartesian * s)
    }

    /// `|v_t| + |v_n|`.
    pub fn non_binormal(&self) -> f64 {
        self.tangent.abs() + self.normal.abs()
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return domain(format!("quadrature tolerance must lie in (0, 1e-6], got {tol}"));
    }
    Ok(())
}

fn breakpoints(p: &EllipticParams) -> Vec<f64> {
    let t = p.closest_theta();
    if t.abs() < p.half_angle {
        vec![t]
    } else {
        Vec::new()
    }
}

/// `[∫D^{−3/2}, ∫cos θ D^{−3/2}, ∫sin θ D^{−3/2}]` over `[−L, L]` to absolute accuracy `tol`.
pub fn moment_integrals(p: &EllipticParams, tol: f64) -> Result<[f64; 3]> {
    let q = integrate(
        |t| {
            let d = p.denominator(t);
            let w = 1.0 / (d * d.sqrt());
            let (s, c) = t.sin_cos();
            [w, c * w, s * w]
        },
        -p.half_angle,
        p.half_angle,
        &breakpoints(p),
        &QuadOptions::absolute(tol),
    )?;
    Ok(q.value)
}

/// Velocity from the three component integrals, each to absolute accuracy `tol`.
pub fn velocity_components_quadrature(arc: &ArcGeometry, x: &FieldPoint, tol: f64) -> Result<FrameVelocity> {
    check_tol(tol)?;
    let p = coefficients(arc, x)?;
    let eps = p.epsilon;
    let kappa = arc.kappa;
    let [x1, x2, x3] = p.direction.0;
    // Each velocity component is a combination of the moments with weights at most 2κ(1 + ε).
    let weight = 2.0 * kappa * (1.0 + eps) * arc.circulation_scale.abs().max(f64::MIN_POSITIVE);
    let [j0, jc, js] = moment_integrals(&p, tol / weight)?;
    let v = Vec3::new(
        -eps * kappa * x3 * js,
        eps * kappa * x3 * jc,
        eps * kappa * (x1 * js - x2 * jc) + kappa * (jc - j0),
    );
    Ok(FrameVelocity::from_cartesian(v * arc.circulation_scale))
}

/// Velocity from the raw Biot–Savart cross-product integrand.
pub fn velocity_crossproduct_quadrature(arc: &ArcGeometry, x: &FieldPoint, tol: f64) -> Result<FrameVelocity> {
    check_tol(tol)?;
    let p = coefficients(arc, x)?;
    let target = tol / arc.circulation_scale.abs().max(f64::MIN_POSITIVE);
    let xv = x.cartesian;
    let q = integrate(
        |t| {
            let d = xv - arc.point(t);
            let r = d.norm();
            (d.cross(&arc.tangent(t)) * (1.0 / (r * r * r))).0
        },
        -arc.half_angle,
        arc.half_angle,
        &breakpoints(&p),
        &QuadOptions::absolute(target),
    )?;
    Ok(FrameVelocity::from_cartesian(Vec3(q.value) * arc.circulation_scale))
}
