//! Elliptic-integral and asymptotic forms of the induced velocity.
//!
//! Writing `ψ = (φ − θ)/2` turns the denominator into `D = P(1 − k² sin²ψ)` with `P = c₁ + r`, so
//! the three moments `∫D^{−3/2}{1, cos θ, sin θ}` reduce to `F`, `G = ∫sin²ψ/Δ³` and an
//! elementary term. The velocity follows from those moments exactly.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use crate::elliptic::{e_mc, f_mc, g_mc, k_mc};
use crate::error::{domain, Error, Result};
use crate::geometry::{coefficients, ArcGeometry, EllipticParams, FieldPoint};
use crate::karp_sitnik::series_f;
use crate::oracle::FrameVelocity;
use crate::vector::Vec3;

/// Below this modulus `dI/dε` is assembled from the moments instead of `Ω`.
const SMALL_MODULUS: f64 = 1e-2;

/// Smallest `1 − k²` accepted by the differentiation formula.
pub const MIN_MODULUS_COMPLEMENT: f64 = 1e-12;

/// Largest `ε` inside the documented validity region of [`velocity_glie_asymptotic`].
pub const GLIE_MAX_EPSILON: f64 = 0.05;

/// Largest half-angle inside the documented validity region of [`velocity_glie_asymptotic`].
pub const GLIE_MAX_HALF_ANGLE: f64 = 0.2;

/// Constants of the elliptic form.
///
/// `A₂ = 2/√P` is `I/ΔF`, `A₁/2 = dA₂/dε`, `A₃ = dφ/dε` and `A₄ = dk/dε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InductionConstants {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub beta4: f64,
    pub a: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    /// Coefficient of `F(L₊) − F(L₋)` in `dI/dε`, equal to `A₁/2`.
    pub alpha1: f64,
    pub alpha2: f64,
}

impl InductionConstants {
    pub fn new(p: &EllipticParams, kappa: f64) -> Self {
        let [x1, x2, x3] = p.direction.0;
        let eps = p.epsilon;
        let (c2, c3, r) = (p.c2, p.c3, p.r);
        let pp = p.p();
        let sp = pp.sqrt();
        let p32 = pp * sp;
        let a = (x2 * c2 - x1 * c3) / r;
        let a1 = -4.0 / p32 * (eps - x2 + a);
        let a2 = 2.0 / sp;
        let a3 = -2.0 * (x2 * c3 + x1 * c2) / (r * r);
        let a4 = (2.0 * r).sqrt() * (x2 - eps) / p32 + (2.0 / r).sqrt() * ((p32 - r * sp) / (pp * pp)) * a;
        let (dc1, dc2, dc3) = (2.0 * eps - 2.0 * x2, 2.0 * x2, -2.0 * x1);
        InductionConstants {
            beta1: 2.0 * kappa * x3 * dc3,
            beta2: 2.0 * kappa * x2 * dc2,
            beta3: -2.0 * kappa * x1 * dc3,
            beta4: 2.0 * kappa * (dc1 - dc2),
            a,
            a1,
            a2,
            a3,
            a4,
            alpha1: 0.5 * a1,
            alpha2: a2,
        }
    }
}

/// `εβ₁ t̂ − εβ₂ n̂ + (εβ₂ + εβ₃ + β₄) b̂`, without the circulation prefactor.
pub fn v1_vector(arc: &ArcGeometry, x: &FieldPoint) -> Result<FrameVelocity> {
    let p = coefficients(arc, x)?;
    let c = InductionConstants::new(&p, arc.kappa);
    let e = p.epsilon;
    Ok(FrameVelocity::from_cartesian(Vec3::new(
        e * c.beta1,
        -e * c.beta2,
        e * c.beta2 + e * c.beta3 + c.beta4,
    )))
}

/// `∫D^{−3/2}`, `∫cos θ D^{−3/2}`, `∫sin θ D^{−3/2}` over the arc, and `Jc − J0` without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub j0: f64,
    pub jc: f64,
    pub js: f64,
    pub jc_minus_j0: f64,
}

/// Closed-form moments of `D^{−3/2}`.
pub fn moments(p: &EllipticParams) -> Moments {
    let mc = p.kc2;
    let m = 1.0 - mc;
    let df = f_mc(p.l_plus, mc) - f_mc(p.l_minus, mc);
    let dg = g_mc(p.l_plus, mc) - g_mc(p.l_minus, mc);
    let pp = p.p();
    let p32 = pp * pp.sqrt();
    let j0 = 2.0 * (df + m * dg) / p32;
    // cos(θ − φ) = 1 − 2 sin²ψ
    let jcp = 2.0 * (df - (1.0 + mc) * dg) / p32;
    // sin(θ − φ) D^{−3/2} = 2 d(D^{−1/2})/dθ / r
    let (sin_phi, cos_phi, one_plus_cos) = if p.r == 0.0 {
        (0.0, 1.0, 2.0)
    } else if p.c2 < 0.0 {
        (p.c3 / p.r, p.c2 / p.r, p.c3 * p.c3 / (p.r * (p.r - p.c2)))
    } else {
        (p.c3 / p.r, p.c2 / p.r, 1.0 + p.c2 / p.r)
    };
    let da = p.denominator(p.half_angle).sqrt();
    let db = p.denominator(-p.half_angle).sqrt();
    let jsp = -4.0 * sin_phi * p.half_angle.sin() / (da * db * (da + db));
    let jc = cos_phi * jcp - sin_phi * jsp;
    let js = sin_phi * jcp + cos_phi * jsp;
    let jc_minus_j0 = -4.0 * (df - mc * dg) / p32 + one_plus_cos * jcp - sin_phi * jsp;
    Moments {
        j0,
        jc,
        js,
        jc_minus_j0,
    }
}

fn delta(ell: f64, mc: f64) -> f64 {
    let (s, c) = ell.sin_cos();
    (c * c + mc * s * s).sqrt()
}

/// `Ω(ℓ)` without its `−A₄F(ℓ)/k` term.
fn omega_without_f(c: &InductionConstants, p: &EllipticParams, ell: f64) -> f64 {
    let mc = p.kc2;
    let k = p.k;
    let d = delta(ell, mc);
    let e = e_mc(ell, k * k, mc);
    0.5 * c.a3 / d + c.a4 * (e / (k * mc) - k * (2.0 * ell).sin() / (2.0 * mc * d))
}

fn di_deps_params(p: &EllipticParams, kappa: f64) -> Result<f64> {
    if p.kc2 < MIN_MODULUS_COMPLEMENT {
        return Err(Error::DegenerateModulus { complement: p.kc2 });
    }
    if p.k < SMALL_MODULUS {
        // dD/dε = (2ε − 2x₂) + 2x₂ cos θ − 2x₁ sin θ
        let mo = moments(p);
        let [x1, x2, _] = p.direction.0;
        return Ok(-0.5 * (mo.j0 * (2.0 * p.epsilon - 2.0 * x2) + 2.0 * x2 * mo.jc - 2.0 * x1 * mo.js));
    }
    let c = InductionConstants::new(p, kappa);
    let fp = f_mc(p.l_plus, p.kc2);
    let fm = f_mc(p.l_minus, p.kc2);
    let omega_p = omega_without_f(&c, p, p.l_plus) - c.a4 * fp / p.k;
    let omega_m = omega_without_f(&c, p, p.l_minus) - c.a4 * fm / p.k;
    Ok(c.alpha1 * (fp - fm) + c.alpha2 * (omega_p - omega_m))
}

/// `d/dε ∫_{−L}^{L} dθ/√D` at fixed direction.
pub fn di_deps(arc: &ArcGeometry, x: &FieldPoint) -> Result<f64> {
    let p = coefficients(arc, x)?;
    di_deps_params(&p, arc.kappa)
}

/// Exact velocity from the closed-form moments.
pub fn velocity_elliptic(arc: &ArcGeometry, x: &FieldPoint) -> Result<FrameVelocity> {
    let p = coefficients(arc, x)?;
    let mo = moments(&p);
    let [x1, x2, x3] = p.direction.0;
    let (e, kappa) = (p.epsilon, arc.kappa);
    let v = Vec3::new(
        -e * kappa * x3 * mo.js,
        e * kappa * x3 * mo.jc,
        e * kappa * (x1 * mo.js - x2 * mo.jc) + kappa * mo.jc_minus_j0,
    );
    Ok(FrameVelocity::from_cartesian(v * arc.circulation_scale))
}

/// Binormal field `κx₂ (dI/dε) b̂` that dominates for `ε ≪ 1`.
pub fn velocity_local(arc: &ArcGeometry, x: &FieldPoint) -> Result<FrameVelocity> {
    let p = coefficients(arc, x)?;
    let x2 = p.direction.y();
    if x2 == 0.0 {
        return Ok(FrameVelocity::binormal_only(0.0));
    }
    let d = di_deps_params(&p, arc.kappa)?;
    Ok(FrameVelocity::binormal_only(arc.kappa * x2 * d * arc.circulation_scale))
}

/// Raised when the asymptotic evaluator is used outside `ε ≤ 0.05`, `L ≤ 0.2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityWarning {
    pub epsilon: f64,
    pub half_angle: f64,
}

impl fmt::Display for ValidityWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "asymptotic form used outside its validity region (epsilon = {}, half-angle = {}; limits {}, {})",
            self.epsilon, self.half_angle, GLIE_MAX_EPSILON, GLIE_MAX_HALF_ANGLE
        )
    }
}

/// Asymptotic velocity with the bracket implied by the first-order remainder bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlieEval {
    pub velocity: FrameVelocity,
    /// `(lo, hi)` such that the exact-`F` binormal lies in `[b + lo, b + hi]`.
    pub remainder: (f64, f64),
    pub warning: Option<ValidityWarning>,
}

/// `F(π/2 + a) − K` through its first-order asymptotic form, with the remainder interval.
///
/// For `|a| < π/2` this equals `F(θ, k)` with `sin θ = sin a / √(1 − k² + k² sin² a)`, whose sine
/// is small only when `|a|` is small compared with `√(1 − k²)`.
fn shifted_f1(a: f64, k: f64, mc: f64) -> Result<(f64, f64, f64)> {
    if a == 0.0 {
        return Ok((0.0, 0.0, 0.0));
    }
    let sign = a.signum();
    let b = a.abs();
    if b >= FRAC_PI_2 {
        let exact = f_mc(FRAC_PI_2 + b, mc) - k_mc(mc);
        return Ok((sign * exact, 0.0, 0.0));
    }
    let s = b.sin();
    let lambda = (s / (mc + k * k * s * s).sqrt()).min(1.0 - f64::EPSILON);
    let e = series_f(lambda, k, 1)?;
    let (lo, hi) = if sign > 0.0 {
        (e.remainder_lo, e.remainder_hi)
    } else {
        (-e.remainder_hi, -e.remainder_lo)
    };
    Ok((sign * e.value, lo, hi))
}

/// First-order asymptotic form of [`velocity_local`], using `F₁` for every `F` difference.
pub fn velocity_glie_asymptotic(arc: &ArcGeometry, x: &FieldPoint) -> Result<GlieEval> {
    let p = coefficients(arc, x)?;
    let warning = (p.epsilon > GLIE_MAX_EPSILON || arc.half_angle > GLIE_MAX_HALF_ANGLE).then_some(ValidityWarning {
        epsilon: p.epsilon,
        half_angle: arc.half_angle,
    });
    let x2 = p.direction.y();
    if x2 == 0.0 {
        return Ok(GlieEval {
            velocity: FrameVelocity::binormal_only(0.0),
            remainder: (0.0, 0.0),
            warning,
        });
    }
    if p.kc2 < MIN_MODULUS_COMPLEMENT {
        return Err(Error::DegenerateModulus { complement: p.kc2 });
    }
    let c = InductionConstants::new(&p, arc.kappa);
    // φ − π, measured from the point of the circle nearest the field point
    let phi_near = (-p.c3).atan2(-p.c2);
    let (fp, lo_p, hi_p) = shifted_f1(0.5 * (phi_near + arc.half_angle), p.k, p.kc2)?;
    let (fm, lo_m, hi_m) = shifted_f1(0.5 * (phi_near - arc.half_angle), p.k, p.kc2)?;
    let coef_f = c.alpha1 - c.alpha2 * c.a4 / p.k;
    let rest = c.alpha2 * (omega_without_f(&c, &p, p.l_plus) - omega_without_f(&c, &p, p.l_minus));
    let scale = arc.kappa * x2 * arc.circulation_scale;
    let b = scale * (coef_f * (fp - fm) + rest);
    let (dlo, dhi) = (lo_p - hi_m, hi_p - lo_m);
    let w = scale * coef_f;
    let remainder = if w >= 0.0 {
        (w * dlo, w * dhi)
    } else {
        (w * dhi, w * dlo)
    };
    Ok(GlieEval {
        velocity: FrameVelocity::binormal_only(b),
        remainder,
        warning,
    })
}

/// `κ ln(2√(L₊L₋)/|x|)` with `L± = (φ ± L)/2`.
pub fn lia_binormal(kappa: f64, l_plus: f64, l_minus: f64, distance: f64) -> Result<f64> {
    let prod = l_plus * l_minus;
    if !(prod > 0.0) || !(distance > 0.0) {
        return domain(format!(
            "local induction log argument must be positive (L+ L- = {prod}, |x| = {distance})"
        ));
    }
    Ok(kappa * (2.0 * prod.sqrt() / distance).ln())
}

/// Classical local induction comparator along `b̂`.
pub fn velocity_lia(arc: &ArcGeometry, x: &FieldPoint) -> Result<FrameVelocity> {
    let p = EllipticParams::from_epsilon(x.epsilon(arc), x.direction, arc.half_angle);
    let b = lia_binormal(arc.kappa, p.l_plus, p.l_minus, x.norm)?;
    Ok(FrameVelocity::binormal_only(b * arc.circulation_scale))
}

/// Inputs of the filament node kinematics with mutual friction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilamentNodeState {
    pub position: Vec3,
    pub unit_tangent: Vec3,
    pub v_s: Vec3,
    pub v_n: Vec3,
    pub v_i: Vec3,
    pub beta_mf: f64,
    pub beta_mf_prime: f64,
}

/// `V_S + V_I + β ξ′×(V_N−V_S−V_I) − β′ ξ′×[ξ′×(V_N−V_S−V_I)]`.
pub fn filament_node_velocity(state: &FilamentNodeState) -> Result<Vec3> {
    let t = state.unit_tangent;
    if (t.norm() - 1.0).abs() > 1e-9 {
        return domain(format!("node tangent must be a unit vector, |t| = {}", t.norm()));
    }
    let rel = state.v_n - state.v_s - state.v_i;
    let first = t.cross(&rel);
    let second = t.cross(&first);
    Ok(state.v_s + state.v_i + first * state.beta_mf - second * state.beta_mf_prime)
}

/// Direction with `x₁ = cos γ₁ sin γ₂`, `x₂ = sin γ₁ sin γ₂`, `x₃ = cos γ₂`.
pub fn direction_from_angles(gamma1: f64, gamma2: f64) -> Vec3 {
    FieldPoint::from_spherical(1.0, gamma1, gamma2).direction
}
