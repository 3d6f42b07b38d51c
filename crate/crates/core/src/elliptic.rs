//! Incomplete elliptic integrals of the first and second kind via Carlson's symmetric forms.
//!
//! Internally every routine works with the parameter `m = k²` and its complement `mc = 1 − k²`
//! supplied separately, so callers that know `1 − k²` to full relative precision can keep it.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Error, Result};
use crate::geometry::EllipticParams;

const ANGLE_SLACK: f64 = 1e-12;

/// Carlson's symmetric integral `R_F(x, y, z)`; at most one argument may be zero.
pub fn rf(x: f64, y: f64, z: f64) -> f64 {
    let (x0, y0) = (x, y);
    let (mut x, mut y, mut z) = (x, y, z);
    let a0 = (x + y + z) / 3.0;
    let q = (3.0 * f64::EPSILON).powf(-1.0 / 6.0) * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs());
    let mut a = a0;
    let mut scale = 1.0;
    while scale * q >= a.abs() {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sx * sz + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        a = 0.25 * (a + lam);
        scale *= 0.25;
    }
    let dx = (a0 - x0) * scale / a;
    let dy = (a0 - y0) * scale / a;
    let dz = -(dx + dy);
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / a.sqrt()
}

/// Carlson's symmetric integral `R_D(x, y, z)`; `z > 0` and at most one of `x, y` zero.
pub fn rd(x: f64, y: f64, z: f64) -> f64 {
    let (x0, y0) = (x, y);
    let (mut x, mut y, mut z) = (x, y, z);
    let a0 = (x + y + 3.0 * z) / 5.0;
    let q = (0.25 * f64::EPSILON).powf(-1.0 / 6.0) * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs());
    let mut a = a0;
    let mut scale = 1.0;
    let mut sum = 0.0;
    while scale * q >= a.abs() {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sx * sz + sy * sz;
        sum += scale / (sz * (z + lam));
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        a = 0.25 * (a + lam);
        scale *= 0.25;
    }
    let dx = (a0 - x0) * scale / a;
    let dy = (a0 - y0) * scale / a;
    let dz = -(dx + dy) / 3.0;
    let xy = dx * dy;
    let z2 = dz * dz;
    let e2 = xy - 6.0 * z2;
    let e3 = (3.0 * xy - 8.0 * z2) * dz;
    let e4 = 3.0 * (xy - z2) * z2;
    let e5 = xy * z2 * dz;
    let series = 1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0 - 3.0 * e4 / 22.0 - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0;
    scale * series / (a * a.sqrt()) + 3.0 * sum
}

/// Amplitude angle and modulus of an elliptic integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticArgs {
    pub phi: f64,
    pub k: f64,
    pub lambda: f64,
}

impl EllipticArgs {
    pub fn new(phi: f64, k: f64) -> Result<Self> {
        check_modulus(k)?;
        check_amplitude(phi)?;
        Ok(EllipticArgs {
            phi,
            k,
            lambda: phi.sin(),
        })
    }

    /// Builds the arguments from `λ = sin φ`, taking `φ` in `[−π/2, π/2]`.
    pub fn from_lambda(lambda: f64, k: f64) -> Result<Self> {
        check_modulus(k)?;
        if !(-1.0..=1.0).contains(&lambda) {
            return domain(format!("lambda = {lambda} outside [-1, 1]"));
        }
        Ok(EllipticArgs {
            phi: lambda.asin(),
            k,
            lambda,
        })
    }

    /// True for the logarithmic singularity of `F` at `k = 1`, `|φ| ≥ π/2`.
    pub fn is_divergent(&self) -> bool {
        self.k == 1.0 && self.phi.abs() >= FRAC_PI_2
    }
}

fn check_modulus(k: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&k) {
        return domain(format!("modulus k = {k} outside [0, 1]"));
    }
    Ok(())
}

fn check_amplitude(phi: f64) -> Result<()> {
    if !phi.is_finite() || phi.abs() > PI * (1.0 + ANGLE_SLACK) {
        return domain(format!("amplitude phi = {phi} outside [-pi, pi]"));
    }
    Ok(())
}

fn complement(k: f64) -> f64 {
    (1.0 - k) * (1.0 + k)
}

/// `F(φ, k)` for `|φ| ≤ π`.
pub fn ellint_f(args: EllipticArgs) -> Result<f64> {
    check_modulus(args.k)?;
    check_amplitude(args.phi)?;
    if args.is_divergent() {
        return Err(Error::Divergence(format!(
            "F(phi = {}, k = 1) has a logarithmic singularity",
            args.phi
        )));
    }
    if args.k == 1.0 {
        return Ok(args.phi.sin().atanh());
    }
    Ok(f_mc(args.phi, complement(args.k)))
}

/// `E(φ, k)` for `|φ| ≤ π`.
pub fn ellint_e(args: EllipticArgs) -> Result<f64> {
    check_modulus(args.k)?;
    check_amplitude(args.phi)?;
    Ok(e_mc(args.phi, args.k * args.k, complement(args.k)))
}

/// `∫₀^φ sin²ψ (1 − k² sin²ψ)^{-3/2} dψ` for `|φ| ≤ π`.
pub fn ellint_g(args: EllipticArgs) -> Result<f64> {
    check_modulus(args.k)?;
    check_amplitude(args.phi)?;
    if args.is_divergent() {
        return Err(Error::Divergence(format!(
            "sin^2/Delta^3 integral diverges at phi = {}, k = 1",
            args.phi
        )));
    }
    Ok(g_mc(args.phi, complement(args.k)))
}

/// Complete integral `K(k)`.
pub fn complete_k(k: f64) -> Result<f64> {
    check_modulus(k)?;
    if k == 1.0 {
        return Err(Error::Divergence("K(1) is infinite".into()));
    }
    Ok(k_mc(complement(k)))
}

/// Complete integral `E(k)`.
pub fn complete_e(k: f64) -> Result<f64> {
    check_modulus(k)?;
    Ok(ec_mc(k * k, complement(k)))
}

pub(crate) fn k_mc(mc: f64) -> f64 {
    rf(0.0, mc, 1.0)
}

pub(crate) fn ec_mc(m: f64, mc: f64) -> f64 {
    if mc == 0.0 {
        return 1.0;
    }
    rf(0.0, mc, 1.0) - m / 3.0 * rd(0.0, mc, 1.0)
}

fn gc_mc(mc: f64) -> f64 {
    rd(0.0, 1.0, mc) / 3.0
}

/// Splits `φ` into a sign, a reduced amplitude in `[0, π/2]`, and whether it was reflected.
fn reduce(phi: f64) -> (f64, f64, bool) {
    let sign = if phi < 0.0 { -1.0 } else { 1.0 };
    let a = phi.abs().min(PI);
    if a > FRAC_PI_2 {
        (sign, PI - a, true)
    } else {
        (sign, a, false)
    }
}

fn delta2(s: f64, c: f64, mc: f64) -> f64 {
    c * c + mc * s * s
}

/// `F` with the parameter complement supplied separately; requires `mc > 0` past `π/2`.
pub(crate) fn f_mc(phi: f64, mc: f64) -> f64 {
    let (sign, a, reflected) = reduce(phi);
    let (s, c) = a.sin_cos();
    let base = if mc == 0.0 && a < FRAC_PI_2 {
        s.atanh()
    } else {
        s * rf(c * c, delta2(s, c, mc), 1.0)
    };
    sign * if reflected { 2.0 * k_mc(mc) - base } else { base }
}

pub(crate) fn e_mc(phi: f64, m: f64, mc: f64) -> f64 {
    let (sign, a, reflected) = reduce(phi);
    let (s, c) = a.sin_cos();
    let (c2, d2) = (c * c, delta2(s, c, mc));
    let base = if mc == 0.0 {
        s
    } else {
        s * rf(c2, d2, 1.0) - m * s * s * s / 3.0 * rd(c2, d2, 1.0)
    };
    sign * if reflected { 2.0 * ec_mc(m, mc) - base } else { base }
}

pub(crate) fn g_mc(phi: f64, mc: f64) -> f64 {
    let (sign, a, reflected) = reduce(phi);
    let (s, c) = a.sin_cos();
    let base = s * s * s / 3.0 * rd(c * c, 1.0, delta2(s, c, mc));
    sign * if reflected { 2.0 * gc_mc(mc) - base } else { base }
}

/// Closed form of `∫_{−L}^{L} dθ / √(c₁ + c₂ cos θ + c₃ sin θ)` as `2[F(L₊,k) − F(L₋,k)]/√(c₁+r)`.
pub fn arc_integral(p: &EllipticParams) -> Result<f64> {
    let min_d = p.min_denominator();
    if !(min_d > 0.0) {
        return Err(Error::SingularIntegrand { min_denominator: min_d });
    }
    let df = f_mc(p.l_plus, p.kc2) - f_mc(p.l_minus, p.kc2);
    Ok(2.0 * df / p.p().sqrt())
}
