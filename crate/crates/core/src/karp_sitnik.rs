//! Asymptotic representation of `F(λ, k)` for `k → 1` with a two-sided remainder bracket.
//!
//! With `y = 1 − k²` and `x = yλ²/(1 − λ²)`,
//!
//! ```text
//! F(λ,k) = ½ ln((1+λ)/(1−λ)) Σ_{j=0}^{N} [(½)_j / j!]² yʲ
//!        + 1/(2λ) Σ_{n=0}^{N−1} ((1−λ²)/(−λ²))ⁿ sₙ(x) + R_N(λ,k)
//! ```
//!
//! where `R_N < 0` is bracketed through [`f_n`]. The functions `sₙ` satisfy
//!
//! ```text
//! 4(n+3)² s_{n+3} = aₙ s_{n+2} + bₙ s_{n+1} + cₙ sₙ + hₙ
//! aₙ = 8n² + 36n + 42 − x(2n+5)²
//! bₙ = 2x(4n² + 14n + 13) − (2n+3)²
//! cₙ = −4x(n+1)²
//! hₙ = [x(2n+5)(2n+3)² + (n+3)(8n² + 24n + 17)] / (8(n+3)[(n+2)!]²) · [(3/2)ₙ]² (−x)^{n+2}
//! ```
//!
//! Run forward in floating point this recurrence loses roughly four digits per step, since
//! `sₙ = O(x^{n+1})` emerges from cancellation between `O(1)` terms. Instead the same recurrence is
//! applied exactly to representations of `sₙ`: Taylor coefficients about `x = 0` for small `x`, and
//! polynomial triples `sₙ = Pₙ(x) ℓ(x) + Qₙ(x) √(1+x) + Rₙ(x)` with `ℓ = ln((1+√(1+x))/2)` otherwise.

use crate::error::{domain, Result};

/// Largest `n` accepted by [`s_n`].
pub const MAX_TERM_INDEX: usize = 16;

/// Largest series order accepted by [`series_f`].
pub const MAX_ORDER: usize = 12;

/// Below this `x` the Taylor representation is used.
const TAYLOR_LIMIT: f64 = 0.7;

/// Taylor coefficients kept per `sₙ`; `0.7^120 < 1e−18`.
const TAYLOR_TERMS: usize = 121;

/// `f_N` switches to its power series in `λ` below this value.
const F_SERIES_LIMIT: f64 = 0.5;

/// Series value at order `N` together with the bracket that contains the exact `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEval {
    pub value: f64,
    pub order: usize,
    pub remainder_lo: f64,
    pub remainder_hi: f64,
    pub bracket: (f64, f64),
}

impl SeriesEval {
    fn new(value: f64, order: usize, lo: f64, hi: f64) -> Self {
        SeriesEval {
            value,
            order,
            remainder_lo: lo,
            remainder_hi: hi,
            bracket: (value + lo, value + hi),
        }
    }

    pub fn width(&self) -> f64 {
        self.remainder_hi - self.remainder_lo
    }

    pub fn contains(&self, f: f64) -> bool {
        self.bracket.0 <= f && f <= self.bracket.1
    }
}

/// Coefficients of the recurrence at step `n`, each linear in `x`, plus the forcing term
/// `hₙ = h_lo x^{n+2} + h_hi x^{n+3}`.
struct Step {
    a: [f64; 2],
    b: [f64; 2],
    c1: f64,
    h_lo: f64,
    h_hi: f64,
    denom: f64,
}

fn step(n: usize) -> Step {
    let nf = n as f64;
    let mut pochhammer = 1.0;
    for i in 0..n {
        pochhammer *= 1.5 + i as f64;
    }
    let mut fact = 1.0;
    for i in 2..=n + 2 {
        fact *= i as f64;
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let scale = sign * pochhammer * pochhammer / (8.0 * (nf + 3.0) * fact * fact);
    Step {
        a: [8.0 * nf * nf + 36.0 * nf + 42.0, -(2.0 * nf + 5.0).powi(2)],
        b: [-(2.0 * nf + 3.0).powi(2), 2.0 * (4.0 * nf * nf + 14.0 * nf + 13.0)],
        c1: -4.0 * (nf + 1.0).powi(2),
        h_lo: scale * (nf + 3.0) * (8.0 * nf * nf + 24.0 * nf + 17.0),
        h_hi: scale * (2.0 * nf + 5.0) * (2.0 * nf + 3.0).powi(2),
        denom: 4.0 * (nf + 3.0).powi(2),
    }
}

/// `Σ cᵢ xⁱ` represented by its coefficients, truncated at `len`.
fn advance(st: &Step, s2: &[f64], s1: &[f64], s0: &[f64], len: usize) -> Vec<f64> {
    let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let mut out = vec![0.0; len];
    for (m, o) in out.iter_mut().enumerate() {
        let mut acc = st.a[0] * get(s2, m) + st.b[0] * get(s1, m);
        if m > 0 {
            acc += st.a[1] * get(s2, m - 1) + st.b[1] * get(s1, m - 1) + st.c1 * get(s0, m - 1);
        }
        *o = acc;
    }
    out
}

fn with_forcing(mut v: Vec<f64>, st: &Step, n: usize, len: usize) -> Vec<f64> {
    if n + 2 < len {
        v[n + 2] += st.h_lo;
    }
    if n + 3 < len {
        v[n + 3] += st.h_hi;
    }
    v
}

fn scaled(mut v: Vec<f64>, d: f64) -> Vec<f64> {
    v.iter_mut().for_each(|c| *c /= d);
    v
}

fn mul_poly(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            if i + j < len {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

fn add_poly(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0.0) + b.get(i).copied().unwrap_or(0.0))
        .collect()
}

/// Taylor coefficients of `sₙ` for `n = 0..=n_max`.
fn taylor_table(n_max: usize) -> Vec<Vec<f64>> {
    let len = TAYLOR_TERMS;
    // ℓ(x) = −Σ_{m≥1} bₘ xᵐ/(2m), bₘ = (−1)ᵐ (½)ₘ/m!
    let mut ell = vec![0.0; len];
    let mut bm = 1.0;
    for (m, e) in ell.iter_mut().enumerate().skip(1) {
        let mf = m as f64;
        bm *= -(mf - 0.5) / mf;
        *e = -bm / (2.0 * mf);
    }
    let mut root = vec![0.0; len];
    root[0] = 1.0;
    for m in 1..len {
        let mf = m as f64;
        root[m] = root[m - 1] * (0.5 - (mf - 1.0)) / mf;
    }
    let mut table = Vec::with_capacity(n_max + 3);
    table.push(mul_poly(&[-2.0], &ell, len));
    table.push(add_poly(
        &add_poly(&mul_poly(&[-1.0, 0.5], &ell, len), &mul_poly(&[-0.5], &root, len)),
        &[0.5, 0.5],
    ));
    table.push(add_poly(
        &add_poly(
            &mul_poly(&[-0.75, 0.25, -9.0 / 32.0], &ell, len),
            &mul_poly(&[-7.0 / 16.0, 9.0 / 32.0], &root, len),
        ),
        &[7.0 / 16.0, 1.0 / 8.0, -21.0 / 64.0],
    ));
    for (n, row) in table.iter_mut().enumerate() {
        row.resize(len, 0.0);
        row[..=n].iter_mut().for_each(|c| *c = 0.0);
    }
    for n in 0..n_max.saturating_sub(2) {
        let st = step(n);
        let raw = advance(&st, &table[n + 2], &table[n + 1], &table[n], len);
        let mut next = scaled(with_forcing(raw, &st, n, len), st.denom);
        // sₙ = O(x^{n+1}): lower orders cancel exactly.
        next[..=n + 3].iter_mut().for_each(|c| *c = 0.0);
        table.push(next);
    }
    table.truncate(n_max + 1);
    table
}

/// Polynomial triples `(Pₙ, Qₙ, Rₙ)` for `n = 0..=n_max`.
fn closed_form_table(n_max: usize) -> Vec<[Vec<f64>; 3]> {
    let mut table: Vec<[Vec<f64>; 3]> = vec![
        [vec![-2.0], vec![0.0], vec![0.0]],
        [vec![-1.0, 0.5], vec![-0.5], vec![0.5, 0.5]],
        [
            vec![-0.75, 0.25, -9.0 / 32.0],
            vec![-7.0 / 16.0, 9.0 / 32.0],
            vec![7.0 / 16.0, 1.0 / 8.0, -21.0 / 64.0],
        ],
    ];
    for n in 0..n_max.saturating_sub(2) {
        let st = step(n);
        let len = n + 5;
        let part = |i: usize| advance(&st, &table[n + 2][i], &table[n + 1][i], &table[n][i], len);
        let p = scaled(part(0), st.denom);
        let q = scaled(part(1), st.denom);
        let r = scaled(with_forcing(part(2), &st, n, len), st.denom);
        table.push([p, q, r]);
    }
    table.truncate(n_max + 1);
    table
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// `ln((1 + √(1+x))/2)` without cancellation at small `x`.
fn ell(x: f64) -> f64 {
    (x / (2.0 * (1.0 + (1.0 + x).sqrt()))).ln_1p()
}

/// `sₙ(x)` for `x ≥ 0`, `n ≤ MAX_TERM_INDEX`.
pub fn s_n(x: f64, n: usize) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("s_n requires finite x >= 0, got {x}"));
    }
    if n > MAX_TERM_INDEX {
        return domain(format!("s_n supports n <= {MAX_TERM_INDEX}, got {n}"));
    }
    Ok(s_n_unchecked(x, n))
}

fn s_n_unchecked(x: f64, n: usize) -> f64 {
    if x < TAYLOR_LIMIT {
        let t = taylor_table(n);
        horner(&t[n], x)
    } else {
        let t = closed_form_table(n);
        let [p, q, r] = &t[n];
        horner(p, x) * ell(x) + horner(q, x) * (1.0 + x).sqrt() + horner(r, x)
    }
}

fn half_pochhammer_ratio_sq(j: usize) -> f64 {
    // [(½)_j / j!]²
    let mut r = 1.0;
    for i in 0..j {
        r *= (i as f64 + 0.5) / (i as f64 + 1.0);
    }
    r * r
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return domain(format!("series order must lie in 1..={MAX_ORDER}, got {order}"));
    }
    Ok(())
}

/// Series through order `N` with its remainder bracket.
///
/// At `λ = 0` the value is `0` and at `k = 1` it is `atanh λ`; both brackets have zero width.
pub fn series_f(lambda: f64, k: f64, order: usize) -> Result<SeriesEval> {
    check_order(order)?;
    if !(0.0..1.0).contains(&lambda) {
        return domain(format!("lambda must lie in [0, 1), got {lambda}"));
    }
    if !(k > 0.0 && k <= 1.0) {
        return domain(format!("k must lie in (0, 1], got {k}"));
    }
    if lambda == 0.0 {
        return Ok(SeriesEval::new(0.0, order, 0.0, 0.0));
    }
    let value = series_value(lambda, k, order);
    if k == 1.0 {
        return Ok(SeriesEval::new(value, order, 0.0, 0.0));
    }
    let (lo, hi) = remainder_bounds(lambda, k, order)?;
    Ok(SeriesEval::new(value, order, lo, hi))
}

fn series_value(lambda: f64, k: f64, order: usize) -> f64 {
    let y = (1.0 - k) * (1.0 + k);
    let lc = (1.0 - lambda) * (1.0 + lambda);
    let mut hyp = 0.0;
    let mut yj = 1.0;
    for j in 0..=order {
        hyp += half_pochhammer_ratio_sq(j) * yj;
        yj *= y;
    }
    let first = lambda.atanh() * hyp;
    if y == 0.0 {
        return first;
    }
    let u = lambda * lambda / lc;
    let x = y * u;
    let mut second = 0.0;
    if x < TAYLOR_LIMIT {
        // ((1−λ²)/(−λ²))ⁿ sₙ(x) / (2λ) = λ/(2(1−λ²)) · (−1)ⁿ y^{n+1} Σ_j σ_{n,n+1+j} xʲ
        let table = taylor_table(order - 1);
        let pre = lambda / (2.0 * lc);
        let mut yn = y;
        for (n, coeffs) in table.iter().enumerate() {
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            second += sign * yn * horner(&coeffs[n + 1..], x);
            yn *= y;
        }
        second *= pre;
    } else {
        let mut ratio = 1.0;
        for n in 0..order {
            second += ratio * s_n_unchecked(x, n);
            ratio *= -1.0 / u;
        }
        second /= 2.0 * lambda;
    }
    first + second
}

/// Positive bound function `f_N(λ, k)` evaluated at `α = (N + ½)²/(N + 1)²`.
pub fn f_n(lambda: f64, k: f64, order: usize) -> Result<f64> {
    if order == 0 {
        return domain("f_N requires N >= 1");
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return domain(format!("f_N requires lambda in (0, 1), got {lambda}"));
    }
    if !(k > 0.0 && k < 1.0) {
        return domain(format!("f_N requires k in (0, 1), got {k}"));
    }
    let nf = order as f64;
    let alpha = (nf + 0.5).powi(2) / (nf + 1.0).powi(2);
    let y = (1.0 - k) * (1.0 + k);
    let beta = 1.0 - alpha * y;
    if lambda > F_SERIES_LIMIT {
        let lc = (1.0 - lambda) * (1.0 + lambda);
        let q = (1.0 + lc / (alpha * lambda * lambda * y)).sqrt();
        let head = 2.0 * (1.0 / q).atanh() / (alpha * lambda * q);
        return Ok((head - 2.0 * y * lambda.atanh()) / beta);
    }
    // Expanding both logarithms in powers of λ², the leading orders cancel analytically:
    // f = Σ_j 2λ^{2j+1} y/(2j+1) · [(αy)ʲ (1 − βλ²)^{−(j+1)} − 1]/β
    let l2 = lambda * lambda;
    let ln_ay = (-beta).ln_1p();
    let ln_g = -(-beta * l2).ln_1p();
    let mut sum = 0.0;
    let mut lp = lambda;
    for j in 0..400 {
        let jf = j as f64;
        let t = if beta == 0.0 {
            -jf + (jf + 1.0) * l2
        } else {
            (jf * ln_ay + (jf + 1.0) * ln_g).exp_m1() / beta
        };
        let term = 2.0 * lp * y / (2.0 * jf + 1.0) * t;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() && j > 2 {
            break;
        }
        lp *= l2;
    }
    Ok(sum)
}

/// `(lo, hi)` with `lo ≤ R_N ≤ hi ≤ 0`.
pub fn remainder_bounds(lambda: f64, k: f64, order: usize) -> Result<(f64, f64)> {
    check_order(order)?;
    let y = (1.0 - k) * (1.0 + k);
    let fl = f_n(lambda, k, order)?;
    let fh = f_n(lambda, k, order + 1)?;
    let pre = half_pochhammer_ratio_sq(order + 1) * y.powi(order as i32) / 2.0;
    Ok((-pre * fl, -pre * fh))
}

/// First-order form `ln√((1+λ)/(1−λ)) + (1/λ) ln(2/(1 + √((1−k²λ²)/(1−λ²)))) + (1−k²)/8 · ln((1+λ)/(1−λ))`.
///
/// The middle term tends to `0` as `λ → 0`, so `F₁(0, k) = 0`.
pub fn f1(lambda: f64, k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda) {
        return domain(format!("lambda must lie in [0, 1), got {lambda}"));
    }
    if !(0.0..=1.0).contains(&k) {
        return domain(format!("k must lie in [0, 1], got {k}"));
    }
    let y = (1.0 - k) * (1.0 + k);
    let lc = (1.0 - lambda) * (1.0 + lambda);
    let x = y * lambda * lambda / lc;
    // (1−k²λ²)/(1−λ²) = 1 + x
    let z = x / (2.0 * (1.0 + (1.0 + x).sqrt()));
    let middle = if z == 0.0 {
        0.0
    } else {
        let z_over_lambda = y * lambda / (lc * 2.0 * (1.0 + (1.0 + x).sqrt()));
        -z.ln_1p() / z * z_over_lambda
    };
    let at = lambda.atanh();
    Ok(at + middle + y / 4.0 * at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// High-precision values of sₙ(x), n = 3..=16, from the recurrence run in 300-digit arithmetic.
    #[allow(clippy::excessive_precision)]
    const GOLDEN: &[(f64, [f64; 14])] = &[
        (
            0.001,
            [
                1.4945543754231102e-13,
                -1.2105646232667615e-16,
                1.0171956644216274e-19,
                -8.770620363573902e-23,
                7.708485938700062e-26,
                -6.875730915466613e-29,
                6.205311364365504e-32,
                -5.653985749452073e-35,
                5.192614932359258e-38,
                -4.800847477244553e-41,
                4.4640396586119356e-44,
                -4.171385854595029e-47,
                3.914738561163489e-50,
                -3.6878384758197114e-53,
            ],
        ),
        (
            0.1,
            [
                1.4196677961503738e-5,
                -1.1477443030320357e-6,
                9.630976781124368e-8,
                -8.295620521804501e-9,
                7.285135008729066e-10,
                -6.493906437764433e-11,
                5.857599387204338e-12,
                -5.334794103797034e-13,
                4.8976217902594017e-14,
                -4.526643807683396e-15,
                4.207889166287881e-16,
                -3.931058946833214e-17,
                3.688394547024436e-18,
                -3.473940110696428e-19,
            ],
        ),
        (
            0.5,
            [
                0.0074446375655287233,
                -0.0029916747615758806,
                0.0012499329351822172,
                -0.0005366265482259988,
                0.00023505740449974321,
                -0.0001045608888494025611,
                4.7083089867163665e-5,
                -2.1412188736116867e-5,
                9.817836801421919e-6,
                -4.532771791906115e-6,
                2.1050601585542423e-6,
                -9.825793666593863e-7,
                4.6067055356875936e-7,
                -2.1682097590431114e-7,
            ],
        ),
        (
            0.69,
            [
                0.025173237344893144,
                -0.013930392300903157,
                0.008019831953547412,
                -0.004746243814876854,
                0.002866570096231994,
                -0.0017585127761432818,
                0.001092154487933653,
                -0.0006851158291256857,
                0.00043334498097593195,
                -0.0002760076660361706,
                0.00017683996630569402,
                -0.00011388269645468938,
                7.366606721755413e-5,
                -4.783830857601917e-5,
            ],
        ),
        (
            0.7,
            [
                0.026571399446904484,
                -0.014915669004901155,
                0.008710884049024945,
                -0.00522965288978785,
                0.00320417814277386,
                -0.001994043396172361,
                0.0012563504756798375,
                -0.0007995219005242891,
                0.0005130282287658395,
                -0.0003314903809926288,
                0.00021546336031151581,
                -0.0001407650084391746,
                9.237384618854975e-5,
                -6.085586424848992e-5,
            ],
        ),
        (
            0.8,
            [
                0.0438103363011592,
                -0.028077988794703346,
                0.01872738599757177,
                -0.012842781721258346,
                0.008989305440777366,
                -0.00639150303649972,
                0.004601120619921426,
                -0.003345695729890394,
                0.0024530981445071034,
                -0.001811228732802864,
                0.001345281943892554,
                -0.0010043364066205615,
                0.0007531542461311008,
                -0.0005670123772346371,
            ],
        ),
        (
            1.5,
            [
                0.4425098352629419,
                -0.5289230755011868,
                0.6590355765127966,
                -0.8451449209409247,
                1.106926810834756,
                -1.473353627166911,
                1.9861589619248566,
                -2.7050944967690803,
                3.7156214734452824,
                -5.140061462604112,
                7.153729166754461,
                -10.008274794682816,
                14.06548269879061,
                -19.846255907938506,
            ],
        ),
        (
            3.0,
            [
                5.218176142666326,
                -12.39264404704605,
                30.746783719187697,
                -78.61216257314036,
                205.44219941654428,
                -545.9081443436491,
                1469.700287735298,
                -3998.6708770021717,
                10974.127224896701,
                -30337.425072360896,
                84385.31833379189,
                -235971.288812094,
                662908.7928237068,
                -1869840.4484003865,
            ],
        ),
        (
            10.0,
            [
                316.005606146791,
                -2476.246774335444,
                20345.407254894635,
                -172609.9692426983,
                1498660.3663986766,
                -13240759.55267873,
                118586677.40792123,
                -1073750583.735295,
                9809827747.34654,
                -90295682331.25555,
                836419920909.5959,
                -7790100659451.442,
                72897083560208.27,
                -684969097961681.3,
            ],
        ),
        (
            100.0,
            [
                552065.2646269918,
                -42817255.38459632,
                3495841159.5238126,
                -295329229512.47086,
                25563415818607.508,
                -2253365344025658.8,
                2.0145476785300029e17,
                -1.8214720222159715e19,
                1.662151395390098e21,
                -1.5284489670403836e23,
                1.4146477081455755e25,
                -1.3166133946897704e27,
                1.2312824505872573e29,
                -1.1563365204500846e31,
            ],
        ),
    ];

    #[test]
    fn closed_forms_vanish_at_zero() {
        for n in 0..=MAX_TERM_INDEX {
            assert_eq!(s_n(0.0, n).unwrap(), 0.0);
        }
    }

    #[test]
    fn recurrence_matches_high_precision() {
        for (x, row) in GOLDEN {
            for (i, &want) in row.iter().enumerate() {
                let n = i + 3;
                let got = s_n(*x, n).unwrap();
                let tol = if *x < TAYLOR_LIMIT { 1e-13 } else { 5e-12 };
                assert!(((got - want) / want).abs() <= tol, "s_{n}({x}) = {got}, want {want}");
            }
        }
    }

    #[test]
    fn representations_agree_at_the_switch() {
        let x = TAYLOR_LIMIT;
        let below = taylor_table(MAX_TERM_INDEX);
        let above = closed_form_table(MAX_TERM_INDEX);
        for n in 0..=MAX_TERM_INDEX {
            let t = horner(&below[n], x);
            let [p, q, r] = &above[n];
            let c = horner(p, x) * ell(x) + horner(q, x) * (1.0 + x).sqrt() + horner(r, x);
            assert!(((t - c) / t).abs() < 1e-11, "n = {n}: {t} vs {c}");
        }
    }

    #[test]
    fn leading_order_at_small_x() {
        // sₙ ≈ 2(−1)^{n+1} [(½)_{n+1}/(n+1)!]² x^{n+1}
        let x: f64 = 1e-6;
        for n in 0..=8 {
            let lead =
                2.0 * if n % 2 == 0 { -1.0 } else { 1.0 } * half_pochhammer_ratio_sq(n + 1) * x.powi(n as i32 + 1);
            assert_relative_eq!(s_n(x, n).unwrap(), lead, max_relative = 1e-5);
        }
    }

    #[test]
    fn unit_modulus_is_exact() {
        let e = series_f(0.5, 1.0, 1).unwrap();
        assert_eq!(e.value, 0.5f64.atanh());
        assert_eq!(e.width(), 0.0);
    }

    #[test]
    fn zero_lambda() {
        let e = series_f(0.0, 0.95, 2).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.bracket, (0.0, 0.0));
        assert_eq!(f1(0.0, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn first_order_form_is_order_one_series() {
        for &(l, k) in &[(0.2, 0.99), (0.5, 0.8), (0.9, 0.3), (1e-9, 0.7), (0.99, 0.999)] {
            let s = series_f(l, k, 1).unwrap().value;
            assert_relative_eq!(f1(l, k).unwrap(), s, max_relative = 1e-13);
        }
        assert_relative_eq!(f1(0.4, 1.0).unwrap(), 0.4f64.atanh(), max_relative = 1e-15);
    }

    #[test]
    fn bound_function_branches_agree() {
        for order in 1..=6 {
            for &k in &[0.1, 0.5, 0.9, 0.999] {
                let a = f_n(F_SERIES_LIMIT, k, order).unwrap();
                let b = f_n(F_SERIES_LIMIT * (1.0 + 1e-15), k, order).unwrap();
                assert!(((a - b) / a).abs() < 1e-12, "N={order} k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn remainder_bounds_vanish_as_k_tends_to_one() {
        let mut prev = f64::INFINITY;
        for gap in [1e-2, 1e-4, 1e-6, 1e-9] {
            let (lo, hi) = remainder_bounds(0.4, 1.0 - gap, 2).unwrap();
            assert!(lo.abs() < prev && hi.abs() <= lo.abs());
            prev = lo.abs();
        }
        assert!(prev < 1e-16);
        assert!(remainder_bounds(0.0, 0.5, 1).is_err());
        assert!(remainder_bounds(0.5, 1.0, 1).is_err());
        assert!(remainder_bounds(0.5, 0.0, 1).is_err());
    }

    #[test]
    fn tightening_with_order() {
        let (lo2, _) = remainder_bounds(0.3, 0.9, 2).unwrap();
        let (lo3, _) = remainder_bounds(0.3, 0.9, 3).unwrap();
        assert!(lo3.abs() < lo2.abs());
    }

    #[test]
    fn domain_errors() {
        assert!(s_n(-0.1, 2).is_err());
        assert!(s_n(0.1, MAX_TERM_INDEX + 1).is_err());
        assert!(series_f(1.0, 0.5, 1).is_err());
        assert!(series_f(0.5, 0.0, 1).is_err());
        assert!(series_f(0.5, 0.5, 0).is_err());
        assert!(series_f(0.5, 0.5, MAX_ORDER + 1).is_err());
        assert!(f1(1.0, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn unit_modulus_for_all_orders(lambda in 0.0f64..0.999, order in 1usize..=MAX_ORDER) {
            let e = series_f(lambda, 1.0, order).unwrap();
            prop_assert!((e.value - lambda.atanh()).abs() <= 1e-12 * lambda.atanh().max(1e-300));
        }

        #[test]
        fn bracket_is_ordered(lambda in 1e-4f64..0.99, k in 1e-3f64..0.9999, order in 1usize..=MAX_ORDER) {
            let e = series_f(lambda, k, order).unwrap();
            prop_assert!(e.remainder_lo <= e.remainder_hi);
            prop_assert!(e.remainder_hi <= 0.0);
        }
    }
}
