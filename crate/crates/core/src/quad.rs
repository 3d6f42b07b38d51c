//! Adaptive Gauss–Kronrod (G10/K21) quadrature for vector-valued integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Subdivision budget used when none is given.
pub const DEFAULT_MAX_INTERVALS: usize = 10_000;

/// Stopping rule for [`integrate`].
///
/// The run stops once the summed error estimate falls below
/// `max(abs_tol, rel_tol * |I|)`, where `|I|` is the largest component magnitude.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        QuadOptions {
            abs_tol: tol,
            rel_tol: 0.0,
            max_intervals: DEFAULT_MAX_INTERVALS,
        }
    }

    pub fn relative(tol: f64) -> Self {
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: tol,
            max_intervals: DEFAULT_MAX_INTERVALS,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature<const M: usize> {
    pub value: [f64; M],
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<const M: usize> {
    a: f64,
    b: f64,
    value: [f64; M],
    error: f64,
    resabs: f64,
}

impl<const M: usize> PartialEq for Segment<M> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl<const M: usize> Eq for Segment<M> {}

impl<const M: usize> PartialOrd for Segment<M> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<const M: usize> Ord for Segment<M> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale(err: f64, resasc: f64) -> f64 {
    let mut e = err.abs();
    if resasc != 0.0 && e != 0.0 {
        e = resasc * (200.0 * e / resasc).powf(1.5).min(1.0);
    }
    e
}

fn kronrod<const M: usize, F>(f: &F, a: f64, b: f64) -> Segment<M>
where
    F: Fn(f64) -> [f64; M],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resg = [0.0; M];
    let mut resk = [0.0; M];
    let mut resabs = [0.0; M];
    let mut fv1 = [[0.0; M]; 10];
    let mut fv2 = [[0.0; M]; 10];
    for i in 0..M {
        resk[i] = WGK[10] * fc[i];
        resabs[i] = (WGK[10] * fc[i]).abs();
    }
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for i in 0..M {
            let s = f1[i] + f2[i];
            resk[i] += WGK[j] * s;
            resabs[i] += WGK[j] * (f1[i].abs() + f2[i].abs());
            if j % 2 == 1 {
                resg[i] += WG[j / 2] * s;
            }
        }
        fv1[j] = f1;
        fv2[j] = f2;
    }
    let mut value = [0.0; M];
    let mut error: f64 = 0.0;
    let mut resabs_max: f64 = 0.0;
    for i in 0..M {
        let mean = 0.5 * resk[i];
        let mut resasc = WGK[10] * (fc[i] - mean).abs();
        for j in 0..10 {
            resasc += WGK[j] * ((fv1[j][i] - mean).abs() + (fv2[j][i] - mean).abs());
        }
        let h = half.abs();
        value[i] = resk[i] * half;
        error = error.max(rescale((resk[i] - resg[i]) * half, resasc * h));
        resabs_max = resabs_max.max(resabs[i] * h);
    }
    Segment {
        a,
        b,
        value,
        error,
        resabs: resabs_max,
    }
}

/// Integrates `f` over `[a, b]`, splitting first at any `breakpoints` strictly inside the interval.
///
/// Requests below the roundoff floor `50·eps·∫|f|` are treated as met at that floor.
pub fn integrate<const M: usize, F>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<Quadrature<M>>
where
    F: Fn(f64) -> [f64; M],
{
    if a == b {
        return Ok(Quadrature {
            value: [0.0; M],
            error: 0.0,
            intervals: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&p| p > lo && p < hi).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut left = lo;
    for &p in cuts.iter().chain(std::iter::once(&hi)) {
        heap.push(kronrod(&f, left, p));
        left = p;
    }

    loop {
        let mut value = [0.0; M];
        let mut error = 0.0;
        let mut resabs = 0.0;
        for s in heap.iter() {
            for (v, sv) in value.iter_mut().zip(s.value.iter()) {
                *v += sv;
            }
            error += s.error;
            resabs += s.resabs;
        }
        let magnitude = value.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let target = opts
            .abs_tol
            .max(opts.rel_tol * magnitude)
            .max(50.0 * f64::EPSILON * resabs);
        if error <= target {
            return Ok(Quadrature {
                value: value.map(|v| sign * v),
                error,
                intervals: heap.len(),
            });
        }
        if !value.iter().all(|v| v.is_finite()) || heap.len() >= opts.max_intervals {
            return Err(Error::QuadratureNonconvergence {
                intervals: heap.len(),
                error_estimate: error,
                target,
            });
        }
        let worst = heap.pop().expect("at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureNonconvergence {
                intervals: heap.len() + 1,
                error_estimate: error,
                target,
            });
        }
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
    }
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate_scalar<F>(f: F, a: f64, b: f64, breakpoints: &[f64], opts: &QuadOptions) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let q = integrate(|t| [f(t)], a, b, breakpoints, opts)?;
    Ok((q.value[0], q.error))
}
