//! Adaptive Gauss-Kronrod (10/21 point) integration.
//!
//! Finite intervals are bisected globally, always refining the interval with
//! the largest error estimate. Integrals with an infinite upper limit are
//! mapped onto `(0, 1]` through `x = lo + s (1 - u) / u`, which pushes any
//! algebraic tail singularity to `u = 0` where floating point is dense.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Quantile at which semi-infinite integrals are split into a finite
    /// piece and a mapped tail piece.
    pub tail_cutoff: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            tail_cutoff: 0.999,
            max_subdivisions: 20_000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if !(self.tail_cutoff > 0.0 && self.tail_cutoff < 1.0) {
            return Err(Error::InvalidParameter(
                "tail cutoff must lie in (0, 1)".into(),
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

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

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut kronrod = f_center * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();

    // QUADPACK error rescaling.
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (1.0f64).min((200.0 * err / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "finite integration bounds required, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    if a > b {
        let r = integrate(f, b, a, cfg)?;
        return Ok(Integral {
            value: -r.value,
            ..r
        });
    }

    let (value, error) = gauss_kronrod_21(&f, a, b);
    if !value.is_finite() {
        return Err(Error::QuadratureFailed {
            estimate: value,
            error,
            intervals: 1,
        });
    }

    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    // Segments too narrow to split further keep their error here.
    let mut frozen_err = 0.0;
    let mut frozen_val = 0.0;
    let mut count = 1usize;

    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if count >= cfg.max_subdivisions {
            return Err(Error::QuadratureFailed {
                estimate: total,
                error: total_err,
                intervals: count,
            });
        }
        let Some(seg) = heap.pop() else { break };
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            frozen_err += seg.error;
            frozen_val += seg.value;
            if heap.is_empty() {
                break;
            }
            // nothing left to refine except frozen segments
            if heap.iter().all(|s| s.error == 0.0) {
                break;
            }
            continue;
        }
        let (v1, e1) = gauss_kronrod_21(&f, seg.a, mid);
        let (v2, e2) = gauss_kronrod_21(&f, mid, seg.b);
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(Error::QuadratureFailed {
                estimate: total,
                error: f64::INFINITY,
                intervals: count,
            });
        }
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
        count += 1;

        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        if count % 64 == 0 || total_err <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
            // periodic re-sum so incremental roundoff does not drift
            total = frozen_val + heap.iter().map(|s| s.value).sum::<f64>();
            total_err = frozen_err + heap.iter().map(|s| s.error).sum::<f64>();
        }
    }

    let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
    if total_err > tol {
        return Err(Error::QuadratureFailed {
            estimate: total,
            error: total_err,
            intervals: count,
        });
    }
    Ok(Integral {
        value: total,
        error: total_err,
        intervals: count,
    })
}

/// Integrates `f` over `[lo, ∞)` via `x = lo + scale (1 - u) / u`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    scale: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tail scale must be positive and finite, got {scale}"
        )));
    }
    let mapped = |u: f64| {
        let x = lo + scale * (1.0 - u) / u;
        let fx = f(x);
        if fx == 0.0 {
            0.0
        } else {
            fx * scale / (u * u)
        }
    };
    integrate(mapped, 0.0, 1.0, cfg)
}

/// Integrates over `[lo, hi]` where `hi` may be `+∞`. Semi-infinite ranges
/// are split at `split` (when it lies inside the range) into a finite piece
/// and a mapped tail.
pub fn integrate_range<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    split: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if hi.is_finite() {
        return Ok(integrate(&f, lo, hi, cfg)?.value);
    }
    match split {
        Some(s) if s.is_finite() && s > lo => {
            let head = integrate(&f, lo, s, cfg)?.value;
            let tail = integrate_to_infinity(&f, s, s - lo, cfg)?.value;
            Ok(head + tail)
        }
        _ => {
            let scale = if lo.abs() > 0.0 { lo.abs() } else { 1.0 };
            Ok(integrate_to_infinity(&f, lo, scale, cfg)?.value)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let cfg = QuadratureConfig::default();
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, &cfg).unwrap();
        assert_relative_eq!(r.value, 8.0, max_relative = 1e-14);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let cfg = QuadratureConfig::default();
        let r = integrate(|x| x.sin(), std::f64::consts::PI, 0.0, &cfg).unwrap();
        assert_relative_eq!(r.value, -2.0, max_relative = 1e-12);
    }

    #[test]
    fn algebraic_endpoint_singularity() {
        let cfg = QuadratureConfig::default();
        let r = integrate(|x| x.powf(-0.5), 0.0, 1.0, &cfg).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-10);
        let r = integrate(|x| x.powf(-0.9), 0.0, 1.0, &cfg).unwrap();
        assert_relative_eq!(r.value, 10.0, max_relative = 1e-9);
    }

    #[test]
    fn exponential_moment_to_infinity() {
        let cfg = QuadratureConfig::default();
        let r = integrate_to_infinity(|x| x * (-x).exp(), 0.0, 1.0, &cfg).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-11);
    }

    #[test]
    fn slow_power_tail() {
        // ∫_1^∞ x^{-2.2} dx = 1/1.2
        let cfg = QuadratureConfig::default();
        let r = integrate_range(|x| x.powf(-2.2), 1.0, f64::INFINITY, Some(10.0), &cfg).unwrap();
        assert_relative_eq!(r, 1.0 / 1.2, max_relative = 1e-9);
    }

    #[test]
    fn log_singularity() {
        // ∫_0^1 ln x dx = -1
        let cfg = QuadratureConfig::default();
        let r = integrate(|x| x.ln(), 0.0, 1.0, &cfg).unwrap();
        assert_relative_eq!(r.value, -1.0, max_relative = 1e-10);
    }

    #[test]
    fn non_integrable_fails() {
        let cfg = QuadratureConfig {
            max_subdivisions: 200,
            ..QuadratureConfig::default()
        };
        assert!(integrate(|x| 1.0 / x, 0.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        let bad = QuadratureConfig {
            tail_cutoff: 1.0,
            ..QuadratureConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
