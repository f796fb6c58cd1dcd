//! Closed-form oracle suite.
//!
//! Each cell pairs a textbook expression for `exp((β-α) ξ)` (or for the mean
//! residual life) with an independent quadrature of the defining integral on a
//! randomly drawn parameter set and order. The expressions here are written
//! out independently of the library's closed forms.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::distributions::{
    wmrl, Affine, Lifetime, ParametricDistribution as PD, ProportionalHazards, ProportionalReverseHazards,
    SeededSampler,
};
use crate::entropy::{measure_integral, EntropyKind, EntropyOrder, Method};
use crate::error::Result;
use crate::quadrature::QuadratureConfig;

pub const DEFAULT_DRAWS: usize = 20;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    pub name: &'static str,
    pub draws: usize,
    pub max_rel_error: f64,
    pub pass: bool,
    /// First failing draw, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Excluded {
    pub name: &'static str,
    pub reason: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub draws: usize,
    pub tolerance: f64,
    pub cells: Vec<CellResult>,
    pub excluded: Vec<Excluded>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }
}

type Cell = Box<dyn Fn(&mut ChaCha8Rng) -> Result<(f64, f64)>>;

fn draw_order(rng: &mut ChaCha8Rng) -> EntropyOrder {
    let beta = rng.random_range(1.0..3.0);
    let alpha = beta - 1.0 + rng.random_range(0.05..0.95);
    EntropyOrder::new(alpha, beta).expect("drawn inside the valid region")
}

fn quad<D: Lifetime>(d: &D, kind: EntropyKind, o: &EntropyOrder, t: Option<f64>) -> Result<f64> {
    measure_integral(d, kind, o.gamma(), t, Method::Quadrature, &QuadratureConfig::default())
}

/// Pareto shape with `shape · factor` comfortably above 2.
fn pareto_shape(rng: &mut ChaCha8Rng, factor: f64) -> f64 {
    rng.random_range(2.5..10.0) / factor
}

fn cells() -> Vec<(&'static str, Cell)> {
    use EntropyKind::*;
    vec![
        (
            "exponential gwse X",
            Box::new(|rng| {
                let (o, l) = (draw_order(rng), rng.random_range(0.2..5.0));
                let g = o.gamma();
                Ok(((-2.0 * (l * g).ln()).exp(), quad(&PD::exponential(l)?, Gwse, &o, None)?))
            }),
        ),
        (
            "exponential gwse X_theta",
            Box::new(|rng| {
                let (o, l, th) = (draw_order(rng), rng.random_range(0.2..5.0), rng.random_range(0.3..3.0));
                let g = o.gamma();
                let d = ProportionalHazards::new(PD::exponential(l)?, th)?;
                Ok(((-2.0 * (l * th * g).ln()).exp(), quad(&d, Gwse, &o, None)?))
            }),
        ),
        (
            "exponential gwse theta*X",
            Box::new(|rng| {
                let (o, l, th) = (draw_order(rng), rng.random_range(0.2..5.0), rng.random_range(0.3..3.0));
                let g = o.gamma();
                let d = Affine::new(PD::exponential(l)?, th, 0.0)?;
                Ok(((2.0 * th.ln() - 2.0 * (l * g).ln()).exp(), quad(&d, Gwse, &o, None)?))
            }),
        ),
        (
            "pareto gwse X",
            Box::new(|rng| {
                let o = draw_order(rng);
                let g = o.gamma();
                let (a, b) = (pareto_shape(rng, g), rng.random_range(0.5..3.0));
                Ok(((b * b / (a * g - 2.0)).ln().exp(), quad(&PD::pareto(a, b)?, Gwse, &o, None)?))
            }),
        ),
        (
            "pareto gwse X_theta",
            Box::new(|rng| {
                let o = draw_order(rng);
                let g = o.gamma();
                let th = rng.random_range(0.3..3.0);
                let (a, b) = (pareto_shape(rng, g * th), rng.random_range(0.5..3.0));
                let d = ProportionalHazards::new(PD::pareto(a, b)?, th)?;
                Ok(((b * b / (a * th * g - 2.0)).ln().exp(), quad(&d, Gwse, &o, None)?))
            }),
        ),
        (
            "pareto gwse theta*X (corrected)",
            Box::new(|rng| {
                let o = draw_order(rng);
                let g = o.gamma();
                let th = rng.random_range(0.3..3.0);
                let (a, b) = (pareto_shape(rng, g), rng.random_range(0.5..3.0));
                let d = Affine::new(PD::pareto(a, b)?, th, 0.0)?;
                Ok(((b * b * th * th / (a * g - 2.0)).ln().exp(), quad(&d, Gwse, &o, None)?))
            }),
        ),
        (
            "exponential gwse static",
            Box::new(|rng| {
                let (o, l) = (draw_order(rng), rng.random_range(0.2..5.0));
                let value = 2.0 / o.delta() * (1.0 / (l * o.gamma())).ln();
                Ok(((o.delta() * value).exp(), quad(&PD::exponential(l)?, Gwse, &o, None)?))
            }),
        ),
        (
            "exponential wmrl at 0",
            Box::new(|rng| {
                let l = rng.random_range(0.2..5.0);
                let cfg = QuadratureConfig::default();
                Ok((1.0 / (l * l), wmrl(&PD::exponential(l)?, 0.0, &cfg)?))
            }),
        ),
        (
            "exponential gdwse",
            Box::new(|rng| {
                let (o, l) = (draw_order(rng), rng.random_range(0.2..5.0));
                let t = rng.random_range(0.0..5.0) / l;
                let g = o.gamma();
                let value = ((1.0 + t * l * g) / (l * l * g * g)).ln() / o.delta();
                Ok(((o.delta() * value).exp(), quad(&PD::exponential(l)?, Gdwse, &o, Some(t))?))
            }),
        ),
        (
            "exponential wmrl at t",
            Box::new(|rng| {
                let l = rng.random_range(0.2..5.0);
                let t = rng.random_range(0.0..5.0) / l;
                let cfg = QuadratureConfig::default();
                Ok(((1.0 + t * l) / (l * l), wmrl(&PD::exponential(l)?, t, &cfg)?))
            }),
        ),
        (
            "pareto gwse static",
            Box::new(|rng| {
                let o = draw_order(rng);
                let g = o.gamma();
                let (a, b) = (pareto_shape(rng, g), rng.random_range(0.5..3.0));
                let value = (b * b / (a * g - 2.0)).ln() / o.delta();
                Ok(((o.delta() * value).exp(), quad(&PD::pareto(a, b)?, Gwse, &o, None)?))
            }),
        ),
        (
            "pareto wmrl at lower edge",
            Box::new(|rng| {
                let (a, b) = (rng.random_range(2.5..10.0), rng.random_range(0.5..3.0));
                let cfg = QuadratureConfig::default();
                Ok((b * b / (a - 2.0), wmrl(&PD::pareto(a, b)?, b, &cfg)?))
            }),
        ),
        (
            "uniform gwfe X",
            Box::new(|rng| {
                let (o, a) = (draw_order(rng), rng.random_range(0.2..5.0));
                let g = o.gamma();
                Ok(((a * a / (2.0 + g)).ln().exp(), quad(&PD::uniform(0.0, a)?, Gwfe, &o, None)?))
            }),
        ),
        (
            "uniform gwfe X_theta",
            Box::new(|rng| {
                let (o, a, th) = (draw_order(rng), rng.random_range(0.2..5.0), rng.random_range(0.3..3.0));
                let g = o.gamma();
                let d = ProportionalReverseHazards::new(PD::uniform(0.0, a)?, th)?;
                Ok(((a * a / (2.0 + g * th)).ln().exp(), quad(&d, Gwfe, &o, None)?))
            }),
        ),
        (
            "uniform gwfe theta*X",
            Box::new(|rng| {
                let (o, a, th) = (draw_order(rng), rng.random_range(0.2..5.0), rng.random_range(0.3..3.0));
                let g = o.gamma();
                let d = Affine::new(PD::uniform(0.0, a)?, th, 0.0)?;
                Ok(((a * a * th * th / (2.0 + g)).ln().exp(), quad(&d, Gwfe, &o, None)?))
            }),
        ),
        (
            "power gwfe X",
            Box::new(|rng| {
                let (o, c) = (draw_order(rng), rng.random_range(0.3..5.0));
                let g = o.gamma();
                Ok(((1.0 / (2.0 + g * c)).ln().exp(), quad(&PD::power(c, 1.0)?, Gwfe, &o, None)?))
            }),
        ),
        (
            "power gwfe X_theta",
            Box::new(|rng| {
                let (o, c, th) = (draw_order(rng), rng.random_range(0.3..5.0), rng.random_range(0.3..3.0));
                let g = o.gamma();
                let d = ProportionalReverseHazards::new(PD::power(c, 1.0)?, th)?;
                Ok(((1.0 / (2.0 + g * th * c)).ln().exp(), quad(&d, Gwfe, &o, None)?))
            }),
        ),
        (
            "power gwfe theta*X",
            Box::new(|rng| {
                let (o, c, th) = (draw_order(rng), rng.random_range(0.3..5.0), rng.random_range(0.3..3.0));
                let g = o.gamma();
                let d = Affine::new(PD::power(c, 1.0)?, th, 0.0)?;
                Ok(((th * th / (2.0 + g * c)).ln().exp(), quad(&d, Gwfe, &o, None)?))
            }),
        ),
    ]
}

const EXCLUDED: [Excluded; 3] = [
    Excluded {
        name: "pareto gwse theta*X (as printed)",
        reason: "printed denominator θγ-2 drops the shape parameter; the corrected aγ-2 cell is checked instead",
    },
    Excluded {
        name: "pareto gdwse",
        reason: "printed expression lacks the 1/(β-α) factor; the dynamic Pareto value is computed by quadrature",
    },
    Excluded {
        name: "pareto wmrl at t",
        reason: "printed (t²-a)/(a-2) disagrees with direct integration, which gives t²/(a-2)",
    },
];

/// Runs every cell on `draws` seeded random draws. Draw `k` of cell `i` uses
/// ChaCha stream `k` of seed `seed + i`, so cells are independent of each other.
pub fn run_verification(draws: usize, seed: u64, tolerance: f64) -> Result<VerifyReport> {
    let mut results = Vec::new();
    for (i, (name, cell)) in cells().into_iter().enumerate() {
        let mut max_rel: f64 = 0.0;
        let mut failure = None;
        for k in 0..draws {
            let mut rng = SeededSampler::new(seed.wrapping_add(i as u64), k as u64).rng();
            match cell(&mut rng) {
                Ok((expected, computed)) => {
                    let rel = (computed - expected).abs() / expected.abs();
                    if !(rel <= tolerance) && failure.is_none() {
                        failure = Some(format!("draw {k}: expected {expected}, quadrature {computed}"));
                    }
                    max_rel = if rel.is_nan() { f64::INFINITY } else { max_rel.max(rel) };
                }
                Err(e) => {
                    failure.get_or_insert(format!("draw {k}: {e}"));
                    max_rel = f64::INFINITY;
                }
            }
        }
        results.push(CellResult {
            name,
            draws,
            max_rel_error: max_rel,
            pass: failure.is_none(),
            failure,
        });
    }
    Ok(VerifyReport {
        seed,
        draws,
        tolerance,
        cells: results,
        excluded: EXCLUDED.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_on_a_few_draws() {
        let r = run_verification(3, 11, DEFAULT_TOLERANCE).unwrap();
        for c in &r.cells {
            assert!(c.pass, "{c:?}");
        }
        assert_eq!(r.cells.len(), 18);
        assert_eq!(r.excluded.len(), 3);
    }

    #[test]
    fn drawn_orders_are_valid() {
        for k in 0..200 {
            let mut rng = SeededSampler::new(5, k).rng();
            let o = draw_order(&mut rng);
            assert!(o.delta() > 0.0 && o.delta() < 1.0);
        }
    }
}
