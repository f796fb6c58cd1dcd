//! Structural identities: the affine decomposition of the weighted integral
//! and the proportional (reverse) hazards relations.

use serde::Serialize;

use super::{evaluate, measure_integral, EntropyKind, EntropyOrder, Method};
use crate::distributions::{Affine, Lifetime, ProportionalHazards, ProportionalReverseHazards};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;

/// Relative residuals of `I_w(aX+b) = a² I_w(X) + ab I(X)` for the survival
/// and failure sides, static and dynamic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineResiduals {
    pub survival: f64,
    pub failure: Option<f64>,
    /// Evaluated at `t = b + a · median(X)`.
    pub dynamic_survival: f64,
    pub dynamic_failure: f64,
    pub t: f64,
}

impl AffineResiduals {
    pub fn max(&self) -> f64 {
        [
            Some(self.survival),
            self.failure,
            Some(self.dynamic_survival),
            Some(self.dynamic_failure),
        ]
        .into_iter()
        .flatten()
        .fold(0.0, f64::max)
    }
}

fn rel(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE)
}

pub fn affine_identity_check<D: Lifetime + ?Sized>(
    d: &D,
    order: &EntropyOrder,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<AffineResiduals> {
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("shift must be non-negative, got {b}")));
    }
    let z = Affine::new(d, a, b)?;
    let g = order.gamma();
    let q = Method::Quadrature;
    let side = |wk: EntropyKind, uk: EntropyKind, tx: Option<f64>| -> Result<f64> {
        let tz = tx.map(|t| a * t + b);
        let lhs = measure_integral(&z, wk, g, tz, q, cfg)?;
        let iw = measure_integral(d, wk, g, tx, Method::Auto, cfg)?;
        let iu = measure_integral(d, uk, g, tx, Method::Auto, cfg)?;
        Ok(rel(lhs, a * a * iw + a * b * iu))
    };
    let survival = side(EntropyKind::Gwse, EntropyKind::Gse, None)?;
    let failure = if d.support().1.is_finite() {
        Some(side(EntropyKind::Gwfe, EntropyKind::Gfe, None)?)
    } else {
        None
    };
    let median = d.quantile(0.5)?;
    let dynamic_survival = side(EntropyKind::Gdwse, EntropyKind::Gdse, Some(median))?;
    let dynamic_failure = side(EntropyKind::Gdwfe, EntropyKind::Gdfe, Some(median))?;
    Ok(AffineResiduals {
        survival,
        failure,
        dynamic_survival,
        dynamic_failure,
        t: a * median + b,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum IdentityCheck {
    Inapplicable { reason: String },
    Checked { lhs: f64, rhs: f64, residual: f64 },
}

/// Entropies of the transformed model, the baseline and the scaled variable
/// `θX`, with the ordering they must satisfy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub transformed: f64,
    pub base: f64,
    pub scaled: f64,
    pub chain_holds: bool,
    pub identity: IdentityCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProportionalReport {
    pub theta: f64,
    pub survival: ChainReport,
    /// Present only for bounded support.
    pub failure: Option<ChainReport>,
}

fn chain_ok(theta: f64, transformed: f64, base: f64, scaled: f64) -> bool {
    let tol = 1e-9 * transformed.abs().max(base.abs()).max(scaled.abs()).max(1.0);
    let le = |x: f64, y: f64| x <= y + tol;
    if theta > 1.0 {
        le(transformed, base) && le(base, scaled)
    } else if theta < 1.0 {
        le(scaled, base) && le(base, transformed)
    } else {
        (transformed - base).abs() <= tol && (scaled - base).abs() <= tol
    }
}

/// For `θ > 0`, compares GWSE of the proportional hazards model `sf^θ` (and
/// GWFE of the proportional reverse hazards model `cdf^θ`) against the
/// rescaled baseline entropy of the transformed order `(θα, θβ-θ+1)`, and
/// checks the ordering between `X_θ`, `X` and `θX`.
pub fn proportional_model_check<D: Lifetime + ?Sized>(
    d: &D,
    order: &EntropyOrder,
    theta: f64,
    cfg: &QuadratureConfig,
) -> Result<ProportionalReport> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!("theta must be positive, got {theta}")));
    }
    let scaled_d = Affine::new(d, theta, 0.0)?;
    let transformed_order = EntropyOrder::new(theta * order.alpha(), theta * order.beta() - theta + 1.0);

    let build = |kind: EntropyKind, transformed: f64| -> Result<ChainReport> {
        let base = evaluate(d, order, kind, None, Method::Auto, cfg)?.value;
        let scaled = evaluate(&scaled_d, order, kind, None, Method::Quadrature, cfg)?.value;
        let identity = match &transformed_order {
            Err(e) => IdentityCheck::Inapplicable {
                reason: e.to_string(),
            },
            Ok(o2) => {
                let rhs = o2.delta() / order.delta() * evaluate(d, o2, kind, None, Method::Auto, cfg)?.value;
                IdentityCheck::Checked {
                    lhs: transformed,
                    rhs,
                    residual: rel(transformed, rhs),
                }
            }
        };
        Ok(ChainReport {
            transformed,
            base,
            scaled,
            chain_holds: chain_ok(theta, transformed, base, scaled),
            identity,
        })
    };

    let ph = ProportionalHazards::new(d, theta)?;
    let survival = build(
        EntropyKind::Gwse,
        evaluate(&ph, order, EntropyKind::Gwse, None, Method::Quadrature, cfg)?.value,
    )?;
    let failure = if d.support().1.is_finite() {
        let prh = ProportionalReverseHazards::new(d, theta)?;
        Some(build(
            EntropyKind::Gwfe,
            evaluate(&prh, order, EntropyKind::Gwfe, None, Method::Quadrature, cfg)?.value,
        )?)
    } else {
        None
    };
    Ok(ProportionalReport {
        theta,
        survival,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::ParametricDistribution as PD;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn affine_residuals_small() {
        let o = EntropyOrder::new(0.6, 1.3).unwrap();
        for d in [
            PD::exponential(1.3).unwrap(),
            PD::weibull(2.0).unwrap(),
            PD::uniform(0.5, 2.0).unwrap(),
            PD::power(1.5, 1.0).unwrap(),
        ] {
            let r = affine_identity_check(&d, &o, 2.5, 0.7, &cfg()).unwrap();
            assert!(r.max() <= 1e-8, "{d}: {r:?}");
            assert_eq!(r.failure.is_some(), d.support().1.is_finite());
        }
    }

    #[test]
    fn pure_scaling_shifts_entropy() {
        let o = EntropyOrder::new(0.26, 1.25).unwrap();
        let d = PD::gamma(2.5).unwrap();
        let a = 3.0;
        let z = Affine::new(&d, a, 0.0).unwrap();
        let lhs = evaluate(&z, &o, EntropyKind::Gwse, None, Method::Quadrature, &cfg()).unwrap().value;
        let rhs = 2.0 * a.ln() / o.delta() + evaluate(&d, &o, EntropyKind::Gwse, None, Method::Quadrature, &cfg()).unwrap().value;
        assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn proportional_hazards_exponential() {
        let o = EntropyOrder::new(0.6, 1.3).unwrap();
        let d = PD::exponential(1.0).unwrap();
        for theta in [0.5, 1.0, 1.3] {
            let r = proportional_model_check(&d, &o, theta, &cfg()).unwrap();
            assert!(r.survival.chain_holds, "{r:?}");
            match r.survival.identity {
                IdentityCheck::Checked { residual, .. } => assert!(residual < 1e-8, "{r:?}"),
                IdentityCheck::Inapplicable { .. } => panic!("should apply for θ = {theta}"),
            }
            assert!(r.failure.is_none());
        }
    }

    #[test]
    fn identity_inapplicable_for_large_theta() {
        let o = EntropyOrder::new(0.26, 1.25).unwrap();
        // 1/(1-(β-α)) = 100
        let d = PD::exponential(1.0).unwrap();
        let r = proportional_model_check(&d, &o, 150.0, &cfg()).unwrap();
        assert!(matches!(r.survival.identity, IdentityCheck::Inapplicable { .. }));
        assert!(r.survival.chain_holds);
    }

    #[test]
    fn reverse_hazards_power() {
        let o = EntropyOrder::new(0.5, 1.2).unwrap();
        let d = PD::power(2.0, 1.5).unwrap();
        for theta in [0.4, 2.0] {
            let r = proportional_model_check(&d, &o, theta, &cfg()).unwrap();
            let f = r.failure.unwrap();
            assert!(f.chain_holds, "{f:?}");
            match f.identity {
                IdentityCheck::Checked { residual, .. } => assert!(residual < 1e-8),
                IdentityCheck::Inapplicable { ref reason } => panic!("{reason}"),
            }
        }
    }
}
