//! Recovering the hazard (reverse hazard) rate from a GDWSE (GDWFE) curve and
//! classifying the monotonicity of GDWSE.
//!
//! Differentiating `e^{δ g(t)} = ∫_t^∞ x (sf(x)/sf(t))^γ dx` gives
//! `λ(t) = (δ g'(t) + t e^{-δ g(t)}) / γ`, and the failure-side analogue gives
//! `r(t) = (t e^{-δ g(t)} - δ g'(t)) / γ`.

use serde::Serialize;

use super::{gdwse, EntropyOrder};
use crate::distributions::Lifetime;
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeScheme {
    /// `(g(t+h) - g(t-h)) / 2h`
    Central { step: f64 },
    /// One Richardson step on top of the central difference with `h` and `h/2`.
    Richardson { step: f64 },
}

impl Default for DerivativeScheme {
    fn default() -> Self {
        DerivativeScheme::Central { step: 1e-5 }
    }
}

impl DerivativeScheme {
    fn derivative<G: Fn(f64) -> Result<f64>>(&self, g: &G, t: f64) -> Result<f64> {
        let central = |h: f64| -> Result<f64> { Ok((g(t + h)? - g(t - h)?) / (2.0 * h)) };
        match *self {
            DerivativeScheme::Central { step } => {
                check_step(step)?;
                central(step)
            }
            DerivativeScheme::Richardson { step } => {
                check_step(step)?;
                let coarse = central(step)?;
                let fine = central(0.5 * step)?;
                Ok((4.0 * fine - coarse) / 3.0)
            }
        }
    }
}

fn check_step(step: f64) -> Result<()> {
    if step > 0.0 && step.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("derivative step must be positive, got {step}")))
    }
}

/// Hazard rate at `t` from a GDWSE curve `g`.
pub fn hazard_from_gdwse<G: Fn(f64) -> Result<f64>>(
    g: G,
    order: &EntropyOrder,
    t: f64,
    scheme: DerivativeScheme,
) -> Result<f64> {
    let delta = order.delta();
    let dg = scheme.derivative(&g, t)?;
    let gt = g(t)?;
    Ok((delta * dg + t * (-delta * gt).exp()) / order.gamma())
}

/// Reverse hazard rate at `t` from a GDWFE curve `g`.
pub fn reverse_hazard_from_gdwfe<G: Fn(f64) -> Result<f64>>(
    g: G,
    order: &EntropyOrder,
    t: f64,
    scheme: DerivativeScheme,
) -> Result<f64> {
    let delta = order.delta();
    let dg = scheme.derivative(&g, t)?;
    let gt = g(t)?;
    Ok((t * (-delta * gt).exp() - delta * dg) / order.gamma())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    /// The sign indicator vanishes on the whole grid.
    Constant,
    Mixed,
}

/// 64 points spanning the 0.1% to 99.9% quantiles.
pub fn default_grid<D: Lifetime + ?Sized>(d: &D) -> Result<Vec<f64>> {
    let lo = d.quantile(0.001)?;
    let hi = d.quantile(0.999)?;
    let n = 64;
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

/// Classifies GDWSE on `grid` through the sign of
/// `γ λ(t) - t e^{-δ ξ(X;t)}`, which has the sign of the derivative.
pub fn classify_gdwse_monotonicity<D: Lifetime + ?Sized>(
    d: &D,
    order: &EntropyOrder,
    grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Monotonicity> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("monotonicity grid is empty".into()));
    }
    let (mut pos, mut neg) = (false, false);
    for &t in grid {
        let lhs = order.gamma() * d.hazard(t)?;
        let rhs = t * (-order.delta() * gdwse(d, order, t, cfg)?.value).exp();
        let tol = 1e-8 * (lhs.abs() + rhs.abs()) + 1e-300;
        let s = lhs - rhs;
        if s > tol {
            pos = true;
        } else if s < -tol {
            neg = true;
        }
    }
    Ok(match (pos, neg) {
        (false, false) => Monotonicity::Constant,
        (true, false) => Monotonicity::Increasing,
        (false, true) => Monotonicity::Decreasing,
        (true, true) => Monotonicity::Mixed,
    })
}
