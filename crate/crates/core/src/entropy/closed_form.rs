//! Closed-form integrals for the parametric families. Each function returns
//! `None` when no expression is available, in which case the caller falls
//! back to quadrature. Dynamic Pareto cells always go to quadrature.

use crate::distributions::{Family, ParametricDistribution};
use crate::error::{Error, Result};

fn divergent(what: &str, value: f64, needed: f64) -> Error {
    Error::Divergent(format!("{what} = {value} must exceed {needed}"))
}

/// `∫_{max(t,lo)}^{hi} x^w (sf(x)/sf(t))^g dx`.
pub(super) fn survival_integral(
    d: &ParametricDistribution,
    g: f64,
    weighted: bool,
    t: Option<f64>,
) -> Option<Result<f64>> {
    match *d.family() {
        Family::Exponential { rate } => {
            let s = t.unwrap_or(0.0).max(0.0);
            let k = rate * g;
            Some(Ok(if weighted { (1.0 + s * k) / (k * k) } else { 1.0 / k }))
        }
        Family::Rayleigh { rate } => {
            let k = rate * g;
            match (weighted, t) {
                (true, _) => Some(Ok(1.0 / (2.0 * k))),
                (false, None) => Some(Ok(0.5 * (std::f64::consts::PI / k).sqrt())),
                (false, Some(_)) => None,
            }
        }
        Family::Pareto { shape, scale } => {
            if t.is_some() {
                return None;
            }
            let ag = shape * g;
            Some(if weighted {
                if ag <= 2.0 {
                    Err(divergent("shape times exponent", ag, 2.0))
                } else {
                    Ok(scale * scale / (ag - 2.0))
                }
            } else if ag <= 1.0 {
                Err(divergent("shape times exponent", ag, 1.0))
            } else {
                Ok(scale / (ag - 1.0))
            })
        }
        Family::Uniform { lower, upper } => {
            let s = t.map_or(lower, |t| t.max(lower));
            if s >= upper {
                return Some(Err(Error::OutOfDomain {
                    value: s,
                    reason: "survival-side measure requires sf(t) > 0",
                }));
            }
            let w = upper - s;
            Some(Ok(if weighted {
                w * (s * (g + 1.0) + upper) / ((g + 1.0) * (g + 2.0))
            } else {
                w / (g + 1.0)
            }))
        }
        _ => None,
    }
}

/// `∫_{lo}^{min(t,hi)} x^w (cdf(x)/cdf(t))^g dx`.
pub(super) fn failure_integral(
    d: &ParametricDistribution,
    g: f64,
    weighted: bool,
    t: Option<f64>,
) -> Option<Result<f64>> {
    let (lo, end, integral): (f64, f64, fn(f64, f64, f64, bool) -> f64) = match *d.family() {
        Family::Uniform { lower, upper } => (lower, t.map_or(upper, |t| t.min(upper)), |lo, e, g, w| {
            let len = e - lo;
            if w {
                len * (lo / (g + 1.0) + len / (g + 2.0))
            } else {
                len / (g + 1.0)
            }
        }),
        Family::Power { shape, upper } => {
            let e = t.map_or(upper, |t| t.min(upper));
            if !(e > 0.0) {
                return Some(Err(out_of_domain(e)));
            }
            let cg = shape * g;
            return Some(Ok(if weighted { e * e / (cg + 2.0) } else { e / (cg + 1.0) }));
        }
        _ => return None,
    };
    if end <= lo {
        return Some(Err(out_of_domain(end)));
    }
    Some(Ok(integral(lo, end, g, weighted)))
}

fn out_of_domain(value: f64) -> Error {
    Error::OutOfDomain {
        value,
        reason: "failure-side measure requires cdf(t) > 0",
    }
}
