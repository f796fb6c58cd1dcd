//! Order-statistic estimators of GWSE and GWFE.
//!
//! The empirical survival function is a step function, so the weighted
//! integrals reduce to sums over consecutive order statistics: on
//! `[X(i), X(i+1))` the integral of `x` is `(X(i+1)² - X(i)²)/2`.

use serde::{Deserialize, Serialize};

use crate::entropy::EntropyOrder;
use crate::error::{Error, Result};

/// Non-negative observations, kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("sample is empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "sample values must be finite and non-negative, found {bad}"
            )));
        }
        values.sort_by(f64::total_cmp);
        Ok(Sample { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn scaled(&self, c: f64) -> Result<Sample> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {c}")));
        }
        Ok(Sample {
            values: self.values.iter().map(|v| v * c).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorVariant {
    /// Sum over `i = 1..n-1` only; the segment below the smallest
    /// observation is left out. Reproduces the published critical values.
    #[default]
    InteriorSum,
    /// Exact integral of the empirical step function, including
    /// `[0, X(1))` where the empirical survival function equals 1.
    ExactStep,
}

impl std::str::FromStr for EstimatorVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "interior-sum" | "interior" => Ok(EstimatorVariant::InteriorSum),
            "exact-step" | "exact" => Ok(EstimatorVariant::ExactStep),
            other => Err(Error::Parse(format!("unknown estimator variant '{other}'"))),
        }
    }
}

impl std::fmt::Display for EstimatorVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EstimatorVariant::InteriorSum => "interior-sum",
            EstimatorVariant::ExactStep => "exact-step",
        })
    }
}

fn weighted_step_sum(
    s: &Sample,
    order: &EntropyOrder,
    variant: EstimatorVariant,
    weight: impl Fn(f64) -> f64,
    leading_weight: f64,
) -> Result<f64> {
    let n = s.len();
    if n < 2 {
        return Err(Error::DegenerateSample(format!(
            "at least 2 observations required, got {n}"
        )));
    }
    let gamma = order.gamma();
    let x = s.values();
    let nf = n as f64;
    let mut total = 0.0;
    for i in 1..n {
        let half_gap = 0.5 * (x[i] * x[i] - x[i - 1] * x[i - 1]);
        total += half_gap * weight(i as f64 / nf).powf(gamma);
    }
    if variant == EstimatorVariant::ExactStep {
        total += 0.5 * x[0] * x[0] * leading_weight;
    }
    if !(total > 0.0) {
        return Err(Error::DegenerateSample(
            "empirical integral is zero (all observations tied)".into(),
        ));
    }
    Ok(total)
}

/// `exp((β-α) ξ̂)`, the weighted integral of the empirical survival function.
pub fn empirical_survival_integral(s: &Sample, order: &EntropyOrder, variant: EstimatorVariant) -> Result<f64> {
    weighted_step_sum(s, order, variant, |p| 1.0 - p, 1.0)
}

/// `exp((β-α) fξ̂)`; the empirical cdf is 0 below `X(1)` so both variants agree.
pub fn empirical_failure_integral(s: &Sample, order: &EntropyOrder, variant: EstimatorVariant) -> Result<f64> {
    weighted_step_sum(s, order, variant, |p| p, 0.0)
}

pub fn empirical_gwse(s: &Sample, order: &EntropyOrder, variant: EstimatorVariant) -> Result<f64> {
    Ok(empirical_survival_integral(s, order, variant)?.ln() / order.delta())
}

pub fn empirical_gwfe(s: &Sample, order: &EntropyOrder, variant: EstimatorVariant) -> Result<f64> {
    Ok(empirical_failure_integral(s, order, variant)?.ln() / order.delta())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn order() -> EntropyOrder {
        EntropyOrder::new(0.26, 1.25).unwrap()
    }

    #[test]
    fn sample_validation() {
        assert!(Sample::new(vec![]).is_err());
        assert!(Sample::new(vec![1.0, -0.5]).is_err());
        assert!(Sample::new(vec![1.0, f64::NAN]).is_err());
        let s = Sample::new(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(s.mean(), 2.0);
    }

    #[test]
    fn tied_pair_is_degenerate() {
        let s = Sample::new(vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            empirical_gwse(&s, &order(), EstimatorVariant::InteriorSum),
            Err(Error::DegenerateSample(_))
        ));
        assert!(empirical_gwfe(&Sample::new(vec![2.0; 5]).unwrap(), &order(), EstimatorVariant::InteriorSum).is_err());
        let single = Sample::new(vec![1.0]).unwrap();
        assert!(empirical_gwse(&single, &order(), EstimatorVariant::InteriorSum).is_err());
    }

    #[test]
    fn two_point_sample() {
        let o = order();
        let s = Sample::new(vec![0.0, 2.0]).unwrap();
        // single term (4 - 0)/2 * (1/2)^γ
        let expected = (2.0 * 0.5f64.powf(o.gamma())).ln() / o.delta();
        assert_relative_eq!(empirical_gwse(&s, &o, EstimatorVariant::InteriorSum).unwrap(), expected, max_relative = 1e-14);
        assert_relative_eq!(empirical_gwfe(&s, &o, EstimatorVariant::InteriorSum).unwrap(), expected, max_relative = 1e-14);
    }

    #[test]
    fn variants_differ_by_leading_segment() {
        let o = order();
        let s = Sample::new(vec![0.7, 1.1, 2.5, 4.0]).unwrap();
        let interior = empirical_survival_integral(&s, &o, EstimatorVariant::InteriorSum).unwrap();
        let exact = empirical_survival_integral(&s, &o, EstimatorVariant::ExactStep).unwrap();
        assert_relative_eq!(exact - interior, 0.49 / 2.0, max_relative = 1e-13);
        let via_log = (o.delta() * empirical_gwse(&s, &o, EstimatorVariant::ExactStep).unwrap()).exp()
            - (o.delta() * empirical_gwse(&s, &o, EstimatorVariant::InteriorSum).unwrap()).exp();
        assert_relative_eq!(via_log, 0.245, max_relative = 1e-12);
        assert_eq!(
            empirical_failure_integral(&s, &o, EstimatorVariant::InteriorSum).unwrap(),
            empirical_failure_integral(&s, &o, EstimatorVariant::ExactStep).unwrap()
        );
    }

    #[test]
    fn scale_equivariance() {
        let o = order();
        let s = Sample::new(vec![0.2, 0.9, 1.3, 3.3, 5.0]).unwrap();
        for c in [0.01, 0.5, 3.0, 250.0] {
            for v in [EstimatorVariant::InteriorSum, EstimatorVariant::ExactStep] {
                let lhs = empirical_gwse(&s.scaled(c).unwrap(), &o, v).unwrap();
                let rhs = 2.0 * c.ln() / o.delta() + empirical_gwse(&s, &o, v).unwrap();
                assert!((lhs - rhs).abs() <= 1e-12, "c={c}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("interior-sum".parse::<EstimatorVariant>().unwrap(), EstimatorVariant::InteriorSum);
        assert_eq!("Exact-Step".parse::<EstimatorVariant>().unwrap(), EstimatorVariant::ExactStep);
        assert!("half".parse::<EstimatorVariant>().is_err());
        assert_eq!(EstimatorVariant::default().to_string(), "interior-sum");
    }
}
