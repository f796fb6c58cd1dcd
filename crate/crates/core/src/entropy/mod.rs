//! Generalized (weighted) survival and failure entropies of order (α, β).
//!
//! Every measure has the form `(1/(β-α)) log I`, where `I` integrates
//! `x^w · (sf(x)/sf(t))^γ` (survival side) or `x^w · (cdf(x)/cdf(t))^γ`
//! (failure side) over the support, with `w ∈ {0, 1}` and `γ = α+β-1`.
//! [`measure_integral`] computes `I` either from a closed form (when the
//! distribution is a [`ParametricDistribution`] with a known expression) or by
//! adaptive quadrature.

mod bounds;
mod closed_form;
mod identities;
mod recovery;

pub use bounds::{bound_check, conditional_log_moment, conditional_shannon, BoundEntry, BoundReport, Relation};
pub use identities::{
    affine_identity_check, proportional_model_check, AffineResiduals, ChainReport, IdentityCheck,
    ProportionalReport,
};
pub use recovery::{
    classify_gdwse_monotonicity, default_grid, hazard_from_gdwse, reverse_hazard_from_gdwfe,
    DerivativeScheme, Monotonicity,
};

use serde::{Deserialize, Serialize};

use crate::distributions::{Lifetime, ParametricDistribution};
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureConfig};

/// The `(α, β)` pair; requires `β ≥ 1` and `β - 1 < α < β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOrder", into = "RawOrder")]
pub struct EntropyOrder {
    alpha: f64,
    beta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawOrder {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawOrder> for EntropyOrder {
    type Error = Error;
    fn try_from(r: RawOrder) -> Result<Self> {
        EntropyOrder::new(r.alpha, r.beta)
    }
}

impl From<EntropyOrder> for RawOrder {
    fn from(o: EntropyOrder) -> RawOrder {
        RawOrder {
            alpha: o.alpha,
            beta: o.beta,
        }
    }
}

impl EntropyOrder {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let invalid = |reason| Error::InvalidOrder { alpha, beta, reason };
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(invalid("alpha and beta must be finite"));
        }
        if beta < 1.0 {
            return Err(invalid("beta must be at least 1"));
        }
        if !(alpha > beta - 1.0 && alpha < beta) {
            return Err(invalid("alpha must lie in (beta - 1, beta)"));
        }
        Ok(EntropyOrder { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `γ = α + β - 1`, the exponent shared by every measure.
    pub fn gamma(&self) -> f64 {
        self.alpha + self.beta - 1.0
    }

    /// `β - α ∈ (0, 1)`.
    pub fn delta(&self) -> f64 {
        self.beta - self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EntropyKind {
    /// weighted survival
    Gwse,
    /// weighted failure
    Gwfe,
    /// unweighted survival
    Gse,
    /// unweighted failure
    Gfe,
    /// weighted survival of the residual life at `t`
    Gdwse,
    /// weighted failure of the inactivity time at `t`
    Gdwfe,
    /// unweighted survival of the residual life at `t`
    Gdse,
    /// unweighted failure of the inactivity time at `t`
    Gdfe,
}

impl EntropyKind {
    pub fn is_dynamic(self) -> bool {
        matches!(
            self,
            EntropyKind::Gdwse | EntropyKind::Gdwfe | EntropyKind::Gdse | EntropyKind::Gdfe
        )
    }

    pub fn is_weighted(self) -> bool {
        matches!(
            self,
            EntropyKind::Gwse | EntropyKind::Gwfe | EntropyKind::Gdwse | EntropyKind::Gdwfe
        )
    }

    pub fn is_survival(self) -> bool {
        matches!(
            self,
            EntropyKind::Gwse | EntropyKind::Gse | EntropyKind::Gdwse | EntropyKind::Gdse
        )
    }

    /// The static measure with the same integrand.
    pub fn static_kind(self) -> EntropyKind {
        match self {
            EntropyKind::Gdwse => EntropyKind::Gwse,
            EntropyKind::Gdwfe => EntropyKind::Gwfe,
            EntropyKind::Gdse => EntropyKind::Gse,
            EntropyKind::Gdfe => EntropyKind::Gfe,
            k => k,
        }
    }

    /// The dynamic measure with the same integrand.
    pub fn dynamic_kind(self) -> EntropyKind {
        match self {
            EntropyKind::Gwse => EntropyKind::Gdwse,
            EntropyKind::Gwfe => EntropyKind::Gdwfe,
            EntropyKind::Gse => EntropyKind::Gdse,
            EntropyKind::Gfe => EntropyKind::Gdfe,
            k => k,
        }
    }
}

impl std::str::FromStr for EntropyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "gwse" => EntropyKind::Gwse,
            "gwfe" => EntropyKind::Gwfe,
            "gse" => EntropyKind::Gse,
            "gfe" => EntropyKind::Gfe,
            "gdwse" => EntropyKind::Gdwse,
            "gdwfe" => EntropyKind::Gdwfe,
            "gdse" => EntropyKind::Gdse,
            "gdfe" => EntropyKind::Gdfe,
            other => return Err(Error::Parse(format!("unknown measure '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyValue {
    pub value: f64,
    pub kind: EntropyKind,
    pub order: EntropyOrder,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

impl EntropyValue {
    /// `exp((β-α) · value)`, i.e. the integral inside the logarithm.
    pub fn integral(&self) -> f64 {
        (self.order.delta() * self.value).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Closed form when available, quadrature otherwise.
    #[default]
    Auto,
    Quadrature,
}

fn check_exponent(exponent: f64) -> Result<()> {
    if exponent > 0.0 && exponent.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "integrand exponent must be positive, got {exponent}"
        )))
    }
}

/// `I = ∫ x^w (sf(x)/sf(t))^exponent dx` over `[max(t, lo), hi]`.
fn survival_quadrature<D: Lifetime + ?Sized>(
    d: &D,
    exponent: f64,
    weighted: bool,
    t: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let (lo, hi) = d.support();
    let start = t.map_or(lo, |t| t.max(lo));
    let norm = d.ln_sf(start);
    if start >= hi || norm == f64::NEG_INFINITY || norm.is_nan() {
        return Err(Error::OutOfDomain {
            value: start,
            reason: "survival-side measure requires sf(t) > 0",
        });
    }
    check_survival_convergence(d, exponent, weighted)?;
    let split = d.quantile(cfg.tail_cutoff).ok().map(|s| s.max(start));
    quadrature::integrate_range(
        |x| {
            let ls = d.ln_sf(x) - norm;
            if ls == f64::NEG_INFINITY {
                return 0.0;
            }
            let v = (exponent * ls).exp();
            if weighted {
                x * v
            } else {
                v
            }
        },
        start,
        hi,
        split,
        cfg,
    )
}

fn check_survival_convergence<D: Lifetime + ?Sized>(d: &D, exponent: f64, weighted: bool) -> Result<()> {
    let (_, hi) = d.support();
    if hi.is_infinite() {
        if let Some(k) = d.tail_index() {
            let needed = if weighted { 2.0 } else { 1.0 };
            if k * exponent <= needed {
                return Err(Error::Divergent(format!(
                    "tail index {k} times exponent {exponent} must exceed {needed}"
                )));
            }
        }
    }
    Ok(())
}

/// `I = ∫ x^w (cdf(x)/cdf(t))^exponent dx` over `[lo, min(t, hi)]`.
fn failure_quadrature<D: Lifetime + ?Sized>(
    d: &D,
    exponent: f64,
    weighted: bool,
    t: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let (lo, hi) = d.support();
    let end = failure_end(d, t)?;
    let norm = d.ln_cdf(end);
    if end <= lo || norm == f64::NEG_INFINITY || norm.is_nan() {
        return Err(Error::OutOfDomain {
            value: t.unwrap_or(hi),
            reason: "failure-side measure requires cdf(t) > 0",
        });
    }
    quadrature::integrate(
        |x| {
            let lc = d.ln_cdf(x) - norm;
            if lc == f64::NEG_INFINITY {
                return 0.0;
            }
            let v = (exponent * lc).exp();
            if weighted {
                x * v
            } else {
                v
            }
        },
        lo,
        end,
        cfg,
    )
    .map(|r| r.value)
}

fn failure_end<D: Lifetime + ?Sized>(d: &D, t: Option<f64>) -> Result<f64> {
    let (_, hi) = d.support();
    match t {
        Some(t) if t.is_finite() => Ok(t.min(hi)),
        _ if hi.is_finite() => Ok(hi),
        _ => Err(Error::Divergent(
            "failure entropy over an unbounded support: cdf tends to 1 and the integral diverges".into(),
        )),
    }
}

/// The integral inside the logarithm of measure `kind`, with the exponent
/// supplied directly (`γ` for the plain measures, `nγ` for order statistics).
pub fn measure_integral<D: Lifetime + ?Sized>(
    d: &D,
    kind: EntropyKind,
    exponent: f64,
    t: Option<f64>,
    method: Method,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_exponent(exponent)?;
    cfg.validate()?;
    match (kind.is_dynamic(), t) {
        (true, None) => {
            return Err(Error::InvalidParameter(format!("{kind:?} needs a time argument")));
        }
        (false, Some(_)) => {
            return Err(Error::InvalidParameter(format!(
                "{kind:?} is static and takes no time argument"
            )));
        }
        (_, Some(t)) if !t.is_finite() => {
            return Err(Error::InvalidParameter(format!("time must be finite, got {t}")));
        }
        _ => {}
    }
    let weighted = kind.is_weighted();

    if kind.is_survival() {
        check_survival_convergence(d, exponent, weighted)?;
    } else {
        failure_end(d, t)?;
    }

    if method == Method::Auto {
        if let Some(p) = d.as_parametric() {
            let cf = if kind.is_survival() {
                closed_form::survival_integral(p, exponent, weighted, t)
            } else {
                closed_form::failure_integral(p, exponent, weighted, t)
            };
            if let Some(v) = cf {
                return v;
            }
        }
    }

    if kind.is_survival() {
        survival_quadrature(d, exponent, weighted, t, cfg)
    } else {
        failure_quadrature(d, exponent, weighted, t, cfg)
    }
}

/// Evaluates any measure. `t` must be present exactly for dynamic kinds.
pub fn evaluate<D: Lifetime + ?Sized>(
    d: &D,
    order: &EntropyOrder,
    kind: EntropyKind,
    t: Option<f64>,
    method: Method,
    cfg: &QuadratureConfig,
) -> Result<EntropyValue> {
    let integral = measure_integral(d, kind, order.gamma(), t, method, cfg)?;
    Ok(EntropyValue {
        value: integral.ln() / order.delta(),
        kind,
        order: *order,
        t,
    })
}

pub fn gwse<D: Lifetime + ?Sized>(d: &D, order: &EntropyOrder, cfg: &QuadratureConfig) -> Result<EntropyValue> {
    evaluate(d, order, EntropyKind::Gwse, None, Method::Auto, cfg)
}

/// Refuses distributions with unbounded support.
pub fn gwfe<D: Lifetime + ?Sized>(d: &D, order: &EntropyOrder, cfg: &QuadratureConfig) -> Result<EntropyValue> {
    evaluate(d, order, EntropyKind::Gwfe, None, Method::Auto, cfg)
}

pub fn gse<D: Lifetime + ?Sized>(d: &D, order: &EntropyOrder, cfg: &QuadratureConfig) -> Result<EntropyValue> {
    evaluate(d, order, EntropyKind::Gse, None, Method::Auto, cfg)
}

pub fn gfe<D: Lifetime + ?Sized>(d: &D, order: &EntropyOrder, cfg: &QuadratureConfig) -> Result<EntropyValue> {
    evaluate(d, order, EntropyKind::Gfe, None, Method::Auto, cfg)
}

pub fn gdwse<D: Lifetime + ?Sized>(d: &D, order: &EntropyOrder, t: f64, cfg: &QuadratureConfig) -> Result<EntropyValue> {
    evaluate(d, order, EntropyKind::Gdwse, Some(t), Method::Auto, cfg)
}

pub fn gdwfe<D: Lifetime + ?Sized>(d: &D, order: &EntropyOrder, t: f64, cfg: &QuadratureConfig) -> Result<EntropyValue> {
    evaluate(d, order, EntropyKind::Gdwfe, Some(t), Method::Auto, cfg)
}

pub fn gdse<D: Lifetime + ?Sized>(d: &D, order: &EntropyOrder, t: f64, cfg: &QuadratureConfig) -> Result<EntropyValue> {
    evaluate(d, order, EntropyKind::Gdse, Some(t), Method::Auto, cfg)
}

pub fn gdfe<D: Lifetime + ?Sized>(d: &D, order: &EntropyOrder, t: f64, cfg: &QuadratureConfig) -> Result<EntropyValue> {
    evaluate(d, order, EntropyKind::Gdfe, Some(t), Method::Auto, cfg)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter("order statistic index n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// GWSE of the sample minimum `X(1:n)`, whose survival function is `sf^n`.
pub fn gwse_first_order_stat<D: Lifetime + ?Sized>(
    d: &D,
    order: &EntropyOrder,
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<EntropyValue> {
    check_n(n)?;
    let integral = measure_integral(d, EntropyKind::Gwse, n as f64 * order.gamma(), None, Method::Auto, cfg)?;
    Ok(EntropyValue {
        value: integral.ln() / order.delta(),
        kind: EntropyKind::Gwse,
        order: *order,
        t: None,
    })
}

/// GDWFE of the sample maximum `X(n:n)`, whose cdf is `cdf^n`.
pub fn gdwfe_max_order_stat<D: Lifetime + ?Sized>(
    d: &D,
    order: &EntropyOrder,
    n: usize,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<EntropyValue> {
    check_n(n)?;
    let integral = measure_integral(
        d,
        EntropyKind::Gdwfe,
        n as f64 * order.gamma(),
        Some(t),
        Method::Auto,
        cfg,
    )?;
    Ok(EntropyValue {
        value: integral.ln() / order.delta(),
        kind: EntropyKind::Gdwfe,
        order: *order,
        t: Some(t),
    })
}

/// Closed-form family lookup helper used by callers that want to know which
/// route [`Method::Auto`] takes.
pub fn has_closed_form(d: &ParametricDistribution, kind: EntropyKind, t: Option<f64>) -> bool {
    let g = 1.0;
    if kind.is_survival() {
        closed_form::survival_integral(d, g, kind.is_weighted(), t).is_some()
    } else {
        closed_form::failure_integral(d, g, kind.is_weighted(), t).is_some()
    }
}
