//! Inequalities linking the generalized entropies to the weighted mean
//! residual life / inactivity time and to Shannon-type quantities.
//!
//! The comparisons with `m*` and `μ*` rest on `sf^γ ≤ sf`, which holds for
//! `γ ≥ 1` only; for `γ < 1` the direction flips and the report says so.

use serde::Serialize;

use super::{evaluate, EntropyKind, EntropyOrder, Method};
use crate::distributions::{wmit, wmrl, Lifetime};
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs ≤ rhs`
    AtMost,
    /// `lhs ≥ rhs`
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEntry {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    /// Positive when the inequality holds strictly.
    pub margin: f64,
}

impl BoundEntry {
    fn new(name: &'static str, lhs: f64, rhs: f64, relation: Relation) -> Self {
        let margin = match relation {
            Relation::AtMost => rhs - lhs,
            Relation::AtLeast => lhs - rhs,
        };
        BoundEntry {
            name,
            lhs,
            rhs,
            relation,
            margin,
        }
    }

    /// Holds up to `rel_tol` relative to the magnitudes involved.
    pub fn holds(&self, rel_tol: f64) -> bool {
        let scale = self.lhs.abs().max(self.rhs.abs()).max(1.0);
        self.margin >= -rel_tol * scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub name: &'static str,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub entries: Vec<BoundEntry>,
    pub skipped: Vec<Skipped>,
}

impl BoundReport {
    pub fn all_hold(&self, rel_tol: f64) -> bool {
        self.entries.iter().all(|e| e.holds(rel_tol))
    }

    pub fn get(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    fn record(&mut self, name: &'static str, r: Result<(f64, f64, Relation)>) {
        match r {
            Ok((lhs, rhs, rel)) => self.entries.push(BoundEntry::new(name, lhs, rhs, rel)),
            Err(e) => self.skipped.push(Skipped {
                name,
                reason: e.to_string(),
            }),
        }
    }
}

fn region_mass<D: Lifetime + ?Sized>(d: &D, a: f64, b: f64) -> f64 {
    if b.is_infinite() {
        d.sf(a)
    } else if a <= d.support().0 {
        d.cdf(b)
    } else {
        d.sf(a) - d.sf(b)
    }
}

fn region_integral<D: Lifetime + ?Sized, F: Fn(f64) -> f64>(
    d: &D,
    a: f64,
    b: f64,
    f: F,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let (lo, hi) = d.support();
    let (a, b) = (a.max(lo), b.min(hi));
    if !(a < b) {
        return Err(Error::OutOfDomain {
            value: a,
            reason: "conditioning region has no mass",
        });
    }
    let split = d.quantile(cfg.tail_cutoff).ok().map(|s| s.max(a));
    quadrature::integrate_range(f, a, b, split, cfg)
}

/// Shannon entropy of `X` conditioned on `a < X < b`.
pub fn conditional_shannon<D: Lifetime + ?Sized>(d: &D, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let p = region_mass(d, a, b);
    let i = region_integral(
        d,
        a,
        b,
        |x| {
            let f = d.pdf(x);
            if f > 0.0 {
                f * f.ln()
            } else {
                0.0
            }
        },
        cfg,
    )?;
    Ok(p.ln() - i / p)
}

/// `E[log X | a < X < b]`.
pub fn conditional_log_moment<D: Lifetime + ?Sized>(d: &D, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let p = region_mass(d, a, b);
    let i = region_integral(
        d,
        a,
        b,
        |x| {
            let f = d.pdf(x);
            if f > 0.0 {
                f * x.ln()
            } else {
                0.0
            }
        },
        cfg,
    )?;
    Ok(i / p)
}

/// `(W, ∫ w log w)` for `w(x) = x (G(x)/G(t))^γ` on the residual (survival)
/// or past (failure) region at `t`.
fn mass_and_entropy<D: Lifetime + ?Sized>(
    d: &D,
    order: &EntropyOrder,
    t: f64,
    survival: bool,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let g = order.gamma();
    let (lo, hi) = d.support();
    let (a, b, norm) = if survival {
        let a = t.max(lo);
        (a, hi, d.ln_sf(a))
    } else {
        let b = t.min(hi);
        (lo, b, d.ln_cdf(b))
    };
    if !norm.is_finite() {
        return Err(Error::OutOfDomain {
            value: t,
            reason: "normalising probability is zero",
        });
    }
    let log_ratio = |x: f64| {
        if survival {
            d.ln_sf(x) - norm
        } else {
            d.ln_cdf(x) - norm
        }
    };
    let w = region_integral(
        d,
        a,
        b,
        |x| {
            let l = log_ratio(x);
            if l == f64::NEG_INFINITY || x <= 0.0 {
                0.0
            } else {
                x * (g * l).exp()
            }
        },
        cfg,
    )?;
    let wlw = region_integral(
        d,
        a,
        b,
        |x| {
            let l = log_ratio(x);
            if l == f64::NEG_INFINITY || x <= 0.0 {
                0.0
            } else {
                let lw = x.ln() + g * l;
                lw.exp() * lw
            }
        },
        cfg,
    )?;
    Ok((w, wlw))
}

fn mean_life_relation(order: &EntropyOrder) -> Relation {
    if order.gamma() >= 1.0 {
        Relation::AtMost
    } else {
        Relation::AtLeast
    }
}

/// Evaluates every inequality that applies to `d`; with `t` the dynamic
/// versions are added. Inequalities whose ingredients do not exist (unbounded
/// support, divergent moments, `t` outside the support) are listed as skipped.
pub fn bound_check<D: Lifetime + ?Sized>(
    d: &D,
    order: &EntropyOrder,
    t: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    cfg.validate()?;
    let (lo, hi) = d.support();
    let delta = order.delta();
    let gamma = order.gamma();
    let q = |kind, t| evaluate(d, order, kind, t, Method::Auto, cfg).map(|v| v.value);
    let finite = || -> Result<()> {
        if hi.is_finite() {
            Ok(())
        } else {
            Err(Error::Divergent("requires bounded support".into()))
        }
    };
    let mut report = BoundReport {
        entries: Vec::new(),
        skipped: Vec::new(),
    };

    report.record(
        "wmrl",
        (|| Ok((q(EntropyKind::Gwse, None)?, wmrl(d, lo, cfg)?.ln() / delta, mean_life_relation(order))))(),
    );
    report.record(
        "wmit",
        (|| {
            finite()?;
            Ok((q(EntropyKind::Gwfe, None)?, wmit(d, hi, cfg)?.ln() / delta, mean_life_relation(order)))
        })(),
    );
    let shannon: Result<f64> = (|| {
        let h = conditional_shannon(d, lo, hi, cfg)?;
        let l = conditional_log_moment(d, lo, hi, cfg)?;
        Ok(h + l)
    })();
    report.record(
        "shannon_survival",
        (|| {
            let rhs = shannon.clone()?;
            Ok((delta * q(EntropyKind::Gwse, None)? + gamma, rhs, Relation::AtLeast))
        })(),
    );
    report.record(
        "shannon_failure",
        (|| {
            finite()?;
            let rhs = shannon.clone()?;
            Ok((delta * q(EntropyKind::Gwfe, None)? + gamma, rhs, Relation::AtLeast))
        })(),
    );
    report.record(
        "log_sum_survival",
        (|| {
            finite()?;
            let (w, wlw) = mass_and_entropy(d, order, lo, true, cfg)?;
            Ok((w.ln() / delta, (wlw / w + (hi - lo).ln()) / delta, Relation::AtMost))
        })(),
    );
    report.record(
        "log_sum_failure",
        (|| {
            finite()?;
            let (w, wlw) = mass_and_entropy(d, order, hi, false, cfg)?;
            Ok((w.ln() / delta, (wlw / w + hi.ln()) / delta, Relation::AtMost))
        })(),
    );

    let Some(t) = t else {
        return Ok(report);
    };
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be finite, got {t}")));
    }
    report.record(
        "wmrl_dynamic",
        (|| Ok((q(EntropyKind::Gdwse, Some(t))?, wmrl(d, t, cfg)?.ln() / delta, mean_life_relation(order))))(),
    );
    report.record(
        "wmit_dynamic",
        (|| {
            Ok((
                q(EntropyKind::Gdwfe, Some(t))?,
                wmit(d, t, cfg)?.ln() / delta,
                mean_life_relation(order),
            ))
        })(),
    );
    report.record(
        "residual_shannon",
        (|| {
            let lhs = delta * q(EntropyKind::Gdwse, Some(t))? + gamma;
            let a = t.max(lo);
            let rhs = conditional_shannon(d, a, hi, cfg)? + conditional_log_moment(d, a, hi, cfg)?;
            Ok((lhs, rhs, Relation::AtLeast))
        })(),
    );
    report.record(
        "past_shannon",
        (|| {
            let lhs = delta * q(EntropyKind::Gdwfe, Some(t))? + gamma;
            let b = t.min(hi);
            let rhs = conditional_shannon(d, lo, b, cfg)? + conditional_log_moment(d, lo, b, cfg)?;
            Ok((lhs, rhs, Relation::AtLeast))
        })(),
    );
    report.record(
        "residual_log_sum",
        (|| {
            finite()?;
            let a = t.max(lo);
            if a >= hi {
                return Err(Error::OutOfDomain {
                    value: t,
                    reason: "t must lie below the upper support edge",
                });
            }
            let (w, wlw) = mass_and_entropy(d, order, a, true, cfg)?;
            Ok((w.ln() / delta, (wlw / w + (hi - a).ln()) / delta, Relation::AtMost))
        })(),
    );
    report.record(
        "past_log_sum",
        (|| {
            let b = t.min(hi);
            if b <= lo || b <= 0.0 {
                return Err(Error::OutOfDomain {
                    value: t,
                    reason: "t must lie above the lower support edge",
                });
            }
            let (w, wlw) = mass_and_entropy(d, order, b, false, cfg)?;
            Ok((w.ln() / delta, (wlw / w + b.ln()) / delta, Relation::AtMost))
        })(),
    );
    Ok(report)
}
