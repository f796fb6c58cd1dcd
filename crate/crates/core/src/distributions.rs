//! Lifetime distributions used throughout the crate.
//!
//! [`ParametricDistribution`] covers the closed-form families. The
//! [`Lifetime`] trait is what the entropy routines actually consume, so the
//! affine and proportional-hazard transforms below can be fed to the same
//! quadrature paths as the base families.

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::empirical::Sample;
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureConfig};

/// A continuous non-negative lifetime distribution.
pub trait Lifetime: Sync {
    /// `(lower, upper)` bounds of the support; `upper` may be `+∞`.
    fn support(&self) -> (f64, f64);
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;

    fn sf(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    fn ln_sf(&self, x: f64) -> f64 {
        self.sf(x).ln()
    }

    fn ln_cdf(&self, x: f64) -> f64 {
        self.cdf(x).ln()
    }

    fn quantile(&self, u: f64) -> Result<f64>;

    /// Polynomial decay index `k` when `sf(x) ~ C x^{-k}`; `None` for
    /// light tails or bounded support.
    fn tail_index(&self) -> Option<f64> {
        None
    }

    /// Closed-form family when the distribution is one.
    fn as_parametric(&self) -> Option<&ParametricDistribution> {
        None
    }

    fn hazard(&self, t: f64) -> Result<f64> {
        let s = self.sf(t);
        if !(s > 0.0) {
            return Err(Error::OutOfDomain {
                value: t,
                reason: "hazard requires sf(t) > 0",
            });
        }
        Ok(self.pdf(t) / s)
    }

    fn reverse_hazard(&self, t: f64) -> Result<f64> {
        let c = self.cdf(t);
        if !(c > 0.0) {
            return Err(Error::OutOfDomain {
                value: t,
                reason: "reverse hazard requires cdf(t) > 0",
            });
        }
        Ok(self.pdf(t) / c)
    }
}

fn check_unit_open(u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            value: u,
            reason: "quantile level must lie in (0, 1)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    /// `sf(x) = e^{-rate x}`
    Exponential { rate: f64 },
    /// `sf(x) = (scale / x)^shape`, `x ≥ scale`
    Pareto { shape: f64, scale: f64 },
    Uniform { lower: f64, upper: f64 },
    /// `cdf(x) = (x / upper)^shape` on `[0, upper]`
    Power { shape: f64, upper: f64 },
    /// `sf(x) = e^{-rate x²}`
    Rayleigh { rate: f64 },
    /// unit scale: `sf(x) = e^{-x^shape}`
    Weibull { shape: f64 },
    /// unit scale
    Gamma { shape: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Family", into = "Family")]
pub struct ParametricDistribution {
    family: Family,
}

impl TryFrom<Family> for ParametricDistribution {
    type Error = Error;

    fn try_from(family: Family) -> Result<Self> {
        ParametricDistribution::new(family)
    }
}

impl From<ParametricDistribution> for Family {
    fn from(d: ParametricDistribution) -> Family {
        d.family
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl ParametricDistribution {
    pub fn new(family: Family) -> Result<Self> {
        match family {
            Family::Exponential { rate } => positive("rate", rate)?,
            Family::Pareto { shape, scale } => {
                positive("shape", shape)?;
                positive("scale", scale)?;
            }
            Family::Uniform { lower, upper } => {
                if !(lower >= 0.0 && upper > lower && upper.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "uniform requires 0 <= lower < upper, got ({lower}, {upper})"
                    )));
                }
            }
            Family::Power { shape, upper } => {
                positive("shape", shape)?;
                positive("upper", upper)?;
            }
            Family::Rayleigh { rate } => positive("rate", rate)?,
            Family::Weibull { shape } => positive("shape", shape)?,
            Family::Gamma { shape } => positive("shape", shape)?,
        }
        Ok(ParametricDistribution { family })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(Family::Exponential { rate })
    }

    pub fn pareto(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Pareto { shape, scale })
    }

    pub fn uniform(lower: f64, upper: f64) -> Result<Self> {
        Self::new(Family::Uniform { lower, upper })
    }

    pub fn power(shape: f64, upper: f64) -> Result<Self> {
        Self::new(Family::Power { shape, upper })
    }

    pub fn rayleigh(rate: f64) -> Result<Self> {
        Self::new(Family::Rayleigh { rate })
    }

    pub fn weibull(shape: f64) -> Result<Self> {
        Self::new(Family::Weibull { shape })
    }

    pub fn gamma(shape: f64) -> Result<Self> {
        Self::new(Family::Gamma { shape })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn mean(&self) -> f64 {
        match self.family {
            Family::Exponential { rate } => 1.0 / rate,
            Family::Pareto { shape, scale } => {
                if shape > 1.0 {
                    shape * scale / (shape - 1.0)
                } else {
                    f64::INFINITY
                }
            }
            Family::Uniform { lower, upper } => 0.5 * (lower + upper),
            Family::Power { shape, upper } => shape * upper / (shape + 1.0),
            Family::Rayleigh { rate } => 0.5 * (std::f64::consts::PI / rate).sqrt(),
            Family::Weibull { shape } => ln_gamma(1.0 + 1.0 / shape).exp(),
            Family::Gamma { shape } => shape,
        }
    }

    /// Draws `n` values using `rng`. Gamma uses the Marsaglia-Tsang
    /// squeeze/rejection sampler; every other family inverts the quantile.
    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        match self.family {
            Family::Gamma { shape } => {
                let g = rand_distr::Gamma::new(shape, 1.0).expect("validated shape");
                (0..n).map(|_| rng.sample(g)).collect()
            }
            _ => (0..n)
                .map(|_| {
                    let u: f64 = rng.sample(Open01);
                    self.quantile(u).expect("Open01 lies in (0, 1)")
                })
                .collect(),
        }
    }

    fn gamma_quantile(shape: f64, u: f64) -> f64 {
        // Bracketed Newton on whichever tail keeps the target well conditioned.
        let upper_tail = u > 0.5;
        let target = if upper_tail { 1.0 - u } else { u };
        let residual = |x: f64| {
            if upper_tail {
                gamma_ur(shape, x) - target
            } else {
                gamma_lr(shape, x) - target
            }
        };
        let mut lo = 0.0;
        let mut hi = shape.max(1.0);
        while (if upper_tail { -residual(hi) } else { residual(hi) }) < 0.0 {
            lo = hi;
            hi *= 2.0;
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let r = residual(x);
            let increasing = if upper_tail { -r } else { r };
            if increasing < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let dens = (-(x) + (shape - 1.0) * x.ln() - ln_gamma(shape)).exp();
            let step = if upper_tail { -r / dens } else { r / dens };
            let mut next = x - step;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-15 * x.abs().max(1e-300) {
                return next;
            }
            x = next;
        }
        x
    }
}

impl Lifetime for ParametricDistribution {
    fn support(&self) -> (f64, f64) {
        match self.family {
            Family::Pareto { scale, .. } => (scale, f64::INFINITY),
            Family::Uniform { lower, upper } => (lower, upper),
            Family::Power { upper, .. } => (0.0, upper),
            _ => (0.0, f64::INFINITY),
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi || x.is_nan() {
            return 0.0;
        }
        match self.family {
            Family::Exponential { rate } => rate * (-rate * x).exp(),
            Family::Pareto { shape, scale } => shape / x * (scale / x).powf(shape),
            Family::Uniform { lower, upper } => 1.0 / (upper - lower),
            Family::Power { shape, upper } => shape / upper * (x / upper).powf(shape - 1.0),
            Family::Rayleigh { rate } => 2.0 * rate * x * (-rate * x * x).exp(),
            Family::Weibull { shape } => shape * x.powf(shape - 1.0) * (-x.powf(shape)).exp(),
            Family::Gamma { shape } => {
                if x == 0.0 {
                    return match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => 1.0,
                        _ => 0.0,
                    };
                }
                ((shape - 1.0) * x.ln() - x - ln_gamma(shape)).exp()
            }
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        match self.family {
            Family::Uniform { lower, upper } => (x - lower) / (upper - lower),
            Family::Power { shape, upper } => (x / upper).powf(shape),
            Family::Gamma { shape } => gamma_lr(shape, x),
            _ => -self.ln_sf(x).exp_m1(),
        }
    }

    fn sf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 1.0;
        }
        if x >= hi {
            return 0.0;
        }
        match self.family {
            Family::Uniform { lower, upper } => (upper - x) / (upper - lower),
            Family::Power { .. } => 1.0 - self.cdf(x),
            Family::Gamma { shape } => gamma_ur(shape, x),
            _ => self.ln_sf(x).exp(),
        }
    }

    fn ln_sf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return f64::NEG_INFINITY;
        }
        match self.family {
            Family::Exponential { rate } => -rate * x,
            Family::Pareto { shape, scale } => shape * (scale / x).ln(),
            Family::Rayleigh { rate } => -rate * x * x,
            Family::Weibull { shape } => -x.powf(shape),
            Family::Uniform { lower, upper } => ((upper - x) / (upper - lower)).ln(),
            Family::Power { .. } => (-self.cdf(x)).ln_1p(),
            Family::Gamma { shape } => gamma_ur(shape, x).ln(),
        }
    }

    fn ln_cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return f64::NEG_INFINITY;
        }
        if x >= hi {
            return 0.0;
        }
        match self.family {
            Family::Power { shape, upper } => shape * (x / upper).ln(),
            Family::Uniform { lower, upper } => ((x - lower) / (upper - lower)).ln(),
            _ => self.cdf(x).ln(),
        }
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        check_unit_open(u)?;
        // -ln(1 - u), accurate for small u
        let neg_log_sf = -(-u).ln_1p();
        Ok(match self.family {
            Family::Exponential { rate } => neg_log_sf / rate,
            Family::Pareto { shape, scale } => scale * (neg_log_sf / shape).exp(),
            Family::Uniform { lower, upper } => lower + u * (upper - lower),
            Family::Power { shape, upper } => upper * u.powf(1.0 / shape),
            Family::Rayleigh { rate } => (neg_log_sf / rate).sqrt(),
            Family::Weibull { shape } => neg_log_sf.powf(1.0 / shape),
            Family::Gamma { shape } => Self::gamma_quantile(shape, u),
        })
    }

    fn tail_index(&self) -> Option<f64> {
        match self.family {
            Family::Pareto { shape, .. } => Some(shape),
            _ => None,
        }
    }

    fn as_parametric(&self) -> Option<&ParametricDistribution> {
        Some(self)
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

impl fmt::Display for ParametricDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Exponential { rate } => write!(f, "exp({})", fmt_num(rate)),
            Family::Pareto { shape, scale } => {
                write!(f, "pareto({},{})", fmt_num(shape), fmt_num(scale))
            }
            Family::Uniform { lower, upper } => {
                write!(f, "uniform({},{})", fmt_num(lower), fmt_num(upper))
            }
            Family::Power { shape, upper } => {
                write!(f, "power({},{})", fmt_num(shape), fmt_num(upper))
            }
            Family::Rayleigh { rate } => write!(f, "rayleigh({})", fmt_num(rate)),
            Family::Weibull { shape } => write!(f, "weibull({})", fmt_num(shape)),
            Family::Gamma { shape } => write!(f, "gamma({})", fmt_num(shape)),
        }
    }
}

/// Text form `name(p1[,p2])`, names case-insensitive:
///
/// | form | meaning |
/// |---|---|
/// | `exp(λ)` / `exponential(λ)` | rate λ |
/// | `pareto(a,b)` | shape a, scale b |
/// | `uniform(a,b)` / `uniform(b)` | on `[a,b]` (`a = 0` if omitted) |
/// | `power(c,b)` / `power(c)` | `cdf = (x/b)^c`, `b = 1` if omitted |
/// | `rayleigh(λ)` | `sf = e^{-λx²}` |
/// | `weibull(p)` / `weibull(p,1)` | unit scale |
/// | `gamma(q)` / `gamma(q,1)` | unit scale |
impl FromStr for ParametricDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s
            .find('(')
            .ok_or_else(|| Error::Parse(format!("expected name(params), got '{s}'")))?;
        if !s.ends_with(')') {
            return Err(Error::Parse(format!("missing closing parenthesis in '{s}'")));
        }
        let name = s[..open].trim().to_ascii_lowercase();
        let inner = &s[open + 1..s.len() - 1];
        let params = inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number '{}' in '{s}'", p.trim())))
            })
            .collect::<Result<Vec<f64>>>()?;

        let arity = |lo: usize, hi: usize| -> Result<()> {
            if params.len() < lo || params.len() > hi {
                Err(Error::Parse(format!(
                    "{name} takes {lo}..={hi} parameters, got {}",
                    params.len()
                )))
            } else {
                Ok(())
            }
        };
        let unit_scale = |family: &str| -> Result<()> {
            if params.len() == 2 && params[1] != 1.0 {
                Err(Error::Parse(format!("{family} supports scale 1 only")))
            } else {
                Ok(())
            }
        };

        match name.as_str() {
            "exp" | "exponential" => {
                arity(1, 1)?;
                Self::exponential(params[0])
            }
            "pareto" => {
                arity(2, 2)?;
                Self::pareto(params[0], params[1])
            }
            "uniform" | "unif" => {
                arity(1, 2)?;
                if params.len() == 1 {
                    Self::uniform(0.0, params[0])
                } else {
                    Self::uniform(params[0], params[1])
                }
            }
            "power" => {
                arity(1, 2)?;
                Self::power(params[0], params.get(1).copied().unwrap_or(1.0))
            }
            "rayleigh" => {
                arity(1, 1)?;
                Self::rayleigh(params[0])
            }
            "weibull" => {
                arity(1, 2)?;
                unit_scale("weibull")?;
                Self::weibull(params[0])
            }
            "gamma" => {
                arity(1, 2)?;
                unit_scale("gamma")?;
                Self::gamma(params[0])
            }
            other => Err(Error::Parse(format!("unknown distribution '{other}'"))),
        }
    }
}

/// `Z = scale * X + shift`.
#[derive(Debug, Clone, Copy)]
pub struct Affine<D> {
    pub inner: D,
    scale: f64,
    shift: f64,
}

impl<D: Lifetime> Affine<D> {
    pub fn new(inner: D, scale: f64, shift: f64) -> Result<Self> {
        positive("scale", scale)?;
        if !(shift >= 0.0 && shift.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "shift must be non-negative, got {shift}"
            )));
        }
        Ok(Affine { inner, scale, shift })
    }

    fn back(&self, x: f64) -> f64 {
        (x - self.shift) / self.scale
    }
}

impl<D: Lifetime> Lifetime for Affine<D> {
    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.inner.support();
        (self.scale * lo + self.shift, self.scale * hi + self.shift)
    }

    fn pdf(&self, x: f64) -> f64 {
        self.inner.pdf(self.back(x)) / self.scale
    }

    fn cdf(&self, x: f64) -> f64 {
        self.inner.cdf(self.back(x))
    }

    fn sf(&self, x: f64) -> f64 {
        self.inner.sf(self.back(x))
    }

    fn ln_sf(&self, x: f64) -> f64 {
        self.inner.ln_sf(self.back(x))
    }

    fn ln_cdf(&self, x: f64) -> f64 {
        self.inner.ln_cdf(self.back(x))
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        Ok(self.scale * self.inner.quantile(u)? + self.shift)
    }

    fn tail_index(&self) -> Option<f64> {
        self.inner.tail_index()
    }
}

/// Proportional hazards model: `sf_θ = sf^θ`.
#[derive(Debug, Clone, Copy)]
pub struct ProportionalHazards<D> {
    pub inner: D,
    theta: f64,
}

impl<D: Lifetime> ProportionalHazards<D> {
    pub fn new(inner: D, theta: f64) -> Result<Self> {
        positive("theta", theta)?;
        Ok(ProportionalHazards { inner, theta })
    }
}

impl<D: Lifetime> Lifetime for ProportionalHazards<D> {
    fn support(&self) -> (f64, f64) {
        self.inner.support()
    }

    fn pdf(&self, x: f64) -> f64 {
        let f = self.inner.pdf(x);
        if f == 0.0 {
            return 0.0;
        }
        self.theta * ((self.theta - 1.0) * self.inner.ln_sf(x)).exp() * f
    }

    fn cdf(&self, x: f64) -> f64 {
        -self.ln_sf(x).exp_m1()
    }

    fn sf(&self, x: f64) -> f64 {
        self.ln_sf(x).exp()
    }

    fn ln_sf(&self, x: f64) -> f64 {
        self.theta * self.inner.ln_sf(x)
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        check_unit_open(u)?;
        // sf_inner = (1 - u)^{1/θ}
        let inner_u = -((-u).ln_1p() / self.theta).exp_m1();
        self.inner.quantile(inner_u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0))
    }

    fn tail_index(&self) -> Option<f64> {
        self.inner.tail_index().map(|k| k * self.theta)
    }
}

/// Proportional reverse hazards model: `cdf_θ = cdf^θ`.
#[derive(Debug, Clone, Copy)]
pub struct ProportionalReverseHazards<D> {
    pub inner: D,
    theta: f64,
}

impl<D: Lifetime> ProportionalReverseHazards<D> {
    pub fn new(inner: D, theta: f64) -> Result<Self> {
        positive("theta", theta)?;
        Ok(ProportionalReverseHazards { inner, theta })
    }
}

impl<D: Lifetime> Lifetime for ProportionalReverseHazards<D> {
    fn support(&self) -> (f64, f64) {
        self.inner.support()
    }

    fn pdf(&self, x: f64) -> f64 {
        let f = self.inner.pdf(x);
        if f == 0.0 {
            return 0.0;
        }
        self.theta * ((self.theta - 1.0) * self.inner.ln_cdf(x)).exp() * f
    }

    fn cdf(&self, x: f64) -> f64 {
        self.ln_cdf(x).exp()
    }

    fn ln_cdf(&self, x: f64) -> f64 {
        self.theta * self.inner.ln_cdf(x)
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        check_unit_open(u)?;
        self.inner.quantile(u.powf(1.0 / self.theta))
    }

    fn tail_index(&self) -> Option<f64> {
        self.inner.tail_index()
    }
}

impl<D: Lifetime + ?Sized> Lifetime for &D {
    fn support(&self) -> (f64, f64) {
        (**self).support()
    }
    fn pdf(&self, x: f64) -> f64 {
        (**self).pdf(x)
    }
    fn cdf(&self, x: f64) -> f64 {
        (**self).cdf(x)
    }
    fn sf(&self, x: f64) -> f64 {
        (**self).sf(x)
    }
    fn ln_sf(&self, x: f64) -> f64 {
        (**self).ln_sf(x)
    }
    fn ln_cdf(&self, x: f64) -> f64 {
        (**self).ln_cdf(x)
    }
    fn quantile(&self, u: f64) -> Result<f64> {
        (**self).quantile(u)
    }
    fn tail_index(&self) -> Option<f64> {
        (**self).tail_index()
    }
    fn as_parametric(&self) -> Option<&ParametricDistribution> {
        (**self).as_parametric()
    }
}

/// SplitMix64 finaliser, used to derive independent seeds from a master seed.
pub fn mix_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A ChaCha8 key (`seed`) plus a stream index. Streams share the key but
/// never overlap, so replications can be generated in any order or thread.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeededSampler {
    pub seed: u64,
    pub stream: u64,
}

impl SeededSampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        SeededSampler { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// `n` i.i.d. draws from `d`, deterministic in `(seed, stream)`.
pub fn sample(d: &ParametricDistribution, n: usize, sampler: &SeededSampler) -> Result<Sample> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    let mut rng = sampler.rng();
    Sample::new(d.sample_with(n, &mut rng))
}

fn tail_split<D: Lifetime + ?Sized>(d: &D, cfg: &QuadratureConfig) -> Option<f64> {
    d.quantile(cfg.tail_cutoff).ok()
}

/// Weighted mean residual life `m*(t) = ∫_t^∞ x sf(x)/sf(t) dx`, taken over
/// the support (so `t` below the lower support edge behaves like the edge).
pub fn wmrl<D: Lifetime + ?Sized>(d: &D, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let (lo, hi) = d.support();
    let start = t.max(lo);
    let norm = d.ln_sf(start);
    if !(norm > f64::NEG_INFINITY) || start >= hi {
        return Err(Error::OutOfDomain {
            value: t,
            reason: "weighted mean residual life requires sf(t) > 0",
        });
    }
    if hi.is_infinite() {
        if let Some(k) = d.tail_index() {
            if k <= 2.0 {
                return Err(Error::Divergent(format!(
                    "∫ x sf(x) dx diverges for tail index {k} <= 2"
                )));
            }
        }
    }
    let split = tail_split(d, cfg).map(|s| s.max(start));
    quadrature::integrate_range(
        |x| {
            let ls = d.ln_sf(x) - norm;
            if ls == f64::NEG_INFINITY {
                0.0
            } else {
                x * ls.exp()
            }
        },
        start,
        hi,
        split,
        cfg,
    )
}

/// Weighted mean inactivity time `μ*(t) = ∫_0^t x cdf(x)/cdf(t) dx`.
/// Returns 0 at (or below) the lower support edge, where the integral is
/// empty.
pub fn wmit<D: Lifetime + ?Sized>(d: &D, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let (lo, hi) = d.support();
    if t <= lo {
        if t == lo || t == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::OutOfDomain {
            value: t,
            reason: "weighted mean inactivity time requires cdf(t) > 0",
        });
    }
    let end = t.min(hi);
    let norm = d.ln_cdf(end);
    quadrature::integrate(
        |x| {
            let lc = d.ln_cdf(x) - norm;
            if lc == f64::NEG_INFINITY {
                0.0
            } else {
                x * lc.exp()
            }
        },
        lo,
        end,
        cfg,
    )
    .map(|r| r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn all_families() -> Vec<ParametricDistribution> {
        vec![
            ParametricDistribution::exponential(1.3).unwrap(),
            ParametricDistribution::pareto(3.0, 1.5).unwrap(),
            ParametricDistribution::uniform(0.5, 2.0).unwrap(),
            ParametricDistribution::power(2.5, 3.0).unwrap(),
            ParametricDistribution::rayleigh(0.5).unwrap(),
            ParametricDistribution::weibull(1.7).unwrap(),
            ParametricDistribution::gamma(3.2).unwrap(),
            ParametricDistribution::gamma(0.6).unwrap(),
        ]
    }

    #[test]
    fn pdf_examples() {
        let e = ParametricDistribution::exponential(1.0).unwrap();
        assert_eq!(e.pdf(0.0), 1.0);
        let u = ParametricDistribution::uniform(0.0, 2.0).unwrap();
        assert_eq!(u.pdf(1.0), 0.5);
        assert_eq!(u.pdf(3.0), 0.0);
        let g = ParametricDistribution::gamma(5.0).unwrap();
        // e^{-4} 4^4 / Γ(5)
        let expected = (-4.0f64).exp() * 256.0 / 24.0;
        assert_relative_eq!(g.pdf(4.0), expected, max_relative = 1e-13);
    }

    #[test]
    fn sf_examples() {
        let e = ParametricDistribution::exponential(2.0).unwrap();
        assert_eq!(e.sf(0.0), 1.0);
        let p = ParametricDistribution::pareto(3.0, 2.0).unwrap();
        assert_eq!(p.sf(2.0), 1.0);
        let r = ParametricDistribution::rayleigh(0.5).unwrap();
        assert_relative_eq!(r.sf(2.0), (-2.0f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn quantile_examples() {
        let e = ParametricDistribution::exponential(1.0).unwrap();
        assert_relative_eq!(e.quantile(1.0 - (-1.0f64).exp()).unwrap(), 1.0, max_relative = 1e-14);
        let u = ParametricDistribution::uniform(0.0, 1.0).unwrap();
        assert_relative_eq!(u.quantile(0.3).unwrap(), 0.3);
        let p = ParametricDistribution::power(2.0, 1.0).unwrap();
        assert_relative_eq!(p.quantile(0.25).unwrap(), 0.5, max_relative = 1e-15);
        assert!(e.quantile(0.0).is_err());
        assert!(e.quantile(1.0).is_err());
        assert!(e.quantile(f64::NAN).is_err());
    }

    #[test]
    fn hazard_examples() {
        let e = ParametricDistribution::exponential(0.7).unwrap();
        for t in [0.0, 0.5, 3.0, 10.0] {
            assert_relative_eq!(e.hazard(t).unwrap(), 0.7, max_relative = 1e-14);
        }
        let r = ParametricDistribution::rayleigh(0.3).unwrap();
        assert_relative_eq!(r.hazard(2.0).unwrap(), 2.0 * 0.3 * 2.0, max_relative = 1e-14);
        let p = ParametricDistribution::power(2.5, 2.0).unwrap();
        assert_relative_eq!(p.reverse_hazard(1.2).unwrap(), 2.5 / 1.2, max_relative = 1e-13);
        assert!(p.hazard(2.0).is_err());
        assert!(p.reverse_hazard(0.0).is_err());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(ParametricDistribution::exponential(0.0).is_err());
        assert!(ParametricDistribution::uniform(1.0, 1.0).is_err());
        assert!(ParametricDistribution::uniform(-1.0, 1.0).is_err());
        assert!(ParametricDistribution::pareto(2.0, -1.0).is_err());
        assert!(ParametricDistribution::gamma(f64::NAN).is_err());
    }

    #[test]
    fn cdf_sf_complement_and_quantile_inverse() {
        for d in all_families() {
            for k in 1..100 {
                let u = k as f64 / 100.0;
                let x = d.quantile(u).unwrap();
                assert!((d.cdf(x) + d.sf(x) - 1.0).abs() <= 1e-12, "{d} at {x}");
                let back = d.quantile(d.cdf(x)).unwrap();
                assert_relative_eq!(back, x, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn parse_round_trip() {
        for d in all_families() {
            let text = d.to_string();
            let parsed: ParametricDistribution = text.parse().unwrap();
            assert_eq!(parsed, d);
        }
        let d: ParametricDistribution = " EXP( 1.5 ) ".parse().unwrap();
        assert_eq!(d, ParametricDistribution::exponential(1.5).unwrap());
        let d: ParametricDistribution = "uniform(2)".parse().unwrap();
        assert_eq!(d, ParametricDistribution::uniform(0.0, 2.0).unwrap());
        assert!("exp(1,2)".parse::<ParametricDistribution>().is_err());
        assert!("weibull(2,3)".parse::<ParametricDistribution>().is_err());
        assert!("lognormal(1)".parse::<ParametricDistribution>().is_err());
        assert!("exp 1".parse::<ParametricDistribution>().is_err());
        assert!("exp(x)".parse::<ParametricDistribution>().is_err());
        assert!("exp(-1)".parse::<ParametricDistribution>().is_err());
    }

    #[test]
    fn wmrl_exponential() {
        let cfg = QuadratureConfig::default();
        let lambda = 1.7;
        let d = ParametricDistribution::exponential(lambda).unwrap();
        assert_relative_eq!(wmrl(&d, 0.0, &cfg).unwrap(), 1.0 / (lambda * lambda), max_relative = 1e-10);
        for t in [0.3, 1.0, 4.0] {
            let expected = (1.0 + t * lambda) / (lambda * lambda);
            assert_relative_eq!(wmrl(&d, t, &cfg).unwrap(), expected, max_relative = 1e-10);
        }
    }

    #[test]
    fn wmrl_uniform_and_second_moment() {
        let cfg = QuadratureConfig::default();
        let u = ParametricDistribution::uniform(0.0, 1.0).unwrap();
        assert_relative_eq!(wmrl(&u, 0.0, &cfg).unwrap(), 1.0 / 6.0, max_relative = 1e-12);
        // m*(0) = E[X²]/2 for support starting at 0; Gamma(q): E X² = q(q+1)
        let g = ParametricDistribution::gamma(2.5).unwrap();
        assert_relative_eq!(wmrl(&g, 0.0, &cfg).unwrap(), 2.5 * 3.5 / 2.0, max_relative = 1e-9);
    }

    #[test]
    fn wmrl_pareto_divergence() {
        let cfg = QuadratureConfig::default();
        let p = ParametricDistribution::pareto(2.0, 1.0).unwrap();
        assert!(matches!(wmrl(&p, 1.0, &cfg), Err(Error::Divergent(_))));
        let p = ParametricDistribution::pareto(4.0, 1.0).unwrap();
        // ∫_t^∞ x (t/x)^a dx = t²/(a-2)
        assert_relative_eq!(wmrl(&p, 2.0, &cfg).unwrap(), 4.0 / 2.0, max_relative = 1e-9);
    }

    #[test]
    fn wmit_examples() {
        let cfg = QuadratureConfig::default();
        let a = 2.5;
        let u = ParametricDistribution::uniform(0.0, a).unwrap();
        assert_relative_eq!(wmit(&u, a, &cfg).unwrap(), a * a / 3.0, max_relative = 1e-12);
        assert_eq!(wmit(&u, 0.0, &cfg).unwrap(), 0.0);
        let p = ParametricDistribution::power(3.0, 2.0).unwrap();
        // independent oracle: composite Simpson on ∫_0^t x (x/t)^c dx
        let t = 1.4;
        let m = 20_000;
        let h = t / m as f64;
        let g = |x: f64| x * (x / t).powf(3.0);
        let mut s = g(0.0) + g(t);
        for i in 1..m {
            s += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        assert_relative_eq!(wmit(&p, t, &cfg).unwrap(), s * h / 3.0, max_relative = 1e-10);
        assert!(wmit(&u, 1e-300, &cfg).unwrap() < 1e-200);
    }

    #[test]
    fn wmrl_satisfies_its_differential_identity() {
        // m*'(t) = λ(t) m*(t) - t
        let cfg = QuadratureConfig::default().with_rel_tol(1e-13);
        let h = 1e-4;
        for d in [
            ParametricDistribution::weibull(1.7).unwrap(),
            ParametricDistribution::gamma(2.5).unwrap(),
            ParametricDistribution::uniform(0.0, 3.0).unwrap(),
            ParametricDistribution::rayleigh(0.8).unwrap(),
        ] {
            for u in [0.2, 0.5, 0.8] {
                let t = d.quantile(u).unwrap();
                let deriv = (wmrl(&d, t + h, &cfg).unwrap() - wmrl(&d, t - h, &cfg).unwrap()) / (2.0 * h);
                let rhs = d.hazard(t).unwrap() * wmrl(&d, t, &cfg).unwrap() - t;
                assert!((deriv - rhs).abs() < 1e-5, "{d} t={t}: {deriv} vs {rhs}");
            }
        }
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let d = ParametricDistribution::exponential(1.0).unwrap();
        let a = sample(&d, 5, &SeededSampler::new(9, 0)).unwrap();
        let b = sample(&d, 5, &SeededSampler::new(9, 0)).unwrap();
        let c = sample(&d, 5, &SeededSampler::new(9, 1)).unwrap();
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), c.values());
        assert_eq!(a.len(), 5);
    }

    #[test]
    fn transforms_behave() {
        let e = ParametricDistribution::exponential(2.0).unwrap();
        let ph = ProportionalHazards::new(e, 3.0).unwrap();
        assert_relative_eq!(ph.sf(0.4), (-6.0f64 * 0.4).exp(), max_relative = 1e-14);
        assert_relative_eq!(ph.pdf(0.4), 6.0 * (-6.0f64 * 0.4).exp(), max_relative = 1e-13);
        let u = ParametricDistribution::uniform(0.0, 1.0).unwrap();
        let prh = ProportionalReverseHazards::new(u, 2.0).unwrap();
        assert_relative_eq!(prh.cdf(0.3), 0.09, max_relative = 1e-14);
        assert_relative_eq!(prh.quantile(0.09).unwrap(), 0.3, max_relative = 1e-14);
        let z = Affine::new(e, 2.0, 3.0).unwrap();
        assert_eq!(z.support(), (3.0, f64::INFINITY));
        assert_relative_eq!(z.sf(5.0), e.sf(1.0));
        assert_relative_eq!(z.quantile(0.5).unwrap(), 2.0 * e.quantile(0.5).unwrap() + 3.0);
        let pp = ProportionalHazards::new(ParametricDistribution::pareto(3.0, 1.0).unwrap(), 2.0).unwrap();
        assert_eq!(pp.tail_index(), Some(6.0));
    }
}
