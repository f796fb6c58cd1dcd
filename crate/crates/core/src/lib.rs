//! Generalized weighted survival and failure entropies of order (α, β).
//!
//! The crate is organised around a handful of modules:
//!
//! * [`distributions`]: closed-form lifetime families, affine and
//!   proportional-(reverse-)hazard transforms, WMRL / WMIT functionals and
//!   seeded samplers.
//! * [`entropy`]: GWSE, GWFE, their unweighted and dynamic versions,
//!   order-statistic variants, hazard recovery and the inequality checks.
//! * [`empirical`]: order-statistic estimators of GWSE / GWFE.
//! * [`gof`]: the exponentiality test `T = exp(-D)`, Monte-Carlo critical
//!   tables and power studies.
//! * [`verify`]: closed-form vs. quadrature oracle suite.
//! * [`cli`]: the `wentropy` command-line front end.
//!
//! All integrals run over the support of the distribution; for families whose
//! support starts at the origin this is the same as integrating over
//! `[0, ∞)`.

pub mod cli;
pub mod distributions;
pub mod empirical;
pub mod entropy;
pub mod error;
pub mod gof;
pub mod quadrature;
pub mod verify;

pub use distributions::{Lifetime, ParametricDistribution, SeededSampler};
pub use empirical::{EstimatorVariant, Sample};
pub use entropy::{EntropyKind, EntropyOrder, EntropyValue};
pub use error::{Error, Result};
pub use quadrature::QuadratureConfig;
