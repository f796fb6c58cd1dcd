//! Goodness-of-fit test for exponentiality.
//!
//! With `λ̂ = 1/X̄`, the statistic compares the empirical GWSE with the value
//! it would take under `Exp(λ̂)`:
//!
//! ```text
//! D = |ξ̂ - (2/(β-α)) log(1/(λ̂γ))|,    T = exp(-D)
//! ```
//!
//! Small `T` is evidence against exponentiality. `T` is invariant under
//! rescaling of the sample, so the null distribution is simulated at rate 1
//! only. Every replication draws from its own ChaCha stream keyed by
//! `(seed, n, replication)`, which makes tables bit-identical for any number
//! of worker threads.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{mix_seed, ParametricDistribution, SeededSampler};
use crate::empirical::{empirical_gwse, EstimatorVariant, Sample};
use crate::entropy::EntropyOrder;
use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.26;
pub const DEFAULT_BETA: f64 = 1.25;
pub const DEFAULT_REPLICATIONS: usize = 10_000;
pub const DEFAULT_SEED: u64 = 42;
pub const SCHEMA_VERSION: u32 = 1;

const ALTERNATIVE_TAG: u64 = 0x616c_7465_726e_6174;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub order: EntropyOrder,
    pub replications: usize,
    pub seed: u64,
    pub variant: EstimatorVariant,
    /// Size of the worker pool; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Simulate a critical value when the supplied table lacks `(n, level)`.
    pub simulate_missing: bool,
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            order: EntropyOrder::new(DEFAULT_ALPHA, DEFAULT_BETA).expect("default order is valid"),
            replications: DEFAULT_REPLICATIONS,
            seed: DEFAULT_SEED,
            variant: EstimatorVariant::default(),
            workers: None,
            simulate_missing: true,
        }
    }
}

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 100 {
            return Err(Error::InvalidParameter(format!(
                "at least 100 replications required, got {}",
                self.replications
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter("worker count must be positive".into()));
        }
        Ok(())
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("level must lie in (0, 1), got {level}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestStatistic {
    pub lambda_hat: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "T")]
    pub t: f64,
}

pub fn statistic(s: &Sample, order: &EntropyOrder, variant: EstimatorVariant) -> Result<TestStatistic> {
    let mean = s.mean();
    if !(mean > 0.0) {
        return Err(Error::DegenerateSample("sample mean is zero".into()));
    }
    let empirical = empirical_gwse(s, order, variant)?;
    let plug_in = 2.0 / order.delta() * (mean / order.gamma()).ln();
    let d = (empirical - plug_in).abs();
    Ok(TestStatistic {
        lambda_hat: 1.0 / mean,
        d,
        t: (-d).exp(),
    })
}

/// Runs `f(0..count)` on a pool of `workers` threads (or the global pool),
/// keeping results in index order.
fn par_collect<T, F>(workers: Option<usize>, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let run = || (0..count).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
    match workers {
        None => run(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("cannot build worker pool: {e}")))?
            .install(run),
    }
}

fn simulate_t(
    d: &ParametricDistribution,
    n: usize,
    seed: u64,
    cfg: &TestConfig,
) -> Result<Vec<f64>> {
    par_collect(cfg.workers, cfg.replications, |r| {
        let mut rng = SeededSampler::new(seed, r as u64).rng();
        let s = Sample::new(d.sample_with(n, &mut rng))?;
        Ok(statistic(&s, &cfg.order, cfg.variant)?.t)
    })
}

/// The `⌈level·B⌉`-th smallest value.
fn lower_quantile(sorted: &[f64], level: f64) -> f64 {
    let b = sorted.len();
    let k = ((level * b as f64) - 1e-9).ceil().max(1.0) as usize;
    sorted[k.min(b) - 1]
}

fn null_t(n: usize, cfg: &TestConfig) -> Result<Vec<f64>> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!("critical values need n >= 4, got {n}")));
    }
    let null = ParametricDistribution::exponential(1.0)?;
    let mut t = simulate_t(&null, n, mix_seed(cfg.seed, n as u64), cfg)?;
    t.sort_by(f64::total_cmp);
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub replications: usize,
    pub alpha: f64,
    pub beta: f64,
    pub variant: EstimatorVariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalEntry {
    pub n: usize,
    pub level: f64,
    pub value: f64,
}

/// Lower quantiles of the null distribution of `T`, per sample size and level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalTable {
    pub schema: u32,
    pub provenance: Provenance,
    pub entries: Vec<CriticalEntry>,
}

fn same_level(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12
}

impl CriticalTable {
    pub fn new(provenance: Provenance, mut entries: Vec<CriticalEntry>) -> Result<Self> {
        entries.sort_by(|a, b| a.n.cmp(&b.n).then(a.level.total_cmp(&b.level)));
        let table = CriticalTable {
            schema: SCHEMA_VERSION,
            provenance,
            entries,
        };
        table.validate()?;
        Ok(table)
    }

    /// Values in `(0, 1)`, unique cells, and non-decreasing in level for each `n`.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported table schema {}", self.schema)));
        }
        EntropyOrder::new(self.provenance.alpha, self.provenance.beta)?;
        for e in &self.entries {
            check_level(e.level)?;
            if !(e.value > 0.0 && e.value < 1.0) {
                return Err(Error::Parse(format!(
                    "critical value for n={} level={} must lie in (0, 1), got {}",
                    e.n, e.level, e.value
                )));
            }
        }
        for (n, row) in self.rows() {
            for w in row.windows(2) {
                if same_level(w[0].0, w[1].0) {
                    return Err(Error::Parse(format!("duplicate cell n={n} level={}", w[0].0)));
                }
                if w[1].1 < w[0].1 {
                    return Err(Error::Parse(format!(
                        "critical values for n={n} decrease with level"
                    )));
                }
            }
        }
        Ok(())
    }

    fn rows(&self) -> BTreeMap<usize, Vec<(f64, f64)>> {
        let mut rows: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
        for e in &self.entries {
            rows.entry(e.n).or_default().push((e.level, e.value));
        }
        for row in rows.values_mut() {
            row.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        rows
    }

    pub fn get(&self, n: usize, level: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.n == n && same_level(e.level, level))
            .map(|e| e.value)
    }

    pub fn sample_sizes(&self) -> Vec<usize> {
        self.rows().into_keys().collect()
    }

    pub fn order(&self) -> Result<EntropyOrder> {
        EntropyOrder::new(self.provenance.alpha, self.provenance.beta)
    }

    /// Cells that drop below the previous sample size by more than `slack`.
    pub fn monotonicity_violations(&self, slack: f64) -> Vec<CriticalEntry> {
        let mut out = Vec::new();
        let mut last: Vec<(f64, f64)> = Vec::new();
        for e in &self.entries {
            match last.iter_mut().find(|(l, _)| same_level(*l, e.level)) {
                Some((_, prev)) => {
                    if e.value < *prev - slack {
                        out.push(*e);
                    }
                    *prev = e.value;
                }
                None => last.push((e.level, e.value)),
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: CriticalTable = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }

    /// CSV with `n,level,value` columns, preceded by `#`-comment lines that
    /// carry the schema and provenance.
    pub fn to_csv(&self) -> String {
        let p = &self.provenance;
        let mut out = format!(
            "# schema={}\n# seed={}\n# replications={}\n# alpha={}\n# beta={}\n# variant={}\n",
            self.schema, p.seed, p.replications, p.alpha, p.beta, p.variant
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "level", "value"]).expect("in-memory write");
        for e in &self.entries {
            w.write_record([e.n.to_string(), e.level.to_string(), e.value.to_string()])
                .expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8"));
        out
    }

    pub fn from_csv(s: &str) -> Result<Self> {
        let mut meta = BTreeMap::new();
        for line in s.lines().filter_map(|l| l.strip_prefix('#')) {
            if let Some((k, v)) = line.trim().split_once('=') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        let field = |k: &str| -> Result<&String> {
            meta.get(k)
                .ok_or_else(|| Error::Parse(format!("CSV table lacks '# {k}=' header")))
        };
        let num = |k: &str| -> Result<f64> {
            field(k)?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad {k}: {e}")))
        };
        let schema: u32 = field("schema")?
            .parse()
            .map_err(|e| Error::Parse(format!("bad schema: {e}")))?;
        let provenance = Provenance {
            seed: field("seed")?
                .parse()
                .map_err(|e| Error::Parse(format!("bad seed: {e}")))?,
            replications: field("replications")?
                .parse()
                .map_err(|e| Error::Parse(format!("bad replications: {e}")))?,
            alpha: num("alpha")?,
            beta: num("beta")?,
            variant: field("variant")?.parse()?,
        };
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(s.as_bytes());
        let mut entries = Vec::new();
        for rec in rdr.deserialize::<CriticalEntry>() {
            entries.push(rec.map_err(|e| Error::Parse(e.to_string()))?);
        }
        let t = CriticalTable {
            schema,
            provenance,
            entries,
        };
        t.validate()?;
        Ok(t)
    }

    /// CSV when the extension is `.csv`, JSON otherwise.
    pub fn write(&self, path: &Path) -> Result<()> {
        let body = if is_csv(path) { self.to_csv() } else { self.to_json() + "\n" };
        std::fs::write(path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        if is_csv(path) {
            Self::from_csv(&s)
        } else {
            Self::from_json(&s)
        }
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn provenance(cfg: &TestConfig) -> Provenance {
    Provenance {
        seed: cfg.seed,
        replications: cfg.replications,
        alpha: cfg.order.alpha(),
        beta: cfg.order.beta(),
        variant: cfg.variant,
    }
}

pub fn critical_values(n_list: &[usize], levels: &[f64], cfg: &TestConfig) -> Result<CriticalTable> {
    cfg.validate()?;
    for &l in levels {
        check_level(l)?;
    }
    let mut entries = Vec::with_capacity(n_list.len() * levels.len());
    for &n in n_list {
        let t = null_t(n, cfg)?;
        for &level in levels {
            entries.push(CriticalEntry {
                n,
                level,
                value: lower_quantile(&t, level),
            });
        }
    }
    CriticalTable::new(provenance(cfg), entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Reject,
    FailToReject,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Reject => "reject",
            Decision::FailToReject => "fail_to_reject",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestOutcome {
    pub n: usize,
    pub level: f64,
    pub lambda_hat: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub critical_value: f64,
    pub decision: Decision,
}

fn check_table_matches(table: &CriticalTable, cfg: &TestConfig) -> Result<()> {
    let p = &table.provenance;
    if p.alpha != cfg.order.alpha() || p.beta != cfg.order.beta() || p.variant != cfg.variant {
        return Err(Error::InvalidParameter(format!(
            "critical table was built for (alpha={}, beta={}, variant={}) but the test uses (alpha={}, beta={}, variant={})",
            p.alpha,
            p.beta,
            p.variant,
            cfg.order.alpha(),
            cfg.order.beta(),
            cfg.variant
        )));
    }
    Ok(())
}

fn critical_for(n: usize, level: f64, cfg: &TestConfig, table: Option<&CriticalTable>) -> Result<f64> {
    if let Some(t) = table {
        check_table_matches(t, cfg)?;
        if let Some(v) = t.get(n, level) {
            return Ok(v);
        }
    }
    if table.is_some() && !cfg.simulate_missing {
        return Err(Error::MissingCriticalValue { n, level });
    }
    Ok(lower_quantile(&null_t(n, cfg)?, level))
}

/// Rejects when `T` falls below the critical value taken from `table`, or
/// simulated for this `n` when the table is absent or lacks the cell.
pub fn run_test(s: &Sample, level: f64, cfg: &TestConfig, table: Option<&CriticalTable>) -> Result<TestOutcome> {
    cfg.validate()?;
    check_level(level)?;
    let stat = statistic(s, &cfg.order, cfg.variant)?;
    let critical_value = critical_for(s.len(), level, cfg, table)?;
    Ok(TestOutcome {
        n: s.len(),
        level,
        lambda_hat: stat.lambda_hat,
        d: stat.d,
        t: stat.t,
        critical_value,
        decision: if stat.t < critical_value {
            Decision::Reject
        } else {
            Decision::FailToReject
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerResult {
    pub alternative: String,
    pub n: usize,
    pub level: f64,
    pub power: f64,
    pub replications: usize,
    pub se: f64,
    pub critical_value: f64,
}

/// Fraction of `B` samples from `alt` rejected at each level. Alternative
/// samples come from streams independent of the ones used for the null.
pub fn power_study(
    alt: &ParametricDistribution,
    n_list: &[usize],
    levels: &[f64],
    cfg: &TestConfig,
    table: Option<&CriticalTable>,
) -> Result<Vec<PowerResult>> {
    cfg.validate()?;
    for &l in levels {
        check_level(l)?;
    }
    let mut out = Vec::new();
    let alt_seed = mix_seed(cfg.seed, ALTERNATIVE_TAG);
    for &n in n_list {
        let mut null: Option<Vec<f64>> = None;
        let mut crit = Vec::with_capacity(levels.len());
        for &level in levels {
            let from_table = match table {
                Some(t) => {
                    check_table_matches(t, cfg)?;
                    t.get(n, level)
                }
                None => None,
            };
            let v = match from_table {
                Some(v) => v,
                None if table.is_some() && !cfg.simulate_missing => {
                    return Err(Error::MissingCriticalValue { n, level });
                }
                None => {
                    if null.is_none() {
                        null = Some(null_t(n, cfg)?);
                    }
                    lower_quantile(null.as_ref().expect("simulated above"), level)
                }
            };
            crit.push(v);
        }
        let t = simulate_t(alt, n, mix_seed(alt_seed, n as u64), cfg)?;
        let b = t.len() as f64;
        for (&level, &c) in levels.iter().zip(&crit) {
            let p = t.iter().filter(|&&v| v < c).count() as f64 / b;
            out.push(PowerResult {
                alternative: alt.to_string(),
                n,
                level,
                power: p,
                replications: t.len(),
                se: (p * (1.0 - p) / b).sqrt(),
                critical_value: c,
            });
        }
    }
    Ok(out)
}

/// Parses `"4:30,35:100:5,120"` into sample sizes (inclusive ranges with an
/// optional step).
pub fn parse_n_list(spec: &str) -> Result<Vec<usize>> {
    let bad = |m: String| Error::Parse(format!("bad sample-size list '{spec}': {m}"));
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let nums = part
            .split(':')
            .map(|x| x.trim().parse::<usize>().map_err(|e| bad(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        match nums.as_slice() {
            [n] => out.push(*n),
            [a, b] | [a, b, _] if a > b => return Err(bad(format!("range {a}:{b} is empty"))),
            [_, _, 0] => return Err(bad("step must be positive".into())),
            [a, b] => out.extend(*a..=*b),
            [a, b, s] => out.extend((*a..=*b).step_by(*s)),
            _ => return Err(bad(format!("'{part}' is not n, a:b or a:b:step"))),
        }
    }
    if out.is_empty() {
        return Err(bad("no sample sizes".into()));
    }
    Ok(out)
}
