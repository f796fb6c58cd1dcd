//! `wentropy` command-line front end.
//!
//! Every subcommand prints JSON by default (`--format csv|table` for flat
//! output). Domain errors go to stderr as a single JSON line
//! `{"error": <code>, "message": <text>}` with exit status 1; malformed flags
//! exit with status 2.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::distributions::ParametricDistribution;
use crate::empirical::{empirical_gwfe, empirical_gwse, EstimatorVariant, Sample};
use crate::entropy::{self, bound_check, has_closed_form, EntropyKind, EntropyOrder, Method};
use crate::error::{Error, Result};
use crate::gof::{self, CriticalTable, TestConfig};
use crate::quadrature::QuadratureConfig;
use crate::verify;

const DIST_HELP: &str = "Distribution as name(p1[,p2]), case-insensitive: \
exp(rate), pareto(shape,scale), uniform(lower,upper) or uniform(upper), \
power(shape[,upper=1]), rayleigh(rate), weibull(shape[,1]), gamma(shape[,1])";

#[derive(Parser, Debug)]
#[command(name = "wentropy", version, about = "Generalized weighted survival/failure entropies and an entropy-based exponentiality test")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args, Debug, Clone)]
pub struct OrderArgs {
    #[arg(long, default_value_t = gof::DEFAULT_ALPHA, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = gof::DEFAULT_BETA, allow_hyphen_values = true)]
    pub beta: f64,
}

impl OrderArgs {
    fn order(&self) -> Result<EntropyOrder> {
        EntropyOrder::new(self.alpha, self.beta)
    }
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// One value per line, or CSV when --column is given.
    #[arg(long)]
    pub data: PathBuf,
    /// CSV column, by header name or zero-based index.
    #[arg(long)]
    pub column: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    /// Monte-Carlo replications.
    #[arg(long = "B", alias = "replications", default_value_t = gof::DEFAULT_REPLICATIONS)]
    pub replications: usize,
    /// Base seed for the simulation streams.
    #[arg(long, env = "WENTROPY_SEED", default_value_t = gof::DEFAULT_SEED)]
    pub seed: u64,
    /// Estimator: interior-sum or exact-step.
    #[arg(long, default_value = "interior-sum")]
    pub variant: EstimatorVariant,
    /// Worker threads (defaults to all cores; results do not depend on it).
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub order: OrderArgs,
}

impl SimArgs {
    fn config(&self) -> Result<TestConfig> {
        let cfg = TestConfig {
            order: self.order.order()?,
            replications: self.replications,
            seed: self.seed,
            variant: self.variant,
            workers: self.workers,
            simulate_missing: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Static entropy of a distribution.
    Entropy {
        #[arg(long, help = DIST_HELP)]
        dist: ParametricDistribution,
        #[command(flatten)]
        order: OrderArgs,
        /// gwse, gwfe, gse or gfe.
        #[arg(long, default_value = "gwse")]
        measure: EntropyKind,
        /// Force quadrature even when a closed form exists.
        #[arg(long)]
        quadrature: bool,
    },
    /// Dynamic entropy at one or more times.
    Dynamic {
        #[arg(long, help = DIST_HELP)]
        dist: ParametricDistribution,
        #[command(flatten)]
        order: OrderArgs,
        /// gdwse, gdwfe, gdse or gdfe.
        #[arg(long, default_value = "gdwse")]
        measure: EntropyKind,
        /// Comma-separated times.
        #[arg(long = "t", value_delimiter = ',', required = true, num_args = 1..)]
        t: Vec<f64>,
        /// Force quadrature even when a closed form exists.
        #[arg(long)]
        quadrature: bool,
    },
    /// Empirical GWSE or GWFE of a data file.
    Empirical {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        order: OrderArgs,
        /// gwse or gwfe.
        #[arg(long, default_value = "gwse")]
        measure: EntropyKind,
        /// Estimator: interior-sum or exact-step.
        #[arg(long, default_value = "interior-sum")]
        variant: EstimatorVariant,
    },
    /// Evaluate the entropy inequalities for a distribution.
    Bounds {
        #[arg(long, help = DIST_HELP)]
        dist: ParametricDistribution,
        #[command(flatten)]
        order: OrderArgs,
        /// Also check the dynamic inequalities at this time.
        #[arg(long = "t")]
        t: Option<f64>,
    },
    /// Test a sample for exponentiality.
    GofTest {
        #[command(flatten)]
        data: DataArgs,
        /// Significance level.
        #[arg(long, default_value_t = 0.05)]
        level: f64,
        /// Critical table (JSON or .csv); simulated on the fly when absent.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Fail instead of simulating when the table lacks the sample size.
        #[arg(long)]
        no_simulate: bool,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Simulate a table of critical values.
    CriticalTable {
        /// Sample sizes, e.g. 4:30,35:100:5
        #[arg(long = "n")]
        n: String,
        /// Comma-separated significance levels.
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.10")]
        levels: Vec<f64>,
        /// Write the table here (.csv for CSV, JSON otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Power of the test against an alternative distribution.
    Power {
        #[arg(long, help = DIST_HELP)]
        dist: ParametricDistribution,
        /// Sample sizes, e.g. 10,20,50 or 10:50:10
        #[arg(long = "n")]
        n: String,
        /// Comma-separated significance levels.
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.10")]
        levels: Vec<f64>,
        /// Critical table to use; missing cells are simulated.
        #[arg(long)]
        table: Option<PathBuf>,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Closed form versus quadrature check over randomized parameters.
    Verify {
        /// Random parameter draws per cell.
        #[arg(long, default_value_t = verify::DEFAULT_DRAWS)]
        draws: usize,
        #[arg(long, env = "WENTROPY_SEED", default_value_t = gof::DEFAULT_SEED)]
        seed: u64,
        /// Maximum relative error per cell.
        #[arg(long, default_value_t = verify::DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
}

/// A command's result: the JSON document plus a flat view for CSV / table.
struct Report {
    json: Value,
    headers: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    ok: bool,
}

impl Report {
    fn new<T: Serialize>(body: &T, headers: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        Report {
            json: serde_json::to_value(body).expect("serializable"),
            headers,
            rows,
            ok: true,
        }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("serializable") + "\n",
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.headers).expect("in-memory write");
                for r in &self.rows {
                    w.write_record(r).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
            }
            Format::Table => {
                let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
                for r in &self.rows {
                    for (w, c) in widths.iter_mut().zip(r) {
                        *w = (*w).max(c.chars().count());
                    }
                }
                let line = |cells: Vec<&str>| {
                    cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:<w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                        .trim_end()
                        .to_string()
                        + "\n"
                };
                let mut out = line(self.headers.clone());
                for r in &self.rows {
                    out += &line(r.iter().map(String::as_str).collect());
                }
                out
            }
        }
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// Reads a sample: one number per line (blank and `#` lines skipped), or a
/// CSV column when `column` is set.
pub fn read_sample(path: &Path, column: Option<&str>) -> Result<Sample> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let parse = |s: &str, line: usize| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("{}:{line}: '{}' is not a number", path.display(), s.trim())))
    };
    let values = match column {
        None => text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|(i, l)| parse(l, i + 1))
            .collect::<Result<Vec<_>>>()?,
        Some(col) => {
            let mut rdr = csv::ReaderBuilder::new()
                .trim(csv::Trim::All)
                .comment(Some(b'#'))
                .from_reader(text.as_bytes());
            let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
            let idx = match headers.iter().position(|h| h == col) {
                Some(i) => i,
                None => col
                    .parse::<usize>()
                    .ok()
                    .filter(|&i| i < headers.len())
                    .ok_or_else(|| Error::Parse(format!("column '{col}' not found in {}", path.display())))?,
            };
            let mut out = Vec::new();
            for (i, rec) in rdr.records().enumerate() {
                let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
                let cell = rec
                    .get(idx)
                    .ok_or_else(|| Error::Parse(format!("{}: row {} lacks column {col}", path.display(), i + 2)))?;
                out.push(parse(cell, i + 2)?);
            }
            out
        }
    };
    Sample::new(values)
}

fn measure_kind_check(kind: EntropyKind, dynamic: bool) -> Result<()> {
    if kind.is_dynamic() != dynamic {
        let expected = if dynamic { "gdwse, gdwfe, gdse or gdfe" } else { "gwse, gwfe, gse or gfe" };
        return Err(Error::InvalidParameter(format!(
            "measure {kind:?} not allowed here; expected {expected}"
        )));
    }
    Ok(())
}

fn method_name(d: &ParametricDistribution, kind: EntropyKind, t: Option<f64>, quadrature: bool) -> &'static str {
    if !quadrature && has_closed_form(d, kind, t) {
        "closed-form"
    } else {
        "quadrature"
    }
}

fn execute(command: Command) -> Result<Report> {
    let qcfg = QuadratureConfig::default();
    match command {
        Command::Entropy {
            dist,
            order,
            measure,
            quadrature,
        } => {
            measure_kind_check(measure, false)?;
            let o = order.order()?;
            let method = if quadrature { Method::Quadrature } else { Method::Auto };
            let v = entropy::evaluate(&dist, &o, measure, None, method, &qcfg)?;
            let body = json!({
                "dist": dist.to_string(),
                "alpha": o.alpha(),
                "beta": o.beta(),
                "measure": measure,
                "value": v.value,
                "integral": v.integral(),
                "method": method_name(&dist, measure, None, quadrature),
            });
            Ok(Report::new(
                &body,
                vec!["dist", "measure", "alpha", "beta", "value"],
                vec![vec![dist.to_string(), format!("{measure:?}").to_uppercase(), num(o.alpha()), num(o.beta()), num(v.value)]],
            ))
        }
        Command::Dynamic {
            dist,
            order,
            measure,
            t,
            quadrature,
        } => {
            measure_kind_check(measure, true)?;
            let o = order.order()?;
            let method = if quadrature { Method::Quadrature } else { Method::Auto };
            let mut values = Vec::new();
            let mut rows = Vec::new();
            for &ti in &t {
                let v = entropy::evaluate(&dist, &o, measure, Some(ti), method, &qcfg)?;
                values.push(json!({"t": ti, "value": v.value}));
                rows.push(vec![num(ti), num(v.value)]);
            }
            let body = json!({
                "dist": dist.to_string(),
                "alpha": o.alpha(),
                "beta": o.beta(),
                "measure": measure,
                "method": method_name(&dist, measure, t.first().copied(), quadrature),
                "values": values,
            });
            Ok(Report::new(&body, vec!["t", "value"], rows))
        }
        Command::Empirical {
            data,
            order,
            measure,
            variant,
        } => {
            let o = order.order()?;
            let s = read_sample(&data.data, data.column.as_deref())?;
            let value = match measure {
                EntropyKind::Gwse => empirical_gwse(&s, &o, variant)?,
                EntropyKind::Gwfe => empirical_gwfe(&s, &o, variant)?,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "empirical estimator exists for gwse and gwfe only, not {other:?}"
                    )))
                }
            };
            let body = json!({
                "n": s.len(),
                "alpha": o.alpha(),
                "beta": o.beta(),
                "measure": measure,
                "variant": variant,
                "value": value,
            });
            Ok(Report::new(
                &body,
                vec!["n", "measure", "variant", "value"],
                vec![vec![s.len().to_string(), format!("{measure:?}").to_uppercase(), variant.to_string(), num(value)]],
            ))
        }
        Command::Bounds { dist, order, t } => {
            let o = order.order()?;
            let r = bound_check(&dist, &o, t, &qcfg)?;
            let rows = r
                .entries
                .iter()
                .map(|e| {
                    vec![
                        e.name.to_string(),
                        num(e.lhs),
                        serde_json::to_value(e.relation).expect("serializable").as_str().unwrap_or("").to_string(),
                        num(e.rhs),
                        num(e.margin),
                    ]
                })
                .collect();
            let body = json!({
                "dist": dist.to_string(),
                "alpha": o.alpha(),
                "beta": o.beta(),
                "t": t,
                "entries": r.entries,
                "skipped": r.skipped,
            });
            Ok(Report::new(&body, vec!["name", "lhs", "relation", "rhs", "margin"], rows))
        }
        Command::GofTest {
            data,
            level,
            table,
            no_simulate,
            sim,
        } => {
            let mut cfg = sim.config()?;
            cfg.simulate_missing = !no_simulate;
            let table = table.as_deref().map(CriticalTable::read).transpose()?;
            let s = read_sample(&data.data, data.column.as_deref())?;
            let out = gof::run_test(&s, level, &cfg, table.as_ref())?;
            Ok(Report::new(
                &out,
                vec!["n", "level", "lambda_hat", "D", "T", "critical_value", "decision"],
                vec![vec![
                    out.n.to_string(),
                    num(out.level),
                    num(out.lambda_hat),
                    num(out.d),
                    num(out.t),
                    num(out.critical_value),
                    out.decision.to_string(),
                ]],
            ))
        }
        Command::CriticalTable { n, levels, out, sim } => {
            let cfg = sim.config()?;
            let ns = gof::parse_n_list(&n)?;
            let table = gof::critical_values(&ns, &levels, &cfg)?;
            if let Some(path) = &out {
                table.write(path)?;
            }
            let rows = table
                .entries
                .iter()
                .map(|e| vec![e.n.to_string(), num(e.level), num(e.value)])
                .collect();
            Ok(Report::new(&table, vec!["n", "level", "value"], rows))
        }
        Command::Power {
            dist,
            n,
            levels,
            table,
            sim,
        } => {
            let cfg = sim.config()?;
            let ns = gof::parse_n_list(&n)?;
            let table = table.as_deref().map(CriticalTable::read).transpose()?;
            let res = gof::power_study(&dist, &ns, &levels, &cfg, table.as_ref())?;
            let rows = res
                .iter()
                .map(|r| {
                    vec![
                        r.alternative.clone(),
                        r.n.to_string(),
                        num(r.level),
                        num(r.power),
                        num(r.se),
                        num(r.critical_value),
                    ]
                })
                .collect();
            Ok(Report::new(&res, vec!["alternative", "n", "level", "power", "se", "critical_value"], rows))
        }
        Command::Verify { draws, seed, tolerance } => {
            if draws == 0 {
                return Err(Error::InvalidParameter("draws must be positive".into()));
            }
            let r = verify::run_verification(draws, seed, tolerance)?;
            let rows = r
                .cells
                .iter()
                .map(|c| {
                    vec![
                        c.name.to_string(),
                        c.draws.to_string(),
                        format!("{:.3e}", c.max_rel_error),
                        if c.pass { "PASS" } else { "FAIL" }.to_string(),
                    ]
                })
                .collect();
            let mut rep = Report::new(&r, vec!["cell", "draws", "max_rel_error", "result"], rows);
            rep.ok = r.all_pass();
            Ok(rep)
        }
    }
}

fn error_line(e: &Error) -> String {
    json!({"error": e.code(), "message": e.to_string()}).to_string()
}

/// Parses `args` (including the program name), runs the command and writes
/// to the given streams. Returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command) {
        Ok(rep) => {
            if stdout.write_all(rep.render(cli.format).as_bytes()).is_err() {
                return 1;
            }
            if rep.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "{}", error_line(&e));
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["wentropy"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn entropy_closed_form() {
        let (code, out, _) = run_str(&["entropy", "--dist", "exp(1)", "--alpha", "0.26", "--beta", "1.25", "--measure", "gwse"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let expected = (2.0 / 0.99) * (1.0f64 / 0.51).ln();
        assert!((v["value"].as_f64().unwrap() - expected).abs() < 1e-12);
        assert_eq!(v["method"], "closed-form");
        assert_eq!(v["measure"], "GWSE");
    }

    #[test]
    fn domain_and_usage_errors() {
        let (code, _, err) = run_str(&["entropy", "--dist", "exp(1)", "--alpha", "2", "--beta", "1.25"]);
        assert_eq!(code, 1);
        let v: Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"], "invalid_order");
        let (code, _, err) = run_str(&["entropy", "--dist", "exp(1)", "--measure", "gwfe"]);
        assert_eq!(code, 1);
        assert!(err.contains("divergent_integral"));
        let (code, _, _) = run_str(&["entropy", "--dist", "nope(1)"]);
        assert_eq!(code, 2);
        let (code, _, _) = run_str(&["dynamic", "--dist", "exp(1)"]);
        assert_eq!(code, 2);
        let (code, _, _) = run_str(&["frobnicate"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn table_and_csv_formats() {
        let (code, out, _) = run_str(&["dynamic", "--dist", "exp(2)", "--t", "0,1", "--format", "csv"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().next().unwrap(), "t,value");
        assert_eq!(out.lines().count(), 3);
        let (code, out, _) = run_str(&["bounds", "--dist", "uniform(0,2)", "--t", "1", "--format", "table"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("name"));
    }
}
