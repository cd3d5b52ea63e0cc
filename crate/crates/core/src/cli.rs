//! Command-line front end. All output goes through a writer so commands can
//! be tested without spawning a process.
//!
//! Exit codes: 0 success, 2 validation or parse failure, 3 conditioning on
//! a null event, 4 internal self-check failure, 5 method inapplicable.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::binet::{BiNetwork, ProbabilityNetwork};
use crate::document::{self, Document, EventDoc, QueryOp};
use crate::error::{Error, Result};
use crate::factor_core::{FactorSet, UtilityDistribution, DEFAULT_TOL};
use crate::factorize::{self, FactorSpace};
use crate::maut::{IndependenceReport, Lottery, TabulatedUtility, UiWitness, Verdict};
use crate::unet::{Assignment, UEvent, UtilityNetwork};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NULL_CONDITIONING: i32 = 3;
pub const EXIT_SELF_CHECK: i32 = 4;
pub const EXIT_INAPPLICABLE: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "udist", version, about = "Utility distributions, utility networks and multiattribute independence")]
pub struct Cli {
    /// Tolerance for equality and independence checks.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Queries on a utility distribution document.
    Dist {
        file: PathBuf,
        #[command(subcommand)]
        query: DistQuery,
    },
    /// Independence report for a utility table document.
    Classify { file: PathBuf },
    /// Rebuild a utility table from factors.
    Factorize {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Binary)]
        method: Method,
        #[arg(long)]
        quantum: Option<f64>,
        /// Print only the factor distribution, as a distribution document.
        #[arg(long)]
        emit: bool,
    },
    /// Queries on a utility network document.
    Unet {
        file: PathBuf,
        #[command(subcommand)]
        query: NetQuery,
    },
    /// Expected utility over a bi-network: either one binetwork document, or
    /// a p-net, a u-net and a bridge document.
    Binet {
        #[arg(num_args = 1..=3, required = true)]
        files: Vec<PathBuf>,
        #[arg(long = "evidence-p")]
        evidence_p: Option<String>,
        #[arg(long = "evidence-u")]
        evidence_u: Option<String>,
    },
    /// Run every query in a query document.
    Query { file: PathBuf },
    /// Parse a document and print it back in canonical form.
    Show { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum DistQuery {
    /// Utility of a factor set, e.g. `f,m`.
    Utility { set: String },
    /// u(x | y).
    Conditional { x: String, y: String },
    /// Whether u(x | y) = u(x).
    Independent { x: String, y: String },
}

#[derive(Debug, Subcommand)]
pub enum NetQuery {
    /// Structural and CUT checks.
    Validate,
    /// Joint utility of a complete assignment, e.g. `A=1,B=0`.
    Joint { assignment: String },
    /// Utility of an event: `A=1,B=0`, unions joined by `+`, `*` for all.
    Marginal { event: String },
    /// u(x | y) for two events.
    Conditional { x: String, y: String },
    /// d-separation of two variable lists given an optional third.
    Dsep {
        x: String,
        y: String,
        #[arg(default_value = "")]
        z: String,
    },
    /// Numeric conditional independence.
    Indep {
        x: String,
        y: String,
        #[arg(default_value = "")]
        z: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Prefix,
    Binary,
}

/// Reals with exactly nine decimals (ties to even), without negative zero.
pub fn fmt_real(x: f64) -> String {
    let s = format!("{x:.9}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ConditioningOnNull(_) => EXIT_NULL_CONDITIONING,
        Error::SelfCheck(_) => EXIT_SELF_CHECK,
        Error::NonQuantizable(_) => EXIT_INAPPLICABLE,
        _ => EXIT_VALIDATION,
    }
}

fn list(arg: &str) -> Vec<String> {
    let arg = arg.trim().trim_start_matches('{').trim_end_matches('}');
    arg.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

fn factor_set(arg: &str) -> Result<FactorSet> {
    FactorSet::from_labels(list(arg))
}

fn assignment(arg: &str) -> Result<Assignment> {
    let mut a = Assignment::new();
    for kv in list(arg) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::validation(format!("expected NAME=0|1, got `{kv}`")))?;
        let k = k.trim();
        let v = match v.trim() {
            "0" => false,
            "1" => true,
            other => return Err(Error::validation(format!("value of `{k}` must be 0 or 1, got `{other}`"))),
        };
        if a.get(k).is_some() {
            return Err(Error::validation(format!("`{k}` is assigned twice in `{arg}`")));
        }
        a.set(k, v);
    }
    Ok(a)
}

/// `A=1,B=0`, unions with `+`; `*` or an empty string is every assignment.
pub fn parse_event(arg: &str) -> Result<UEvent> {
    arg.split('+')
        .map(|t| match t.trim() {
            "*" => Ok(Assignment::new()),
            t => assignment(t),
        })
        .collect::<Result<Vec<_>>>()
        .map(UEvent::union)
}

fn names(arg: &str) -> Vec<String> {
    list(arg)
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.parent().unwrap_or(Path::new(".")).join(p)
    }
}

/// Parses arguments (including the program name) and runs the command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

macro_rules! out {
    ($w:expr, $($arg:tt)*) => {
        writeln!($w, $($arg)*).map_err(|source| Error::Io { path: "<stdout>".into(), source })
    };
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let tol = cli.tol;
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::validation("--tol must be nonnegative"));
    }
    match &cli.command {
        Command::Dist { file, query } => {
            let d = document::load(file)?.into_distribution_with_tolerance(tol)?;
            let line = match query {
                DistQuery::Utility { set } => fmt_real(d.utility(&factor_set(set)?)?),
                DistQuery::Conditional { x, y } => {
                    fmt_real(d.conditional_utility(&factor_set(x)?, &factor_set(y)?)?)
                }
                DistQuery::Independent { x, y } => d
                    .is_subjectively_independent(&factor_set(x)?, &factor_set(y)?, tol)?
                    .to_string(),
            };
            out!(out, "{line}")?;
        }
        Command::Classify { file } => {
            let u = document::load(file)?.into_table()?;
            let report = u.classify()?;
            for line in report_lines(&u, &report) {
                out!(out, "{line}")?;
            }
        }
        Command::Factorize {
            file,
            method,
            quantum,
            emit,
        } => {
            let u = document::load(file)?.into_table()?;
            let fs = match method {
                Method::Prefix => factorize::prefix_chain(&u)?,
                Method::Binary => factorize::binary_factorization(&u, *quantum)?,
            };
            fs.verify(&u)?;
            if *emit {
                out!(out, "{}", Document::from_distribution(fs.distribution()).to_json())?;
            } else {
                for line in factor_space_lines(*method, &fs)? {
                    out!(out, "{line}")?;
                }
            }
        }
        Command::Unet { file, query } => {
            let def = document::load(file)?.into_network_def()?;
            if let NetQuery::Validate = query {
                return match def.validate() {
                    Ok(()) => {
                        out!(out, "ok")?;
                        Ok(EXIT_OK)
                    }
                    Err(issues) => {
                        for i in issues {
                            out!(out, "{i}")?;
                        }
                        Ok(EXIT_VALIDATION)
                    }
                };
            }
            let net = UtilityNetwork::new(&def)?;
            let line = match query {
                NetQuery::Validate => unreachable!(),
                NetQuery::Joint { assignment: a } => fmt_real(net.joint_utility(&assignment(a)?)?),
                NetQuery::Marginal { event } => fmt_real(net.marginal_utility(&parse_event(event)?)?),
                NetQuery::Conditional { x, y } => {
                    fmt_real(net.conditional_utility(&parse_event(x)?, &parse_event(y)?)?)
                }
                NetQuery::Dsep { x, y, z } => net
                    .d_separated(&refs(&names(x)), &refs(&names(y)), &refs(&names(z)))?
                    .to_string(),
                NetQuery::Indep { x, y, z } => net
                    .numerically_independent(&refs(&names(x)), &refs(&names(y)), &refs(&names(z)), tol)?
                    .to_string(),
            };
            out!(out, "{line}")?;
        }
        Command::Binet {
            files,
            evidence_p,
            evidence_u,
        } => {
            let b = load_binetwork(files)?;
            let pe = evidence_p.as_deref().map(parse_event).transpose()?;
            let ue = evidence_u.as_deref().map(parse_event).transpose()?;
            out!(out, "{}", fmt_real(b.expected_utility_query(pe.as_ref(), ue.as_ref())?))?;
        }
        Command::Query { file } => return run_queries(file, tol, out),
        Command::Show { file } => {
            let doc = document::load(file)?;
            let canonical = match doc {
                Document::Distribution(_) => Document::from_distribution(&doc.into_distribution()?),
                Document::Table(_) => Document::from_table(&doc.into_table()?),
                Document::Network(_) => Document::from_network(&doc.into_network()?),
                other => other,
            };
            out!(out, "{}", canonical.to_json())?;
        }
    }
    Ok(EXIT_OK)
}

fn load_binetwork(files: &[PathBuf]) -> Result<BiNetwork> {
    let (bridge_file, pfile, ufile) = match files {
        [b] => (b, None, None),
        [p, u, b] => (b, Some(p.clone()), Some(u.clone())),
        _ => {
            return Err(Error::validation(
                "binet takes one binetwork document, or p-net, u-net and bridge documents",
            ))
        }
    };
    let Document::Binetwork(doc) = document::load(bridge_file)? else {
        return Err(Error::validation(format!(
            "{} is not a binetwork document",
            bridge_file.display()
        )));
    };
    let locate = |given: Option<PathBuf>, field: &Option<String>, side: &str| -> Result<PathBuf> {
        given
            .or_else(|| field.as_deref().map(|f| resolve(bridge_file, f)))
            .ok_or_else(|| Error::validation(format!("binetwork document names no {side} file")))
    };
    let pnet = ProbabilityNetwork::new(&document::load(&locate(pfile, &doc.pnet, "pnet")?)?.into_network_def()?)?;
    let unet = document::load(&locate(ufile, &doc.unet, "unet")?)?.into_network()?;
    let bridges = doc
        .bridges
        .iter()
        .map(|b| b.to_bridge())
        .collect::<Result<Vec<_>>>()?;
    BiNetwork::new(pnet, unet, bridges)
}

fn value_list(v: &serde_json::Value) -> Option<Vec<String>> {
    v.as_array()?
        .iter()
        .map(|x| x.as_str().map(String::from))
        .collect()
}

fn json_event(v: &serde_json::Value) -> Result<UEvent> {
    serde_json::from_value::<EventDoc>(v.clone())
        .map_err(|e| Error::validation(format!("bad event: {e}")))?
        .to_event()
}

fn dist_query(d: &UtilityDistribution, q: &QueryOp, tol: f64) -> Result<String> {
    let fs = |v: &[String]| FactorSet::from_labels(v.iter().cloned());
    match q {
        QueryOp::Utility { set } => Ok(fmt_real(d.utility(&fs(set)?)?)),
        QueryOp::Conditional { x, y } => {
            let (Some(x), Some(y)) = (value_list(x), value_list(y)) else {
                return Err(Error::validation("conditional on a distribution takes label lists"));
            };
            Ok(fmt_real(d.conditional_utility(&fs(&x)?, &fs(&y)?)?))
        }
        QueryOp::Independent { x, y, tol: t } => Ok(d
            .is_subjectively_independent(&fs(x)?, &fs(y)?, t.unwrap_or(tol))?
            .to_string()),
        other => Err(Error::validation(format!("{other:?} does not apply to a distribution"))),
    }
}

fn net_query(net: &UtilityNetwork, q: &QueryOp, tol: f64) -> Result<String> {
    match q {
        QueryOp::Joint { assignment } => Ok(fmt_real(
            net.joint_utility(&document::assignment_from_map(assignment)?)?,
        )),
        QueryOp::Marginal { event } => Ok(fmt_real(net.marginal_utility(&event.to_event()?)?)),
        QueryOp::Conditional { x, y } => Ok(fmt_real(
            net.conditional_utility(&json_event(x)?, &json_event(y)?)?,
        )),
        QueryOp::Dsep { x, y, z } => Ok(net.d_separated(&refs(x), &refs(y), &refs(z))?.to_string()),
        QueryOp::Indep { x, y, z, tol: t } => Ok(net
            .numerically_independent(&refs(x), &refs(y), &refs(z), t.unwrap_or(tol))?
            .to_string()),
        other => Err(Error::validation(format!("{other:?} does not apply to a network"))),
    }
}

/// One output line per query; a failing query prints `error: ...` and the
/// exit code of the first failure is returned.
fn run_queries(file: &Path, tol: f64, out: &mut dyn Write) -> Result<i32> {
    let Document::Query(q) = document::load(file)? else {
        return Err(Error::validation(format!("{} is not a query document", file.display())));
    };
    let target = document::load(&resolve(file, &q.target))?;
    let mut code = EXIT_OK;
    let results: Vec<Result<String>> = match target {
        Document::Distribution(_) => {
            let d = target.into_distribution_with_tolerance(tol)?;
            q.queries.iter().map(|op| dist_query(&d, op, tol)).collect()
        }
        Document::Network(_) => {
            let net = target.into_network()?;
            q.queries.iter().map(|op| net_query(&net, op, tol)).collect()
        }
        other => {
            return Err(Error::validation(format!(
                "queries target distributions or networks, not {}",
                other.kind()
            )))
        }
    };
    for r in results {
        match r {
            Ok(line) => out!(out, "{line}")?,
            Err(e) => {
                if code == EXIT_OK {
                    code = exit_code(&e);
                }
                out!(out, "error: {e}")?;
            }
        }
    }
    Ok(code)
}

fn assignment_text(pairs: &[(String, String)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn ui_witness_line(w: &UiWitness) -> String {
    format!(
        "  witness: Y={{{}}} Z={{{}}}: slices at ({}) and ({}) are not positive affine transforms",
        w.y.join(","),
        w.z.join(","),
        assignment_text(&w.reference),
        assignment_text(&w.conflicting)
    )
}

fn lottery_text(p: &Lottery) -> String {
    let space = p.space();
    let parts: Vec<String> = space
        .states()
        .zip(p.probs())
        .filter(|(_, &q)| q > 0.0)
        .map(|(s, &q)| {
            let labels: Vec<String> = space
                .attributes()
                .iter()
                .zip(space.labels(&s))
                .map(|(a, l)| format!("{}={l}", a.name()))
                .collect();
            format!("({}):{}", labels.join(","), fmt_real(q))
        })
        .collect();
    parts.join(" ")
}

fn verdict_line<W>(name: &str, v: &Verdict<W>) -> String {
    format!("{name}: {}", v.holds())
}

/// Report lines in fixed order: singular (with per-attribute results),
/// mutual, additive, tioli-strict, tioli-affine.
pub fn report_lines(u: &TabulatedUtility, r: &IndependenceReport) -> Vec<String> {
    let _ = u;
    let mut lines = vec![verdict_line("singular", &r.singular)];
    for (name, v) in &r.pairwise {
        lines.push(format!("  {name}: {}", v.holds()));
    }
    if let Some(w) = r.singular.witness() {
        lines.push(ui_witness_line(w));
    }
    lines.push(verdict_line("mutual", &r.mutual));
    if let Some(w) = r.mutual.witness() {
        lines.push(ui_witness_line(w));
    }
    lines.push(verdict_line("additive", &r.additive));
    if let Some(w) = r.additive.witness() {
        lines.push(format!("  witness: attributes {} and {} interact", w.attributes.0, w.attributes.1));
        lines.push(format!("  p1 eu={} {}", fmt_real(w.eu_uniform), lottery_text(&w.uniform)));
        lines.push(format!("  p2 eu={} {}", fmt_real(w.eu_diagonal), lottery_text(&w.diagonal)));
    }
    for (name, k) in [("tioli-strict", &r.tioli_strict), ("tioli-affine", &r.tioli_affine)] {
        let text = match k {
            None => "none".to_string(),
            Some(k) => k
                .weights()
                .map(|(id, w)| format!("{id}={}", fmt_real(w)))
                .collect::<Vec<_>>()
                .join(", "),
        };
        lines.push(format!("{name}: {text}"));
    }
    lines
}

pub fn factor_space_lines(method: Method, fs: &FactorSpace) -> Result<Vec<String>> {
    let method = match method {
        Method::Prefix => "prefix",
        Method::Binary => "binary",
    };
    let mut lines = vec![
        format!("method: {method}"),
        format!("factors: {}", fs.factor_count()),
    ];
    for ((id, w), raw) in fs.distribution().factors().zip(fs.raw_weights()) {
        lines.push(format!("  {id} raw={} weight={}", fmt_real(*raw), fmt_real(w)));
    }
    lines.push(format!(
        "affine: scale={} offset={}",
        fmt_real(fs.affine().scale()),
        fmt_real(fs.affine().offset())
    ));
    lines.push("states:".into());
    let space = fs.space();
    for (i, s) in space.states().enumerate() {
        let labels: Vec<String> = space
            .attributes()
            .iter()
            .zip(space.labels(&s))
            .map(|(a, l)| format!("{}={l}", a.name()))
            .collect();
        lines.push(format!(
            "  {}: {} -> {}",
            labels.join(","),
            fs.factors_of(i),
            fmt_real(fs.reconstruct(i)?)
        ));
    }
    Ok(lines)
}
