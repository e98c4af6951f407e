//! Command-line front end of the `pfreq` binary.
//!
//! Every command writes one record per result, as JSON lines or CSV, to `--out`, to
//! `$PFREQ_OUT_DIR/<command>.<ext>` when that variable is set, or to standard output.
//! Exit codes: 0 success, 1 numerical failure, 2 configuration or I/O error.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::bounds::{self, BoundRow, CheegerInput};
use crate::convex::{self, ConjugateCheck};
use crate::dual::{self, DualityReport};
use crate::error::{Error, Result};
use crate::geometry::io::DomainSpec;
use crate::geometry::{GeometricSummary, GridDomain};
use crate::onedim::{self, ConstantsRow};
use crate::primal::{self, SolutionRecord};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "PFREQ_OUT_DIR";

const DEFAULT_H: f64 = 1.0 / 64.0;
const SWEEP_H: [f64; 3] = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];
const CONJUGATE_TOL: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(
    name = "pfreq",
    version,
    about = "Generalized principal frequencies on planar domains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Primal solves over the (q, h) grid.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Dual certificates and duality gaps.
    Dual {
        #[command(flatten)]
        common: Common,
        /// Run over h = 1/32, 1/64, 1/128 unless --h is given.
        #[arg(long)]
        h_sweep: bool,
        /// Directory for CSV dumps of the dual fields f and φ.
        #[arg(long, value_name = "DIR")]
        export_pair: Option<PathBuf>,
    },
    /// Geometric bounds checked against the computed λ₁.
    Bounds {
        #[command(flatten)]
        common: Common,
        /// `auto` (known value for disks and rectangles), `estimate`, or a number.
        #[arg(long, default_value = "auto")]
        cheeger: String,
    },
    /// Table of π_{2,q} and λ₁((−1,1);q).
    Constants {
        #[command(flatten)]
        common: Common,
        /// `start:end:step`.
        #[arg(long, default_value = "1:2:0.05")]
        q_grid: String,
    },
    /// Brute-force Legendre–Fenchel conjugates against their closed forms.
    ConjugateCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Geometry, solution, certificate and bounds for each q.
    Report {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by all commands.
#[derive(Clone, Debug, Args)]
pub struct Common {
    /// Shape literal (`disk:r=1`, `rect:w=8,h=1`, `lshape:s=1`, `poly:x1,y1;…`) or a domain
    /// file path.
    #[arg(long, default_value = "disk:r=1")]
    pub domain: String,
    /// Comma-separated exponents in [1, 2]; fractions like `3/2` are accepted.
    #[arg(long, value_delimiter = ',', value_parser = parse_rational)]
    pub q: Vec<f64>,
    /// Comma-separated grid spacings, decreasing; fractions like `1/128` are accepted.
    #[arg(long, value_delimiter = ',', value_parser = parse_rational)]
    pub h: Vec<f64>,
    #[arg(long, default_value_t = primal::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parses `a/b` or a decimal.
pub fn parse_rational(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in {s:?}"))?;
            let b: f64 = b
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in {s:?}"))?;
            if b == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            a / b
        }
        None => s.parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

/// Parses `start:end:step` into the grid `start, start + step, …, end`.
pub fn parse_q_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, step] = parts[..] else {
        return Err(Error::Parse(format!(
            "q grid must be start:end:step, got {s:?}"
        )));
    };
    let p = |x: &str| parse_rational(x).map_err(Error::Parse);
    let (a, b, step) = (p(a)?, p(b)?, p(step)?);
    if !(step > 0.0) || b < a {
        return Err(Error::Parse(format!("empty q grid {s:?}")));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|k| {
            if k + 1 == count && (a + k as f64 * step - b).abs() < 1e-9 {
                b
            } else {
                a + k as f64 * step
            }
        })
        .collect())
}

/// Validated settings of one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: &'static str,
    pub domain: DomainSpec,
    pub q: Vec<f64>,
    pub h: Vec<f64>,
    pub tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(
        command: &'static str,
        common: &Common,
        default_q: &[f64],
        default_h: &[f64],
    ) -> Result<Self> {
        let domain: DomainSpec = common.domain.parse()?;
        let q = if common.q.is_empty() {
            default_q.to_vec()
        } else {
            common.q.clone()
        };
        for &v in &q {
            if !(1.0..=2.0).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "q must lie in [1, 2], got {v}"
                )));
            }
        }
        let h = if common.h.is_empty() {
            default_h.to_vec()
        } else {
            common.h.clone()
        };
        if h.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidArgument(
                "grid spacings must be positive".into(),
            ));
        }
        if h.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidArgument(
                "grid spacings must be strictly decreasing".into(),
            ));
        }
        if !(common.tol > 0.0 && common.tol < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must lie in (0, 1), got {}",
                common.tol
            )));
        }
        Ok(RunConfig {
            command,
            domain,
            q,
            h,
            tol: common.tol,
            format: common.format,
            out: common.out.clone(),
            seed: common.seed,
        })
    }

    /// Domains at each spacing; a domain file contributes its own spacing once.
    fn domains(&self) -> Result<Vec<Arc<GridDomain>>> {
        if self.domain.is_file() {
            return Ok(vec![Arc::new(self.domain.build(0.0)?)]);
        }
        self.h
            .iter()
            .map(|&h| self.domain.build(h).map(Arc::new))
            .collect()
    }

    fn output_path(&self) -> Option<PathBuf> {
        if let Some(p) = &self.out {
            return Some(p.clone());
        }
        let dir = std::env::var_os(OUT_DIR_ENV)?;
        let ext = match self.format {
            Format::Json => "jsonl",
            Format::Csv => "csv",
        };
        Some(Path::new(&dir).join(format!("{}.{ext}", self.command)))
    }
}

/// Collects records and renders them in the requested format.
struct Sink {
    rows: Vec<Value>,
}

impl Sink {
    fn new() -> Self {
        Sink { rows: Vec::new() }
    }

    fn push(&mut self, row: &impl Serialize) -> Result<()> {
        self.rows.push(serde_json::to_value(row)?);
        Ok(())
    }

    fn render(&self, format: Format) -> Result<String> {
        let mut out = String::new();
        match format {
            Format::Json => {
                for r in &self.rows {
                    out.push_str(&serde_json::to_string(r)?);
                    out.push('\n');
                }
            }
            Format::Csv => {
                let flat: Vec<Map<String, Value>> = self.rows.iter().map(flatten).collect();
                let mut header: Vec<String> = Vec::new();
                for row in &flat {
                    for k in row.keys() {
                        if !header.contains(k) {
                            header.push(k.clone());
                        }
                    }
                }
                out.push_str(&header.join(","));
                out.push('\n');
                for row in &flat {
                    let cells: Vec<String> = header
                        .iter()
                        .map(|k| row.get(k).map(csv_cell).unwrap_or_default())
                        .collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
        }
        Ok(out)
    }

    fn write(&self, cfg: &RunConfig) -> Result<()> {
        let text = self.render(cfg.format)?;
        match cfg.output_path() {
            Some(path) => {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir)?;
                }
                fs::write(path, text)?;
            }
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

/// Flattens nested objects and arrays into dotted keys.
fn flatten(v: &Value) -> Map<String, Value> {
    fn go(prefix: &str, v: &Value, out: &mut Map<String, Value>) {
        let key = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, x)| go(&key(k), x, out)),
            Value::Array(a) => a
                .iter()
                .enumerate()
                .for_each(|(i, x)| go(&key(&i.to_string()), x, out)),
            other => {
                out.insert(prefix.to_string(), other.clone());
            }
        }
    }
    let mut out = Map::new();
    go("", v, &mut out);
    out
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains([',', '"', '\n']) => {
            format!("\"{}\"", s.replace('"', "\"\""))
        }
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Outcome of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    NumericalFailure,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NoConvergence { .. } | Error::Stalled(_) | Error::NonPositive { .. } => 1,
        _ => 2,
    }
}

/// Parses the arguments, runs the command and maps the result to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli.command) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::NumericalFailure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

pub fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Solve { common } => cmd_solve(&RunConfig::new(
            "solve",
            common,
            &[1.0, 1.5, 2.0],
            &[DEFAULT_H],
        )?),
        Command::Dual {
            common,
            h_sweep,
            export_pair,
        } => {
            let default_h: &[f64] = if *h_sweep { &SWEEP_H } else { &[DEFAULT_H] };
            let cfg = RunConfig::new("dual", common, &[1.0, 1.5, 2.0], default_h)?;
            cmd_dual(&cfg, export_pair.as_deref())
        }
        Command::Bounds { common, cheeger } => cmd_bounds(
            &RunConfig::new("bounds", common, &[1.0, 1.5, 2.0], &[DEFAULT_H])?,
            cheeger,
        ),
        Command::Constants { common, q_grid } => {
            let mut cfg = RunConfig::new("constants", common, &[1.0], &[DEFAULT_H])?;
            if common.q.is_empty() {
                cfg.q = parse_q_grid(q_grid)?;
                if cfg.q.iter().any(|q| !(1.0..=2.0).contains(q)) {
                    return Err(Error::InvalidArgument(
                        "q grid must stay within [1, 2]".into(),
                    ));
                }
            }
            cmd_constants(&cfg)
        }
        Command::ConjugateCheck { common, samples } => {
            let cfg = RunConfig::new("conjugate-check", common, &[1.5], &[DEFAULT_H])?;
            cmd_conjugate_check(&cfg, *samples)
        }
        Command::Report { common } => cmd_report(&RunConfig::new(
            "report",
            common,
            &[1.0, 1.5, 2.0],
            &[DEFAULT_H],
        )?),
    }
}

#[derive(Serialize)]
struct SolveRow<'a> {
    domain: &'a str,
    #[serde(flatten)]
    record: SolutionRecord,
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<Outcome> {
    let name = cfg.domain.to_string();
    let mut sink = Sink::new();
    let mut outcome = Outcome::Success;
    let mut fatal = None;
    'outer: for dom in cfg.domains()? {
        for &q in &cfg.q {
            match primal::solve(&dom, q, cfg.tol) {
                Ok(sol) => sink.push(&SolveRow {
                    domain: &name,
                    record: sol.record(),
                })?,
                Err(e) if exit_code_for(&e) == 1 => {
                    eprintln!("q = {q}, h = {}: {e}", dom.h());
                    outcome = Outcome::NumericalFailure;
                }
                Err(e) => {
                    fatal = Some(e);
                    break 'outer;
                }
            }
        }
    }
    sink.write(cfg)?;
    fatal.map_or(Ok(outcome), Err)
}

#[derive(Serialize)]
struct DualRow<'a> {
    domain: &'a str,
    #[serde(flatten)]
    report: DualityReport,
    within_budget: bool,
}

fn grid_label(h: f64) -> String {
    let n = 1.0 / h;
    if (n - n.round()).abs() < 1e-9 {
        format!("1-{}", n.round() as u64)
    } else {
        format!("{h}")
    }
}

pub fn cmd_dual(cfg: &RunConfig, export: Option<&Path>) -> Result<Outcome> {
    let name = cfg.domain.to_string();
    let mut sink = Sink::new();
    let mut outcome = Outcome::Success;
    let domains = cfg.domains()?;
    let finest = domains.iter().map(|d| d.h()).fold(f64::INFINITY, f64::min);
    for dom in &domains {
        for &q in &cfg.q {
            let (_, pair, mut report) = match dual::certify(dom, q, cfg.tol) {
                Ok(r) => r,
                Err(e) if exit_code_for(&e) == 1 => {
                    eprintln!("q = {q}, h = {}: {e}", dom.h());
                    outcome = Outcome::NumericalFailure;
                    continue;
                }
                Err(e) => return Err(e),
            };
            report.feasibility_residual = dual::feasibility_residual(&pair, cfg.seed);
            let ok = report.within_budget();
            // The gap budget applies at the finest spacing; feasibility applies everywhere.
            if report.feasibility_residual < -dual::FEASIBILITY_TOL || (dom.h() == finest && !ok) {
                outcome = Outcome::NumericalFailure;
            }
            if let Some(dir) = export {
                fs::create_dir_all(dir)?;
                let stem = format!("q{q}_h{}", grid_label(dom.h()));
                pair.f
                    .write_csv(fs::File::create(dir.join(format!("f_{stem}.csv")))?)?;
                pair.phi_nodal()
                    .write_csv(fs::File::create(dir.join(format!("phi_{stem}.csv")))?)?;
            }
            sink.push(&DualRow {
                domain: &name,
                report,
                within_budget: ok,
            })?;
        }
    }
    sink.write(cfg)?;
    Ok(outcome)
}

fn cheeger_input(spec: &DomainSpec, arg: &str) -> Result<CheegerInput> {
    match arg {
        "auto" => Ok(match spec {
            DomainSpec::Disk { radius } => CheegerInput::Known(bounds::cheeger_disk(*radius)),
            DomainSpec::Rect { width, height } => {
                CheegerInput::Known(bounds::cheeger_rectangle(*width, *height))
            }
            _ => CheegerInput::Estimate,
        }),
        "estimate" => Ok(CheegerInput::Estimate),
        v => {
            let h1 = parse_rational(v).map_err(Error::Parse)?;
            if h1 > 0.0 {
                Ok(CheegerInput::Known(h1))
            } else {
                Err(Error::InvalidArgument(format!(
                    "Cheeger constant must be positive, got {h1}"
                )))
            }
        }
    }
}

#[derive(Serialize)]
struct BoundsRow<'a> {
    domain: &'a str,
    h: f64,
    #[serde(flatten)]
    row: &'a BoundRow,
}

pub fn cmd_bounds(cfg: &RunConfig, cheeger: &str) -> Result<Outcome> {
    let name = cfg.domain.to_string();
    let cheeger = cheeger_input(&cfg.domain, cheeger)?;
    let mut sink = Sink::new();
    let mut outcome = Outcome::Success;
    for dom in cfg.domains()? {
        let report = bounds::bound_report_with(&name, &dom, &cfg.q, cheeger, cfg.tol);
        for row in &report.rows {
            sink.push(&BoundsRow {
                domain: &name,
                h: report.h,
                row,
            })?;
        }
        if !report.all_satisfied() {
            for r in report.violations() {
                eprintln!("violated: {} at q = {}", r.name, r.q);
            }
            for r in report.errors() {
                eprintln!("{} at q = {}: {}", r.name, r.q, r.note);
            }
            for q in report.ordering_failures() {
                eprintln!(
                    "ordering of the inradius, perimeter and transplant forms fails at q = {q}"
                );
            }
            outcome = Outcome::NumericalFailure;
        }
    }
    sink.write(cfg)?;
    Ok(outcome)
}

pub fn cmd_constants(cfg: &RunConfig) -> Result<Outcome> {
    let mut sink = Sink::new();
    for &q in &cfg.q {
        let row: ConstantsRow = onedim::constants_row(q)?;
        sink.push(&row)?;
    }
    sink.write(cfg)?;
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct ConjugateRow {
    q: f64,
    check: &'static str,
    #[serde(flatten)]
    sample: convex::ConjugateSample,
}

pub fn cmd_conjugate_check(cfg: &RunConfig, samples: usize) -> Result<Outcome> {
    let mut sink = Sink::new();
    let mut worst: f64 = 0.0;
    for &q in &cfg.q {
        if !(q > 1.0 && q < 2.0) {
            return Err(Error::InvalidArgument(format!(
                "conjugate check needs 1 < q < 2, got {q}"
            )));
        }
        for (check, label) in [
            (ConjugateCheck::ClosedForm, "closed_form"),
            (ConjugateCheck::Rescaled, "rescaled"),
        ] {
            for sample in convex::conjugate_samples(q, samples, cfg.seed, check)? {
                worst = worst.max(sample.relative_error);
                sink.push(&ConjugateRow {
                    q,
                    check: label,
                    sample,
                })?;
            }
        }
    }
    sink.write(cfg)?;
    eprintln!("max relative error {worst:.3e}");
    Ok(if worst <= CONJUGATE_TOL {
        Outcome::Success
    } else {
        Outcome::NumericalFailure
    })
}

#[derive(Serialize)]
struct ReportRow<'a> {
    domain: &'a str,
    q: f64,
    h: f64,
    geometry: GeometricSummary,
    solution: Option<SolutionRecord>,
    duality: Option<DualityReport>,
    bounds: BTreeMap<&'static str, &'a BoundRow>,
}

pub fn cmd_report(cfg: &RunConfig) -> Result<Outcome> {
    let name = cfg.domain.to_string();
    let cheeger = cheeger_input(&cfg.domain, "auto")?;
    let mut sink = Sink::new();
    let mut outcome = Outcome::Success;
    for dom in cfg.domains()? {
        let report = bounds::bound_report_with(&name, &dom, &cfg.q, cheeger, cfg.tol);
        if !report.all_satisfied() {
            outcome = Outcome::NumericalFailure;
        }
        for &q in &cfg.q {
            let (solution, duality) = match dual::certify(&dom, q, cfg.tol) {
                Ok((sol, _, rep)) => {
                    if !rep.within_budget() {
                        outcome = Outcome::NumericalFailure;
                    }
                    (Some(sol.record()), Some(rep))
                }
                Err(e) if exit_code_for(&e) == 1 => {
                    eprintln!("q = {q}, h = {}: {e}", dom.h());
                    outcome = Outcome::NumericalFailure;
                    (None, None)
                }
                Err(e) => return Err(e),
            };
            let rows = report
                .rows
                .iter()
                .filter(|r| r.q == q && r.name != bounds::SOLVER)
                .map(|r| (r.name, r))
                .collect();
            sink.push(&ReportRow {
                domain: &name,
                q,
                h: dom.h(),
                geometry: dom.summary(),
                solution,
                duality,
                bounds: rows,
            })?;
        }
    }
    sink.write(cfg)?;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/128").unwrap(), 1.0 / 128.0);
        assert_eq!(parse_rational(" 3/2 ").unwrap(), 1.5);
        assert_eq!(parse_rational("0.25").unwrap(), 0.25);
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("inf").is_err());
    }

    #[test]
    fn q_grid() {
        let g = parse_q_grid("1:2:0.05").unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[20], 2.0);
        assert_eq!(
            parse_q_grid("1:2:1/4").unwrap(),
            vec![1.0, 1.25, 1.5, 1.75, 2.0]
        );
        assert!(parse_q_grid("1:2").is_err());
        assert!(parse_q_grid("2:1:0.1").is_err());
    }

    fn common(args: &[&str]) -> Common {
        let mut full = vec!["pfreq", "solve"];
        full.extend_from_slice(args);
        match Cli::try_parse_from(full).unwrap().command {
            Command::Solve { common } => common,
            _ => unreachable!(),
        }
    }

    #[test]
    fn config_validation() {
        let ok = RunConfig::new(
            "solve",
            &common(&["--q", "1,3/2", "--h", "1/32,1/64"]),
            &[1.0],
            &[DEFAULT_H],
        )
        .unwrap();
        assert_eq!(ok.q, vec![1.0, 1.5]);
        assert_eq!(ok.h, vec![1.0 / 32.0, 1.0 / 64.0]);
        assert!(RunConfig::new("solve", &common(&["--q", "2.5"]), &[1.0], &[DEFAULT_H]).is_err());
        assert!(RunConfig::new(
            "solve",
            &common(&["--h", "1/64,1/32"]),
            &[1.0],
            &[DEFAULT_H]
        )
        .is_err());
        assert!(RunConfig::new(
            "solve",
            &common(&["--domain", "blob:r=1"]),
            &[1.0],
            &[DEFAULT_H]
        )
        .is_err());
        assert!(RunConfig::new("solve", &common(&["--tol", "0"]), &[1.0], &[DEFAULT_H]).is_err());
    }

    #[test]
    fn csv_flattening() {
        let mut sink = Sink::new();
        sink.push(&serde_json::json!({"a": 1, "b": {"c": [2, 3]}, "d": null, "e": "x,y"}))
            .unwrap();
        let text = sink.render(Format::Csv).unwrap();
        assert_eq!(text, "a,b.c.0,b.c.1,d,e\n1,2,3,,\"x,y\"\n");
    }
}
