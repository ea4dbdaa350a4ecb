//! Batch front-end: canonical bases, verification suites, oracle tables.
//!
//! Exit codes: 0 success, 1 required check failed, 2 usage error,
//! 3 budget exhausted.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use hallcanon::canonical::{canonical_basis, ordered_monomials, CanonError};
use hallcanon::cohp1_oracle::{self, aut_count, hall_number, HallFn, KClass, OracleError, Psi, SheafIso};
use hallcanon::cyclic_quiver::{self, QuiverCalibration};
use hallcanon::exactalg::LaurentRat;
use hallcanon::principal::ReportRow;
use hallcanon::suites::{self, Check, Golden, Suite, SuiteConfig};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const DEFAULT_CANON_BUDGET: u32 = 5000;
const DEFAULT_SEED: u64 = 0;
/// Torsion degrees whose generator normalizations are calibrated.
const CALIBRATED_XI: u32 = 4;

#[derive(Parser, Debug)]
#[command(name = "hallcanon", version, about = "Canonical bases of the Drinfeld positive half of quantum affine sl2")]
struct Cli {
    /// JSON file with default values for the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed recorded in reports; every computation here is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: one per core).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Canonical basis and PBW transition matrix of one class in one window.
    Canon {
        #[arg(long)]
        class: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<i32>,
        /// Largest number of window monomials to solve for.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        budget: Option<u32>,
    },
    /// Runs one verification suite.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        budget: Option<u32>,
        #[arg(long)]
        max_rank: Option<i32>,
        /// Window of the principal-subspace report.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<i32>,
        /// Lowest degree in the principal-subspace report.
        #[arg(long, allow_hyphen_values = true)]
        min_degree: Option<i32>,
        /// Directory holding `calibration.json` and `cyclic_calibration.json`.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
    /// Brute-force counting tables.
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
    /// Recomputes the calibration files into `--golden`.
    Calibrate {
        #[arg(long)]
        golden: PathBuf,
        #[arg(long)]
        q: Option<u32>,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    /// Number of subsheaves `B <= C` with quotient `A`.
    Hall {
        #[arg(long)]
        q: Option<u32>,
        #[arg(long = "C")]
        c: String,
        #[arg(long = "B")]
        b: String,
        #[arg(long = "A")]
        a: String,
    },
    /// Green coproduct of the characteristic function of a sheaf.
    Coproduct {
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        sheaf: String,
        /// Largest torsion degree of the factors.
        #[arg(long, default_value_t = 2)]
        bound: u32,
        #[arg(long)]
        golden: Option<PathBuf>,
    },
    /// Order of the automorphism group of a sheaf.
    Aut {
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        sheaf: String,
    },
}

/// Flag defaults read from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobConfig {
    class: Option<String>,
    window: Option<i32>,
    q: Option<u32>,
    budget: Option<u32>,
    format: Option<Format>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    threads: Option<u32>,
    max_rank: Option<i32>,
    golden: Option<PathBuf>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
    Suite::parse(s).ok_or_else(|| format!("unknown suite `{s}`; expected one of {}", names.join(", ")))
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn from_oracle(e: OracleError) -> Failure {
    let code = if matches!(e, OracleError::Budget(_)) { EXIT_BUDGET } else { EXIT_USAGE };
    Failure { code, message: e.to_string() }
}

struct Output {
    format: Format,
    path: Option<PathBuf>,
}

impl Output {
    fn write(&self, json: &impl Serialize, csv_rows: Vec<Vec<String>>) -> Result<(), Failure> {
        let bytes = match self.format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(json).map_err(|e| usage(e.to_string()))?;
                s.push('\n');
                s.into_bytes()
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for r in csv_rows {
                    w.write_record(&r).map_err(|e| usage(e.to_string()))?;
                }
                w.into_inner().map_err(|e| usage(e.to_string()))?
            }
        };
        match &self.path {
            Some(p) => std::fs::write(p, bytes).map_err(|e| usage(format!("{}: {e}", p.display()))),
            None => std::io::stdout().write_all(&bytes).map_err(|e| usage(e.to_string())),
        }
    }
}

fn load_config(path: &Path) -> Result<JobConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn validate_q(q: u32) -> Result<u32, Failure> {
    hallcanon::ff::Field::get(q).map(|_| q).map_err(|e| usage(e.to_string()))
}

fn parse_class(s: &str) -> Result<KClass, Failure> {
    let c: KClass = s.parse().map_err(usage)?;
    if c.rank < 0 || (c.rank == 0 && c.degree < 0) {
        return Err(usage(format!("class {c} is not the class of a sheaf")));
    }
    Ok(c)
}

fn parse_sheaf(s: &str, q: u32) -> Result<SheafIso, Failure> {
    SheafIso::parse(s, q).map_err(|e| usage(format!("sheaf `{s}`: {e}")))
}

fn load_golden(dir: &Path) -> Result<Golden, Failure> {
    for f in ["calibration.json", "cyclic_calibration.json"] {
        if !dir.join(f).is_file() {
            return Err(usage(format!(
                "calibration file {} is missing; run `hallcanon calibrate --golden {}` first",
                dir.join(f).display(),
                dir.display()
            )));
        }
    }
    Golden::load(dir).map_err(usage)
}

#[derive(Serialize)]
struct CanonReport {
    class: KClass,
    window: i32,
    /// PBW monomials in ascending order; the transition columns.
    monomials: Vec<String>,
    basis: Vec<CanonRow>,
}

#[derive(Serialize)]
struct CanonRow {
    index: String,
    /// Nonzero transition entries `(column, coefficient)`.
    terms: Vec<(usize, String)>,
}

fn cmd_canon(class: KClass, window: i32, budget: u32, out: &Output) -> Result<(), Failure> {
    let monomials = ordered_monomials(class, window);
    if monomials.len() > budget as usize {
        return Err(Failure {
            code: EXIT_BUDGET,
            message: format!("budget exceeded: {} window monomials, budget {budget}", monomials.len()),
        });
    }
    let basis = canonical_basis(class, window).map_err(|e| match e {
        CanonError::RankTooLarge(_) => usage(e.to_string()),
        _ => Failure { code: EXIT_FAIL, message: e.to_string() },
    })?;
    let col: std::collections::BTreeMap<_, usize> = monomials.iter().enumerate().map(|(j, m)| (m, j)).collect();
    let rows: Vec<CanonRow> = basis
        .iter()
        .map(|b| {
            let mut terms: Vec<(usize, String)> = b.element.terms().map(|(m, c)| (col[m], c.to_string())).collect();
            terms.sort();
            CanonRow { index: b.index.to_string(), terms }
        })
        .collect();
    let mut csv_rows = vec![vec!["index".into(), "monomial".into(), "coefficient".into()]];
    for r in &rows {
        for (j, c) in &r.terms {
            csv_rows.push(vec![r.index.clone(), monomials[*j].to_string(), c.clone()]);
        }
    }
    let report = CanonReport { class, window, monomials: monomials.iter().map(|m| m.to_string()).collect(), basis: rows };
    eprintln!("{} canonical elements in class {class} at window {window}", report.basis.len());
    out.write(&report, csv_rows)
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    suite: Suite,
    seed: u64,
    checks: &'a [Check],
    #[serde(skip_serializing_if = "Option::is_none")]
    rows: Option<&'a [ReportRow]>,
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn cmd_verify(suite: Suite, golden: &Golden, cfg: &SuiteConfig, seed: u64, out: &Output) -> Result<u8, Failure> {
    let (checks, rows) = if suite == Suite::Principal {
        let (c, r) = suites::principal(cfg.principal_window, cfg.principal_min_degree);
        (c, Some(r))
    } else {
        (suites::run_suite(suite, golden, cfg), None)
    };
    for c in &checks {
        let tag = if c.pass { "PASS" } else if c.required { "FAIL" } else { "NOTE" };
        eprintln!("{tag} [{}] {} ({} ms) {}", c.criterion, c.name, c.millis, c.detail);
    }
    let csv_rows = match &rows {
        Some(rows) => {
            let mut t = vec![[
                "class", "window", "quotient_dim", "quotient_dim_deeper", "saturated", "c0_count", "series_coeff",
                "independent", "verdict",
            ]
            .map(String::from)
            .to_vec()];
            for r in rows {
                t.push(vec![
                    r.class.to_string(),
                    r.window.to_string(),
                    opt(&r.quotient_dim),
                    opt(&r.quotient_dim_deeper),
                    r.saturated.to_string(),
                    r.c0_count.to_string(),
                    r.series_coeff.to_string(),
                    opt(&r.independent),
                    serde_json::to_value(r.verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                ]);
            }
            t
        }
        None => {
            let mut t = vec![["criterion", "name", "required", "pass", "detail"].map(String::from).to_vec()];
            for c in &checks {
                t.push(vec![c.criterion.to_string(), c.name.clone(), c.required.to_string(), c.pass.to_string(), c.detail.clone()]);
            }
            t
        }
    };
    out.write(&VerifyReport { suite, seed, checks: &checks, rows: rows.as_deref() }, csv_rows)?;
    let failed: Vec<&Check> = checks.iter().filter(|c| c.required && !c.pass).collect();
    Ok(if failed.iter().any(|c| c.budget_exhausted) {
        EXIT_BUDGET
    } else if !failed.is_empty() {
        EXIT_FAIL
    } else {
        0
    })
}

fn value_rows(values: &[(String, String)]) -> Vec<Vec<String>> {
    let mut t = vec![vec!["key".to_string(), "value".to_string()]];
    t.extend(values.iter().map(|(k, v)| vec![k.clone(), v.clone()]));
    t
}

/// Prints a single value as bare text, or as a JSON/CSV record.
fn emit_value(out: &Option<Output>, record: &[(String, String)], value: String) -> Result<(), Failure> {
    match out {
        Some(o) => {
            let map: std::collections::BTreeMap<&str, &str> = record.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
            o.write(&map, value_rows(record))
        }
        None => {
            println!("{value}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CoproductRow {
    quotient: String,
    sub: String,
    value: String,
}

fn cmd_oracle(cmd: &OracleCmd, q_default: Option<u32>, golden_default: Option<PathBuf>, out: Option<Output>) -> Result<(), Failure> {
    match cmd {
        OracleCmd::Hall { q, c, b, a } => {
            let q = validate_q(q.or(q_default).unwrap_or(2))?;
            let (c, b, a) = (parse_sheaf(c, q)?, parse_sheaf(b, q)?, parse_sheaf(a, q)?);
            let (ca, cb) = (a.class(), b.class());
            if c.class() != KClass::new(ca.rank + cb.rank, ca.degree + cb.degree) {
                return Err(usage(format!("class of C {} is not [A] + [B] = {} + {}", c.class(), ca, cb)));
            }
            let n = hall_number(&c, &a, &b, q).map_err(from_oracle)?;
            let record = [("q", q.to_string()), ("C", c.to_string()), ("B", b.to_string()), ("A", a.to_string()), ("count", n.to_string())]
                .map(|(k, v)| (k.to_string(), v));
            emit_value(&out, &record, n.to_string())
        }
        OracleCmd::Aut { q, sheaf } => {
            let q = validate_q(q.or(q_default).unwrap_or(2))?;
            let s = parse_sheaf(sheaf, q)?;
            let n = aut_count(&s, q);
            let record = [("q", q.to_string()), ("sheaf", s.to_string()), ("aut", n.to_string())].map(|(k, v)| (k.to_string(), v));
            emit_value(&out, &record, n.to_string())
        }
        OracleCmd::Coproduct { q, sheaf, bound, golden } => {
            let q = validate_q(q.or(q_default).unwrap_or(4))?;
            let dir = golden.clone().or(golden_default).unwrap_or_else(Golden::default_dir);
            let g = load_golden(&dir)?;
            let s = parse_sheaf(sheaf, q)?;
            let psi = Psi::new(q, g.sheaf).map_err(from_oracle)?;
            let f = HallFn::delta(q, s, LaurentRat::one());
            let d = psi.coproduct(&f, *bound).map_err(from_oracle)?;
            let rows: Vec<CoproductRow> = d
                .values
                .iter()
                .map(|((a, b), c)| CoproductRow { quotient: a.to_string(), sub: b.to_string(), value: c.to_string() })
                .collect();
            let out = out.unwrap_or(Output { format: Format::Csv, path: None });
            let mut t = vec![vec!["quotient".to_string(), "sub".to_string(), "value".to_string()]];
            t.extend(rows.iter().map(|r| vec![r.quotient.clone(), r.sub.clone(), r.value.clone()]));
            out.write(&rows, t)
        }
    }
}

fn cmd_calibrate(dir: &Path, q: Option<u32>) -> Result<(), Failure> {
    let q = validate_q(q.unwrap_or(4))?;
    std::fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let cal = cohp1_oracle::calibrate(q, CALIBRATED_XI).map_err(from_oracle)?;
    cal.save(&dir.join("calibration.json")).map_err(from_oracle)?;
    let conv = cyclic_quiver::calibrate(2).map_err(|e| Failure { code: EXIT_FAIL, message: e.to_string() })?;
    QuiverCalibration { format_version: 1, calibrated_at_q: 2, convention: conv }
        .save(&dir.join("cyclic_calibration.json"))
        .map_err(|e| usage(e.to_string()))?;
    eprintln!("calibration written to {}", dir.display());
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => JobConfig::default(),
    };
    if let Some(n) = cli.threads.or(cfg.threads) {
        rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global().map_err(|e| usage(e.to_string()))?;
    }
    let seed = cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let format = cli.format.or(cfg.format);
    let path = cli.out.clone().or(cfg.out.clone());
    let output = Output { format: format.unwrap_or(Format::Json), path: path.clone() };
    match &cli.cmd {
        Cmd::Canon { class, window, budget } => {
            let class = class.clone().or(cfg.class.clone()).ok_or_else(|| usage("--class r,d is required"))?;
            let class = parse_class(&class)?;
            let window = window.or(cfg.window).ok_or_else(|| usage("--window n is required"))?;
            let budget = budget.or(cfg.budget).unwrap_or(DEFAULT_CANON_BUDGET);
            if budget == 0 {
                return Err(usage("budget must be positive"));
            }
            cmd_canon(class, window, budget, &output)?;
            Ok(0)
        }
        Cmd::Verify { suite, q, budget, max_rank, window, min_degree, golden } => {
            let dir = golden.clone().or(cfg.golden.clone()).unwrap_or_else(Golden::default_dir);
            let g = load_golden(&dir)?;
            let mut sc = SuiteConfig::default();
            match q.or(cfg.q) {
                Some(q) if *suite == Suite::Appendix => sc.quiver_q = validate_q(q)?,
                Some(q) => sc.sheaf_q = vec![validate_q(q)?],
                None if *suite != Suite::Relations => sc.sheaf_q.truncate(1),
                None => {}
            }
            if let Some(r) = max_rank.or(cfg.max_rank) {
                if !(0..=2).contains(&r) {
                    return Err(usage(format!("--max-rank {r}: supported ranks are 0..=2")));
                }
                sc.max_rank = r;
            }
            if let Some(w) = window.or(cfg.window) {
                sc.principal_window = w;
            }
            if let Some(d) = min_degree {
                sc.principal_min_degree = *d;
            }
            sc.quiver_budget = budget.or(cfg.budget);
            if sc.quiver_budget == Some(0) {
                return Err(usage("budget must be positive"));
            }
            cmd_verify(*suite, &g, &sc, seed, &output)
        }
        Cmd::Oracle { cmd } => {
            let out = format.map(|f| Output { format: f, path: path.clone() });
            cmd_oracle(cmd, cfg.q, cfg.golden.clone(), out)?;
            Ok(0)
        }
        Cmd::Calibrate { golden, q } => {
            cmd_calibrate(golden, q.or(cfg.q))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
