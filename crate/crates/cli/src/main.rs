//! `qc`: batch runs of the density constants, the published tables and the
//! L-value / omega_Y experiments.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quartic_consts::constants::{
    self, BoundParams, D4Family, D4Options, D4Weight, DensityReport, DEFAULT_EULER_CUTOFF,
    DEFAULT_EXTENSION_BOUND,
};
use quartic_consts::quadfield::build_field;
use quartic_consts::stats::{self, Census, Threshold};
use quartic_consts::arith;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug, Serialize)]
#[command(name = "qc", version, about = "Density constants for quartic extensions of quadratic fields")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, env = "QC_THREADS", default_value_t = 0, global = true)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
enum Command {
    /// S4 and D4 constants, D4 share and bound evaluations per field.
    Constants(ConstantsArgs),
    /// Reproduce a published table with per-cell deviations.
    Table(TableArgs),
    /// Second moment of log L(1, chi) over the real characters mod D.
    Moments(MomentsArgs),
    /// omega_Y census, exceedance fractions and the typical-character experiment.
    Omega(OmegaArgs),
    /// Ratio lower bounds (implied constants set to 1).
    RatioBound(RatioArgs),
}

#[derive(Args, Debug, Serialize, Clone, Copy)]
struct SumArgs {
    /// Euler product runs over prime ideals of norm up to this.
    #[arg(long, default_value_t = DEFAULT_EULER_CUTOFF)]
    euler_cutoff: u64,
    /// D4 sum runs over extensions with relative discriminant norm up to this.
    #[arg(long, default_value_t = DEFAULT_EXTENSION_BOUND)]
    bound: u64,
    #[arg(long, value_enum, default_value_t = FamilyArg::Biquadratic)]
    family: FamilyArg,
    #[arg(long, value_enum, default_value_t = WeightArg::Tabulated)]
    weight: WeightArg,
    /// omega_Y cutoff for the nonstat bound (default: largest prime dividing D_F).
    #[arg(long)]
    y: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum FamilyArg {
    Biquadratic,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum WeightArg {
    Tabulated,
    Asymptotic,
}

impl SumArgs {
    fn options(&self) -> D4Options {
        D4Options {
            family: match self.family {
                FamilyArg::Biquadratic => D4Family::Biquadratic,
                FamilyArg::All => D4Family::All,
            },
            weight: match self.weight {
                WeightArg::Tabulated => D4Weight::Tabulated,
                WeightArg::Asymptotic => D4Weight::Asymptotic,
            },
        }
    }

    fn bounds(&self) -> BoundParams {
        BoundParams { y: self.y, c: self.c, eps: self.eps }
    }

    fn validate(&self) -> Result<(), String> {
        if self.euler_cutoff < 100 {
            return Err(format!("--euler-cutoff must be at least 100, got {}", self.euler_cutoff));
        }
        if self.bound < 1 {
            return Err("--bound must be at least 1".into());
        }
        if !(self.c > 0.0) {
            return Err(format!("--c must be positive, got {}", self.c));
        }
        if self.y.is_some_and(|y| y < 3) {
            return Err("--y must be at least 3".into());
        }
        Ok(())
    }
}

#[derive(Args, Debug, Serialize)]
struct ConstantsArgs {
    /// Squarefree d (comma separated or repeated) for F = Q(sqrt d).
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    d: Vec<i64>,
    #[command(flatten)]
    sums: SumArgs,
}

#[derive(Args, Debug, Serialize)]
struct TableArgs {
    /// 1: fields Q(sqrt(+-d)) with d primorial; 2: |d| <= 10.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    set: u8,
    #[command(flatten)]
    sums: SumArgs,
}

#[derive(Args, Debug, Serialize)]
struct MomentsArgs {
    /// Moduli D (comma separated or repeated).
    #[arg(long, required = true, value_delimiter = ',')]
    modulus: Vec<u64>,
    /// omega_Y cutoff for the bound envelope.
    #[arg(long, default_value_t = 100)]
    y: u64,
    /// Prime threshold T of the truncated log L(1, chi).
    #[arg(long, default_value_t = 1_000_000)]
    t: u64,
    /// Chebyshev multiplier for the lower-bound proportion.
    #[arg(long, default_value_t = 2.0)]
    k: f64,
}

#[derive(Args, Debug, Serialize)]
struct OmegaArgs {
    /// Census over fundamental |D| <= limit.
    #[arg(long, default_value_t = 1_000_000)]
    limit: u64,
    #[arg(long, default_value_t = 10)]
    y: u64,
    /// Multipliers k for the exceedance fractions.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 2.0, 3.0])]
    k: Vec<f64>,
    /// Discriminants sampled for the typical-character experiment (0 skips it).
    #[arg(long, default_value_t = 32)]
    sample: usize,
    /// Sample drawn from |D| <= this.
    #[arg(long, default_value_t = 100_000)]
    sample_limit: u64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Binary census cache, reused when it holds the same limit and y.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct RatioArgs {
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    d: Vec<i64>,
    #[arg(long)]
    y: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
}

#[derive(Clone, Debug)]
enum Cell {
    Int(i64),
    Float(f64),
    /// Five decimals in CSV.
    Fixed(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:?}"),
            Cell::Fixed(v) => format!("{v:.5}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) | Cell::Fixed(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

type Row = Vec<(String, Cell)>;

struct Output {
    rows: Vec<Row>,
    failed: bool,
}

fn named(cells: Vec<(&str, Cell)>) -> Row {
    cells.into_iter().map(|(k, c)| (k.to_string(), c)).collect()
}

fn int(v: impl Into<i64>) -> Cell {
    Cell::Int(v.into())
}

fn error_row(columns: &[&str], key: (&str, Cell), message: String) -> Row {
    columns
        .iter()
        .map(|&c| {
            let cell = if c == key.0 {
                key.1.clone()
            } else if c == "error" {
                Cell::Text(message.clone())
            } else {
                Cell::Empty
            };
            (c.to_string(), cell)
        })
        .collect()
}

const CONSTANT_COLUMNS: &[&str] = &[
    "d",
    "disc",
    "class_number",
    "cl2",
    "s4_constant",
    "s4_tail",
    "euler_cutoff",
    "d4_constant",
    "d4_tail",
    "d4_bound",
    "d4_l_value_error",
    "d4_terms",
    "d4_family",
    "d4_weight",
    "unramified_residue_sum",
    "unramified_weighted_sum",
    "unramified_count",
    "genus_factorizations",
    "percentage",
    "genus_ratio",
    "grh_ratio",
    "nonstat_ratio",
    "typical_ratio",
    "qualitative",
    "error",
];

fn report(d: i64, sums: &SumArgs) -> quartic_consts::Result<DensityReport> {
    let field = Arc::new(build_field(d)?);
    constants::ratio_observed(&field, sums.euler_cutoff, sums.bound, sums.options(), sums.bounds())
}

fn bound_cell(r: &DensityReport, key: &str) -> Cell {
    r.bound_evaluations.get(key).map_or(Cell::Empty, |&v| Cell::Float(v))
}

fn constants_row(r: &DensityReport) -> Row {
    named(vec![
        ("d", int(r.d)),
        ("disc", int(r.disc)),
        ("class_number", int(r.class_number as i64)),
        ("cl2", int(r.cl2 as i64)),
        ("s4_constant", Cell::Float(r.s4.value)),
        ("s4_tail", Cell::Float(r.s4.tail_estimate)),
        ("euler_cutoff", int(r.s4.euler_cutoff as i64)),
        ("d4_constant", Cell::Float(r.d4.value)),
        ("d4_tail", Cell::Float(r.d4.tail_estimate)),
        ("d4_bound", int(r.d4.bound as i64)),
        ("d4_l_value_error", Cell::Float(r.d4.l_value_error)),
        ("d4_terms", int(r.d4.terms as i64)),
        ("d4_family", Cell::Text(family_name(r.d4.options.family).into())),
        ("d4_weight", Cell::Text(weight_name(r.d4.options.weight).into())),
        ("unramified_residue_sum", Cell::Float(r.d4_unramified_lower.residue_sum)),
        ("unramified_weighted_sum", Cell::Float(r.d4_unramified_lower.weighted_sum)),
        ("unramified_count", int(r.d4_unramified_lower.terms.len() as i64)),
        ("genus_factorizations", int(r.genus_factorizations as i64)),
        ("percentage", Cell::Float(r.percentage)),
        ("genus_ratio", bound_cell(r, "genus_ratio")),
        ("grh_ratio", bound_cell(r, "grh_ratio")),
        ("nonstat_ratio", bound_cell(r, "nonstat_ratio")),
        ("typical_ratio", bound_cell(r, "typical_ratio")),
        ("qualitative", Cell::Bool(r.qualitative)),
        ("error", Cell::Empty),
    ])
}

fn family_name(f: D4Family) -> &'static str {
    match f {
        D4Family::Biquadratic => "biquadratic",
        D4Family::All => "all",
    }
}

fn weight_name(w: D4Weight) -> &'static str {
    match w {
        D4Weight::Tabulated => "tabulated",
        D4Weight::Asymptotic => "asymptotic",
    }
}

fn cmd_constants(args: &ConstantsArgs) -> Output {
    let results: Vec<_> = args.d.par_iter().map(|&d| (d, report(d, &args.sums))).collect();
    let mut failed = false;
    let rows = results
        .into_iter()
        .map(|(d, r)| match r {
            Ok(r) => constants_row(&r),
            Err(e) => {
                failed = true;
                error_row(CONSTANT_COLUMNS, ("d", int(d)), e.to_string())
            }
        })
        .collect();
    Output { rows, failed }
}

const TABLE_COLUMNS: &[&str] = &[
    "d",
    "s4_constant",
    "s4_published",
    "s4_rel_dev",
    "d4_constant",
    "d4_published",
    "d4_rel_dev",
    "percentage",
    "percentage_published",
    "percentage_dev",
    "error",
];

fn cmd_table(args: &TableArgs) -> Output {
    let table = constants::published_table(args.set).expect("validated by the parser");
    let results: Vec<_> = table.par_iter().map(|row| (row, report(row.d, &args.sums))).collect();
    let mut failed = false;
    let rows = results
        .into_iter()
        .map(|(p, r)| match r {
            Ok(r) => named(vec![
                ("d", int(r.d)),
                ("s4_constant", Cell::Fixed(r.s4.value)),
                ("s4_published", Cell::Fixed(p.s4)),
                ("s4_rel_dev", Cell::Fixed(r.s4.value / p.s4 - 1.0)),
                ("d4_constant", Cell::Fixed(r.d4.value)),
                ("d4_published", Cell::Fixed(p.d4)),
                ("d4_rel_dev", Cell::Fixed(r.d4.value / p.d4 - 1.0)),
                ("percentage", Cell::Fixed(r.percentage)),
                ("percentage_published", Cell::Fixed(p.percentage)),
                ("percentage_dev", Cell::Fixed(r.percentage - p.percentage)),
                ("error", Cell::Empty),
            ]),
            Err(e) => {
                failed = true;
                error_row(TABLE_COLUMNS, ("d", int(p.d)), e.to_string())
            }
        })
        .collect();
    Output { rows, failed }
}

const MOMENT_COLUMNS: &[&str] = &[
    "modulus",
    "y",
    "t",
    "omega_y",
    "family_size",
    "excluded",
    "second_moment_exact",
    "second_moment_truncated",
    "bound_envelope",
    "k",
    "lower_threshold",
    "fraction_meeting",
    "guaranteed",
    "error",
];

fn cmd_moments(args: &MomentsArgs) -> Output {
    let results: Vec<_> = args
        .modulus
        .iter()
        .map(|&m| {
            let r = stats::second_moment(m, args.y, args.t)
                .and_then(|r| Ok((r, stats::lower_bound_proportion(m, args.k)?)));
            (m, r)
        })
        .collect();
    let mut failed = false;
    let rows = results
        .into_iter()
        .map(|(m, r)| match r {
            Ok((r, b)) => named(vec![
                ("modulus", int(r.modulus as i64)),
                ("y", int(r.y as i64)),
                ("t", int(r.threshold as i64)),
                ("omega_y", int(r.omega_y)),
                ("family_size", int(r.family_size as i64)),
                ("excluded", int(r.excluded as i64)),
                ("second_moment_exact", Cell::Float(r.second_moment_exact)),
                ("second_moment_truncated", Cell::Float(r.second_moment_truncated)),
                ("bound_envelope", Cell::Float(r.bound_envelope)),
                ("k", Cell::Float(b.k)),
                ("lower_threshold", Cell::Float(b.threshold)),
                ("fraction_meeting", Cell::Float(b.fraction_meeting)),
                ("guaranteed", Cell::Float(b.guaranteed)),
                ("error", Cell::Empty),
            ]),
            Err(e) => {
                failed = true;
                error_row(MOMENT_COLUMNS, ("modulus", int(m as i64)), e.to_string())
            }
        })
        .collect();
    Output { rows, failed }
}

fn cmd_omega(args: &OmegaArgs) -> quartic_consts::Result<Output> {
    let census = match &args.cache {
        Some(path) => Census::cached(path, args.limit, args.y)?,
        None => Census::compute(args.limit, args.y)?,
    };
    let s = census.stats(&args.k);
    let mut row: Row = named(vec![
        ("limit", int(s.x as i64)),
        ("y", int(s.y as i64)),
        ("count", int(s.count as i64)),
        ("empirical_mean", Cell::Float(s.empirical_mean)),
        ("empirical_variance", Cell::Float(s.empirical_variance)),
        ("theoretical_mean", Cell::Float(s.theoretical_mean)),
        ("theoretical_variance", Cell::Float(s.theoretical_variance)),
    ]);
    for &(k, f) in &s.exceedance {
        row.push((format!("exceedance_k{k}"), Cell::Float(f)));
    }
    let log_y = stats::exceptional_y(args.limit);
    let exceptional = if log_y == args.y { census } else { Census::compute(args.limit, log_y)? };
    row.push(("exceptional_y".into(), int(log_y as i64)));
    for &k in &args.k {
        let e = stats::exceptional_from(&exceptional, k);
        row.push((format!("exceptional_k{k}"), Cell::Float(e.fraction)));
    }
    row.push(("sample".into(), int(args.sample as i64)));
    row.push(("sample_limit".into(), int(args.sample_limit as i64)));
    row.push(("c".into(), Cell::Float(args.c)));
    row.push(("eps".into(), Cell::Float(args.eps)));
    if args.sample > 0 {
        let t = stats::typical_chi_experiment(args.sample_limit, args.sample, Threshold::Power { c: args.c, eps: args.eps })?;
        row.push(("typical_min_fraction".into(), Cell::Float(t.min_fraction)));
        row.push(("typical_median_fraction".into(), Cell::Float(t.median_fraction)));
        row.push(("typical_mean_fraction".into(), Cell::Float(t.mean_fraction)));
    } else {
        row.push(("typical_min_fraction".into(), Cell::Empty));
        row.push(("typical_median_fraction".into(), Cell::Empty));
        row.push(("typical_mean_fraction".into(), Cell::Empty));
    }
    Ok(Output { rows: vec![row], failed: false })
}

const RATIO_COLUMNS: &[&str] = &[
    "d",
    "disc",
    "cl2",
    "omega",
    "y",
    "omega_y",
    "c",
    "grh_ratio",
    "genus_ratio",
    "nonstat_ratio",
    "typical_ratio",
    "qualitative",
    "error",
];

fn ratio_row(d: i64, args: &RatioArgs) -> quartic_consts::Result<Row> {
    let field = build_field(d)?;
    let abs_disc = field.disc().unsigned_abs();
    let y = args.y.unwrap_or_else(|| arith::factor(abs_disc).last().map_or(3, |&(p, _)| p).max(3).min(abs_disc));
    let omega = arith::omega(field.disc());
    Ok(named(vec![
        ("d", int(d)),
        ("disc", int(field.disc())),
        ("cl2", int(field.cl2() as i64)),
        ("omega", int(omega)),
        ("y", int(y as i64)),
        ("omega_y", int(arith::omega_y(field.disc(), y))),
        ("c", Cell::Float(args.c)),
        ("grh_ratio", Cell::Float(constants::grh_ratio_bound(field.cl2(), abs_disc, 2)?.value)),
        ("genus_ratio", Cell::Float(constants::genus_ratio_bound(omega, abs_disc)?.value)),
        ("nonstat_ratio", Cell::Float(constants::nonstat_ratio_bound(&field, y, args.c)?.value)),
        ("typical_ratio", Cell::Float(constants::typical_ratio_bound(abs_disc, args.eps)?.value)),
        ("qualitative", Cell::Bool(true)),
        ("error", Cell::Empty),
    ]))
}

fn cmd_ratio(args: &RatioArgs) -> Output {
    let mut failed = false;
    let rows = args
        .d
        .iter()
        .map(|&d| {
            ratio_row(d, args).unwrap_or_else(|e| {
                failed = true;
                error_row(RATIO_COLUMNS, ("d", int(d)), e.to_string())
            })
        })
        .collect();
    Output { rows, failed }
}

fn validate(cli: &Cli) -> Result<(), String> {
    match &cli.command {
        Command::Constants(a) => a.sums.validate(),
        Command::Table(a) => a.sums.validate(),
        Command::Moments(a) => {
            if a.y < 3 {
                return Err("--y must be at least 3".into());
            }
            if a.t < 2 {
                return Err("--t must be at least 2".into());
            }
            if !(a.k >= 1.0) {
                return Err("--k must be at least 1".into());
            }
            Ok(())
        }
        Command::Omega(a) => {
            if a.limit < 100 {
                return Err("--limit must be at least 100".into());
            }
            if a.y.saturating_mul(a.y) > a.limit {
                return Err(format!("--y must satisfy y^2 <= limit, got y = {}", a.y));
            }
            if a.limit > u32::MAX as u64 && a.cache.is_some() {
                return Err("--cache stores the limit as 32 bits".into());
            }
            if a.k.iter().any(|&k| !(k > 0.0)) {
                return Err("--k values must be positive".into());
            }
            if a.sample > 0 && a.sample_limit < 3 {
                return Err("--sample-limit must be at least 3".into());
            }
            Ok(())
        }
        Command::RatioBound(a) => {
            if a.y.is_some_and(|y| y < 3) {
                return Err("--y must be at least 3".into());
            }
            if !(a.c > 0.0) {
                return Err("--c must be positive".into());
            }
            Ok(())
        }
    }
}

fn render(cli: &Cli, out: &Output) -> Result<Vec<u8>, String> {
    match cli.format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            if let Some(first) = out.rows.first() {
                w.write_record(first.iter().map(|(k, _)| k)).map_err(|e| e.to_string())?;
            }
            for row in &out.rows {
                w.write_record(row.iter().map(|(_, c)| c.csv())).map_err(|e| e.to_string())?;
            }
            w.into_inner().map_err(|e| e.to_string())
        }
        Format::Json => {
            let rows: Vec<Value> = out
                .rows
                .iter()
                .map(|row| Value::Object(row.iter().map(|(k, c)| (k.clone(), c.json())).collect()))
                .collect();
            let doc = json!({
                "config": cli,
                "rows": rows,
                "version": env!("CARGO_PKG_VERSION"),
            });
            let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| e.to_string())?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, String> {
    validate(cli)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build().map_err(|e| e.to_string())?;
    let out = pool.install(|| match &cli.command {
        Command::Constants(a) => Ok(cmd_constants(a)),
        Command::Table(a) => Ok(cmd_table(a)),
        Command::Moments(a) => Ok(cmd_moments(a)),
        Command::Omega(a) => cmd_omega(a).map_err(|e| e.to_string()),
        Command::RatioBound(a) => Ok(cmd_ratio(a)),
    })?;
    let bytes = render(cli, &out)?;
    match &cli.out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| format!("{}: {e}", path.display()))?,
        None => std::io::stdout().write_all(&bytes).map_err(|e| e.to_string())?,
    }
    Ok(!out.failed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(msg) => {
            eprintln!("qc: {msg}");
            ExitCode::from(1)
        }
    }
}
