mod output;

use clap::{Parser, Subcommand, ValueEnum};
use output::{csv_text, emit, num, to_json};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use weightseq::analysis::{
    matuszewska, mixed_om1_check, property_battery, relation, root_vs_quotient_lower_index, IndexEstimate,
    Relation, Side, Verdict,
};
use weightseq::operator_lab::{
    build_counterexample, exponential_class_sum, scenario_rows, square_sum, weighted_class_sum, SumReport,
};
use weightseq::seqcore::{make_family, DEFAULT_P};
use weightseq::transforms::{
    bidual, conjugate, dual, log_convex_minorant, normalize_head, regularize_almost_decreasing,
};
use weightseq::verify::{run_suite, VerifyOptions};
use weightseq::weights::{default_grid, omega, GaugeBound, GrowthGauge};
use weightseq::{Error, FamilySpec, SequenceFile, WeightSequence};

#[derive(Parser)]
#[command(name = "weightseq", version, about = "Weight-sequence transforms, predicates and verification")]
struct Cli {
    /// Window length; inline families default to 512, files to their own `P`.
    #[arg(long = "P", global = true)]
    p: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Predicate battery and index estimates.
    Analyze { seq: String },
    /// Apply a chain of transforms.
    Transform { seq: String, chain: Vec<String> },
    /// Relations between two sequences.
    Compare { a: String, b: String },
    /// Sample the associated weight.
    Omega {
        seq: String,
        /// Comma-separated arguments; defaults to a geometric grid over the trusted range.
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
    },
    /// Operator counterexample and its spectral sums.
    Markin {
        #[arg(long, default_value_t = 120)]
        terms: usize,
        /// `n₀` with `g(k(n)) ≥ n + n₀`.
        #[arg(long, default_value_t = 0)]
        offset: u64,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,5,10")]
        t: Vec<f64>,
        /// Comma-separated exponents of the Gevrey weights tested for divergence.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
        members: Vec<f64>,
        /// JSON scenario overriding the flags.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 120)]
        terms: usize,
        /// `n₀` of the operator counterexample; defaults to ⌈e^{t_max}⌉.
        #[arg(long)]
        markin_offset: Option<u64>,
    },
}

/// Failure classes mapped to exit codes.
enum Failure {
    Input(String),
    Hard(String),
    Criteria,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Json(_) | Error::Io(_) => Failure::Input(e.to_string()),
            other => Failure::Hard(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Hard(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Hard(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Hard(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Criteria) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Hard(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Analyze { seq } => analyze(&load(seq, cli.p)?, cli.format, out),
        Command::Transform { seq, chain } => transform(&load(seq, cli.p)?, chain, out),
        Command::Compare { a, b } => compare(&load(a, cli.p)?, &load(b, cli.p)?, cli.format, out),
        Command::Omega { seq, t } => sample_omega(&load(seq, cli.p)?, t, cli.format, out),
        Command::Markin {
            terms,
            offset,
            t,
            members,
            config,
        } => {
            let mut sc = Scenario {
                gauge: "markin".to_string(),
                terms: *terms,
                offset: *offset,
                t: t.clone(),
                members: members.clone(),
            };
            if let Some(path) = config {
                sc = serde_json::from_str(&std::fs::read_to_string(path).map_err(Error::from)?)
                    .map_err(Error::from)?;
            }
            markin(&sc, cli.p.unwrap_or(DEFAULT_P), cli.format, out)
        }
        Command::Verify {
            suite,
            terms,
            markin_offset,
        } => verify(suite, cli, *terms, *markin_offset, out),
    }
}

fn load(spec: &str, p: Option<usize>) -> Result<WeightSequence, Error> {
    match FamilySpec::parse(spec)? {
        FamilySpec::File(path) => SequenceFile::read(&path)?.into_sequence(p),
        other => make_family(&other, p.unwrap_or(DEFAULT_P)),
    }
}

#[derive(Serialize)]
struct PropertyEntry {
    property: &'static str,
    verdict: Verdict,
}

#[derive(Serialize)]
struct AnalyzeReport {
    name: String,
    #[serde(rename = "P")]
    p: usize,
    properties: Vec<PropertyEntry>,
    quotient_index: Option<IndexEstimate>,
    root_index: Option<IndexEstimate>,
    root_vs_quotient_holds: Option<bool>,
}

fn analyze(m: &WeightSequence, format: Format, out: Option<&Path>) -> Outcome {
    let properties: Vec<PropertyEntry> = property_battery(m)
        .into_iter()
        .map(|(p, verdict)| PropertyEntry {
            property: p.name(),
            verdict,
        })
        .collect();
    let p0 = (m.p_max() / 4).max(8);
    let quotient_index = matuszewska(&m.quotients().log_mu, Side::Upper, p0).ok();
    let root_index = m
        .root_sequence()
        .ok()
        .and_then(|r| matuszewska(&r.quotients().log_mu, Side::Lower, p0).ok());
    let report = AnalyzeReport {
        name: m.name().to_string(),
        p: m.p_max(),
        properties,
        quotient_index,
        root_index,
        root_vs_quotient_holds: root_vs_quotient_lower_index(m).ok().map(|r| r.holds),
    };
    let text = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let header = ["property", "status", "witness", "notes"].map(String::from);
            let rows: Vec<Vec<String>> = report
                .properties
                .iter()
                .map(|e| {
                    vec![
                        e.property.to_string(),
                        format!("{:?}", e.verdict.status).to_lowercase(),
                        serde_json::to_string(&e.verdict.witness).unwrap_or_default(),
                        e.verdict.notes.clone(),
                    ]
                })
                .collect();
            csv_text(&header, &rows)?
        }
    };
    emit(out, &text)?;
    Ok(())
}

fn apply_step(m: &WeightSequence, step: &str) -> Result<WeightSequence, Error> {
    if let Some(s) = step.strip_prefix("shift:") {
        let s: f64 = s.parse().map_err(|_| Error::Parse(format!("bad shift '{step}'")))?;
        return m.factorial_shift(s);
    }
    match step {
        "conjugate" => conjugate(m),
        "dual" => dual(m),
        "bidual" => bidual(m),
        "regularize" => Ok(regularize_almost_decreasing(m)?.seq),
        "normalize-head" => Ok(normalize_head(m)?.seq),
        "lcm" => log_convex_minorant(m),
        "m" => m.little_m(),
        "root" => m.root_sequence(),
        _ => Err(Error::Parse(format!("unknown transform '{step}'"))),
    }
}

#[derive(Serialize)]
struct TransformSummary {
    output: String,
    #[serde(rename = "P")]
    p: usize,
    provenance: Vec<String>,
    /// `max_p |ln E_p − ln M_p|/p` against the input on the common window.
    max_root_gap: f64,
}

fn transform(m: &WeightSequence, chain: &[String], out: Option<&Path>) -> Outcome {
    let mut cur = m.clone();
    for step in chain {
        cur = apply_step(&cur, step)?;
    }
    let file = SequenceFile::from_sequence(&cur);
    let text = to_json(&file)?;
    match out {
        None => emit(None, &text)?,
        Some(path) => {
            emit(Some(path), &text)?;
            let common = cur.p_max().min(m.p_max());
            let gap = (1..=common)
                .map(|p| (cur.log_m()[p] - m.log_m()[p]).abs() / p as f64)
                .fold(0.0, f64::max);
            let summary = TransformSummary {
                output: path.display().to_string(),
                p: cur.p_max(),
                provenance: cur.provenance().to_vec(),
                max_root_gap: gap,
            };
            emit(None, &to_json(&summary)?)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CompareReport {
    a: String,
    b: String,
    relations: Vec<(Relation, Verdict)>,
    mixed_om1: Verdict,
}

fn compare(a: &WeightSequence, b: &WeightSequence, format: Format, out: Option<&Path>) -> Outcome {
    let relations = [Relation::Le, Relation::Preceq, Relation::Triangle, Relation::Approx]
        .into_iter()
        .map(|r| (r, relation(a, b, r)))
        .collect();
    let report = CompareReport {
        a: a.name().to_string(),
        b: b.name().to_string(),
        relations,
        mixed_om1: mixed_om1_check(a, b),
    };
    let text = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let header = ["relation", "status", "notes"].map(String::from);
            let mut rows: Vec<Vec<String>> = report
                .relations
                .iter()
                .map(|(r, v)| {
                    vec![
                        format!("{r:?}").to_lowercase(),
                        format!("{:?}", v.status).to_lowercase(),
                        v.notes.clone(),
                    ]
                })
                .collect();
            rows.push(vec![
                "mixed-om1".to_string(),
                format!("{:?}", report.mixed_om1.status).to_lowercase(),
                report.mixed_om1.notes.clone(),
            ]);
            csv_text(&header, &rows)?
        }
    };
    emit(out, &text)?;
    Ok(())
}

#[derive(Serialize)]
struct OmegaRow {
    t: f64,
    omega: f64,
    argmax: u64,
    trusted: bool,
}

fn sample_omega(m: &WeightSequence, t: &[f64], format: Format, out: Option<&Path>) -> Outcome {
    let grid = if t.is_empty() { default_grid(m) } else { t.to_vec() };
    let rows: Vec<OmegaRow> = grid
        .iter()
        .map(|&t| {
            let e = omega(m, t);
            OmegaRow {
                t,
                omega: e.value,
                argmax: e.argmax,
                trusted: e.trusted,
            }
        })
        .collect();
    let text = match format {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let header = ["t", "omega", "argmax", "trusted"].map(String::from);
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![num(r.t), num(r.omega), r.argmax.to_string(), r.trusted.to_string()])
                .collect();
            csv_text(&header, &body)?
        }
    };
    emit(out, &text)?;
    Ok(())
}

/// Scenario file of the `markin` command.
#[derive(Deserialize)]
struct Scenario {
    #[serde(default = "default_gauge")]
    gauge: String,
    terms: usize,
    #[serde(default)]
    offset: u64,
    t: Vec<f64>,
    #[serde(default)]
    members: Vec<f64>,
}

fn default_gauge() -> String {
    "markin".to_string()
}

#[derive(Serialize)]
struct MarkinReport {
    terms: usize,
    offset: u64,
    l2: SumReportSummary,
    exponential: Vec<(f64, SumReportSummary)>,
    weighted: Vec<(f64, f64, SumReportSummary)>,
}

#[derive(Serialize)]
struct SumReportSummary {
    status: weightseq::operator_lab::SumStatus,
    ln_partial_sum: String,
    divergent_from: Option<usize>,
    tail_max_log_ratio: Option<String>,
}

impl From<&SumReport> for SumReportSummary {
    fn from(s: &SumReport) -> Self {
        SumReportSummary {
            status: s.status,
            ln_partial_sum: format!("{:.16e}", s.ln_partial_sum),
            divergent_from: s.divergent_from,
            tail_max_log_ratio: s.tail_max_log_ratio.map(|r| format!("{r:.16e}")),
        }
    }
}

fn markin(sc: &Scenario, p: usize, format: Format, out: Option<&Path>) -> Outcome {
    let bound = match sc.gauge.as_str() {
        "markin" => GaugeBound::Markin,
        other => return Err(Error::Parse(format!("unknown gauge '{other}'")).into()),
    };
    let gauge = GrowthGauge::evaluator(bound);
    let (model, f) = build_counterexample(&gauge, sc.terms, sc.offset)?;
    let text = match format {
        Format::Csv => {
            let rows = scenario_rows(&model, &f, &sc.t)?;
            let mut header: Vec<String> = ["n", "ln_k", "ln_eps", "ln_c"].map(String::from).to_vec();
            header.extend(sc.t.iter().map(|t| format!("ln_term_t{t}")));
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut v = vec![
                        r.n.to_string(),
                        num(r.ln_k),
                        num(r.ln_eps),
                        r.ln_c.map_or("zero".to_string(), |c| format!("{c:.16e}")),
                    ];
                    v.extend(r.ln_terms.iter().map(|x| x.map_or("zero".to_string(), |c| format!("{c:.16e}"))));
                    v
                })
                .collect();
            csv_text(&header, &body)?
        }
        Format::Json => {
            let mut exponential = Vec::new();
            for &t in &sc.t {
                exponential.push((t, (&exponential_class_sum(&model, &f, t)?).into()));
            }
            let mut weighted = Vec::new();
            for &alpha in &sc.members {
                let m = WeightSequence::gevrey(alpha, p)?;
                for &t in sc.t.iter().filter(|&&t| t > 0.0) {
                    weighted.push((alpha, t, (&weighted_class_sum(&model, &f, &m, t)?).into()));
                }
            }
            let report = MarkinReport {
                terms: sc.terms,
                offset: sc.offset,
                l2: (&square_sum(&f)).into(),
                exponential,
                weighted,
            };
            to_json(&report)?
        }
    };
    emit(out, &text)?;
    Ok(())
}

fn verify(suite: &str, cli: &Cli, terms: usize, markin_offset: Option<u64>, out: Option<&Path>) -> Outcome {
    let opts = VerifyOptions {
        seed: cli.seed,
        n_terms: terms,
        markin_offset,
    };
    let results = run_suite(suite, opts)?;
    for r in &results {
        println!("[{}] {:>2} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.id, r.name, r.detail);
    }
    if let Some(path) = out {
        let text = match cli.format {
            Format::Json => to_json(&results)?,
            Format::Csv => {
                let header = ["id", "name", "passed", "detail"].map(String::from);
                let rows: Vec<Vec<String>> = results
                    .iter()
                    .map(|r| vec![r.id.to_string(), r.name.to_string(), r.passed.to_string(), r.detail.clone()])
                    .collect();
                csv_text(&header, &rows)?
            }
        };
        emit(Some(path), &text)?;
    }
    if results.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Criteria)
    }
}
