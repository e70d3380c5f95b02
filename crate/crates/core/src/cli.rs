//! Command-line experiment runner and report emitter.
//!
//! Exit codes: 0 success, 1 a checked assertion failed, 2 usage or input error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;

use crate::classical::{
    apriori_up_to, gamma_metric, generate_rules, published, samples_for_epsilon, sampling_mine, IterationStats,
};
use crate::data::{exact_support, load_fimi, ItemId, Itemset, Ratio, TransactionDb};
use crate::mining::{grid_steps_from_threshold, qarm_full, AmplificationMode, MiningOptions};
use crate::oracle::{OracleMode, QueryCounter};
use crate::qsim::{seeded_rng, QsimError, DEFAULT_QUBIT_CAP};
use crate::Error;

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable read for the default qubit cap.
pub const QUBIT_CAP_ENV: &str = "QARM_QUBIT_CAP";

/// Environment variable read for the default dataset directory.
pub const DATA_DIR_ENV: &str = "QARM_DATA_DIR";

/// Canonical FIMI-repository file names of the benchmark datasets.
pub const DATASET_FILES: [(&str, &str); 2] = [
    ("retail", "retail.dat"),
    ("kosarak", "kosarak.dat"),
];

const DATASET_URL_BASE: &str = "http://fimi.uantwerpen.be/data/";

/// Minimum separation, in grid steps, under which quantum and classical
/// answers are required to agree.
pub const AGREEMENT_MARGIN: f64 = 2.0;

#[derive(Parser, Debug)]
#[command(name = "qarm", version, about = "Quantum association-rules mining simulator with classical baselines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact level-wise Apriori.
    MineClassical(ExperimentArgs),
    /// Level-wise mining on sampled supports.
    MineSampling(ExperimentArgs),
    /// Simulated quantum mining (toy scale).
    MineQuantum(ExperimentArgs),
    /// Runs all three miners on one database and compares them.
    Compare(ExperimentArgs),
    /// Recomputes the published retail and kosarak iteration tables.
    ReproduceAppendix(AppendixArgs),
    /// Prints the expected dataset file names and where to get them.
    Datasets,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Text,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Include wall-clock timings (makes reports differ between runs).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ExperimentArgs {
    /// Transaction database in FIMI format.
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    pub input: Option<PathBuf>,
    /// `toy` or `random:N:M:DENSITY`.
    #[arg(long)]
    pub synthetic: Option<String>,
    /// Minimum support as a decimal, fraction or percentage.
    #[arg(long, default_value = "0.5")]
    pub min_supp: Ratio,
    /// Minimum confidence; enables rule generation.
    #[arg(long)]
    pub min_conf: Option<Ratio>,
    /// Phase grid size T, a power of two.
    #[arg(long, short = 't', default_value_t = 32)]
    pub grid: usize,
    /// Largest itemset size to mine.
    #[arg(long)]
    pub max_k: Option<usize>,
    #[arg(long, value_enum, default_value_t = AmplificationMode::Bbht)]
    pub mode: AmplificationMode,
    #[arg(long, value_enum, default_value_t = OracleMode::Circuit)]
    pub oracle_mode: OracleMode,
    /// Target relative error of the sampling baseline; uses ceil(1/eps^2) samples.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = QUBIT_CAP_ENV, default_value_t = DEFAULT_QUBIT_CAP)]
    pub qubit_cap: usize,
    /// Consecutive measurements without a new itemset before a level ends.
    #[arg(long, default_value_t = 25)]
    pub patience: usize,
    /// Keep boundary-uncertain quantum results without checking exact supports.
    #[arg(long)]
    pub no_verify: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct AppendixArgs {
    #[arg(long)]
    pub retail: Option<PathBuf>,
    #[arg(long)]
    pub kosarak: Option<PathBuf>,
    /// Directory searched for retail.dat and kosarak.dat.
    #[arg(long, env = DATA_DIR_ENV)]
    pub data_dir: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Configuration echoed into every experiment report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub dataset: String,
    pub min_supp: Ratio,
    pub min_conf: Option<Ratio>,
    pub grid: usize,
    pub max_k: Option<usize>,
    pub mode: AmplificationMode,
    pub oracle_mode: OracleMode,
    pub epsilon: f64,
    pub seed: u64,
    pub qubit_cap: usize,
    pub patience: usize,
    pub verify_uncertain: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DatasetInfo {
    pub n_transactions: usize,
    pub n_items: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportItemset {
    pub items: Itemset,
    pub support: f64,
    /// Exact support as `count/total`, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    /// Canonical phase-grid outcome of a quantum estimate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_y: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_uncertain: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRule {
    pub antecedent: Itemset,
    pub consequent: Itemset,
    pub support: String,
    pub confidence: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Gamma {
    pub unweighted: f64,
    pub weighted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodReport {
    pub method: String,
    pub stats: Vec<IterationStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Gamma>,
    pub itemsets: Vec<ReportItemset>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rules: Option<Vec<ReportRule>>,
    pub counters: QueryCounter,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots_used: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples_per_support: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: if passed { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: detail.into(),
        }
    }

    fn skipped(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: CheckStatus::Skipped,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ExperimentConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<DatasetInfo>,
    pub methods: Vec<MethodReport>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl Report {
    fn new(command: &str) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            config: None,
            dataset: None,
            methods: Vec::new(),
            checks: Vec::new(),
            timings_ms: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == CheckStatus::Fail)
    }

    pub fn method(&self, name: &str) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.method == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Per-iteration statistics as CSV.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("method,k,m_candidates,m_frequent\n");
        for m in &self.methods {
            for st in &m.stats {
                let _ = writeln!(s, "{},{},{},{}", m.method, st.k, st.m_candidates, st.m_frequent);
            }
        }
        s
    }

    /// Aligned plain-text tables.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "qarm {}", self.command);
        if let Some(d) = &self.dataset {
            let _ = writeln!(s, "database: {} transactions, {} items", d.n_transactions, d.n_items);
        }
        for m in &self.methods {
            let _ = writeln!(s, "\n[{}]", m.method);
            let _ = writeln!(s, "{:>4} {:>12} {:>12}", "k", "M_c", "M_f");
            for st in &m.stats {
                let _ = writeln!(s, "{:>4} {:>12} {:>12}", st.k, st.m_candidates, st.m_frequent);
            }
            if let Some(g) = m.gamma {
                let _ = writeln!(s, "gamma: {:.2} (unweighted), {:.2} (weighted)", g.unweighted, g.weighted);
            }
            if !m.itemsets.is_empty() {
                let _ = writeln!(s, "{:<24} {:>10} {:>12}", "itemset", "support", "exact");
                for it in &m.itemsets {
                    let flag = if it.boundary_uncertain == Some(true) { " ~" } else { "" };
                    let _ = writeln!(
                        s,
                        "{:<24} {:>10.4} {:>12}{}",
                        it.items.to_string(),
                        it.support,
                        it.exact.as_deref().unwrap_or("-"),
                        flag
                    );
                }
            }
            if let Some(rules) = &m.rules {
                for r in rules {
                    let _ = writeln!(s, "{} => {}  supp {}  conf {:.4}", r.antecedent, r.consequent, r.support, r.confidence);
                }
            }
            let c = &m.counters;
            let _ = writeln!(s, "basic oracle calls     {:>14}", c.basic_oracle_calls());
            let _ = writeln!(s, "classical row scans    {:>14}", c.classical_row_scans());
            let _ = writeln!(s, "grover applications    {:>14}", c.grover_applications());
            let _ = writeln!(s, "amplification iters    {:>14}", c.amplification_iterations());
            let _ = writeln!(s, "measurements           {:>14}", c.measurements());
        }
        if !self.checks.is_empty() {
            let _ = writeln!(s);
            for c in &self.checks {
                let tag = match c.status {
                    CheckStatus::Pass => "PASS",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Skipped => "SKIPPED",
                };
                let _ = writeln!(s, "{tag:<8} {}: {}", c.name, c.detail);
            }
        }
        if let Some(t) = &self.timings_ms {
            for (k, v) in t {
                let _ = writeln!(s, "time {k}: {v:.1} ms");
            }
        }
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Text => self.to_text(),
            OutputFormat::Csv => self.to_csv(),
        }
    }
}

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = match &e {
            Error::Qsim(QsimError::QubitCapExceeded { required, cap }) => format!(
                "refusing to simulate: {required} qubits required, cap is {cap} (raise --qubit-cap or {QUBIT_CAP_ENV}, or shrink the database)"
            ),
            other => other.to_string(),
        };
        CliError { code: 2, message }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        message: message.into(),
    }
}

/// Builds a random database with independent cells of the given density.
pub fn random_db(n: usize, m: usize, density: f64, seed: u64) -> crate::Result<TransactionDb> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Config(format!("density must lie in [0, 1], got {density}")));
    }
    let mut rng = seeded_rng(seed);
    let rows: Vec<Vec<ItemId>> = (0..n)
        .map(|_| (0..m as ItemId).filter(|_| rng.gen::<f64>() < density).collect())
        .collect();
    Ok(TransactionDb::from_rows(m, rows)?)
}

/// The four-row, three-item example database.
pub fn toy_db() -> TransactionDb {
    TransactionDb::from_bit_strings(&["111", "110", "100", "000"]).expect("valid toy database")
}

/// Parses `toy` or `random:N:M:DENSITY`.
pub fn synthetic_db(spec: &str, seed: u64) -> crate::Result<TransactionDb> {
    if spec == "toy" {
        return Ok(toy_db());
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Config(format!("unknown synthetic database `{spec}`, expected `toy` or `random:N:M:DENSITY`"));
    match parts.as_slice() {
        ["random", n, m, d] => {
            let n: usize = n.parse().map_err(|_| bad())?;
            let m: usize = m.parse().map_err(|_| bad())?;
            let d: f64 = d.parse().map_err(|_| bad())?;
            random_db(n, m, d, seed)
        }
        _ => Err(bad()),
    }
}

impl ExperimentArgs {
    pub fn config(&self) -> Result<ExperimentConfig, CliError> {
        if self.min_supp.is_zero() || self.min_supp.num() > self.min_supp.den() {
            return Err(usage(format!("--min-supp must lie in (0, 1], got {}", self.min_supp)));
        }
        crate::qpe::check_grid_size(self.grid).map_err(CliError::from)?;
        if self.max_k == Some(0) {
            return Err(usage("--max-k must be at least 1"));
        }
        if self.patience == 0 {
            return Err(usage("--patience must be at least 1"));
        }
        let dataset = match (&self.input, &self.synthetic) {
            (Some(p), _) => p.display().to_string(),
            (None, Some(s)) => format!("synthetic:{s}"),
            (None, None) => return Err(usage("one of --input or --synthetic is required")),
        };
        Ok(ExperimentConfig {
            dataset,
            min_supp: self.min_supp,
            min_conf: self.min_conf,
            grid: self.grid,
            max_k: self.max_k,
            mode: self.mode,
            oracle_mode: self.oracle_mode,
            epsilon: self.epsilon,
            seed: self.seed,
            qubit_cap: self.qubit_cap,
            patience: self.patience,
            verify_uncertain: !self.no_verify,
        })
    }

    pub fn load(&self) -> crate::Result<TransactionDb> {
        match (&self.input, &self.synthetic) {
            (Some(p), _) => Ok(load_fimi(p)?),
            (None, Some(s)) => synthetic_db(s, self.seed),
            (None, None) => Err(Error::Config("no database given".into())),
        }
    }
}

fn gamma_of(stats: &[IterationStats]) -> Option<Gamma> {
    Some(Gamma {
        unweighted: gamma_metric(stats, false).ok()?,
        weighted: gamma_metric(stats, true).ok()?,
    })
}

fn max_k(config: &ExperimentConfig) -> usize {
    config.max_k.unwrap_or(usize::MAX)
}

fn classical_method(db: &TransactionDb, config: &ExperimentConfig) -> crate::Result<MethodReport> {
    let mut counter = QueryCounter::new();
    let res = apriori_up_to(db, &config.min_supp, max_k(config), &mut counter)?;
    let rules = match &config.min_conf {
        Some(c) => Some(
            generate_rules(&res.frequents, c)?
                .into_iter()
                .map(|r| ReportRule {
                    antecedent: r.antecedent,
                    consequent: r.consequent,
                    support: r.support.to_string(),
                    confidence: r.confidence,
                })
                .collect(),
        ),
        None => None,
    };
    Ok(MethodReport {
        method: "classical".into(),
        gamma: gamma_of(&res.stats),
        itemsets: res
            .frequents
            .iter()
            .map(|f| ReportItemset {
                items: f.itemset.clone(),
                support: f.support.value(),
                exact: Some(f.support.to_string()),
                grid_y: None,
                boundary_uncertain: None,
            })
            .collect(),
        stats: res.stats,
        rules,
        counters: counter,
        shots_used: None,
        samples_per_support: None,
    })
}

fn sampling_method(db: &TransactionDb, config: &ExperimentConfig) -> crate::Result<MethodReport> {
    let m = samples_for_epsilon(config.epsilon)?;
    let mut counter = QueryCounter::new();
    let mut rng = seeded_rng(config.seed);
    let res = sampling_mine(db, &config.min_supp, m, max_k(config), &mut rng, &mut counter)?;
    Ok(MethodReport {
        method: "sampling".into(),
        gamma: None,
        itemsets: res
            .frequents
            .iter()
            .map(|e| ReportItemset {
                items: e.itemset.clone(),
                support: e.value,
                exact: None,
                grid_y: None,
                boundary_uncertain: None,
            })
            .collect(),
        stats: res.stats,
        rules: None,
        counters: counter,
        shots_used: None,
        samples_per_support: Some(m),
    })
}

fn quantum_method(db: &TransactionDb, config: &ExperimentConfig) -> crate::Result<MethodReport> {
    let options = MiningOptions {
        oracle_mode: config.oracle_mode,
        patience: config.patience,
        qubit_cap: config.qubit_cap,
        verify_uncertain: config.verify_uncertain,
        max_k: max_k(config),
        ..MiningOptions::default()
    };
    let mut rng = seeded_rng(config.seed);
    let res = qarm_full(db, config.min_supp.value(), config.grid, config.mode, &mut rng, &options)?;
    Ok(MethodReport {
        method: "quantum".into(),
        gamma: None,
        itemsets: res
            .found()
            .map(|f| ReportItemset {
                items: f.itemset.clone(),
                support: f.estimate.value,
                exact: f.exact.map(|e| e.to_string()),
                grid_y: Some(f.estimate.y),
                boundary_uncertain: Some(f.boundary_uncertain),
            })
            .collect(),
        shots_used: Some(res.levels.iter().map(|l| l.shots_used).sum()),
        stats: res.stats,
        rules: None,
        counters: res.counters,
        samples_per_support: None,
    })
}

struct Timer {
    enabled: bool,
    times: BTreeMap<String, f64>,
}

impl Timer {
    fn run<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.times.insert(name.into(), start.elapsed().as_secs_f64() * 1e3);
        out
    }

    fn finish(self) -> Option<BTreeMap<String, f64>> {
        self.enabled.then_some(self.times)
    }
}

fn experiment(
    command: &str,
    args: &ExperimentArgs,
    methods: &[fn(&TransactionDb, &ExperimentConfig) -> crate::Result<MethodReport>],
    names: &[&str],
) -> Result<(Report, TransactionDb, ExperimentConfig), CliError> {
    let config = args.config()?;
    let mut timer = Timer {
        enabled: args.out.timings,
        times: BTreeMap::new(),
    };
    let db = timer.run("load", || args.load())?;
    let mut report = Report::new(command);
    report.dataset = Some(DatasetInfo {
        n_transactions: db.n_transactions(),
        n_items: db.n_items(),
    });
    for (f, name) in methods.iter().zip(names) {
        let m = timer.run(name, || f(&db, &config))?;
        report.methods.push(m);
    }
    report.config = Some(config.clone());
    report.timings_ms = timer.finish();
    Ok((report, db, config))
}

pub fn cmd_mine_classical(args: &ExperimentArgs) -> Result<Report, CliError> {
    Ok(experiment("mine-classical", args, &[classical_method], &["classical"])?.0)
}

pub fn cmd_mine_sampling(args: &ExperimentArgs) -> Result<Report, CliError> {
    Ok(experiment("mine-sampling", args, &[sampling_method], &["sampling"])?.0)
}

pub fn cmd_mine_quantum(args: &ExperimentArgs) -> Result<Report, CliError> {
    Ok(experiment("mine-quantum", args, &[quantum_method], &["quantum"])?.0)
}

fn itemset_keys(m: &MethodReport) -> Vec<Itemset> {
    let mut v: Vec<Itemset> = m.itemsets.iter().map(|i| i.items.clone()).collect();
    v.sort();
    v
}

/// True when every itemset the level-wise search can reach lies at least
/// [`AGREEMENT_MARGIN`] grid steps from the threshold.
fn well_separated(db: &TransactionDb, config: &ExperimentConfig, classical: &MethodReport) -> crate::Result<bool> {
    let min = config.min_supp.value();
    let mut candidates = crate::classical::initial_candidates(db);
    let mut k = 1;
    while !candidates.is_empty() && k <= max_k(config) {
        for c in &candidates {
            let s = exact_support(db, c)?.value();
            if grid_steps_from_threshold(s, min, config.grid) < AGREEMENT_MARGIN {
                return Ok(false);
            }
        }
        let frequent: Vec<Itemset> =
            classical.itemsets.iter().filter(|i| i.items.len() == k).map(|i| i.items.clone()).collect();
        candidates = crate::classical::cand_gen(&frequent);
        k += 1;
    }
    Ok(true)
}

pub fn cmd_compare(args: &ExperimentArgs) -> Result<Report, CliError> {
    let (mut report, db, config) = experiment(
        "compare",
        args,
        &[classical_method, sampling_method, quantum_method],
        &["classical", "sampling", "quantum"],
    )?;
    let classical = report.methods[0].clone();
    let want = itemset_keys(&classical);
    let separated = well_separated(&db, &config, &classical)?;
    for other in &report.methods[1..] {
        let agree = itemset_keys(other) == want;
        let name = format!("{}-agrees-with-classical", other.method);
        if other.method == "quantum" && separated {
            report.checks.push(Check::new(
                name,
                agree,
                format!("all supports at least {AGREEMENT_MARGIN} grid steps from the threshold; agreement required"),
            ));
        } else {
            let detail = if agree { "agree" } else { "differ" };
            let check = Check {
                name,
                status: if agree { CheckStatus::Pass } else { CheckStatus::Skipped },
                detail: format!("{detail}; informational only"),
            };
            report.checks.push(check);
        }
    }
    Ok(report)
}

fn appendix_path(args: &AppendixArgs, name: &str, file: &str) -> Option<PathBuf> {
    let explicit = match name {
        "retail" => args.retail.clone(),
        _ => args.kosarak.clone(),
    };
    explicit.or_else(|| args.data_dir.as_ref().map(|d| d.join(file)))
}

fn check_dataset(report: &mut Report, name: &str, path: &Path, timer: &mut Timer) -> Result<(), CliError> {
    let db = timer.run(&format!("load-{name}"), || load_fimi(path)).map_err(Error::from)?;
    for (ds, pct, table, gamma_want) in published::CASES {
        if ds != name {
            continue;
        }
        let min = Ratio::new(pct, 100).map_err(Error::from)?;
        let mut counter = QueryCounter::new();
        let res = timer.run(&format!("{name}-{pct}pct"), || apriori_up_to(&db, &min, usize::MAX, &mut counter))?;
        let label = format!("{name}-{pct}pct");
        let table_ok = res.stats.as_slice() == table;
        let render = |s: &[IterationStats]| {
            s.iter()
                .map(|s| format!("({},{})", s.m_candidates, s.m_frequent))
                .collect::<Vec<_>>()
                .join(" ")
        };
        report.checks.push(Check::new(
            format!("{label}-table"),
            table_ok,
            format!("got {} want {}", render(&res.stats), render(table)),
        ));
        let gamma = gamma_metric(&res.stats, false).unwrap_or(f64::NAN);
        report.checks.push(Check::new(
            format!("{label}-gamma"),
            (gamma - gamma_want).abs() <= 0.01,
            format!("got {gamma:.4} want {gamma_want}"),
        ));
        report.methods.push(MethodReport {
            method: label,
            gamma: gamma_of(&res.stats),
            stats: res.stats,
            itemsets: Vec::new(),
            rules: None,
            counters: counter,
            shots_used: None,
            samples_per_support: None,
        });
    }
    Ok(())
}

pub fn cmd_reproduce_appendix(args: &AppendixArgs) -> Result<Report, CliError> {
    let mut report = Report::new("reproduce-appendix");
    let mut timer = Timer {
        enabled: args.out.timings,
        times: BTreeMap::new(),
    };
    for (name, file) in DATASET_FILES {
        match appendix_path(args, name, file) {
            Some(p) if p.is_file() => check_dataset(&mut report, name, &p, &mut timer)?,
            other => {
                let why = match other {
                    Some(p) => format!("{} not found", p.display()),
                    None => format!("no path given (use --{name} or --data-dir)"),
                };
                report.checks.push(Check::skipped(format!("{name}-tables"), why));
            }
        }
    }
    report.timings_ms = timer.finish();
    Ok(report)
}

pub fn datasets_help() -> String {
    let mut s = String::from("Place these files in a directory and pass --data-dir (or set QARM_DATA_DIR):\n");
    for (name, file) in DATASET_FILES {
        let _ = writeln!(s, "  {name:<8} {file:<12} {DATASET_URL_BASE}{file}");
    }
    s.push_str("No download is attempted.\n");
    s
}

fn emit(report: &Report, out: &OutputArgs) -> Result<(), CliError> {
    let text = report.render(out.format);
    match &out.output {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| usage(e.to_string()))
        }
    }
}

/// Runs a parsed command and returns the exit code.
pub fn execute(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::MineClassical(a) => cmd_mine_classical(a).map(|r| (r, a.out.clone())),
        Command::MineSampling(a) => cmd_mine_sampling(a).map(|r| (r, a.out.clone())),
        Command::MineQuantum(a) => cmd_mine_quantum(a).map(|r| (r, a.out.clone())),
        Command::Compare(a) => cmd_compare(a).map(|r| (r, a.out.clone())),
        Command::ReproduceAppendix(a) => cmd_reproduce_appendix(a).map(|r| (r, a.out.clone())),
        Command::Datasets => {
            print!("{}", datasets_help());
            return 0;
        }
    };
    match result.and_then(|(report, out)| emit(&report, &out).map(|_| report)) {
        Ok(report) if report.failed() => {
            eprintln!("qarm: one or more checks failed");
            1
        }
        Ok(_) => 0,
        Err(e) => {
            eprintln!("qarm: {}", e.message);
            e.code
        }
    }
}

/// Parses arguments and runs; usage errors exit with 2.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
