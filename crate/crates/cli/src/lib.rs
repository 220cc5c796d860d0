//! Command-line orchestration of the normalization debt pipeline.
//!
//! Every subcommand loads the snapshot named by `--manifest`, runs the stages
//! it needs (reusing a cached full analysis when one matches), prints a short
//! human summary and writes machine-readable files under `--out`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use normdebt_core::debtmetrics::{measure, DEFAULT_RDI_K_MAX};
use normdebt_core::depminer::{holds_fd, mine_rules, DEFAULT_MAX_LHS, DEFAULT_TAU};
use normdebt_core::export;
use normdebt_core::keydisc::{find_candidate_keys, DEFAULT_MAX_KEY_ARITY};
use normdebt_core::matrix::emit_matrix_svg;
use normdebt_core::nfclassifier::{classify, ClassifyOptions, DependencyHints, NormalFormAssessment};
use normdebt_core::pipeline::{analyze_table, assemble, AnalysisConfig, AnalysisReport, TableAnalysis};
use normdebt_core::principal::{CostParameters, DEFAULT_DECOMPOSITIONS};
use normdebt_core::prioritizer::View;
use normdebt_core::snapshot::{load_snapshot, DatabaseSnapshot, TableSnapshot};
use normdebt_core::{AnalysisError, Error, SnapshotError};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

#[derive(Debug, Parser)]
#[command(name = "normdebt", version, about = "Identify and prioritize database normalization debt")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Snapshot manifest (JSON).
    #[arg(long, global = true, default_value = "manifest.json")]
    pub manifest: PathBuf,
    /// Output directory for report files.
    #[arg(long, global = true, default_value = "normdebt-out")]
    pub out: PathBuf,
    /// Minimum confidence for accepting a dependency.
    #[arg(long, global = true, default_value_t = DEFAULT_TAU)]
    pub tau: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_KEY_ARITY)]
    pub max_key_arity: usize,
    /// Largest determinant size tested during classification.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_LHS)]
    pub max_lhs: usize,
    /// Largest attribute subset enumerated for the inconsistency risk.
    #[arg(long, global = true, default_value_t = DEFAULT_RDI_K_MAX)]
    pub k_max: usize,
    /// Hourly labor cost.
    #[arg(long, global = true, default_value_t = 51.38)]
    pub wage: f64,
    #[arg(long, global = true, default_value_t = 7.5)]
    pub minutes_per_task: f64,
    /// Decompositions assumed by the rough task estimate.
    #[arg(long, global = true, default_value_t = DEFAULT_DECOMPOSITIONS)]
    pub decompositions: u64,
    /// Tables analyzed concurrently.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Output formats, comma separated.
    #[arg(long, global = true, value_delimiter = ',', default_value = "csv,json,svg")]
    pub format: Vec<Format>,
    /// Per-table dependency hints (JSON).
    #[arg(long, global = true)]
    pub hints: Option<PathBuf>,
    /// Ignore and do not write the stage cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every stage and write the full report.
    Analyze,
    /// Candidate keys per table.
    Keys {
        #[arg(long)]
        table: Option<String>,
    },
    /// Verify one functional dependency.
    Fds {
        #[arg(long)]
        table: String,
        /// Determinant columns, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        lhs: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        rhs: Vec<String>,
        /// Also list the mined association rules between the two sides.
        #[arg(long)]
        rules: bool,
    },
    /// Current normal form per table.
    Nf {
        #[arg(long)]
        table: Option<String>,
    },
    /// Inconsistency risk, complexity weight and size per table.
    Metrics {
        #[arg(long)]
        table: Option<String>,
    },
    /// Refactoring cost of each debt table.
    Principal,
    /// Ranks, decisions and normalization options.
    Prioritize {
        /// Restrict the printed decisions to one view.
        #[arg(long)]
        view: Option<View>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Analysis(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Analysis(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Analysis(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<SnapshotError> for CliError {
    fn from(e: SnapshotError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::InvalidParameter(_) => CliError::Validation(e.to_string()),
            _ => CliError::Analysis(e.to_string()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Snapshot(e) => e.into(),
            Error::Analysis(e) => e.into(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

struct Context {
    global: GlobalArgs,
    snapshot: DatabaseSnapshot,
    config: AnalysisConfig,
    pool: rayon::ThreadPool,
}

impl Context {
    fn new(global: GlobalArgs) -> CliResult<Self> {
        if global.jobs == 0 {
            return Err(CliError::Validation("--jobs must be at least 1".into()));
        }
        let hints = match &global.hints {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Validation(format!("cannot read hints {}: {e}", path.display())))?;
                Some(
                    DependencyHints::from_json(&text)
                        .map_err(|e| CliError::Validation(format!("malformed hints {}: {e}", path.display())))?,
                )
            }
            None => None,
        };
        let config = AnalysisConfig {
            tau: global.tau,
            max_key_arity: global.max_key_arity,
            max_lhs: global.max_lhs,
            k_max: global.k_max,
            cost: CostParameters::new(global.wage, global.minutes_per_task)?,
            decompositions: global.decompositions,
            hints,
            ..Default::default()
        };
        config.validate()?;
        let snapshot = load_snapshot(&global.manifest)?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(global.jobs)
            .build()
            .map_err(|e| CliError::Internal(format!("cannot start worker pool: {e}")))?;
        Ok(Context {
            global,
            snapshot,
            config,
            pool,
        })
    }

    fn header(&self) -> String {
        format!("normdebt manifest={} {}", self.global.manifest.display(), self.config.echo())
    }

    fn wants(&self, f: Format) -> bool {
        self.global.format.contains(&f)
    }

    fn selected(&self, table: Option<&str>) -> CliResult<Vec<&TableSnapshot>> {
        match table {
            Some(name) => Ok(vec![self.table(name)?]),
            None => Ok(self.snapshot.tables().iter().collect()),
        }
    }

    fn table(&self, name: &str) -> CliResult<&TableSnapshot> {
        self.snapshot
            .table(name)
            .ok_or_else(|| CliError::Validation(format!("no table named `{name}` in the snapshot")))
    }

    /// Applies `f` to each table on the worker pool; results keep input order.
    fn per_table<T: Send>(
        &self,
        tables: &[&TableSnapshot],
        f: impl Fn(&TableSnapshot) -> Result<T, Error> + Sync,
    ) -> CliResult<Vec<T>> {
        self.pool
            .install(|| tables.par_iter().map(|t| f(t)).collect::<Result<Vec<T>, Error>>())
            .map_err(CliError::from)
    }

    fn cache_path(&self) -> PathBuf {
        let mut h = Sha256::new();
        h.update(self.snapshot.to_json().as_bytes());
        h.update(serde_json::to_vec(&self.config).expect("config is serializable"));
        let digest = hex::encode(h.finalize());
        self.global.out.join(".cache").join(format!("analysis-{}.json", &digest[..16]))
    }

    fn cached(&self) -> Option<Vec<TableAnalysis>> {
        if self.global.no_cache {
            return None;
        }
        let text = fs::read_to_string(self.cache_path()).ok()?;
        serde_json::from_str(&text).ok()
    }

    fn full_analysis(&self) -> CliResult<Vec<TableAnalysis>> {
        if let Some(hit) = self.cached() {
            return Ok(hit);
        }
        let tables: Vec<&TableSnapshot> = self.snapshot.tables().iter().collect();
        let analyses = self.per_table(&tables, |t| analyze_table(t, &self.config))?;
        if !self.global.no_cache {
            let json = serde_json::to_string(&analyses).expect("analyses are serializable");
            write_file(&self.cache_path(), &json)?;
        }
        Ok(analyses)
    }

    fn report(&self) -> CliResult<AnalysisReport> {
        let analyses = self.full_analysis()?;
        Ok(assemble(&self.snapshot, &self.config, analyses)?)
    }

    fn assessments(&self, tables: &[&TableSnapshot]) -> CliResult<Vec<NormalFormAssessment>> {
        if let Some(hit) = self.cached() {
            return Ok(pick(hit, tables, |a| a.assessment));
        }
        self.per_table(tables, |t| {
            let keys = find_candidate_keys(t, self.config.max_key_arity);
            let hints = match &self.config.hints {
                Some(h) => h.resolve(t)?,
                None => None,
            };
            let options = ClassifyOptions {
                tau: self.config.tau,
                max_lhs: self.config.max_lhs,
                one_nf: self.config.one_nf.clone(),
                hints,
            };
            Ok(classify(t, &keys, &options))
        })
    }

    fn write(&self, name: &str, contents: &str) -> CliResult<()> {
        write_file(&self.global.out.join(name), contents)
    }
}

fn pick<T>(analyses: Vec<TableAnalysis>, tables: &[&TableSnapshot], f: impl Fn(TableAnalysis) -> T) -> Vec<T> {
    let mut by_name: std::collections::BTreeMap<String, TableAnalysis> =
        analyses.into_iter().map(|a| (a.table.clone(), a)).collect();
    tables.iter().filter_map(|t| by_name.remove(t.name())).map(f).collect()
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    let io = |e: std::io::Error| CliError::Internal(format!("cannot write {}: {e}", path.display()));
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, contents).map_err(io)
}

/// `1.0`, `0.5`, `0.95`: at least one decimal, at most six, no trailing zeros.
pub fn format_confidence(c: f64) -> String {
    let s = format!("{c:.6}");
    let s = s.trim_end_matches('0');
    if s.ends_with('.') {
        format!("{s}0")
    } else {
        s.to_string()
    }
}

fn parse_columns(table: &TableSnapshot, names: &[String]) -> CliResult<normdebt_core::snapshot::AttributeSet> {
    let names: Vec<&str> = names.iter().map(|s| s.trim()).collect();
    Ok(table.attrs(&names)?)
}

fn svg_with_header(header: &str, svg: &str) -> String {
    format!("<!-- {} -->\n{svg}", header.replace("--", "- -"))
}

/// Runs one invocation, writing human output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    let ctx = Context::new(cli.global)?;
    let mut text = String::new();
    match cli.command {
        Command::Analyze => cmd_analyze(&ctx, &mut text)?,
        Command::Keys { table } => cmd_keys(&ctx, table.as_deref(), &mut text)?,
        Command::Fds { table, lhs, rhs, rules } => cmd_fds(&ctx, &table, &lhs, &rhs, rules, &mut text)?,
        Command::Nf { table } => cmd_nf(&ctx, table.as_deref(), &mut text)?,
        Command::Metrics { table } => cmd_metrics(&ctx, table.as_deref(), &mut text)?,
        Command::Principal => cmd_principal(&ctx, &mut text)?,
        Command::Prioritize { view } => cmd_prioritize(&ctx, view, &mut text)?,
    }
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Internal(format!("cannot write output: {e}")))
}

fn write_report_files(ctx: &Context, report: &AnalysisReport) -> CliResult<()> {
    let header = ctx.header();
    let h = Some(header.as_str());
    if ctx.wants(Format::Csv) {
        ctx.write("report.csv", &export::report_csv(&report.priority, h))?;
        ctx.write("options.csv", &export::options_csv(&report.priority, h))?;
    }
    if ctx.wants(Format::Json) {
        ctx.write("report.json", &export::report_json(report))?;
    }
    if ctx.wants(Format::Svg) && !report.priority.rows.is_empty() {
        let records: Vec<_> = report.priority.records().cloned().collect();
        for view in View::ALL {
            let svg = emit_matrix_svg(view, &records)?;
            ctx.write(&format!("matrix-{}.svg", view.slug()), &svg_with_header(&header, &svg))?;
        }
    }
    Ok(())
}

fn cmd_analyze(ctx: &Context, text: &mut String) -> CliResult<()> {
    let report = ctx.report()?;
    let header = ctx.header();
    let h = Some(header.as_str());
    if ctx.wants(Format::Csv) {
        let keys: Vec<_> = report.tables.iter().map(|t| t.keys.clone()).collect();
        ctx.write("keys.csv", &export::keys_csv(&ctx.snapshot, &keys, h))?;
        ctx.write("assessments.csv", &export::assessments_csv(&report.assessments(), h))?;
        ctx.write("metrics.csv", &export::metrics_csv(&report.metrics(), h))?;
        ctx.write("principal.csv", &export::principal_csv(&report.principals(), h))?;
    }
    write_report_files(ctx, &report)?;
    let _ = writeln!(
        text,
        "{} tables, {} debt items",
        ctx.snapshot.tables().len(),
        report.debt.debt.len()
    );
    if !report.debt.insufficient_data.is_empty() {
        let _ = writeln!(text, "insufficient data: {}", report.debt.insufficient_data.join(", "));
    }
    Ok(())
}

fn cmd_keys(ctx: &Context, table: Option<&str>, text: &mut String) -> CliResult<()> {
    let tables = ctx.selected(table)?;
    let keys = match ctx.cached() {
        Some(hit) => pick(hit, &tables, |a| a.keys),
        None => ctx.per_table(&tables, |t| Ok(find_candidate_keys(t, ctx.config.max_key_arity)))?,
    };
    for (t, ks) in tables.iter().zip(&keys) {
        let rendered: Vec<String> = ks.keys.iter().map(|k| format!("{{{}}}", t.names(k))).collect();
        let shown = if rendered.is_empty() {
            format!("none up to arity {}", ks.max_arity_searched)
        } else {
            rendered.join(" ")
        };
        let _ = writeln!(text, "{}: {shown}", t.name());
    }
    if ctx.wants(Format::Csv) {
        ctx.write("keys.csv", &export::keys_csv(&ctx.snapshot, &keys, Some(&ctx.header())))?;
    }
    Ok(())
}

fn cmd_fds(
    ctx: &Context,
    table: &str,
    lhs: &[String],
    rhs: &[String],
    rules: bool,
    text: &mut String,
) -> CliResult<()> {
    let t = ctx.table(table)?;
    let lhs = parse_columns(t, lhs)?;
    let rhs = parse_columns(t, rhs)?;
    let fd = holds_fd(t, &lhs, &rhs, ctx.config.tau)?;
    let verdict = if fd.is_approximate() {
        "holds (approximate)"
    } else if fd.holds {
        "holds"
    } else {
        "fails"
    };
    let mut line = format!(
        "{}: {} → {}: {verdict}, confidence {}",
        t.name(),
        t.names(&lhs),
        t.names(&rhs),
        format_confidence(fd.min_confidence_observed)
    );
    if let Some((a, b)) = fd.witness {
        let _ = write!(line, ", witness rows {a}/{b}");
    }
    let _ = writeln!(text, "{line}");

    if rules && t.row_count() > 0 {
        let columns = lhs.union(&rhs);
        let mined = mine_rules(t, &columns, 1.0 / t.row_count() as f64, columns.len())?;
        let selected: Vec<_> = mined
            .into_iter()
            .filter(|r| {
                let cols = |items: &[normdebt_core::depminer::Item]| {
                    normdebt_core::snapshot::AttributeSet::new(items.iter().map(|i| i.column))
                };
                cols(&r.antecedent) == lhs && cols(&r.consequent) == rhs.difference(&lhs)
            })
            .collect();
        for r in &selected {
            let (a, c) = r.render(t);
            let mark = if r.confidence < 1.0 { "  <- below 1" } else { "" };
            let _ = writeln!(
                text,
                "  {a} ⇒ {c}  support {:.6}  confidence {:.6}{mark}",
                r.support, r.confidence
            );
        }
        if ctx.wants(Format::Csv) {
            ctx.write(
                &format!("rules-{}.csv", t.name()),
                &export::rules_csv(t, &selected, Some(&ctx.header())),
            )?;
        }
    }
    Ok(())
}

/// `Address: BCNF (violating MVD City →→ StateID)`.
pub fn nf_line(a: &NormalFormAssessment) -> String {
    let mut line = format!("{}: {}", a.table, a.level);
    if let Some(v) = &a.violation {
        let _ = write!(line, " (violating {})", v.description);
    }
    if a.insufficient_data {
        line.push_str(" (insufficient data)");
    }
    if a.approximate && a.violation.is_some() {
        line.push_str(" [approximate]");
    }
    line
}

fn cmd_nf(ctx: &Context, table: Option<&str>, text: &mut String) -> CliResult<()> {
    let tables = ctx.selected(table)?;
    let assessments = ctx.assessments(&tables)?;
    for a in &assessments {
        let _ = writeln!(text, "{}", nf_line(a));
        for w in &a.warnings {
            let _ = writeln!(text, "  warning: {w}");
        }
    }
    if ctx.wants(Format::Csv) {
        ctx.write("assessments.csv", &export::assessments_csv(&assessments, Some(&ctx.header())))?;
    }
    Ok(())
}

fn cmd_metrics(ctx: &Context, table: Option<&str>, text: &mut String) -> CliResult<()> {
    let tables = ctx.selected(table)?;
    let metrics = match ctx.cached() {
        Some(hit) => pick(hit, &tables, |a| a.metrics).into_iter().flatten().collect(),
        None => ctx
            .per_table(&tables, |t| {
                if t.row_count() == 0 && t.overrides().rdi.is_none() {
                    return Ok(None);
                }
                let keys = find_candidate_keys(t, ctx.config.max_key_arity);
                Ok(Some(measure(t, &keys, ctx.config.k_max)?))
            })?
            .into_iter()
            .flatten()
            .collect::<Vec<_>>(),
    };
    for m in &metrics {
        let exact = if m.rdi_exact {
            String::new()
        } else {
            format!(" (subsets up to {} columns)", m.rdi_k_max)
        };
        let _ = writeln!(
            text,
            "{}: rdi {:.6}{exact}, weight {}, size {:.3} MB",
            m.table, m.rdi, m.complexity_weight, m.size_mb
        );
    }
    if ctx.wants(Format::Csv) {
        ctx.write("metrics.csv", &export::metrics_csv(&metrics, Some(&ctx.header())))?;
    }
    Ok(())
}

fn cmd_principal(ctx: &Context, text: &mut String) -> CliResult<()> {
    let analyses = ctx.full_analysis()?;
    let principals: Vec<_> = analyses.iter().filter_map(|a| a.principal.clone()).collect();
    for p in &principals {
        let _ = writeln!(
            text,
            "{}: {} tasks × {} = {} {}",
            p.table, p.task_count, p.per_task_cost, p.total_cost, ctx.config.cost.currency_code
        );
    }
    if ctx.wants(Format::Csv) {
        ctx.write("principal.csv", &export::principal_csv(&principals, Some(&ctx.header())))?;
    }
    Ok(())
}

fn cmd_prioritize(ctx: &Context, view: Option<View>, text: &mut String) -> CliResult<()> {
    let report = ctx.report()?;
    let views: Vec<View> = match view {
        Some(v) => vec![v],
        None => View::ALL.to_vec(),
    };
    for row in &report.priority.rows {
        let r = &row.ranks;
        let decisions: Vec<String> = views
            .iter()
            .map(|v| format!("{} {}", v.slug(), row.decisions[v].label()))
            .collect();
        let _ = writeln!(
            text,
            "{}: {} cost rank {}, rdi {} tc {} tz {} (sum {}, overall {}); {}",
            r.table,
            row.principal,
            r.cost_rank,
            r.rdi_rank,
            r.tc_rank,
            r.tz_rank,
            r.impact_sum,
            r.impact_rank,
            decisions.join(", ")
        );
    }
    for o in report.priority.options.iter().filter(|o| views.contains(&o.view)) {
        let _ = writeln!(
            text,
            "{} ({}): {} table(s), {} [{}]",
            o.label,
            o.view.slug(),
            o.tables.len(),
            o.total_cost,
            o.tables.join(", ")
        );
    }
    let c = &report.priority.conventional;
    let _ = writeln!(text, "Conventional: {} table(s), {}", c.tables.len(), c.total_cost);
    for f in &report.priority.footnotes {
        let _ = writeln!(text, "note: {f}");
    }
    write_report_files(ctx, &report)
}

/// Parses `args`, runs, and maps the outcome to a process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match run(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}
