//! The `octoscore` command line.
//!
//! Exit codes: 0 success, 2 user or input error, 3 internal error.

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::analytics::{advise, compare_to_truth, suggest_scale, AdviseThresholds, GroundTruth, RunReport};
use crate::error::{Error, Result};
use crate::evaluate::{parse_site_list, EvalOptions, Evaluator, SiteSpec, DEFAULT_PARALLELISM};
use crate::ingest::{is_url, FetchConfig};
use crate::model::{Dimension, Experiment, ScaleVector};
use crate::service::{self, ServiceConfig};
use crate::store::{resolve_data_dir, Store, DATA_ENV};

#[derive(Debug, Parser)]
#[command(name = "octoscore", version, about = "Quantitative 8C heuristic evaluation of e-commerce home pages")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Data directory for experiments, runs and reports
    #[arg(long, global = true, env = DATA_ENV)]
    pub data_dir: Option<PathBuf>,
    /// Fetch timeout in seconds
    #[arg(long, global = true, default_value_t = 20.0)]
    pub timeout: f64,
    /// Maximum concurrent page acquisitions
    #[arg(long, global = true, default_value_t = DEFAULT_PARALLELISM)]
    pub parallelism: usize,
    /// Never touch the network; only local files are evaluated
    #[arg(long, global = true)]
    pub offline: bool,
    /// Mean relation share of a dimension above which the relation dominates
    #[arg(long, global = true, default_value_t = 0.6)]
    pub relation_threshold: f64,
    /// Dimension share of the total above which the dimension dominates
    #[arg(long, global = true, default_value_t = 0.25)]
    pub dimension_threshold: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score one page (URL or HTML file) and store the run
    Evaluate {
        experiment: String,
        locator: String,
        /// Site name to record instead of the locator
        #[arg(long)]
        site: Option<String>,
    },
    /// Score every page in a site list and export report CSVs
    Batch {
        experiment: String,
        list: PathBuf,
        /// Conversion-rate CSV (`site,cr,category`) to rank against
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Compare a run's score order against conversion-rate order
    Compare { run: String, truth: PathBuf },
    /// Apply the mapping-revision guideline to a run
    Advise { run: String },
    /// List stored runs, newest first
    Runs {
        #[arg(long)]
        experiment: Option<String>,
    },
    /// Manage experiments
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Run the HTTP service
    Serve {
        #[arg(long, default_value = service::DEFAULT_LISTEN)]
        listen: SocketAddr,
        /// TOML file of `[[tokens]]` entries (`token`, `role`)
        #[arg(long)]
        tokens: PathBuf,
        /// Allowed browser origin (default: any)
        #[arg(long)]
        cors_origin: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    List,
    Show { id: String },
    /// Clone an experiment to start the next revision
    Copy {
        from: String,
        to: String,
        #[arg(long)]
        label: Option<String>,
        #[arg(long)]
        post_divisor: Option<f64>,
    },
    /// Replace the scale vector, explicitly or from a run's contributions
    SetScale {
        id: String,
        /// Eight comma-separated multipliers in 8C order
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        #[arg(long)]
        post_divisor: Option<f64>,
        /// Suggest a balancing vector from this run's contributions
        #[arg(long, conflicts_with = "p")]
        from_run: Option<String>,
    },
}

/// Resolved runtime configuration.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub data_dir: PathBuf,
    pub fetch_timeout: Duration,
    pub fetch_parallelism: usize,
    pub offline_mode: bool,
    pub thresholds: AdviseThresholds,
}

impl CliConfig {
    pub fn from_args(args: &GlobalArgs) -> Result<Self> {
        if !(args.timeout.is_finite() && args.timeout > 0.0) {
            return Err(Error::Validation("--timeout must be > 0".into()));
        }
        if args.parallelism == 0 {
            return Err(Error::Validation("--parallelism must be >= 1".into()));
        }
        Ok(CliConfig {
            data_dir: resolve_data_dir(args.data_dir.as_deref()),
            fetch_timeout: Duration::from_secs_f64(args.timeout),
            fetch_parallelism: args.parallelism,
            offline_mode: args.offline,
            thresholds: AdviseThresholds {
                relation_dominance: args.relation_threshold,
                dimension_dominance: args.dimension_threshold,
                ..AdviseThresholds::default()
            },
        })
    }

    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            fetch: FetchConfig {
                timeout: self.fetch_timeout,
                ..FetchConfig::default()
            },
            parallelism: self.fetch_parallelism,
            offline: self.offline_mode,
        }
    }
}

/// Parses `args` and runs the command, writing to `out`/`err`. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn runtime() -> Result<tokio::runtime::Runtime> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Error::Internal(format!("starting runtime: {e}")))
}

fn w(e: std::io::Error) -> Error {
    Error::Internal(format!("writing output: {e}"))
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let config = CliConfig::from_args(&cli.global)?;
    let store = Store::open(&config.data_dir)?;
    match cli.command {
        Command::Evaluate {
            experiment,
            locator,
            site,
        } => cmd_evaluate(&store, &config, &experiment, &locator, site.as_deref(), out),
        Command::Batch {
            experiment,
            list,
            truth,
        } => cmd_batch(&store, &config, &experiment, &list, truth.as_deref(), out),
        Command::Compare { run, truth } => cmd_compare(&store, &config, &run, &truth, out),
        Command::Advise { run } => cmd_advise(&store, &config, &run, out),
        Command::Runs { experiment } => {
            for r in store.list_runs(experiment.as_deref())? {
                writeln!(
                    out,
                    "{}  {}  {}  scored {}  failed {}",
                    r.run_id,
                    r.experiment_id,
                    r.started_at.to_rfc3339(),
                    r.scored,
                    r.failed
                )
                .map_err(w)?;
            }
            Ok(0)
        }
        Command::Experiment(cmd) => cmd_experiment(&store, cmd, out),
        Command::Serve {
            listen,
            tokens,
            cors_origin,
        } => {
            let service_config = ServiceConfig {
                listen,
                tokens: service::load_tokens(&tokens)?,
                cors_origin,
                eval: config.eval_options(),
                thresholds: config.thresholds,
            };
            writeln!(out, "listening on http://{listen}").map_err(w)?;
            runtime()?.block_on(service::serve(store, service_config))?;
            Ok(0)
        }
    }
}

pub fn cmd_evaluate(
    store: &Store,
    config: &CliConfig,
    experiment_id: &str,
    locator: &str,
    site: Option<&str>,
    out: &mut dyn Write,
) -> Result<i32> {
    let experiment = store.load_experiment(experiment_id)?;
    if config.offline_mode && is_url(locator) {
        return Err(Error::Offline(locator.to_string()));
    }
    let spec = match site {
        Some(label) => SiteSpec::labeled(label, locator),
        None => SiteSpec::new(locator),
    };
    let evaluator = Evaluator::new(config.eval_options())?;
    let run = runtime()?.block_on(evaluator.run_batch(&experiment, std::slice::from_ref(&spec)))?;
    if let Some(failure) = run.failures.first() {
        return Err(Error::Validation(format!("{}: {}", failure.site, failure.error)));
    }
    store.save_run(&run)?;
    let score = &run.site_scores[0];

    writeln!(out, "site        {}", score.site).map_err(w)?;
    writeln!(out, "experiment  {}", score.experiment_id).map_err(w)?;
    writeln!(out, "{:<15} {:>9} {:>12}", "dimension", "relations", "subtotal").map_err(w)?;
    for d in &score.dimension_scores {
        writeln!(
            out,
            "{:<15} {:>9} {:>12.4}",
            d.dimension.name(),
            d.relation_scores.len(),
            d.subtotal
        )
        .map_err(w)?;
    }
    writeln!(out, "{:<25} {:>12.4}", "total_raw", score.total_raw).map_err(w)?;
    writeln!(out, "{:<25} {:>12.4}", "total_scaled", score.total_scaled).map_err(w)?;
    writeln!(out, "run         {}", run.run_id).map_err(w)?;
    Ok(0)
}

pub fn cmd_batch(
    store: &Store,
    config: &CliConfig,
    experiment_id: &str,
    list: &std::path::Path,
    truth: Option<&std::path::Path>,
    out: &mut dyn Write,
) -> Result<i32> {
    let experiment = store.load_experiment(experiment_id)?;
    let text = std::fs::read_to_string(list).map_err(|e| Error::io(list, e))?;
    let sites = parse_site_list(&text);
    if sites.is_empty() {
        return Err(Error::Validation(format!("{} lists no sites", list.display())));
    }
    let truth = truth.map(GroundTruth::load).transpose()?;

    let evaluator = Evaluator::new(config.eval_options())?;
    let run = runtime()?.block_on(evaluator.run_batch(&experiment, &sites))?;
    for f in &run.failures {
        writeln!(out, "failed  {}: {}", f.site, f.error).map_err(w)?;
    }
    if run.site_scores.is_empty() {
        store.save_run(&run)?;
        return Err(Error::NoSuccessfulSites);
    }
    let report = RunReport::build(&run.site_scores, &experiment, truth.as_ref(), &config.thresholds)?;
    store.save_run(&run)?;
    let files = store.export_report(&run, &report)?;

    writeln!(
        out,
        "run {}: {} scored, {} failed",
        run.run_id,
        run.site_scores.len(),
        run.failures.len()
    )
    .map_err(w)?;
    if let Some(rd) = &report.rank_diff {
        writeln!(out, "mean |rank diff|  {:.4}", rd.mean_abs_diff).map_err(w)?;
    }
    for f in files {
        writeln!(out, "wrote {}", f.display()).map_err(w)?;
    }
    Ok(0)
}

pub fn cmd_compare(
    store: &Store,
    config: &CliConfig,
    run_id: &str,
    truth: &std::path::Path,
    out: &mut dyn Write,
) -> Result<i32> {
    let run = store.load_run(run_id)?;
    let truth = GroundTruth::load(truth)?;
    let diff = compare_to_truth(&run.site_scores, &truth)?;

    writeln!(out, "{:<32} {:>8} {:>8} {:>6}", "site", "expected", "actual", "|diff|").map_err(w)?;
    for d in &diff.per_site {
        writeln!(
            out,
            "{:<32} {:>8} {:>8} {:>6}",
            d.site, d.expected_rank, d.actual_rank, d.abs_diff
        )
        .map_err(w)?;
    }
    writeln!(out, "mean |rank diff|  {:.4}", diff.mean_abs_diff).map_err(w)?;

    let mut report = match store.load_experiment(&run.experiment_id) {
        Ok(e) => RunReport::build(&run.site_scores, &e, None, &config.thresholds).unwrap_or_default(),
        Err(_) => RunReport::default(),
    };
    report.rank_diff = Some(diff);
    for f in store.export_report(&run, &report)? {
        writeln!(out, "wrote {}", f.display()).map_err(w)?;
    }
    Ok(0)
}

pub fn cmd_advise(store: &Store, config: &CliConfig, run_id: &str, out: &mut dyn Write) -> Result<i32> {
    let run = store.load_run(run_id)?;
    let experiment = store.load_experiment(&run.experiment_id)?;
    let advices = match advise(&run.site_scores, &experiment, &config.thresholds) {
        Ok(a) => a,
        Err(e @ (Error::EmptyRun | Error::ZeroTotal)) => {
            writeln!(out, "no contribution analysis: {e}").map_err(w)?;
            vec![crate::analytics::Advice::RecheckMappings]
        }
        Err(e) => return Err(e),
    };
    for advice in advices {
        writeln!(out, "{advice}").map_err(w)?;
    }
    Ok(0)
}

pub fn cmd_experiment(store: &Store, cmd: ExperimentCommand, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        ExperimentCommand::List => {
            for id in store.list_experiments()? {
                let label = store.load_experiment(&id).map(|e| e.label).unwrap_or_default();
                writeln!(out, "{id}\t{label}").map_err(w)?;
            }
        }
        ExperimentCommand::Show { id } => {
            let e = store.load_experiment(&id)?;
            write!(out, "{}", render_mappings(&e)).map_err(w)?;
        }
        ExperimentCommand::Copy {
            from,
            to,
            label,
            post_divisor,
        } => {
            if store.has_experiment(&to) {
                return Err(Error::ExperimentExists(to));
            }
            let mut next = store.load_experiment(&from)?.derive(&to)?;
            if let Some(label) = label {
                next.label = label;
            }
            if let Some(d) = post_divisor {
                next.scale = ScaleVector::new(next.scale.p, d)?;
            }
            store.save_experiment(&next)?;
            writeln!(out, "created {to} from {from}").map_err(w)?;
        }
        ExperimentCommand::SetScale {
            id,
            p,
            post_divisor,
            from_run,
        } => {
            let mut e = store.load_experiment(&id)?;
            let mut scale = e.scale.clone();
            if let Some(run_id) = from_run {
                let run = store.load_run(&run_id)?;
                let contributions = crate::analytics::contribution_table(&run.site_scores)?;
                scale = suggest_scale(&contributions)?;
            }
            if let Some(p) = p {
                scale.p = p
                    .try_into()
                    .map_err(|_| Error::Validation("--p needs exactly 8 values".into()))?;
            }
            if let Some(d) = post_divisor {
                scale.post_divisor = d;
            }
            scale.validate()?;
            e.scale = scale;
            store.save_experiment(&e)?;
            writeln!(out, "{id}: p = {:?}, post_divisor = {}", e.scale.p, e.scale.post_divisor).map_err(w)?;
        }
    }
    Ok(0)
}

/// Dimension-by-dimension listing of an experiment's relations and weights.
pub fn render_mappings(e: &Experiment) -> String {
    let mut s = format!(
        "{}  {}\nscalar {}  post_divisor {}\n",
        e.id, e.label, e.scalar, e.scale.post_divisor
    );
    for d in Dimension::ALL {
        s.push_str(&format!("\n{} (p = {})\n", d.name(), e.scale.factor(d)));
        for r in e.mapping(d).map(|m| m.relations.as_slice()).unwrap_or_default() {
            let kind = match r.kind {
                crate::model::RelationKind::HtmlTag => "tag",
                crate::model::RelationKind::Keyword => "keyword",
            };
            s.push_str(&format!(
                "  {:<24} {:<8} {:<20} {}\n",
                r.name, kind, r.pattern, r.weight
            ));
        }
    }
    s
}
