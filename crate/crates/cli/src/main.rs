//! `vaspi`: command-line front end for benefits-dependency networks.

mod output;

use std::collections::BTreeMap;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vaspi::assessment::{assess, plan, recommend_next, AdoptionState, PlanTarget};
use vaspi::graph::{layering, trace_benefit, trace_value};
use vaspi::io::{export_dot, export_report, json_document, serialize_model, DotOptions, PlanDocument, ReportFormat};
use vaspi::merge::{add_evidence, match_models, merge_models, AliasTable, EvidenceRecord, MergePolicy};
use vaspi::model::{parse_model_with, validate};
use vaspi::taxonomy::default_taxonomy;
use vaspi::{AssessmentConfig, BdnModel, Diagnostic, PlanMode, SvmPath, SvmTaxonomy};

use output::Stderr;

#[derive(Debug, Parser)]
#[command(name = "vaspi", version, about = "Benefits-dependency networks for value-driven process improvement")]
struct Cli {
    /// Treat warnings as failures.
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a model and print its diagnostics.
    Validate {
        model: PathBuf,
        /// Print diagnostics as JSON on stdout.
        #[arg(long)]
        json: bool,
    },
    /// Print practices grouped by dependency layer.
    Layers { model: PathBuf },
    /// Show the part of the model that delivers a value or a benefit.
    Trace(TraceArgs),
    /// Assess an adoption state.
    Assess {
        model: PathBuf,
        #[arg(long)]
        adoption: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        partial_weight: f64,
        #[arg(long, default_value = "json", value_parser = ["json", "markdown", "md"])]
        format: String,
    },
    /// Order the practices still needed for a benefit or value.
    Plan {
        model: PathBuf,
        #[arg(long)]
        adoption: PathBuf,
        /// Benefit id or SVM path.
        #[arg(long)]
        target: String,
        /// Require every realizer, not just one.
        #[arg(long)]
        full: bool,
    },
    /// Rank the practices that can be adopted next.
    Recommend {
        model: PathBuf,
        #[arg(long)]
        adoption: PathBuf,
        #[arg(short, default_value_t = 5)]
        k: usize,
    },
    /// Match and merge two models into a joint one.
    Merge {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        aliases: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Record observations on realization edges.
    #[command(subcommand)]
    Evidence(EvidenceCommand),
    /// Export to other formats.
    #[command(subcommand)]
    Export(ExportCommand),
    /// Serve the model over HTTP.
    Serve {
        model: PathBuf,
        #[arg(long)]
        adoption: Option<PathBuf>,
        #[arg(long, default_value_t = vaspi_service::DEFAULT_PORT)]
        port: u16,
        /// Allow cross-origin requests.
        #[arg(long)]
        cors: bool,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct TraceSelector {
    #[arg(long)]
    value: Option<String>,
    #[arg(long)]
    benefit: Option<String>,
}

#[derive(Debug, Args)]
struct TraceArgs {
    model: PathBuf,
    #[command(flatten)]
    selector: TraceSelector,
}

#[derive(Debug, Subcommand)]
enum EvidenceCommand {
    Add {
        model: PathBuf,
        #[arg(long)]
        practice: String,
        #[arg(long)]
        benefit: String,
        #[arg(long)]
        case: String,
        #[arg(long, action = clap::ArgAction::Set)]
        observed: bool,
        /// ISO 8601 date or timestamp.
        #[arg(long)]
        date: String,
        #[arg(long)]
        note: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum ExportCommand {
    Dot {
        model: PathBuf,
        #[arg(long)]
        adoption: Option<PathBuf>,
        #[arg(long)]
        svm_clusters: bool,
    },
}

/// A failed command: code 1 for model or domain errors, 2 for I/O.
enum Failure {
    Domain(Vec<Diagnostic>),
    Io(String),
}

impl From<vaspi::Error> for Failure {
    fn from(err: vaspi::Error) -> Self {
        match err {
            vaspi::Error::InvalidModel(diags) => Failure::Domain(diags),
            other => Failure::Domain(vec![Diagnostic::new(other.code(), other.to_string(), Vec::<String>::new())]),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CmdResult {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn builtin_taxonomy() -> Result<SvmTaxonomy, Failure> {
    match std::env::var_os("VASPI_TAXONOMY") {
        Some(path) if !path.is_empty() => Ok(SvmTaxonomy::from_document(&read(Path::new(&path))?)?),
        _ => Ok(default_taxonomy()),
    }
}

/// Parses a model; diagnostics are returned alongside so `validate` can
/// report warnings on an otherwise usable model.
fn load_model_with_diagnostics(path: &Path) -> Result<(Option<BdnModel>, Vec<Diagnostic>), Failure> {
    let text = read(path)?;
    let builtin = builtin_taxonomy()?;
    match parse_model_with(&text, &builtin) {
        Ok(model) => {
            let diags = validate(&model);
            Ok((Some(model), diags))
        }
        Err(diags) => Ok((None, diags)),
    }
}

fn load_model(path: &Path, err: &mut Stderr) -> Result<BdnModel, Failure> {
    let (model, diags) = load_model_with_diagnostics(path)?;
    match model {
        Some(model) if !diags.iter().any(Diagnostic::is_error) => {
            err.diagnostics(diags.iter().filter(|d| d.is_warning()));
            Ok(model)
        }
        _ => Err(Failure::Domain(diags.into_iter().filter(Diagnostic::is_error).collect())),
    }
}

fn load_adoption(path: &Path, model: &BdnModel) -> Result<AdoptionState, Failure> {
    let state = AdoptionState::from_json(&read(path)?)?;
    state.check_against(model)?;
    Ok(state)
}

fn print(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

fn run(cli: Cli, err: &mut Stderr) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Validate { model, json } => {
            let (_, diags) = load_model_with_diagnostics(&model)?;
            if json {
                print(&json_document(&diags));
            } else {
                err.diagnostics(diags.iter());
            }
            let failed = diags.iter().any(|d| d.is_error() || (cli.strict && d.is_warning()));
            return Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS });
        }
        Command::Layers { model } => {
            let model = load_model(&model, err)?;
            print(&json_document(&BTreeMap::from([("layers", layering(&model))])));
        }
        Command::Trace(args) => {
            let model = load_model(&args.model, err)?;
            let slice = match (args.selector.value, args.selector.benefit) {
                (Some(value), _) => trace_value(&model, &SvmPath::parse(&value)?)?,
                (None, Some(benefit)) => trace_benefit(&model, &benefit)?,
                (None, None) => unreachable!("clap requires one selector"),
            };
            print(&json_document(&slice));
        }
        Command::Assess { model, adoption, partial_weight, format } => {
            let model = load_model(&model, err)?;
            let adoption = load_adoption(&adoption, &model)?;
            let config = AssessmentConfig::with_partial_weight(partial_weight)?;
            let format: ReportFormat = format.parse()?;
            print(&export_report(&assess(&model, &adoption, &config)?, format));
        }
        Command::Plan { model, adoption, target, full } => {
            let model = load_model(&model, err)?;
            let adoption = load_adoption(&adoption, &model)?;
            let mode = if full { PlanMode::Full } else { PlanMode::Partial };
            let config = AssessmentConfig { plan_target_mode: mode, ..AssessmentConfig::default() };
            let target = PlanTarget::resolve(&model, &target)?;
            let steps = plan(&model, &adoption, &target, &config)?;
            print(&json_document(&PlanDocument { target: target.label(), mode, steps }));
        }
        Command::Recommend { model, adoption, k } => {
            let model = load_model(&model, err)?;
            let adoption = load_adoption(&adoption, &model)?;
            print(&json_document(&recommend_next(&model, &adoption, k)?));
        }
        Command::Merge { left, right, aliases, output } => {
            let left = load_model(&left, err)?;
            let right = load_model(&right, err)?;
            let aliases = match aliases {
                Some(path) => AliasTable::from_json(&read(&path)?)?,
                None => AliasTable::default(),
            };
            let report = match_models(&left, &right, &aliases);
            let joint = merge_models(&left, &right, &report, MergePolicy::UnionGroups)?;
            err.diagnostics(validate(&joint).iter().filter(|d| d.is_warning()));
            write(&output, &serialize_model(&joint))?;
            print(&json_document(&report));
        }
        Command::Evidence(EvidenceCommand::Add { model, practice, benefit, case, observed, date, note, output }) => {
            let model = load_model(&model, err)?;
            let date = normalize_date(&date)?;
            let record = EvidenceRecord { case, observed, date, note };
            write(&output, &serialize_model(&add_evidence(&model, &practice, &benefit, record)?))?;
        }
        Command::Export(ExportCommand::Dot { model, adoption, svm_clusters }) => {
            let model = load_model(&model, err)?;
            let color_by_adoption = adoption.map(|path| load_adoption(&path, &model)).transpose()?;
            print(&export_dot(&model, &DotOptions { include_svm: svm_clusters, color_by_adoption }));
        }
        Command::Serve { model, adoption, port, cors } => {
            let model = load_model(&model, err)?;
            let state = adoption.as_deref().map(|path| load_adoption(path, &model)).transpose()?;
            let options = vaspi_service::ServiceOptions { adoption_path: adoption, cors };
            let app = vaspi_service::AppState::new(model, state, options)?;
            let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, port));
            err.note(&format!("listening on http://{addr}"));
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Io(e.to_string()))?;
            runtime.block_on(vaspi_service::serve(app, addr)).map_err(|e| Failure::Io(format!("{addr}: {e}")))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Accepts `YYYY-MM-DD` or an RFC 3339 timestamp; returns it unchanged.
fn normalize_date(text: &str) -> Result<String, Failure> {
    let ok = chrono::NaiveDate::parse_from_str(text, "%Y-%m-%d").is_ok()
        || chrono::DateTime::parse_from_rfc3339(text).is_ok();
    if ok {
        Ok(text.to_string())
    } else {
        Err(Failure::Domain(vec![Diagnostic::new(
            "E-PARSE",
            format!("--date must be an ISO 8601 date, got {text:?}"),
            Vec::<String>::new(),
        )]))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut err = Stderr::new();
    match run(cli, &mut err) {
        Ok(code) => code,
        Err(Failure::Domain(diags)) => {
            err.diagnostics(diags.iter());
            ExitCode::from(1)
        }
        Err(Failure::Io(message)) => {
            err.note(&format!("error: {message}"));
            ExitCode::from(2)
        }
    }
}
