//! The `inquest` command line: dataset management, MQL execution, scripted
//! or interactive conversations, fixture generation and the chat service.
//!
//! Exit codes: 0 success (including conversations with failed turns),
//! 1 user error, 2 internal error.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use inquest::fixture::{generate, DEFAULT_ROWS};
use inquest::ml::{execute_mql, ExecContext, Execution, ModelStore};
use inquest::mql::{parse_script, render_caret};
use inquest::pipeline::{render_json, render_text, IntentRules, Session, SessionConfig, DEFAULT_SEED};
use inquest::store::{GeometryRef, StoreError};
use inquest::viz::render_ml_result;
use inquest::Registry;
use thiserror::Error;

use crate::agent::{build_agent, AgentKind};
use crate::service::{serve, ServiceConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USER: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;
const SHOWN_ROWS: usize = 20;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    User(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => EXIT_USER,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Io { .. } => CliError::Internal(e.to_string()),
            other => CliError::User(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Internal(format!("{}: {e}", path.display()))
}

type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Parser)]
#[command(name = "inquest", version, about = "Conversational analytics over registered datasets")]
pub struct Cli {
    /// Dataset manifest (created on first `dataset add`).
    #[arg(long, global = true, env = "INQUEST_MANIFEST", default_value = "manifest.json")]
    pub manifest: PathBuf,
    /// Directory for charts, transcripts and generated files.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value = "deterministic")]
    pub agent: AgentKind,
    /// External model endpoint for `--agent llm`.
    #[arg(long, global = true)]
    pub endpoint: Option<String>,
    /// Intent rule file replacing the built-in rules.
    #[arg(long, global = true)]
    pub rules: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Register, list and describe datasets.
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Run MQL statements.
    Mql(MqlArgs),
    /// Hold a conversation, from a script or the console.
    Chat(ChatArgs),
    /// Generate synthetic datasets with ground truth.
    #[command(subcommand)]
    Fixture(FixtureCommand),
    /// Run the HTTP chat service.
    Serve(ServeArgs),
}

#[derive(Debug, Subcommand)]
pub enum DatasetCommand {
    /// Ingest a CSV file and record it in the manifest.
    Add {
        name: String,
        csv: PathBuf,
        #[arg(long)]
        description: String,
        /// GeoJSON regions for map charts.
        #[arg(long, requires = "region_column")]
        geometry: Option<PathBuf>,
        /// Feature property holding the region id.
        #[arg(long, default_value = "name")]
        id_property: String,
        /// Column whose values name the regions.
        #[arg(long)]
        region_column: Option<String>,
    },
    List,
    Describe {
        name: String,
    },
}

#[derive(Debug, Args)]
pub struct MqlArgs {
    /// Statement text (or several, separated by `;`).
    pub statement: Option<String>,
    /// Read statements from a file instead.
    #[arg(long, conflicts_with = "statement")]
    pub file: Option<PathBuf>,
    /// Model store directory (default: `models` beside the manifest).
    #[arg(long)]
    pub models: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChatArgs {
    /// One question per line; blank lines and lines starting with `#` are skipped.
    #[arg(long)]
    pub script: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum FixtureCommand {
    Generate {
        #[arg(long, default_value_t = DEFAULT_ROWS)]
        rows: usize,
        /// Output directory (default: `--out`).
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "INQUEST_PORT", default_value_t = 8080)]
    pub port: u16,
    /// Allowed browser origins (repeatable).
    #[arg(long = "cors-origin", env = "INQUEST_CORS_ORIGINS", value_delimiter = ',')]
    pub cors_origins: Vec<String>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USER } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Dataset(cmd) => dataset(cli, cmd, out),
        Command::Mql(args) => mql(cli, args, out),
        Command::Chat(args) => chat(cli, args, out),
        Command::Fixture(FixtureCommand::Generate { rows, dir }) => {
            let dir = dir.clone().unwrap_or_else(|| cli.out.clone());
            let fx = generate(*rows, cli.seed);
            let paths = fx.write(&dir).map_err(|e| io_err(&dir, e))?;
            w(out, format_args!("wrote {} rows (seed {}) to {}\n", rows, cli.seed, paths.dir.display()))?;
            for p in [&paths.prothomalo, &paths.ngorep, &paths.geometry, &paths.truth, &paths.manifest] {
                w(out, format_args!("  {}\n", p.display()))?;
            }
            Ok(EXIT_OK)
        }
        Command::Serve(args) => {
            let config = ServiceConfig {
                port: args.port,
                manifest: cli.manifest.clone(),
                artifact_dir: cli.out.join("artifacts"),
                model_dir: Some(model_dir(cli, None)),
                cors_origins: args.cors_origins.clone(),
                rules: rules(cli)?,
                endpoint: cli.endpoint.clone(),
            };
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Internal(e.to_string()))?;
            rt.block_on(serve(config)).map_err(|e| CliError::Internal(e.to_string()))?;
            Ok(EXIT_OK)
        }
    }
}

fn w(out: &mut dyn Write, args: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(args).map_err(|e| CliError::Internal(format!("cannot write output: {e}")))
}

fn rules(cli: &Cli) -> Result<Arc<IntentRules>> {
    match &cli.rules {
        Some(p) => IntentRules::from_path(p).map(Arc::new).map_err(|e| CliError::User(e.to_string())),
        None => Ok(Arc::new(IntentRules::builtin())),
    }
}

fn model_dir(cli: &Cli, explicit: Option<&PathBuf>) -> PathBuf {
    explicit.cloned().unwrap_or_else(|| cli.manifest.parent().unwrap_or(Path::new("")).join("models"))
}

fn dataset(cli: &Cli, cmd: &DatasetCommand, out: &mut dyn Write) -> Result<i32> {
    let registry = Registry::open(&cli.manifest)?;
    match cmd {
        DatasetCommand::Add { name, csv, description, geometry, id_property, region_column } => {
            let (d, table) = registry.register_csv(name, csv, description, None)?;
            if let (Some(path), Some(region)) = (geometry, region_column) {
                if table.column_index(region).is_none() {
                    return Err(CliError::User(format!("table {name} has no column `{region}`")));
                }
                let path = std::path::absolute(path).unwrap_or_else(|_| path.clone());
                registry.attach_geometry(
                    &d.name,
                    GeometryRef { path, id_property: id_property.clone(), region_column: region.clone() },
                )?;
            }
            w(out, format_args!("{}: registered ({} rows)\n", d.name, table.row_count()))?;
        }
        DatasetCommand::List => {
            w(out, format_args!("{:<20} {:>8}  description\n", "name", "rows"))?;
            for d in registry.descriptors() {
                let rows = registry.table(&d.name)?.row_count();
                let snippet: String = d.description.chars().take(60).collect();
                let more = if d.description.chars().count() > 60 { "…" } else { "" };
                w(out, format_args!("{:<20} {:>8}  {snippet}{more}\n", d.name, rows))?;
            }
        }
        DatasetCommand::Describe { name } => {
            let d = registry.descriptor(name)?;
            let table = registry.table(name)?;
            w(out, format_args!("name: {}\nrows: {}\ndescription: {}\n", d.name, table.row_count(), d.description))?;
            if let Some(s) = &d.source {
                w(out, format_args!("source: {}\n", s.display()))?;
            }
            if let Some(g) = &d.geometry {
                w(
                    out,
                    format_args!("geometry: {} (id {}, column {})\n", g.path.display(), g.id_property, g.region_column),
                )?;
            }
            w(out, format_args!("columns:\n"))?;
            for c in table.schema() {
                w(out, format_args!("  {} {}\n", c.name, c.kind))?;
            }
            w(out, format_args!("sample:\n{}", table.to_text(5)))?;
        }
    }
    Ok(EXIT_OK)
}

fn mql(cli: &Cli, args: &MqlArgs, out: &mut dyn Write) -> Result<i32> {
    let text = match (&args.statement, &args.file) {
        (Some(s), _) => s.clone(),
        (None, Some(f)) => std::fs::read_to_string(f).map_err(|e| CliError::User(format!("{}: {e}", f.display())))?,
        (None, None) => return Err(CliError::User("give a statement or --file".into())),
    };
    let statements = parse_script(&text).map_err(|e| CliError::User(e.render(&text)))?;
    let registry = Registry::open(&cli.manifest)?;
    let store = ModelStore::new(model_dir(cli, args.models.as_ref()));
    let ctx = ExecContext::new(&registry).with_models(&store).with_seed(cli.seed);
    for (i, stmt) in statements.iter().enumerate() {
        let result =
            execute_mql(stmt, &ctx).map_err(|e| CliError::User(render_caret(&text, e.span, &e.to_string(), None)))?;
        match result {
            Execution::Ml(r) => {
                w(
                    out,
                    format_args!(
                        "{} over {} rows\n{}",
                        r.task.name(),
                        r.table.row_count(),
                        r.summary.to_text(SHOWN_ROWS)
                    ),
                )?;
                w(out, format_args!("{}", r.table.to_text(SHOWN_ROWS)))?;
                for warning in &r.warnings {
                    w(out, format_args!("warning: {warning}\n"))?;
                }
                if stmt.as_generate().is_some_and(|g| g.display) {
                    let chart = render_ml_result(&r, &format!("{} result", r.task.name()))
                        .map_err(|e| CliError::User(e.to_string()))?;
                    std::fs::create_dir_all(&cli.out).map_err(|e| io_err(&cli.out, e))?;
                    let path = cli.out.join(format!("mql-{}-{}.svg", i + 1, chart.kind.name()));
                    std::fs::write(&path, &chart.svg).map_err(|e| io_err(&path, e))?;
                    w(out, format_args!("wrote {}\n", path.display()))?;
                }
            }
            Execution::Model(m) => {
                w(out, format_args!("stored model {}\n{}", m.name, m.metadata_table().to_text(SHOWN_ROWS)))?
            }
            Execution::Table(t) => w(out, format_args!("{}", t.to_text(SHOWN_ROWS)))?,
        }
    }
    Ok(EXIT_OK)
}

fn chat(cli: &Cli, args: &ChatArgs, out: &mut dyn Write) -> Result<i32> {
    let registry = Arc::new(Registry::open(&cli.manifest)?);
    let rules = rules(cli)?;
    let config = SessionConfig {
        seed: cli.seed,
        artifact_dir: cli.out.join("artifacts"),
        model_dir: Some(model_dir(cli, None)),
        rules: rules.clone(),
        ..SessionConfig::default()
    };
    let mut session = Session::new("cli", registry, config);
    session.set_agent(build_agent(cli.agent, cli.endpoint.as_deref(), rules).map_err(CliError::User)?);
    match &args.script {
        Some(path) => {
            let script =
                std::fs::read_to_string(path).map_err(|e| CliError::User(format!("{}: {e}", path.display())))?;
            for q in script.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
                session.run_turn(q);
            }
            let text = render_text(session.history());
            std::fs::create_dir_all(&cli.out).map_err(|e| io_err(&cli.out, e))?;
            let (txt, json) = (cli.out.join("transcript.txt"), cli.out.join("transcript.json"));
            std::fs::write(&txt, &text).map_err(|e| io_err(&txt, e))?;
            std::fs::write(&json, render_json(session.history())).map_err(|e| io_err(&json, e))?;
            w(out, format_args!("{text}"))?;
            w(out, format_args!("transcript: {}\nartifacts: {}\n", txt.display(), session.artifact_dir().display()))?;
        }
        None => {
            let stdin = std::io::stdin();
            w(out, format_args!("Ask a question (empty line or Ctrl-D to quit).\n> "))?;
            out.flush().ok();
            for line in stdin.lock().lines() {
                let q = line.map_err(|e| CliError::Internal(e.to_string()))?;
                if q.trim().is_empty() {
                    break;
                }
                let turn = session.run_turn(q.trim());
                w(out, format_args!("{}\n", turn.explanation))?;
                for a in &turn.artifacts {
                    w(out, format_args!("  chart: {}\n", a.path.display()))?;
                }
                w(out, format_args!("> "))?;
                out.flush().ok();
            }
        }
    }
    Ok(EXIT_OK)
}
