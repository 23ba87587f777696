use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use morsequiver::chains::FieldTag;
use morsequiver::fixtures::{self, Resolution};
use morsequiver::io::{parse_mesh, write_mesh};
use morsequiver::pipeline::Analysis;
use morsequiver::report::{analyze_report, quiver_dot, spectral_report, LevellingChoice, Report};
use morsequiver::scalarfield::ScalarField;
use morsequiver::spectral::LevellingFunction;
use morsequiver::Error;

const EXIT_PARSE: u8 = 2;
const EXIT_INVARIANT: u8 = 3;
const EXIT_CLASSIFICATION: u8 = 4;
const EXIT_LEVELLING: u8 = 5;

#[derive(Parser)]
#[command(name = "morsequiver", version, about = "Morse theory for PL scalar fields on simplicial complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write a JSON report.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Levelling function for the spectral runs; all built-in ones when omitted.
        #[arg(long)]
        levelling: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the flow quiver in DOT format.
    Quiver {
        #[command(flatten)]
        common: Common,
        /// Resolve strata into connected pieces.
        #[arg(long)]
        refined: bool,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Spectral sequence pages for the sublevel filtration and one levelling.
    Spectral {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "morse")]
        levelling: String,
        /// Show at most this many pages per run.
        #[arg(long)]
        pages: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write an input in MORSEMESH 1 format.
    Export {
        input: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// A mesh file path or `fixture:<name>`.
    input: String,
    #[arg(long, value_enum, default_value_t = FieldArg::F2)]
    field: FieldArg,
    /// Finest neighbourhood level.
    #[arg(long, default_value_t = 1)]
    nmax: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    F2,
    Q,
}

impl From<FieldArg> for FieldTag {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::F2 => FieldTag::F2,
            FieldArg::Q => FieldTag::Rational,
        }
    }
}

/// Failure carrying the process exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::Parse { .. } | Error::Invalid(_)) => EXIT_PARSE,
            Some(Error::NonManifold { .. } | Error::Classification(_)) => EXIT_CLASSIFICATION,
            Some(Error::Levelling { .. }) => EXIT_LEVELLING,
            Some(Error::Invariant(_) | Error::Unsupported(_)) => EXIT_INVARIANT,
            None => 1,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::new(e).into()
    }
}

fn load(input: &str) -> anyhow::Result<ScalarField> {
    if let Some(name) = input.strip_prefix("fixture:") {
        return Ok(fixtures::build(name, Resolution::default())?);
    }
    let text = std::fs::read_to_string(input)
        .map_err(|e| Error::Invalid(format!("cannot read {input}: {e}")))?;
    Ok(parse_mesh(&text).with_context(|| format!("reading {input}"))?.field)
}

fn levelling_choice(arg: &str) -> anyhow::Result<LevellingChoice> {
    Ok(match arg {
        "morse" => LevellingChoice::Morse,
        "index" => LevellingChoice::Index,
        other => {
            let path = other
                .strip_prefix("file:")
                .ok_or_else(|| Error::Invalid(format!("unknown levelling {other:?}; use morse, index or file:<path>")))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Invalid(format!("cannot read {path}: {e}")))?;
            LevellingChoice::Table(LevellingFunction::from_json(&text)?)
        }
    })
}

/// Writes via a temporary file in the target directory and renames it.
fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(out: Option<&Path>, contents: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => write_atomic(p, contents),
        None => {
            std::io::stdout().write_all(contents.as_bytes())?;
            Ok(())
        }
    }
}

fn analysis(common: &Common) -> Result<Analysis, Failure> {
    let sf = load(&common.input)?;
    Ok(Analysis::new(sf, common.field.into(), common.nmax)?)
}

fn finish(report: &Report, out: Option<&Path>) -> Result<(), Failure> {
    emit(out, &report.to_json())?;
    let failed = report.failed();
    if failed.is_empty() {
        return Ok(());
    }
    let names: Vec<String> = failed
        .iter()
        .map(|c| match &c.detail {
            Some(d) => format!("{} ({d})", c.name),
            None => c.name.clone(),
        })
        .collect();
    Err(Failure { code: EXIT_INVARIANT, error: anyhow!("failed checks: {}", names.join(", ")) })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { common, levelling, out } => {
            let choices = match levelling {
                Some(s) => vec![levelling_choice(&s)?],
                None => vec![LevellingChoice::Morse, LevellingChoice::Index],
            };
            let a = analysis(&common)?;
            let report = analyze_report(&a, &choices)?;
            finish(&report, out.as_deref())
        }
        Command::Quiver { common, refined, dot } => {
            if let Some(name) = common.input.strip_prefix("fixture:") {
                if fixtures::QUIVER_NAMES.contains(&name) {
                    let rq = fixtures::build_quiver(name)?;
                    return Ok(emit(dot.as_deref(), &rq.quiver.to_dot(name))?);
                }
            }
            let a = analysis(&common)?;
            Ok(emit(dot.as_deref(), &quiver_dot(&a, refined)?)?)
        }
        Command::Spectral { common, levelling, pages, out } => {
            let choice = levelling_choice(&levelling)?;
            let a = analysis(&common)?;
            let report = spectral_report(&a, &[choice], pages)?;
            finish(&report, out.as_deref())
        }
        Command::Export { input, out } => {
            let sf = load(&input)?;
            Ok(emit(out.as_deref(), &write_mesh(&sf, None))?)
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("MORSEQUIVER_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| anyhow!("MORSEQUIVER_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            return Err(anyhow!("MORSEQUIVER_THREADS must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_PARSE);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
