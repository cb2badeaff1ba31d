use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qa_archetypes::cluster::SelectConfig;
use qa_archetypes::features::{write_feature_csv, SeriesKind};
use qa_archetypes::ingest::{derive_window, parse_event_csv, parse_stackexchange_dump, Month, Parsed};
use qa_archetypes::pipeline::{analyze, feature_table, Analysis, AnalysisConfig, EvolutionConfig};
use qa_archetypes::report::{write_scatter_svg, InstanceReport, ModelExport};
use qa_archetypes::series::Granularity;
use qa_archetypes::synth::{generate_instance, MixtureSpec};
use qa_archetypes::{Error, Scalar};

const EXIT_DATA: u8 = 2;
const EXIT_UNCLASSIFIED: u8 = 3;

#[derive(Parser)]
#[command(name = "qa-archetypes", version, about = "Activity archetypes and maturity of Q&A communities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a community from Stack Exchange dump files or an event CSV.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic event log with ground-truth archetype labels.
    Synth(SynthArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Posts.xml, Comments.xml or user_id,timestamp,kind CSV files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
    k_min: u64,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    k_max: u64,
    #[arg(long, default_value_t = 5)]
    peak_threshold: usize,
    #[arg(long, default_value_t = 0.9)]
    sustainable_threshold: f64,
    /// Last observed month (YYYY-MM); later events are ignored.
    #[arg(long, value_name = "YYYY-MM")]
    cutoff_month: Option<Month>,
    /// Reclassify every 6-month prefix of the first three years.
    #[arg(long)]
    evolution: bool,
    #[arg(long, default_value_t = 6, requires = "evolution")]
    evolution_step: usize,
    #[arg(long, default_value_t = 36, requires = "evolution")]
    evolution_horizon: usize,
    /// Also score uniformly random labelings for comparison.
    #[arg(long)]
    baseline: bool,
    #[arg(long, value_enum, default_value_t = Kind::Answers)]
    cluster_on: Kind,
    #[arg(long, value_enum, default_value_t = Bucket::Month)]
    granularity: Bucket,
    #[arg(long, value_enum, default_value_t = Precision::F64)]
    precision: Precision,
    #[arg(long, value_name = "CSV")]
    export_features: Option<PathBuf>,
    #[arg(long, value_name = "SVG")]
    export_scatter: Option<PathBuf>,
    #[arg(long, value_name = "JSON")]
    export_model: Option<PathBuf>,
    #[arg(long, value_name = "CSV")]
    export_series: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Questions,
    Answers,
}

#[derive(Clone, Copy, ValueEnum)]
enum Bucket {
    Month,
    Quarter,
    Year,
}

#[derive(Clone, Copy, ValueEnum)]
enum Precision {
    F32,
    F64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Typical,
    Staged,
}

#[derive(Args)]
struct SynthArgs {
    /// TOML mixture spec; the typical 1,000-user mixture when absent.
    #[arg(long, conflicts_with = "preset")]
    spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Overrides the seed of the spec or preset.
    #[arg(long)]
    seed: Option<u64>,
    /// Event CSV path; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Ground-truth CSV; defaults to `<out>.labels.csv` next to the events.
    #[arg(long)]
    labels: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: EXIT_DATA, message: e.to_string() }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure { code: EXIT_DATA, message: format!("{}: {e}", path.display()) }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| io_failure(path, e))
}

fn read_input(path: &Path) -> Result<Parsed, Failure> {
    let file = File::open(path).map_err(|e| io_failure(path, e))?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let parsed = if is_csv { parse_event_csv(file) } else { parse_stackexchange_dump(BufReader::new(file)) };
    parsed.map_err(|e| Failure { code: EXIT_DATA, message: format!("{}: {e}", path.display()) })
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(|e| io_failure(p, e))
        }
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| io_failure(Path::new("<stdout>"), e)),
    }
}

fn run_analyze(args: AnalyzeArgs) -> Result<u8, Failure> {
    if args.k_min > args.k_max {
        return Err(Failure { code: EXIT_DATA, message: "--k-min must not exceed --k-max".into() });
    }
    let mut events = Vec::new();
    for path in &args.inputs {
        let parsed = read_input(path)?;
        if parsed.skips.skipped() > 0 {
            let s = &parsed.skips;
            eprintln!(
                "{}: skipped {} rows ({} without user, {} other post types, {} bad timestamps, {} bad lines)",
                path.display(),
                s.skipped(),
                s.missing_user,
                s.other_post_type,
                s.bad_timestamp,
                s.bad_line
            );
        }
        events.extend(parsed.events);
    }
    let window = derive_window(&events, args.cutoff_month)?;
    let config = AnalysisConfig {
        granularity: match args.granularity {
            Bucket::Month => Granularity::Month,
            Bucket::Quarter => Granularity::Quarter,
            Bucket::Year => Granularity::Year,
        },
        cluster_on: match args.cluster_on {
            Kind::Questions => SeriesKind::Questions,
            Kind::Answers => SeriesKind::Answers,
        },
        peak_threshold: args.peak_threshold,
        select: SelectConfig {
            k_min: args.k_min as usize,
            k_max: args.k_max as usize,
            ..SelectConfig::with_seed(args.seed)
        },
        sustainable_threshold: args.sustainable_threshold,
        projection: true,
        baseline: args.baseline,
        evolution: args
            .evolution
            .then_some(EvolutionConfig { step: args.evolution_step, horizon: args.evolution_horizon }),
    };
    match args.precision {
        Precision::F64 => finish(&analyze::<f64>(&events, &window, &config)?, &args),
        Precision::F32 => finish(&analyze::<f32>(&events, &window, &config)?, &args),
    }
}

fn finish<T: Scalar>(analysis: &Analysis<T>, args: &AnalyzeArgs) -> Result<u8, Failure> {
    for w in &analysis.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(path) = &args.export_features {
        let rows = feature_table::<T>(&analysis.series, args.peak_threshold);
        write_feature_csv(&rows, create(path)?)?;
    }
    if let Some(path) = &args.export_series {
        analysis.series.write_long_csv(create(path)?)?;
    }
    if let Some(path) = &args.export_model {
        write_output(Some(path), &ModelExport::from_analysis(analysis).to_json())?;
    }
    if let Some(path) = &args.export_scatter {
        let projection = analysis.projection.as_ref().ok_or_else(|| Failure {
            code: EXIT_DATA,
            message: "scatter export needs at least two users".into(),
        })?;
        let points: Vec<[f64; 2]> = projection.coordinates.rows().map(|r| [r[0].as_f64(), r[1].as_f64()]).collect();
        let labels = &analysis.clustered.labels;
        let names: Vec<_> = analysis.clustered.selection.model.labels.iter().map(|&c| labels.of(c)).collect();
        write_scatter_svg(&points, &names, create(path)?)?;
    }
    let report = InstanceReport::from_analysis(analysis);
    write_output(args.out.as_deref(), &report.to_json())?;
    match &report.classification_error {
        Some(msg) => {
            eprintln!("instance not classified: {msg}");
            Ok(EXIT_UNCLASSIFIED)
        }
        None => Ok(0),
    }
}

fn run_synth(args: SynthArgs) -> Result<u8, Failure> {
    let mut spec = match (&args.spec, args.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
            MixtureSpec::from_toml(&text)?
        }
        (None, Some(Preset::Staged)) => MixtureSpec::staged(42),
        (None, _) => MixtureSpec::default(),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let instance = generate_instance(&spec)?;
    let events = instance.events.iter();
    match &args.out {
        Some(path) => qa_archetypes::ingest::write_event_csv(events, create(path)?)?,
        None => qa_archetypes::ingest::write_event_csv(events, io::stdout().lock())?,
    }
    let labels = args.labels.clone().or_else(|| {
        args.out.as_ref().map(|out| {
            let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            out.with_file_name(format!("{stem}.labels.csv"))
        })
    });
    if let Some(path) = labels {
        instance.write_labels_csv(create(&path)?)?;
    }
    eprintln!("{} users, {} events over {} months", spec.user_count(), instance.events.len(), spec.months);
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Synth(args) => run_synth(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
