//! `hda`: generate synthetic sets, score them with the detectors and
//! frameworks, evaluate scores against labels and plot the results.

mod io;
mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hda_core::datagen::{generate, GenSpec, SetName};
use hda_core::eval::{evaluate, LabeledScores};
use hda_core::ipp::Provenance;
use hda_core::{
    hmdh, ipp, run_detector, Algorithm, DetectorSpec, Discretization, HmdhConfig, IppConfig, Qfb,
    Scope, ScoreVector, WeightCorrection,
};

/// Failures split by exit code: bad invocations exit 2, everything else 1.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

#[derive(Parser)]
#[command(name = "hda", version, about = "High-density anomaly detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled synthetic set and its planting manifest.
    Generate(GenerateArgs),
    /// Score a dataset; writes `id,score,provenance`.
    Detect(DetectArgs),
    /// Evaluate scores against labels; writes a JSON report.
    Evaluate(EvaluateArgs),
    /// Draw a 2-D scatter plot with the top-scored cases enlarged.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// gleuf, noisyhelix, multiset4d or multiset5d.
    #[arg(long)]
    set: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fraction of the full case count, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Output CSV; the manifest goes next to it as `<stem>.manifest.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    KnnAgg,
    Qsp,
    Lof,
    Secoda,
    Ipp,
    Hmdh,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Underlying {
    KnnAgg,
    Qsp,
    Lof,
    Secoda,
}

impl From<Underlying> for Algorithm {
    fn from(u: Underlying) -> Self {
        match u {
            Underlying::KnnAgg => Algorithm::KnnAgg,
            Underlying::Qsp => Algorithm::Qsp,
            Underlying::Lof => Algorithm::Lof,
            Underlying::Secoda => Algorithm::Secoda,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Weight {
    None,
    Sse,
    Sden,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Binning {
    Equiwidth,
    Equidepth,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScopeArg {
    Full,
    Continuous,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    /// Detector inside ipp/hmdh (default secoda).
    #[arg(long, value_enum)]
    underlying: Option<Underlying>,
    /// QuantileDenominator for ipp (default 100).
    #[arg(long)]
    qd: Option<usize>,
    /// QuantileFilterBoost for ipp: `auto` or a value >= 0.
    #[arg(long)]
    qfb: Option<String>,
    /// Weight correction for hmdh (default none).
    #[arg(long, value_enum)]
    weight: Option<Weight>,
    #[arg(long, value_enum)]
    discretization: Option<Binning>,
    /// QSP sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    min_pts: Option<usize>,
    #[arg(long)]
    sample_size: Option<usize>,
    /// Attributes seen by a standalone detector.
    #[arg(long, value_enum, default_value = "full")]
    scope: ScopeArg,
    /// Label column excluded from the features when present.
    #[arg(long, default_value = "hda")]
    label_column: String,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Scores CSV (`id,score[,provenance]`).
    #[arg(long)]
    scores: PathBuf,
    /// Dataset CSV holding the label column.
    #[arg(long, conflicts_with = "manifest", required_unless_present = "manifest")]
    data: Option<PathBuf>,
    /// Planting manifest written by `generate`.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, default_value = "hda")]
    label_column: String,
    /// JSON report path; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    scores: PathBuf,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    /// Number of lowest-scored cases drawn enlarged.
    #[arg(long, default_value_t = 40)]
    top: usize,
    /// Categorical column that colors the points (default: the first one).
    #[arg(long)]
    class: Option<String>,
    #[arg(long, default_value = "hda")]
    label_column: String,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Detect(a) => cmd_detect(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Plot(a) => cmd_plot(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn manifest_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("data");
    csv.with_file_name(format!("{stem}.manifest.json"))
}

fn cmd_generate(a: GenerateArgs) -> Result<(), Failure> {
    let set: SetName = match a.set.parse() {
        Ok(s) => s,
        Err(_) => {
            return usage(format!(
                "unknown set `{}` (expected gleuf, noisyhelix, multiset4d or multiset5d)",
                a.set
            ))
        }
    };
    if !(a.scale > 0.0 && a.scale <= 1.0) {
        return usage(format!("--scale must be in (0, 1], got {}", a.scale));
    }
    let gs = generate(&GenSpec::new(set, a.seed, a.scale)).context("generating data")?;
    let file = std::fs::File::create(&a.out)
        .with_context(|| format!("cannot write {}", a.out.display()))?;
    hda_core::write_dataset(&gs.dataset, &gs.manifest.label_column, std::io::BufWriter::new(file))
        .context("writing CSV")?;
    let mpath = manifest_path(&a.out);
    let json = serde_json::to_string_pretty(&gs.manifest).context("serializing manifest")?;
    std::fs::write(&mpath, json + "\n")
        .with_context(|| format!("cannot write {}", mpath.display()))?;
    println!(
        "n={} hdas={} csv={} manifest={}",
        gs.dataset.n_cases(),
        gs.manifest.plantings.len(),
        a.out.display(),
        mpath.display()
    );
    Ok(())
}

/// Resolves the detector flags, rejecting flags the chosen algorithm ignores.
fn detector_spec(a: &DetectArgs) -> Result<DetectorSpec, Failure> {
    let framework = matches!(a.algo, Algo::Ipp | Algo::Hmdh);
    if a.weight.is_some() && a.algo != Algo::Hmdh {
        return usage("--weight only applies to --algo hmdh");
    }
    if (a.qd.is_some() || a.qfb.is_some()) && a.algo != Algo::Ipp {
        return usage("--qd and --qfb only apply to --algo ipp");
    }
    if a.underlying.is_some() && !framework {
        return usage("--underlying only applies to --algo ipp or hmdh");
    }
    if framework && a.scope != ScopeArg::Full {
        return usage("--scope only applies to standalone detectors");
    }
    let algorithm: Algorithm = match a.algo {
        Algo::KnnAgg => Algorithm::KnnAgg,
        Algo::Qsp => Algorithm::Qsp,
        Algo::Lof => Algorithm::Lof,
        Algo::Secoda => Algorithm::Secoda,
        Algo::Ipp | Algo::Hmdh => a.underlying.unwrap_or(Underlying::Secoda).into(),
    };
    let needs = |flag: bool, alg: Algorithm, name: &str| -> Result<(), Failure> {
        if flag && algorithm != alg {
            return usage(format!("{name} only applies when the detector is {alg}"));
        }
        Ok(())
    };
    needs(a.discretization.is_some(), Algorithm::Secoda, "--discretization")?;
    needs(a.k_min.is_some() || a.k_max.is_some(), Algorithm::KnnAgg, "--k-min/--k-max")?;
    needs(a.min_pts.is_some(), Algorithm::Lof, "--min-pts")?;
    needs(a.seed.is_some() || a.sample_size.is_some(), Algorithm::Qsp, "--seed/--sample-size")?;

    let mut spec = DetectorSpec::new(algorithm);
    if let Some(d) = a.discretization {
        spec.discretization = match d {
            Binning::Equiwidth => Discretization::EquiWidth,
            Binning::Equidepth => Discretization::EquiDepth,
        };
    }
    spec.k_min = a.k_min.unwrap_or(spec.k_min);
    spec.k_max = a.k_max.unwrap_or(spec.k_max);
    spec.min_pts = a.min_pts.unwrap_or(spec.min_pts);
    spec.sample_size = a.sample_size.or(spec.sample_size);
    spec.seed = a.seed.unwrap_or(spec.seed);
    Ok(spec)
}

fn parse_qfb(raw: Option<&str>) -> Result<Qfb, Failure> {
    match raw {
        None => Ok(Qfb::Auto),
        Some(s) if s.eq_ignore_ascii_case("auto") => Ok(Qfb::Auto),
        Some(s) => match s.parse::<f64>() {
            Ok(v) if v >= 0.0 && v.is_finite() => Ok(Qfb::Fixed(v)),
            _ => usage(format!("--qfb must be `auto` or a finite value >= 0, got `{s}`")),
        },
    }
}

fn cmd_detect(a: DetectArgs) -> Result<(), Failure> {
    let spec = detector_spec(&a)?;
    let qfb = parse_qfb(a.qfb.as_deref())?;
    if a.qd.is_some_and(|q| q < 2) {
        return usage("--qd must be at least 2");
    }
    let ds = io::load_features(&a.input, &a.label_column)?;
    let (scores, provenance): (ScoreVector, Vec<String>) = match a.algo {
        Algo::Ipp => {
            let mut cfg = IppConfig::new(spec);
            cfg.qd = a.qd.unwrap_or(cfg.qd);
            cfg.qfb = qfb;
            let r = ipp(&ds, &cfg).context("running IPP")?;
            eprintln!("qfb={}", r.qfb);
            let prov = r
                .provenance
                .iter()
                .map(|p| match p {
                    Provenance::Iteration { .. } => "iteration".to_string(),
                    Provenance::IsolatedFallback => "isolated_fallback".to_string(),
                })
                .collect();
            (r.scores, prov)
        }
        Algo::Hmdh => {
            let mode = match a.weight.unwrap_or(Weight::None) {
                Weight::None => WeightCorrection::None,
                Weight::Sse => WeightCorrection::Sse,
                Weight::Sden => WeightCorrection::Sden,
            };
            let cfg = HmdhConfig {
                weight_mode: mode,
                underlying: spec,
            };
            let r = hmdh(&ds, &cfg).context("running HMDH")?;
            eprintln!("weight={}", r.weight);
            let n = r.scores.len();
            (r.scores, vec![format!("hmdh-{mode}"); n])
        }
        _ => {
            let scope = match a.scope {
                ScopeArg::Full => Scope::Full,
                ScopeArg::Continuous => Scope::Continuous,
            };
            let name = spec.algorithm.to_string();
            let r = run_detector(&spec, &ds, scope).context("running detector")?;
            let n = r.scores.len();
            (r.scores, vec![name; n])
        }
    };
    io::write_scores(&a.out, &scores, &provenance)?;
    println!("scored {} cases -> {}", scores.len(), a.out.display());
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<(), Failure> {
    let scores = io::read_scores(&a.scores)?;
    let labels = match (&a.data, &a.manifest) {
        (Some(d), _) => io::labels_from_data(d, &a.label_column)?,
        (None, Some(m)) => io::labels_from_manifest(m)?,
        (None, None) => return usage("one of --data or --manifest is required"),
    };
    if labels.len() != scores.len() {
        return usage(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        ));
    }
    let ls = LabeledScores::new(scores, labels).context("pairing scores with labels")?;
    if ls.positives() == 0 || ls.negatives() == 0 {
        eprintln!("warning: labels contain a single class; AUC fields are null");
    }
    let report = evaluate(&ls);
    let json = serde_json::to_string_pretty(&report.to_json()).context("serializing report")?;
    match &a.out {
        Some(path) => {
            std::fs::write(path, json + "\n")
                .with_context(|| format!("cannot write {}", path.display()))?;
            let m = &report.topk.metrics;
            println!(
                "top-{} sensitivity={:.4} precision={:.4} roc_auc={}",
                report.positives,
                m.sensitivity,
                m.precision,
                report
                    .roc_auc
                    .map_or("null".to_string(), |v| format!("{v:.4}"))
            );
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn cmd_plot(a: PlotArgs) -> Result<(), Failure> {
    let ds = io::load_features(&a.data, &a.label_column)?;
    let scores = io::read_scores(&a.scores)?;
    if scores.len() != ds.n_cases() {
        return usage(format!(
            "{} scores for {} cases",
            scores.len(),
            ds.n_cases()
        ));
    }
    let numeric = |name: &str| -> Result<Vec<f64>, Failure> {
        match ds.column(name).and_then(|c| c.as_numeric()) {
            Some(v) => Ok(v.to_vec()),
            None => usage(format!("`{name}` is not a numeric column of {}", a.data.display())),
        }
    };
    let (xs, ys) = (numeric(&a.x)?, numeric(&a.y)?);
    let class_col = match &a.class {
        Some(name) => match ds.column(name) {
            Some(c) if c.as_numeric().is_none() => Some(c),
            _ => return usage(format!("`{name}` is not a categorical column")),
        },
        None => ds.categorical_columns().next(),
    };
    let classes: Vec<String> = (0..ds.n_cases())
        .map(|g| class_col.map_or(String::new(), |c| c.cell(g)))
        .collect();
    let top = a.top.min(ds.n_cases());
    let svg = plot::scatter(&plot::Scatter {
        x_name: &a.x,
        y_name: &a.y,
        xs: &xs,
        ys: &ys,
        classes: &classes,
        highlighted: &scores.order()[..top],
    });
    std::fs::write(&a.out, svg).with_context(|| format!("cannot write {}", a.out.display()))?;
    println!("plotted {} cases ({top} enlarged) -> {}", ds.n_cases(), a.out.display());
    Ok(())
}
