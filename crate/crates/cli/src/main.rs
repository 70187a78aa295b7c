//! `digitop`: Betti numbers of binary images, grid topological features,
//! classifier evaluation, synthetic datasets and the oracle self-check.
//!
//! Exit codes: 0 success, 1 input or configuration error, 2 internal
//! inconsistency (a homology consistency check or the oracle suite failed).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use digitop::check::{run_check, CheckConfig};
use digitop::features::{
    build_feature_matrix, read_feature_csv, write_feature_csv, FeatureOptions, DEFAULT_LABEL_PATTERN,
};
use digitop::homology::{betti_numbers, snf_check, HomologyError};
use digitop::img::{binarize, load_image, Binarize, GridSpec, ImageFormat};
use digitop::learn::{evaluate, LogRegParams, ModelKind, Protocol, SvmParams};
use digitop::synth::{generate_dataset, SynthConfig};

#[derive(Parser)]
#[command(name = "digitop", version, about = "Digital simplicial homology features for binary images")]
struct Cli {
    /// Worker threads for per-file and per-run parallelism (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Pgm,
    Csv01,
}

#[derive(Subcommand)]
enum Command {
    /// Print beta0, beta1, chi and simplex counts of one image.
    Betti {
        image: PathBuf,
        #[arg(long, default_value = "otsu")]
        binarize: Binarize,
        /// Input format; inferred from the extension when omitted.
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Also verify torsion-freeness with a Smith normal form.
        #[arg(long)]
        snf: bool,
    },
    /// Extract grid features for every matching image in a directory.
    Features {
        dir: PathBuf,
        #[arg(long, default_value = "6x54")]
        grid: GridSpec,
        #[arg(long, default_value = DEFAULT_LABEL_PATTERN)]
        pattern: String,
        #[arg(long, default_value = "otsu")]
        binarize: Binarize,
        #[arg(long, default_value = "features.csv")]
        out: PathBuf,
        /// Append the per-cell Euler characteristic as extra columns.
        #[arg(long)]
        euler: bool,
    },
    /// Repeated stratified evaluation of a feature CSV.
    Evaluate {
        features: PathBuf,
        #[arg(long, default_value = "logreg")]
        model: ModelKind,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        /// Seed of the first run; run i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "pca-var", default_value_t = 0.99)]
        pca_var: f64,
        /// Regularization constant of the chosen model (logreg default 10, svm default 1).
        #[arg(long = "C")]
        c: Option<f64>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long = "test-fraction", default_value_t = 0.2)]
        test_fraction: f64,
        #[arg(long = "svm-epochs", default_value_t = 50)]
        svm_epochs: usize,
        /// JSON report path; the per-run CSV goes next to it as `<stem>_runs.csv`.
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
    },
    /// Write a labelled synthetic dataset of PGM images.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        subjects: usize,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 48)]
        height: usize,
        #[arg(long, default_value_t = 482)]
        width: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0.03)]
        flip: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cross-check the homology pipeline against independent oracles on random images.
    Check {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long = "max-size", default_value_t = 12)]
        max_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: cannot configure {jobs} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Betti { image, binarize, format, snf } => cmd_betti(&image, binarize, format, snf),
        Command::Features { dir, grid, pattern, binarize, out, euler } => {
            cmd_features(&dir, grid, &pattern, FeatureOptions { binarize, with_euler: euler }, &out)
        }
        Command::Evaluate { features, model, runs, seed, pca_var, c, k, test_fraction, svm_epochs, out } => {
            let mut protocol = Protocol {
                model,
                runs,
                test_fraction,
                pca_fraction: pca_var,
                seed_base: seed,
                k,
                svm: SvmParams { epochs: svm_epochs, ..SvmParams::default() },
                ..Protocol::default()
            };
            if let Some(c) = c {
                match model {
                    ModelKind::Logreg => protocol.logreg = LogRegParams { c, ..protocol.logreg },
                    ModelKind::Svm => protocol.svm.c = c,
                    ModelKind::Knn => eprintln!("warning: --C has no effect on knn"),
                }
            }
            cmd_evaluate(&features, &protocol, &out)
        }
        Command::Synth { out, subjects, samples, height, width, density, flip, seed } => {
            let cfg = SynthConfig {
                n_subjects: subjects,
                samples_per_subject: samples,
                height,
                width,
                base_density: density,
                flip_prob: flip,
                seed,
            };
            cmd_synth(&cfg, &out)
        }
        Command::Check { trials, max_size, seed } => cmd_check(&CheckConfig { trials, max_size, seed }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}

/// The error chain on one line. Library errors already embed their cause in
/// their message, so causes that are already spelled out are skipped.
fn describe(e: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in e.chain() {
        let part = cause.to_string();
        if msg.contains(&part) {
            continue;
        }
        if !msg.is_empty() {
            msg.push_str(": ");
        }
        msg.push_str(&part);
    }
    msg
}

fn exit_code(e: &anyhow::Error) -> u8 {
    let inconsistent = e.chain().any(|cause| {
        matches!(cause.downcast_ref::<HomologyError>(), Some(HomologyError::Inconsistent { .. }))
            || matches!(
                cause.downcast_ref::<digitop::features::FeatureError>(),
                Some(digitop::features::FeatureError::HomologyIn { source: HomologyError::Inconsistent { .. }, .. })
            )
    });
    if inconsistent {
        2
    } else {
        1
    }
}

fn cmd_betti(path: &Path, method: Binarize, format: Option<Format>, snf: bool) -> Result<ExitCode> {
    let format = match format {
        Some(Format::Pgm) => ImageFormat::Pgm,
        Some(Format::Csv01) => ImageFormat::Csv01,
        None => ImageFormat::from_path(path)
            .with_context(|| format!("{}: unknown extension, pass --format pgm|csv01", path.display()))?,
    };
    let gray = load_image(path, format).with_context(|| format!("reading {}", path.display()))?;
    let img = binarize(&gray, method);
    let profile = betti_numbers(&img)?;
    if snf {
        let report = snf_check(&img)?;
        println!("{profile} torsion_free={}", report.torsion_free());
    } else {
        println!("{profile}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_features(dir: &Path, grid: GridSpec, pattern: &str, opts: FeatureOptions, out: &Path) -> Result<ExitCode> {
    let (matrix, warnings) = build_feature_matrix(dir, grid, pattern, opts)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    write_feature_csv(&matrix, out)?;
    println!("N={} G={} warnings={}", matrix.len(), grid.cells(), warnings.len());
    println!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}

/// `report.json` -> `report_runs.csv`, in the same directory.
fn plot_path(report: &Path) -> PathBuf {
    let stem = report.file_stem().map_or_else(|| "report".into(), |s| s.to_string_lossy().into_owned());
    report.with_file_name(format!("{stem}_runs.csv"))
}

fn cmd_evaluate(features: &Path, protocol: &Protocol, out: &Path) -> Result<ExitCode> {
    let matrix = read_feature_csv(features).with_context(|| format!("reading {}", features.display()))?;
    let report = evaluate(&matrix, protocol)?;
    if !report.config.degenerate_pca_seeds.is_empty() {
        eprintln!("warning: {} run(s) had a zero-variance training fold", report.config.degenerate_pca_seeds.len());
    }
    fs::write(out, report.to_json() + "\n").with_context(|| format!("writing {}", out.display()))?;
    let plot = plot_path(out);
    let file = fs::File::create(&plot).with_context(|| format!("writing {}", plot.display()))?;
    report.write_plot_csv(std::io::BufWriter::new(file))?;
    println!("{}: {:.4} ± {:.4} over {} runs", report.model, report.mean, report.std, report.runs);
    println!("report {}", out.display());
    println!("runs {}", plot.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_synth(cfg: &SynthConfig, out: &Path) -> Result<ExitCode> {
    let paths = generate_dataset(cfg, out)?;
    println!("wrote {} images to {}", paths.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(cfg: &CheckConfig) -> Result<ExitCode> {
    if cfg.max_size == 0 {
        bail!("--max-size must be at least 1");
    }
    if cfg.trials == 0 {
        eprintln!("warning: zero trials; nothing was checked");
    }
    let report = run_check(cfg);
    for f in &report.failures {
        eprintln!("FAIL {f}");
    }
    println!("{}/{} consistent", report.passed, report.trials);
    println!(
        "rank comparisons {} (skipped {}), beta1 vs 4-connected holes mismatches {}",
        report.rank_comparisons,
        report.rank_skipped,
        report.duality_mismatches.len()
    );
    Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}
