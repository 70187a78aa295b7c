//! Repeated stratified evaluation: split, scale, project, classify, score.
//!
//! Run `i` uses seed `seed_base + i` for its split (and for the SVM's visiting
//! order), so runs are independent and can execute in any order. The spread
//! reported is the population standard deviation of the per-run accuracies.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    accuracy, check_finite, encode_labels, knn_predict, select_rows, stratified_split, to_matrix, LearnError,
    LogRegModel, LogRegParams, PcaModel, ScalerModel, SvmModel, SvmParams,
};
use crate::features::FeatureMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Logreg,
    Knn,
    Svm,
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "logreg" => Ok(Self::Logreg),
            "knn" => Ok(Self::Knn),
            "svm" => Ok(Self::Svm),
            other => Err(format!("unknown model {other:?} (expected logreg, knn or svm)")),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Logreg => "logreg",
            Self::Knn => "knn",
            Self::Svm => "svm",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Protocol {
    pub model: ModelKind,
    pub runs: usize,
    pub test_fraction: f64,
    pub pca_fraction: f64,
    pub seed_base: u64,
    pub logreg: LogRegParams,
    pub k: usize,
    pub svm: SvmParams,
}

impl Default for Protocol {
    fn default() -> Self {
        Self {
            model: ModelKind::Logreg,
            runs: 100,
            test_fraction: 0.2,
            pca_fraction: 0.99,
            seed_base: 0,
            logreg: LogRegParams::default(),
            k: 1,
            svm: SvmParams::default(),
        }
    }
}

/// Snapshot of everything that shaped a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub samples: usize,
    pub features: usize,
    pub classes: usize,
    pub test_fraction: f64,
    pub pca_fraction: f64,
    pub seed_base: u64,
    pub pipeline: String,
    pub logreg_c: f64,
    pub logreg_max_iter: usize,
    pub logreg_tol: f64,
    pub knn_k: usize,
    pub svm_c: f64,
    pub svm_epochs: usize,
    pub std_formula: String,
    /// PCA components kept in each run.
    pub retained_components: Vec<usize>,
    /// Seeds whose training fold had zero total variance.
    pub degenerate_pca_seeds: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: ModelKind,
    pub runs: usize,
    pub seeds: Vec<u64>,
    pub accuracies: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub config: EvalConfig,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plot data: header `run,accuracy`, one line per run.
    pub fn write_plot_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "run,accuracy")?;
        for (i, a) in self.accuracies.iter().enumerate() {
            writeln!(out, "{i},{}", crate::features::format_real(*a))?;
        }
        Ok(())
    }
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Scaler and PCA fitted on training rows; nothing else reaches them.
pub fn fit_preprocessing(x_train: &DMatrix<f64>, pca_fraction: f64) -> Result<(ScalerModel, PcaModel), LearnError> {
    let scaler = ScalerModel::fit(x_train)?;
    let pca = PcaModel::fit(&scaler.transform(x_train)?, pca_fraction)?;
    Ok((scaler, pca))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub seed: u64,
    pub accuracy: f64,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub scaler: ScalerModel,
    pub pca: PcaModel,
}

/// One split-fit-score cycle under `seed`.
pub fn run_once(x: &DMatrix<f64>, labels: &[String], protocol: &Protocol, seed: u64) -> Result<RunOutcome, LearnError> {
    let (train, test) = stratified_split(labels, protocol.test_fraction, seed)?;
    let x_train = select_rows(x, &train);
    let x_test = select_rows(x, &test);
    let y_train: Vec<String> = train.iter().map(|&i| labels[i].clone()).collect();
    let y_test: Vec<String> = test.iter().map(|&i| labels[i].clone()).collect();

    let (scaler, pca) = fit_preprocessing(&x_train, protocol.pca_fraction)?;
    let z_train = pca.transform(&scaler.transform(&x_train)?)?;
    let z_test = pca.transform(&scaler.transform(&x_test)?)?;

    let predicted = match protocol.model {
        ModelKind::Logreg => LogRegModel::fit(&z_train, &y_train, protocol.logreg)?.predict(&z_test)?,
        ModelKind::Knn => knn_predict(&z_train, &y_train, &z_test, protocol.k)?,
        ModelKind::Svm => SvmModel::fit(&z_train, &y_train, SvmParams { seed, ..protocol.svm })?.predict(&z_test)?,
    };
    Ok(RunOutcome { seed, accuracy: accuracy(&predicted, &y_test), train, test, scaler, pca })
}

pub fn evaluate(m: &FeatureMatrix, protocol: &Protocol) -> Result<EvalReport, LearnError> {
    evaluate_rows(&to_matrix(&m.rows())?, &m.labels, protocol)
}

pub fn evaluate_rows(x: &DMatrix<f64>, labels: &[String], protocol: &Protocol) -> Result<EvalReport, LearnError> {
    if x.nrows() == 0 {
        return Err(LearnError::Empty);
    }
    if labels.len() != x.nrows() {
        return Err(LearnError::LabelMismatch { labels: labels.len(), rows: x.nrows() });
    }
    if protocol.runs == 0 {
        return Err(LearnError::OutOfRange { what: "run count", range: "[1, inf)", value: 0.0 });
    }
    check_finite(x)?;
    let (classes, idx) = encode_labels(labels);
    if classes.len() < 2 {
        return Err(LearnError::SingleClass(classes.len()));
    }
    for (c, name) in classes.iter().enumerate() {
        let count = idx.iter().filter(|&&i| i == c).count();
        if count < 2 {
            return Err(LearnError::ClassTooSmall { label: name.clone(), count });
        }
    }

    let seeds: Vec<u64> = (0..protocol.runs as u64).map(|i| protocol.seed_base.wrapping_add(i)).collect();
    // collected in seed order so the reported failure is the first one, whatever the scheduling
    let results: Vec<Result<RunOutcome, LearnError>> =
        seeds.par_iter().map(|&seed| run_once(x, labels, protocol, seed)).collect();
    let mut outcomes = Vec::with_capacity(results.len());
    for (r, &seed) in results.into_iter().zip(&seeds) {
        outcomes.push(r.map_err(|e| LearnError::RunFailed { seed, source: Box::new(e) })?);
    }

    let accuracies: Vec<f64> = outcomes.iter().map(|o| o.accuracy).collect();
    let (mean, std) = mean_std(&accuracies);
    let config = EvalConfig {
        samples: x.nrows(),
        features: x.ncols(),
        classes: classes.len(),
        test_fraction: protocol.test_fraction,
        pca_fraction: protocol.pca_fraction,
        seed_base: protocol.seed_base,
        pipeline: "minmax -> pca -> classifier (fit on training fold only)".to_string(),
        logreg_c: protocol.logreg.c,
        logreg_max_iter: protocol.logreg.max_iter,
        logreg_tol: protocol.logreg.tol,
        knn_k: protocol.k,
        svm_c: protocol.svm.c,
        svm_epochs: protocol.svm.epochs,
        std_formula: "population: sqrt(sum((a - mean)^2) / runs)".to_string(),
        retained_components: outcomes.iter().map(|o| o.pca.k).collect(),
        degenerate_pca_seeds: outcomes.iter().filter(|o| o.pca.degenerate).map(|o| o.seed).collect(),
    };
    Ok(EvalReport { model: protocol.model, runs: protocol.runs, seeds, accuracies, mean, std, config })
}
