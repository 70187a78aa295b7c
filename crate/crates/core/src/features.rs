//! Grid-partitioned topological feature vectors.
//!
//! An image split into `G` cells yields `3G` values laid out cell by cell in
//! row-major cell order as `(beta0, beta1, beta1/beta0)`. The ratio is 0 for
//! cells without foreground.
//!
//! Feature CSV schema (one header line, then one row per sample):
//!
//! ```text
//! source,label,f0,...,f{3G-1},grid_rows,grid_cols
//! ```
//!
//! With Euler columns enabled, `chi0,...,chi{G-1}` is inserted before
//! `grid_rows`. Reals are written with 17 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use regex::Regex;
use thiserror::Error;

use crate::homology::{betti_numbers, HomologyError, HomologyProfile};
use crate::img::{binarize, load_image, partition_grid, Binarize, BinaryImage, GridSpec, ImageError, ImageFormat};

/// Filename pattern used by the synthetic generator: `<subject>_<sample>.pgm`.
pub const DEFAULT_LABEL_PATTERN: &str = r"^(\d+)_\d+";

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("{file}: {source}")]
    HomologyIn { file: String, source: HomologyError },
    #[error("invalid label pattern: {0}")]
    Pattern(#[from] regex::Error),
    #[error("label pattern {0:?} has no capture group")]
    NoCaptureGroup(String),
    #[error("directory {0} contains no files")]
    EmptyDirectory(PathBuf),
    #[error("no file in {0} matches the label pattern")]
    NoMatches(PathBuf),
    #[error("every matching file failed to load ({0} failures)")]
    AllFailed(usize),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad feature csv header: {0}")]
    Header(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("feature matrix is empty")]
    EmptyMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    /// Optional per-cell Euler characteristics (experimental, off by default).
    pub euler: Option<Vec<f64>>,
}

impl FeatureVector {
    /// Values fed to the learner: the triplets followed by any Euler columns.
    pub fn learning_row(&self) -> Vec<f64> {
        let mut row = self.values.clone();
        if let Some(e) = &self.euler {
            row.extend_from_slice(e);
        }
        row
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub grid: GridSpec,
    pub samples: Vec<FeatureVector>,
    pub labels: Vec<String>,
    pub sources: Vec<String>,
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn has_euler(&self) -> bool {
        self.samples.first().is_some_and(|s| s.euler.is_some())
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.samples.iter().map(FeatureVector::learning_row).collect()
    }
}

pub fn cell_features(profile: &HomologyProfile) -> (f64, f64, f64) {
    let b0 = profile.beta0 as f64;
    let b1 = profile.beta1 as f64;
    let ratio = if profile.beta0 > 0 { b1 / b0 } else { 0.0 };
    (b0, b1, ratio)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FeatureOptions {
    pub binarize: Binarize,
    pub with_euler: bool,
}

pub fn image_feature_vector(img: &BinaryImage, spec: GridSpec) -> Result<FeatureVector, FeatureError> {
    image_feature_vector_with(img, spec, false)
}

pub fn image_feature_vector_with(
    img: &BinaryImage,
    spec: GridSpec,
    with_euler: bool,
) -> Result<FeatureVector, FeatureError> {
    let cells = partition_grid(img, spec)?;
    let mut values = Vec::with_capacity(3 * cells.len());
    let mut euler = with_euler.then(|| Vec::with_capacity(cells.len()));
    for cell in &cells {
        let profile = betti_numbers(cell)?;
        let (b0, b1, ratio) = cell_features(&profile);
        values.extend([b0, b1, ratio]);
        if let Some(e) = euler.as_mut() {
            e.push(profile.chi as f64);
        }
    }
    Ok(FeatureVector { grid: spec, values, euler })
}

/// Loads, binarizes and featurizes one file; the format follows the extension.
pub fn file_feature_vector(path: &Path, spec: GridSpec, opts: FeatureOptions) -> Result<FeatureVector, FeatureError> {
    let format = ImageFormat::from_path(path)
        .ok_or_else(|| ImageError::Header(format!("unsupported file extension: {}", path.display())))?;
    let gray = load_image(path, format)?;
    image_feature_vector_with(&binarize(&gray, opts.binarize), spec, opts.with_euler)
}

/// Compiles a label pattern, requiring at least one capture group; the
/// first group is the label.
pub fn label_regex(pattern: &str) -> Result<Regex, FeatureError> {
    let re = Regex::new(pattern)?;
    if re.captures_len() < 2 {
        return Err(FeatureError::NoCaptureGroup(pattern.to_string()));
    }
    Ok(re)
}

/// Featurizes every file of `dir` whose name matches `label_pattern`.
///
/// Rows are sorted by file name. Non-matching names and unreadable files are
/// skipped and described in the returned warning list; the call fails only
/// when nothing usable remains. A homology inconsistency aborts immediately.
/// Work is spread over the current rayon pool.
pub fn build_feature_matrix(
    dir: &Path,
    spec: GridSpec,
    label_pattern: &str,
    opts: FeatureOptions,
) -> Result<(FeatureMatrix, Vec<String>), FeatureError> {
    let re = label_regex(label_pattern)?;
    let io_err = |source| FeatureError::Io { path: dir.to_path_buf(), source };
    let mut names: Vec<String> = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let entry = entry.map_err(io_err)?;
        if entry.file_type().map_err(io_err)?.is_file() {
            names.push(entry.file_name().to_string_lossy().into_owned());
        }
    }
    if names.is_empty() {
        return Err(FeatureError::EmptyDirectory(dir.to_path_buf()));
    }
    names.sort();

    let mut warnings = Vec::new();
    let mut matched = Vec::new();
    for name in names {
        match re.captures(&name).and_then(|c| c.get(1)) {
            Some(m) if !m.as_str().is_empty() => {
                let label = m.as_str().to_string();
                matched.push((name, label));
            }
            _ => warnings.push(format!("skipped {name}: does not match label pattern")),
        }
    }
    if matched.is_empty() {
        return Err(FeatureError::NoMatches(dir.to_path_buf()));
    }

    let results: Vec<Result<FeatureVector, FeatureError>> =
        matched.par_iter().map(|(name, _)| file_feature_vector(&dir.join(name), spec, opts)).collect();

    let mut matrix = FeatureMatrix { grid: spec, samples: Vec::new(), labels: Vec::new(), sources: Vec::new() };
    let mut failures = 0;
    for ((name, label), result) in matched.into_iter().zip(results) {
        match result {
            Ok(v) => {
                matrix.samples.push(v);
                matrix.labels.push(label);
                matrix.sources.push(name);
            }
            Err(FeatureError::Homology(source)) => return Err(FeatureError::HomologyIn { file: name, source }),
            Err(e) => {
                failures += 1;
                warnings.push(format!("failed {name}: {e}"));
            }
        }
    }
    if matrix.is_empty() {
        return Err(FeatureError::AllFailed(failures));
    }
    Ok((matrix, warnings))
}

/// `%.17g`-style rendering: 17 significant digits, trailing zeros trimmed.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if negative { "-" } else { "" };
    if !(-4..17).contains(&exp) {
        let trimmed = digits.trim_end_matches('0');
        let (head, tail) = trimmed.split_at(1);
        let frac = if tail.is_empty() { String::new() } else { format!(".{tail}") };
        return format!("{sign}{head}{frac}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let (int_part, frac_part) = if exp >= 0 {
        let split = exp as usize + 1;
        (digits[..split].to_string(), digits[split..].to_string())
    } else {
        ("0".to_string(), format!("{}{}", "0".repeat((-exp - 1) as usize), digits))
    };
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

fn header(grid: GridSpec, with_euler: bool) -> Vec<String> {
    let g = grid.cells();
    let mut h = vec!["source".to_string(), "label".to_string()];
    h.extend((0..3 * g).map(|i| format!("f{i}")));
    if with_euler {
        h.extend((0..g).map(|i| format!("chi{i}")));
    }
    h.push("grid_rows".into());
    h.push("grid_cols".into());
    h
}

pub fn write_feature_csv(m: &FeatureMatrix, path: &Path) -> Result<(), FeatureError> {
    let file = fs::File::create(path).map_err(|source| FeatureError::Io { path: path.to_path_buf(), source })?;
    write_feature_csv_to(m, file)
}

pub fn write_feature_csv_to<W: std::io::Write>(m: &FeatureMatrix, out: W) -> Result<(), FeatureError> {
    let with_euler = m.has_euler();
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header(m.grid, with_euler))?;
    for ((v, label), source) in m.samples.iter().zip(&m.labels).zip(&m.sources) {
        let mut rec = vec![source.clone(), label.clone()];
        rec.extend(v.values.iter().map(|&x| format_real(x)));
        if let Some(e) = &v.euler {
            rec.extend(e.iter().map(|&x| format_real(x)));
        }
        rec.push(m.grid.rows.to_string());
        rec.push(m.grid.cols.to_string());
        w.write_record(rec)?;
    }
    w.flush().map_err(|e| FeatureError::Csv(e.into()))?;
    Ok(())
}

pub fn read_feature_csv(path: &Path) -> Result<FeatureMatrix, FeatureError> {
    let file = fs::File::open(path).map_err(|source| FeatureError::Io { path: path.to_path_buf(), source })?;
    read_feature_csv_from(file)
}

pub fn read_feature_csv_from<R: std::io::Read>(input: R) -> Result<FeatureMatrix, FeatureError> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(input);
    let mut records = rd.records();
    let head = records.next().ok_or_else(|| FeatureError::Header("empty file".into()))??;
    let names: Vec<&str> = head.iter().collect();
    let n = names.len();
    if n < 7
        || names[0] != "source"
        || names[1] != "label"
        || names[n - 2] != "grid_rows"
        || names[n - 1] != "grid_cols"
    {
        return Err(FeatureError::Header(format!("unexpected columns {:?}", names)));
    }
    let f_count = names[2..n - 2].iter().take_while(|c| c.starts_with('f')).count();
    let chi_count = n - 4 - f_count;
    let expected_f = (0..f_count).map(|i| format!("f{i}"));
    let expected_chi = (0..chi_count).map(|i| format!("chi{i}"));
    if !expected_f.chain(expected_chi).eq(names[2..n - 2].iter().map(|s| s.to_string())) {
        return Err(FeatureError::Header(
            "feature columns must be f0..f{3G-1} optionally followed by chi0..chi{G-1}".into(),
        ));
    }
    if f_count % 3 != 0 || (chi_count != 0 && chi_count * 3 != f_count) {
        return Err(FeatureError::Header(format!(
            "{f_count} feature and {chi_count} euler columns do not form a 3G layout"
        )));
    }

    let mut grid: Option<GridSpec> = None;
    let mut matrix_rows = Vec::new();
    for rec in records {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let parse_err = |message: String| FeatureError::Parse { line, message };
        if rec.len() != n {
            return Err(parse_err(format!("expected {n} columns, found {}", rec.len())));
        }
        let num = |i: usize| -> Result<f64, FeatureError> {
            rec[i]
                .trim()
                .parse::<f64>()
                .map_err(|_| parse_err(format!("column {} is not a number: {:?}", names[i], &rec[i])))
        };
        let dim = |i: usize| -> Result<usize, FeatureError> {
            rec[i]
                .trim()
                .parse::<usize>()
                .map_err(|_| parse_err(format!("column {} is not a count: {:?}", names[i], &rec[i])))
        };
        let spec = GridSpec::new(dim(n - 2)?, dim(n - 1)?).map_err(|e| parse_err(e.to_string()))?;
        if spec.cells() * 3 != f_count {
            return Err(parse_err(format!("grid {spec} implies {} features, header has {f_count}", spec.cells() * 3)));
        }
        match grid {
            None => grid = Some(spec),
            Some(g) if g != spec => return Err(parse_err(format!("grid {spec} differs from earlier rows ({g})"))),
            _ => {}
        }
        if rec[1].is_empty() {
            return Err(parse_err("empty label".into()));
        }
        let values = (2..2 + f_count).map(num).collect::<Result<Vec<_>, _>>()?;
        let euler = if chi_count > 0 {
            Some((2 + f_count..2 + f_count + chi_count).map(num).collect::<Result<Vec<_>, _>>()?)
        } else {
            None
        };
        matrix_rows.push((rec[0].to_string(), rec[1].to_string(), FeatureVector { grid: spec, values, euler }));
    }
    let grid = grid.ok_or(FeatureError::EmptyMatrix)?;
    let mut m = FeatureMatrix { grid, samples: Vec::new(), labels: Vec::new(), sources: Vec::new() };
    for (source, label, v) in matrix_rows {
        m.sources.push(source);
        m.labels.push(label);
        m.samples.push(v);
    }
    Ok(m)
}
