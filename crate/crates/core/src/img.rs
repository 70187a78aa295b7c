//! Image loading, binarization and grid partitioning.
//!
//! Two input formats are supported:
//!
//! * PGM, both the ASCII (`P2`) and binary (`P5`) variants, with `maxval <= 255`.
//!   Header tokens are whitespace separated and `#` starts a comment that runs to
//!   the end of the line. A `P5` header is terminated by exactly one whitespace
//!   byte after `maxval`, followed by `width * height` raw bytes. Samples are
//!   rescaled to `0..=255` as `round(v * 255 / maxval)` when `maxval != 255`.
//! * `csv01`: a comma separated matrix of `0`/`1` values, one image row per line.
//!   `1` is a black (foreground) pixel and becomes intensity 0; `0` becomes 255.
//!   Blank lines are ignored and every row must have the same length.
//!
//! Foreground is always the set of dark pixels: a pixel is foreground when its
//! intensity is strictly below the binarization threshold.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed header: {0}")]
    Header(String),
    #[error("unsupported maxval {0} (must be 1..=255)")]
    UnsupportedMaxval(u32),
    #[error("intensity {value} out of range at pixel {index}")]
    OutOfRange { value: i64, index: usize },
    #[error("ragged csv: line {line} has {found} columns, expected {expected}")]
    Ragged { line: usize, found: usize, expected: usize },
    #[error("invalid csv01 value {value:?} on line {line}")]
    CsvValue { line: usize, value: String },
    #[error("truncated pixel data: expected {expected} samples, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("image must be at least 1x1")]
    Empty,
    #[error("grid {rows}x{cols} does not fit a {height}x{width} image")]
    GridTooLarge { rows: usize, cols: usize, height: usize, width: usize },
    #[error("invalid grid spec {0:?} (expected RxC with R, C >= 1)")]
    GridSyntax(String),
    #[error("invalid binarization {0:?} (expected otsu or fixed:T)")]
    BinarizeSyntax(String),
}

/// 8-bit grayscale image stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    height: usize,
    width: usize,
    intensities: Vec<u8>,
}

impl GrayImage {
    pub fn new(height: usize, width: usize, intensities: Vec<u8>) -> Result<Self, ImageError> {
        if height == 0 || width == 0 {
            return Err(ImageError::Empty);
        }
        if intensities.len() != height * width {
            return Err(ImageError::Truncated { expected: height * width, found: intensities.len() });
        }
        Ok(Self { height, width, intensities })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn intensities(&self) -> &[u8] {
        &self.intensities
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.intensities[row * self.width + col]
    }
}

/// Foreground pixel set on an `height x width` lattice.
///
/// Coordinates are `(row, col)` and kept in a sorted set, so iteration order is
/// row-major and duplicates cannot occur.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryImage {
    height: usize,
    width: usize,
    foreground: BTreeSet<(usize, usize)>,
}

impl BinaryImage {
    pub fn empty(height: usize, width: usize) -> Self {
        Self { height, width, foreground: BTreeSet::new() }
    }

    /// Builds an image from foreground coordinates, rejecting anything out of bounds.
    pub fn from_pixels<I>(height: usize, width: usize, pixels: I) -> Result<Self, ImageError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut img = Self::empty(height, width);
        for (r, c) in pixels {
            if r >= height || c >= width {
                return Err(ImageError::OutOfRange { value: (r * width + c) as i64, index: r * width + c });
            }
            img.foreground.insert((r, c));
        }
        Ok(img)
    }

    /// Builds an image from a row-major occupancy mask.
    pub fn from_mask(height: usize, width: usize, mask: &[bool]) -> Self {
        assert_eq!(mask.len(), height * width, "mask size mismatch");
        let foreground = mask.iter().enumerate().filter(|(_, &on)| on).map(|(i, _)| (i / width, i % width)).collect();
        Self { height, width, foreground }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn foreground(&self) -> &BTreeSet<(usize, usize)> {
        &self.foreground
    }

    pub fn len(&self) -> usize {
        self.foreground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.foreground.is_empty()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.foreground.contains(&(row, col))
    }

    /// Sets or clears a pixel. Panics when out of bounds.
    pub fn set(&mut self, row: usize, col: usize, on: bool) {
        assert!(row < self.height && col < self.width, "pixel ({row},{col}) out of bounds");
        if on {
            self.foreground.insert((row, col));
        } else {
            self.foreground.remove(&(row, col));
        }
    }

    pub fn to_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.height * self.width];
        for &(r, c) in &self.foreground {
            mask[r * self.width + c] = true;
        }
        mask
    }

    /// Renders foreground as intensity 0 and background as 255.
    pub fn to_gray(&self) -> GrayImage {
        let data = self.to_mask().into_iter().map(|on| if on { 0 } else { 255 }).collect();
        GrayImage { height: self.height, width: self.width, intensities: data }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm,
    Csv01,
}

impl ImageFormat {
    /// Picks a format from the file extension (`.pgm`, `.csv`).
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "pgm" => Some(Self::Pgm),
            "csv" | "csv01" => Some(Self::Csv01),
            _ => None,
        }
    }
}

pub fn load_image(path: &Path, format: ImageFormat) -> Result<GrayImage, ImageError> {
    let bytes = fs::read(path)?;
    match format {
        ImageFormat::Pgm => parse_pgm(&bytes),
        ImageFormat::Csv01 => parse_csv01(&String::from_utf8_lossy(&bytes)),
    }
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u64, ImageError> {
        let tok = self.token().ok_or_else(|| ImageError::Header(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImageError::Header(format!("bad {what}: {:?}", String::from_utf8_lossy(tok))))
    }
}

pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    let mut rd = HeaderReader { bytes, pos: 0 };
    let magic = rd.token().ok_or_else(|| ImageError::Header("missing magic".into()))?;
    let binary = match magic {
        b"P2" => false,
        b"P5" => true,
        other => return Err(ImageError::Header(format!("unsupported magic {:?}", String::from_utf8_lossy(other)))),
    };
    let width = rd.number("width")? as usize;
    let height = rd.number("height")? as usize;
    let maxval = rd.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(ImageError::UnsupportedMaxval(maxval.min(u32::MAX as u64) as u32));
    }
    if width == 0 || height == 0 {
        return Err(ImageError::Empty);
    }
    let n = width * height;
    let mut raw = Vec::with_capacity(n);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        if rd.pos >= bytes.len() || !bytes[rd.pos].is_ascii_whitespace() {
            return Err(ImageError::Header("missing separator after maxval".into()));
        }
        let data = &bytes[rd.pos + 1..];
        if data.len() < n {
            return Err(ImageError::Truncated { expected: n, found: data.len() });
        }
        raw.extend(data[..n].iter().map(|&b| b as u64));
    } else {
        for _ in 0..n {
            match rd.token() {
                Some(tok) => {
                    let v: i64 = std::str::from_utf8(tok)
                        .ok()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| ImageError::Header(format!("bad sample {:?}", String::from_utf8_lossy(tok))))?;
                    if v < 0 {
                        return Err(ImageError::OutOfRange { value: v, index: raw.len() });
                    }
                    raw.push(v as u64);
                }
                None => return Err(ImageError::Truncated { expected: n, found: raw.len() }),
            }
        }
    }
    let mut data = Vec::with_capacity(n);
    for (index, &v) in raw.iter().enumerate() {
        if v > maxval {
            return Err(ImageError::OutOfRange { value: v as i64, index });
        }
        let scaled = if maxval == 255 { v } else { (v * 255 + maxval / 2) / maxval };
        data.push(scaled as u8);
    }
    GrayImage::new(height, width, data)
}

pub fn parse_csv01(text: &str) -> Result<GrayImage, ImageError> {
    let mut data = Vec::new();
    let mut width = None;
    let mut height = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut count = 0;
        for field in line.split(',') {
            let v = match field.trim() {
                "1" => 0u8,
                "0" => 255u8,
                other => return Err(ImageError::CsvValue { line: lineno + 1, value: other.to_string() }),
            };
            data.push(v);
            count += 1;
        }
        match width {
            None => width = Some(count),
            Some(w) if w != count => return Err(ImageError::Ragged { line: lineno + 1, found: count, expected: w }),
            _ => {}
        }
        height += 1;
    }
    GrayImage::new(height, width.unwrap_or(0), data)
}

/// Writes a binary (`P5`) PGM with maxval 255.
pub fn write_pgm(img: &GrayImage, path: &Path) -> Result<(), ImageError> {
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    write!(f, "P5\n{} {}\n255\n", img.width, img.height)?;
    f.write_all(&img.intensities)?;
    f.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Binarize {
    #[default]
    Otsu,
    Fixed(u8),
}

impl FromStr for Binarize {
    type Err = ImageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("otsu") {
            return Ok(Self::Otsu);
        }
        s.strip_prefix("fixed:")
            .and_then(|t| t.parse::<u8>().ok())
            .map(Self::Fixed)
            .ok_or_else(|| ImageError::BinarizeSyntax(s.to_string()))
    }
}

impl fmt::Display for Binarize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Otsu => write!(f, "otsu"),
            Self::Fixed(t) => write!(f, "fixed:{t}"),
        }
    }
}

/// Threshold maximizing the between-class variance of the 256-bin histogram.
///
/// The dark class is `intensity < t` for `t` in `1..=255`; ties resolve to the
/// smallest `t`. An image with a single intensity value yields 128.
pub fn otsu_threshold(img: &GrayImage) -> u8 {
    let mut hist = [0u64; 256];
    for &v in &img.intensities {
        hist[v as usize] += 1;
    }
    if hist.iter().filter(|&&h| h > 0).count() < 2 {
        return 128;
    }
    let total = img.intensities.len() as f64;
    let sum_total: f64 = hist.iter().enumerate().map(|(i, &h)| i as f64 * h as f64).sum();

    let mut weight_dark = 0.0;
    let mut sum_dark = 0.0;
    let mut best_t = 128u8;
    let mut best_var = -1.0;
    for t in 1..=255usize {
        weight_dark += hist[t - 1] as f64;
        sum_dark += (t - 1) as f64 * hist[t - 1] as f64;
        let weight_light = total - weight_dark;
        if weight_dark == 0.0 || weight_light == 0.0 {
            continue;
        }
        let mean_dark = sum_dark / weight_dark;
        let mean_light = (sum_total - sum_dark) / weight_light;
        let between = weight_dark * weight_light * (mean_dark - mean_light).powi(2);
        if between > best_var {
            best_var = between;
            best_t = t as u8;
        }
    }
    best_t
}

pub fn threshold_for(img: &GrayImage, method: Binarize) -> u8 {
    match method {
        Binarize::Otsu => otsu_threshold(img),
        Binarize::Fixed(t) => t,
    }
}

/// Foreground = pixels strictly darker than the threshold.
pub fn binarize(img: &GrayImage, method: Binarize) -> BinaryImage {
    let t = threshold_for(img, method);
    let mask: Vec<bool> = img.intensities.iter().map(|&v| v < t).collect();
    BinaryImage::from_mask(img.height, img.width, &mask)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
}

impl GridSpec {
    pub fn new(rows: usize, cols: usize) -> Result<Self, ImageError> {
        if rows == 0 || cols == 0 {
            return Err(ImageError::GridSyntax(format!("{rows}x{cols}")));
        }
        Ok(Self { rows, cols })
    }

    /// Number of cells `G`.
    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }
}

impl FromStr for GridSpec {
    type Err = ImageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ImageError::GridSyntax(s.to_string());
        let (r, c) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let rows = r.trim().parse().map_err(|_| bad())?;
        let cols = c.trim().parse().map_err(|_| bad())?;
        Self::new(rows, cols).map_err(|_| bad())
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

/// Band sizes for splitting `len` pixels into `parts` bands: the first
/// `len % parts` bands get one extra pixel.
pub fn balanced_bands(len: usize, parts: usize) -> Vec<usize> {
    let base = len / parts;
    let extra = len % parts;
    (0..parts).map(|i| base + usize::from(i < extra)).collect()
}

fn band_offsets(sizes: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    offsets.push(0);
    for s in sizes {
        acc += s;
        offsets.push(acc);
    }
    offsets
}

/// Splits an image into `rows * cols` cells, returned in row-major cell order,
/// each with local coordinates.
pub fn partition_grid(img: &BinaryImage, spec: GridSpec) -> Result<Vec<BinaryImage>, ImageError> {
    if spec.rows == 0 || spec.cols == 0 || spec.rows > img.height || spec.cols > img.width {
        return Err(ImageError::GridTooLarge {
            rows: spec.rows,
            cols: spec.cols,
            height: img.height,
            width: img.width,
        });
    }
    let row_sizes = balanced_bands(img.height, spec.rows);
    let col_sizes = balanced_bands(img.width, spec.cols);
    let row_off = band_offsets(&row_sizes);
    let col_off = band_offsets(&col_sizes);

    let mut cells: Vec<BinaryImage> =
        row_sizes.iter().flat_map(|&h| col_sizes.iter().map(move |&w| BinaryImage::empty(h, w))).collect();
    for &(r, c) in &img.foreground {
        let bi = row_off.partition_point(|&o| o <= r) - 1;
        let bj = col_off.partition_point(|&o| o <= c) - 1;
        cells[bi * spec.cols + bj].foreground.insert((r - row_off[bi], c - col_off[bj]));
    }
    Ok(cells)
}

/// Inverse of [`partition_grid`]: places cells back at their global offsets.
pub fn assemble_grid(cells: &[BinaryImage], spec: GridSpec) -> BinaryImage {
    assert_eq!(cells.len(), spec.cells(), "cell count mismatch");
    let heights: Vec<usize> = (0..spec.rows).map(|i| cells[i * spec.cols].height).collect();
    let widths: Vec<usize> = (0..spec.cols).map(|j| cells[j].width).collect();
    let row_off = band_offsets(&heights);
    let col_off = band_offsets(&widths);
    let mut out = BinaryImage::empty(row_off[spec.rows], col_off[spec.cols]);
    for (k, cell) in cells.iter().enumerate() {
        let (bi, bj) = (k / spec.cols, k % spec.cols);
        for &(r, c) in &cell.foreground {
            out.foreground.insert((r + row_off[bi], c + col_off[bj]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Otsu objective evaluated from scratch for one threshold.
    fn between_class_variance(values: &[u8], t: u16) -> f64 {
        let (dark, light): (Vec<f64>, Vec<f64>) = {
            let d: Vec<f64> = values.iter().filter(|&&v| (v as u16) < t).map(|&v| v as f64).collect();
            let l: Vec<f64> = values.iter().filter(|&&v| (v as u16) >= t).map(|&v| v as f64).collect();
            (d, l)
        };
        if dark.is_empty() || light.is_empty() {
            return f64::NEG_INFINITY;
        }
        let n = values.len() as f64;
        let md = dark.iter().sum::<f64>() / dark.len() as f64;
        let ml = light.iter().sum::<f64>() / light.len() as f64;
        (dark.len() as f64 / n) * (light.len() as f64 / n) * (md - ml).powi(2)
    }

    fn sweep_otsu(values: &[u8]) -> u8 {
        let mut best = (f64::NEG_INFINITY, 128u16);
        for t in 1..=255u16 {
            let v = between_class_variance(values, t);
            if v > best.0 + 1e-9 {
                best = (v, t);
            }
        }
        best.1 as u8
    }

    #[test]
    fn p2_two_pixels() {
        let img = parse_pgm(b"P2 2 1 255\n0 255\n").unwrap();
        assert_eq!((img.height(), img.width()), (1, 2));
        assert_eq!(img.intensities(), &[0, 255]);
    }

    #[test]
    fn p2_with_comments_and_small_maxval() {
        let img = parse_pgm(b"P2\n# a comment\n3 1\n# another\n1\n0 1 0\n").unwrap();
        assert_eq!(img.intensities(), &[0, 255, 0]);
    }

    #[test]
    fn p5_roundtrip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.pgm");
        let img = GrayImage::new(2, 3, vec![0, 10, 20, 30, 40, 255]).unwrap();
        write_pgm(&img, &path).unwrap();
        assert_eq!(load_image(&path, ImageFormat::Pgm).unwrap(), img);
    }

    #[test]
    fn p5_large_maxval_rejected() {
        let mut bytes = b"P5 1 1 65535\n".to_vec();
        bytes.extend([0, 0]);
        let err = parse_pgm(&bytes).unwrap_err();
        assert!(err.to_string().contains("unsupported maxval"), "{err}");
    }

    #[test]
    fn pgm_errors() {
        assert!(matches!(parse_pgm(b"P3 1 1 255 0"), Err(ImageError::Header(_))));
        assert!(matches!(parse_pgm(b"P2 2 1 255 0"), Err(ImageError::Truncated { .. })));
        assert!(matches!(parse_pgm(b"P2 1 1 100 101"), Err(ImageError::OutOfRange { .. })));
        assert!(matches!(parse_pgm(b"P5 2 2 255\n\x00"), Err(ImageError::Truncated { .. })));
    }

    #[test]
    fn csv01_mapping() {
        let img = parse_csv01("1,0\n0,1").unwrap();
        assert_eq!(img.intensities(), &[0, 255, 255, 0]);
        assert!(matches!(parse_csv01("1,0\n0"), Err(ImageError::Ragged { line: 2, .. })));
        assert!(matches!(parse_csv01("1,2"), Err(ImageError::CsvValue { .. })));
        assert!(matches!(parse_csv01(""), Err(ImageError::Empty)));
    }

    #[test]
    fn fixed_threshold_extremes() {
        let black = GrayImage::new(3, 3, vec![0; 9]).unwrap();
        assert_eq!(binarize(&black, Binarize::Fixed(1)).len(), 9);
        let white = GrayImage::new(3, 3, vec![255; 9]).unwrap();
        assert!(binarize(&white, Binarize::Fixed(1)).is_empty());
    }

    #[test]
    fn otsu_two_level() {
        let img = GrayImage::new(1, 4, vec![0, 0, 255, 255]).unwrap();
        assert_eq!(otsu_threshold(&img), sweep_otsu(img.intensities()));
        let b = binarize(&img, Binarize::Otsu);
        assert_eq!(b.foreground().iter().copied().collect::<Vec<_>>(), vec![(0, 0), (0, 1)]);
    }

    #[test]
    fn otsu_uniform_falls_back_to_128() {
        let dark = GrayImage::new(2, 2, vec![10; 4]).unwrap();
        assert_eq!(otsu_threshold(&dark), 128);
        assert_eq!(binarize(&dark, Binarize::Otsu).len(), 4);
        let bright = GrayImage::new(2, 2, vec![200; 4]).unwrap();
        assert!(binarize(&bright, Binarize::Otsu).is_empty());
    }

    #[test]
    fn otsu_matches_sweep_on_varied_histograms() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.random_range(2..60);
            let values: Vec<u8> = (0..n).map(|_| rng.random()).collect();
            let img = GrayImage::new(1, n, values.clone()).unwrap();
            let t = otsu_threshold(&img);
            let oracle = sweep_otsu(&values);
            let (a, b) = (between_class_variance(&values, t as u16), between_class_variance(&values, oracle as u16));
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "t={t} oracle={oracle}");
        }
    }

    #[test]
    fn parse_flags() {
        assert_eq!("6x54".parse::<GridSpec>().unwrap(), GridSpec { rows: 6, cols: 54 });
        assert!("0x3".parse::<GridSpec>().is_err());
        assert!("6by54".parse::<GridSpec>().is_err());
        assert_eq!("fixed:40".parse::<Binarize>().unwrap(), Binarize::Fixed(40));
        assert_eq!("otsu".parse::<Binarize>().unwrap(), Binarize::Otsu);
        assert!("fixed:300".parse::<Binarize>().is_err());
    }

    #[test]
    fn balanced_band_widths() {
        assert_eq!(balanced_bands(10, 3), vec![4, 3, 3]);
        assert_eq!(balanced_bands(482, 54).iter().sum::<usize>(), 482);
        assert_eq!(balanced_bands(482, 54)[..50].iter().all(|&w| w == 9), true);
        assert_eq!(balanced_bands(482, 54)[50..].iter().all(|&w| w == 8), true);
    }

    #[test]
    fn grid_counts_and_identity() {
        let img = BinaryImage::empty(48, 482);
        assert_eq!(partition_grid(&img, GridSpec { rows: 3, cols: 27 }).unwrap().len(), 81);
        assert_eq!(partition_grid(&img, GridSpec { rows: 6, cols: 54 }).unwrap().len(), 324);

        let small = BinaryImage::from_pixels(3, 4, [(0, 0), (2, 3), (1, 1)]).unwrap();
        let cells = partition_grid(&small, GridSpec { rows: 1, cols: 1 }).unwrap();
        assert_eq!(cells, vec![small.clone()]);
    }

    #[test]
    fn grid_too_large() {
        let img = BinaryImage::empty(2, 2);
        assert!(matches!(partition_grid(&img, GridSpec { rows: 3, cols: 1 }), Err(ImageError::GridTooLarge { .. })));
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn image() -> impl Strategy<Value = BinaryImage> {
            (1usize..20, 1usize..20).prop_flat_map(|(h, w)| {
                proptest::collection::vec(any::<bool>(), h * w).prop_map(move |m| BinaryImage::from_mask(h, w, &m))
            })
        }

        proptest! {
            #[test]
            fn partition_is_exact(img in image(), r in 1usize..6, c in 1usize..6) {
                let spec = GridSpec { rows: r.min(img.height()), cols: c.min(img.width()) };
                let cells = partition_grid(&img, spec).unwrap();
                prop_assert_eq!(cells.iter().map(|c| c.len()).sum::<usize>(), img.len());
                prop_assert_eq!(assemble_grid(&cells, spec), img);
            }

            #[test]
            fn fixed_threshold_monotone(values in proptest::collection::vec(any::<u8>(), 1..64), t1 in any::<u8>(), t2 in any::<u8>()) {
                let (lo, hi) = (t1.min(t2), t1.max(t2));
                let img = GrayImage::new(1, values.len(), values).unwrap();
                let a = binarize(&img, Binarize::Fixed(lo));
                let b = binarize(&img, Binarize::Fixed(hi));
                prop_assert!(a.foreground().is_subset(b.foreground()));
            }
        }
    }
}
