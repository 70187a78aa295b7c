//! Labeled synthetic binary textures.
//!
//! Every subject gets a Bernoulli prototype image; each sample of that subject
//! is the prototype with every pixel flipped independently at `flip_prob`.
//! All randomness derives from the configured seed, so a configuration always
//! produces the same files.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::img::{write_pgm, BinaryImage, ImageError};
use crate::mix;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("{0}")]
    Invalid(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Image(#[from] ImageError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthConfig {
    pub n_subjects: usize,
    pub samples_per_subject: usize,
    pub height: usize,
    pub width: usize,
    pub base_density: f64,
    pub flip_prob: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_subjects: 20,
            samples_per_subject: 5,
            height: 48,
            width: 482,
            base_density: 0.5,
            flip_prob: 0.03,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let counts = [
            ("n_subjects", self.n_subjects),
            ("samples_per_subject", self.samples_per_subject),
            ("height", self.height),
            ("width", self.width),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(SynthError::Invalid(format!("{name} must be at least 1")));
        }
        // the bounds are inclusive of the degenerate densities so empty and full images stay reachable
        if !(0.0..=1.0).contains(&self.base_density) {
            return Err(SynthError::Invalid(format!("base density {} outside [0, 1]", self.base_density)));
        }
        if !(0.0..0.5).contains(&self.flip_prob) {
            return Err(SynthError::Invalid(format!("flip probability {} outside [0, 0.5)", self.flip_prob)));
        }
        Ok(())
    }
}

/// Seed of sample `sample` of subject `subject` under dataset seed `seed`.
pub fn instance_seed(seed: u64, subject: usize, sample: usize) -> u64 {
    mix(mix(seed ^ 0x5a17) ^ mix((subject as u64) << 32 | sample as u64))
}

/// The subject's prototype; depends on `(cfg.seed, subject_index)` and the
/// image shape and density only.
pub fn generate_prototype(cfg: &SynthConfig, subject_index: usize) -> BinaryImage {
    assert!(subject_index < cfg.n_subjects, "subject index {subject_index} out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed));
    rng.set_stream(subject_index as u64);
    let mask: Vec<bool> = (0..cfg.height * cfg.width).map(|_| rng.random::<f64>() < cfg.base_density).collect();
    BinaryImage::from_mask(cfg.height, cfg.width, &mask)
}

pub fn sample_instance(prototype: &BinaryImage, flip_prob: f64, instance_seed: u64) -> BinaryImage {
    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed);
    let mask: Vec<bool> = prototype.to_mask().into_iter().map(|on| on ^ (rng.random::<f64>() < flip_prob)).collect();
    BinaryImage::from_mask(prototype.height(), prototype.width(), &mask)
}

pub fn file_name(subject: usize, sample: usize) -> String {
    format!("{subject:03}_{sample}.pgm")
}

/// Writes `n_subjects * samples_per_subject` P5 files named
/// `<subject>_<sample>.pgm` (subject zero-padded to three digits) into `dir`,
/// creating it if needed. Returns the paths in subject-major order.
pub fn generate_dataset(cfg: &SynthConfig, dir: &Path) -> Result<Vec<PathBuf>, SynthError> {
    cfg.validate()?;
    std::fs::create_dir_all(dir).map_err(|source| SynthError::Io { path: dir.to_path_buf(), source })?;
    let jobs: Vec<(usize, usize)> =
        (0..cfg.n_subjects).flat_map(|s| (0..cfg.samples_per_subject).map(move |k| (s, k))).collect();
    let prototypes: Vec<BinaryImage> =
        (0..cfg.n_subjects).into_par_iter().map(|s| generate_prototype(cfg, s)).collect();
    jobs.par_iter()
        .map(|&(s, k)| {
            let img = sample_instance(&prototypes[s], cfg.flip_prob, instance_seed(cfg.seed, s, k));
            let path = dir.join(file_name(s, k));
            write_pgm(&img.to_gray(), &path)?;
            Ok(path)
        })
        .collect()
}
