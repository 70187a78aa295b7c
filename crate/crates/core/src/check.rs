//! Randomized oracle-equivalence suite.
//!
//! Each trial draws a seeded random image and cross-checks the homology
//! pipeline against the independent oracles: union-find component counts, the
//! Euler characteristic from simplex counts, and textbook rational rank on every
//! boundary matrix. Trial `i` cycles through densities 0.2, 0.5, 0.8 and draws
//! both sides uniformly from `1..=max_size`.
//!
//! Whether `beta1` matches the number of 4-connected background holes is
//! recorded as an observation only; it is not treated as a failure.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::complex::{enumerate_simplices, SimplicialComplex};
use crate::homology::oracle::{background_holes_4, oracle_beta0_unionfind, oracle_naive_rank};
use crate::homology::rank::integer_rank;
use crate::homology::{boundary_matrix, euler_characteristic, profile_of_complex, HomologyError, HomologyProfile};
use crate::img::BinaryImage;
use crate::mix;

pub const DENSITIES: [f64; 3] = [0.2, 0.5, 0.8];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub trials: usize,
    pub max_size: usize,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { trials: 1000, max_size: 12, seed: 0 }
    }
}

/// One failed trial; `seed` alone reproduces the image via [`trial_image`].
#[derive(Clone, Debug, PartialEq)]
pub struct TrialFailure {
    pub trial: usize,
    pub seed: u64,
    pub height: usize,
    pub width: usize,
    pub density: f64,
    pub reasons: Vec<String>,
}

impl fmt::Display for TrialFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trial {} (seed {:#018x}, {}x{}, density {}): {}",
            self.trial,
            self.seed,
            self.height,
            self.width,
            self.density,
            self.reasons.join("; ")
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CheckReport {
    pub trials: usize,
    pub passed: usize,
    pub failures: Vec<TrialFailure>,
    /// Boundary matrices compared against the rational oracle.
    pub rank_comparisons: usize,
    /// Boundary matrices too large for the rational oracle.
    pub rank_skipped: usize,
    /// Seeds where `beta1` differs from the 4-connected background hole count.
    pub duality_mismatches: Vec<u64>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Seed of trial `trial` in a suite seeded with `seed`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    mix(mix(seed) ^ trial as u64)
}

/// The random image a trial seed produces.
pub fn trial_image(trial_seed: u64, max_size: usize, density: f64) -> BinaryImage {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    let h = rng.random_range(1..=max_size);
    let w = rng.random_range(1..=max_size);
    let mask: Vec<bool> = (0..h * w).map(|_| rng.random::<f64>() < density).collect();
    BinaryImage::from_mask(h, w, &mask)
}

pub fn run_check(cfg: &CheckConfig) -> CheckReport {
    run_check_with(cfg, profile_of_complex)
}

/// Runs the suite against an arbitrary homology implementation.
pub fn run_check_with<F>(cfg: &CheckConfig, betti: F) -> CheckReport
where
    F: Fn(&SimplicialComplex) -> Result<HomologyProfile, HomologyError> + Sync,
{
    let max_size = cfg.max_size.max(1);
    let outcomes: Vec<(u64, TrialOutcome, Option<TrialFailure>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(cfg.seed, i);
            let density = DENSITIES[i % DENSITIES.len()];
            let img = trial_image(seed, max_size, density);
            let out = check_image(&img, &betti);
            let failure = (!out.reasons.is_empty()).then(|| TrialFailure {
                trial: i,
                seed,
                height: img.height(),
                width: img.width(),
                density,
                reasons: out.reasons.clone(),
            });
            (seed, out, failure)
        })
        .collect();

    let mut report = CheckReport { trials: cfg.trials, ..Default::default() };
    for (seed, o, failure) in outcomes {
        report.rank_comparisons += o.rank_comparisons;
        report.rank_skipped += o.rank_skipped;
        if o.duality_mismatch {
            report.duality_mismatches.push(seed);
        }
        match failure {
            Some(f) => report.failures.push(f),
            None => report.passed += 1,
        }
    }
    report
}

struct TrialOutcome {
    reasons: Vec<String>,
    rank_comparisons: usize,
    rank_skipped: usize,
    duality_mismatch: bool,
}

fn check_image<F>(img: &BinaryImage, betti: &F) -> TrialOutcome
where
    F: Fn(&SimplicialComplex) -> Result<HomologyProfile, HomologyError>,
{
    let mut out = TrialOutcome { reasons: Vec::new(), rank_comparisons: 0, rank_skipped: 0, duality_mismatch: false };
    let k = enumerate_simplices(img);
    let s = k.counts();

    // ranks of B1, B2, B3: fast path and oracle side by side
    let mut oracle_ranks = [None; 4];
    for (q, slot) in oracle_ranks.iter_mut().enumerate().skip(1) {
        let b = match boundary_matrix(&k, q) {
            Ok(b) => b,
            Err(e) => {
                out.reasons.push(format!("boundary matrix B{q}: {e}"));
                continue;
            }
        };
        match oracle_naive_rank(&b) {
            Ok(r) => {
                out.rank_comparisons += 1;
                *slot = Some(r);
                let fast = integer_rank(&b);
                if fast != r {
                    out.reasons.push(format!("rank(B{q}) = {fast}, oracle says {r}"));
                }
            }
            Err(HomologyError::TooLarge { .. }) => out.rank_skipped += 1,
            Err(e) => out.reasons.push(format!("oracle rank of B{q}: {e}")),
        }
    }
    if let (Some(r2), Some(r3)) = (oracle_ranks[2], oracle_ranks[3]) {
        let kernel = s[2] as i64 - r2 as i64;
        if kernel != r3 as i64 {
            out.reasons.push(format!("s2 - rank(B2) = {kernel} but rank(B3) = {r3}"));
        }
    }

    match betti(&k) {
        Err(e) => out.reasons.push(format!("homology failed: {e}")),
        Ok(p) => {
            let uf = oracle_beta0_unionfind(img);
            if p.beta0 != uf {
                out.reasons.push(format!("beta0 = {}, union-find says {uf}", p.beta0));
            }
            let chi = euler_characteristic(s);
            if p.beta0 as i64 - p.beta1 as i64 != chi || p.chi != chi {
                out.reasons.push(format!(
                    "beta0 - beta1 = {} - {}, chi = {}, simplex counts give {chi}",
                    p.beta0, p.beta1, p.chi
                ));
            }
            for (q, r) in [(1, p.rank1), (2, p.rank2), (3, p.rank3)] {
                if let Some(o) = oracle_ranks[q] {
                    if o != r {
                        out.reasons.push(format!("profile rank{q} = {r}, oracle says {o}"));
                    }
                }
            }
            out.duality_mismatch = p.beta1 != background_holes_4(img);
        }
    }
    out
}
