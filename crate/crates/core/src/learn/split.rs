use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{encode_labels, LearnError};

/// Seeded stratified train/test split.
///
/// Each class sends `floor(n_c * test_fraction + 0.5)` samples, clamped to
/// `1..=n_c-1`, to the test side. Classes are visited in sorted order and
/// shuffled with one RNG stream, so a fixed seed gives a fixed split. Both
/// index lists come back sorted.
pub fn stratified_split(
    labels: &[String],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), LearnError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(LearnError::OutOfRange { what: "test fraction", range: "(0, 1)", value: test_fraction });
    }
    if labels.is_empty() {
        return Err(LearnError::Empty);
    }
    let (classes, idx) = encode_labels(labels);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); classes.len()];
    for (i, &c) in idx.iter().enumerate() {
        members[c].push(i);
    }
    if let Some((c, m)) = members.iter().enumerate().find(|(_, m)| m.len() < 2) {
        return Err(LearnError::ClassTooSmall { label: classes[c].clone(), count: m.len() });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for mut m in members {
        let n_c = m.len();
        let n_test = ((n_c as f64 * test_fraction + 0.5).floor() as usize).clamp(1, n_c - 1);
        m.shuffle(&mut rng);
        test.extend_from_slice(&m[..n_test]);
        train.extend_from_slice(&m[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}
