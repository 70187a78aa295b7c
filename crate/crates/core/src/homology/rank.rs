//! Exact rank of integer matrices.
//!
//! The fast path reduces the matrix modulo two distinct primes in
//! `(2^30, 2^31)` with sparse column elimination. Reduction mod `p` can only
//! lose rank, and only when `p` divides every maximal nonzero minor, so the
//! result is accepted when both primes agree. On disagreement the
//! fraction-free (Bareiss) elimination over arbitrary-precision integers
//! decides.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::IntegerMatrix;

const PRIME_LO: u64 = 1 << 30;
const PRIME_HI: u64 = 1 << 31;
const DEFAULT_PRIME_SEED: u64 = 0x5eed_b377_1000;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all `n < 3_215_031_751` with bases 2, 3, 5, 7.
pub fn is_prime_u32_range(n: u64) -> bool {
    assert!(n < 3_215_031_751);
    if n < 2 {
        return false;
    }
    for p in [2, 3, 5, 7] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Two distinct pseudorandom primes in `(2^30, 2^31)` drawn from `seed`.
pub fn prime_pair(seed: u64) -> (u64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || loop {
        let n = rng.random_range(PRIME_LO + 1..PRIME_HI) | 1;
        if is_prime_u32_range(n) {
            return n;
        }
    };
    let p = draw();
    loop {
        let q = draw();
        if q != p {
            return (p, q);
        }
    }
}

fn default_primes() -> (u64, u64) {
    static PRIMES: OnceLock<(u64, u64)> = OnceLock::new();
    *PRIMES.get_or_init(|| prime_pair(DEFAULT_PRIME_SEED))
}

// dst <- dst - factor * src over Z/p; both sorted by row.
fn axpy_mod(dst: &[(usize, u64)], src: &[(usize, u64)], factor: u64, p: u64, out: &mut Vec<(usize, u64)>) {
    out.clear();
    let neg = (p - factor) % p;
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        match (dst.get(i), src.get(j)) {
            (Some(&(ra, va)), Some(&(rb, vb))) if ra == rb => {
                let v = (va + mul_mod(vb, neg, p)) % p;
                if v != 0 {
                    out.push((ra, v));
                }
                i += 1;
                j += 1;
            }
            (Some(&(ra, va)), Some(&(rb, _))) if ra < rb => {
                out.push((ra, va));
                i += 1;
            }
            (Some(&(ra, va)), None) => {
                out.push((ra, va));
                i += 1;
            }
            (_, Some(&(rb, vb))) => {
                out.push((rb, mul_mod(vb, neg, p)));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
}

/// Rank over `Z/p` by sparse column reduction on the lowest nonzero row.
pub fn rank_mod_p(m: &IntegerMatrix, p: u64) -> usize {
    assert!(p > 2 && p < (1 << 62));
    // pivot_col[row] = index into `reduced` of the column whose lowest entry is `row`
    let mut pivot_col = vec![usize::MAX; m.n_rows()];
    let mut reduced: Vec<Vec<(usize, u64)>> = Vec::new();
    let mut col: Vec<(usize, u64)> = Vec::new();
    let mut scratch = Vec::new();
    for c in 0..m.n_cols() {
        col.clear();
        col.extend(m.column(c).iter().filter_map(|&(r, v)| {
            let v = v.rem_euclid(p as i64) as u64;
            (v != 0).then_some((r, v))
        }));
        while let Some(&(low, val)) = col.last() {
            let k = pivot_col[low];
            if k == usize::MAX {
                let inv = pow_mod(val, p - 2, p);
                for e in col.iter_mut() {
                    e.1 = mul_mod(e.1, inv, p);
                }
                pivot_col[low] = reduced.len();
                reduced.push(std::mem::take(&mut col));
                break;
            }
            // pivot columns are normalized to a unit low entry
            axpy_mod(&col, &reduced[k], val, p, &mut scratch);
            std::mem::swap(&mut col, &mut scratch);
        }
    }
    reduced.len()
}

/// Rank over the rationals by fraction-free Gaussian elimination on a dense
/// copy with arbitrary-precision entries.
pub fn bareiss_rank(m: &IntegerMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> =
        m.to_dense().into_iter().map(|row| row.into_iter().map(BigInt::from).collect()).collect();
    let (rows, cols) = (m.n_rows(), m.n_cols());
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, piv);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            let lead = row[c].clone();
            for j in c + 1..cols {
                let v = &pivot_row[c] * &row[j] - &lead * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = pivot_row[c].clone();
        rank += 1;
    }
    rank
}

/// Outcome of the dual-prime rank computation, kept for diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub rank: usize,
    pub primes: (u64, u64),
    pub modular: (usize, usize),
    pub arbitrated: bool,
}

pub fn integer_rank_with_primes(m: &IntegerMatrix, primes: (u64, u64)) -> RankReport {
    let r1 = rank_mod_p(m, primes.0);
    let r2 = rank_mod_p(m, primes.1);
    if r1 == r2 {
        RankReport { rank: r1, primes, modular: (r1, r2), arbitrated: false }
    } else {
        RankReport { rank: bareiss_rank(m), primes, modular: (r1, r2), arbitrated: true }
    }
}

/// Exact rank over the rationals.
pub fn integer_rank(m: &IntegerMatrix) -> usize {
    integer_rank_with_primes(m, default_primes()).rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[i64]]) -> IntegerMatrix {
        IntegerMatrix::from_dense(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn small_examples() {
        assert_eq!(integer_rank(&dense(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])), 3);
        assert_eq!(integer_rank(&dense(&[&[1, 1], &[1, 1]])), 1);
        assert_eq!(integer_rank(&IntegerMatrix::zeros(4, 4)), 0);
        assert_eq!(integer_rank(&IntegerMatrix::zeros(0, 5)), 0);
        assert_eq!(integer_rank(&IntegerMatrix::zeros(5, 0)), 0);
    }

    #[test]
    fn primes_are_distinct_and_in_range() {
        let (p, q) = default_primes();
        assert_ne!(p, q);
        for x in [p, q] {
            assert!(x > PRIME_LO && x < PRIME_HI && is_prime_u32_range(x));
        }
        assert_eq!(prime_pair(1), prime_pair(1));
    }

    #[test]
    fn miller_rabin_against_trial_division() {
        let trial = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..5000 {
            assert_eq!(is_prime_u32_range(n), trial(n), "{n}");
        }
        for n in PRIME_LO..PRIME_LO + 2000 {
            assert_eq!(is_prime_u32_range(n), trial(n), "{n}");
        }
    }

    #[test]
    fn modular_rank_drops_when_prime_divides() {
        // det = p, so rank is 1 mod p and 2 over Q
        let p = 1_073_741_827u64;
        assert!(is_prime_u32_range(p));
        let m = dense(&[&[p as i64, 0], &[0, 1]]);
        assert_eq!(rank_mod_p(&m, p), 1);
        let report = integer_rank_with_primes(&m, (p, 1_073_741_831));
        assert!(report.arbitrated);
        assert_eq!(report.rank, 2);
    }

    #[test]
    fn bareiss_handles_skipped_columns() {
        let m = dense(&[&[0, 2, 4, 1], &[0, 1, 2, 3], &[0, 3, 6, 4]]);
        assert_eq!(bareiss_rank(&m), 2);
        assert_eq!(integer_rank(&m), 2);
    }
}
