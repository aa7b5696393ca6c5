//! Rational low-discrepancy points: a digitally shifted Sobol sequence with
//! dyadic denominators.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::Rational;
use crate::vector::QVector;

/// Bits of resolution; coordinates are multiples of `2^-BITS`.
pub const BITS: u32 = 10;

// (degree, polynomial, initial direction numbers) for dimensions 2..=8
const DIRECTIONS: [(u32, u32, &[u32]); 7] = [
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
];

pub const MAX_DIM: usize = DIRECTIONS.len() + 1;

fn direction_numbers(dim: usize) -> Vec<u32> {
    if dim == 0 {
        return (1..=BITS).map(|k| 1 << (BITS - k)).collect();
    }
    let (s, a, init) = DIRECTIONS[dim - 1];
    let s = s as usize;
    let mut m: Vec<u32> = init.to_vec();
    for k in s..BITS as usize {
        let mut v = m[k - s] ^ (m[k - s] << s);
        for i in 1..s {
            if a >> (s - 1 - i) & 1 == 1 {
                v ^= m[k - i] << i;
            }
        }
        m.push(v);
    }
    m.iter().enumerate().map(|(k, mk)| mk << (BITS as usize - 1 - k)).collect()
}

/// The Sobol sequence in `[0, 1)^dim` with a seeded digital shift.
pub struct Sobol {
    dirs: Vec<Vec<u32>>,
    shift: Vec<u32>,
    index: u32,
}

impl Sobol {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim <= MAX_DIM, "Sobol dimension above {MAX_DIM}");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mask = (1u32 << BITS) - 1;
        Sobol {
            dirs: (0..dim).map(direction_numbers).collect(),
            shift: (0..dim).map(|_| if seed == 0 { 0 } else { rng.next_u32() & mask }).collect(),
            index: 0,
        }
    }

    /// Integer coordinates in `0..2^BITS`.
    pub fn next_raw(&mut self) -> Vec<u32> {
        let i = self.index;
        self.index = (self.index + 1) & ((1 << BITS) - 1);
        self.dirs
            .iter()
            .zip(&self.shift)
            .map(|(d, s)| {
                let mut x = *s;
                for (k, v) in d.iter().enumerate() {
                    if i >> k & 1 == 1 {
                        x ^= v;
                    }
                }
                x
            })
            .collect()
    }

    /// The next point scaled into the box `[lo, hi]`.
    pub fn next_in(&mut self, lo: &QVector, hi: &QVector) -> QVector {
        let den = Rational::from_int(1 << BITS);
        self.next_raw()
            .into_iter()
            .enumerate()
            .map(|(j, r)| &lo[j] + &(&(&hi[j] - &lo[j]) * &(Rational::from_int(r as i64) / &den)))
            .collect()
    }
}

/// `count` Sobol points in `[lo, hi]`.
pub fn sobol_points(lo: &QVector, hi: &QVector, count: usize, seed: u64) -> Vec<QVector> {
    let mut s = Sobol::new(lo.dim(), seed);
    (0..count).map(|_| s.next_in(lo, hi)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unshifted_prefix() {
        let mut s = Sobol::new(2, 0);
        let pts: Vec<Vec<u32>> = (0..4).map(|_| s.next_raw()).collect();
        let h = 1 << (BITS - 1);
        let q = 1 << (BITS - 2);
        assert_eq!(pts, vec![vec![0, 0], vec![h, h], vec![q, 3 * q], vec![3 * q, q]]);
    }

    #[test]
    fn stratified_first_block() {
        // the first 2^k points hit every dyadic interval of length 2^-k once per coordinate
        let mut s = Sobol::new(5, 17);
        let pts: Vec<Vec<u32>> = (0..16).map(|_| s.next_raw()).collect();
        for j in 0..5 {
            let mut cells: Vec<u32> = pts.iter().map(|p| p[j] >> (BITS - 4)).collect();
            cells.sort();
            assert_eq!(cells, (0..16).collect::<Vec<_>>());
        }
    }

    #[test]
    fn deterministic() {
        let lo = QVector::from_ints(&[-1, -1]);
        let hi = QVector::from_ints(&[1, 1]);
        assert_eq!(sobol_points(&lo, &hi, 10, 5), sobol_points(&lo, &hi, 10, 5));
        for p in sobol_points(&lo, &hi, 10, 5) {
            assert!(p.iter().all(|c| *c >= Rational::from_int(-1) && *c < Rational::one()));
        }
    }
}
