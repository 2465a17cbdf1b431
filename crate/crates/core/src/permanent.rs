//! Matrix permanents.
//!
//! Two routes: a plain sum over permutations, and Ryser's inclusion-exclusion
//! formula walked in Gray-code order so each step updates one column's
//! contribution to the row sums.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

impl SquareMatrix {
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Ok(SquareMatrix { n, entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(f(r, c));
            }
        }
        SquareMatrix { n, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.n + c]
    }
}

/// Sum over all `n!` permutations, generated with Heap's algorithm.
pub fn permanent_naive(a: &SquareMatrix) -> Complex64 {
    let n = a.size();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let term =
        |p: &[usize]| -> Complex64 { p.iter().enumerate().map(|(r, &c)| a.get(r, c)).product() };
    let mut total = term(&perm);
    let mut stack = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if stack[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(stack[i], i);
            }
            total += term(&perm);
            stack[i] += 1;
            i = 1;
        } else {
            stack[i] = 0;
            i += 1;
        }
    }
    total
}

/// Ryser's formula with Gray-code subset order, `O(2^n n)`.
pub fn permanent_ryser(a: &SquareMatrix) -> Complex64 {
    let n = a.size();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray: u64 = 0;
    for step in 1u64..(1u64 << n) {
        let next = step ^ (step >> 1);
        let flipped = (gray ^ next).trailing_zeros() as usize;
        let added = next & (1 << flipped) != 0;
        gray = next;
        for (r, s) in row_sums.iter_mut().enumerate() {
            if added {
                *s += a.get(r, flipped);
            } else {
                *s -= a.get(r, flipped);
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        // (-1)^{n - |S|}
        if (n - gray.count_ones() as usize).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

/// Naive below five rows, Ryser above.
pub fn permanent(a: &SquareMatrix) -> Complex64 {
    if a.size() <= 4 {
        permanent_naive(a)
    } else {
        permanent_ryser(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn ones(n: usize) -> SquareMatrix {
        SquareMatrix::from_fn(n, |_, _| Complex64::new(1.0, 0.0))
    }

    #[test]
    fn identity_and_ones() {
        let id = SquareMatrix::from_fn(2, |r, c| Complex64::new(f64::from(r == c), 0.0));
        assert_eq!(permanent_naive(&id), Complex64::new(1.0, 0.0));
        assert_eq!(permanent_ryser(&id), Complex64::new(1.0, 0.0));
        let mut fact = 1.0;
        for n in 1..=7 {
            fact *= n as f64;
            assert!((permanent_naive(&ones(n)).re - fact).abs() < 1e-9);
            assert!((permanent_ryser(&ones(n)).re - fact).abs() < 1e-9);
        }
        assert_eq!(permanent_ryser(&ones(3)), Complex64::new(6.0, 0.0));
    }

    #[test]
    fn empty_matrix_has_unit_permanent() {
        let empty = SquareMatrix::from_fn(0, |_, _| unreachable!());
        assert_eq!(permanent(&empty), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn two_by_two_by_hand() {
        let a = SquareMatrix::from_rows(&[
            vec![Complex64::new(1.0, 2.0), Complex64::new(0.5, 0.0)],
            vec![Complex64::new(0.0, -1.0), Complex64::new(3.0, 1.0)],
        ])
        .unwrap();
        let expected = a.get(0, 0) * a.get(1, 1) + a.get(0, 1) * a.get(1, 0);
        assert!((permanent_ryser(&a) - expected).norm() < 1e-14);
        assert!((permanent_naive(&a) - expected).norm() < 1e-14);
    }

    #[test]
    fn ryser_matches_naive_on_random_4x4() {
        let mut rng = seeded(7);
        for _ in 0..50 {
            let a = SquareMatrix::from_fn(4, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            assert!((permanent_ryser(&a) - permanent_naive(&a)).norm() <= 1e-10);
        }
    }

    fn seeded(seed: u64) -> rand::rngs::StdRng {
        rand::rngs::StdRng::seed_from_u64(seed)
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = SquareMatrix::from_rows(&[vec![Complex64::new(1.0, 0.0)], vec![]]);
        assert_eq!(err, Err(Error::NotSquare { rows: 2, cols: 1 }));
    }
}
