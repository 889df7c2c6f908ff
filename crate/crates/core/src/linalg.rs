//! Exact rank computation for rational matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from row vectors; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        RationalMatrix { rows: rows.len(), cols, entries: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.cols + j] = v;
    }

    /// Exact rank by fraction-free (Bareiss) elimination.
    ///
    /// Each row is first cleared of denominators, then eliminated over the integers
    /// with the first nonzero entry of the current column as pivot.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = &self.entries[i * self.cols..(i + 1) * self.cols];
                let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
            })
            .collect();

        let mut rank = 0;
        let mut prev_pivot = BigInt::one();
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            let pivot = m[rank][col].clone();
            for r in rank + 1..self.rows {
                let factor = m[r][col].clone();
                for c in col..self.cols {
                    let v = (&pivot * &m[r][c] - &factor * &m[rank][c]) / &prev_pivot;
                    m[r][c] = v;
                }
            }
            // columns left of `col` in rows below the pivot are already zero
            prev_pivot = pivot;
            rank += 1;
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RationalMatrix::identity(2).rank(), 2);
        assert_eq!(RationalMatrix::zeros(3, 4).rank(), 0);
        let m = RationalMatrix::from_rows(vec![vec![q(1), q(2)], vec![q(2), q(4)]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn rank_with_fractions_and_skipped_columns() {
        let m = RationalMatrix::from_rows(vec![
            vec![q(0), Rational::new(1, 2), q(1)],
            vec![q(0), Rational::new(1, 3), Rational::new(2, 3)],
            vec![q(0), q(0), q(5)],
        ]);
        assert_eq!(m.rank(), 2);
        let m = RationalMatrix::from_rows(vec![
            vec![q(2), q(3), q(5)],
            vec![q(7), q(11), q(13)],
            vec![q(17), q(19), q(23)],
        ]);
        assert_eq!(m.rank(), 3);
    }

    #[test]
    fn rank_bounded_by_shape() {
        let m = RationalMatrix::from_rows(vec![vec![q(1), q(0), q(0), q(1)], vec![q(0), q(1), q(1), q(0)]]);
        assert_eq!(m.rank(), 2);
        let t = RationalMatrix::from_rows(vec![vec![q(1), q(2)], vec![q(3), q(4)], vec![q(5), q(6)]]);
        assert_eq!(t.rank(), 2);
    }
}
