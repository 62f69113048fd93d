//! Dense matrices over Laurent polynomials, with fraction-free elimination.
//!
//! Ranks and kernels are those over the fraction field; no general Laurent
//! inverse is ever formed. Monomial pivots are normalised to 1, other pivots
//! are eliminated by cross multiplication.

use std::fmt;

use crate::novikov::NovikovScalar;

#[derive(Clone, PartialEq, Eq)]
pub struct LaurentMatrix {
    rows: usize,
    cols: usize,
    data: Vec<NovikovScalar>,
}

impl LaurentMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![NovikovScalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, NovikovScalar::one());
        }
        m
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[Vec<NovikovScalar>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column {j} has wrong length");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &NovikovScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: NovikovScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<NovikovScalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, rhs: &LaurentMatrix) -> LaurentMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix shapes do not compose");
        let mut out = LaurentMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = NovikovScalar::zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    acc += a * rhs.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[NovikovScalar]) -> Vec<NovikovScalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = NovikovScalar::zero();
                for (k, vk) in v.iter().enumerate() {
                    acc += self.get(i, k) * vk;
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, e: u32) -> LaurentMatrix {
        assert_eq!(self.rows, self.cols);
        (0..e).fold(LaurentMatrix::identity(self.rows), |acc, _| acc.mul(self))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, i: usize, s: &NovikovScalar) {
        for j in 0..self.cols {
            let v = self.get(i, j) * s;
            self.set(i, j, v);
        }
    }

    /// `row_target <- p * row_target + a * row_source`, where `p` is the
    /// source pivot and `a` the target entry in the pivot column.
    fn eliminate(&mut self, target: usize, source: usize, col: usize) {
        let a = self.get(target, col).clone();
        if a.is_zero() {
            return;
        }
        let p = self.get(source, col).clone();
        for j in 0..self.cols {
            let mut v = if p.is_one() {
                self.get(target, j).clone()
            } else {
                self.get(target, j) * &p
            };
            v += &a * self.get(source, j);
            self.set(target, j, v);
        }
    }

    /// Fully reduced fraction-free echelon form. Returns the reduced matrix and
    /// the `(row, column)` positions of its pivots.
    pub fn reduced_echelon(&self) -> (LaurentMatrix, Vec<(usize, usize)>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            // Prefer monomial pivots, then the sparsest entry.
            let choice = (r..m.rows)
                .filter(|&i| !m.get(i, c).is_zero())
                .min_by_key(|&i| (!m.get(i, c).is_monomial(), m.get(i, c).len(), i));
            let Some(p) = choice else { continue };
            m.swap_rows(r, p);
            if m.get(r, c).is_monomial() {
                let inv = m.get(r, c).monomial_inverse().expect("monomial pivot");
                m.scale_row(r, &inv);
            }
            for i in 0..m.rows {
                if i != r {
                    m.eliminate(i, r, c);
                }
            }
            pivots.push((r, c));
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.reduced_echelon().1.len()
    }

    /// A basis of the right kernel, with Laurent polynomial entries.
    pub fn nullspace(&self) -> Vec<Vec<NovikovScalar>> {
        let (m, pivots) = self.reduced_echelon();
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for f in (0..m.cols).filter(|c| !pivot_cols.contains(c)) {
            let mut v = vec![NovikovScalar::zero(); m.cols];
            v[f] = pivots
                .iter()
                .fold(NovikovScalar::one(), |acc, &(r, c)| &acc * m.get(r, c));
            for (idx, &(r, c)) in pivots.iter().enumerate() {
                let others = pivots
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != idx)
                    .fold(NovikovScalar::one(), |acc, (_, &(r2, c2))| &acc * m.get(r2, c2));
                v[c] = m.get(r, f) * &others;
            }
            basis.push(v);
        }
        basis
    }

    /// Determinant by Bareiss elimination (exact divisions only).
    pub fn determinant(&self) -> NovikovScalar {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return NovikovScalar::one();
        }
        let mut m = self.clone();
        let mut prev = NovikovScalar::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !m.get(i, k).is_zero()) else {
                return NovikovScalar::zero();
            };
            // Row swaps only flip a sign, which is invisible over GF(2).
            m.swap_rows(k, p);
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(m.get(k, k) * m.get(i, j)) + &(m.get(i, k) * m.get(k, j));
                    let v = num.div_exact(&prev).expect("Bareiss division is exact");
                    m.set(i, j, v);
                }
                m.set(i, k, NovikovScalar::zero());
            }
            prev = m.get(k, k).clone();
        }
        prev
    }
}

impl fmt::Debug for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(exps: &[i64]) -> NovikovScalar {
        NovikovScalar::from_exponents(exps.iter().copied())
    }

    #[test]
    fn rank_and_kernel_of_rank_one() {
        // [[1, T], [T, T^2]] has rank 1 with kernel spanned by (T, 1).
        let mut a = LaurentMatrix::zeros(2, 2);
        a.set(0, 0, t(&[0]));
        a.set(0, 1, t(&[1]));
        a.set(1, 0, t(&[1]));
        a.set(1, 1, t(&[2]));
        assert_eq!(a.rank(), 1);
        let ker = a.nullspace();
        assert_eq!(ker.len(), 1);
        assert!(a.mul_vec(&ker[0]).iter().all(NovikovScalar::is_zero));
        assert!(a.determinant().is_zero());
    }

    #[test]
    fn non_monomial_pivots() {
        // [[1+T, 1], [1, 1+T]]: det = (1+T)^2 + 1 = T^2.
        let mut a = LaurentMatrix::zeros(2, 2);
        a.set(0, 0, t(&[0, 1]));
        a.set(0, 1, t(&[0]));
        a.set(1, 0, t(&[0]));
        a.set(1, 1, t(&[0, 1]));
        assert_eq!(a.determinant(), t(&[2]));
        assert_eq!(a.rank(), 2);
        assert!(a.nullspace().is_empty());
    }

    #[test]
    fn kernel_with_non_monomial_entries() {
        // Row (1+T, 1+T^2) has kernel (1+T, 1).
        let mut a = LaurentMatrix::zeros(1, 2);
        a.set(0, 0, t(&[0, 1]));
        a.set(0, 1, t(&[0, 2]));
        let ker = a.nullspace();
        assert_eq!(ker.len(), 1);
        assert!(a.mul_vec(&ker[0]).iter().all(NovikovScalar::is_zero));
    }

    #[test]
    fn determinant_3x3() {
        // Upper triangular with diagonal T, 1+T, T^-1.
        let mut a = LaurentMatrix::identity(3);
        a.set(0, 0, t(&[1]));
        a.set(1, 1, t(&[0, 1]));
        a.set(2, 2, t(&[-1]));
        a.set(0, 2, t(&[5, 7]));
        assert_eq!(a.determinant(), t(&[0, 1]));
    }
}
