//! Exact dense linear algebra over the scalar field `K`.
//!
//! Pivoting is deterministic: columns are processed left to right, the
//! pivot is the first nonzero entry below the current row, and the pivot
//! row is moved up by a cyclic shift. Outputs are therefore reproducible
//! and stable across runs.

use crate::constants::ExpConstant;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<ExpConstant>>,
}

impl KMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Vec<ExpConstant>>) -> Self {
        assert_eq!(data.len(), rows);
        for row in &data {
            assert_eq!(row.len(), cols);
        }
        KMatrix { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        KMatrix {
            rows,
            cols,
            data: vec![vec![ExpConstant::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = KMatrix::zero(n, n);
        for i in 0..n {
            m.data[i][i] = ExpConstant::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<ExpConstant>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        KMatrix::new(r, c, rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &ExpConstant {
        &self.data[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: ExpConstant) {
        self.data[r][c] = v;
    }

    pub fn row(&self, r: usize) -> &[ExpConstant] {
        &self.data[r]
    }

    pub fn transpose(&self) -> KMatrix {
        let mut out = KMatrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c][r] = self.data[r][c].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &KMatrix) -> KMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = KMatrix::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = ExpConstant::zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.data[r][k].mul(&other.data[k][c]));
                }
                out.data[r][c] = acc;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[ExpConstant]) -> Vec<ExpConstant> {
        assert_eq!(self.cols, v.len());
        self.data
            .iter()
            .map(|row| {
                let mut acc = ExpConstant::zero();
                for (a, b) in row.iter().zip(v) {
                    acc = acc.add(&a.mul(b));
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form together with the transform: returns
    /// `(R, S)` with `S` invertible and `R = S * self`.
    pub fn rref_with_transform(&self) -> (KMatrix, KMatrix) {
        let (r, s, _) = self.rref_internal();
        (r, s)
    }

    fn rref_internal(&self) -> (KMatrix, KMatrix, Vec<usize>) {
        let mut r = self.data.clone();
        let mut s = KMatrix::identity(self.rows).data;
        let mut pivots: Vec<usize> = Vec::new();
        let mut next_row = 0usize;
        for col in 0..self.cols {
            if next_row >= self.rows {
                break;
            }
            let Some(found) = (next_row..self.rows).find(|&i| !r[i][col].is_zero()) else {
                continue;
            };
            // minimal cyclic shift bringing the pivot row up
            r[next_row..=found].rotate_right(1);
            s[next_row..=found].rotate_right(1);
            let inv = r[next_row][col].inverse().expect("nonzero pivot");
            for x in r[next_row].iter_mut() {
                *x = x.mul(&inv);
            }
            for x in s[next_row].iter_mut() {
                *x = x.mul(&inv);
            }
            for i in 0..self.rows {
                if i == next_row || r[i][col].is_zero() {
                    continue;
                }
                let factor = r[i][col].clone();
                for c in 0..self.cols {
                    let delta = factor.mul(&r[next_row][c]);
                    r[i][c] = r[i][c].sub(&delta);
                }
                for c in 0..self.rows {
                    let delta = factor.mul(&s[next_row][c]);
                    s[i][c] = s[i][c].sub(&delta);
                }
            }
            pivots.push(col);
            next_row += 1;
        }
        (
            KMatrix::new(self.rows, self.cols, r),
            KMatrix::new(self.rows, self.rows, s),
            pivots,
        )
    }

    pub fn rank(&self) -> usize {
        self.rref_internal().2.len()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Basis of the right null space; empty exactly at full column rank.
    pub fn kernel_basis(&self) -> Vec<Vec<ExpConstant>> {
        let (r, _, pivots) = self.rref_internal();
        let mut out = Vec::new();
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![ExpConstant::zero(); self.cols];
            v[free] = ExpConstant::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = r.data[row][free].neg();
            }
            out.push(v);
        }
        out
    }

    /// A particular solution of `self * x = b` with free variables zero.
    pub fn solve(&self, b: &[ExpConstant]) -> Result<Vec<ExpConstant>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = self.data.clone();
        for (row, v) in aug.iter_mut().zip(b) {
            row.push(v.clone());
        }
        let aug = KMatrix::new(self.rows, self.cols + 1, aug);
        let (r, _, pivots) = aug.rref_internal();
        if pivots.contains(&self.cols) {
            return Err(Error::Inconsistent);
        }
        let mut x = vec![ExpConstant::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.data[row][self.cols].clone();
        }
        Ok(x)
    }

    /// Left inverse built from the first `cols` rows of the row-echelon
    /// transform; requires full column rank.
    pub fn left_inverse(&self) -> Result<KMatrix> {
        let (_, s, pivots) = self.rref_internal();
        if pivots.len() != self.cols {
            return Err(Error::RankDeficient);
        }
        let rows = s.data[..self.cols].to_vec();
        Ok(KMatrix::new(self.cols, self.rows, rows))
    }
}
