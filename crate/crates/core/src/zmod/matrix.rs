//! Dense integer matrices with arbitrary-precision entries.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, data }
    }

    /// Convenience constructor for literals in tests and presentations.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        IntMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = BigInt::zero();
            for k in 0..self.cols {
                acc += self.get(i, k) * other.get(k, j);
            }
            acc
        })
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, x.len(), "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|i| {
                x.iter()
                    .enumerate()
                    .fold(BigInt::zero(), |acc, (k, xk)| acc + self.get(i, k) * xk)
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows, "dimension mismatch in hstack");
        IntMatrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[a] += c * row[b]
    pub fn row_add(&mut self, a: usize, b: usize, c: &BigInt) {
        for j in 0..self.cols {
            let add = c * self.get(b, j);
            let v = self.get(a, j) + add;
            self.set(a, j, v);
        }
    }

    /// col[a] += c * col[b]
    pub fn col_add(&mut self, a: usize, b: usize, c: &BigInt) {
        for i in 0..self.rows {
            let add = c * self.get(i, b);
            let v = self.get(i, a) + add;
            self.set(i, a, v);
        }
    }

    pub fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self.get(a, j);
            self.set(a, j, v);
        }
    }

    pub fn negate_col(&mut self, a: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, a);
            self.set(i, a, v);
        }
    }

    /// Fraction-free determinant (Bareiss). Independent of the Smith normal
    /// form path, so it doubles as an oracle for cokernel orders.
    pub fn det_bareiss(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                let swap = (k + 1..n).find(|&i| !m.get(i, k).is_zero());
                match swap {
                    Some(i) => {
                        m.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j);
                    debug_assert!((&num % &prev).is_zero());
                    m.set(i, j, num / &prev);
                }
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1).clone()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        serde_json::json!(rows)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Absolute value helper used by pivots.
pub(crate) fn abs(x: &BigInt) -> BigInt {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_det_small() {
        let m = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(m.det_bareiss(), BigInt::from(-8));
        let m = IntMatrix::from_rows(&[vec![-2, 0], vec![-1, -2]]);
        assert_eq!(m.det_bareiss(), BigInt::from(4));
        let id = IntMatrix::identity(4);
        assert_eq!(id.det_bareiss(), BigInt::from(1));
        let zero = IntMatrix::zero(3, 3);
        assert_eq!(zero.det_bareiss(), BigInt::from(0));
        assert_eq!(IntMatrix::zero(0, 0).det_bareiss(), BigInt::from(1));
    }

    #[test]
    fn bareiss_needs_row_swap() {
        let m = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(m.det_bareiss(), BigInt::from(-1));
    }

    #[test]
    fn mul_and_hstack() {
        let a = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]);
        let b = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        let ab = a.mul(&b);
        assert_eq!(ab, IntMatrix::from_rows(&[vec![2, 1], vec![4, 3]]));
        let st = a.hstack(&b);
        assert_eq!(st.cols(), 4);
        assert_eq!(st.get(1, 2), &BigInt::from(1));
    }
}
