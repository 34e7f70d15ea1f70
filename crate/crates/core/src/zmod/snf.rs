//! Smith normal form over ℤ with full transform bookkeeping.
//!
//! `U · A · V = S` with U, V unimodular and S diagonal, the diagonal entries
//! nonnegative and forming a divisibility chain. U⁻¹ is tracked alongside U
//! so cokernel coordinates can be mapped back to the original generators.
//! Pivoting picks the smallest nonzero absolute value, which keeps the
//! intermediate entries tame and makes the output deterministic.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::matrix::{abs, IntMatrix};

#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub s: IntMatrix,
}

impl SmithDecomposition {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        let n = self.s.rows().min(self.s.cols());
        (0..n).take_while(|&i| !self.s.get(i, i).is_zero()).count()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.s.rows().min(self.s.cols());
        (0..n).map(|i| self.s.get(i, i).clone()).collect()
    }

    /// Invariant factors ≥ 2 (ones dropped).
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal()
            .into_iter()
            .filter(|d| d > &BigInt::from(1))
            .collect()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let m = a.rows();
    let n = a.cols();
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    // Row op helpers keep U·A·V = S and U·U⁻¹ = 1 exact.
    fn row_add(
        s: &mut IntMatrix,
        u: &mut IntMatrix,
        u_inv: &mut IntMatrix,
        a: usize,
        b: usize,
        c: &BigInt,
    ) {
        s.row_add(a, b, c);
        u.row_add(a, b, c);
        let neg = -c;
        u_inv.col_add(b, a, &neg);
    }
    fn row_swap(s: &mut IntMatrix, u: &mut IntMatrix, u_inv: &mut IntMatrix, a: usize, b: usize) {
        s.swap_rows(a, b);
        u.swap_rows(a, b);
        u_inv.swap_cols(a, b);
    }
    fn col_add(s: &mut IntMatrix, v: &mut IntMatrix, a: usize, b: usize, c: &BigInt) {
        s.col_add(a, b, c);
        v.col_add(a, b, c);
    }
    fn col_swap(s: &mut IntMatrix, v: &mut IntMatrix, a: usize, b: usize) {
        s.swap_cols(a, b);
        v.swap_cols(a, b);
    }

    let mut t = 0;
    while t < m.min(n) {
        // Smallest nonzero |entry| in the trailing submatrix becomes the pivot.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !s.get(i, j).is_zero()
                    && pivot.is_none_or(|(pi, pj)| abs(s.get(i, j)) < abs(s.get(pi, pj)))
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        row_swap(&mut s, &mut u, &mut u_inv, t, pi);
        col_swap(&mut s, &mut v, t, pj);

        loop {
            // Clear column t below the pivot, swapping in any nonzero
            // remainder as a smaller pivot.
            let mut reduced = true;
            for i in t + 1..m {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let q = s.get(i, t) / s.get(t, t);
                if !q.is_zero() {
                    let negq = -q;
                    row_add(&mut s, &mut u, &mut u_inv, i, t, &negq);
                }
                if !s.get(i, t).is_zero() {
                    row_swap(&mut s, &mut u, &mut u_inv, t, i);
                    reduced = false;
                }
            }
            if !reduced {
                continue;
            }
            for j in t + 1..n {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let q = s.get(t, j) / s.get(t, t);
                if !q.is_zero() {
                    let negq = -q;
                    col_add(&mut s, &mut v, j, t, &negq);
                }
                if !s.get(t, j).is_zero() {
                    col_swap(&mut s, &mut v, t, j);
                    reduced = false;
                }
            }
            if !reduced {
                continue;
            }
            // Row and column are clear. Enforce divisibility of the trailing
            // submatrix by folding a bad row into row t and continuing.
            let mut offender = None;
            'search: for i in t + 1..m {
                for j in t + 1..n {
                    if !(s.get(i, j) % s.get(t, t)).is_zero() {
                        offender = Some(i);
                        break 'search;
                    }
                }
            }
            match offender {
                Some(i) => {
                    let one = BigInt::from(1);
                    row_add(&mut s, &mut u, &mut u_inv, t, i, &one);
                }
                None => break,
            }
        }

        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
        t += 1;
    }

    SmithDecomposition { u, u_inv, v, s }
}

/// A matrix with its Smith decomposition, for repeated exact solving.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    snf: SmithDecomposition,
    rows: usize,
    cols: usize,
}

impl LinearSystem {
    pub fn new(a: &IntMatrix) -> Self {
        LinearSystem {
            snf: smith_normal_form(a),
            rows: a.rows(),
            cols: a.cols(),
        }
    }

    pub fn from_snf(snf: SmithDecomposition, rows: usize, cols: usize) -> Self {
        LinearSystem { snf, rows, cols }
    }

    /// Some integer solution of A·z = b, or None when none exists.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(b.len(), self.rows);
        let w = self.snf.u.mul_vec(b);
        let rank = self.snf.rank();
        let mut y = vec![BigInt::zero(); self.cols];
        for (i, wi) in w.iter().enumerate() {
            if i < rank {
                let d = self.snf.s.get(i, i);
                if !(wi % d).is_zero() {
                    return None;
                }
                y[i] = wi / d;
            } else if !wi.is_zero() {
                return None;
            }
        }
        Some(self.snf.v.mul_vec(&y))
    }

    pub fn is_solvable(&self, b: &[BigInt]) -> bool {
        self.solve(b).is_some()
    }

    /// Basis of the integer kernel of A, as columns. The basis spans the full
    /// kernel lattice because V is unimodular.
    pub fn kernel_basis(&self) -> IntMatrix {
        let rank = self.snf.rank();
        let k = self.cols - rank;
        IntMatrix::from_fn(self.cols, k, |i, j| self.snf.v.get(i, rank + j).clone())
    }

    pub fn snf(&self) -> &SmithDecomposition {
        &self.snf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &IntMatrix) -> SmithDecomposition {
        let d = smith_normal_form(a);
        // U·A·V = S exactly
        assert_eq!(d.u.mul(a).mul(&d.v), d.s, "UAV != S for {a:?}");
        // U·U⁻¹ = 1
        assert_eq!(d.u.mul(&d.u_inv), IntMatrix::identity(a.rows()));
        // unimodularity
        assert_eq!(abs(&d.u.det_bareiss()), BigInt::from(1));
        assert_eq!(abs(&d.v.det_bareiss()), BigInt::from(1));
        // diagonal shape and divisibility chain
        let diag = d.diagonal();
        for i in 0..d.s.rows() {
            for j in 0..d.s.cols() {
                if i != j {
                    assert!(d.s.get(i, j).is_zero());
                }
            }
        }
        for w in diag.windows(2) {
            if !w[0].is_zero() {
                assert!((&w[1] % &w[0]).is_zero(), "divisibility broken: {diag:?}");
            } else {
                assert!(w[1].is_zero());
            }
        }
        d
    }

    #[test]
    fn snf_worked_example() {
        let a = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        let d = check(&a);
        assert_eq!(d.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn snf_zero_and_identity() {
        let z = IntMatrix::zero(2, 3);
        let d = check(&z);
        assert!(d.s.is_zero());
        let id = IntMatrix::identity(3);
        let d = check(&id);
        assert_eq!(d.diagonal(), vec![BigInt::from(1); 3]);
    }

    #[test]
    fn snf_extension_matrix() {
        let a = IntMatrix::from_rows(&[vec![-2, 0], vec![-1, -2]]);
        let d = check(&a);
        assert_eq!(d.diagonal(), vec![BigInt::from(1), BigInt::from(4)]);
        assert_eq!(d.invariant_factors(), vec![BigInt::from(4)]);
    }

    #[test]
    fn snf_rectangular() {
        let a = IntMatrix::from_rows(&[vec![2, 0, 4], vec![0, 6, 0]]);
        check(&a);
        let a = IntMatrix::from_rows(&[vec![3], vec![6], vec![9]]);
        let d = check(&a);
        assert_eq!(d.diagonal(), vec![BigInt::from(3)]);
    }

    #[test]
    fn snf_empty_dims() {
        check(&IntMatrix::zero(0, 0));
        check(&IntMatrix::zero(0, 3));
        check(&IntMatrix::zero(3, 0));
    }

    #[test]
    fn solve_and_kernel() {
        let a = IntMatrix::from_rows(&[vec![1, 1]]);
        let sys = LinearSystem::new(&a);
        let basis = sys.kernel_basis();
        assert_eq!(basis.cols(), 1);
        let b0 = basis.col(0);
        assert!(a.mul_vec(&b0).iter().all(|x| x.is_zero()));
        assert!(
            b0 == vec![BigInt::from(1), BigInt::from(-1)]
                || b0 == vec![BigInt::from(-1), BigInt::from(1)]
        );

        let sol = sys.solve(&[BigInt::from(5)]).unwrap();
        assert_eq!(&sol[0] + &sol[1], BigInt::from(5));

        // 2x = 3 has no integer solution
        let a = IntMatrix::from_rows(&[vec![2]]);
        let sys = LinearSystem::new(&a);
        assert!(sys.solve(&[BigInt::from(3)]).is_none());
        assert!(sys.solve(&[BigInt::from(4)]).is_some());
    }

    #[test]
    fn solve_empty_cols() {
        let a = IntMatrix::zero(2, 0);
        let sys = LinearSystem::new(&a);
        assert!(sys.solve(&[BigInt::zero(), BigInt::zero()]).is_some());
        assert!(sys.solve(&[BigInt::from(1), BigInt::zero()]).is_none());
    }
}
