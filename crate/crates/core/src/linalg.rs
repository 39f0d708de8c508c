//! Exact integer linear algebra: diagonalization with unimodular transforms
//! (Smith-style) and integral solving of `A x = b`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Dense matrix over `BigInt`, row-major.
#[derive(Clone, Debug)]
pub struct BigMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl BigMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BigMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BigMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::from(1);
        }
        m
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = BigMat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(v);
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[a] -= f * row[b]
    fn row_sub(&mut self, a: usize, b: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self[(b, j)] * f;
            self[(a, j)] -= v;
        }
    }

    /// col[a] -= f * col[b]
    fn col_sub(&mut self, a: usize, b: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self[(i, b)] * f;
            self[(i, a)] -= v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for BigMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}
impl std::ops::IndexMut<(usize, usize)> for BigMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// Diagonalization `U A V = D` with unimodular `U`, `V`.
pub struct Diagonalized {
    pub d: BigMat,
    pub u: BigMat,
    pub v: BigMat,
    pub rank: usize,
}

/// Reduce `a` to diagonal form by unimodular row and column operations.
pub fn diagonalize(a: &BigMat) -> Diagonalized {
    let mut d = a.clone();
    let mut u = BigMat::identity(a.rows);
    let mut v = BigMat::identity(a.cols);
    let n = a.rows.min(a.cols);
    let mut t = 0;
    while t < n {
        // find a pivot of minimal absolute value in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..a.rows {
            for j in t..a.cols {
                if !d[(i, j)].is_zero() {
                    let better = match pivot {
                        None => true,
                        Some(p) => d[(i, j)].abs() < d[p].abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        let mut clean = true;
        for i in (t + 1)..a.rows {
            let f = &d[(i, t)] / &d[(t, t)];
            d.row_sub(i, t, &f);
            u.row_sub(i, t, &f);
            if !d[(i, t)].is_zero() {
                clean = false;
            }
        }
        for j in (t + 1)..a.cols {
            let f = &d[(t, j)] / &d[(t, t)];
            d.col_sub(j, t, &f);
            v.col_sub(j, t, &f);
            if !d[(t, j)].is_zero() {
                clean = false;
            }
        }
        if clean {
            t += 1;
        }
    }
    Diagonalized { d, u, v, rank: t }
}

/// Integral solution of `A x = b` with free coordinates set to zero in the
/// solver basis; `None` when no integer solution exists.
pub fn solve_integer(a: &[Vec<i64>], b: &[i64]) -> Option<Vec<BigInt>> {
    let mat = BigMat::from_i64(a);
    let rows = mat.rows;
    let cols = mat.cols;
    assert_eq!(b.len(), rows);
    let dg = diagonalize(&mat);
    // A x = b  <=>  D y = U b with x = V y
    let mut ub = vec![BigInt::zero(); rows];
    for (i, s) in ub.iter_mut().enumerate() {
        for j in 0..rows {
            *s += &dg.u[(i, j)] * BigInt::from(b[j]);
        }
    }
    let mut y = vec![BigInt::zero(); cols];
    for i in 0..rows {
        if i < dg.rank {
            let di = &dg.d[(i, i)];
            if (&ub[i] % di).is_zero() {
                y[i] = &ub[i] / di;
            } else {
                return None;
            }
        } else if !ub[i].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigInt::zero(); cols];
    for (i, s) in x.iter_mut().enumerate() {
        for j in 0..cols {
            if !y[j].is_zero() {
                *s += &dg.v[(i, j)] * &y[j];
            }
        }
    }
    Some(x)
}

/// Rank of an integer matrix.
pub fn rank(a: &[Vec<i64>]) -> usize {
    diagonalize(&BigMat::from_i64(a)).rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_identityish_system() {
        let a = vec![vec![2, 0], vec![0, 3]];
        let x = solve_integer(&a, &[4, -9]).unwrap();
        assert_eq!(x, vec![BigInt::from(2), BigInt::from(-3)]);
        assert!(solve_integer(&a, &[1, 0]).is_none());
    }

    #[test]
    fn solves_underdetermined() {
        // x + y = 3 has an integral solution
        let a = vec![vec![1, 1]];
        let x = solve_integer(&a, &[3]).unwrap();
        assert_eq!(&x[0] + &x[1], BigInt::from(3));
    }

    #[test]
    fn detects_inconsistency() {
        let a = vec![vec![1, 1], vec![1, 1]];
        assert!(solve_integer(&a, &[1, 2]).is_none());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&[vec![0, 1], vec![-1, 0]]), 2);
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank(&[vec![0, 0], vec![0, 0]]), 0);
    }
}
