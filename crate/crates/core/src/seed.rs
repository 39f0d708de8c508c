//! Compatible pairs, quantum seeds, and seed mutation.
//!
//! Cluster variables of every seed are stored as elements of the initial
//! quantum torus; the exchange computation normalizes in the current frame
//! and clears the `−e_k` exponent by exact division, which the quantum
//! Laurent phenomenon guarantees to succeed.

use crate::linalg;
use crate::qtorus::{exact_divide, normalized_monomial, QCoeff, QTElement, QTorusError, SkewForm};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeedError {
    #[error("Λ is not skew-symmetric")]
    NotSkew,
    #[error("Λ(−B) differs from [I;0] at entry ({0},{1})")]
    NotCompatible(usize, usize),
    #[error("B must be m×n with m ≥ n ≥ 1, rows of equal length")]
    BadShape,
    #[error("no integral skew Λ with Λ(−B) = [I;0] exists")]
    NoIntegralSolution,
    #[error("mutation direction {0} out of range 1..={1}")]
    BadDirection(usize, usize),
    #[error(transparent)]
    Torus(#[from] QTorusError),
}

/// Exchange matrix with frozen rows plus a compatible skew form, `D = I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatiblePair {
    /// m×n integer matrix, mutable columns only.
    pub b: Vec<Vec<i64>>,
    pub lambda: SkewForm,
}

impl CompatiblePair {
    pub fn m(&self) -> usize {
        self.b.len()
    }

    pub fn n(&self) -> usize {
        self.b.first().map_or(0, Vec::len)
    }

    pub fn new(b: Vec<Vec<i64>>, lambda: SkewForm) -> Result<Self, SeedError> {
        let pair = CompatiblePair { b, lambda };
        pair.check()?;
        Ok(pair)
    }

    /// Verify skew-symmetry and `Λ(−B) = [I; 0]`.
    pub fn check(&self) -> Result<(), SeedError> {
        let m = self.m();
        let n = self.n();
        if n == 0 || m < n || self.b.iter().any(|r| r.len() != n) {
            return Err(SeedError::BadShape);
        }
        if self.lambda.rank() != m {
            return Err(SeedError::BadShape);
        }
        for i in 0..m {
            for j in 0..n {
                let mut s = 0i64;
                for l in 0..m {
                    s += self.lambda.entry(i, l) * (-self.b[l][j]);
                }
                let want = if i == j { 1 } else { 0 };
                if s != want {
                    return Err(SeedError::NotCompatible(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn b_column(&self, k: usize) -> Vec<i64> {
        (0..self.m()).map(|i| self.b[i][k]).collect()
    }

    /// `(b_k)_+`, `(b_k)_-`.
    pub fn b_column_pm(&self, k: usize) -> (Vec<i64>, Vec<i64>) {
        let col = self.b_column(k);
        (
            col.iter().map(|&v| v.max(0)).collect(),
            col.iter().map(|&v| (-v).max(0)).collect(),
        )
    }
}

/// Verify a candidate pair without constructing it.
pub fn check_compatible(b: &[Vec<i64>], lambda: &[Vec<i64>]) -> Result<(), SeedError> {
    let lam = SkewForm::new(lambda.to_vec()).map_err(|_| SeedError::NotSkew)?;
    CompatiblePair::new(b.to_vec(), lam).map(|_| ())
}

/// Find an integral skew-symmetric Λ with `Λ(−B) = [I; 0]`.
///
/// The linear system in the strictly-upper entries of Λ is solved by a
/// Smith-style integral solver; free coordinates are set to zero in the
/// solver basis, which makes the output deterministic.
pub fn solve_lambda(b: &[Vec<i64>]) -> Result<SkewForm, SeedError> {
    let m = b.len();
    let n = b.first().map_or(0, Vec::len);
    if n == 0 || m < n || b.iter().any(|r| r.len() != n) {
        return Err(SeedError::BadShape);
    }
    // unknowns: λ_{pq} for p < q; equations: Σ_l Λ_{il} (−B)_{lj} = δ_{ij}
    let var_index = |p: usize, q: usize| -> usize {
        debug_assert!(p < q);
        // offset of row p then column q
        (0..p).map(|r| m - 1 - r).sum::<usize>() + (q - p - 1)
    };
    let nvars = m * (m - 1) / 2;
    let mut rows = Vec::with_capacity(m * n);
    let mut rhs = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            let mut row = vec![0i64; nvars];
            for l in 0..m {
                if l == i {
                    continue;
                }
                let coef = -b[l][j];
                if i < l {
                    row[var_index(i, l)] += coef;
                } else {
                    row[var_index(l, i)] -= coef;
                }
            }
            rows.push(row);
            rhs.push(if i == j { 1 } else { 0 });
        }
    }
    let sol = linalg::solve_integer(&rows, &rhs).ok_or(SeedError::NoIntegralSolution)?;
    let mut lam = vec![vec![0i64; m]; m];
    for p in 0..m {
        for q in (p + 1)..m {
            let v = sol[var_index(p, q)]
                .to_i64()
                .ok_or(SeedError::NoIntegralSolution)?;
            lam[p][q] = v;
            lam[q][p] = -v;
        }
    }
    let form = SkewForm::new(lam).map_err(|_| SeedError::NotSkew)?;
    CompatiblePair::new(b.to_vec(), form.clone())?;
    Ok(form)
}

/// A quantum seed: compatible pair plus cluster variables expressed in the
/// initial torus. Frozen variables never change along mutations.
#[derive(Debug, Clone)]
pub struct QuantumSeed {
    pub pair: CompatiblePair,
    pub variables: Vec<QTElement>,
    pub history: Vec<usize>,
}

impl QuantumSeed {
    /// Initial seed: `X_i = X^{e_i}` in its own torus.
    pub fn initial(pair: CompatiblePair) -> Result<Self, SeedError> {
        let m = pair.m();
        let form = Arc::new(pair.lambda.clone());
        let variables = (0..m)
            .map(|i| {
                let mut g = vec![0i64; m];
                g[i] = 1;
                QTElement::monomial(form.clone(), g)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QuantumSeed {
            pair,
            variables,
            history: Vec::new(),
        })
    }

    pub fn m(&self) -> usize {
        self.pair.m()
    }

    pub fn n(&self) -> usize {
        self.pair.n()
    }

    /// Mutation in direction `k` (0-based, `k < n`).
    pub fn mutate(&self, k: usize) -> Result<QuantumSeed, SeedError> {
        let m = self.m();
        let n = self.n();
        if k >= n {
            return Err(SeedError::BadDirection(k + 1, n));
        }
        let lam = &self.pair.lambda;
        let b = &self.pair.b;

        // Λ': Λ'_{ik} = Λ(e_i, −e_k + Σ_l [b_{lk}]_+ e_l), rest unchanged
        let mut lam2 = lam.rows();
        for i in 0..m {
            if i == k {
                continue;
            }
            let mut v = -lam.entry(i, k);
            for l in 0..m {
                if b[l][k] > 0 {
                    v += b[l][k] * lam.entry(i, l);
                }
            }
            lam2[i][k] = v;
            lam2[k][i] = -v;
        }
        lam2[k][k] = 0;

        // B': mutation at k
        let mut b2 = b.clone();
        for i in 0..m {
            for j in 0..n {
                if i == k || j == k {
                    b2[i][j] = -b[i][j];
                } else {
                    b2[i][j] =
                        b[i][j] + b[i][k].max(0) * b[k][j] + b[i][k] * (-b[k][j]).max(0);
                }
            }
        }

        // X'_k in the initial torus: numerator with the −e_k factor cleared,
        // then left division by the current X_k.
        let (bp, bm) = self.pair.b_column_pm(k);
        let mut ek = vec![0i64; m];
        ek[k] = 1;
        let mut numerator: Option<QTElement> = None;
        for half in [&bp, &bm] {
            let mut a = half.clone();
            a[k] -= 1; // a^± = −e_k + (b_k)_±
            let twist = lam.eval(&a, &ek);
            let term = normalized_monomial(lam, half, &self.variables)?
                .scale(&QCoeff::q_half(twist));
            numerator = Some(match numerator {
                None => term,
                Some(acc) => acc.add(&term)?,
            });
        }
        let new_var = exact_divide(&numerator.unwrap(), &self.variables[k])?;

        let mut variables = self.variables.clone();
        variables[k] = new_var;
        let mut history = self.history.clone();
        history.push(k);
        let pair = CompatiblePair::new(b2, SkewForm::new(lam2).map_err(|_| SeedError::NotSkew)?)?;
        Ok(QuantumSeed {
            pair,
            variables,
            history,
        })
    }
}

/// Apply `path` (0-based directions) to the seed and return `variables[target]`.
pub fn variable_along_path(
    initial: &QuantumSeed,
    path: &[usize],
    target: usize,
) -> Result<QTElement, SeedError> {
    let mut seed = initial.clone();
    for &k in path {
        seed = seed.mutate(k)?;
    }
    Ok(seed.variables[target].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2_pair() -> CompatiblePair {
        let b = vec![vec![0, 1], vec![-1, 0]];
        let lam = SkewForm::new(vec![vec![0, 1], vec![-1, 0]]).unwrap();
        CompatiblePair::new(b, lam).unwrap()
    }

    #[test]
    fn check_compatible_examples() {
        assert!(check_compatible(
            &[vec![0, 1], vec![-1, 0]],
            &[vec![0, 1], vec![-1, 0]]
        )
        .is_ok());
        assert!(matches!(
            check_compatible(&[vec![0, 1], vec![-1, 0]], &[vec![0, 2], vec![-2, 0]]),
            Err(SeedError::NotCompatible(0, 0))
        ));
        assert!(matches!(
            check_compatible(&[vec![0, 1], vec![-1, 0]], &[vec![1, 0], vec![0, 1]]),
            Err(SeedError::NotSkew)
        ));
    }

    #[test]
    fn solve_lambda_a2() {
        let b = vec![vec![0, 1], vec![-1, 0]];
        let lam = solve_lambda(&b).unwrap();
        CompatiblePair::new(b, lam).unwrap();
    }

    #[test]
    fn solve_lambda_rejects_rank_deficient() {
        let b = vec![vec![0, 0], vec![0, 0]];
        assert!(solve_lambda(&b).is_err());
    }

    #[test]
    fn a2_first_mutation() {
        let seed = QuantumSeed::initial(a2_pair()).unwrap();
        let s1 = seed.mutate(0).unwrap();
        let x = &s1.variables[0];
        assert_eq!(x.num_terms(), 2);
        assert_eq!(x.coeff(&[-1, 0]), QCoeff::one());
        assert_eq!(x.coeff(&[-1, 1]), QCoeff::one());
        // B' flips sign in row/column k
        assert_eq!(s1.pair.b, vec![vec![0, -1], vec![1, 0]]);
        s1.pair.check().unwrap();
    }

    #[test]
    fn mutation_is_involutive() {
        let seed = QuantumSeed::initial(a2_pair()).unwrap();
        for k in 0..2 {
            let back = seed.mutate(k).unwrap().mutate(k).unwrap();
            assert_eq!(back.pair.b, seed.pair.b);
            assert_eq!(back.pair.lambda, seed.pair.lambda);
            for i in 0..2 {
                assert_eq!(back.variables[i], seed.variables[i]);
            }
        }
    }

    #[test]
    fn a2_path_support() {
        let seed = QuantumSeed::initial(a2_pair()).unwrap();
        let x = variable_along_path(&seed, &[0, 1], 1).unwrap();
        let mut support = x.support();
        support.sort();
        assert_eq!(
            support,
            vec![vec![-1, -1], vec![-1, 0], vec![0, -1]]
        );
        assert!(x.all_coefficients_nonnegative());
        // pentagon recurrence: five mutations restore the A2 cluster
        let s5 = [0, 1, 0, 1, 0]
            .iter()
            .fold(seed.clone(), |s, &k| s.mutate(k).unwrap());
        let mut vars: Vec<_> = s5.variables.iter().map(|v| format!("{v}")).collect();
        vars.sort();
        let mut init: Vec<_> = seed.variables.iter().map(|v| format!("{v}")).collect();
        init.sort();
        assert_eq!(vars, init);
    }

    #[test]
    fn laurent_phenomenon_no_division_failure() {
        let seed = QuantumSeed::initial(a2_pair()).unwrap();
        // all words of length ≤ 6 over {0,1}
        fn rec(seed: &QuantumSeed, depth: usize) {
            if depth == 0 {
                return;
            }
            for k in 0..seed.n() {
                let s = seed.mutate(k).expect("Laurent phenomenon");
                for v in &s.variables {
                    assert!(v.all_coefficients_nonnegative());
                }
                rec(&s, depth - 1);
            }
        }
        rec(&seed, 4);
    }
}
