//! Exact rational simplex for `max c·x` subject to `Ax <= b`, `x >= 0`, `b >= 0`.
//!
//! The slack basis is feasible because `b >= 0`, so a single phase suffices.
//! Pivoting follows Bland's rule. The optimal dual is read off the final
//! tableau and can be re-checked independently with [`check_dual`].

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("constraint {0} has a negative right-hand side")]
    NegativeRhs(usize),
    #[error("row {row} has {got} coefficients, expected {expected}")]
    Shape { row: usize, expected: usize, got: usize },
    #[error("objective is unbounded along variable {0}")]
    Unbounded(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub objective: BigRational,
    pub primal: Vec<BigRational>,
    pub dual: Vec<BigRational>,
    pub pivots: usize,
}

pub fn maximize(a: &[Vec<BigRational>], b: &[BigRational], c: &[BigRational]) -> Result<LpSolution, LpError> {
    let m = a.len();
    let n = c.len();
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(LpError::Shape { row: i, expected: n, got: row.len() });
        }
        if b[i].is_negative() {
            return Err(LpError::NegativeRhs(i));
        }
    }
    let width = n + m;
    let mut tab: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend((0..m).map(|k| if k == i { one() } else { BigRational::zero() }));
            row
        })
        .collect();
    let mut rhs = b.to_vec();
    let mut basis: Vec<usize> = (n..width).collect();
    // Reduced costs c_j - c_B B^-1 A_j.
    let mut reduced: Vec<BigRational> = c.iter().cloned().chain((0..m).map(|_| BigRational::zero())).collect();
    let mut objective = BigRational::zero();
    let mut pivots = 0;

    while let Some(enter) = (0..width).find(|&j| reduced[j].is_positive()) {
        let mut leave: Option<usize> = None;
        let mut best = BigRational::zero();
        for i in 0..m {
            if !tab[i][enter].is_positive() {
                continue;
            }
            let ratio = &rhs[i] / &tab[i][enter];
            let better = match leave {
                None => true,
                Some(l) => ratio < best || (ratio == best && basis[i] < basis[l]),
            };
            if better {
                best = ratio;
                leave = Some(i);
            }
        }
        let Some(r) = leave else {
            return Err(LpError::Unbounded(enter));
        };

        let piv = tab[r][enter].clone();
        for x in tab[r].iter_mut() {
            *x /= &piv;
        }
        rhs[r] /= &piv;
        let prow = tab[r].clone();
        let prhs = rhs[r].clone();
        for i in 0..m {
            if i == r || tab[i][enter].is_zero() {
                continue;
            }
            let f = tab[i][enter].clone();
            for (x, p) in tab[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
            rhs[i] -= &f * &prhs;
        }
        let f = reduced[enter].clone();
        for (x, p) in reduced.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *x -= &f * p;
            }
        }
        objective += &f * &prhs;
        basis[r] = enter;
        pivots += 1;
    }

    let mut primal = vec![BigRational::zero(); n];
    for (i, &v) in basis.iter().enumerate() {
        if v < n {
            primal[v] = rhs[i].clone();
        }
    }
    let dual = (0..m).map(|i| -reduced[n + i].clone()).collect();
    Ok(LpSolution { objective, primal, dual, pivots })
}

/// Weak-duality certificate: `y >= 0`, `yA >= c` and `y·b == value` prove
/// that `value` is the optimum of the primal maximisation.
pub fn check_dual(a: &[Vec<BigRational>], b: &[BigRational], c: &[BigRational], y: &[BigRational], value: &BigRational) -> bool {
    if y.len() != a.len() || y.iter().any(|v| v.is_negative()) {
        return false;
    }
    let feasible = (0..c.len()).all(|j| {
        let col: BigRational = a.iter().zip(y).map(|(row, yi)| &row[j] * yi).sum();
        col >= c[j]
    });
    let yb: BigRational = y.iter().zip(b).map(|(yi, bi)| yi * bi).sum();
    feasible && &yb == value
}

/// Primal feasibility of `x` for `Ax <= b`, `x >= 0`.
pub fn check_primal(a: &[Vec<BigRational>], b: &[BigRational], x: &[BigRational]) -> bool {
    x.iter().all(|v| !v.is_negative())
        && a.iter().zip(b).all(|(row, bi)| {
            let lhs: BigRational = row.iter().zip(x).map(|(aij, xj)| aij * xj).sum();
            &lhs <= bi
        })
}

fn one() -> BigRational {
    BigRational::from_integer(1.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn single_constraint() {
        // max a + b s.t. 2a + b <= 3
        let a = mat(&[&[2, 1]]);
        let b = vec![q(3)];
        let c = vec![q(1), q(1)];
        let s = maximize(&a, &b, &c).unwrap();
        assert_eq!(s.objective, q(3));
        assert_eq!(s.primal, vec![q(0), q(3)]);
        assert!(check_dual(&a, &b, &c, &s.dual, &s.objective));
    }

    #[test]
    fn textbook_example() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 → 36 at (2,6)
        let a = mat(&[&[1, 0], &[0, 2], &[3, 2]]);
        let b = vec![q(4), q(12), q(18)];
        let c = vec![q(3), q(5)];
        let s = maximize(&a, &b, &c).unwrap();
        assert_eq!(s.objective, q(36));
        assert_eq!(s.primal, vec![q(2), q(6)]);
        assert!(check_dual(&a, &b, &c, &s.dual, &s.objective));
        assert!(!check_dual(&a, &b, &c, &s.dual, &q(35)));
    }

    #[test]
    fn unbounded_and_bad_input() {
        let a = mat(&[&[1, 0]]);
        assert_eq!(maximize(&a, &[q(1)], &[q(1), q(1)]), Err(LpError::Unbounded(1)));
        assert_eq!(maximize(&a, &[q(-1)], &[q(1), q(1)]), Err(LpError::NegativeRhs(0)));
        assert!(matches!(maximize(&a, &[q(1)], &[q(1)]), Err(LpError::Shape { .. })));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic cycling example under the largest-coefficient rule.
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let a = vec![
            vec![r(1, 4), q(-60), r(-1, 25), q(9)],
            vec![r(1, 2), q(-90), r(-1, 50), q(3)],
            vec![q(0), q(0), q(1), q(0)],
        ];
        let b = vec![q(0), q(0), q(1)];
        let c = vec![r(3, 4), q(-150), r(1, 50), q(-6)];
        let s = maximize(&a, &b, &c).unwrap();
        assert_eq!(s.objective, r(1, 20));
        assert!(check_dual(&a, &b, &c, &s.dual, &s.objective));
    }

    proptest! {
        #[test]
        fn optimum_is_certified(rows in prop::collection::vec(prop::collection::vec(1i64..6, 3), 1..4), rhs in prop::collection::vec(0i64..20, 4)) {
            let a: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
            let b: Vec<BigRational> = rhs[..a.len()].iter().map(|&x| q(x)).collect();
            let c = vec![q(1), q(2), q(1)];
            let s = maximize(&a, &b, &c).unwrap();
            prop_assert!(check_primal(&a, &b, &s.primal));
            let cx: BigRational = s.primal.iter().zip(&c).map(|(x, c)| x * c).sum();
            prop_assert_eq!(&cx, &s.objective);
            prop_assert!(check_dual(&a, &b, &c, &s.dual, &s.objective));
        }
    }
}
