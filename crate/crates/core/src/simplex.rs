//! Exact solver for covering LPs `min c·x, A x ≥ b, x ≥ 0` with small nonnegative integer
//! `A` and `b`.
//!
//! The dual `max b·y, Aᵀy ≤ c, y ≥ 0` is solved by a revised simplex in rationals with
//! Bland's rule. A floating-point tableau run supplies the starting basis when it fits in
//! memory; the exact phase then either certifies it or keeps pivoting from it.

use crate::error::{Error, Result};
use crate::rational::Q;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense float tableaus above this many entries are skipped.
const FLOAT_TABLEAU_LIMIT: usize = 40_000_000;
const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CoveringLp {
    /// Sparse rows of `A`: `(column, coefficient)`, coefficients positive.
    pub rows: Vec<Vec<(usize, i64)>>,
    pub rhs: Vec<i64>,
    pub cost: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: Q,
    /// Primal point, one entry per column.
    pub x: Vec<Q>,
    /// Dual point, one entry per row.
    pub y: Vec<Q>,
    /// Exact pivots performed after the warm start.
    pub exact_pivots: usize,
}

impl CoveringLp {
    pub fn columns(&self) -> usize {
        self.cost.len()
    }

    pub fn row_activity(&self, i: usize, x: &[Q]) -> Q {
        self.rows[i].iter().map(|&(j, a)| &x[j] * Q::from_integer(BigInt::from(a))).sum()
    }

    /// Aᵀy for column `j`.
    fn column_loads(&self, y: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.columns()];
        for (i, row) in self.rows.iter().enumerate() {
            if y[i].is_zero() {
                continue;
            }
            for &(j, a) in row {
                out[j] += &y[i] * Q::from_integer(BigInt::from(a));
            }
        }
        out
    }

    pub fn primal_feasible(&self, x: &[Q]) -> bool {
        x.len() == self.columns()
            && x.iter().all(|v| !v.is_negative())
            && (0..self.rows.len()).all(|i| self.row_activity(i, x) >= Q::from_integer(BigInt::from(self.rhs[i])))
    }

    pub fn dual_feasible(&self, y: &[Q]) -> bool {
        y.len() == self.rows.len()
            && y.iter().all(|v| !v.is_negative())
            && self.column_loads(y).iter().zip(&self.cost).all(|(l, c)| l <= c)
    }

    pub fn primal_value(&self, x: &[Q]) -> Q {
        x.iter().zip(&self.cost).map(|(a, b)| a * b).sum()
    }

    pub fn dual_value(&self, y: &[Q]) -> Q {
        y.iter().zip(&self.rhs).map(|(a, &b)| a * Q::from_integer(BigInt::from(b))).sum()
    }

    /// Both points feasible with equal objective: an optimality certificate.
    pub fn certify(&self, x: &[Q], y: &[Q]) -> bool {
        self.primal_feasible(x) && self.dual_feasible(y) && self.primal_value(x) == self.dual_value(y)
    }

    /// Complementary slackness of a primal-dual pair, checked term by term.
    pub fn complementary(&self, x: &[Q], y: &[Q]) -> bool {
        let loads = self.column_loads(y);
        let rows_ok = (0..self.rows.len())
            .all(|i| y[i].is_zero() || self.row_activity(i, x) == Q::from_integer(BigInt::from(self.rhs[i])));
        let cols_ok = (0..self.columns()).all(|j| x[j].is_zero() || loads[j] == self.cost[j]);
        rows_ok && cols_ok
    }
}

pub fn solve_covering(lp: &CoveringLp) -> Result<LpSolution> {
    let n = lp.columns();
    let m = lp.rows.len();
    if lp.cost.iter().any(|c| c.is_negative()) || lp.rhs.iter().any(|&b| b < 0) {
        return Err(Error::InvalidInstance("covering LP needs nonnegative costs and right-hand sides".into()));
    }
    if n == 0 {
        return if lp.rhs.iter().all(|&b| b <= 0) {
            Ok(LpSolution { value: Q::zero(), x: vec![], y: vec![Q::zero(); m], exact_pivots: 0 })
        } else {
            Err(Error::InvalidInstance("covering LP without columns is infeasible".into()))
        };
    }
    let warm = if n * (n + m) <= FLOAT_TABLEAU_LIMIT { float_basis(lp) } else { None };
    let mut solver = Revised::new(lp);
    if let Some(basis) = warm {
        if !solver.load_basis(&basis) {
            log::debug!("float basis rejected, starting exact phase from slacks");
            solver = Revised::new(lp);
        }
    }
    solver.run()
}

/// Float tableau for the dual; returns the final basis (column ids in `0..m+n`, where
/// `m + j` is the slack of column `j`).
fn float_basis(lp: &CoveringLp) -> Option<Vec<usize>> {
    let n = lp.columns();
    let m = lp.rows.len();
    let width = m + n + 1;
    let mut t = vec![0.0f64; n * width];
    for (i, row) in lp.rows.iter().enumerate() {
        for &(j, a) in row {
            t[j * width + i] = a as f64;
        }
    }
    for j in 0..n {
        t[j * width + m + j] = 1.0;
        t[j * width + m + n] = lp.cost[j].to_f64()?;
    }
    let mut obj: Vec<f64> = lp.rhs.iter().map(|&b| b as f64).chain(std::iter::repeat(0.0).take(n + 1)).collect();
    let mut basis: Vec<usize> = (m..m + n).collect();
    let mut stall = 0usize;
    for _ in 0..200_000 {
        let bland = stall > 50;
        let entering = if bland {
            (0..m + n).find(|&c| obj[c] > EPS)
        } else {
            (0..m + n).filter(|&c| obj[c] > EPS).max_by(|&a, &b| obj[a].partial_cmp(&obj[b]).unwrap().then(b.cmp(&a)))
        };
        let Some(c) = entering else { return Some(basis) };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..n {
            let d = t[r * width + c];
            if d > EPS {
                let ratio = t[r * width + m + n] / d;
                let better = match leave {
                    None => true,
                    Some((lr, lv)) => ratio < lv - EPS || (ratio <= lv + EPS && basis[r] < basis[lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let (r, ratio) = leave?;
        stall = if ratio.abs() <= EPS { stall + 1 } else { 0 };
        let piv = t[r * width + c];
        for k in 0..width {
            t[r * width + k] /= piv;
        }
        let prow: Vec<f64> = t[r * width..(r + 1) * width].to_vec();
        for rr in 0..n {
            if rr == r {
                continue;
            }
            let f = t[rr * width + c];
            if f != 0.0 {
                for k in 0..width {
                    t[rr * width + k] -= f * prow[k];
                }
            }
        }
        let f = obj[c];
        for k in 0..width {
            obj[k] -= f * prow[k];
        }
        basis[r] = c;
    }
    None
}

/// Revised simplex on the dual with an explicit exact basis inverse.
struct Revised<'a> {
    lp: &'a CoveringLp,
    m: usize,
    n: usize,
    basis: Vec<usize>,
    binv: Vec<Vec<Q>>,
    z: Vec<Q>,
    rhs_q: Vec<Q>,
}

impl<'a> Revised<'a> {
    fn new(lp: &'a CoveringLp) -> Self {
        let (m, n) = (lp.rows.len(), lp.columns());
        let binv = (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect();
        Revised {
            lp,
            m,
            n,
            basis: (m..m + n).collect(),
            binv,
            z: lp.cost.clone(),
            rhs_q: lp.rhs.iter().map(|&b| Q::from_integer(BigInt::from(b))).collect(),
        }
    }

    /// Column `c` of [Aᵀ | I] as sparse entries.
    fn column(&self, c: usize) -> Vec<(usize, Q)> {
        if c < self.m {
            self.lp.rows[c].iter().map(|&(j, a)| (j, Q::from_integer(BigInt::from(a)))).collect()
        } else {
            vec![(c - self.m, Q::one())]
        }
    }

    fn objective(&self, c: usize) -> Q {
        if c < self.m {
            self.rhs_q[c].clone()
        } else {
            Q::zero()
        }
    }

    /// Installs `basis` if it is nonsingular and primal feasible in exact arithmetic.
    fn load_basis(&mut self, basis: &[usize]) -> bool {
        let n = self.n;
        let mut a: Vec<Vec<Q>> = vec![vec![Q::zero(); n]; n];
        for (k, &c) in basis.iter().enumerate() {
            for (j, v) in self.column(c) {
                a[j][k] = v;
            }
        }
        let Some(inv) = invert(a) else { return false };
        let z: Vec<Q> = (0..n).map(|k| (0..n).map(|j| &inv[k][j] * &self.lp.cost[j]).sum()).collect();
        if z.iter().any(|v| v.is_negative()) {
            return false;
        }
        self.basis = basis.to_vec();
        self.binv = inv;
        self.z = z;
        true
    }

    fn multipliers(&self) -> Vec<Q> {
        let mut x = vec![Q::zero(); self.n];
        for (k, &c) in self.basis.iter().enumerate() {
            let cb = self.objective(c);
            if cb.is_zero() {
                continue;
            }
            for (j, xj) in x.iter_mut().enumerate() {
                if !self.binv[k][j].is_zero() {
                    *xj += &cb * &self.binv[k][j];
                }
            }
        }
        x
    }

    fn run(mut self) -> Result<LpSolution> {
        let mut pivots = 0usize;
        loop {
            let x = self.multipliers();
            let mut in_basis = vec![false; self.m + self.n];
            for &c in &self.basis {
                in_basis[c] = true;
            }
            let entering = (0..self.m + self.n).find(|&c| {
                !in_basis[c] && {
                    let priced: Q = self.column(c).iter().map(|(j, v)| v * &x[*j]).sum();
                    self.objective(c) > priced
                }
            });
            let Some(c) = entering else {
                let mut y = vec![Q::zero(); self.m];
                for (k, &b) in self.basis.iter().enumerate() {
                    if b < self.m {
                        y[b] = self.z[k].clone();
                    }
                }
                let value = self.lp.dual_value(&y);
                debug_assert_eq!(value, self.lp.primal_value(&x));
                return Ok(LpSolution { value, x, y, exact_pivots: pivots });
            };
            let col = self.column(c);
            let d: Vec<Q> = (0..self.n).map(|k| col.iter().map(|(j, v)| v * &self.binv[k][*j]).sum()).collect();
            let mut leave: Option<(usize, Q)> = None;
            for k in 0..self.n {
                if d[k].is_positive() {
                    let ratio = &self.z[k] / &d[k];
                    let better = match &leave {
                        None => true,
                        Some((lk, lv)) => ratio < *lv || (ratio == *lv && self.basis[k] < self.basis[*lk]),
                    };
                    if better {
                        leave = Some((k, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::InvalidInstance("covering LP is infeasible".into()));
            };
            let piv = d[r].clone();
            for v in self.binv[r].iter_mut() {
                *v /= &piv;
            }
            self.z[r] /= &piv;
            let prow = self.binv[r].clone();
            let pz = self.z[r].clone();
            for k in 0..self.n {
                if k == r || d[k].is_zero() {
                    continue;
                }
                for (j, pv) in prow.iter().enumerate() {
                    if !pv.is_zero() {
                        let delta = &d[k] * pv;
                        self.binv[k][j] -= delta;
                    }
                }
                let dz = &d[k] * &pz;
                self.z[k] -= dz;
            }
            self.basis[r] = c;
            pivots += 1;
        }
    }
}

/// Exact Gauss-Jordan inverse; `None` if singular.
fn invert(mut a: Vec<Vec<Q>>) -> Option<Vec<Vec<Q>>> {
    let n = a.len();
    let mut inv: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        inv.swap(col, p);
        let piv = a[col][col].clone();
        if !piv.is_one() {
            for v in a[col].iter_mut().chain(inv[col].iter_mut()) {
                if !v.is_zero() {
                    *v /= &piv;
                }
            }
        }
        let (arow, irow) = (a[col].clone(), inv[col].clone());
        let a_nz: Vec<usize> = (0..n).filter(|&j| !arow[j].is_zero()).collect();
        let i_nz: Vec<usize> = (0..n).filter(|&j| !irow[j].is_zero()).collect();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for &j in &a_nz {
                let delta = &f * &arow[j];
                a[r][j] -= delta;
            }
            for &j in &i_nz {
                let delta = &f * &irow[j];
                inv[r][j] -= delta;
            }
        }
    }
    Some(inv)
}

/// Rounds a rational for logging.
pub fn approx(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Q {
        Q::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn two_variable_cover() {
        // min 3t + 6p  s.t. t + 2p ≥ 1, t ≥ 0 ... written as rows
        let lp = CoveringLp { rows: vec![vec![(0, 1), (1, 2)]], rhs: vec![1], cost: vec![q(3, 1), q(6, 1)] };
        let sol = solve_covering(&lp).unwrap();
        assert_eq!(sol.value, q(3, 1));
        assert!(lp.certify(&sol.x, &sol.y));
        assert!(lp.complementary(&sol.x, &sol.y));
    }

    #[test]
    fn fractional_optimum() {
        // triangle edge cover: each pair of columns must sum to 1
        let lp = CoveringLp {
            rows: vec![vec![(0, 1), (1, 1)], vec![(1, 1), (2, 1)], vec![(0, 1), (2, 1)]],
            rhs: vec![1, 1, 1],
            cost: vec![q(1, 1); 3],
        };
        let sol = solve_covering(&lp).unwrap();
        assert_eq!(sol.value, q(3, 2));
        assert!(lp.certify(&sol.x, &sol.y));
    }

    #[test]
    fn exact_phase_alone_agrees() {
        let lp = CoveringLp {
            rows: vec![vec![(0, 2), (1, 1)], vec![(1, 1), (2, 3)], vec![(0, 1), (2, 1)], vec![(0, 1), (1, 1), (2, 1)]],
            rhs: vec![2, 3, 1, 2],
            cost: vec![q(5, 2), q(3, 1), q(7, 3)],
        };
        let warm = solve_covering(&lp).unwrap();
        let cold = Revised::new(&lp).run().unwrap();
        assert_eq!(warm.value, cold.value);
        assert!(lp.certify(&cold.x, &cold.y));
    }

    #[test]
    fn infeasible_row_is_reported() {
        let lp = CoveringLp { rows: vec![vec![]], rhs: vec![1], cost: vec![q(1, 1)] };
        assert!(solve_covering(&lp).is_err());
    }
}
