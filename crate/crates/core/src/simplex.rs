//! Self-contained dense simplex solver with Bland's rule, used for the tiny
//! linear programs behind zonotope gauges and polytope cell witnesses
//! (instances here have at most a few dozen variables).

use crate::Real;

const PIVOT_TOL: Real = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<Real>,
    pub objective: Real,
}

/// Minimize `c . x` subject to `a x = b`, `x >= 0`.
///
/// Two-phase tableau simplex; Bland's rule makes it cycle-free. Rows of `a`
/// must all have the same length as `c`.
pub fn solve(a: &[Vec<Real>], b: &[Real], c: &[Real]) -> LpSolution {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), m);

    // tableau: m rows of [n structural | m artificial | rhs]
    let cols = n + m;
    let mut t: Vec<Vec<Real>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![0.0; cols + 1];
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            row[j] = flip * a[i][j];
        }
        row[n + i] = 1.0;
        row[cols] = flip * b[i];
        t.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // phase I: minimize sum of artificials
    let mut obj = vec![0.0; cols + 1];
    for j in n..cols {
        obj[j] = 1.0;
    }
    price_out(&mut obj, &t, &basis);
    if !run_simplex(&mut t, &mut obj, &mut basis, n + m) {
        // phase I is always bounded below by 0
        unreachable!("phase I unbounded");
    }
    if obj[cols].abs() > 1e-7 {
        return LpSolution {
            status: LpStatus::Infeasible,
            x: vec![0.0; n],
            objective: 0.0,
        };
    }
    // drive artificials out of the basis where possible
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| t[i][j].abs() > 1e-8) {
                pivot(&mut t, &mut obj, i, j);
                basis[i] = j;
            }
            // else: redundant row, leave the artificial at value 0
        }
    }

    // phase II
    let mut obj2 = vec![0.0; cols + 1];
    obj2[..n].copy_from_slice(c);
    price_out(&mut obj2, &t, &basis);
    if !run_simplex(&mut t, &mut obj2, &mut basis, n) {
        return LpSolution {
            status: LpStatus::Unbounded,
            x: vec![0.0; n],
            objective: Real::NEG_INFINITY,
        };
    }

    let mut x = vec![0.0; n];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < n {
            x[bj] = t[i][cols];
        }
    }
    let objective = -obj2[cols];
    LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
    }
}

/// Reduce the objective row against the current basis.
fn price_out(obj: &mut [Real], t: &[Vec<Real>], basis: &[usize]) {
    for (i, &bj) in basis.iter().enumerate() {
        let f = obj[bj];
        if f != 0.0 {
            for (o, v) in obj.iter_mut().zip(&t[i]) {
                *o -= f * v;
            }
        }
    }
}

/// Returns false on unboundedness. `active` limits eligible entering columns
/// (phase II excludes artificials).
fn run_simplex(t: &mut [Vec<Real>], obj: &mut [Real], basis: &mut [usize], active: usize) -> bool {
    let m = t.len();
    let rhs = obj.len() - 1;
    loop {
        // Bland: smallest index with negative reduced cost
        let enter = match (0..active).find(|&j| obj[j] < -1e-9) {
            Some(j) => j,
            None => return true,
        };
        let mut leave: Option<usize> = None;
        let mut best = Real::INFINITY;
        for i in 0..m {
            if t[i][enter] > PIVOT_TOL {
                let ratio = t[i][rhs] / t[i][enter];
                // Bland tie-break: smallest basis index
                if ratio < best - 1e-12
                    || (ratio < best + 1e-12
                        && leave.map(|l| basis[i] < basis[l]).unwrap_or(false))
                {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let leave = match leave {
            Some(i) => i,
            None => return false,
        };
        pivot(t, obj, leave, enter);
        basis[leave] = enter;
    }
}

fn pivot(t: &mut [Vec<Real>], obj: &mut [Real], row: usize, col: usize) {
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    for i in 0..t.len() {
        if i != row {
            let f = t[i][col];
            if f != 0.0 {
                let (head, tail) = if i < row {
                    let (a, b) = t.split_at_mut(row);
                    (&mut a[i], &b[0])
                } else {
                    let (a, b) = t.split_at_mut(i);
                    (&mut b[0], &a[row])
                };
                for (x, y) in head.iter_mut().zip(tail.iter()) {
                    *x -= f * y;
                }
            }
        }
    }
    let f = obj[col];
    if f != 0.0 {
        for (x, y) in obj.iter_mut().zip(t[row].iter()) {
            *x -= f * y;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_lp() {
        // min -x1 - x2  s.t. x1 + x2 + s = 1
        let sol = solve(
            &[vec![1.0, 1.0, 1.0]],
            &[1.0],
            &[-1.0, -1.0, 0.0],
        );
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_lp() {
        // x = -1, x >= 0
        let sol = solve(&[vec![1.0]], &[-1.0], &[0.0]);
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_lp() {
        // min -x s.t. x - s = 0
        let sol = solve(&[vec![1.0, -1.0]], &[0.0], &[-1.0, 0.0]);
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn degenerate_does_not_cycle() {
        // classic degenerate instance
        let a = vec![
            vec![0.5, -5.5, -2.5, 9.0, 1.0, 0.0, 0.0],
            vec![0.5, -1.5, -0.5, 1.0, 0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        ];
        let b = vec![0.0, 0.0, 1.0];
        let c = vec![-10.0, 57.0, 9.0, 24.0, 0.0, 0.0, 0.0];
        let sol = solve(&a, &b, &c);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 1.0).abs() < 1e-8);
    }
}
