//! Covering of an origin-symmetric polytope P = { |<a_i, x>| <= b_i } by
//! slab cells. Each slab splits into 2k geometric sub-slabs; cells are the
//! products. Nonempty cells are symmetrized about an interior witness by
//! doubling the constraints on each defining slab pair, which keeps the
//! 2-homothet inside (1+eps)P.

use super::{Covering, CoveringBody, Located, PieceGen};
use crate::error::{Error, Result};
use crate::linalg::{dot, solve_f64};
use crate::norms::NormBody;
use crate::rng::SplitMix64;
use crate::simplex::{self, LpStatus};
use crate::{eta, Real};

const CELL_BUDGET: u128 = 400_000;

pub fn cover_polytope(rows: &[Vec<Real>], rhs: &[Real], eps: Real) -> Result<Covering> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("covering eps must lie in (0,1), got {eps}")));
    }
    let parent = NormBody::polytope(rows.to_vec(), rhs.to_vec())?;
    let m = rows.len();
    let n = rows[0].len();
    // round eps down to ((4/3)^k - 1)^{-1}
    let ratio: Real = 4.0 / 3.0;
    let k = ((1.0 + 1.0 / eps).ln() / ratio.ln()).ceil() as u32;
    let eps_eff = 1.0 / (ratio.powi(k as i32) - 1.0);
    let raw = (2 * k as u128).pow(m as u32);

    // normalized sub-slab intervals of [0, 1]: alpha = 1..k, innermost ends at 0
    let mut pos_intervals = Vec::with_capacity(k as usize);
    for alpha in 1..=k {
        let lo = 1.0 - (ratio.powi(alpha as i32) - 1.0) * eps_eff;
        let hi = 1.0 - (ratio.powi(alpha as i32 - 1) - 1.0) * eps_eff;
        pos_intervals.push((lo.max(0.0), hi));
    }

    // separable fast path: m == n with invertible A gives box cells in the
    // slab coordinates, all nonempty, with midpoint witnesses
    if m == n {
        if let Some(inv_cols) = invert(rows) {
            let gen = SlabGen {
                rows: rows.to_vec(),
                rhs: rhs.to_vec(),
                pos_intervals: pos_intervals.clone(),
                inv_cols,
            };
            return Ok(Covering {
                parent,
                epsilon: eps_eff,
                requested_epsilon: eps,
                raw_count: Some(raw),
                global_scale: 1.0,
                gen: PieceGen::SlabProduct(gen),
            });
        }
    }

    // general path: enumerate cells, drop empty ones, symmetrize about the
    // analytic center
    if raw > CELL_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "polytope covering needs (2k)^m = {raw} explicit cells"
        )));
    }
    let mut pieces = Vec::new();
    let opts = 2 * k as usize;
    let mut choice = vec![0usize; m];
    loop {
        if let Some(piece) = build_cell(rows, rhs, &pos_intervals, &choice)? {
            pieces.push(piece);
        }
        let mut i = 0;
        loop {
            if i == m {
                break;
            }
            choice[i] += 1;
            if choice[i] < opts {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == m {
            break;
        }
    }
    let mut cov = Covering::explicit(parent, eps_eff, eps, pieces);
    cov.raw_count = Some(raw);
    Ok(cov)
}

/// Interval of the cell along slab i in absolute units, for option index
/// `opt` in 0..2k (first k options are delta = +1, then delta = -1).
fn cell_interval(pos_intervals: &[(Real, Real)], opt: usize, b: Real) -> (Real, Real) {
    let k = pos_intervals.len();
    if opt < k {
        let (lo, hi) = pos_intervals[opt];
        (lo * b, hi * b)
    } else {
        let (lo, hi) = pos_intervals[opt - k];
        (-hi * b, -lo * b)
    }
}

fn build_cell(
    rows: &[Vec<Real>],
    rhs: &[Real],
    pos_intervals: &[(Real, Real)],
    choice: &[usize],
) -> Result<Option<CoveringBody>> {
    let m = rows.len();
    let n = rows[0].len();
    let bounds: Vec<(Real, Real)> = choice
        .iter()
        .zip(rhs)
        .map(|(&opt, &b)| cell_interval(pos_intervals, opt, b))
        .collect();
    // Chebyshev-style feasibility: maximize the worst slack z
    // vars: x+ (n), x- (n), z, s1 (m), s2 (m)
    let nv = 2 * n + 1 + 2 * m;
    let mut a = Vec::with_capacity(2 * m);
    let mut bb = Vec::with_capacity(2 * m);
    for i in 0..m {
        // a_i x - z - s1 = lo_i
        let mut row = vec![0.0; nv];
        for j in 0..n {
            row[j] = rows[i][j];
            row[n + j] = -rows[i][j];
        }
        row[2 * n] = -1.0;
        row[2 * n + 1 + i] = -1.0;
        a.push(row);
        bb.push(bounds[i].0);
        // a_i x + z + s2 = hi_i
        let mut row = vec![0.0; nv];
        for j in 0..n {
            row[j] = rows[i][j];
            row[n + j] = -rows[i][j];
        }
        row[2 * n] = 1.0;
        row[2 * n + 1 + m + i] = 1.0;
        a.push(row);
        bb.push(bounds[i].1);
    }
    let mut c = vec![0.0; nv];
    c[2 * n] = -1.0; // maximize z
    let sol = simplex::solve(&a, &bb, &c);
    if sol.status != LpStatus::Optimal {
        return Ok(None);
    }
    let z = -sol.objective;
    if z <= 1e-9 {
        return Ok(None); // empty or degenerate cell
    }
    let cheb: Vec<Real> = (0..n).map(|j| sol.x[j] - sol.x[n + j]).collect();
    let witness = analytic_center(rows, &bounds, cheb);
    // symmetrize: |a_i (x - witness)| <= m_i with m_i covering both sides
    let mut mvec = Vec::with_capacity(m);
    for i in 0..m {
        let s = dot(&rows[i], &witness);
        let mi = (bounds[i].1 - s).max(s - bounds[i].0);
        if !(mi > 0.0) {
            return Ok(None);
        }
        mvec.push(mi);
    }
    let body = NormBody::polytope(rows.to_vec(), mvec)?;
    Ok(Some(CoveringBody {
        body,
        center: witness,
    }))
}

/// Newton iteration for the analytic center of { lo_i <= <a_i, x> <= hi_i },
/// started strictly inside; falls back to the start point.
fn analytic_center(rows: &[Vec<Real>], bounds: &[(Real, Real)], start: Vec<Real>) -> Vec<Real> {
    let n = rows[0].len();
    let interior = |x: &[Real]| {
        rows.iter()
            .zip(bounds)
            .all(|(a, &(lo, hi))| {
                let s = dot(a, x);
                s > lo + 1e-12 && s < hi - 1e-12
            })
    };
    if !interior(&start) {
        return start;
    }
    let mut x = start.clone();
    for _ in 0..20 {
        let mut grad = vec![0.0; n];
        let mut hess = vec![vec![0.0; n]; n];
        for (a, &(lo, hi)) in rows.iter().zip(bounds) {
            let s = dot(a, &x);
            let gu = 1.0 / (hi - s);
            let gl = 1.0 / (s - lo);
            let w = gu - gl;
            let h = gu * gu + gl * gl;
            for i in 0..n {
                grad[i] += w * a[i];
                for j in 0..n {
                    hess[i][j] += h * a[i] * a[j];
                }
            }
        }
        let Some(step) = solve_f64(&hess, &grad) else {
            break;
        };
        let gnorm: Real = grad.iter().map(|g| g * g).sum::<Real>().sqrt();
        if gnorm < 1e-10 {
            break;
        }
        // backtrack to stay interior
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..30 {
            let cand: Vec<Real> = x.iter().zip(&step).map(|(xi, si)| xi - t * si).collect();
            if interior(&cand) {
                x = cand;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    x
}

fn invert(rows: &[Vec<Real>]) -> Option<Vec<Vec<Real>>> {
    let n = rows.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(solve_f64(rows, &e)?);
    }
    Some(cols)
}

/// Virtual product covering for invertible slab systems (m = n): cells are
/// boxes in slab coordinates, witnesses are midpoints, and point location
/// factorizes per direction exactly (for both the cell and its 2-homothet).
#[derive(Debug, Clone)]
pub struct SlabGen {
    rows: Vec<Vec<Real>>,
    rhs: Vec<Real>,
    pos_intervals: Vec<(Real, Real)>,
    /// columns of A^{-1}
    inv_cols: Vec<Vec<Real>>,
}

impl SlabGen {
    fn k(&self) -> usize {
        self.pos_intervals.len()
    }

    pub fn count(&self) -> u128 {
        (2 * self.k() as u128).pow(self.rows.len() as u32)
    }

    fn piece(&self, choice: &[usize]) -> CoveringBody {
        let m = self.rows.len();
        let n = self.rows[0].len();
        let mut mvec = Vec::with_capacity(m);
        let mut mids = Vec::with_capacity(m);
        for i in 0..m {
            let (lo, hi) = cell_interval(&self.pos_intervals, choice[i], self.rhs[i]);
            mids.push(0.5 * (lo + hi));
            mvec.push(0.5 * (hi - lo));
        }
        // witness x0 = A^{-1} s_mid (the analytic center of a box of slabs)
        let center: Vec<Real> = (0..n)
            .map(|j| (0..m).map(|i| self.inv_cols[i][j] * mids[i]).sum())
            .collect();
        CoveringBody {
            body: NormBody::polytope(self.rows.clone(), mvec).expect("positive half widths"),
            center,
        }
    }

    pub fn sample_piece(&self, rng: &mut SplitMix64) -> CoveringBody {
        let choice: Vec<usize> = (0..self.rows.len())
            .map(|_| rng.below(2 * self.k() as u64) as usize)
            .collect();
        self.piece(&choice)
    }

    pub fn locate(&self, x: &[Real], factor: Real) -> Result<Option<Located>> {
        let m = self.rows.len();
        let mut choice = Vec::with_capacity(m);
        let mut worst: Real = 0.0;
        for i in 0..m {
            let s = dot(&self.rows[i], x);
            let mut found = None;
            for opt in 0..2 * self.k() {
                let (lo, hi) = cell_interval(&self.pos_intervals, opt, self.rhs[i]);
                let mid = 0.5 * (lo + hi);
                let half = 0.5 * (hi - lo);
                let excess = (s - mid).abs() / half;
                if excess <= factor + eta() {
                    found = Some((opt, excess));
                    break;
                }
            }
            match found {
                Some((opt, excess)) => {
                    choice.push(opt);
                    worst = worst.max(excess);
                }
                None => return Ok(None),
            }
        }
        Ok(Some(Located {
            piece: self.piece(&choice),
            gauge: worst,
        }))
    }
}
