//! Baseline covering by translated copies of (eps/2)K: a greedy net when the
//! candidate grid is affordable (its size obeys the classical packing bound),
//! otherwise a virtual axis-grid with projected centers and O(1) point
//! location.

use super::{radial_clamp, Covering, CoveringBody, Located, PieceGen};
use crate::error::{Error, Result};
use crate::linalg::{scale as vscale, sub};
use crate::norms::NormBody;
use crate::rng::SplitMix64;
use crate::{eta, Real};

const CANDIDATE_BUDGET: usize = 400_000;
const COUNT_BUDGET: u128 = 40_000_000;

pub fn cover_grid(body: &NormBody, eps: Real) -> Result<Covering> {
    cover_grid_with_budget(body, eps, usize::MAX)
}

pub fn cover_grid_with_budget(body: &NormBody, eps: Real, max_pieces: usize) -> Result<Covering> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("covering eps must lie in (0,1), got {eps}")));
    }
    let n = body.dim();
    let (r, big_r) = body.sandwich()?;
    let nf = n as Real;

    // greedy explicit path
    for denom in [64.0, 16.0] {
        let ch = eps / denom; // candidate gauge resolution
        let g = 2.0 * ch * r / nf.sqrt();
        let b = (big_r * (1.0 + ch) / g).ceil() as u128 + 1;
        let box_count = (2 * b + 1).checked_pow(n as u32).unwrap_or(u128::MAX);
        if box_count <= CANDIDATE_BUDGET as u128 {
            let cov = greedy_cover(body, eps, ch, g, b as i64)?;
            if let Some(len) = cov.len() {
                if len <= max_pieces as u128 {
                    return Ok(cov);
                }
                return Err(Error::BudgetExceeded(format!(
                    "grid covering has {len} pieces, cap {max_pieces}"
                )));
            }
            return Ok(cov);
        }
    }

    // virtual axis grid: step chosen so a cell has gauge radius <= eps/4;
    // centers are clamped radially into K, which keeps the doubled pieces
    // inside (1+eps)K exactly
    let step = eps * r / (2.0 * nf.sqrt());
    let bound = ((1.0 + eps / 4.0) * big_r / step).ceil() as i64 + 1;
    let gen = GridGen {
        parent: body.clone(),
        shape: body.scaled(eps / 2.0),
        step,
        accept: 1.0 + eps / 4.0,
        bound,
        dim: n,
    };
    if let Some(c) = gen.count() {
        if c > max_pieces as u128 {
            return Err(Error::BudgetExceeded(format!(
                "grid covering has {c} pieces, cap {max_pieces}"
            )));
        }
    }
    Ok(Covering {
        parent: body.clone(),
        epsilon: eps,
        requested_epsilon: eps,
        raw_count: None,
        global_scale: 1.0,
        gen: PieceGen::Grid(gen),
    })
}

/// Greedy net over a fine candidate grid. Centers are pairwise more than
/// theta = eps/2 - 2 ch apart in gauge distance, which gives the packing
/// bound N <= (2/theta + 1)^n <= (5/eps)^n for ch <= eps/64.
fn greedy_cover(body: &NormBody, eps: Real, ch: Real, g: Real, b: i64) -> Result<Covering> {
    let n = body.dim();
    let theta = eps / 2.0 - 2.0 * ch;
    let shape = body.scaled(eps / 2.0);
    let mut centers: Vec<Vec<Real>> = Vec::new();
    let mut z = vec![-b; n];
    loop {
        let c: Vec<Real> = z.iter().map(|&zi| zi as Real * g).collect();
        let gc = body.gauge(&c)?;
        if gc <= 1.0 + ch {
            let cand = if gc > 1.0 { vscale(&c, 1.0 / gc) } else { c };
            let mut covered = false;
            for kept in centers.iter().rev() {
                if body.gauge(&sub(&cand, kept))? <= theta {
                    covered = true;
                    break;
                }
            }
            if !covered {
                centers.push(cand);
            }
        }
        // odometer
        let mut i = 0;
        loop {
            if i == n {
                let pieces = centers
                    .into_iter()
                    .map(|center| CoveringBody {
                        body: shape.clone(),
                        center,
                    })
                    .collect();
                return Ok(Covering::explicit(body.clone(), eps, eps, pieces));
            }
            z[i] += 1;
            if z[i] <= b {
                break;
            }
            z[i] = -b;
            i += 1;
        }
    }
}

/// Virtual grid covering: pieces are (eps/2)K at centers clamp(step * z) for
/// accepted z (those whose cell can meet K).
#[derive(Debug, Clone)]
pub struct GridGen {
    parent: NormBody,
    shape: NormBody,
    step: Real,
    accept: Real,
    bound: i64,
    dim: usize,
}

impl GridGen {
    fn accepted(&self, z: &[i64]) -> Result<Option<Vec<Real>>> {
        if z.iter().any(|&zi| zi.abs() > self.bound) {
            return Ok(None);
        }
        let c: Vec<Real> = z.iter().map(|&zi| zi as Real * self.step).collect();
        let g = self.parent.gauge(&c)?;
        if g <= self.accept + eta() {
            let (cl, _) = radial_clamp(&self.parent, &c)?;
            Ok(Some(cl))
        } else {
            Ok(None)
        }
    }

    pub fn count(&self) -> Option<u128> {
        let box_total = (2 * self.bound as u128 + 1).checked_pow(self.dim as u32)?;
        if box_total > COUNT_BUDGET {
            return None;
        }
        let mut z = vec![-self.bound; self.dim];
        let mut count: u128 = 0;
        loop {
            if self.accepted(&z).ok()?.is_some() {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == self.dim {
                    return Some(count);
                }
                z[i] += 1;
                if z[i] <= self.bound {
                    break;
                }
                z[i] = -self.bound;
                i += 1;
            }
        }
    }

    pub fn sample_piece(&self, rng: &mut SplitMix64) -> Result<CoveringBody> {
        let w = 2 * self.bound as u64 + 1;
        loop {
            let z: Vec<i64> = (0..self.dim)
                .map(|_| rng.below(w) as i64 - self.bound)
                .collect();
            if let Some(center) = self.accepted(&z)? {
                return Ok(CoveringBody {
                    body: self.shape.clone(),
                    center,
                });
            }
        }
    }

    /// First admissible piece in a deterministic cell order: the cell of x,
    /// the cell of its radial projection, then their 3^n neighborhoods. The
    /// interior witness construction makes the first two sufficient for any
    /// x with gauge <= 1 + eps/2; beyond that the neighbor sweep is a
    /// bounded best-effort (a miss there is still sound for the solvers:
    /// such points lie strictly outside the covered body).
    pub fn locate(&self, x: &[Real], factor: Real) -> Result<Option<Located>> {
        let gx = self.parent.gauge(x)?;
        let base: Vec<i64> = x.iter().map(|&xi| (xi / self.step).round() as i64).collect();
        if let Some(hit) = self.try_cell(&base, x, factor)? {
            return Ok(Some(hit));
        }
        let bh: Option<Vec<i64>> = if gx > 1.0 {
            let xhat = vscale(x, 1.0 / gx);
            let bh: Vec<i64> = xhat
                .iter()
                .map(|&xi| (xi / self.step).round() as i64)
                .collect();
            if bh != base {
                if let Some(hit) = self.try_cell(&bh, x, factor)? {
                    return Ok(Some(hit));
                }
            }
            Some(bh)
        } else {
            None
        };
        for anchor in std::iter::once(&base).chain(bh.iter()) {
            if let Some(hit) = self.sweep_neighbors(anchor, x, factor)? {
                return Ok(Some(hit));
            }
        }
        Ok(None)
    }

    fn try_cell(&self, z: &[i64], x: &[Real], factor: Real) -> Result<Option<Located>> {
        if let Some(center) = self.accepted(z)? {
            let g = self.shape.gauge(&sub(x, &center))?;
            if g <= factor + eta() {
                return Ok(Some(Located {
                    piece: CoveringBody {
                        body: self.shape.clone(),
                        center,
                    },
                    gauge: g,
                }));
            }
        }
        Ok(None)
    }

    fn sweep_neighbors(&self, anchor: &[i64], x: &[Real], factor: Real) -> Result<Option<Located>> {
        let mut offset = vec![-1i64; self.dim];
        loop {
            if offset.iter().any(|&o| o != 0) {
                let z: Vec<i64> = anchor.iter().zip(&offset).map(|(b, o)| b + o).collect();
                if let Some(hit) = self.try_cell(&z, x, factor)? {
                    return Ok(Some(hit));
                }
            }
            let mut i = 0;
            loop {
                if i == self.dim {
                    return Ok(None);
                }
                offset[i] += 1;
                if offset[i] <= 1 {
                    break;
                }
                offset[i] = -1;
                i += 1;
            }
        }
    }
}
