//! Covering of a smooth body (rho_K(tau) <= C tau^q) by cylinder slices over
//! a boundary net: above the smoothness threshold this falls back to the
//! grid covering, below it each net point p carries k geometrically-sliced
//! prisms along the inward ray.

use super::{Covering, CoveringBody, PieceGen};
use crate::error::{Error, Result};
use crate::linalg::{scale as vscale, sub};
use crate::norms::{NormBody, PrismSlice};
use crate::Real;
use std::collections::HashMap;
use std::sync::Arc;

const FACE_GRID_BUDGET: u128 = 4_000_000;

pub fn cover_smooth(body: &NormBody, eps: Real) -> Result<Covering> {
    let profile = body.smoothness()?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("covering eps must lie in (0,1), got {eps}")));
    }
    // above the threshold the cap geometry degenerates; use the grid baseline
    if eps > profile.threshold() {
        return super::cover_grid(body, eps);
    }
    // work at eps/2 so the sliced construction is a (2, eps)-covering, and
    // round down to the admissible grid (2^k - 1)^{-1}
    let eps_half = eps / 2.0;
    let k = (1.0 + 1.0 / eps_half).log2().ceil() as u32;
    let eps_eff = 1.0 / ((1u64 << k) as Real - 1.0);
    let delta = profile.cap_radius(eps_eff);
    if delta - eps_eff <= 0.0 {
        return super::cover_grid(body, eps);
    }

    // boundary net: points p_j with every boundary point within gauge
    // delta - eps of one of them
    let rho = 0.5 * (delta - eps_eff);
    let net = boundary_net(body, rho)?;

    let mut pieces = Vec::with_capacity(net.len() * k as usize);
    for p in &net {
        let normal = body.support_normal(p)?;
        for i in 1..=k {
            let t0 = 1.0 - (1.5 * (1u64 << (i - 1)) as Real - 1.0) * eps_eff;
            let half_width = (1u64 << i) as Real / 4.0 * eps_eff; // 2^{i-2} eps
            let slice = PrismSlice {
                axis: p.clone(),
                normal: normal.clone(),
                half_width,
                cap_radius: delta,
                base: Arc::new(body.clone()),
            };
            pieces.push(CoveringBody {
                body: NormBody::prism_slice(slice)?,
                center: vscale(p, t0),
            });
        }
    }
    Ok(Covering {
        parent: body.clone(),
        epsilon: 2.0 * eps_eff,
        requested_epsilon: eps,
        raw_count: None,
        global_scale: 1.0,
        gen: PieceGen::Explicit(super::ExplicitPieces::new(pieces)),
    })
}

/// A rho-separated set of boundary points within 2 rho (gauge) of every
/// boundary point: radially project a fine grid on the bounding-box surface,
/// then thin greedily.
pub(crate) fn boundary_net(body: &NormBody, rho: Real) -> Result<Vec<Vec<Real>>> {
    let n = body.dim();
    let (r, big_r) = body.sandwich()?;
    if n == 1 {
        let p = 1.0 / body.gauge(&[1.0])?;
        return Ok(vec![vec![p], vec![-p]]);
    }
    // face grid spacing: projection is 2/r-Lipschitz from the box surface
    let h = (rho * r / (n as Real - 1.0).sqrt()).min(big_r);
    let steps = (2.0 * big_r / h).ceil() as u128;
    let per_face = steps.pow(n as u32 - 1);
    let total = per_face * 2 * n as u128;
    if total > FACE_GRID_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "boundary net needs {total} face grid points"
        )));
    }
    // thinning hash: cells of width rho * R so neighbors suffice
    let cell = rho * big_r;
    let mut kept: Vec<Vec<Real>> = Vec::new();
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let steps = steps as i64;
    for face_axis in 0..n {
        for side in [-1.0, 1.0] {
            let mut idx = vec![0i64; n - 1];
            loop {
                // build the surface point
                let mut x = vec![0.0; n];
                x[face_axis] = side * big_r;
                let mut j = 0;
                for d in 0..n {
                    if d != face_axis {
                        x[d] = -big_r + (idx[j] as Real + 0.5) * (2.0 * big_r / steps as Real);
                        j += 1;
                    }
                }
                if let Some(p) = super::boundary_point_of(body, &x)? {
                    let key: Vec<i64> = p.iter().map(|&c| (c / cell).floor() as i64).collect();
                    let mut near = false;
                    'scan: for off in neighbor_offsets(n) {
                        let k2: Vec<i64> = key.iter().zip(&off).map(|(a, b)| a + b).collect();
                        if let Some(list) = buckets.get(&k2) {
                            for &ki in list {
                                if body.gauge(&sub(&p, &kept[ki]))? <= rho {
                                    near = true;
                                    break 'scan;
                                }
                            }
                        }
                    }
                    if !near {
                        buckets.entry(key).or_default().push(kept.len());
                        kept.push(p);
                    }
                }
                // odometer over the face grid
                let mut d = 0;
                loop {
                    if d == n - 1 {
                        break;
                    }
                    idx[d] += 1;
                    if idx[d] < steps {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
                if d == n - 1 {
                    break;
                }
            }
        }
    }
    Ok(kept)
}

fn neighbor_offsets(n: usize) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * 3);
        for v in &out {
            for o in [-1i64, 0, 1] {
                let mut w = v.clone();
                w.push(o);
                next.push(w);
            }
        }
        out = next;
    }
    out
}
