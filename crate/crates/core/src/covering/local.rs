//! Randomized local covering: a handful of origin-symmetric pieces covering
//! a random neighborhood, each doubled homothet staying inside (1+eps)K.
//! Used by the on-the-fly boosting solver.

use super::CoveringBody;
use crate::error::Result;
use crate::norms::{NormBody, PrismSlice};
use crate::rng::SplitMix64;
use crate::Real;
use std::sync::Arc;

/// One sampling round. Large-eps branch: a single piece (eps K, x) with x
/// uniform in (1+eps)K. Small-eps branch: the k cylinder slices at the
/// boundary point radially above a sample from (1 + delta/4)K. The input
/// eps is divided by 3 up front; every returned piece satisfies
/// c + 2Q inside (1+eps_input)K.
pub fn local_cover_sample(
    body: &NormBody,
    eps: Real,
    rng: &mut SplitMix64,
) -> Result<Vec<CoveringBody>> {
    let profile = body.smoothness()?;
    let eps = eps / 3.0;
    if eps > profile.threshold() {
        let x = body.scaled(1.0 + eps).sample_uniform(rng)?;
        return Ok(vec![CoveringBody {
            body: body.scaled(eps),
            center: x,
        }]);
    }
    // small-eps branch: round down to the slice grid
    let k = (1.0 + 1.0 / eps).log2().ceil() as u32;
    let eps_eff = 1.0 / ((1u64 << k) as Real - 1.0);
    let delta = profile.cap_radius(eps_eff);
    let x = body.scaled(1.0 + delta / 4.0).sample_uniform(rng)?;
    let g = body.gauge(&x)?;
    if g < 1e-12 {
        // pathological center draw; emit the trivial interior piece
        return Ok(vec![CoveringBody {
            body: body.scaled(eps_eff),
            center: vec![0.0; body.dim()],
        }]);
    }
    let p = crate::linalg::scale(&x, 1.0 / g);
    let normal = body.support_normal(&p)?;
    let mut out = Vec::with_capacity(k as usize);
    for i in 1..=k {
        let t0 = 1.0 - (1.5 * (1u64 << (i - 1)) as Real - 1.0) * eps_eff;
        let slice = PrismSlice {
            axis: p.clone(),
            normal: normal.clone(),
            half_width: (1u64 << i) as Real / 4.0 * eps_eff,
            cap_radius: delta,
            base: Arc::new(body.clone()),
        };
        out.push(CoveringBody {
            body: NormBody::prism_slice(slice)?,
            center: crate::linalg::scale(&p, t0),
        });
    }
    Ok(out)
}
