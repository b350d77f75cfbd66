//! (2,eps)-coverings: constructions (grid baseline, zonotope and polytope
//! products, smooth-body cap cylinders, randomized local covering),
//! symmetrization, and validation.
//!
//! A covering holds its pieces either explicitly or as a virtual generator
//! (grid / interval products) so that large coverings stay usable: the
//! solvers only need point location, never full materialization.

mod grid;
mod local;
mod polytope;
mod smooth;
mod symmetrize;
mod validate;
mod zonotope;

pub use grid::cover_grid;
pub use local::local_cover_sample;
pub use polytope::cover_polytope;
pub use smooth::cover_smooth;
pub use symmetrize::symmetrize;
pub use validate::{validate_cover, ValidateMode, ValidationReport};
pub use zonotope::cover_zonotope;

use crate::error::Result;
use crate::linalg::sub;
use crate::norms::NormBody;
use crate::rng::SplitMix64;
use crate::{eta, Real};
use std::collections::HashMap;

/// One covering piece: a centrally symmetric body `Q` (about the origin)
/// plus its translation `c`.
#[derive(Debug, Clone)]
pub struct CoveringBody {
    pub body: NormBody,
    pub center: Vec<Real>,
}

impl CoveringBody {
    /// gauge_Q(x - c): membership of `x` in `c + factor * Q` is `<= factor`.
    pub fn gauge_from_center(&self, x: &[Real]) -> Result<Real> {
        self.body.gauge(&sub(x, &self.center))
    }
}

/// Piece storage: explicit list or a virtual generator.
#[derive(Debug, Clone)]
pub enum PieceGen {
    Explicit(ExplicitPieces),
    Grid(grid::GridGen),
    ZonoProduct(zonotope::ZonoGen),
    SlabProduct(polytope::SlabGen),
}

#[derive(Debug, Clone)]
pub struct ExplicitPieces {
    pub pieces: Vec<CoveringBody>,
    index: Option<BucketIndex>,
}

impl ExplicitPieces {
    pub fn new(pieces: Vec<CoveringBody>) -> Self {
        let index = BucketIndex::build(&pieces);
        ExplicitPieces { pieces, index }
    }
}

/// Uniform spatial hash over piece centers for fast candidate lookup when
/// every piece has a similar circumradius.
#[derive(Debug, Clone)]
struct BucketIndex {
    cell: Real,
    reach: i64,
    map: HashMap<Vec<i64>, Vec<u32>>,
    dim: usize,
}

impl BucketIndex {
    fn build(pieces: &[CoveringBody]) -> Option<Self> {
        if pieces.len() < 64 {
            return None;
        }
        let mut rmax: Real = 0.0;
        for p in pieces {
            let (_, big_r) = p.body.sandwich().ok()?;
            rmax = rmax.max(big_r);
        }
        if !(rmax > 0.0) {
            return None;
        }
        let cell = rmax;
        let dim = pieces[0].center.len();
        let mut map: HashMap<Vec<i64>, Vec<u32>> = HashMap::new();
        for (i, p) in pieces.iter().enumerate() {
            let key: Vec<i64> = p.center.iter().map(|&c| (c / cell).floor() as i64).collect();
            map.entry(key).or_default().push(i as u32);
        }
        // factor-2 membership reaches 2*rmax from the center
        Some(BucketIndex {
            cell,
            reach: 3,
            map,
            dim,
        })
    }

    fn candidates(&self, x: &[Real]) -> Vec<u32> {
        let base: Vec<i64> = x.iter().map(|&c| (c / self.cell).floor() as i64).collect();
        let mut out = Vec::new();
        let mut offset = vec![-self.reach; self.dim];
        loop {
            let key: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
            if let Some(v) = self.map.get(&key) {
                out.extend_from_slice(v);
            }
            // odometer over offsets
            let mut i = 0;
            loop {
                if i == self.dim {
                    return out;
                }
                offset[i] += 1;
                if offset[i] <= self.reach {
                    break;
                }
                offset[i] = -self.reach;
                i += 1;
            }
        }
    }
}

/// A (2, eps)-covering of `parent` (more precisely: pieces cover `parent`,
/// and every piece doubled about its center stays inside
/// `(1 + epsilon) * parent`).
#[derive(Debug, Clone)]
pub struct Covering {
    pub parent: NormBody,
    /// Effective epsilon (after rounding down to the construction grid).
    pub epsilon: Real,
    pub requested_epsilon: Real,
    /// Closed-form piece count before deduplication / emptiness filtering,
    /// where the construction has one.
    pub raw_count: Option<u128>,
    /// Uniform homothety applied to the whole covering (pieces and parent).
    pub global_scale: Real,
    pub gen: PieceGen,
}

/// Outcome of locating a point in the union of (scaled) pieces.
#[derive(Debug, Clone)]
pub struct Located {
    pub piece: CoveringBody,
    /// gauge of the point about the piece center (already <= factor).
    pub gauge: Real,
}

impl Covering {
    pub fn explicit(
        parent: NormBody,
        epsilon: Real,
        requested: Real,
        pieces: Vec<CoveringBody>,
    ) -> Covering {
        Covering {
            parent,
            epsilon,
            requested_epsilon: requested,
            raw_count: None,
            global_scale: 1.0,
            gen: PieceGen::Explicit(ExplicitPieces::new(pieces)),
        }
    }

    /// Homothet of the whole covering: {lambda Q_i + lambda c_i} covers
    /// lambda K with the same epsilon.
    pub fn scaled(&self, lambda: Real) -> Covering {
        let mut c = self.clone();
        c.global_scale *= lambda;
        c.parent = self.parent.scaled(lambda);
        c
    }

    /// Number of pieces, when affordable to determine.
    pub fn len(&self) -> Option<u128> {
        match &self.gen {
            PieceGen::Explicit(e) => Some(e.pieces.len() as u128),
            PieceGen::Grid(g) => g.count(),
            PieceGen::ZonoProduct(z) => Some(z.count()),
            PieceGen::SlabProduct(s) => Some(s.count()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// True when the pieces are stored explicitly.
    pub fn is_explicit(&self) -> bool {
        matches!(self.gen, PieceGen::Explicit(_))
    }

    pub fn explicit_pieces(&self) -> Option<Vec<CoveringBody>> {
        match &self.gen {
            PieceGen::Explicit(e) => {
                if self.global_scale == 1.0 {
                    Some(e.pieces.clone())
                } else {
                    Some(
                        e.pieces
                            .iter()
                            .map(|p| self.rescale_piece(p.clone()))
                            .collect(),
                    )
                }
            }
            _ => None,
        }
    }

    fn rescale_piece(&self, mut p: CoveringBody) -> CoveringBody {
        if self.global_scale != 1.0 {
            p.body = p.body.scaled(self.global_scale);
            p.center = crate::linalg::scale(&p.center, self.global_scale);
        }
        p
    }

    /// A deterministic-pseudorandom piece (used by sampled validation).
    pub fn sample_piece(&self, rng: &mut SplitMix64) -> Result<CoveringBody> {
        let p = match &self.gen {
            PieceGen::Explicit(e) => {
                let i = rng.below(e.pieces.len() as u64) as usize;
                e.pieces[i].clone()
            }
            PieceGen::Grid(g) => g.sample_piece(rng)?,
            PieceGen::ZonoProduct(z) => z.sample_piece(rng)?,
            PieceGen::SlabProduct(s) => s.sample_piece(rng),
        };
        Ok(self.rescale_piece(p))
    }

    /// Find a piece with `x` inside `c + factor * Q`. For explicit pieces the
    /// scan is exhaustive (so `None` is a proof). For virtual generators the
    /// lookup is exact for points of the union at factor 1 and for the
    /// product constructions at factor 2; the virtual grid uses a guaranteed
    /// witness construction inside `(1 + eps/2) K` and a bounded neighbor
    /// search beyond it (see `grid.rs`).
    pub fn locate(&self, x: &[Real], factor: Real) -> Result<Option<Located>> {
        let xs = if self.global_scale != 1.0 {
            crate::linalg::scale(x, 1.0 / self.global_scale)
        } else {
            x.to_vec()
        };
        let found = match &self.gen {
            PieceGen::Explicit(e) => {
                let mut best: Option<Located> = None;
                let check = |i: usize, best: &mut Option<Located>| -> Result<()> {
                    let g = e.pieces[i].gauge_from_center(&xs)?;
                    if g <= factor + eta() && best.as_ref().map_or(true, |b| g < b.gauge) {
                        *best = Some(Located {
                            piece: e.pieces[i].clone(),
                            gauge: g,
                        });
                    }
                    Ok(())
                };
                match &e.index {
                    Some(idx) if factor <= 2.0 + eta() => {
                        for i in idx.candidates(&xs) {
                            check(i as usize, &mut best)?;
                        }
                    }
                    _ => {
                        for i in 0..e.pieces.len() {
                            check(i, &mut best)?;
                        }
                    }
                }
                best
            }
            PieceGen::Grid(g) => g.locate(&xs, factor)?,
            PieceGen::ZonoProduct(z) => z.locate(&xs, factor)?,
            PieceGen::SlabProduct(s) => s.locate(&xs, factor)?,
        };
        Ok(found.map(|l| Located {
            piece: self.rescale_piece(l.piece),
            gauge: l.gauge,
        }))
    }

    /// Iterate up to `budget` pieces deterministically (all of them for
    /// explicit storage when they fit).
    pub fn for_each_piece<F: FnMut(&CoveringBody) -> Result<()>>(
        &self,
        budget: usize,
        mut f: F,
    ) -> Result<usize> {
        match &self.gen {
            PieceGen::Explicit(e) => {
                let take = e.pieces.len().min(budget);
                for p in e.pieces.iter().take(take) {
                    let sp = self.rescale_piece(p.clone());
                    f(&sp)?;
                }
                Ok(take)
            }
            _ => {
                let mut rng = SplitMix64::new(0x5eed_c0de);
                let mut n = 0;
                let total = self.len().unwrap_or(u128::MAX);
                let take = budget.min(total.min(budget as u128) as usize);
                while n < take {
                    let p = self.sample_piece(&mut rng)?;
                    f(&p)?;
                    n += 1;
                }
                Ok(n)
            }
        }
    }
}

/// Shared helper: centers must stay inside K for the doubled homothet of an
/// (eps/2)K piece to remain inside (1+eps)K.
pub(crate) fn radial_clamp(parent: &NormBody, c: &[Real]) -> Result<(Vec<Real>, Real)> {
    let g = parent.gauge(c)?;
    if g > 1.0 {
        Ok((crate::linalg::scale(c, 1.0 / g), g))
    } else {
        Ok((c.to_vec(), g))
    }
}

pub(crate) fn boundary_point_of(parent: &NormBody, x: &[Real]) -> Result<Option<Vec<Real>>> {
    let g = parent.gauge(x)?;
    if g < 1e-12 {
        return Ok(None);
    }
    Ok(Some(crate::linalg::scale(x, 1.0 / g)))
}
