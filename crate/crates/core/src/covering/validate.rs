//! Covering validation: coverage of the parent body, containment of doubled
//! pieces inside (1+eps)K, and central symmetry of the pieces.

use super::{Covering, CoveringBody, PieceGen};
use crate::error::Result;
use crate::linalg::sub;
use crate::norms::NormKind;
use crate::rng::SplitMix64;
use crate::{eta, Real};

#[derive(Debug, Clone, Copy)]
pub enum ValidateMode {
    /// Sample budget for each of the two checks.
    Sampled(usize),
    /// Containment through piece vertices where the piece shape has them
    /// (polytopes, zonotopes, v-polytopes); boundary samples otherwise.
    VertexExact,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub epsilon: Real,
    pub coverage_checked: usize,
    pub coverage_failures: usize,
    /// max over checked points of (best piece gauge - 1); <= eta when covered.
    pub worst_coverage_margin: Real,
    pub containment_checked: usize,
    pub containment_failures: usize,
    /// max over checked homothet points of gauge_K - (1 + eps).
    pub worst_containment_margin: Real,
    pub symmetry_checked: usize,
    pub symmetry_failures: usize,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.coverage_failures == 0 && self.containment_failures == 0 && self.symmetry_failures == 0
    }
}

pub fn validate_cover(cov: &Covering, mode: ValidateMode) -> Result<ValidationReport> {
    let (coverage_budget, containment_budget, vertex_exact) = match mode {
        ValidateMode::Sampled(c) => (c, c, false),
        ValidateMode::VertexExact => (10_000, 10_000, true),
    };
    let mut rng = SplitMix64::new(0xda7a_5eed);
    let mut rep = ValidationReport {
        epsilon: cov.epsilon,
        coverage_checked: 0,
        coverage_failures: 0,
        worst_coverage_margin: Real::NEG_INFINITY,
        containment_checked: 0,
        containment_failures: 0,
        worst_containment_margin: Real::NEG_INFINITY,
        symmetry_checked: 0,
        symmetry_failures: 0,
    };

    // coverage: sampled points of K must lie in some piece
    for _ in 0..coverage_budget {
        let x = cov.parent.sample_uniform(&mut rng)?;
        rep.coverage_checked += 1;
        match cov.locate(&x, 1.0)? {
            Some(loc) => {
                rep.worst_coverage_margin = rep.worst_coverage_margin.max(loc.gauge - 1.0);
            }
            None => {
                rep.coverage_failures += 1;
                let margin = explicit_min_gauge(cov, &x)?.map(|g| g - 1.0).unwrap_or(1e9);
                rep.worst_coverage_margin = rep.worst_coverage_margin.max(margin);
            }
        }
    }

    // containment: boundary of c + 2Q inside (1 + eps) K
    let bound = 1.0 + cov.epsilon;
    let piece_budget = match &cov.gen {
        PieceGen::Explicit(e) => e.pieces.len().min(containment_budget.max(1)),
        _ => (containment_budget / 4).max(1),
    };
    let per_piece = (containment_budget / piece_budget).max(1);
    let mut pieces_seen = 0usize;
    let check_piece = |piece: &CoveringBody,
                           rng: &mut SplitMix64,
                           rep: &mut ValidationReport|
     -> Result<()> {
        let mut points: Vec<Vec<Real>> = Vec::new();
        if vertex_exact {
            if let Some(vs) = piece_vertices(piece) {
                points = vs;
            }
        }
        if points.is_empty() {
            for _ in 0..per_piece {
                points.push(piece.body.sample_boundary(rng)?);
            }
        }
        for y in points {
            let pt: Vec<Real> = piece.center.iter().zip(&y).map(|(c, yi)| c + 2.0 * yi).collect();
            let g = cov.parent.gauge(&pt)?;
            let margin = g - bound;
            rep.containment_checked += 1;
            rep.worst_containment_margin = rep.worst_containment_margin.max(margin);
            if margin > eta() {
                rep.containment_failures += 1;
            }
        }
        // symmetry spot check
        for _ in 0..2 {
            let y = piece.body.sample_boundary(rng)?;
            let g_neg = piece.body.gauge(&crate::linalg::scale(&y, -1.0))?;
            rep.symmetry_checked += 1;
            if (g_neg - 1.0).abs() > 1e-6 {
                rep.symmetry_failures += 1;
            }
        }
        Ok(())
    };
    match &cov.gen {
        PieceGen::Explicit(e) => {
            let stride = (e.pieces.len() / piece_budget).max(1);
            let mut i = 0;
            while i < e.pieces.len() && pieces_seen < piece_budget {
                let p = cov
                    .explicit_pieces_ref(i)
                    .expect("index in range");
                check_piece(&p, &mut rng, &mut rep)?;
                pieces_seen += 1;
                i += stride;
            }
        }
        _ => {
            while pieces_seen < piece_budget {
                let p = cov.sample_piece(&mut rng)?;
                check_piece(&p, &mut rng, &mut rep)?;
                pieces_seen += 1;
            }
        }
    }
    if rep.worst_coverage_margin == Real::NEG_INFINITY {
        rep.worst_coverage_margin = 0.0;
    }
    if rep.worst_containment_margin == Real::NEG_INFINITY {
        rep.worst_containment_margin = 0.0;
    }
    Ok(rep)
}

fn explicit_min_gauge(cov: &Covering, x: &[Real]) -> Result<Option<Real>> {
    match &cov.gen {
        PieceGen::Explicit(e) => {
            let xs = if cov.global_scale != 1.0 {
                crate::linalg::scale(x, 1.0 / cov.global_scale)
            } else {
                x.to_vec()
            };
            let mut best = Real::INFINITY;
            for p in &e.pieces {
                best = best.min(p.body.gauge(&sub(&xs, &p.center))?);
            }
            Ok(Some(best))
        }
        _ => Ok(None),
    }
}

/// Vertices of the centered piece body, where the shape admits them cheaply.
fn piece_vertices(piece: &CoveringBody) -> Option<Vec<Vec<Real>>> {
    match &piece.body.kind {
        NormKind::Polytope { rows, rhs } => {
            let n = rows[0].len();
            if rows.len() != n {
                return None;
            }
            let mut out = Vec::with_capacity(1 << n);
            for mask in 0..(1u32 << n) {
                let mut b = Vec::with_capacity(n);
                for (i, &bi) in rhs.iter().enumerate() {
                    let s = if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
                    b.push(s * bi * piece.body.scale);
                }
                out.push(crate::linalg::solve_f64(rows, &b)?);
            }
            Some(out)
        }
        NormKind::Zonotope { gens } => {
            if gens.len() > 14 {
                return None;
            }
            let n = gens[0].len();
            let mut out = Vec::with_capacity(1 << gens.len());
            for mask in 0..(1u64 << gens.len()) {
                let mut v = vec![0.0; n];
                for (j, g) in gens.iter().enumerate() {
                    let s = if mask >> j & 1 == 1 { -1.0 } else { 1.0 };
                    crate::linalg::axpy(&mut v, s * piece.body.scale, g);
                }
                out.push(v);
            }
            Some(out)
        }
        NormKind::Vpoly { verts } => Some(
            verts
                .iter()
                .map(|v| crate::linalg::scale(v, piece.body.scale))
                .collect(),
        ),
        _ => None,
    }
}

impl Covering {
    /// Explicit piece by index, rescaled by the covering's global homothety.
    pub(crate) fn explicit_pieces_ref(&self, i: usize) -> Option<CoveringBody> {
        match &self.gen {
            PieceGen::Explicit(e) => e.pieces.get(i).map(|p| {
                let mut p = p.clone();
                if self.global_scale != 1.0 {
                    p.body = p.body.scaled(self.global_scale);
                    p.center = crate::linalg::scale(&p.center, self.global_scale);
                }
                p
            }),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::cover_grid;
    use crate::norms::NormBody;

    #[test]
    fn whole_body_as_single_piece_sits_exactly_on_the_boundary() {
        // covering = [K itself at 0] with eps = 1: 2K inside 2K holds with
        // margin exactly 0
        let k = NormBody::lp(2, 2.0).unwrap();
        let cov = Covering::explicit(
            k.clone(),
            0.999999999,
            0.999999999,
            vec![CoveringBody {
                body: k.clone(),
                center: vec![0.0, 0.0],
            }],
        );
        let rep = validate_cover(&cov, ValidateMode::Sampled(2000)).unwrap();
        assert!(rep.worst_containment_margin.abs() < 1e-6, "{rep:?}");
    }

    #[test]
    fn adversarial_boundary_piece_reports_positive_margin() {
        // one piece of radius eps centered at a boundary point: doubled it
        // pokes out to 1 + 2 eps
        let k = NormBody::lp(2, 2.0).unwrap();
        let eps = 0.3;
        let cov = Covering::explicit(
            k.clone(),
            eps,
            eps,
            vec![CoveringBody {
                body: k.scaled(eps),
                center: vec![1.0, 0.0],
            }],
        );
        let rep = validate_cover(&cov, ValidateMode::Sampled(4000)).unwrap();
        assert!(rep.containment_failures > 0);
        assert!(
            rep.worst_containment_margin > eps * 0.8,
            "margin {} should approach eps",
            rep.worst_containment_margin
        );
    }

    #[test]
    fn scaling_covariance_at_lambda_two() {
        let k = NormBody::lp(2, 1.5).unwrap();
        let cov = cover_grid(&k, 0.4).unwrap();
        let doubled = cov.scaled(2.0);
        let rep = validate_cover(&doubled, ValidateMode::Sampled(4000)).unwrap();
        assert!(rep.ok(), "{rep:?}");
    }

    #[test]
    fn vertex_exact_mode_on_polytope_pieces() {
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let cov = crate::covering::cover_polytope(&rows, &[1.0, 1.0], 0.5).unwrap();
        let rep = validate_cover(&cov, ValidateMode::VertexExact).unwrap();
        assert!(rep.ok(), "{rep:?}");
    }
}
