//! Symmetrization of a covering: pieces that are centrally symmetric pass
//! through; an asymmetric (v-polytope) piece is replaced by a packing of
//! translates of half its difference body, as in the classical 5^n argument.

use super::{Covering, CoveringBody, PieceGen};
use crate::error::{Error, Result};
use crate::linalg::sub;
use crate::norms::{NormBody, NormKind};
use crate::Real;

pub fn symmetrize(cov: &Covering) -> Result<Covering> {
    let pieces = match &cov.gen {
        PieceGen::Explicit(e) => &e.pieces,
        // virtual generators only produce symmetric shapes
        _ => return Ok(cov.clone()),
    };
    if pieces.iter().all(|p| p.body.symmetric_by_construction()) {
        return Ok(cov.clone());
    }
    let mut out: Vec<CoveringBody> = Vec::new();
    for piece in pieces {
        if piece.body.symmetric_by_construction() {
            out.push(piece.clone());
            continue;
        }
        out.extend(symmetrize_piece(piece)?);
    }
    Ok(Covering::explicit(
        cov.parent.clone(),
        cov.epsilon,
        cov.requested_epsilon,
        out,
    ))
}

/// Replace one asymmetric 2-D v-polytope piece by symmetric sub-pieces:
/// translates of (1/2) conv(Q - c0, c0 - Q) packed greedily over Q.
fn symmetrize_piece(piece: &CoveringBody) -> Result<Vec<CoveringBody>> {
    let NormKind::Vpoly { verts } = &piece.body.kind else {
        return Err(Error::Domain(
            "symmetrize handles v-polytope pieces only".into(),
        ));
    };
    let n = piece.center.len();
    if n != 2 {
        return Err(Error::Domain(
            "asymmetric symmetrization implemented for the plane only".into(),
        ));
    }
    let scale = piece.body.scale;
    let abs_verts: Vec<Vec<Real>> = verts
        .iter()
        .map(|v| {
            v.iter()
                .zip(&piece.center)
                .map(|(vi, ci)| vi * scale + ci)
                .collect()
        })
        .collect();
    let hull = convex_hull_2d(&abs_verts);
    let c0 = polygon_centroid(&hull);
    // half difference body, symmetric about the origin
    let mut dverts: Vec<Vec<Real>> = Vec::with_capacity(2 * hull.len());
    for v in &hull {
        let d = [(v[0] - c0[0]) / 2.0, (v[1] - c0[1]) / 2.0];
        dverts.push(vec![d[0], d[1]]);
        dverts.push(vec![-d[0], -d[1]]);
    }
    let dhull = convex_hull_2d(&dverts);
    let tilde = polygon_to_slabs(&dhull)?;

    // greedy packing of translates of tilde over Q
    let member = |x: &[Real]| -> Result<bool> {
        Ok(piece.body.gauge(&sub(x, &piece.center))? <= 1.0 + 1e-12)
    };
    let (r_t, _) = tilde.sandwich()?;
    let (lo, hi) = bounding_box(&hull);
    let h_margin = 0.05;
    let step = (h_margin * r_t / 2f64.sqrt()).max(1e-4);
    let mut centers: Vec<Vec<Real>> = Vec::new();
    let threshold = 1.0 - 2.0 * h_margin;
    let mut y = lo[1];
    while y <= hi[1] {
        let mut x = lo[0];
        while x <= hi[0] {
            let cand = vec![x, y];
            if member(&cand)? {
                let mut covered = false;
                for c in centers.iter().rev() {
                    if tilde.gauge(&sub(&cand, c))? <= threshold {
                        covered = true;
                        break;
                    }
                }
                if !covered {
                    centers.push(cand);
                }
            }
            x += step;
        }
        y += step;
    }
    Ok(centers
        .into_iter()
        .map(|center| CoveringBody {
            body: tilde.clone(),
            center,
        })
        .collect())
}

fn bounding_box(verts: &[Vec<Real>]) -> (Vec<Real>, Vec<Real>) {
    let mut lo = vec![Real::INFINITY; 2];
    let mut hi = vec![Real::NEG_INFINITY; 2];
    for v in verts {
        for d in 0..2 {
            lo[d] = lo[d].min(v[d]);
            hi[d] = hi[d].max(v[d]);
        }
    }
    (lo, hi)
}

/// Andrew monotone chain, counterclockwise hull.
fn convex_hull_2d(pts: &[Vec<Real>]) -> Vec<Vec<Real>> {
    let mut p: Vec<(Real, Real)> = pts.iter().map(|v| (v[0], v[1])).collect();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    p.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    if p.len() <= 2 {
        return p.into_iter().map(|(x, y)| vec![x, y]).collect();
    }
    let cross = |o: (Real, Real), a: (Real, Real), b: (Real, Real)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(Real, Real)> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0.0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<(Real, Real)> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0.0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower.into_iter().map(|(x, y)| vec![x, y]).collect()
}

fn polygon_centroid(hull: &[Vec<Real>]) -> Vec<Real> {
    let mut area = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..hull.len() {
        let j = (i + 1) % hull.len();
        let w = hull[i][0] * hull[j][1] - hull[j][0] * hull[i][1];
        area += w;
        cx += (hull[i][0] + hull[j][0]) * w;
        cy += (hull[i][1] + hull[j][1]) * w;
    }
    area *= 0.5;
    vec![cx / (6.0 * area), cy / (6.0 * area)]
}

/// H-representation |<a_i, x>| <= b_i of an origin-symmetric polygon.
fn polygon_to_slabs(hull: &[Vec<Real>]) -> Result<NormBody> {
    let mut rows: Vec<Vec<Real>> = Vec::new();
    let mut rhs: Vec<Real> = Vec::new();
    for i in 0..hull.len() {
        let j = (i + 1) % hull.len();
        let nx = hull[j][1] - hull[i][1];
        let ny = hull[i][0] - hull[j][0];
        let norm = (nx * nx + ny * ny).sqrt();
        if norm < 1e-12 {
            continue;
        }
        let (nx, ny) = (nx / norm, ny / norm);
        let b = nx * hull[i][0] + ny * hull[i][1];
        if b <= 1e-12 {
            continue; // opposite edge of a symmetric pair
        }
        // dedup near-parallel rows
        if rows
            .iter()
            .zip(&rhs)
            .any(|(r, &rb)| (r[0] - nx).abs() < 1e-9 && (r[1] - ny).abs() < 1e-9 && (rb - b).abs() < 1e-9)
        {
            continue;
        }
        rows.push(vec![nx, ny]);
        rhs.push(b);
    }
    NormBody::polytope(rows, rhs)
}
