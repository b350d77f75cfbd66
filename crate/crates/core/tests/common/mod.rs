//! Shared helpers for the integration suites: an independent box-scan CVP
//! oracle (exact rational inverse for the coefficient box, full product
//! scan) and deterministic random instances.
#![allow(dead_code)] // each test binary uses a different subset

use latcover_core::boost::CvpInstance;
use latcover_core::lattice::{Lattice, TargetPoint};
use latcover_core::linalg::{rat_vec_to_f64, solve_rational, sub};
use latcover_core::norms::NormBody;
use latcover_core::rng::SplitMix64;
use latcover_core::{eta, Int, Rat, Real};
use num_traits::ToPrimitive;

/// Closest vector by scanning the full coefficient box implied by the exact
/// inverse basis; independent of the Fincke-Pohst path. Ties resolved by the
/// same rule as the library: smallest gauge, then lexicographically smallest
/// coefficient vector among those within eta of the minimum.
pub fn box_scan_cvp(
    lattice: &Lattice,
    target: &TargetPoint,
    norm: &NormBody,
) -> (Vec<i64>, Real) {
    box_scan_cvp_budgeted(lattice, target, norm, u128::MAX).expect("unbounded budget")
}

/// Budgeted variant: refuses instances whose coefficient box exceeds
/// `max_cells` (the caller resamples those).
pub fn box_scan_cvp_budgeted(
    lattice: &Lattice,
    target: &TargetPoint,
    norm: &NormBody,
    max_cells: u128,
) -> Option<(Vec<i64>, Real)> {
    let n = lattice.dim();
    let (_, big_r) = norm.sandwich().expect("sandwich radii");
    // exact inverse columns: solve B x = e_j over the rationals
    let mut inv_cols: Vec<Vec<Rat>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![Rat::from_integer(Int::from(0)); n];
        e[j] = Rat::from_integer(Int::from(1));
        inv_cols.push(solve_rational(lattice.basis(), &e).expect("full rank"));
    }
    // z-space center B^{-1} t and row norms of B^{-1}
    let zc: Vec<Rat> = solve_rational(lattice.basis(), &target.coords).expect("full rank");
    let zc_f = rat_vec_to_f64(&zc);
    let row_norm: Vec<Real> = (0..n)
        .map(|i| {
            inv_cols
                .iter()
                .map(|c| {
                    let v = c[i].to_f64().unwrap();
                    v * v
                })
                .sum::<Real>()
                .sqrt()
        })
        .collect();
    let tf = target.to_f64();
    // anchor lattice point from rounding the exact coordinates
    let z0: Vec<i64> = zc_f.iter().map(|&c| c.round() as i64).collect();
    let anchor = lattice.vector_f64(&z0);
    let d_hat = norm.gauge(&sub(&anchor, &tf)).unwrap();
    let l2_reach = big_r * (d_hat + eta()) * (1.0 + 1e-12) + eta();
    let ranges: Vec<(i64, i64)> = (0..n)
        .map(|i| {
            let w = l2_reach * row_norm[i] + 1.0;
            ((zc_f[i] - w).floor() as i64, (zc_f[i] + w).ceil() as i64)
        })
        .collect();
    let cells: u128 = ranges
        .iter()
        .map(|&(lo, hi)| (hi - lo + 1).max(1) as u128)
        .product();
    if cells > max_cells {
        return None;
    }
    // pass 1: minimum gauge over the box
    let mut z = vec![0i64; n];
    let mut g_min = Real::INFINITY;
    scan(lattice, norm, &tf, &ranges, 0, &mut z, &mut |_, g| {
        if g < g_min {
            g_min = g;
        }
    });
    // pass 2: lexicographically smallest among the near-minimal
    let mut best: Option<Vec<i64>> = None;
    scan(lattice, norm, &tf, &ranges, 0, &mut z, &mut |zz, g| {
        if g <= g_min + eta() {
            let better = match &best {
                None => true,
                Some(b) => zz < b.as_slice(),
            };
            if better {
                best = Some(zz.to_vec());
            }
        }
    });
    Some((best.expect("box contains the anchor"), g_min))
}

fn scan(
    lattice: &Lattice,
    norm: &NormBody,
    tf: &[Real],
    ranges: &[(i64, i64)],
    i: usize,
    z: &mut Vec<i64>,
    f: &mut impl FnMut(&[i64], Real),
) {
    if i == ranges.len() {
        let v = lattice.vector_f64(z);
        let g = norm.gauge(&sub(&v, tf)).unwrap();
        f(z, g);
        return;
    }
    for zi in ranges[i].0..=ranges[i].1 {
        z[i] = zi;
        scan(lattice, norm, tf, ranges, i + 1, z, f);
    }
    z[i] = 0;
}

/// Deterministic full-rank random lattice with entries in [-bound, bound].
pub fn random_lattice(rng: &mut SplitMix64, n: usize, bound: i64) -> Lattice {
    let w = 2 * bound as u64 + 1;
    loop {
        let cols: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.below(w) as i64 - bound).collect())
            .collect();
        if let Ok(l) = Lattice::from_i64(&cols) {
            return l;
        }
    }
}

/// Random rational target with denominator 64, roughly inside the span box.
pub fn random_target(rng: &mut SplitMix64, n: usize, spread: i64) -> TargetPoint {
    TargetPoint::new(
        (0..n)
            .map(|_| {
                Rat::new(
                    Int::from(rng.below((2 * spread * 64) as u64 + 1) as i64 - spread * 64),
                    Int::from(64),
                )
            })
            .collect(),
    )
}

pub fn random_instance(
    rng: &mut SplitMix64,
    n: usize,
    bound: i64,
    norm: &NormBody,
    eps: Real,
) -> CvpInstance {
    CvpInstance {
        lattice: random_lattice(rng, n, bound),
        target: random_target(rng, n, 2),
        norm: norm.clone(),
        epsilon: eps,
    }
}
