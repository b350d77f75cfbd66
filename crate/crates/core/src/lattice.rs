//! Exact lattice arithmetic, lattice-point enumeration and the brute-force
//! CVP oracle that underpins both the inner 2-approximate solver and all
//! verification in this crate.

use crate::error::{Error, Result};
use crate::linalg::{
    self, det_int, dist2, gram_schmidt, hnf_columns, int_col_to_f64, mat_vec_int,
    rat_vec_to_f64, solve_rational, GramSchmidt,
};
use crate::norms::NormBody;
use crate::{eta, Int, Rat, Real};
use num_traits::{One, ToPrimitive, Zero};

/// Coefficients above this are treated as exceeding the precision budget of
/// the f64 enumeration layer.
const COEFF_LIMIT: Real = 1e12;

/// A full-rank lattice Lambda(B) = { B z : z integer }, columns of `basis`
/// being the basis vectors. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Lattice {
    basis: Vec<Vec<Int>>,
    basis_f: Vec<Vec<Real>>,
    gs: GramSchmidt,
    det: Int,
    n: usize,
}

/// Rational target vector paired with a lattice of the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetPoint {
    pub coords: Vec<Rat>,
}

impl TargetPoint {
    pub fn new(coords: Vec<Rat>) -> Self {
        TargetPoint { coords }
    }

    pub fn from_f64(coords: &[Real]) -> Self {
        TargetPoint {
            coords: coords
                .iter()
                .map(|&x| Rat::from_float(x).expect("finite coordinate"))
                .collect(),
        }
    }

    pub fn to_f64(&self) -> Vec<Real> {
        rat_vec_to_f64(&self.coords)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Euclidean search region for enumeration.
#[derive(Debug, Clone)]
pub struct EnumerationBall {
    pub center: Vec<Rat>,
    pub radius: Real,
}

impl EnumerationBall {
    pub fn new(center: Vec<Rat>, radius: Real) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(Error::Domain(format!("ball radius must be >= 0, got {radius}")));
        }
        Ok(EnumerationBall { center, radius })
    }
}

/// A lattice point as integer coefficients plus its f64 embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePoint {
    pub coeffs: Vec<i64>,
    pub point: Vec<Real>,
}

/// Result of a CVP solve: the closest vector, its coefficients and the gauge
/// distance.
#[derive(Debug, Clone)]
pub struct CvpSolution {
    pub coeffs: Vec<i64>,
    pub point: Vec<Real>,
    pub distance: Real,
}

impl Lattice {
    pub fn new(basis: Vec<Vec<Int>>) -> Result<Self> {
        let n = basis.len();
        if n == 0 {
            return Err(Error::SingularBasis);
        }
        for c in &basis {
            if c.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: c.len(),
                });
            }
        }
        let det = det_int(&basis);
        if det.is_zero() {
            return Err(Error::SingularBasis);
        }
        let basis_f: Vec<Vec<Real>> = basis
            .iter()
            .map(|c| int_col_to_f64(c))
            .collect::<Result<_>>()?;
        let gs = gram_schmidt(&basis_f);
        Ok(Lattice {
            basis,
            basis_f,
            gs,
            det,
            n,
        })
    }

    pub fn from_i64(cols: &[Vec<i64>]) -> Result<Self> {
        Lattice::new(
            cols.iter()
                .map(|c| c.iter().map(|&v| Int::from(v)).collect())
                .collect(),
        )
    }

    /// The identity lattice Z^n scaled by `s`.
    pub fn scaled_zn(n: usize, s: i64) -> Lattice {
        let cols = (0..n)
            .map(|i| {
                let mut c = vec![0i64; n];
                c[i] = s;
                c
            })
            .collect::<Vec<_>>();
        Lattice::from_i64(&cols).expect("diagonal basis is full rank")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Vec<Int>] {
        &self.basis
    }

    pub fn basis_f64(&self) -> &[Vec<Real>] {
        &self.basis_f
    }

    pub fn det(&self) -> &Int {
        &self.det
    }

    /// B z for integer coefficients, exactly.
    pub fn vector_int(&self, coeffs: &[i64]) -> Vec<Int> {
        let z: Vec<Int> = coeffs.iter().map(|&c| Int::from(c)).collect();
        mat_vec_int(&self.basis, &z)
    }

    pub fn vector_f64(&self, coeffs: &[i64]) -> Vec<Real> {
        let mut v = vec![0.0; self.n];
        for (col, &c) in self.basis_f.iter().zip(coeffs) {
            linalg::axpy(&mut v, c as Real, col);
        }
        v
    }

    /// Exact coefficients of a rational point, if it lies in the lattice.
    pub fn coeffs_of(&self, point: &[Rat]) -> Option<Vec<Int>> {
        let z = solve_rational(&self.basis, point)?;
        if z.iter().all(|zi| zi.is_integer()) {
            Some(z.into_iter().map(|zi| zi.to_integer()).collect())
        } else {
            None
        }
    }

    /// Membership test for rational points (exact).
    pub fn contains(&self, point: &[Rat]) -> bool {
        self.coeffs_of(point).is_some()
    }

    /// Reduce a rational point modulo the lattice into the fundamental
    /// parallelepiped { B z : z in [0,1)^n }.
    pub fn reduce_mod(&self, point: &[Rat]) -> Vec<Rat> {
        let z = solve_rational(&self.basis, point).expect("full rank");
        let fl: Vec<Int> = z.iter().map(|zi| zi.floor().to_integer()).collect();
        let shift = mat_vec_int(&self.basis, &fl);
        point
            .iter()
            .zip(shift)
            .map(|(p, s)| p - Rat::from_integer(s))
            .collect()
    }

    /// Babai nearest-plane vector for an f64 target; the returned distance is
    /// a valid upper bound on the exact l2 CVP distance.
    pub fn babai(&self, target: &[Real]) -> (Vec<i64>, Real) {
        let y = self.gs_coords(target);
        let n = self.n;
        let mut z = vec![0i64; n];
        for i in (0..n).rev() {
            let mut c = y[i];
            for j in i + 1..n {
                c -= self.gs.mu[j][i] * z[j] as Real;
            }
            z[i] = c.round() as i64;
        }
        let v = self.vector_f64(&z);
        let d = dist2(&v, target);
        (z, d)
    }

    fn gs_coords(&self, target: &[Real]) -> Vec<Real> {
        (0..self.n)
            .map(|i| linalg::dot(target, &self.gs.star[i]) / self.gs.norm_sq[i])
            .collect()
    }

    /// All lattice points within `radius + eta` (Euclidean) of `center`,
    /// sorted lexicographically by coefficient vector.
    pub fn enumerate_f64(&self, center: &[Real], radius: Real) -> Result<Vec<LatticePoint>> {
        if center.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: center.len(),
            });
        }
        if !radius.is_finite() {
            return Err(Error::Domain("enumeration radius must be finite".into()));
        }
        let bound = radius + eta();
        let mut out = Vec::new();
        if bound < 0.0 {
            return Ok(out);
        }
        let y = self.gs_coords(center);
        let mut z = vec![0i64; self.n];
        // the pruning identity is evaluated through the f64 Gram-Schmidt
        // data, which loses ~1e-8 relative accuracy on skew bases; pad the
        // recursion bound and let the exact leaf check filter
        let padded = bound * (1.0 + 1e-6) + 1e-9;
        self.enum_rec(
            self.n,
            0.0,
            padded * padded,
            &y,
            &mut z,
            center,
            bound,
            &mut out,
        )?;
        out.sort_by(|a, b| a.coeffs.cmp(&b.coeffs));
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn enum_rec(
        &self,
        level: usize,
        partial: Real,
        bound_sq: Real,
        y: &[Real],
        z: &mut Vec<i64>,
        center: &[Real],
        bound: Real,
        out: &mut Vec<LatticePoint>,
    ) -> Result<()> {
        if level == 0 {
            let point = self.vector_f64(z);
            if dist2(&point, center) <= bound {
                out.push(LatticePoint {
                    coeffs: z.clone(),
                    point,
                });
            }
            return Ok(());
        }
        let i = level - 1;
        let mut c = y[i];
        for j in level..self.n {
            c -= self.gs.mu[j][i] * z[j] as Real;
        }
        let room = bound_sq - partial;
        if room < 0.0 {
            return Ok(());
        }
        let w = (room / self.gs.norm_sq[i]).sqrt();
        let lo = (c - w).ceil();
        let hi = (c + w).floor();
        if lo.abs() > COEFF_LIMIT || hi.abs() > COEFF_LIMIT {
            return Err(Error::Overflow(format!(
                "enumeration coefficient range [{lo}, {hi}] exceeds the precision budget"
            )));
        }
        let mut zi = lo;
        while zi <= hi {
            z[i] = zi as i64;
            let d = zi - c;
            let add = d * d * self.gs.norm_sq[i];
            self.enum_rec(i, partial + add, bound_sq, y, z, center, bound, out)?;
            zi += 1.0;
        }
        z[i] = 0;
        Ok(())
    }

    /// Exact l2 closest vector by Schnorr-Euchner style search with a
    /// shrinking bound seeded at the Babai vector.
    pub fn closest_l2(&self, target: &[Real]) -> Result<(Vec<i64>, Real)> {
        let (z0, d0) = self.babai(target);
        let mut best = (z0, d0);
        if d0 <= eta() {
            return Ok(best);
        }
        // collect everything within the Babai radius and take the minimum;
        // the recursion prunes on the current best internally
        let y = self.gs_coords(target);
        let mut z = vec![0i64; self.n];
        let mut best_sq = (d0 * (1.0 + 1e-6) + 1e-9).powi(2);
        self.closest_rec(self.n, 0.0, &mut best_sq, &y, &mut z, target, &mut best)?;
        Ok(best)
    }

    #[allow(clippy::too_many_arguments)]
    fn closest_rec(
        &self,
        level: usize,
        partial: Real,
        best_sq: &mut Real,
        y: &[Real],
        z: &mut Vec<i64>,
        center: &[Real],
        best: &mut (Vec<i64>, Real),
    ) -> Result<()> {
        if level == 0 {
            let point = self.vector_f64(z);
            let d = dist2(&point, center);
            if best.1.is_nan() || d < best.1 {
                *best_sq = (d * (1.0 + 1e-6) + 1e-9).powi(2);
                *best = (z.clone(), d);
            }
            return Ok(());
        }
        let i = level - 1;
        let mut c = y[i];
        for j in level..self.n {
            c -= self.gs.mu[j][i] * z[j] as Real;
        }
        // walk outward from round(c); per side the contribution is monotone,
        // so a pruned step closes that side
        let zc = c.round();
        if zc.abs() > COEFF_LIMIT {
            return Err(Error::Overflow(
                "closest-vector coefficient exceeds the precision budget".into(),
            ));
        }
        let mut up = zc;
        let mut down = zc - 1.0;
        let mut up_alive = true;
        let mut down_alive = true;
        while up_alive || down_alive {
            let take_up = up_alive && (!down_alive || (up - c).abs() <= (c - down).abs());
            let cand = if take_up { up } else { down };
            let d = cand - c;
            let add = d * d * self.gs.norm_sq[i];
            if partial + add > *best_sq * (1.0 + 1e-6) + 1e-12 {
                if take_up {
                    up_alive = false;
                } else {
                    down_alive = false;
                }
                continue;
            }
            z[i] = cand as i64;
            self.closest_rec(i, partial + add, best_sq, y, z, center, best)?;
            if take_up {
                up += 1.0;
            } else {
                down -= 1.0;
            }
        }
        z[i] = 0;
        Ok(())
    }
}

/// Public spec form of the enumeration: rational ball center.
pub fn enumerate_l2(lattice: &Lattice, ball: &EnumerationBall) -> Result<Vec<LatticePoint>> {
    if ball.center.len() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            expected: lattice.dim(),
            got: ball.center.len(),
        });
    }
    lattice.enumerate_f64(&rat_vec_to_f64(&ball.center), ball.radius)
}

/// Deterministic minimum: smallest gauge, ties broken by lexicographically
/// smallest coefficient vector. `within` is the near-minimum tolerance.
fn select_min_lex<'a>(
    cands: &'a [LatticePoint],
    gauges: &[Real],
    within: Real,
) -> Option<(&'a LatticePoint, Real)> {
    let gmin = gauges.iter().copied().fold(Real::INFINITY, Real::min);
    if !gmin.is_finite() {
        return None;
    }
    cands
        .iter()
        .zip(gauges)
        .filter(|(_, &g)| g <= gmin + within)
        .min_by(|(a, _), (b, _)| a.coeffs.cmp(&b.coeffs))
        .map(|(p, &g)| (p, g))
}

/// Brute-force (1+0)-approximate CVP under an arbitrary gauge: enumerate an
/// l2 ball guaranteed to contain the gauge minimizer, then minimize the gauge
/// over it.
pub fn exact_cvp(lattice: &Lattice, target: &TargetPoint, norm: &NormBody) -> Result<CvpSolution> {
    if target.dim() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            expected: lattice.dim(),
            got: target.dim(),
        });
    }
    let (r, big_r) = norm.sandwich()?;
    let t = target.to_f64();
    let (_, d2) = lattice.closest_l2(&t)?;
    if d2 <= eta() {
        // only borderline targets pay for the exact membership solve
        if let Some(z) = lattice.coeffs_of(&target.coords) {
            let coeffs = int_coeffs_to_i64(&z)?;
            let point = lattice.vector_f64(&coeffs);
            return Ok(CvpSolution {
                coeffs,
                point,
                distance: 0.0,
            });
        }
    }
    let rad = (big_r / r) * (d2 + eta()) * (1.0 + 1e-12) + eta();
    let cands = lattice.enumerate_f64(&t, rad)?;
    let gauges: Vec<Real> = cands
        .iter()
        .map(|c| norm.gauge(&linalg::sub(&c.point, &t)))
        .collect::<Result<_>>()?;
    let (best, g) = select_min_lex(&cands, &gauges, eta()).ok_or_else(|| {
        Error::Domain(format!(
            "enumeration returned no candidates (d2 {d2}, radius {rad}, r {r}, R {big_r}, {} raw points)",
            cands.len()
        ))
    })?;
    Ok(CvpSolution {
        coeffs: best.coeffs.clone(),
        point: best.point.clone(),
        distance: g,
    })
}

/// Inner 2-approximate solver contract: returns a vector only if its gauge
/// distance is at most 2 (+eta); must return one whenever the minimum
/// distance is at most 1. An exact solver restricted to the gauge-2 ball
/// trivially satisfies this.
pub fn inner_two_approx_f64(
    lattice: &Lattice,
    target: &[Real],
    norm: &NormBody,
) -> Result<Option<CvpSolution>> {
    let (_, big_r) = norm.sandwich()?;
    let rad = 2.0 * big_r * (1.0 + 1e-12) + eta();
    let cands = lattice.enumerate_f64(target, rad)?;
    if cands.is_empty() {
        return Ok(None);
    }
    let mut kept = Vec::new();
    let mut gauges = Vec::new();
    for c in cands {
        let g = norm.gauge(&linalg::sub(&c.point, target))?;
        if g <= 2.0 + eta() {
            kept.push(c);
            gauges.push(g);
        }
    }
    Ok(select_min_lex(&kept, &gauges, eta()).map(|(p, g)| CvpSolution {
        coeffs: p.coeffs.clone(),
        point: p.point.clone(),
        distance: g,
    }))
}

pub fn inner_two_approx(
    lattice: &Lattice,
    target: &TargetPoint,
    norm: &NormBody,
) -> Result<Option<CvpSolution>> {
    if lattice.contains(&target.coords) {
        let z = lattice.coeffs_of(&target.coords).unwrap();
        let coeffs = int_coeffs_to_i64(&z)?;
        let point = lattice.vector_f64(&coeffs);
        return Ok(Some(CvpSolution {
            coeffs,
            point,
            distance: 0.0,
        }));
    }
    inner_two_approx_f64(lattice, &target.to_f64(), norm)
}

/// Basis of the sublattice { B z : <a, z> = 0 mod p }. The index is p when
/// a is nonzero mod p, else the lattice is unchanged.
pub fn hnf_sublattice(lattice: &Lattice, a: &[Int], p: u64) -> Result<Lattice> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if a.len() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            expected: lattice.dim(),
            got: a.len(),
        });
    }
    let pi = Int::from(p);
    let am: Vec<Int> = a
        .iter()
        .map(|ai| num_integer::Integer::mod_floor(ai, &pi))
        .collect();
    let Some(pivot) = am.iter().position(|ai| !ai.is_zero()) else {
        return Ok(lattice.clone());
    };
    let inv = mod_inverse(&am[pivot], p);
    let n = lattice.dim();
    // columns of the coefficient sublattice { z : <a, z> = 0 mod p }
    let mut zcols: Vec<Vec<Int>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut col = vec![Int::zero(); n];
        if i == pivot {
            col[pivot] = pi.clone();
        } else {
            col[i] = Int::one();
            let mult = num_integer::Integer::mod_floor(&(&am[i] * &inv), &pi);
            col[pivot] = -mult;
        }
        zcols.push(col);
    }
    let cols: Vec<Vec<Int>> = zcols
        .iter()
        .map(|z| mat_vec_int(lattice.basis(), z))
        .collect();
    let h = hnf_columns(&cols)?;
    Lattice::new(h)
}

fn int_coeffs_to_i64(z: &[Int]) -> Result<Vec<i64>> {
    z.iter()
        .map(|v| {
            v.to_i64()
                .ok_or_else(|| Error::Overflow(format!("coefficient {v} exceeds i64")))
        })
        .collect()
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_inverse(a: &Int, p: u64) -> Int {
    // Fermat: a^(p-2) mod p, p prime
    let pi = Int::from(p);
    let mut result = Int::one();
    let mut base = num_integer::Integer::mod_floor(a, &pi);
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = num_integer::Integer::mod_floor(&(&result * &base), &pi);
        }
        base = num_integer::Integer::mod_floor(&(&base * &base), &pi);
        e >>= 1;
    }
    result
}
