//! Gauge-function oracles for the supported norm bodies, sandwich radii,
//! smoothness profiles, and the modulus-of-smoothness formulas/estimators.

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm2, scale as vscale};
use crate::rng::SplitMix64;
use crate::simplex::{self, LpStatus};
use crate::Real;
use std::sync::Arc;

/// Upper bound `rho_K(tau) <= C tau^q` on the modulus of smoothness, with the
/// derived quantities the covering constructions need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessProfile {
    pub c: Real,
    pub q: Real,
}

impl SmoothnessProfile {
    /// Requires `c > 0` and `q > 1` (the cap constructions divide by `q - 1`).
    pub fn new(c: Real, q: Real) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("smoothness C must be positive, got {c}")));
        }
        if !(q > 1.0 && q.is_finite()) {
            return Err(Error::Domain(format!("smoothness q must exceed 1, got {q}")));
        }
        Ok(SmoothnessProfile { c, q })
    }

    pub fn rho_bound(&self, tau: Real) -> Real {
        self.c * tau.powf(self.q)
    }

    /// Threshold eps* = (1/(8 C^{1/q}))^{q/(q-1)}; below it the cap-cylinder
    /// construction applies (equivalently, delta - eps >= delta/2).
    pub fn threshold(&self) -> Real {
        (1.0 / (8.0 * self.c.powf(1.0 / self.q))).powf(self.q / (self.q - 1.0))
    }

    /// Cap radius delta = (1/4) (eps/C)^{1/q}.
    pub fn cap_radius(&self, eps: Real) -> Real {
        0.25 * (eps / self.c).powf(1.0 / self.q)
    }
}

/// Prism-shaped slice of a boundary cylinder: a slab of half-width
/// `half_width` along `axis` crossed with a tangential cap of gauge radius
/// `cap_radius` in the supporting hyperplane with the given normal.
/// Centered at the origin (the covering stores the translation).
#[derive(Debug, Clone)]
pub struct PrismSlice {
    pub axis: Vec<Real>,
    pub normal: Vec<Real>,
    pub half_width: Real,
    pub cap_radius: Real,
    pub base: Arc<NormBody>,
}

/// Membership/gauge callbacks for bodies only available as oracles.
#[derive(Clone)]
pub struct OracleBody {
    pub gauge: Arc<dyn Fn(&[Real]) -> Real + Send + Sync>,
    pub dim: usize,
}

impl std::fmt::Debug for OracleBody {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "OracleBody(dim={})", self.dim)
    }
}

#[derive(Debug, Clone)]
pub enum NormKind {
    /// The l_p unit ball, 1 <= p < infinity. p = infinity is represented as
    /// the cube through the polytope pathway.
    Lp { p: Real, dim: usize },
    /// { x : |<a_i, x>| <= b_i }, b_i > 0.
    Polytope { rows: Vec<Vec<Real>>, rhs: Vec<Real> },
    /// Minkowski sum of segments [-g_i, g_i].
    Zonotope { gens: Vec<Vec<Real>> },
    PrismSlice(PrismSlice),
    /// Convex hull of explicit vertices (not necessarily symmetric); gauge is
    /// taken about the origin.
    Vpoly { verts: Vec<Vec<Real>> },
    Oracle(OracleBody),
}

/// Descriptor of a convex body K with gauge evaluation, sandwich radii
/// r B_2 <= K <= R B_2, and an optional smoothness profile.
///
/// `scale` is a uniform homothety: the body is `scale * kind`, so the gauge
/// divides by `scale`.
#[derive(Debug, Clone)]
pub struct NormBody {
    pub kind: NormKind,
    pub scale: Real,
    sandwich: Option<(Real, Real)>,
    pub smoothness: Option<SmoothnessProfile>,
}

impl NormBody {
    pub fn lp(dim: usize, p: Real) -> Result<NormBody> {
        if !(p >= 1.0) {
            return Err(Error::Domain(format!("lp norm needs p >= 1, got {p}")));
        }
        if !p.is_finite() {
            return Err(Error::Domain(
                "p = infinity is represented as the cube polytope, not Lp".into(),
            ));
        }
        let e = 0.5 - 1.0 / p;
        let nf = dim as Real;
        let sandwich = (nf.powf(e.min(0.0)), nf.powf(e.max(0.0)));
        let smoothness = lp_default_profile(p);
        Ok(NormBody {
            kind: NormKind::Lp { p, dim },
            scale: 1.0,
            sandwich: Some(sandwich),
            smoothness,
        })
    }

    /// The cube [-1,1]^n as a polytope (the l_infinity pathway).
    pub fn cube(dim: usize) -> NormBody {
        let rows = (0..dim)
            .map(|i| {
                let mut r = vec![0.0; dim];
                r[i] = 1.0;
                r
            })
            .collect();
        NormBody::polytope(rows, vec![1.0; dim]).expect("cube is a valid polytope")
    }

    pub fn polytope(rows: Vec<Vec<Real>>, rhs: Vec<Real>) -> Result<NormBody> {
        let n = rows.first().map(|r| r.len()).unwrap_or(0);
        if n == 0 || rows.iter().any(|r| r.len() != n) || rhs.len() != rows.len() {
            return Err(Error::Domain("polytope rows/rhs shape mismatch".into()));
        }
        if rhs.iter().any(|&b| !(b > 0.0)) {
            return Err(Error::Domain("polytope rhs must be positive".into()));
        }
        let sandwich = polytope_sandwich(&rows, &rhs)?;
        Ok(NormBody {
            kind: NormKind::Polytope { rows, rhs },
            scale: 1.0,
            sandwich: Some(sandwich),
            smoothness: None,
        })
    }

    pub fn zonotope(gens: Vec<Vec<Real>>) -> Result<NormBody> {
        let n = gens.first().map(|g| g.len()).unwrap_or(0);
        if n == 0 || gens.iter().any(|g| g.len() != n) {
            return Err(Error::Domain("zonotope generators shape mismatch".into()));
        }
        let sandwich = zonotope_sandwich(&gens)?;
        Ok(NormBody {
            kind: NormKind::Zonotope { gens },
            scale: 1.0,
            sandwich: Some(sandwich),
            smoothness: None,
        })
    }

    pub fn prism_slice(slice: PrismSlice) -> Result<NormBody> {
        let alpha = dot(&slice.normal, &slice.axis);
        if alpha.abs() < 1e-12 {
            return Err(Error::Domain("prism slice normal orthogonal to axis".into()));
        }
        let (rb, rr) = slice.base.sandwich()?;
        let nn = norm2(&slice.normal);
        let alpha = alpha.abs() / nn;
        let p2 = norm2(&slice.axis);
        let r = (slice.half_width * alpha)
            .min(slice.cap_radius * rb / (1.0 + p2 / alpha))
            .max(1e-300);
        let r_out = slice.half_width * p2 + slice.cap_radius * rr;
        Ok(NormBody {
            kind: NormKind::PrismSlice(slice),
            scale: 1.0,
            sandwich: Some((r, r_out)),
            smoothness: None,
        })
    }

    pub fn vpoly(verts: Vec<Vec<Real>>) -> Result<NormBody> {
        let n = verts.first().map(|v| v.len()).unwrap_or(0);
        if n == 0 || verts.iter().any(|v| v.len() != n) {
            return Err(Error::Domain("vpoly vertices shape mismatch".into()));
        }
        let r_out = verts.iter().map(|v| norm2(v)).fold(0.0, Real::max);
        let r_in = if n == 2 { vpoly_inradius_2d(&verts) } else { None };
        Ok(NormBody {
            kind: NormKind::Vpoly { verts },
            scale: 1.0,
            sandwich: r_in.map(|r| (r, r_out)),
            smoothness: None,
        })
    }

    pub fn oracle(
        gauge: Arc<dyn Fn(&[Real]) -> Real + Send + Sync>,
        dim: usize,
        sandwich: (Real, Real),
    ) -> NormBody {
        NormBody {
            kind: NormKind::Oracle(OracleBody { gauge, dim }),
            scale: 1.0,
            sandwich: Some(sandwich),
            smoothness: None,
        }
    }

    pub fn with_smoothness(mut self, profile: SmoothnessProfile) -> NormBody {
        self.smoothness = Some(profile);
        self
    }

    pub fn with_sandwich(mut self, r: Real, big_r: Real) -> NormBody {
        self.sandwich = Some((r, big_r));
        self
    }

    /// Homothet `factor * self` (about the origin).
    pub fn scaled(&self, factor: Real) -> NormBody {
        debug_assert!(factor > 0.0);
        let mut b = self.clone();
        b.scale *= factor;
        b
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            NormKind::Lp { dim, .. } => *dim,
            NormKind::Polytope { rows, .. } => rows[0].len(),
            NormKind::Zonotope { gens } => gens[0].len(),
            NormKind::PrismSlice(s) => s.axis.len(),
            NormKind::Vpoly { verts } => verts[0].len(),
            NormKind::Oracle(o) => o.dim,
        }
    }

    /// Sandwich radii (r, R) with r B_2 <= body <= R B_2, scale included.
    pub fn sandwich(&self) -> Result<(Real, Real)> {
        let (r, big_r) = self.sandwich.ok_or(Error::MissingSandwich)?;
        Ok((r * self.scale, big_r * self.scale))
    }

    pub fn smoothness(&self) -> Result<SmoothnessProfile> {
        self.smoothness.ok_or(Error::MissingSmoothness)
    }

    /// Gauge ||x||_K = inf { s : x in s K }.
    pub fn gauge(&self, x: &[Real]) -> Result<Real> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let g = match &self.kind {
            NormKind::Lp { p, .. } => lp_norm(x, *p),
            NormKind::Polytope { rows, rhs } => rows
                .iter()
                .zip(rhs)
                .map(|(a, b)| (dot(a, x) / b).abs())
                .fold(0.0, Real::max),
            NormKind::Zonotope { gens } => zonotope_gauge(gens, x)?,
            NormKind::PrismSlice(s) => {
                let denom = dot(&s.normal, &s.axis);
                let t = dot(&s.normal, x) / denom;
                let mut w = x.to_vec();
                axpy(&mut w, -t, &s.axis);
                let tangential = s.base.gauge(&w)? / s.cap_radius;
                (t.abs() / s.half_width).max(tangential)
            }
            NormKind::Vpoly { verts } => vpoly_gauge(verts, x)?,
            NormKind::Oracle(o) => (o.gauge)(x),
        };
        Ok(g / self.scale)
    }

    /// Whether the gauge is symmetric by construction (Vpoly and Oracle may
    /// not be).
    pub fn symmetric_by_construction(&self) -> bool {
        !matches!(self.kind, NormKind::Vpoly { .. } | NormKind::Oracle(_))
    }

    /// A point drawn uniformly from the body. Exact for l_p balls, rejection
    /// from the circumscribed box otherwise (fine for n <= 8).
    pub fn sample_uniform(&self, rng: &mut SplitMix64) -> Result<Vec<Real>> {
        let n = self.dim();
        let x = match &self.kind {
            NormKind::Lp { p, .. } => {
                // Barthe-Guedon-Mendelson-Naor: g_i generalized Gaussian,
                // e exponential; x = g / (sum |g_i|^p + e)^(1/p)
                let p = *p;
                let g: Vec<Real> = (0..n)
                    .map(|_| rng.sign() * rng.gamma(1.0 / p).powf(1.0 / p))
                    .collect();
                let e = rng.exponential();
                let denom = (g.iter().map(|v| v.abs().powf(p)).sum::<Real>() + e).powf(1.0 / p);
                vscale(&g, 1.0 / denom)
            }
            _ => {
                let (_, big_r) = self.sandwich()?;
                let big_r = big_r / self.scale; // unscaled kind-body radius
                loop {
                    let x: Vec<Real> = (0..n).map(|_| rng.uniform(-big_r, big_r)).collect();
                    let g = match &self.kind {
                        NormKind::Lp { p, .. } => lp_norm(&x, *p),
                        NormKind::Polytope { rows, rhs } => rows
                            .iter()
                            .zip(rhs)
                            .map(|(a, b)| (dot(a, &x) / b).abs())
                            .fold(0.0, Real::max),
                        _ => self.clone_unscaled().gauge(&x)?,
                    };
                    if g <= 1.0 {
                        break x;
                    }
                }
            }
        };
        Ok(vscale(&x, self.scale))
    }

    /// A point with gauge exactly 1 (random direction, normalized).
    pub fn sample_boundary(&self, rng: &mut SplitMix64) -> Result<Vec<Real>> {
        let n = self.dim();
        loop {
            let d: Vec<Real> = (0..n).map(|_| rng.normal()).collect();
            if norm2(&d) < 1e-9 {
                continue;
            }
            let g = self.gauge(&d)?;
            if g > 1e-12 {
                return Ok(vscale(&d, 1.0 / g));
            }
        }
    }

    fn clone_unscaled(&self) -> NormBody {
        let mut b = self.clone();
        b.scale = 1.0;
        b
    }

    /// Support hyperplane normal at a boundary point (gauge(p) = 1).
    pub fn support_normal(&self, p: &[Real]) -> Result<Vec<Real>> {
        match &self.kind {
            NormKind::Lp { p: pw, .. } => {
                // gradient of the l_p norm
                let pw = *pw;
                if pw <= 1.0 + 1e-12 {
                    // l_1: subgradient sign vector
                    return Ok(p.iter().map(|v| v.signum()).collect());
                }
                let nr = lp_norm(p, pw);
                Ok(p.iter()
                    .map(|v| v.signum() * (v.abs() / nr).powf(pw - 1.0))
                    .collect())
            }
            NormKind::Polytope { rows, rhs } => {
                // active facet normal
                let mut best = (0usize, 0.0);
                for (i, (a, b)) in rows.iter().zip(rhs).enumerate() {
                    let v = (dot(a, p) / b).abs();
                    if v > best.1 {
                        best = (i, v);
                    }
                }
                let a = &rows[best.0];
                let s = dot(a, p).signum();
                Ok(vscale(a, s))
            }
            _ => Err(Error::Domain(
                "support normal only available for lp and polytope bodies".into(),
            )),
        }
    }
}

fn lp_default_profile(p: Real) -> Option<SmoothnessProfile> {
    if p >= 2.0 {
        // rho_p(tau) <= ((p-1)/2) tau^2, the sharp constant
        SmoothnessProfile::new((p - 1.0) / 2.0, 2.0).ok()
    } else if p > 1.0 {
        // rho_p(tau) <= tau^p / p
        SmoothnessProfile::new(1.0 / p, p).ok()
    } else {
        // p = 1 only has rho <= tau; no q > 1 profile exists
        None
    }
}

pub fn lp_norm(x: &[Real], p: Real) -> Real {
    if p == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        norm2(x)
    } else {
        let m = x.iter().map(|v| v.abs()).fold(0.0, Real::max);
        if m == 0.0 {
            return 0.0;
        }
        m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<Real>().powf(1.0 / p)
    }
}

fn zonotope_gauge(gens: &[Vec<Real>], x: &[Real]) -> Result<Real> {
    let m = gens.len();
    let n = x.len();
    // vars: lam+ (m), lam- (m), s (m), t (1); rows: sum (lam+ - lam-) g = x,
    // lam+_i + lam-_i + s_i - t = 0
    let nv = 3 * m + 1;
    let mut a = Vec::with_capacity(n + m);
    let mut b = Vec::with_capacity(n + m);
    for i in 0..n {
        let mut row = vec![0.0; nv];
        for j in 0..m {
            row[j] = gens[j][i];
            row[m + j] = -gens[j][i];
        }
        a.push(row);
        b.push(x[i]);
    }
    for j in 0..m {
        let mut row = vec![0.0; nv];
        row[j] = 1.0;
        row[m + j] = 1.0;
        row[2 * m + j] = 1.0;
        row[3 * m] = -1.0;
        a.push(row);
        b.push(0.0);
    }
    let mut c = vec![0.0; nv];
    c[3 * m] = 1.0;
    let sol = simplex::solve(&a, &b, &c);
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective.max(0.0)),
        LpStatus::Infeasible => Err(Error::UnboundedGauge),
        LpStatus::Unbounded => Err(Error::Domain("zonotope gauge LP unbounded".into())),
    }
}

/// Coefficients lambda with x = sum lambda_i g_i and max |lambda_i| minimal.
pub fn zonotope_witness(gens: &[Vec<Real>], x: &[Real]) -> Result<(Real, Vec<Real>)> {
    let m = gens.len();
    let n = x.len();
    let nv = 3 * m + 1;
    let mut a = Vec::with_capacity(n + m);
    let mut b = Vec::with_capacity(n + m);
    for i in 0..n {
        let mut row = vec![0.0; nv];
        for j in 0..m {
            row[j] = gens[j][i];
            row[m + j] = -gens[j][i];
        }
        a.push(row);
        b.push(x[i]);
    }
    for j in 0..m {
        let mut row = vec![0.0; nv];
        row[j] = 1.0;
        row[m + j] = 1.0;
        row[2 * m + j] = 1.0;
        row[3 * m] = -1.0;
        a.push(row);
        b.push(0.0);
    }
    let mut c = vec![0.0; nv];
    c[3 * m] = 1.0;
    let sol = simplex::solve(&a, &b, &c);
    match sol.status {
        LpStatus::Optimal => {
            let lam = (0..m).map(|j| sol.x[j] - sol.x[m + j]).collect();
            Ok((sol.objective.max(0.0), lam))
        }
        _ => Err(Error::UnboundedGauge),
    }
}

fn vpoly_gauge(verts: &[Vec<Real>], x: &[Real]) -> Result<Real> {
    let k = verts.len();
    let n = x.len();
    // min sum mu  s.t.  sum mu_i v_i = x, mu >= 0
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        a.push((0..k).map(|j| verts[j][i]).collect::<Vec<Real>>());
        b.push(x[i]);
    }
    let c = vec![1.0; k];
    let sol = simplex::solve(&a, &b, &c);
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective.max(0.0)),
        _ => Err(Error::UnboundedGauge),
    }
}

fn polytope_sandwich(rows: &[Vec<Real>], rhs: &[Real]) -> Result<(Real, Real)> {
    let n = rows[0].len();
    let r = rows
        .iter()
        .zip(rhs)
        .map(|(a, b)| b / norm2(a))
        .fold(Real::INFINITY, Real::min);
    // circumradius from vertex enumeration over sign-assigned active sets
    let m = rows.len();
    if m < n {
        return Err(Error::Domain("polytope is unbounded (fewer slabs than dims)".into()));
    }
    let mut big_r: Real = 0.0;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        // solve for each sign pattern of the selected rows
        for signs in 0..(1u32 << n) {
            let mut mat: Vec<Vec<Real>> = Vec::with_capacity(n);
            let mut rv: Vec<Real> = Vec::with_capacity(n);
            for (k, &i) in idx.iter().enumerate() {
                let s = if signs >> k & 1 == 1 { -1.0 } else { 1.0 };
                mat.push(vscale(&rows[i], s));
                rv.push(rhs[i]);
            }
            if let Some(x) = crate::linalg::solve_f64(&mat, &rv) {
                let feasible = rows
                    .iter()
                    .zip(rhs)
                    .all(|(a, b)| dot(a, &x).abs() <= b * (1.0 + 1e-9) + 1e-12);
                if feasible {
                    big_r = big_r.max(norm2(&x));
                }
            }
        }
        // next combination of n rows out of m
        let mut i = n;
        loop {
            if i == 0 {
                if big_r <= 0.0 {
                    return Err(Error::Domain("polytope appears unbounded".into()));
                }
                return Ok((r, big_r));
            }
            i -= 1;
            if idx[i] != i + m - n {
                idx[i] += 1;
                for j in i + 1..n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn zonotope_sandwich(gens: &[Vec<Real>]) -> Result<(Real, Real)> {
    let m = gens.len();
    let n = gens[0].len();
    if m > 22 {
        return Err(Error::BudgetExceeded(format!(
            "zonotope sandwich enumeration over 2^{m} sign patterns"
        )));
    }
    // circumradius: max over sign patterns (by symmetry fix the first sign)
    let mut big_r: Real = 0.0;
    for mask in 0..(1u64 << (m.saturating_sub(1))) {
        let mut v = vec![0.0; n];
        for (j, g) in gens.iter().enumerate() {
            let s = if j > 0 && mask >> (j - 1) & 1 == 1 { -1.0 } else { 1.0 };
            axpy(&mut v, s, g);
        }
        big_r = big_r.max(norm2(&v));
    }
    // inradius: min of the support function over facet normals, i.e. over
    // unit vectors orthogonal to n-1 independent generators
    let mut r = Real::INFINITY;
    if n == 1 {
        let h: Real = gens.iter().map(|g| g[0].abs()).sum();
        return Ok((h, h));
    }
    let mut idx: Vec<usize> = (0..n - 1).collect();
    loop {
        let subset: Vec<&Vec<Real>> = idx.iter().map(|&i| &gens[i]).collect();
        if let Some(u) = orthogonal_complement_dir(&subset, n) {
            let h: Real = gens.iter().map(|g| dot(g, &u).abs()).sum();
            if h > 1e-12 {
                r = r.min(h);
            }
        }
        let mut i = n - 1;
        loop {
            if i == 0 {
                if !r.is_finite() || r <= 0.0 {
                    return Err(Error::Domain("zonotope is not full-dimensional".into()));
                }
                return Ok((r, big_r));
            }
            i -= 1;
            if idx[i] != i + m - (n - 1) {
                idx[i] += 1;
                for j in i + 1..n - 1 {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// A unit vector orthogonal to all given vectors, or None if they do not
/// span an (n-1)-dimensional space.
fn orthogonal_complement_dir(vs: &[&Vec<Real>], n: usize) -> Option<Vec<Real>> {
    // Gram-Schmidt the subset, then project standard basis vectors
    let mut basis: Vec<Vec<Real>> = Vec::new();
    for v in vs {
        let mut w = (*v).clone();
        for b in &basis {
            let c = dot(&w, b);
            axpy(&mut w, -c, b);
        }
        let nw = norm2(&w);
        if nw < 1e-10 {
            return None; // dependent subset
        }
        basis.push(vscale(&w, 1.0 / nw));
    }
    for i in 0..n {
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        for b in &basis {
            let c = dot(&w, b);
            axpy(&mut w, -c, b);
        }
        let nw = norm2(&w);
        if nw > 1e-8 {
            return Some(vscale(&w, 1.0 / nw));
        }
    }
    None
}

fn vpoly_inradius_2d(verts: &[Vec<Real>]) -> Option<Real> {
    // hull edges via gift wrapping would be overkill; for the small inputs
    // here, use every vertex pair that supports the hull
    let k = verts.len();
    let mut r = Real::INFINITY;
    let mut found = false;
    for i in 0..k {
        for j in i + 1..k {
            let (a, b) = (&verts[i], &verts[j]);
            let nx = b[1] - a[1];
            let ny = a[0] - b[0];
            let nn = (nx * nx + ny * ny).sqrt();
            if nn < 1e-12 {
                continue;
            }
            let d = (nx * a[0] + ny * a[1]) / nn;
            // supporting edge: all vertices on one side
            let mut lo = Real::INFINITY;
            let mut hi = Real::NEG_INFINITY;
            for v in verts {
                let s = (nx * v[0] + ny * v[1]) / nn;
                lo = lo.min(s);
                hi = hi.max(s);
            }
            if (hi - d).abs() < 1e-9 || (lo - d).abs() < 1e-9 {
                found = true;
                r = r.min(d.abs().min((lo - d).abs().max((hi - d).abs())));
            }
        }
    }
    // distance from origin to each supporting line, minimum over edges
    if found && r.is_finite() && r > 0.0 {
        Some(r)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Modulus of smoothness

/// Closed-form modulus of smoothness of the l_p ball.
pub fn modulus_lp(p: Real, tau: Real) -> Result<Real> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Domain(format!("tau must lie in (0,1), got {tau}")));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p must lie in [1, infinity), got {p}")));
    }
    if p >= 2.0 {
        Ok((((1.0 + tau).powf(p) + (1.0 - tau).abs().powf(p)) / 2.0).powf(1.0 / p) - 1.0)
    } else {
        Ok((1.0 + tau.powf(p)).powf(1.0 / p) - 1.0)
    }
}

/// The coarse bounding profile stated alongside the closed form: (2^p, 2)
/// for p >= 2 and (1/p, p) for p in [1, 2]. The default profile on
/// `NormBody::lp` uses the sharp constants instead.
pub fn lp_reference_profile(p: Real) -> (Real, Real) {
    if p >= 2.0 {
        (2f64.powf(p), 2.0)
    } else {
        (1.0 / p, p)
    }
}

/// Monte-Carlo lower estimate of rho_K(tau): the best value over sampled
/// unit pairs, sharpened by stochastic hill climbing around the incumbent.
/// Always a valid lower bound on the supremum (up to gauge round-off).
pub fn modulus_estimate(
    body: &NormBody,
    tau: Real,
    trials: usize,
    rng: &mut SplitMix64,
) -> Result<Real> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Domain(format!("tau must lie in (0,1), got {tau}")));
    }
    let n = body.dim();
    let pair_value = |x: &[Real], y: &[Real]| -> Result<Real> {
        let mut xp = x.to_vec();
        axpy(&mut xp, tau, y);
        let mut xm = x.to_vec();
        axpy(&mut xm, -tau, y);
        Ok((body.gauge(&xp)? + body.gauge(&xm)?) / 2.0 - 1.0)
    };

    let explore = trials / 2;
    let mut best_x = body.sample_boundary(rng)?;
    let mut best_y = body.sample_boundary(rng)?;
    let mut best = pair_value(&best_x, &best_y)?;
    for _ in 0..explore {
        let x = body.sample_boundary(rng)?;
        let y = body.sample_boundary(rng)?;
        let v = pair_value(&x, &y)?;
        if v > best {
            best = v;
            best_x = x;
            best_y = y;
        }
    }
    // refinement: perturb the incumbent with an annealed step
    let refine = trials - explore;
    let mut sigma: Real = 0.5;
    let shrink = (1e-5f64 / 0.5).powf(1.0 / refine.max(1) as Real);
    for _ in 0..refine {
        let perturb = |v: &[Real], rng: &mut SplitMix64, body: &NormBody| -> Result<Vec<Real>> {
            let mut w = v.to_vec();
            for wi in w.iter_mut() {
                *wi += sigma * rng.normal();
            }
            let g = body.gauge(&w)?;
            if g < 1e-12 {
                return Ok(v.to_vec());
            }
            Ok(vscale(&w, 1.0 / g))
        };
        let x = perturb(&best_x, rng, body)?;
        let y = perturb(&best_y, rng, body)?;
        let v = pair_value(&x, &y)?;
        if v > best {
            best = v;
            best_x = x;
            best_y = y;
        }
        sigma *= shrink;
    }
    let _ = n;
    Ok(best.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eta;

    #[test]
    fn lp_gauge_matches_closed_forms() {
        let b1 = NormBody::lp(2, 1.0).unwrap();
        assert!((b1.gauge(&[3.0, -4.0]).unwrap() - 7.0).abs() < 1e-12);
        let b2 = NormBody::lp(2, 2.0).unwrap();
        assert!((b2.gauge(&[3.0, -4.0]).unwrap() - 5.0).abs() < 1e-12);
        let b3 = NormBody::lp(2, 3.0).unwrap();
        let expect = (27.0f64 + 64.0).powf(1.0 / 3.0);
        assert!((b3.gauge(&[3.0, -4.0]).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn cube_gauge_is_linf() {
        let c = NormBody::cube(2);
        assert!((c.gauge(&[3.0, -4.0]).unwrap() - 4.0).abs() < 1e-12);
        let sq = NormBody::polytope(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert!((sq.gauge(&[0.5, -0.25]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zonotope_gauge_lp_oracle() {
        // generators (1,0),(0,1),(1,1); x = (2,0) has gauge 1 via (1,-1,1)
        let z = NormBody::zonotope(vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ])
        .unwrap();
        assert!((z.gauge(&[2.0, 0.0]).unwrap() - 1.0).abs() < 1e-8);
        // hand enumeration of vertices: (2, 0) is a vertex of the zonotope
        let (t, lam) = zonotope_witness(
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            &[2.0, 0.0],
        )
        .unwrap();
        assert!((t - 1.0).abs() < 1e-8);
        let rx = lam[0] + lam[2];
        let ry = lam[1] + lam[2];
        assert!((rx - 2.0).abs() < 1e-8 && ry.abs() < 1e-8);
    }

    #[test]
    fn zonotope_gauge_outside_span_errors() {
        let z = NormBody::zonotope(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 1.0, 0.0]]);
        // gens do not span R^3: constructor already rejects (not full-dim)
        assert!(z.is_err());
    }

    #[test]
    fn sandwich_lp() {
        // l1 in n=4: r = n^{-1/2}, R = 1
        let b = NormBody::lp(4, 1.0).unwrap();
        let (r, big_r) = b.sandwich().unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        assert!((big_r - 1.0).abs() < 1e-12);
        // l3 in n=3: r = 1, R = n^{1/2 - 1/3}
        let b = NormBody::lp(3, 3.0).unwrap();
        let (r, big_r) = b.sandwich().unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert!((big_r - 3f64.powf(1.0 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn sandwich_cube_and_zonotope() {
        let c = NormBody::cube(3);
        let (r, big_r) = c.sandwich().unwrap();
        assert!((r - 1.0).abs() < 1e-9);
        assert!((big_r - 3f64.sqrt()).abs() < 1e-9);
        // the square as a zonotope
        let z = NormBody::zonotope(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let (r, big_r) = z.sandwich().unwrap();
        assert!((r - 1.0).abs() < 1e-9);
        assert!((big_r - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn gauge_sandwich_consistency_sampled() {
        let mut rng = SplitMix64::new(11);
        for body in [
            NormBody::lp(3, 1.5).unwrap(),
            NormBody::lp(3, 3.0).unwrap(),
            NormBody::cube(3),
            NormBody::zonotope(vec![
                vec![1.0, 0.0, 0.2],
                vec![0.0, 1.0, -0.3],
                vec![0.5, 0.5, 1.0],
                vec![-0.2, 0.4, 0.6],
            ])
            .unwrap(),
        ] {
            let (r, big_r) = body.sandwich().unwrap();
            for _ in 0..200 {
                let x: Vec<Real> = (0..3).map(|_| rng.uniform(-2.0, 2.0)).collect();
                let g = body.gauge(&x).unwrap();
                let n2 = norm2(&x);
                assert!(g <= n2 / r + 1e-7, "gauge above ||x||/r");
                assert!(g >= n2 / big_r - 1e-7, "gauge below ||x||/R");
            }
        }
    }

    #[test]
    fn gauge_axioms_sampled() {
        let mut rng = SplitMix64::new(5);
        let bodies = [
            NormBody::lp(3, 1.0).unwrap(),
            NormBody::lp(3, 2.5).unwrap(),
            NormBody::cube(3),
        ];
        for body in &bodies {
            assert!(body.gauge(&[0.0, 0.0, 0.0]).unwrap().abs() < 1e-12);
            for _ in 0..100 {
                let x: Vec<Real> = (0..3).map(|_| rng.uniform(-1.0, 1.0)).collect();
                let y: Vec<Real> = (0..3).map(|_| rng.uniform(-1.0, 1.0)).collect();
                let gx = body.gauge(&x).unwrap();
                let gy = body.gauge(&y).unwrap();
                let lam = rng.uniform(-3.0, 3.0);
                let gsx = body.gauge(&vscale(&x, lam)).unwrap();
                assert!((gsx - lam.abs() * gx).abs() < 1e-9 * (1.0 + gsx));
                let gsum = body.gauge(&crate::linalg::add(&x, &y)).unwrap();
                assert!(gsum <= gx + gy + 1e-9);
            }
        }
    }

    #[test]
    fn modulus_lp_closed_form_values() {
        // p = 2, tau = 0.5: sqrt(1.25) - 1
        let v = modulus_lp(2.0, 0.5).unwrap();
        assert!((v - (1.25f64.sqrt() - 1.0)).abs() < 1e-12);
        // p = 1, tau = 0.5: equals the bound tau^p / p = 0.5
        let v = modulus_lp(1.0, 0.5).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        // tau -> 0+: value -> 0
        let v = modulus_lp(2.0, 1e-8).unwrap();
        assert!(v < 1e-12);
        assert!(modulus_lp(2.0, 0.0).is_err());
        assert!(modulus_lp(2.0, 1.0).is_err());
    }

    #[test]
    fn modulus_default_profiles_bound_closed_form() {
        for &p in &[1.5, 2.0, 3.0, 4.0] {
            let prof = lp_default_profile(p).unwrap();
            let mut tau = 0.01;
            while tau < 1.0 {
                let rho = modulus_lp(p, tau).unwrap();
                assert!(
                    rho <= prof.rho_bound(tau) + 1e-12,
                    "p={p} tau={tau}: {rho} > {}",
                    prof.rho_bound(tau)
                );
                tau += 0.01;
            }
        }
    }

    #[test]
    fn collinear_pair_contributes_zero() {
        let body = NormBody::lp(3, 2.0).unwrap();
        let x = vec![1.0, 0.0, 0.0];
        let v = (body.gauge(&[1.3, 0.0, 0.0]).unwrap() + body.gauge(&[0.7, 0.0, 0.0]).unwrap())
            / 2.0
            - 1.0;
        assert!(v.abs() < 1e-12);
        let _ = x;
    }

    #[test]
    fn modulus_estimate_l2_n3() {
        let body = NormBody::lp(3, 2.0).unwrap();
        let mut rng = SplitMix64::new(17);
        let est = modulus_estimate(&body, 0.5, 20_000, &mut rng).unwrap();
        let closed = modulus_lp(2.0, 0.5).unwrap();
        assert!(est <= closed + eta(), "estimate exceeds closed form");
        assert!(est >= closed - 1e-3, "estimate too low: {est} vs {closed}");
    }

    #[test]
    fn modulus_estimate_linf_witness() {
        // the cube has no better-than-linear modulus; witness x=(1,1), y=(1,-1)
        let body = NormBody::cube(2);
        let mut rng = SplitMix64::new(23);
        let est = modulus_estimate(&body, 0.5, 20_000, &mut rng).unwrap();
        assert!(est >= 0.5 - 1e-3, "cube estimate {est}");
        assert!(est <= 0.5 + eta());
    }

    #[test]
    fn modulus_estimates_never_exceed_subadditivity() {
        // rho(tau) <= tau for every symmetric body
        let mut rng = SplitMix64::new(29);
        let bodies = [
            NormBody::lp(2, 1.0).unwrap(),
            NormBody::lp(3, 2.0).unwrap(),
            NormBody::cube(2),
            NormBody::zonotope(vec![vec![1.0, 0.3], vec![-0.2, 1.0], vec![0.4, 0.4]]).unwrap(),
        ];
        for body in &bodies {
            for tau in [0.2, 0.5] {
                let est = modulus_estimate(body, tau, 4000, &mut rng).unwrap();
                assert!(est <= tau + eta(), "estimate {est} above tau {tau}");
            }
        }
    }

    #[test]
    fn prism_slice_gauge_decomposes() {
        let base = Arc::new(NormBody::lp(2, 2.0).unwrap());
        let slice = PrismSlice {
            axis: vec![1.0, 0.0],
            normal: vec![1.0, 0.0],
            half_width: 0.1,
            cap_radius: 0.2,
            base,
        };
        let body = NormBody::prism_slice(slice).unwrap();
        // x = t*axis + w: t = 0.05, w = (0, 0.1): gauge = max(0.5, 0.5) = 0.5
        let g = body.gauge(&[0.05, 0.1]).unwrap();
        assert!((g - 0.5).abs() < 1e-9);
        // symmetric
        let g2 = body.gauge(&[-0.05, -0.1]).unwrap();
        assert!((g - g2).abs() < 1e-12);
    }

    #[test]
    fn vpoly_gauge_triangle() {
        // triangle with 0 strictly inside
        let v = NormBody::vpoly(vec![
            vec![1.0, -0.5],
            vec![-1.0, -0.5],
            vec![0.0, 1.0],
        ])
        .unwrap();
        assert!((v.gauge(&[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-8);
        assert!((v.gauge(&[0.0, 2.0]).unwrap() - 2.0).abs() < 1e-8);
        assert!((v.gauge(&[0.0, -0.25]).unwrap() - 0.5).abs() < 1e-8);
        // asymmetric: gauge(x) != gauge(-x)
        let a = v.gauge(&[0.0, 1.0]).unwrap();
        let b = v.gauge(&[0.0, -1.0]).unwrap();
        assert!((a - b).abs() > 0.5);
    }

    #[test]
    fn uniform_samples_stay_inside() {
        let mut rng = SplitMix64::new(99);
        for body in [NormBody::lp(3, 1.5).unwrap(), NormBody::cube(3)] {
            for _ in 0..500 {
                let x = body.sample_uniform(&mut rng).unwrap();
                assert!(body.gauge(&x).unwrap() <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn support_normal_touches_boundary() {
        let body = NormBody::lp(2, 3.0).unwrap();
        let mut rng = SplitMix64::new(4);
        for _ in 0..50 {
            let p = body.sample_boundary(&mut rng).unwrap();
            let nrm = body.support_normal(&p).unwrap();
            // support: <n, x> <= <n, p> for sampled x in K
            let hp = dot(&nrm, &p);
            for _ in 0..50 {
                let x = body.sample_uniform(&mut rng).unwrap();
                assert!(dot(&nrm, &x) <= hp + 1e-9);
            }
        }
    }
}
