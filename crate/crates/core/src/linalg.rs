//! Small dense linear algebra: exact integer/rational routines for lattice
//! bookkeeping and `f64` helpers for the analytic layer.
//!
//! Matrices are stored column-major (`cols[j]` is the j-th column); columns
//! are the basis vectors throughout the crate.

use crate::error::{Error, Result};
use crate::{Int, Rat, Real};
use num_traits::{One, Signed, Zero};

// ---------------------------------------------------------------------------
// f64 helpers

pub fn dot(a: &[Real], b: &[Real]) -> Real {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[Real]) -> Real {
    dot(a, a).sqrt()
}

pub fn sub(a: &[Real], b: &[Real]) -> Vec<Real> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Real], b: &[Real]) -> Vec<Real> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Real], s: Real) -> Vec<Real> {
    a.iter().map(|x| x * s).collect()
}

/// y += s * x
pub fn axpy(y: &mut [Real], s: Real, x: &[Real]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

/// Solve a square f64 system (rows) by Gaussian elimination with partial
/// pivoting. Returns None when near-singular.
pub fn solve_f64(rows: &[Vec<Real>], b: &[Real]) -> Option<Vec<Real>> {
    let n = rows.len();
    debug_assert!(rows.iter().all(|r| r.len() == n));
    let mut a: Vec<Vec<Real>> = rows
        .iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut row = r.clone();
            row.push(bi);
            row
        })
        .collect();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[piv][k].abs() < 1e-12 {
            return None;
        }
        a.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f != 0.0 {
                for j in k..=n {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = a[i][n];
        for j in i + 1..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

pub fn dist2(a: &[Real], b: &[Real]) -> Real {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<Real>()
        .sqrt()
}

// ---------------------------------------------------------------------------
// Exact integer routines

/// Determinant of a square integer matrix (columns), by Bareiss
/// fraction-free elimination. Exact.
pub fn det_int(cols: &[Vec<Int>]) -> Int {
    let n = cols.len();
    if n == 0 {
        return Int::one();
    }
    assert!(cols.iter().all(|c| c.len() == n));
    // work on a row-major copy
    let mut m: Vec<Vec<Int>> = (0..n)
        .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
        .collect();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Int::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = &t / &prev;
            }
        }
        prev = m[k][k].clone();
        for i in k + 1..n {
            m[i][k] = Int::zero();
        }
    }
    sign * m[n - 1][n - 1].clone()
}

/// Solve `cols * z = x` exactly over the rationals. Returns `None` when the
/// matrix is singular.
pub fn solve_rational(cols: &[Vec<Int>], x: &[Rat]) -> Option<Vec<Rat>> {
    let n = cols.len();
    assert_eq!(x.len(), n);
    // augmented row-major rational matrix
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Rat::from_integer(cols[j][i].clone()))
                .chain(std::iter::once(x[i].clone()))
                .collect()
        })
        .collect();
    for k in 0..n {
        let piv = (k..n).find(|&r| !a[r][k].is_zero())?;
        a.swap(k, piv);
        let p = a[k][k].clone();
        for j in k..=n {
            a[k][j] = &a[k][j] / &p;
        }
        for i in 0..n {
            if i != k && !a[i][k].is_zero() {
                let f = a[i][k].clone();
                for j in k..=n {
                    let t = &a[i][j] - &(&f * &a[k][j]);
                    a[i][j] = t;
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n].clone()).collect())
}

/// cols * z for an integer coefficient vector.
pub fn mat_vec_int(cols: &[Vec<Int>], z: &[Int]) -> Vec<Int> {
    let n = cols.first().map_or(0, |c| c.len());
    let mut out = vec![Int::zero(); n];
    for (c, zj) in cols.iter().zip(z) {
        for (o, ci) in out.iter_mut().zip(c) {
            *o += ci * zj;
        }
    }
    out
}

/// Column-style Hermite normal form of an n x m integer matrix (m >= n).
/// Returns n linearly independent columns spanning the same column lattice,
/// in lower-triangular form with positive diagonal.
pub fn hnf_columns(cols: &[Vec<Int>]) -> Result<Vec<Vec<Int>>> {
    let n = cols.first().map(|c| c.len()).ok_or(Error::SingularBasis)?;
    let mut work: Vec<Vec<Int>> = cols.to_vec();
    let m = work.len();
    let mut pivot_col = 0usize;
    for row in 0..n {
        // eliminate across columns pivot_col..m on this row via gcd steps
        loop {
            let nz: Vec<usize> = (pivot_col..m).filter(|&j| !work[j][row].is_zero()).collect();
            if nz.is_empty() {
                return Err(Error::SingularBasis);
            }
            if nz.len() == 1 {
                work.swap(pivot_col, nz[0]);
                break;
            }
            // pick the column with smallest nonzero |entry| as pivot
            let best = *nz
                .iter()
                .min_by_key(|&&j| work[j][row].abs())
                .unwrap();
            work.swap(pivot_col, best);
            let piv = work[pivot_col][row].clone();
            for j in pivot_col + 1..m {
                if work[j][row].is_zero() {
                    continue;
                }
                let q = div_round(&work[j][row], &piv);
                if !q.is_zero() {
                    for i in 0..n {
                        let t = &work[j][i] - &(&q * &work[pivot_col][i]);
                        work[j][i] = t;
                    }
                }
            }
        }
        // normalize pivot sign
        if work[pivot_col][row].is_negative() {
            for i in 0..n {
                work[pivot_col][i] = -work[pivot_col][i].clone();
            }
        }
        // reduce earlier columns against this pivot (keeps entries small)
        let piv = work[pivot_col][row].clone();
        for j in 0..pivot_col {
            if work[j][row].is_zero() {
                continue;
            }
            let q = num_integer::Integer::div_floor(&work[j][row], &piv);
            if !q.is_zero() {
                for i in 0..n {
                    let t = &work[j][i] - &(&q * &work[pivot_col][i]);
                    work[j][i] = t;
                }
            }
        }
        pivot_col += 1;
        if pivot_col == n {
            break;
        }
    }
    if pivot_col < n {
        return Err(Error::SingularBasis);
    }
    work.truncate(n);
    Ok(work)
}

/// Rounded division (nearest integer quotient).
fn div_round(a: &Int, b: &Int) -> Int {
    let (q, r) = num_integer::Integer::div_mod_floor(a, b);
    // r shares the sign of b and |r| < |b|; round up when |r| > |b|/2
    if r.abs() * Int::from(2) > b.abs() {
        q + Int::one()
    } else {
        q
    }
}

// ---------------------------------------------------------------------------
// Gram-Schmidt (f64, for enumeration bounds)

/// Gram-Schmidt data of a column basis: orthogonal vectors, coefficients
/// mu[j][i] = <b_j, b*_i>/<b*_i, b*_i> for i < j, and squared norms.
#[derive(Debug, Clone)]
pub struct GramSchmidt {
    pub star: Vec<Vec<Real>>,
    pub mu: Vec<Vec<Real>>,
    pub norm_sq: Vec<Real>,
}

pub fn gram_schmidt(cols: &[Vec<Real>]) -> GramSchmidt {
    let m = cols.len();
    let mut star: Vec<Vec<Real>> = Vec::with_capacity(m);
    let mut mu: Vec<Vec<Real>> = Vec::with_capacity(m);
    let mut norm_sq: Vec<Real> = Vec::with_capacity(m);
    for j in 0..m {
        let mut v = cols[j].clone();
        let mut mj = vec![0.0; j];
        // modified Gram-Schmidt: project the running residual, which stays
        // accurate on the ill-conditioned bases HNF can produce
        for i in 0..j {
            let c = if norm_sq[i] > 0.0 {
                dot(&v, &star[i]) / norm_sq[i]
            } else {
                0.0
            };
            mj[i] = c;
            axpy(&mut v, -c, &star[i]);
        }
        norm_sq.push(dot(&v, &v));
        star.push(v);
        mu.push(mj);
    }
    GramSchmidt { star, mu, norm_sq }
}

/// Convert an integer column to f64, failing if any entry exceeds what f64
/// represents exactly.
pub fn int_col_to_f64(col: &[Int]) -> Result<Vec<Real>> {
    col.iter()
        .map(|v| {
            let f = int_to_f64(v)?;
            Ok(f)
        })
        .collect()
}

pub fn int_to_f64(v: &Int) -> Result<Real> {
    use num_traits::ToPrimitive;
    let f = v.to_f64().ok_or_else(|| Error::Overflow(v.to_string()))?;
    if v.abs() > Int::from(1u64 << 53) {
        return Err(Error::Overflow(format!("{v} exceeds exact f64 range")));
    }
    Ok(f)
}

pub fn rat_to_f64(v: &Rat) -> Real {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(Real::NAN)
}

pub fn rat_vec_to_f64(v: &[Rat]) -> Vec<Real> {
    v.iter().map(rat_to_f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cols_of(rows: &[&[i64]]) -> Vec<Vec<Int>> {
        let n = rows.len();
        (0..rows[0].len())
            .map(|j| (0..n).map(|i| Int::from(rows[i][j])).collect())
            .collect()
    }

    #[test]
    fn det_small() {
        assert_eq!(det_int(&cols_of(&[&[2, 0], &[0, 3]])), Int::from(6));
        assert_eq!(det_int(&cols_of(&[&[1, 2], &[2, 4]])), Int::from(0));
        assert_eq!(
            det_int(&cols_of(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]])),
            Int::from(-2)
        );
    }

    #[test]
    fn solve_exact() {
        let cols = cols_of(&[&[2, 1], &[1, 3]]);
        let x = vec![Rat::from_integer(Int::from(5)), Rat::from_integer(Int::from(10))];
        let z = solve_rational(&cols, &x).unwrap();
        // check: cols * z = x
        for i in 0..2 {
            let mut acc = Rat::zero();
            for j in 0..2 {
                acc += Rat::from_integer(cols[j][i].clone()) * z[j].clone();
            }
            assert_eq!(acc, x[i]);
        }
    }

    #[test]
    fn hnf_spans_same_lattice() {
        // columns (2,0),(1,1),(0,2) in Z^2 span the lattice {x : x1+x2 even}
        let cols = vec![
            vec![Int::from(2), Int::from(0)],
            vec![Int::from(1), Int::from(1)],
            vec![Int::from(0), Int::from(2)],
        ];
        let h = hnf_columns(&cols).unwrap();
        assert_eq!(h.len(), 2);
        let d = det_int(&h);
        assert_eq!(d.abs(), Int::from(2));
    }

    #[test]
    fn gram_schmidt_orthogonal() {
        let cols = vec![vec![1.0, 1.0], vec![1.0, 0.0]];
        let gs = gram_schmidt(&cols);
        assert!(dot(&gs.star[0], &gs.star[1]).abs() < 1e-12);
        assert!((gs.norm_sq[0] - 2.0).abs() < 1e-12);
        assert!((gs.norm_sq[1] - 0.5).abs() < 1e-12);
    }
}
