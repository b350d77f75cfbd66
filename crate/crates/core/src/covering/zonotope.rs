//! Explicit covering of a zonotope by smaller zonotopes: each generator
//! segment [-b, b] splits into 2k geometrically-shrinking sub-intervals
//! (deduplicated to 2k-1), and pieces are the per-generator products.

use super::{Covering, CoveringBody, Located, PieceGen};
use crate::error::{Error, Result};
use crate::linalg::axpy;
use crate::norms::{zonotope_witness, NormBody};
use crate::rng::SplitMix64;
use crate::{eta, Real};

const EXPLICIT_BUDGET: u128 = 2_000;

pub fn cover_zonotope(gens: &[Vec<Real>], eps: Real) -> Result<Covering> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("covering eps must lie in (0,1), got {eps}")));
    }
    let parent = NormBody::zonotope(gens.to_vec())?;
    // round eps down to the admissible grid (2^k - 1)^{-1}
    let k = (1.0 + 1.0 / eps).log2().ceil() as u32;
    let eps_eff = 1.0 / ((1u64 << k) as Real - 1.0);
    let m = gens.len();

    // per-generator interval options (center coef, half coef); the innermost
    // interval j = k coincides for both signs and is kept once
    let mut options: Vec<(Real, Real)> = Vec::new();
    for j in 1..=k {
        let c = 1.0 - ((1u64 << j) as Real - 1.0) * eps_eff;
        let h = (1u64 << (j - 1)) as Real * eps_eff;
        options.push((c, h));
    }
    for j in 1..k {
        let c = -(1.0 - ((1u64 << j) as Real - 1.0) * eps_eff);
        let h = (1u64 << (j - 1)) as Real * eps_eff;
        options.push((c, h));
    }

    let raw = (2 * k as u128).pow(m as u32);
    let gen = ZonoGen {
        gens: gens.to_vec(),
        options,
        eps: eps_eff,
    };
    let count = gen.count();
    let piece_gen = if count <= EXPLICIT_BUDGET {
        let mut pieces = Vec::with_capacity(count as usize);
        let mut choice = vec![0usize; m];
        loop {
            pieces.push(gen.piece(&choice)?);
            let mut i = 0;
            loop {
                if i == m {
                    break;
                }
                choice[i] += 1;
                if choice[i] < gen.options.len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == m {
                break;
            }
        }
        PieceGen::Explicit(super::ExplicitPieces::new(pieces))
    } else {
        PieceGen::ZonoProduct(gen)
    };
    Ok(Covering {
        parent,
        epsilon: eps_eff,
        requested_epsilon: eps,
        raw_count: Some(raw),
        global_scale: 1.0,
        gen: piece_gen,
    })
}

#[derive(Debug, Clone)]
pub struct ZonoGen {
    gens: Vec<Vec<Real>>,
    /// (center coefficient, half coefficient) per sub-interval, same list for
    /// every generator; length 2k - 1 after dedup.
    options: Vec<(Real, Real)>,
    eps: Real,
}

impl ZonoGen {
    pub fn count(&self) -> u128 {
        (self.options.len() as u128).pow(self.gens.len() as u32)
    }

    fn piece(&self, choice: &[usize]) -> Result<CoveringBody> {
        let n = self.gens[0].len();
        let mut center = vec![0.0; n];
        let mut sub_gens = Vec::with_capacity(self.gens.len());
        for (g, &ci) in self.gens.iter().zip(choice) {
            let (c, h) = self.options[ci];
            axpy(&mut center, c, g);
            sub_gens.push(crate::linalg::scale(g, h));
        }
        Ok(CoveringBody {
            body: NormBody::zonotope(sub_gens)?,
            center,
        })
    }

    pub fn sample_piece(&self, rng: &mut SplitMix64) -> Result<CoveringBody> {
        let choice: Vec<usize> = (0..self.gens.len())
            .map(|_| rng.below(self.options.len() as u64) as usize)
            .collect();
        self.piece(&choice)
    }

    /// Exact union membership: a coefficient witness from the gauge LP picks
    /// a sub-interval per generator. The scaled sub-intervals tile
    /// [-(1 + (f-1) eps), 1 + (f-1) eps] per coordinate, so a witness exists
    /// exactly when max |lambda_i| fits that range.
    pub fn locate(&self, x: &[Real], factor: Real) -> Result<Option<Located>> {
        let (gmax, lam) = match zonotope_witness(&self.gens, x) {
            Ok(v) => v,
            Err(Error::UnboundedGauge) => return Ok(None),
            Err(e) => return Err(e),
        };
        let reach = 1.0 + (factor - 1.0) * self.eps;
        if gmax > reach + eta() {
            return Ok(None);
        }
        let mut choice = Vec::with_capacity(lam.len());
        let mut worst: Real = 0.0;
        for &li in &lam {
            let mut found = None;
            for (idx, &(c, h)) in self.options.iter().enumerate() {
                let excess = (li - c).abs() / h;
                if excess <= factor + eta() {
                    found = Some((idx, excess));
                    break;
                }
            }
            match found {
                Some((idx, excess)) => {
                    choice.push(idx);
                    worst = worst.max(excess);
                }
                None => return Ok(None),
            }
        }
        let piece = self.piece(&choice)?;
        Ok(Some(Located {
            piece,
            gauge: worst,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{validate_cover, ValidateMode};

    #[test]
    fn interval_cover_k2_dedups_to_three() {
        // m = 1, b = (1), eps = 1/3 (k = 2): [1/3, 1], [-1, -1/3] and the
        // middle interval [-2/3, 2/3] kept once
        let cov = cover_zonotope(&[vec![1.0]], 1.0 / 3.0).unwrap();
        assert_eq!(cov.raw_count, Some(4));
        assert_eq!(cov.len(), Some(3));
        let pieces = cov.explicit_pieces().unwrap();
        // union of [c - h, c + h] must be [-1, 1]
        let mut ivs: Vec<(Real, Real)> = pieces
            .iter()
            .map(|p| {
                let (_, big_r) = p.body.sandwich().unwrap();
                (p.center[0] - big_r, p.center[0] + big_r)
            })
            .collect();
        ivs.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!((ivs[0].0 + 1.0).abs() < 1e-9);
        let mut reach = ivs[0].1;
        for iv in &ivs[1..] {
            assert!(iv.0 <= reach + 1e-9, "gap in union");
            reach = reach.max(iv.1);
        }
        assert!((reach - 1.0).abs() < 1e-9);
    }

    #[test]
    fn raw_count_formula() {
        // m = 2, eps = 1/7 (k = 3): raw count (2k)^m = 36
        let gens = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let cov = cover_zonotope(&gens, 1.0 / 7.0).unwrap();
        assert_eq!(cov.raw_count, Some(36));
        assert_eq!(cov.len(), Some(25)); // (2k-1)^m after dedup
    }

    #[test]
    fn unit_square_cover_validates() {
        let gens = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let cov = cover_zonotope(&gens, 1.0 / 3.0).unwrap();
        let rep = validate_cover(&cov, ValidateMode::Sampled(10_000)).unwrap();
        assert!(rep.ok(), "{rep:?}");
    }

    #[test]
    fn skew_zonotope_cover_validates() {
        let gens = vec![vec![1.0, 0.2], vec![-0.3, 1.0], vec![0.5, 0.5]];
        let cov = cover_zonotope(&gens, 0.3).unwrap();
        let rep = validate_cover(&cov, ValidateMode::Sampled(4000)).unwrap();
        assert!(rep.ok(), "{rep:?}");
    }

    #[test]
    fn virtual_product_locate_agrees_with_explicit_scan() {
        let gens = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let eps = 1.0 / 3.0;
        let cov = cover_zonotope(&gens, eps).unwrap();
        let parent = cov.parent.clone();
        let virt = ZonoGen {
            gens: gens.clone(),
            options: match &cov.gen {
                PieceGen::Explicit(_) => {
                    // rebuild the option list the constructor used
                    let k = 2u32;
                    let eps_eff = 1.0 / ((1u64 << k) as Real - 1.0);
                    let mut options = Vec::new();
                    for j in 1..=k {
                        options.push((
                            1.0 - ((1u64 << j) as Real - 1.0) * eps_eff,
                            (1u64 << (j - 1)) as Real * eps_eff,
                        ));
                    }
                    for j in 1..k {
                        options.push((
                            -(1.0 - ((1u64 << j) as Real - 1.0) * eps_eff),
                            (1u64 << (j - 1)) as Real * eps_eff,
                        ));
                    }
                    options
                }
                _ => unreachable!(),
            },
            eps: cov.epsilon,
        };
        let mut rng = SplitMix64::new(12);
        for _ in 0..300 {
            let x: Vec<Real> = (0..2).map(|_| rng.uniform(-2.5, 2.5)).collect();
            for factor in [1.0, 2.0] {
                let explicit_hit = cov.locate(&x, factor).unwrap().is_some();
                let virtual_hit = virt.locate(&x, factor).unwrap().is_some();
                assert_eq!(
                    explicit_hit, virtual_hit,
                    "x {x:?} factor {factor} gauge {}",
                    parent.gauge(&x).unwrap()
                );
            }
        }
    }
}
