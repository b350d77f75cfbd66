//! JSON wire formats: norm descriptors, coverings, CVP instances, solve
//! reports and sparsifier certificates. Formats are stable and diff-able
//! (alphabetical keys, shortest-roundtrip floats, exact integers/rationals
//! as strings).

use crate::boost::{CvpInstance, SolveReport};
use crate::covering::{Covering, CoveringBody};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, TargetPoint};
use crate::norms::{NormBody, NormKind, PrismSlice, SmoothnessProfile};
use crate::sparsify::Sparsifier;
use crate::{Int, Rat, Real};
use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};
use std::str::FromStr;
use std::sync::Arc;

fn num(v: &Value, key: &str) -> Result<Real> {
    v.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Parse(format!("missing numeric field '{key}'")))
}

fn arr<'v>(v: &'v Value, key: &str) -> Result<&'v Vec<Value>> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse(format!("missing array field '{key}'")))
}

fn mat(v: &Value, key: &str) -> Result<Vec<Vec<Real>>> {
    arr(v, key)?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse(format!("'{key}' rows must be arrays")))?
                .iter()
                .map(|x| {
                    x.as_f64()
                        .ok_or_else(|| Error::Parse(format!("'{key}' entries must be numbers")))
                })
                .collect()
        })
        .collect()
}

fn vecf(v: &Value, key: &str) -> Result<Vec<Real>> {
    arr(v, key)?
        .iter()
        .map(|x| {
            x.as_f64()
                .ok_or_else(|| Error::Parse(format!("'{key}' entries must be numbers")))
        })
        .collect()
}

pub fn norm_to_json(b: &NormBody) -> Result<Value> {
    let mut m = Map::new();
    match &b.kind {
        NormKind::Lp { p, dim } => {
            m.insert("type".into(), json!("lp"));
            m.insert("p".into(), json!(p));
            m.insert("dim".into(), json!(dim));
        }
        NormKind::Polytope { rows, rhs } => {
            m.insert("type".into(), json!("polytope"));
            m.insert("A".into(), json!(rows));
            m.insert("b".into(), json!(rhs));
        }
        NormKind::Zonotope { gens } => {
            m.insert("type".into(), json!("zonotope"));
            m.insert("gens".into(), json!(gens));
        }
        NormKind::PrismSlice(s) => {
            m.insert("type".into(), json!("prism_slice"));
            m.insert("axis".into(), json!(s.axis));
            m.insert("normal".into(), json!(s.normal));
            m.insert("half_width".into(), json!(s.half_width));
            m.insert("cap_radius".into(), json!(s.cap_radius));
            m.insert("base".into(), norm_to_json(&s.base)?);
        }
        NormKind::Vpoly { verts } => {
            m.insert("type".into(), json!("vpoly"));
            m.insert("verts".into(), json!(verts));
        }
        NormKind::Oracle(_) => {
            return Err(Error::Domain("oracle bodies do not serialize".into()))
        }
    }
    if b.scale != 1.0 {
        m.insert("scale".into(), json!(b.scale));
    }
    if let Some(SmoothnessProfile { c, q }) = b.smoothness {
        m.insert("smoothness".into(), json!({"C": c, "q": q}));
    }
    Ok(Value::Object(m))
}

pub fn norm_from_json(v: &Value) -> Result<NormBody> {
    let ty = v
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("norm descriptor needs a 'type'".into()))?;
    let mut body = match ty {
        "lp" => {
            let p = num(v, "p")?;
            let dim = v
                .get("dim")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Parse("lp norm needs 'dim'".into()))?;
            NormBody::lp(dim as usize, p)?
        }
        "polytope" => NormBody::polytope(mat(v, "A")?, vecf(v, "b")?)?,
        "zonotope" => NormBody::zonotope(mat(v, "gens")?)?,
        "vpoly" => NormBody::vpoly(mat(v, "verts")?)?,
        "prism_slice" => {
            let base = norm_from_json(
                v.get("base")
                    .ok_or_else(|| Error::Parse("prism_slice needs 'base'".into()))?,
            )?;
            NormBody::prism_slice(PrismSlice {
                axis: vecf(v, "axis")?,
                normal: vecf(v, "normal")?,
                half_width: num(v, "half_width")?,
                cap_radius: num(v, "cap_radius")?,
                base: Arc::new(base),
            })?
        }
        other => return Err(Error::Parse(format!("unknown norm type '{other}'"))),
    };
    if let Some(s) = v.get("scale").and_then(Value::as_f64) {
        body = body.scaled(s);
    }
    if let Some(sm) = v.get("smoothness") {
        body = body.with_smoothness(SmoothnessProfile::new(num(sm, "C")?, num(sm, "q")?)?);
    }
    Ok(body)
}

fn int_to_string(i: &Int) -> String {
    i.to_string()
}

fn rat_to_string(r: &Rat) -> String {
    if r.denom() == &Int::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn rat_from_string(s: &str) -> Result<Rat> {
    let parse_int =
        |t: &str| Int::from_str(t.trim()).map_err(|e| Error::Parse(format!("bad integer '{t}': {e}")));
    match s.split_once('/') {
        Some((a, b)) => {
            let d = parse_int(b)?;
            if d.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(Rat::new(parse_int(a)?, d))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

pub fn instance_to_json(inst: &CvpInstance, seed: Option<u64>) -> Result<Value> {
    let basis: Vec<Vec<String>> = inst
        .lattice
        .basis()
        .iter()
        .map(|col| col.iter().map(int_to_string).collect())
        .collect();
    let target: Vec<String> = inst.target.coords.iter().map(rat_to_string).collect();
    let mut m = Map::new();
    m.insert("basis_columns".into(), json!(basis));
    m.insert("epsilon".into(), json!(inst.epsilon));
    m.insert("n".into(), json!(inst.lattice.dim()));
    m.insert("norm".into(), norm_to_json(&inst.norm)?);
    if let Some(s) = seed {
        m.insert("seed".into(), json!(s));
    }
    m.insert("target".into(), json!(target));
    Ok(Value::Object(m))
}

pub fn instance_from_json(v: &Value) -> Result<CvpInstance> {
    let basis: Vec<Vec<Int>> = arr(v, "basis_columns")?
        .iter()
        .map(|col| {
            col.as_array()
                .ok_or_else(|| Error::Parse("basis columns must be arrays".into()))?
                .iter()
                .map(|x| {
                    let s = x
                        .as_str()
                        .ok_or_else(|| Error::Parse("basis entries are strings".into()))?;
                    Int::from_str(s).map_err(|e| Error::Parse(format!("bad basis entry: {e}")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let target: Vec<Rat> = arr(v, "target")?
        .iter()
        .map(|x| {
            rat_from_string(
                x.as_str()
                    .ok_or_else(|| Error::Parse("target entries are strings".into()))?,
            )
        })
        .collect::<Result<_>>()?;
    Ok(CvpInstance {
        lattice: Lattice::new(basis)?,
        target: TargetPoint::new(target),
        norm: norm_from_json(
            v.get("norm")
                .ok_or_else(|| Error::Parse("instance needs 'norm'".into()))?,
        )?,
        epsilon: num(v, "epsilon")?,
    })
}

pub fn covering_to_json(cov: &Covering, max_pieces: usize) -> Result<Value> {
    let pieces = cov.explicit_pieces().ok_or_else(|| {
        Error::BudgetExceeded("covering is stored virtually; materialize within budget first".into())
    })?;
    if pieces.len() > max_pieces {
        return Err(Error::BudgetExceeded(format!(
            "covering has {} pieces, cap {max_pieces}",
            pieces.len()
        )));
    }
    let ps: Vec<Value> = pieces
        .iter()
        .map(|p| -> Result<Value> {
            Ok(json!({"body": norm_to_json(&p.body)?, "center": p.center}))
        })
        .collect::<Result<_>>()?;
    Ok(json!({
        "epsilon": cov.epsilon,
        "parent": norm_to_json(&cov.parent)?,
        "pieces": ps,
        "requested_epsilon": cov.requested_epsilon,
    }))
}

pub fn covering_from_json(v: &Value) -> Result<Covering> {
    let parent = norm_from_json(
        v.get("parent")
            .ok_or_else(|| Error::Parse("covering needs 'parent'".into()))?,
    )?;
    let eps = num(v, "epsilon")?;
    let req = num(v, "requested_epsilon").unwrap_or(eps);
    let pieces: Vec<CoveringBody> = arr(v, "pieces")?
        .iter()
        .map(|p| -> Result<CoveringBody> {
            Ok(CoveringBody {
                body: norm_from_json(
                    p.get("body")
                        .ok_or_else(|| Error::Parse("piece needs 'body'".into()))?,
                )?,
                center: vecf(p, "center")?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Covering::explicit(parent, eps, req, pieces))
}

pub fn report_to_json(r: &SolveReport) -> Value {
    json!({
        "coeffs": r.coeffs,
        "distance": r.distance,
        "inner_calls": r.inner_calls,
        "iterations": r.iterations,
        "opt_distance": r.opt_distance,
        "ratio": r.ratio,
        "seed": r.seed,
        "status": format!("{:?}", r.status),
        "vector": r.vector,
        "wall_ms": r.wall_ms,
    })
}

pub fn sparsifier_to_json(s: &Sparsifier) -> Value {
    let basis: Vec<Vec<String>> = s
        .sublattice
        .basis()
        .iter()
        .map(|col| col.iter().map(int_to_string).collect())
        .collect();
    json!({
        "certified": s.certified,
        "congruence": s.congruence.as_ref().map(|(a, p)| json!({
            "a": a.iter().map(int_to_string).collect::<Vec<_>>(),
            "p": p,
        })),
        "coset_excess": s.report.coset_excess,
        "delta": s.delta,
        "g_cap": s.report.g_cap,
        "g_upper": s.report.g_upper,
        "grid_margin": s.report.grid_margin,
        "grid_points": s.report.grid_points,
        "grid_resolution": s.report.grid_resolution,
        "index": (s.sublattice.det() / s.parent.det()).abs().to_string(),
        "sublattice_basis": basis,
    })
}

/// RFC-4180 field quoting.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn norm_roundtrip() {
        let bodies = vec![
            NormBody::lp(3, 1.5).unwrap(),
            NormBody::cube(2),
            NormBody::zonotope(vec![vec![1.0, 0.0], vec![0.5, 1.0]]).unwrap(),
        ];
        for b in bodies {
            let j = norm_to_json(&b).unwrap();
            let b2 = norm_from_json(&j).unwrap();
            let mut rng = SplitMix64::new(3);
            for _ in 0..50 {
                let x: Vec<Real> = (0..b.dim()).map(|_| rng.uniform(-2.0, 2.0)).collect();
                assert!((b.gauge(&x).unwrap() - b2.gauge(&x).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lp_descriptor_shape() {
        let b = NormBody::lp(2, 3.0).unwrap();
        let j = norm_to_json(&b).unwrap();
        assert_eq!(j["type"], "lp");
        assert_eq!(j["p"], 3.0);
    }

    #[test]
    fn rational_strings() {
        assert_eq!(rat_to_string(&Rat::new(Int::from(3), Int::from(4))), "3/4");
        assert_eq!(rat_to_string(&Rat::from_integer(Int::from(-7))), "-7");
        let r = rat_from_string("-22/7").unwrap();
        assert_eq!(r, Rat::new(Int::from(-22), Int::from(7)));
        assert!(rat_from_string("1/0").is_err());
    }

    #[test]
    fn instance_roundtrip() {
        let inst = CvpInstance {
            lattice: Lattice::from_i64(&[vec![2, 1], vec![0, 3]]).unwrap(),
            target: TargetPoint::new(vec![
                Rat::new(Int::from(1), Int::from(3)),
                Rat::new(Int::from(-5), Int::from(7)),
            ]),
            norm: NormBody::lp(2, 2.0).unwrap(),
            epsilon: 0.25,
        };
        let j = instance_to_json(&inst, Some(42)).unwrap();
        let inst2 = instance_from_json(&j).unwrap();
        assert_eq!(inst.lattice.basis(), inst2.lattice.basis());
        assert_eq!(inst.target, inst2.target);
        assert_eq!(inst.epsilon, inst2.epsilon);
        // byte determinism of the serialized form
        assert_eq!(
            serde_json::to_string(&j).unwrap(),
            serde_json::to_string(&instance_to_json(&inst, Some(42)).unwrap()).unwrap()
        );
    }

    #[test]
    fn covering_roundtrip_explicit() {
        let k = NormBody::lp(2, 2.0).unwrap();
        let cov = crate::covering::cover_grid(&k, 0.5).unwrap();
        let j = covering_to_json(&cov, 10_000).unwrap();
        let cov2 = covering_from_json(&j).unwrap();
        assert_eq!(cov.len(), cov2.len());
        assert_eq!(cov.epsilon, cov2.epsilon);
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
