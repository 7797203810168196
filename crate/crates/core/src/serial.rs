//! External data formats: kappa monomials as sorted exponent pair lists,
//! rationals as "p/q" strings, weighted partitions and pipeline outputs as
//! JSON, relation sets as JSON or CSV.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Signed;
use serde_json::{json, Map, Value};

use crate::kappa::{KappaMonomial, Rat};
use crate::omega::{clear_denominators, MultiDegree, RelationVectorMap};
use crate::points::WeightedPartition;
use crate::solver::{poly_from_vector, RelationSet};

#[derive(Debug, thiserror::Error)]
#[error("malformed serialized data: {0}")]
pub struct ParseError(pub String);

pub fn rat_to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rat_from_str(s: &str) -> Result<Rat, ParseError> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = BigInt::from_str(num).map_err(|e| ParseError(format!("numerator: {}", e)))?;
    let d = BigInt::from_str(den).map_err(|e| ParseError(format!("denominator: {}", e)))?;
    if !d.is_positive() {
        return Err(ParseError("denominator must be positive".into()));
    }
    Ok(Rat::new(n, d))
}

pub fn monomial_to_json(m: &KappaMonomial) -> Value {
    Value::Array(
        m.exponents()
            .iter()
            .map(|&(i, e)| json!([i, e]))
            .collect(),
    )
}

pub fn monomial_from_json(v: &Value) -> Result<KappaMonomial, ParseError> {
    let arr = v
        .as_array()
        .ok_or_else(|| ParseError("monomial must be an array".into()))?;
    let mut pairs = Vec::new();
    for pair in arr {
        let p = pair
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| ParseError("monomial entry must be [index, mult]".into()))?;
        let i = p[0]
            .as_u64()
            .ok_or_else(|| ParseError("bad index".into()))? as u32;
        let e = p[1]
            .as_u64()
            .ok_or_else(|| ParseError("bad multiplicity".into()))? as u32;
        pairs.push((i, e));
    }
    Ok(KappaMonomial::from_pairs(pairs))
}

pub fn partition_to_json(p: &WeightedPartition) -> Value {
    json!({
        "n": p.n(),
        "c": p.kappa1_exponent(),
        "blocks": p
            .blocks()
            .iter()
            .map(|(pts, w)| json!([pts, w]))
            .collect::<Vec<_>>(),
    })
}

pub fn partition_from_json(v: &Value) -> Result<WeightedPartition, ParseError> {
    let n = v["n"]
        .as_u64()
        .ok_or_else(|| ParseError("partition missing n".into()))? as u32;
    let c = v["c"]
        .as_u64()
        .ok_or_else(|| ParseError("partition missing c".into()))? as u32;
    let blocks = v["blocks"]
        .as_array()
        .ok_or_else(|| ParseError("partition missing blocks".into()))?;
    let mut parsed = Vec::new();
    for b in blocks {
        let pair = b
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| ParseError("block must be [points, weight]".into()))?;
        let pts = pair[0]
            .as_array()
            .ok_or_else(|| ParseError("block points must be an array".into()))?
            .iter()
            .map(|x| x.as_u64().map(|v| v as u32))
            .collect::<Option<Vec<u32>>>()
            .ok_or_else(|| ParseError("bad block point".into()))?;
        let w = pair[1]
            .as_u64()
            .ok_or_else(|| ParseError("bad block weight".into()))?;
        parsed.push((pts, w));
    }
    Ok(WeightedPartition::new(n, c, parsed))
}

fn multidegree_key(e: &MultiDegree) -> String {
    let inner: Vec<String> = e.iter().map(|x| x.to_string()).collect();
    format!("[{}]", inner.join(","))
}

fn multidegree_from_key(s: &str) -> Result<MultiDegree, ParseError> {
    let inner = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| ParseError("multidegree key must be bracketed".into()))?;
    inner
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<u32>()
                .map_err(|e| ParseError(format!("bad multidegree entry: {}", e)))
        })
        .collect()
}

/// The pipeline output over the degree's monomial basis.
pub fn rvm_to_json(rvm: &RelationVectorMap, basis: &[KappaMonomial]) -> Value {
    let mut vectors = Map::new();
    for (e, poly) in &rvm.vectors {
        let row = poly.to_vector(basis);
        vectors.insert(
            multidegree_key(e),
            Value::Array(row.iter().map(|c| Value::String(rat_to_string(c))).collect()),
        );
    }
    json!({
        "genus": rvm.genus,
        "n": rvm.n,
        "multiplier": rvm.multiplier.as_ref().map(partition_to_json),
        "degree": rvm.degree,
        "basis": basis.iter().map(monomial_to_json).collect::<Vec<_>>(),
        "vectors": Value::Object(vectors),
    })
}

pub fn rvm_from_json(v: &Value) -> Result<RelationVectorMap, ParseError> {
    let genus = v["genus"]
        .as_u64()
        .ok_or_else(|| ParseError("missing genus".into()))? as u32;
    let n = v["n"].as_u64().ok_or_else(|| ParseError("missing n".into()))? as u32;
    let degree = v["degree"]
        .as_u64()
        .ok_or_else(|| ParseError("missing degree".into()))? as u32;
    let multiplier = match &v["multiplier"] {
        Value::Null => None,
        other => Some(partition_from_json(other)?),
    };
    let basis = v["basis"]
        .as_array()
        .ok_or_else(|| ParseError("missing basis".into()))?
        .iter()
        .map(monomial_from_json)
        .collect::<Result<Vec<_>, _>>()?;
    let raw_vectors = v["vectors"]
        .as_object()
        .ok_or_else(|| ParseError("missing vectors".into()))?;
    let mut vectors = BTreeMap::new();
    for (key, row) in raw_vectors {
        let e = multidegree_from_key(key)?;
        let arr = row
            .as_array()
            .ok_or_else(|| ParseError("vector must be an array".into()))?;
        if arr.len() != basis.len() {
            return Err(ParseError("vector length does not match basis".into()));
        }
        let coeffs = arr
            .iter()
            .map(|c| {
                c.as_str()
                    .ok_or_else(|| ParseError("coefficient must be a string".into()))
                    .and_then(rat_from_str)
            })
            .collect::<Result<Vec<_>, _>>()?;
        vectors.insert(e, poly_from_vector(&basis, &coeffs));
    }
    Ok(RelationVectorMap {
        genus,
        n,
        multiplier,
        degree,
        vectors,
    })
}

/// Relation-set JSON: the vector-map schema plus rank and pivot columns.
pub fn relation_set_to_json(rvm: &RelationVectorMap, rs: &RelationSet) -> Value {
    let mut v = rvm_to_json(rvm, rs.basis());
    let red = rs.reduced().expect("relation set must be reduced");
    let obj = v.as_object_mut().unwrap();
    obj.insert("rank".into(), json!(red.pivots.len()));
    obj.insert("pivots".into(), json!(red.pivots));
    v
}

/// CSV: one reduced relation per row as `degree,c1,c2,...` with integer-
/// cleared coefficients in basis order.
pub fn relation_set_to_csv(rs: &RelationSet) -> String {
    let mut out = String::new();
    out.push_str("degree");
    for m in rs.basis() {
        out.push(',');
        out.push_str(&m.to_string());
    }
    out.push('\n');
    if let Some(red) = rs.reduced() {
        for row in &red.rows {
            let cleared = clear_denominators(&poly_from_vector(rs.basis(), row));
            let v = cleared.to_vector(rs.basis());
            out.push_str(&rs.degree().to_string());
            for c in v {
                out.push(',');
                out.push_str(&c.numer().to_string());
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kappa::{rat_int, GenusContext};
    use crate::omega::expand_pushforward;
    use proptest::prelude::*;

    #[test]
    fn monomial_json_shape() {
        let m = KappaMonomial::from_pairs([(1, 2), (3, 1)]);
        assert_eq!(monomial_to_json(&m).to_string(), "[[1,2],[3,1]]");
        assert_eq!(monomial_from_json(&monomial_to_json(&m)).unwrap(), m);
    }

    #[test]
    fn partition_json_shape() {
        let p = WeightedPartition::new(3, 1, [(vec![1, 2], 3), (vec![3], 1)]);
        assert_eq!(
            partition_to_json(&p).to_string(),
            r#"{"blocks":[[[1,2],3],[[3],1]],"c":1,"n":3}"#
        );
        assert_eq!(partition_from_json(&partition_to_json(&p)).unwrap(), p);
    }

    #[test]
    fn rat_strings() {
        assert_eq!(rat_to_string(&rat_int(-3)), "-3/1");
        assert_eq!(rat_from_str("-3/1").unwrap(), rat_int(-3));
        assert_eq!(rat_from_str("7").unwrap(), rat_int(7));
        assert!(rat_from_str("1/0").is_err());
    }

    #[test]
    fn rvm_json_roundtrip() {
        let ctx = GenusContext::new(3);
        let rvm = expand_pushforward(&ctx, 2, None, true);
        let basis = crate::kappa::basis_of_degree(rvm.degree);
        let v = rvm_to_json(&rvm, &basis);
        let back = rvm_from_json(&v).unwrap();
        assert_eq!(back, rvm);
    }

    proptest! {
        #[test]
        fn rat_string_roundtrip(n in -1000i64..1000, d in 1i64..500) {
            let r = rat_int(n) / rat_int(d);
            prop_assert_eq!(rat_from_str(&rat_to_string(&r)).unwrap(), r);
        }
    }
}
