//! Brute-force reference computations and the golden tables the optimized
//! pipeline is validated against.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::kappa::{convention_flip, GenusContext, KappaMonomial, KappaPolynomial, Rat};
use crate::omega::{build_omega, APoly, MultiDegree, RelationVectorMap};
use crate::points::PointMonomial;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for the brute-force oracle (g <= 4, n <= 2)")]
    InstanceTooLarge,
    #[error("no golden data for genus {0}")]
    NoGoldenData(u32),
    #[error("malformed golden table line {line}: {reason}")]
    BadGoldenLine { line: usize, reason: String },
}

/// Fibre integration computed straight from the raw exponents: grow
/// components greedily over the used points and apply the per-component
/// kappa index, with no weighted-partition normal form in the path.
pub fn brute_pushforward(m: &PointMonomial, ctx: &GenusContext) -> KappaPolynomial {
    let n = m.n() as usize;
    let a = m.euler_exponents();
    let b = m.diagonal_exponents();

    let mut used = vec![false; n];
    for (i, &ai) in a.iter().enumerate() {
        if ai > 0 {
            used[i] = true;
        }
    }
    for (&(i, j), _) in b {
        used[i as usize - 1] = true;
        used[j as usize - 1] = true;
    }
    if used.iter().any(|&u| !u) {
        return KappaPolynomial::zero();
    }

    // component labels by repeated sweeping; independent of the union-find
    // used by the normal-form path
    let mut comp: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for (&(i, j), _) in b {
            let (ci, cj) = (comp[i as usize - 1], comp[j as usize - 1]);
            if ci != cj {
                let small = ci.min(cj);
                comp[i as usize - 1] = small;
                comp[j as usize - 1] = small;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut weight: BTreeMap<usize, i64> = BTreeMap::new();
    let mut size: BTreeMap<usize, i64> = BTreeMap::new();
    for i in 0..n {
        *weight.entry(comp[i]).or_insert(0) += a[i] as i64;
        *size.entry(comp[i]).or_insert(0) += 1;
    }
    for (&(i, _), &e) in b {
        *weight.entry(comp[i as usize - 1]).or_insert(0) += e as i64;
    }

    let mut coeff = Rat::one();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for (label, w) in &weight {
        let idx = w - size[label];
        if idx < 0 {
            return KappaPolynomial::zero();
        } else if idx == 0 {
            coeff *= ctx.chi_rat();
        } else {
            pairs.push((idx as u32, 1));
        }
    }
    pairs.push((1, m.kappa1_exponent()));
    KappaPolynomial::monomial(KappaMonomial::from_pairs(pairs), coeff)
}

/// Expands Omega_A^{g+1} over raw point monomials with no quotient collapse
/// and integrates with `brute_pushforward`. Cost-guarded oracle.
pub fn brute_expand(ctx: &GenusContext, n: u32) -> Result<RelationVectorMap, OracleError> {
    if ctx.genus() > 4 || n > 2 {
        return Err(OracleError::InstanceTooLarge);
    }
    let omega = build_omega(ctx, n);

    // generators as raw monomials, in the same order as the omega form
    let mut raw_gens: Vec<(PointMonomial, APoly)> = Vec::new();
    for (part, quad) in omega.generators() {
        let mut a = vec![0u32; n as usize];
        let mut b: Vec<((u32, u32), u32)> = Vec::new();
        for (pts, w) in part.blocks() {
            match pts.as_slice() {
                [p] => a[*p as usize - 1] = *w as u32,
                [p, q] => b.push(((*p, *q), *w as u32)),
                _ => unreachable!("degree-1 generators have at most two points"),
            }
        }
        raw_gens.push((
            PointMonomial::new(n, a, b, part.kappa1_exponent()),
            quad.clone(),
        ));
    }

    let mut state: BTreeMap<PointMonomial, APoly> = BTreeMap::new();
    let mut unit_poly = APoly::new();
    unit_poly.insert(vec![0; n as usize], Rat::one());
    state.insert(PointMonomial::unit(n), unit_poly);

    for _ in 0..=ctx.genus() {
        let mut next: BTreeMap<PointMonomial, APoly> = BTreeMap::new();
        for (mono, apoly) in &state {
            for (gmono, gquad) in &raw_gens {
                let nm = mono.mul(gmono);
                let slot = next.entry(nm).or_default();
                for (e, c) in apoly {
                    for (ge, gc) in gquad {
                        let exp: MultiDegree = e.iter().zip(ge).map(|(x, y)| x + y).collect();
                        let v = c * gc;
                        if v.is_zero() {
                            continue;
                        }
                        let cur = slot.entry(exp).or_insert_with(Rat::zero);
                        *cur += v;
                    }
                }
            }
        }
        for apoly in next.values_mut() {
            apoly.retain(|_, c| !c.is_zero());
        }
        state = next;
    }

    let mut vectors: BTreeMap<MultiDegree, KappaPolynomial> = BTreeMap::new();
    for (mono, apoly) in &state {
        let kp = convention_flip(&brute_pushforward(mono, ctx));
        if kp.is_zero() {
            continue;
        }
        for (e, c) in apoly {
            let slot = vectors.entry(e.clone()).or_insert_with(KappaPolynomial::zero);
            slot.add_assign(&kp.scale(c));
        }
    }
    vectors.retain(|_, v| !v.is_zero());

    Ok(RelationVectorMap {
        genus: ctx.genus(),
        n,
        multiplier: None,
        degree: ctx.genus() + 1 - n,
        vectors,
    })
}

/// One transcribed relation: `lhs_coeff * lhs = rhs_coeff * rhs`, or
/// `lhs_coeff * lhs = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenEntry {
    pub degree: u32,
    pub lhs_coeff: BigInt,
    pub lhs: KappaMonomial,
    pub rhs: Option<(BigInt, KappaMonomial)>,
}

impl GoldenEntry {
    /// The relation as a polynomial: lhs_coeff * lhs - rhs_coeff * rhs.
    pub fn relation(&self) -> KappaPolynomial {
        let mut p = KappaPolynomial::monomial(
            self.lhs.clone(),
            BigRational::from_integer(self.lhs_coeff.clone()),
        );
        if let Some((c, m)) = &self.rhs {
            p.add_term(m.clone(), -BigRational::from_integer(c.clone()));
        }
        p
    }

    pub fn format_line(&self, genus: u32) -> String {
        let lhs = format_side(&self.lhs_coeff, &self.lhs);
        let rhs = match &self.rhs {
            None => "0".to_string(),
            Some((c, m)) => format_side(c, m),
        };
        format!("g={} deg={}: {} = {}", genus, self.degree, lhs, rhs)
    }
}

fn format_side(coeff: &BigInt, m: &KappaMonomial) -> String {
    if m.is_unit() {
        coeff.to_string()
    } else if coeff.is_one() {
        m.to_string()
    } else {
        format!("{}*{}", coeff, m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenTable {
    pub genus: u32,
    pub entries: Vec<GoldenEntry>,
}

const GOLDEN_DATA: &str = include_str!("../data/golden_tables.txt");

/// The transcribed relation table for a genus the source records.
pub fn golden_tables(g: u32) -> Result<GoldenTable, OracleError> {
    let all = parse_golden_file(GOLDEN_DATA).expect("bundled golden data must parse");
    let entries: Vec<GoldenEntry> = all
        .into_iter()
        .filter(|(genus, _)| *genus == g)
        .map(|(_, e)| e)
        .collect();
    if entries.is_empty() {
        return Err(OracleError::NoGoldenData(g));
    }
    Ok(GoldenTable { genus: g, entries })
}

/// Parses the line-oriented golden format; `#` starts a comment.
pub fn parse_golden_file(text: &str) -> Result<Vec<(u32, GoldenEntry)>, OracleError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: &str| OracleError::BadGoldenLine {
            line: lineno + 1,
            reason: reason.to_string(),
        };
        let (head, body) = line.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let mut genus = None;
        let mut degree = None;
        for field in head.split_whitespace() {
            if let Some(v) = field.strip_prefix("g=") {
                genus = v.parse::<u32>().ok();
            } else if let Some(v) = field.strip_prefix("deg=") {
                degree = v.parse::<u32>().ok();
            }
        }
        let genus = genus.ok_or_else(|| bad("missing g="))?;
        let degree = degree.ok_or_else(|| bad("missing deg="))?;
        let (lhs_text, rhs_text) = body.split_once('=').ok_or_else(|| bad("missing '='"))?;
        let (lhs_coeff, lhs) =
            parse_side(lhs_text.trim()).ok_or_else(|| bad("bad left-hand side"))?;
        let rhs_text = rhs_text.trim();
        let rhs = if rhs_text == "0" {
            None
        } else {
            Some(parse_side(rhs_text).ok_or_else(|| bad("bad right-hand side"))?)
        };
        let entry = GoldenEntry {
            degree,
            lhs_coeff,
            lhs,
            rhs,
        };
        if entry.relation().homogeneous_degree() != Some(degree) {
            return Err(bad("entry is not homogeneous of its stated degree"));
        }
        out.push((genus, entry));
    }
    Ok(out)
}

fn parse_side(text: &str) -> Option<(BigInt, KappaMonomial)> {
    let mut coeff = BigInt::one();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for factor in text.split('*') {
        let factor = factor.trim();
        if let Some(rest) = factor.strip_prefix('k') {
            let (idx, mult) = match rest.split_once('^') {
                Some((i, e)) => (i.parse::<u32>().ok()?, e.parse::<u32>().ok()?),
                None => (rest.parse::<u32>().ok()?, 1),
            };
            if idx == 0 || mult == 0 {
                return None;
            }
            pairs.push((idx, mult));
        } else {
            coeff *= factor.parse::<BigInt>().ok()?;
        }
    }
    Some((coeff, KappaMonomial::from_pairs(pairs)))
}

pub fn format_golden_file(genus: u32, entries: &[GoldenEntry]) -> String {
    let mut s = String::new();
    for e in entries {
        s.push_str(&e.format_line(genus));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kappa::rat_int;
    use crate::omega::expand_pushforward;
    use crate::points::{normal_form, pushforward};

    #[test]
    fn brute_pushforward_examples() {
        let c5 = GenusContext::new(5);
        let p = brute_pushforward(&PointMonomial::new(1, vec![3], [], 0), &c5);
        assert_eq!(
            p,
            KappaPolynomial::monomial(KappaMonomial::single(2, 1), rat_int(1))
        );

        // e_1^2 nu_12: one component, w = 3, v = 2
        let p = brute_pushforward(&PointMonomial::new(2, vec![2, 0], [((1, 2), 1)], 0), &c5);
        assert_eq!(
            p,
            KappaPolynomial::monomial(KappaMonomial::single(1, 1), rat_int(1))
        );

        // point 3 unused
        let p = brute_pushforward(&PointMonomial::new(3, vec![1, 1, 0], [], 0), &c5);
        assert!(p.is_zero());
    }

    #[test]
    fn brute_agrees_with_normal_form_path() {
        let ctx = GenusContext::new(4);
        let m = PointMonomial::new(4, vec![1, 0, 2, 0], [((1, 2), 1), ((3, 4), 2)], 1);
        assert_eq!(
            brute_pushforward(&m, &ctx),
            pushforward(&normal_form(&m), &ctx)
        );
    }

    #[test]
    fn brute_expand_equals_pipeline_g2_n2() {
        let ctx = GenusContext::new(2);
        let brute = brute_expand(&ctx, 2).unwrap();
        let fast = expand_pushforward(&ctx, 2, None, false);
        assert_eq!(brute, fast);
    }

    #[test]
    fn brute_expand_guard() {
        let ctx = GenusContext::new(5);
        assert_eq!(brute_expand(&ctx, 2), Err(OracleError::InstanceTooLarge));
        let ctx = GenusContext::new(3);
        assert_eq!(brute_expand(&ctx, 3), Err(OracleError::InstanceTooLarge));
    }

    #[test]
    fn golden_tables_present_and_absent() {
        let t3 = golden_tables(3).unwrap();
        assert_eq!(t3.entries.len(), 2);
        let t9 = golden_tables(9).unwrap();
        assert_eq!(t9.entries.len(), 25);
        assert_eq!(golden_tables(7), Err(OracleError::NoGoldenData(7)));
    }

    #[test]
    fn golden_roundtrip_is_bit_exact() {
        for g in [3u32, 4, 5, 6, 9] {
            let table = golden_tables(g).unwrap();
            let text = format_golden_file(g, &table.entries);
            let reparsed = parse_golden_file(&text).unwrap();
            assert_eq!(
                reparsed,
                table
                    .entries
                    .iter()
                    .map(|e| (g, e.clone()))
                    .collect::<Vec<_>>()
            );
            let retext = format_golden_file(
                g,
                &reparsed.into_iter().map(|(_, e)| e).collect::<Vec<_>>(),
            );
            assert_eq!(text, retext);
        }
    }
}
