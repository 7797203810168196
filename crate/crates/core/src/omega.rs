//! Construction of the nilpotent class on the n-pointed space, multinomial
//! expansion of its (g+1)-st power with coefficients tracked per A-multidegree,
//! and fibre integration of every coefficient into the kappa ring.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::kappa::{convention_flip, GenusContext, KappaMonomial, KappaPolynomial, Rat};
use crate::points::{nf_multiply, pushforward, PointPolynomial, WeightedPartition};

/// Exponent vector of a monomial in A_1..A_n.
pub type MultiDegree = Vec<u32>;

/// Sparse polynomial in the formal variables A_1..A_n.
pub type APoly = BTreeMap<MultiDegree, Rat>;

fn apoly_mul(x: &APoly, y: &APoly) -> APoly {
    let mut out = APoly::new();
    for (ex, cx) in x {
        for (ey, cy) in y {
            let e: MultiDegree = ex.iter().zip(ey).map(|(a, b)| a + b).collect();
            let c = cx * cy;
            apoly_add_term(&mut out, e, c);
        }
    }
    out
}

fn apoly_add_term(p: &mut APoly, e: MultiDegree, c: Rat) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match p.entry(e) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// The class Omega_A as a sum of degree-1 point classes, each carrying its
/// quadratic polynomial in the A_i.
#[derive(Clone, Debug)]
pub struct OmegaForm {
    n: u32,
    generators: Vec<(WeightedPartition, APoly)>,
}

impl OmegaForm {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn generators(&self) -> &[(WeightedPartition, APoly)] {
        &self.generators
    }
}

/// Builds Omega_A on the n-pointed space:
/// sum_i (chi^2 A_i^2 - 2 d_A chi A_i) e_i + 2 chi^2 sum_{i<j} A_i A_j nu_ij
/// + d_A^2 k_1, with d_A = sum_i A_i kept symbolic.
pub fn build_omega(ctx: &GenusContext, n: u32) -> OmegaForm {
    assert!(n >= 1);
    let chi = ctx.chi_rat();
    let chi2 = &chi * &chi;
    let nn = n as usize;
    let mut generators = Vec::new();

    let e2 = |i: usize| {
        let mut e = vec![0u32; nn];
        e[i] = 2;
        e
    };
    let e11 = |i: usize, j: usize| {
        let mut e = vec![0u32; nn];
        e[i] += 1;
        e[j] += 1;
        e
    };

    // e_i carries chi^2 A_i^2 - 2 chi A_i (A_1 + ... + A_n)
    for i in 0..nn {
        let mut quad = APoly::new();
        apoly_add_term(&mut quad, e2(i), &chi2 - Rat::from_integer(2.into()) * &chi);
        for j in 0..nn {
            if j != i {
                apoly_add_term(&mut quad, e11(i, j), -Rat::from_integer(2.into()) * &chi);
            }
        }
        generators.push((
            WeightedPartition::new(n, 0, [(vec![i as u32 + 1], 1)]),
            quad,
        ));
    }

    // nu_ij carries 2 chi^2 A_i A_j
    for i in 0..nn {
        for j in i + 1..nn {
            let mut quad = APoly::new();
            apoly_add_term(&mut quad, e11(i, j), Rat::from_integer(2.into()) * &chi2);
            generators.push((
                WeightedPartition::new(n, 0, [(vec![i as u32 + 1, j as u32 + 1], 1)]),
                quad,
            ));
        }
    }

    // k_1 carries d_A^2 = (A_1 + ... + A_n)^2
    let mut quad = APoly::new();
    for i in 0..nn {
        apoly_add_term(&mut quad, e2(i), Rat::one());
        for j in i + 1..nn {
            apoly_add_term(&mut quad, e11(i, j), Rat::from_integer(2.into()));
        }
    }
    generators.push((WeightedPartition::new(n, 1, []), quad));

    OmegaForm { n, generators }
}

/// The fibre-integrated coefficients of the expansion, grouped by
/// A-multidegree. Every stored polynomial is a relation in the kappa ring,
/// reported in the cotangent sign convention of the classical tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationVectorMap {
    pub genus: u32,
    pub n: u32,
    pub multiplier: Option<WeightedPartition>,
    pub degree: u32,
    pub vectors: BTreeMap<MultiDegree, KappaPolynomial>,
}

/// Point permutations fixing the multiplier; for no multiplier this is the
/// whole symmetric group.
pub fn multiplier_stabilizer(n: u32, multiplier: Option<&WeightedPartition>) -> Vec<Vec<u32>> {
    let mut perms = Vec::new();
    let mut idx: Vec<u32> = (1..=n).collect();
    permute(&mut idx, 0, &mut perms);
    perms
        .into_iter()
        .filter(|p| match multiplier {
            None => true,
            Some(m) => &m.relabel(p) == m,
        })
        .collect()
}

fn permute(idx: &mut Vec<u32>, k: usize, out: &mut Vec<Vec<u32>>) {
    if k == idx.len() {
        out.push(idx.clone());
        return;
    }
    for i in k..idx.len() {
        idx.swap(k, i);
        permute(idx, k + 1, out);
        idx.swap(k, i);
    }
}

fn orbit_representative(e: &MultiDegree, stab: &[Vec<u32>]) -> MultiDegree {
    stab.iter()
        .map(|p| {
            let mut img = vec![0u32; e.len()];
            for (i, &x) in e.iter().enumerate() {
                img[p[i] as usize - 1] = x;
            }
            img
        })
        .max()
        .unwrap_or_else(|| e.clone())
}

/// The fully expanded power Omega_A^{g+1}, kept as collected weighted
/// partitions with A-polynomial coefficients. Computing this once lets many
/// multipliers be applied cheaply afterwards.
#[derive(Clone, Debug)]
pub struct OmegaPower {
    ctx: GenusContext,
    n: u32,
    state: BTreeMap<WeightedPartition, APoly>,
}

impl OmegaPower {
    pub fn compute(ctx: &GenusContext, n: u32) -> Self {
        let omega = build_omega(ctx, n);
        let mut state: BTreeMap<WeightedPartition, APoly> = BTreeMap::new();
        let mut unit_poly = APoly::new();
        unit_poly.insert(vec![0; n as usize], Rat::one());
        state.insert(WeightedPartition::unit(n), unit_poly);

        for _ in 0..=ctx.genus() {
            state = state
                .into_par_iter()
                .fold(
                    BTreeMap::new,
                    |mut acc: BTreeMap<WeightedPartition, APoly>, (part, apoly)| {
                        for (gpart, gquad) in omega.generators() {
                            let np = nf_multiply(&part, gpart);
                            let prod = apoly_mul(&apoly, gquad);
                            let slot = acc.entry(np).or_default();
                            for (e, c) in prod {
                                apoly_add_term(slot, e, c);
                            }
                        }
                        acc
                    },
                )
                .reduce(BTreeMap::new, merge_states);
        }
        OmegaPower {
            ctx: *ctx,
            n,
            state,
        }
    }

    /// Multiplies by the optional multiplier monomial and fibre-integrates
    /// every collected coefficient.
    ///
    /// With `orbit_reduce` set, only one multidegree per orbit of the
    /// multiplier stabilizer is emitted; the dropped ones are its permutation
    /// images.
    pub fn pushforward(
        &self,
        multiplier: Option<&WeightedPartition>,
        orbit_reduce: bool,
    ) -> RelationVectorMap {
        let ctx = &self.ctx;
        let mult_degree: u64 = multiplier.map_or(0, |m| m.degree());
        let target = ctx.genus() as i64 + 1 - self.n as i64 + mult_degree as i64;
        assert!(target >= 0, "pushforward degree would be negative");

        let stab = if orbit_reduce {
            multiplier_stabilizer(self.n, multiplier)
        } else {
            Vec::new()
        };

        let mut vectors: BTreeMap<MultiDegree, KappaPolynomial> = BTreeMap::new();
        for (part, apoly) in &self.state {
            let part = match multiplier {
                Some(m) => nf_multiply(part, m),
                None => part.clone(),
            };
            let kp = convention_flip(&pushforward(&part, ctx));
            if kp.is_zero() {
                continue;
            }
            for (e, c) in apoly {
                if orbit_reduce && orbit_representative(e, &stab) != *e {
                    continue;
                }
                let slot = vectors.entry(e.clone()).or_insert_with(KappaPolynomial::zero);
                slot.add_assign(&kp.scale(c));
            }
        }
        vectors.retain(|_, v| !v.is_zero());

        for v in vectors.values() {
            debug_assert_eq!(v.homogeneous_degree(), Some(target as u32));
        }

        RelationVectorMap {
            genus: ctx.genus(),
            n: self.n,
            multiplier: multiplier.cloned(),
            degree: target as u32,
            vectors,
        }
    }
}

/// Expands Omega_A^{g+1} (times an optional multiplier monomial), collecting
/// like weighted partitions at every step, and pushes each A-coefficient
/// forward to the kappa ring.
pub fn expand_pushforward(
    ctx: &GenusContext,
    n: u32,
    multiplier: Option<&WeightedPartition>,
    orbit_reduce: bool,
) -> RelationVectorMap {
    OmegaPower::compute(ctx, n).pushforward(multiplier, orbit_reduce)
}

fn merge_states(
    mut a: BTreeMap<WeightedPartition, APoly>,
    b: BTreeMap<WeightedPartition, APoly>,
) -> BTreeMap<WeightedPartition, APoly> {
    for (part, apoly) in b {
        let slot = a.entry(part).or_default();
        for (e, c) in apoly {
            apoly_add_term(slot, e, c);
        }
    }
    a
}

/// Omega_A evaluated at a concrete integer vector A, as a point polynomial.
pub fn omega_at(ctx: &GenusContext, n: u32, a: &[i64]) -> PointPolynomial {
    assert_eq!(a.len(), n as usize);
    let omega = build_omega(ctx, n);
    let mut out = PointPolynomial::zero();
    for (part, quad) in omega.generators() {
        let mut coeff = Rat::zero();
        for (e, c) in quad {
            let mut v = c.clone();
            for (i, &exp) in e.iter().enumerate() {
                for _ in 0..exp {
                    v *= Rat::from_integer(BigInt::from(a[i]));
                }
            }
            coeff += v;
        }
        out.add_term(part.clone(), coeff);
    }
    out
}

/// Divides out the rational content, leaving a primitive integer vector whose
/// first stored term is positive.
pub fn clear_denominators(p: &KappaPolynomial) -> KappaPolynomial {
    use num_integer::Integer;
    if p.is_zero() {
        return KappaPolynomial::zero();
    }
    let mut denom_lcm = BigInt::one();
    let mut numer_gcd = BigInt::zero();
    for (_, c) in p.terms() {
        denom_lcm = denom_lcm.lcm(c.denom());
        numer_gcd = numer_gcd.gcd(c.numer());
    }
    let mut scale = BigRational::new(denom_lcm, numer_gcd);
    if let Some((_, first)) = p.terms().next() {
        if (first * &scale).is_negative() {
            scale = -scale;
        }
    }
    p.scale(&scale)
}

/// Closed form of the relation obtained from the one-pointed space after
/// multiplying by e^k: sum_{i=-1}^{g} C(g+1, i+1) (k_1/(chi(chi-2)))^{g-i}
/// kappa_{i+k}, cleared to a primitive integer vector.
pub fn morita_relation(ctx: &GenusContext, k: u32) -> KappaPolynomial {
    assert!(k >= 1);
    let g = ctx.genus() as i64;
    let chi = ctx.chi_rat();
    let unit = &chi * (&chi - Rat::from_integer(2.into()));
    let mut out = KappaPolynomial::zero();
    for i in -1..=g {
        let idx = i + k as i64;
        if idx < 0 {
            continue;
        }
        let binom = binomial(BigInt::from(g + 1), BigInt::from(i + 1));
        let mut coeff = Rat::from_integer(binom);
        for _ in 0..(g - i) {
            coeff /= &unit;
        }
        let mut term = if idx == 0 {
            KappaPolynomial::constant(coeff * &chi)
        } else {
            KappaPolynomial::monomial(KappaMonomial::single(idx as u32, 1), coeff)
        };
        term = term.mul_monomial(&KappaMonomial::single(1, (g - i) as u32));
        out.add_assign(&term);
    }
    clear_denominators(&convention_flip(&out))
}

/// Coefficient of the bare monomial kappa_{g-1} in the two-point pipeline
/// output, as a symmetric function of (A_1, A_2) specialised to
/// sigma_1 = A_1 + A_2 = 0. Returns the coefficient of sigma_2^{g+1}.
pub fn kappa_gm1_coefficient(ctx: &GenusContext) -> Rat {
    let g = ctx.genus();
    let rvm = expand_pushforward(ctx, 2, None, false);
    let target = KappaMonomial::single(g - 1, 1);
    let mut alternating = Rat::zero();
    for (e, poly) in &rvm.vectors {
        let c = poly.coefficient(&target);
        if e[0] % 2 == 0 {
            alternating += c;
        } else {
            alternating -= c;
        }
    }
    if (g + 1) % 2 == 1 {
        alternating = -alternating;
    }
    alternating
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kappa::rat_int;

    #[test]
    fn omega_has_expected_generator_count() {
        let ctx = GenusContext::new(3);
        for n in 1..=4 {
            let omega = build_omega(&ctx, n);
            assert_eq!(
                omega.generators().len() as u32,
                n + n * (n - 1) / 2 + 1
            );
        }
    }

    #[test]
    fn omega_one_point_is_morita_class() {
        // chi(chi-2) A^2 e_1 + A^2 k_1
        let ctx = GenusContext::new(3);
        let omega = build_omega(&ctx, 1);
        let chi = rat_int(ctx.chi());
        let want_e = &chi * (&chi - rat_int(2));
        let (part, quad) = &omega.generators()[0];
        assert_eq!(part, &WeightedPartition::new(1, 0, [(vec![1], 1)]));
        assert_eq!(quad.get(&vec![2]), Some(&want_e));
        let (part, quad) = &omega.generators()[1];
        assert_eq!(part, &WeightedPartition::new(1, 1, []));
        assert_eq!(quad.get(&vec![2]), Some(&rat_int(1)));
    }

    #[test]
    fn omega_two_points_grouped_form() {
        // A_1^2 (chi(chi-2) e_1 + k_1) + 2 A_1 A_2 (chi^2 nu_12 - chi(e_1+e_2) + k_1)
        // + A_2^2 (chi(chi-2) e_2 + k_1)
        let ctx = GenusContext::new(4);
        let omega = build_omega(&ctx, 2);
        let chi = rat_int(ctx.chi());

        let coeff = |part: &WeightedPartition, e: &MultiDegree| -> Rat {
            omega
                .generators()
                .iter()
                .find(|(p, _)| p == part)
                .and_then(|(_, q)| q.get(e).cloned())
                .unwrap_or_else(Rat::zero)
        };

        let e1 = WeightedPartition::new(2, 0, [(vec![1], 1)]);
        let e2 = WeightedPartition::new(2, 0, [(vec![2], 1)]);
        let nu = WeightedPartition::new(2, 0, [(vec![1, 2], 1)]);
        let k1 = WeightedPartition::new(2, 1, []);

        assert_eq!(coeff(&e1, &vec![2, 0]), &chi * (&chi - rat_int(2)));
        assert_eq!(coeff(&e1, &vec![1, 1]), rat_int(-2) * &chi);
        assert_eq!(coeff(&e2, &vec![0, 2]), &chi * (&chi - rat_int(2)));
        assert_eq!(coeff(&e2, &vec![1, 1]), rat_int(-2) * &chi);
        assert_eq!(coeff(&nu, &vec![1, 1]), rat_int(2) * &chi * &chi);
        assert_eq!(coeff(&k1, &vec![2, 0]), rat_int(1));
        assert_eq!(coeff(&k1, &vec![1, 1]), rat_int(2));
        assert_eq!(coeff(&k1, &vec![0, 2]), rat_int(1));
    }

    #[test]
    fn omega_at_degree_zero_vector() {
        // A = (1, -1): Omega = chi^2 (e_1 + e_2 - 2 nu_12)
        let ctx = GenusContext::new(3);
        let p = omega_at(&ctx, 2, &[1, -1]);
        let chi2 = rat_int(ctx.chi() * ctx.chi());
        let mut want = PointPolynomial::zero();
        want.add_term(WeightedPartition::new(2, 0, [(vec![1], 1)]), chi2.clone());
        want.add_term(WeightedPartition::new(2, 0, [(vec![2], 1)]), chi2.clone());
        want.add_term(
            WeightedPartition::new(2, 0, [(vec![1, 2], 1)]),
            rat_int(-2) * &chi2,
        );
        assert_eq!(p, want);
    }

    #[test]
    fn unused_point_multidegree_vanishes() {
        let ctx = GenusContext::new(3);
        let rvm = expand_pushforward(&ctx, 2, None, false);
        assert!(!rvm.vectors.contains_key(&vec![8, 0]));
        assert_eq!(rvm.degree, 2);
        for v in rvm.vectors.values() {
            assert_eq!(v.homogeneous_degree(), Some(2));
        }
    }

    #[test]
    fn permutation_symmetry_of_vectors() {
        let ctx = GenusContext::new(3);
        let rvm = expand_pushforward(&ctx, 2, None, false);
        for (e, v) in &rvm.vectors {
            let flipped = vec![e[1], e[0]];
            assert_eq!(rvm.vectors.get(&flipped), Some(v), "multidegree {:?}", e);
        }
    }

    #[test]
    fn orbit_reduction_keeps_representatives_only() {
        let ctx = GenusContext::new(3);
        let full = expand_pushforward(&ctx, 2, None, false);
        let reduced = expand_pushforward(&ctx, 2, None, true);
        assert!(reduced.vectors.len() < full.vectors.len());
        for (e, v) in &reduced.vectors {
            assert!(e[0] >= e[1]);
            assert_eq!(full.vectors.get(e), Some(v));
        }
    }

    #[test]
    fn numeric_evaluation_matches_symbolic_expansion() {
        for g in [2u32, 3] {
            let ctx = GenusContext::new(g);
            let n = 2;
            for a in [[1i64, 2], [3, -1], [-2, -2]] {
                let direct = convention_flip(
                    &omega_at(&ctx, n, &a).pow(ctx.genus() + 1).pushforward(&ctx),
                );
                let rvm = expand_pushforward(&ctx, n, None, false);
                let mut summed = KappaPolynomial::zero();
                for (e, poly) in &rvm.vectors {
                    let mut scale = Rat::one();
                    for (i, &exp) in e.iter().enumerate() {
                        for _ in 0..exp {
                            scale *= rat_int(a[i]);
                        }
                    }
                    summed.add_assign(&poly.scale(&scale));
                }
                assert_eq!(summed, direct, "g = {}, A = {:?}", g, a);
            }
        }
    }

    #[test]
    fn morita_relation_g2_k1_is_integral_and_matches_pipeline() {
        let ctx = GenusContext::new(2);
        let rel = morita_relation(&ctx, 1);
        assert!(!rel.is_zero());
        // proportionality against the one-point pipeline with multiplier e^1
        let mult = WeightedPartition::new(1, 0, [(vec![1], 1)]);
        let rvm = expand_pushforward(&ctx, 1, Some(&mult), false);
        assert_eq!(rvm.vectors.len(), 1);
        let pipeline = clear_denominators(rvm.vectors.values().next().unwrap());
        assert_eq!(pipeline, rel);
    }

    #[test]
    fn kappa_gm1_coefficient_nonzero_small_genus() {
        for g in [2u32, 3, 5] {
            let ctx = GenusContext::new(g);
            assert!(!kappa_gm1_coefficient(&ctx).is_zero(), "g = {}", g);
        }
    }
}
