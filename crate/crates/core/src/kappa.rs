//! The free graded polynomial ring on the classes k_1, k_2, ... over exact
//! rationals, with the conventions k_0 = chi and k_i = 0 for i < 0.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar; every coefficient in the engine lives here.
pub type Rat = BigRational;

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Genus bookkeeping: `chi` is always `2 - 2g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenusContext {
    g: u32,
    chi: i64,
}

impl GenusContext {
    /// Panics if `g < 2`.
    pub fn new(g: u32) -> Self {
        assert!(g >= 2, "genus must be at least 2");
        GenusContext {
            g,
            chi: 2 - 2 * g as i64,
        }
    }

    pub fn genus(&self) -> u32 {
        self.g
    }

    pub fn chi(&self) -> i64 {
        self.chi
    }

    pub fn chi_rat(&self) -> Rat {
        rat_int(self.chi)
    }
}

/// A monomial in the k_i, stored as `(index, multiplicity)` pairs with
/// index >= 1, multiplicity >= 1, sorted by index. The empty list is the unit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct KappaMonomial {
    exps: Vec<(u32, u32)>,
}

impl KappaMonomial {
    pub fn unit() -> Self {
        KappaMonomial::default()
    }

    pub fn single(index: u32, mult: u32) -> Self {
        assert!(index >= 1);
        if mult == 0 {
            return KappaMonomial::unit();
        }
        KappaMonomial {
            exps: vec![(index, mult)],
        }
    }

    /// Builds a monomial from arbitrary `(index, multiplicity)` pairs,
    /// merging repeats and dropping zero multiplicities.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        for (i, m) in pairs {
            assert!(i >= 1, "kappa index in a monomial must be >= 1");
            if m > 0 {
                *map.entry(i).or_insert(0) += m;
            }
        }
        KappaMonomial {
            exps: map.into_iter().collect(),
        }
    }

    pub fn exponents(&self) -> &[(u32, u32)] {
        &self.exps
    }

    pub fn is_unit(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&(i, m)| i * m).sum()
    }

    pub fn mul(&self, other: &KappaMonomial) -> KappaMonomial {
        KappaMonomial::from_pairs(self.exps.iter().chain(other.exps.iter()).copied())
    }
}

impl fmt::Display for KappaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(i, m) in &self.exps {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if m == 1 {
                write!(f, "k{}", i)?;
            } else {
                write!(f, "k{}^{}", i, m)?;
            }
        }
        Ok(())
    }
}

/// Sparse rational combination of kappa monomials. No zero coefficients are
/// ever stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct KappaPolynomial {
    terms: BTreeMap<KappaMonomial, Rat>,
}

impl KappaPolynomial {
    pub fn zero() -> Self {
        KappaPolynomial::default()
    }

    pub fn one() -> Self {
        KappaPolynomial::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = KappaPolynomial::zero();
        p.add_term(KappaMonomial::unit(), c);
        p
    }

    pub fn monomial(m: KappaMonomial, c: Rat) -> Self {
        let mut p = KappaPolynomial::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&KappaMonomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &KappaMonomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, m: KappaMonomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &KappaPolynomial) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &KappaPolynomial) -> KappaPolynomial {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn scale(&self, c: &Rat) -> KappaPolynomial {
        if c.is_zero() {
            return KappaPolynomial::zero();
        }
        KappaPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    pub fn sub(&self, other: &KappaPolynomial) -> KappaPolynomial {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn mul(&self, other: &KappaPolynomial) -> KappaPolynomial {
        let mut out = KappaPolynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &KappaMonomial) -> KappaPolynomial {
        KappaPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.mul(m), c.clone()))
                .collect(),
        }
    }

    /// The common degree of all terms, if the polynomial is homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys();
        let d = it.next()?.degree();
        if it.all(|m| m.degree() == d) {
            Some(d)
        } else {
            None
        }
    }

    /// Coefficient vector against an ordered basis. Panics if a term's
    /// monomial is missing from the basis.
    pub fn to_vector(&self, basis: &[KappaMonomial]) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); basis.len()];
        for (m, c) in &self.terms {
            let pos = basis
                .iter()
                .position(|b| b == m)
                .unwrap_or_else(|| panic!("monomial {} not in basis", m));
            v[pos] = c.clone();
        }
        v
    }
}

impl fmt::Display for KappaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_unit() {
                write!(f, "{}", abs)?;
            } else if abs.is_one() {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", abs, m)?;
            }
        }
        Ok(())
    }
}

/// All kappa monomials of degree `d`, i.e. the partitions of `d`, with k_d
/// first and k_1^d last (parts listed largest-first, lexicographically
/// descending).
pub fn basis_of_degree(d: u32) -> Vec<KappaMonomial> {
    let mut out = Vec::new();
    let mut parts: Vec<u32> = Vec::new();
    descend(d, d, &mut parts, &mut out);
    out
}

fn descend(remaining: u32, max_part: u32, parts: &mut Vec<u32>, out: &mut Vec<KappaMonomial>) {
    if remaining == 0 {
        out.push(KappaMonomial::from_pairs(
            parts.iter().map(|&p| (p, 1u32)),
        ));
        return;
    }
    let mut p = max_part.min(remaining);
    while p >= 1 {
        parts.push(p);
        descend(remaining - p, p, parts, out);
        parts.pop();
        p -= 1;
    }
}

/// Applies the substitution kappa_i -> (-1)^{i+1} kappa_i, which converts
/// between the Euler-class and cotangent-class sign conventions for the
/// kappa classes. The classical relation tables use the cotangent convention.
pub fn convention_flip(p: &KappaPolynomial) -> KappaPolynomial {
    let mut out = KappaPolynomial::zero();
    for (m, c) in p.terms() {
        // a factor kappa_i^e contributes (-1)^{(i+1) e}
        let odd_flips: u32 = m
            .exponents()
            .iter()
            .filter(|&&(i, e)| i % 2 == 0 && e % 2 == 1)
            .count() as u32;
        let c = if odd_flips % 2 == 1 { -c } else { c.clone() };
        out.add_term(m.clone(), c);
    }
    out
}

/// Product of kappa classes for a multiset of indices: any negative index
/// kills the product, each zero index contributes a scalar factor chi.
pub fn kappa_product(indices: &[i64], ctx: &GenusContext) -> KappaPolynomial {
    let mut coeff = Rat::one();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for &i in indices {
        if i < 0 {
            return KappaPolynomial::zero();
        } else if i == 0 {
            coeff *= ctx.chi_rat();
        } else {
            pairs.push((i as u32, 1));
        }
    }
    KappaPolynomial::monomial(KappaMonomial::from_pairs(pairs), coeff)
}
