//! Monomials in e_i, nu_ij and k_1 on the n-pointed moduli space, their
//! weighted-graph normal forms, and fibre integration down to the kappa ring.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use crate::kappa::{kappa_product, GenusContext, KappaMonomial, KappaPolynomial, Rat};

/// Raw exponent data of a monomial e^a nu^b k1^c on the n-pointed space.
/// Points are 1-based. Pairs in `b` are stored with i < j.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointMonomial {
    n: u32,
    a: Vec<u32>,
    b: BTreeMap<(u32, u32), u32>,
    c: u32,
}

impl PointMonomial {
    pub fn new(
        n: u32,
        a: Vec<u32>,
        b: impl IntoIterator<Item = ((u32, u32), u32)>,
        c: u32,
    ) -> Self {
        assert_eq!(a.len(), n as usize);
        let mut bm = BTreeMap::new();
        for ((i, j), e) in b {
            assert!(i != j, "nu_ii is not a generator");
            assert!(i >= 1 && j >= 1 && i <= n && j <= n, "point out of range");
            if e > 0 {
                let key = (i.min(j), i.max(j));
                *bm.entry(key).or_insert(0) += e;
            }
        }
        PointMonomial { n, a, b: bm, c }
    }

    pub fn unit(n: u32) -> Self {
        PointMonomial::new(n, vec![0; n as usize], [], 0)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn euler_exponents(&self) -> &[u32] {
        &self.a
    }

    pub fn diagonal_exponents(&self) -> &BTreeMap<(u32, u32), u32> {
        &self.b
    }

    pub fn kappa1_exponent(&self) -> u32 {
        self.c
    }

    pub fn degree(&self) -> u32 {
        self.a.iter().sum::<u32>() + self.b.values().sum::<u32>() + self.c
    }

    pub fn mul(&self, other: &PointMonomial) -> PointMonomial {
        assert_eq!(self.n, other.n);
        let a = self
            .a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| x + y)
            .collect();
        let mut b = self.b.clone();
        for (&k, &e) in &other.b {
            *b.entry(k).or_insert(0) += e;
        }
        PointMonomial {
            n: self.n,
            a,
            b,
            c: self.c + other.c,
        }
    }
}

/// Normal form of a point monomial: the connected components of its weighted
/// graph, each recorded as (point set, total weight), plus the k_1 exponent.
/// Blocks are sorted by least point; points inside a block are ascending.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightedPartition {
    n: u32,
    c: u32,
    blocks: Vec<(Vec<u32>, u64)>,
}

impl WeightedPartition {
    pub fn new(n: u32, c: u32, blocks: impl IntoIterator<Item = (Vec<u32>, u64)>) -> Self {
        let mut seen = BTreeSet::new();
        let mut canon: Vec<(Vec<u32>, u64)> = Vec::new();
        for (mut points, w) in blocks {
            points.sort_unstable();
            points.dedup();
            assert!(!points.is_empty(), "empty block");
            for &p in &points {
                assert!(p >= 1 && p <= n, "point {} out of range 1..={}", p, n);
                assert!(seen.insert(p), "blocks must be disjoint (point {})", p);
            }
            if points.len() == 1 && w == 0 {
                continue; // an unweighted singleton is just an unused point
            }
            assert!(
                w >= points.len() as u64 - 1,
                "block weight below spanning-tree minimum"
            );
            canon.push((points, w));
        }
        canon.sort();
        WeightedPartition {
            n,
            c,
            blocks: canon,
        }
    }

    /// The empty product on n points.
    pub fn unit(n: u32) -> Self {
        WeightedPartition {
            n,
            c: 0,
            blocks: Vec::new(),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn kappa1_exponent(&self) -> u32 {
        self.c
    }

    pub fn blocks(&self) -> &[(Vec<u32>, u64)] {
        &self.blocks
    }

    pub fn degree(&self) -> u64 {
        self.blocks.iter().map(|(_, w)| *w).sum::<u64>() + self.c as u64
    }

    pub fn covers_all_points(&self) -> bool {
        self.blocks.iter().map(|(pts, _)| pts.len() as u32).sum::<u32>() == self.n
    }

    /// Relabels points by `perm` (perm[i-1] is the image of point i).
    pub fn relabel(&self, perm: &[u32]) -> WeightedPartition {
        assert_eq!(perm.len(), self.n as usize);
        WeightedPartition::new(
            self.n,
            self.c,
            self.blocks
                .iter()
                .map(|(pts, w)| (pts.iter().map(|&p| perm[p as usize - 1]).collect(), *w)),
        )
    }
}

impl fmt::Display for WeightedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{n={}", self.n)?;
        for (pts, w) in &self.blocks {
            write!(f, " ({:?},{})", pts, w)?;
        }
        if self.c > 0 {
            write!(f, " k1^{}", self.c)?;
        }
        write!(f, "}}")
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }

    fn union(&mut self, i: usize, j: usize) {
        let a = self.find(i);
        let b = self.find(j);
        if a != b {
            self.parent[a.max(b)] = a.min(b);
        }
    }
}

/// Quotients a raw monomial by the graph moves: one block per connected
/// component of used points, weighted by the component's total vertex and
/// edge weight.
pub fn normal_form(m: &PointMonomial) -> WeightedPartition {
    let n = m.n() as usize;
    let mut uf = UnionFind::new(n);
    let mut used = vec![false; n];
    for (i, &ai) in m.euler_exponents().iter().enumerate() {
        if ai > 0 {
            used[i] = true;
        }
    }
    for (&(i, j), _) in m.diagonal_exponents() {
        used[i as usize - 1] = true;
        used[j as usize - 1] = true;
        uf.union(i as usize - 1, j as usize - 1);
    }
    let mut weight: BTreeMap<usize, u64> = BTreeMap::new();
    let mut members: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for i in 0..n {
        if used[i] {
            let r = uf.find(i);
            *weight.entry(r).or_insert(0) += m.euler_exponents()[i] as u64;
            members.entry(r).or_default().push(i as u32 + 1);
        }
    }
    for (&(i, _), &e) in m.diagonal_exponents() {
        let r = uf.find(i as usize - 1);
        *weight.entry(r).or_insert(0) += e as u64;
    }
    WeightedPartition::new(
        m.n(),
        m.kappa1_exponent(),
        members
            .into_iter()
            .map(|(r, pts)| (pts, weight[&r])),
    )
}

/// Product in the quotient algebra: blocks sharing a point merge and their
/// weights add; k_1 exponents add.
pub fn nf_multiply(x: &WeightedPartition, y: &WeightedPartition) -> WeightedPartition {
    assert_eq!(x.n(), y.n(), "mismatched point counts");
    let n = x.n() as usize;
    let mut uf = UnionFind::new(n);
    let mut weight: BTreeMap<usize, u64> = BTreeMap::new();
    let mut covered = vec![false; n];
    for part in [x, y] {
        for (pts, _) in part.blocks() {
            let first = pts[0] as usize - 1;
            for &p in pts {
                covered[p as usize - 1] = true;
                uf.union(first, p as usize - 1);
            }
        }
    }
    for part in [x, y] {
        for (pts, w) in part.blocks() {
            let r = uf.find(pts[0] as usize - 1);
            *weight.entry(r).or_insert(0) += *w;
        }
    }
    let mut members: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for i in 0..n {
        if covered[i] {
            members.entry(uf.find(i)).or_default().push(i as u32 + 1);
        }
    }
    WeightedPartition::new(
        x.n(),
        x.kappa1_exponent() + y.kappa1_exponent(),
        members.into_iter().map(|(r, pts)| (pts, weight[&r])),
    )
}

/// Fibre integration: each block contributes kappa_{weight - #points}; any
/// unused point kills the class.
pub fn pushforward(x: &WeightedPartition, ctx: &GenusContext) -> KappaPolynomial {
    if !x.covers_all_points() {
        return KappaPolynomial::zero();
    }
    let indices: Vec<i64> = x
        .blocks()
        .iter()
        .map(|(pts, w)| *w as i64 - pts.len() as i64)
        .collect();
    kappa_product(&indices, ctx).mul_monomial(&KappaMonomial::single(1, x.kappa1_exponent()))
}

/// All weighted partitions on `n` points of the given degree with no k_1
/// factor, i.e. the normal forms of the multiplier monomials e^a nu^b.
pub fn enumerate_multipliers(n: u32, degree: u32) -> Vec<WeightedPartition> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<u32>> = Vec::new();
    assign_points(1, n, &mut blocks, &mut |blocks| {
        distribute_weights(n, degree as u64, blocks, &mut out);
    });
    out.sort();
    out.dedup();
    out
}

fn assign_points(p: u32, n: u32, blocks: &mut Vec<Vec<u32>>, f: &mut impl FnMut(&[Vec<u32>])) {
    if p > n {
        f(blocks);
        return;
    }
    // point p unused
    assign_points(p + 1, n, blocks, f);
    // point p joins an existing block
    for i in 0..blocks.len() {
        blocks[i].push(p);
        assign_points(p + 1, n, blocks, f);
        blocks[i].pop();
    }
    // point p opens a new block
    blocks.push(vec![p]);
    assign_points(p + 1, n, blocks, f);
    blocks.pop();
}

fn distribute_weights(
    n: u32,
    degree: u64,
    blocks: &[Vec<u32>],
    out: &mut Vec<WeightedPartition>,
) {
    fn rec(
        n: u32,
        blocks: &[Vec<u32>],
        i: usize,
        remaining: u64,
        weights: &mut Vec<u64>,
        out: &mut Vec<WeightedPartition>,
    ) {
        if i == blocks.len() {
            if remaining == 0 {
                out.push(WeightedPartition::new(
                    n,
                    0,
                    blocks.iter().cloned().zip(weights.iter().copied()),
                ));
            }
            return;
        }
        let min = if blocks[i].len() == 1 {
            1
        } else {
            blocks[i].len() as u64 - 1
        };
        let mut w = min;
        while w <= remaining {
            weights.push(w);
            rec(n, blocks, i + 1, remaining - w, weights, out);
            weights.pop();
            w += 1;
        }
        // a block with zero admissible weight budget yields nothing
    }
    if blocks.is_empty() {
        if degree == 0 {
            out.push(WeightedPartition::unit(n));
        }
        return;
    }
    rec(n, blocks, 0, degree, &mut Vec::new(), out);
}

/// Sparse rational combination of weighted partitions.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PointPolynomial {
    terms: BTreeMap<WeightedPartition, Rat>,
}

impl PointPolynomial {
    pub fn zero() -> Self {
        PointPolynomial::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WeightedPartition, &Rat)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, p: WeightedPartition, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(p) {
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

    pub fn from_term(p: WeightedPartition, c: Rat) -> Self {
        let mut out = PointPolynomial::zero();
        out.add_term(p, c);
        out
    }

    pub fn add_assign(&mut self, other: &PointPolynomial) {
        for (p, c) in &other.terms {
            self.add_term(p.clone(), c.clone());
        }
    }

    pub fn mul(&self, other: &PointPolynomial) -> PointPolynomial {
        let mut out = PointPolynomial::zero();
        for (p1, c1) in &self.terms {
            for (p2, c2) in &other.terms {
                out.add_term(nf_multiply(p1, p2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> PointPolynomial {
        let n = self
            .terms
            .keys()
            .next()
            .map(|p| p.n())
            .expect("pow of empty polynomial needs a point count");
        let mut out = PointPolynomial::from_term(WeightedPartition::unit(n), Rat::from_integer(1.into()));
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn pushforward(&self, ctx: &GenusContext) -> KappaPolynomial {
        let mut out = KappaPolynomial::zero();
        for (p, c) in &self.terms {
            out.add_assign(&pushforward(p, ctx).scale(c));
        }
        out
    }
}
