//! Exact rational row reduction of relation vectors over a fixed-degree
//! monomial basis, span membership, ideal extension, and the canonical
//! "monomial = M * pivot" presentation.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::kappa::{basis_of_degree, GenusContext, KappaMonomial, KappaPolynomial, Rat};
use crate::omega::{clear_denominators, RelationVectorMap};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("relation set is not reduced")]
    NotReduced,
    #[error("pivot monomial is not in the basis")]
    NotInBasis,
    #[error("rank deficit: rank {rank} over {cols} columns leaves more than one free monomial")]
    RankDeficit { rank: usize, cols: usize },
    #[error("pivot annihilated: the pivot monomial itself lies in the relation span")]
    PivotAnnihilated,
}

/// Reduced row echelon data: rows with leading coefficient 1 in their pivot
/// column and zeros above and below every pivot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedForm {
    pub rows: Vec<Vec<Rat>>,
    pub pivots: Vec<usize>,
}

/// A set of relation vectors of one fixed degree.
#[derive(Clone, Debug)]
pub struct RelationSet {
    ctx: GenusContext,
    degree: u32,
    basis: Vec<KappaMonomial>,
    rows: Vec<Vec<Rat>>,
    reduced: Option<ReducedForm>,
}

impl RelationSet {
    pub fn new(ctx: GenusContext, degree: u32) -> Self {
        RelationSet {
            ctx,
            degree,
            basis: basis_of_degree(degree),
            rows: Vec::new(),
            reduced: None,
        }
    }

    pub fn ctx(&self) -> &GenusContext {
        &self.ctx
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn basis(&self) -> &[KappaMonomial] {
        &self.basis
    }

    pub fn rows(&self) -> &[Vec<Rat>] {
        &self.rows
    }

    pub fn reduced(&self) -> Option<&ReducedForm> {
        self.reduced.as_ref()
    }

    pub fn rank(&self) -> Option<usize> {
        self.reduced.as_ref().map(|r| r.pivots.len())
    }

    /// Adds a homogeneous polynomial of the set's degree as a row. Zero
    /// polynomials and exact duplicates are skipped.
    pub fn add_polynomial(&mut self, p: &KappaPolynomial) {
        if p.is_zero() {
            return;
        }
        assert_eq!(
            p.homogeneous_degree(),
            Some(self.degree),
            "row degree mismatch"
        );
        let v = p.to_vector(&self.basis);
        if !self.rows.contains(&v) {
            self.rows.push(v);
            self.reduced = None;
        }
    }

    pub fn add_row(&mut self, v: Vec<Rat>) {
        assert_eq!(v.len(), self.basis.len());
        if v.iter().all(|c| c.is_zero()) {
            return;
        }
        if !self.rows.contains(&v) {
            self.rows.push(v);
            self.reduced = None;
        }
    }

    /// Absorbs every vector of a pipeline output of matching degree.
    pub fn absorb(&mut self, rvm: &RelationVectorMap) {
        assert_eq!(rvm.genus, self.ctx.genus());
        if rvm.degree != self.degree {
            return;
        }
        for poly in rvm.vectors.values() {
            self.add_polynomial(poly);
        }
    }

    /// Row reduction: fraction-free forward elimination on integer-cleared
    /// rows, then rational back substitution to reduced row echelon form.
    pub fn reduce(&mut self) -> &ReducedForm {
        if self.reduced.is_none() {
            let mut m: Vec<Vec<BigInt>> = self.rows.iter().map(|r| clear_row(r)).collect();
            let pivots = bareiss_forward(&mut m);
            let rows = back_substitute(m, &pivots);
            self.reduced = Some(ReducedForm { rows, pivots });
        }
        self.reduced.as_ref().unwrap()
    }

    /// True iff `v` lies in the span of the reduced rows. Reduces lazily.
    pub fn span_contains(&mut self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.basis.len());
        self.reduce();
        let red = self.reduced.as_ref().unwrap();
        let mut w = v.to_vec();
        for (row, &col) in red.rows.iter().zip(&red.pivots) {
            if !w[col].is_zero() {
                let factor = w[col].clone();
                for (wj, rj) in w.iter_mut().zip(row) {
                    *wj -= &factor * rj;
                }
            }
        }
        w.iter().all(|c| c.is_zero())
    }

    pub fn span_contains_poly(&mut self, p: &KappaPolynomial) -> bool {
        self.span_contains(&p.to_vector(&self.basis))
    }

    /// Multiplies every row by every monomial of the complementary degree,
    /// landing in `target_degree`.
    pub fn ideal_extend(&self, target_degree: u32) -> RelationSet {
        assert!(target_degree >= self.degree);
        if target_degree == self.degree {
            return self.clone();
        }
        let mut out = RelationSet::new(self.ctx, target_degree);
        let multipliers = basis_of_degree(target_degree - self.degree);
        for row in &self.rows {
            let poly = poly_from_vector(&self.basis, row);
            for m in &multipliers {
                out.add_polynomial(&poly.mul_monomial(m));
            }
        }
        out
    }

    /// Merges the rows of another set of the same degree.
    pub fn merge(&mut self, other: &RelationSet) {
        assert_eq!(self.degree, other.degree);
        for row in &other.rows {
            self.add_row(row.clone());
        }
    }

    /// If the relations cut the basis down to multiples of `pivot_monomial`,
    /// returns the scalar M with m = M * pivot for every other monomial m.
    pub fn canonical_presentation(
        &self,
        pivot_monomial: &KappaMonomial,
    ) -> Result<Vec<(KappaMonomial, Rat)>, SolverError> {
        let red = self.reduced.as_ref().ok_or(SolverError::NotReduced)?;
        let cols = self.basis.len();
        if !self.basis.iter().any(|b| b == pivot_monomial) {
            return Err(SolverError::NotInBasis);
        }
        if red.pivots.len() + 1 < cols {
            return Err(SolverError::RankDeficit {
                rank: red.pivots.len(),
                cols,
            });
        }
        let pivot_cols: BTreeSet<usize> = red.pivots.iter().copied().collect();
        let free_col = (0..cols)
            .find(|c| !pivot_cols.contains(c))
            .ok_or(SolverError::PivotAnnihilated)?;

        // express each basis monomial as a multiple of the free column
        let coef_free = |col: usize| -> Rat {
            if col == free_col {
                Rat::one()
            } else {
                let row_idx = red.pivots.iter().position(|&p| p == col).unwrap();
                -red.rows[row_idx][free_col].clone()
            }
        };

        let pivot_col = self
            .basis
            .iter()
            .position(|b| b == pivot_monomial)
            .unwrap();
        let pivot_coef = coef_free(pivot_col);
        if pivot_coef.is_zero() {
            return Err(SolverError::PivotAnnihilated);
        }

        Ok(self
            .basis
            .iter()
            .enumerate()
            .filter(|(c, _)| *c != pivot_col)
            .map(|(c, m)| (m.clone(), coef_free(c) / &pivot_coef))
            .collect())
    }

    /// One integer-cleared text line per reduced row, e.g.
    /// `3*k1^2 - 32*k2 = 0`.
    pub fn relation_lines(&self) -> Vec<String> {
        let Some(red) = self.reduced.as_ref() else {
            return Vec::new();
        };
        red.rows
            .iter()
            .map(|row| {
                let poly = clear_denominators(&poly_from_vector(&self.basis, row));
                format!("{} = 0", poly)
            })
            .collect()
    }
}

pub fn poly_from_vector(basis: &[KappaMonomial], row: &[Rat]) -> KappaPolynomial {
    let mut p = KappaPolynomial::zero();
    for (m, c) in basis.iter().zip(row) {
        p.add_term(m.clone(), c.clone());
    }
    p
}

fn clear_row(row: &[Rat]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for c in row {
        if !c.is_zero() {
            lcm = lcm.lcm(c.denom());
        }
    }
    let mut ints: Vec<BigInt> = row.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
    let mut gcd = BigInt::zero();
    for v in &ints {
        gcd = gcd.gcd(v);
    }
    if !gcd.is_zero() && !gcd.is_one() {
        for v in &mut ints {
            *v /= &gcd;
        }
    }
    ints
}

/// Fraction-free forward elimination. Returns the pivot columns; afterwards
/// the first `pivots.len()` rows of `m` are in echelon form.
fn bareiss_forward(m: &mut Vec<Vec<BigInt>>) -> Vec<usize> {
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut rank = 0usize;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        // smallest-magnitude nonzero entry in this column at or below `rank`
        let pivot_row = (rank..nrows)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].abs());
        let Some(pr) = pivot_row else { continue };
        m.swap(rank, pr);
        for i in rank + 1..nrows {
            for j in col + 1..ncols {
                let num = &m[rank][col] * &m[i][j] - &m[i][col] * &m[rank][j];
                m[i][j] = num / &prev; // exact by the Bareiss identity
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        pivots.push(col);
        rank += 1;
    }
    pivots
}

/// Normalises the echelon rows to leading 1 and eliminates above each pivot.
fn back_substitute(m: Vec<Vec<BigInt>>, pivots: &[usize]) -> Vec<Vec<Rat>> {
    let mut rows: Vec<Vec<Rat>> = m
        .into_iter()
        .take(pivots.len())
        .map(|r| r.into_iter().map(Rat::from_integer).collect())
        .collect();
    for (i, &col) in pivots.iter().enumerate() {
        let lead = rows[i][col].clone();
        for c in rows[i].iter_mut() {
            *c /= &lead;
        }
        for j in 0..i {
            if !rows[j][col].is_zero() {
                let factor = rows[j][col].clone();
                let (upper, lower) = rows.split_at_mut(i);
                for (a, b) in upper[j].iter_mut().zip(&lower[0]) {
                    *a -= &factor * b;
                }
            }
        }
    }
    rows
}
