//! Finite-dimensional graded algebras given by structure constants.
//!
//! Scalars are a root of unity times an exact rational, so everything the
//! twisted constructions produce is represented without rounding.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::grading::{Label, LabelDomain, SupportTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("basis element {0} out of range")]
    BadBasis(usize),
    #[error("degree of {left} * {right} is {expected}, but the product has a term in degree {found}")]
    DegreeMismatch { left: String, right: String, expected: String, found: String },
    #[error("not associative at ({0}, {1}, {2})")]
    NotAssociative(String, String, String),
    #[error("{names} names for {degrees} degrees")]
    LengthMismatch { names: usize, degrees: usize },
    #[error("degree of basis element {0} is outside the domain")]
    BadDegree(usize),
}

/// `ζ_m^k · c` with `ζ_m = exp(2πi/m)` and `c` rational. The root is kept
/// as the reduced fraction `k/m` of a full turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    turn: Ratio<i64>,
    coeff: Ratio<i64>,
}

fn normalize_turn(t: Ratio<i64>) -> Ratio<i64> {
    let whole = t.floor();
    t - whole
}

impl Scalar {
    pub fn one() -> Self {
        Scalar { turn: Ratio::zero(), coeff: Ratio::one() }
    }

    pub fn root(k: i64, m: i64) -> Self {
        assert!(m > 0, "root of unity modulus must be positive");
        Scalar { turn: normalize_turn(Ratio::new(k.mod_floor(&m), m)), coeff: Ratio::one() }
    }

    pub fn rational(c: Ratio<i64>) -> Self {
        Scalar { turn: Ratio::zero(), coeff: c }
    }

    pub fn turn(&self) -> Ratio<i64> {
        self.turn
    }

    pub fn coeff(&self) -> Ratio<i64> {
        self.coeff
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        Scalar { turn: normalize_turn(self.turn + other.turn), coeff: self.coeff * other.coeff }
    }

    /// Canonical form: turns in `[0, 1/2)`, using `ζ^(1/2) = -1`.
    fn folded(&self) -> (Ratio<i64>, Ratio<i64>) {
        let half = Ratio::new(1, 2);
        if self.turn >= half {
            (self.turn - half, -self.coeff)
        } else {
            (self.turn, self.coeff)
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (turn, coeff) = self.folded();
        if turn.is_zero() {
            return write!(f, "{coeff}");
        }
        let root = format!("z^{}/{}", turn.numer(), turn.denom());
        if coeff.is_one() {
            f.write_str(&root)
        } else if coeff == -Ratio::one() {
            write!(f, "-{root}")
        } else {
            write!(f, "{coeff}*{root}")
        }
    }
}

/// A formal linear combination of basis elements with scalar
/// coefficients, reduced by `ζ^(1/2) = -1`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Combination(BTreeMap<(usize, Ratio<i64>), Ratio<i64>>);

impl Combination {
    pub fn add_term(&mut self, basis: usize, s: Scalar) {
        let (turn, coeff) = s.folded();
        let entry = self.0.entry((basis, turn)).or_insert_with(Ratio::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.0.remove(&(basis, turn));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, Scalar)> + '_ {
        self.0.iter().map(|(&(b, turn), &coeff)| (b, Scalar { turn, coeff }))
    }
}

#[derive(Debug, Clone)]
pub struct GradedAlgebra {
    domain: LabelDomain,
    names: Vec<String>,
    degrees: Vec<Label>,
    products: BTreeMap<(usize, usize), Vec<(usize, Scalar)>>,
}

impl GradedAlgebra {
    /// Checks degree compatibility of every product term and associativity
    /// on all basis triples.
    pub fn new(
        domain: LabelDomain,
        names: Vec<String>,
        degrees: Vec<Label>,
        products: BTreeMap<(usize, usize), Vec<(usize, Scalar)>>,
    ) -> Result<Self, AlgebraError> {
        if names.len() != degrees.len() {
            return Err(AlgebraError::LengthMismatch { names: names.len(), degrees: degrees.len() });
        }
        for (i, d) in degrees.iter().enumerate() {
            if !domain.contains(d) {
                return Err(AlgebraError::BadDegree(i));
            }
        }
        let dim = names.len();
        let mut cleaned = BTreeMap::new();
        for (&(i, j), terms) in &products {
            for &x in [i, j].iter().chain(terms.iter().map(|(k, _)| k)) {
                if x >= dim {
                    return Err(AlgebraError::BadBasis(x));
                }
            }
            let expected = domain.mul(&degrees[i], &degrees[j]);
            let mut combo = Combination::default();
            for &(k, s) in terms {
                combo.add_term(k, s);
            }
            for (k, _) in combo.terms() {
                if degrees[k] != expected {
                    return Err(AlgebraError::DegreeMismatch {
                        left: names[i].clone(),
                        right: names[j].clone(),
                        expected: domain.display(&expected),
                        found: domain.display(&degrees[k]),
                    });
                }
            }
            if !combo.is_zero() {
                cleaned.insert((i, j), combo.terms().collect());
            }
        }
        let algebra = GradedAlgebra { domain, names, degrees, products: cleaned };
        algebra.check_associative()?;
        Ok(algebra)
    }

    fn check_associative(&self) -> Result<(), AlgebraError> {
        let dim = self.dim();
        for a in 0..dim {
            for b in 0..dim {
                let ab = self.product(a, b);
                for c in 0..dim {
                    let left = self.multiply_combination_right(&ab, c);
                    let bc = self.product(b, c);
                    let right = self.multiply_combination_left(a, &bc);
                    if left != right {
                        return Err(AlgebraError::NotAssociative(
                            self.names[a].clone(),
                            self.names[b].clone(),
                            self.names[c].clone(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn domain(&self) -> &LabelDomain {
        &self.domain
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn degree(&self, i: usize) -> &Label {
        &self.degrees[i]
    }

    pub fn degrees(&self) -> &[Label] {
        &self.degrees
    }

    pub fn structure_constants(&self) -> &BTreeMap<(usize, usize), Vec<(usize, Scalar)>> {
        &self.products
    }

    /// Product of two basis elements.
    pub fn product(&self, i: usize, j: usize) -> Combination {
        let mut out = Combination::default();
        if let Some(terms) = self.products.get(&(i, j)) {
            for &(k, s) in terms {
                out.add_term(k, s);
            }
        }
        out
    }

    fn multiply_combination_right(&self, x: &Combination, c: usize) -> Combination {
        let mut out = Combination::default();
        for (k, s) in x.terms() {
            for (m, t) in self.product(k, c).terms() {
                out.add_term(m, s.mul(&t));
            }
        }
        out
    }

    fn multiply_combination_left(&self, a: usize, x: &Combination) -> Combination {
        let mut out = Combination::default();
        for (k, s) in x.terms() {
            for (m, t) in self.product(a, k).terms() {
                out.add_term(m, s.mul(&t));
            }
        }
        out
    }

    /// Basis elements commuting with every basis element. For algebras with
    /// one-dimensional homogeneous components these span the homogeneous
    /// part of the center.
    pub fn central_basis_elements(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&a| (0..self.dim()).all(|b| self.product(a, b) == self.product(b, a)))
            .collect()
    }

    /// Support symbols are the distinct degrees in order of first
    /// occurrence along the basis; a pair of symbols interacts when some
    /// product of basis elements of those degrees is nonzero.
    pub fn support_table(&self) -> (SupportTable, Vec<Label>) {
        let mut index: HashMap<&Label, usize> = HashMap::new();
        let mut labels: Vec<Label> = Vec::new();
        let mut symbol_of = Vec::with_capacity(self.dim());
        for d in &self.degrees {
            let next = labels.len();
            let s = *index.entry(d).or_insert_with(|| {
                labels.push(d.clone());
                next
            });
            symbol_of.push(s);
        }
        let mut products = BTreeMap::new();
        for (&(i, j), terms) in &self.products {
            if let Some(&(k, _)) = terms.first() {
                products.insert((symbol_of[i], symbol_of[j]), symbol_of[k]);
            }
        }
        let identity = self.domain.identity();
        let unit = labels.iter().position(|l| *l == identity);
        let names = labels.iter().map(|l| self.domain.display(l)).collect();
        let table = SupportTable::new(names, unit, products).expect("degree-compatible products form a table");
        (table, labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingrp::FiniteGroup;

    #[test]
    fn scalar_arithmetic() {
        let i = Scalar::root(1, 4);
        assert_eq!(i.mul(&i), Scalar::root(2, 4));
        assert_eq!(Scalar::root(2, 4), Scalar::root(1, 2));
        assert_eq!(Scalar::root(4, 4), Scalar::one());
        assert_eq!(Scalar::root(-1, 4), Scalar::root(3, 4));
        assert_eq!(Scalar::root(1, 2).to_string(), "-1");
        assert_eq!(Scalar::root(1, 4).to_string(), "z^1/4");
        let mut combo = Combination::default();
        combo.add_term(0, Scalar::root(1, 2));
        combo.add_term(0, Scalar::one());
        assert!(combo.is_zero());
    }

    fn group_algebra(g: FiniteGroup, twist: impl Fn(usize, usize) -> Scalar) -> Result<GradedAlgebra, AlgebraError> {
        let names = g.elements().map(|x| format!("u{}", g.name(x))).collect();
        let degrees = g.elements().map(Label::Element).collect();
        let mut products = BTreeMap::new();
        for a in g.elements() {
            for b in g.elements() {
                products.insert((a, b), vec![(g.mul(a, b), twist(a, b))]);
            }
        }
        GradedAlgebra::new(LabelDomain::finite(g), names, degrees, products)
    }

    #[test]
    fn group_algebra_is_commutative_and_total() {
        let a = group_algebra(FiniteGroup::cyclic(2), |_, _| Scalar::one()).unwrap();
        assert_eq!(a.central_basis_elements(), vec![0, 1]);
        let (t, _) = a.support_table();
        assert!(crate::grading::is_strongly_connected(&t));
    }

    #[test]
    fn quaternion_like_twist() {
        // u_a u_b = -u_b u_a on C2 x C2
        let g = FiniteGroup::abelian(&[2, 2]);
        let sigma = |x: usize, y: usize| {
            let (cx, cy) = (x >> 1, y & 1);
            if cx * cy == 1 {
                Scalar::root(1, 2)
            } else {
                Scalar::one()
            }
        };
        let a = group_algebra(g, sigma).unwrap();
        assert_eq!(a.central_basis_elements(), vec![0]);
    }

    #[test]
    fn non_cocycle_rejected() {
        let g = FiniteGroup::cyclic(3);
        let bad = |x: usize, y: usize| if x == 1 && y == 1 { Scalar::root(1, 2) } else { Scalar::one() };
        assert!(matches!(group_algebra(g, bad), Err(AlgebraError::NotAssociative(..))));
    }

    #[test]
    fn degree_mismatch_rejected() {
        let g = FiniteGroup::cyclic(2);
        let mut products = BTreeMap::new();
        products.insert((1, 1), vec![(1, Scalar::one())]);
        let r = GradedAlgebra::new(
            LabelDomain::finite(g),
            vec!["a".into(), "b".into()],
            vec![Label::Element(0), Label::Element(1)],
            products,
        );
        assert!(matches!(r, Err(AlgebraError::DegreeMismatch { .. })));
    }
}
