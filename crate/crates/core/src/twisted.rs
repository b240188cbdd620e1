//! Bicharacters, 2-cocycles with root-of-unity values, twisted group
//! algebras and the graded-simple algebras `M(γ, σ)`.
//!
//! Every scalar is `ζ_M^e` for one modulus `M` per object, stored as the
//! exponent `e mod M`.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use num_integer::Integer;
use rand::Rng;
use thiserror::Error;

use crate::algebra::{AlgebraError, GradedAlgebra, Scalar};
use crate::fingrp::{for_each_isomorphism, Element, FiniteGroup};
use crate::grading::{coincidence_pattern, Label, LabelDomain, SupportTable};

/// Default cap on `n! * |H|^n` in [`condition_star`].
pub const DEFAULT_STAR_BOUND: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TwistedError {
    #[error("factor {0} is infinite; a finite group is required")]
    InfiniteFactor(usize),
    #[error("bicharacter invalid: {0}")]
    BadBicharacter(String),
    #[error("cocycle identity fails at ({u}, {v}, {w})")]
    CocycleIdentity { u: usize, v: usize, w: usize },
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("group {0} is not abelian")]
    NotAbelian(String),
    #[error("group {0} has no cyclic coordinates")]
    NoCoordinates(String),
    #[error("cocycles live on different groups ({0} vs {1})")]
    GroupMismatch(String, String),
    #[error("embedding of H into the ambient group is not an injective homomorphism")]
    BadEmbedding,
    #[error("tuple entry {index} is not an element of {group}")]
    BadTuple { index: usize, group: String },
    #[error("search space {size} exceeds the bound {bound}")]
    BoundExceeded { size: u64, bound: u64 },
    #[error("no prime p = 1 mod {0} below 10^6")]
    NoPrime(i64),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// An alternating bicharacter on `Z/n_1 x ... x Z/n_m` (`n_i = 0` for an
/// infinite factor) with `β(g_i, g_j) = ζ_M^{e_ij}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bicharacter {
    factors: Vec<u64>,
    exps: Vec<Vec<i64>>,
    modulus: i64,
}

impl Bicharacter {
    pub fn new(factors: Vec<u64>, exps: Vec<Vec<i64>>, modulus: i64) -> Result<Self, TwistedError> {
        let m = factors.len();
        if modulus <= 0 {
            return Err(TwistedError::BadBicharacter(format!("modulus {modulus} must be positive")));
        }
        if exps.len() != m || exps.iter().any(|r| r.len() != m) {
            return Err(TwistedError::BadBicharacter(format!("exponent matrix must be {m}x{m}")));
        }
        let exps: Vec<Vec<i64>> = exps
            .into_iter()
            .map(|r| r.into_iter().map(|e| e.mod_floor(&modulus)).collect())
            .collect();
        for i in 0..m {
            if exps[i][i] != 0 {
                return Err(TwistedError::BadBicharacter(format!("β(g{0}, g{0}) != 1", i + 1)));
            }
            for j in 0..m {
                if (exps[i][j] + exps[j][i]) % modulus != 0 {
                    return Err(TwistedError::BadBicharacter(format!(
                        "β(g{}, g{}) β(g{}, g{}) != 1",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
                for k in [i, j] {
                    let n = factors[k] as i64;
                    if n != 0 && (n * exps[i][j]) % modulus != 0 {
                        return Err(TwistedError::BadBicharacter(format!(
                            "β(g{}, g{})^{n} != 1",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(Bicharacter { factors, exps, modulus })
    }

    /// All values 1.
    pub fn trivial(factors: Vec<u64>) -> Self {
        let m = factors.len();
        let modulus = factors.iter().fold(1u64, |acc, &n| if n == 0 { acc } else { acc.lcm(&n) }) as i64;
        Bicharacter { factors, exps: vec![vec![0; m]; m], modulus }
    }

    /// Random valid exponents with `M = lcm` of the factors.
    pub fn random<R: Rng>(factors: Vec<u64>, rng: &mut R) -> Result<Self, TwistedError> {
        if let Some(i) = factors.iter().position(|&n| n == 0) {
            return Err(TwistedError::InfiniteFactor(i));
        }
        let m = factors.len();
        let modulus = factors.iter().fold(1u64, |acc, &n| acc.lcm(&n)) as i64;
        let mut exps = vec![vec![0i64; m]; m];
        for i in 0..m {
            for j in i + 1..m {
                let d = (factors[i] as i64).gcd(&(factors[j] as i64));
                let e = (modulus / d) * rng.gen_range(0..d);
                exps[i][j] = e;
                exps[j][i] = (-e).mod_floor(&modulus);
            }
        }
        Self::new(factors, exps, modulus)
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn exponents(&self) -> &[Vec<i64>] {
        &self.exps
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    /// Exponent of `β(g, h)` for coordinate vectors `g, h`.
    pub fn eval(&self, g: &[i64], h: &[i64]) -> i64 {
        let mut e = 0i64;
        for (i, &gi) in g.iter().enumerate() {
            for (j, &hj) in h.iter().enumerate() {
                e = (e + self.exps[i][j] * gi.mod_floor(&self.modulus) % self.modulus * hj.mod_floor(&self.modulus))
                    .mod_floor(&self.modulus);
            }
        }
        e
    }

    /// The finite group the bicharacter lives on.
    pub fn group(&self) -> Result<FiniteGroup, TwistedError> {
        if let Some(i) = self.factors.iter().position(|&n| n == 0) {
            return Err(TwistedError::InfiniteFactor(i));
        }
        let factors: Vec<usize> = self.factors.iter().map(|&n| n as usize).collect();
        Ok(FiniteGroup::abelian(&factors))
    }
}

/// `σ(u, v) = ζ_M^{values[u*|H| + v]}` on a finite group.
#[derive(Debug, Clone)]
pub struct CocycleTable {
    group: Arc<FiniteGroup>,
    values: Vec<i64>,
    modulus: i64,
}

impl CocycleTable {
    pub fn new(group: Arc<FiniteGroup>, values: Vec<i64>, modulus: i64) -> Result<Self, TwistedError> {
        let n = group.order();
        if values.len() != n * n {
            return Err(TwistedError::WrongLength { expected: n * n, got: values.len() });
        }
        let values: Vec<i64> = values.into_iter().map(|e| e.mod_floor(&modulus)).collect();
        let table = CocycleTable { group, values, modulus };
        table.check_identity()?;
        Ok(table)
    }

    pub fn trivial(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        CocycleTable { group, values: vec![0; n * n], modulus: 1 }
    }

    /// `τ(u) τ(v) τ(uv)^-1`.
    pub fn coboundary(group: Arc<FiniteGroup>, tau: &[i64], modulus: i64) -> Result<Self, TwistedError> {
        let n = group.order();
        if tau.len() != n {
            return Err(TwistedError::WrongLength { expected: n, got: tau.len() });
        }
        let mut values = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                values.push(tau[u] + tau[v] - tau[group.mul(u, v)]);
            }
        }
        Self::new(group, values, modulus)
    }

    fn check_identity(&self) -> Result<(), TwistedError> {
        let g = &self.group;
        let n = g.order();
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    let left = self.get(u, v) + self.get(g.mul(u, v), w);
                    let right = self.get(u, g.mul(v, w)) + self.get(v, w);
                    if (left - right) % self.modulus != 0 {
                        return Err(TwistedError::CocycleIdentity { u, v, w });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn get(&self, u: Element, v: Element) -> i64 {
        self.values[u * self.group.order() + v]
    }

    /// Pointwise product, over the lcm of the moduli.
    pub fn mul(&self, other: &CocycleTable) -> Result<CocycleTable, TwistedError> {
        if !Arc::ptr_eq(&self.group, &other.group) && self.group.spec() != other.group.spec() {
            return Err(TwistedError::GroupMismatch(self.group.spec().into(), other.group.spec().into()));
        }
        let m = self.modulus.lcm(&other.modulus);
        let (a, b) = (m / self.modulus, m / other.modulus);
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x * a + y * b).collect();
        CocycleTable::new(self.group.clone(), values, m)
    }

    /// `(u, v) ↦ σ(u, v) σ(v, u)^-1` as exponents mod `M`.
    pub fn alternating_table(&self) -> Vec<i64> {
        let n = self.group.order();
        let mut out = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                out.push((self.get(u, v) - self.get(v, u)).mod_floor(&self.modulus));
            }
        }
        out
    }

    pub fn is_trivial_table(&self) -> bool {
        self.values.iter().all(|&e| e == 0)
    }
}

/// `σ(k, l) = Π_{i<j} β(g_j, g_i)^{k_j l_i}` on coordinate vectors.
pub fn cocycle_from_bicharacter(beta: &Bicharacter) -> Result<CocycleTable, TwistedError> {
    let group = Arc::new(beta.group()?);
    let n = group.order();
    let coords: Vec<Vec<i64>> = (0..n)
        .map(|g| {
            group
                .coordinates(g)
                .expect("abelian product has coordinates")
                .into_iter()
                .map(|c| c as i64)
                .collect()
        })
        .collect();
    let m = beta.factors.len();
    let mut values = Vec::with_capacity(n * n);
    for k in &coords {
        for l in &coords {
            let mut e = 0i64;
            for i in 0..m {
                for j in i + 1..m {
                    e += beta.exps[j][i] * k[j] * l[i];
                }
            }
            values.push(e);
        }
    }
    CocycleTable::new(group, values, beta.modulus)
}

fn require_abelian(group: &FiniteGroup) -> Result<(), TwistedError> {
    if group.is_abelian() {
        Ok(())
    } else {
        Err(TwistedError::NotAbelian(group.spec().to_string()))
    }
}

/// `β(g_i, g_j) = σ(g_i, g_j) σ(g_j, g_i)^-1` on the coordinate generators.
pub fn bicharacter_of_cocycle(sigma: &CocycleTable) -> Result<Bicharacter, TwistedError> {
    let group = &sigma.group;
    require_abelian(group)?;
    let factors = group
        .cyclic_factors()
        .ok_or_else(|| TwistedError::NoCoordinates(group.spec().to_string()))?
        .to_vec();
    let m = factors.len();
    let gens: Vec<Element> = (0..m)
        .map(|i| {
            let mut c = vec![0; m];
            c[i] = 1;
            group.from_coordinates(&c).expect("unit vector")
        })
        .collect();
    let exps = (0..m)
        .map(|i| (0..m).map(|j| sigma.get(gens[i], gens[j]) - sigma.get(gens[j], gens[i])).collect())
        .collect();
    Bicharacter::new(factors.into_iter().map(|n| n as u64).collect(), exps, sigma.modulus)
}

/// Equal alternating bicharacters, compared as roots of unity.
pub fn cohomologous_abelian(s1: &CocycleTable, s2: &CocycleTable) -> Result<bool, TwistedError> {
    if s1.group.order() != s2.group.order() || s1.group.spec() != s2.group.spec() {
        return Err(TwistedError::GroupMismatch(s1.group.spec().into(), s2.group.spec().into()));
    }
    require_abelian(&s1.group)?;
    let (a, b) = (s1.alternating_table(), s2.alternating_table());
    let (m1, m2) = (s1.modulus, s2.modulus);
    Ok(a.iter().zip(&b).all(|(x, y)| same_turn(*x, m1, *y, m2)))
}

fn same_turn(x: i64, m1: i64, y: i64, m2: i64) -> bool {
    (x * m2 - y * m1).mod_floor(&(m1 * m2)) == 0
}

/// `F^σ H` with basis `u_h` in degree `h` and `u_g u_h = σ(g, h) u_{gh}`.
pub fn build_twisted_algebra(sigma: &CocycleTable) -> Result<GradedAlgebra, TwistedError> {
    let group = sigma.group.clone();
    let n = group.order();
    let names = (0..n).map(|h| format!("u[{}]", group.name(h))).collect();
    let degrees = (0..n).map(Label::Element).collect();
    let mut products = std::collections::BTreeMap::new();
    for g in 0..n {
        for h in 0..n {
            products.insert((g, h), vec![(group.mul(g, h), Scalar::root(sigma.get(g, h), sigma.modulus))]);
        }
    }
    Ok(GradedAlgebra::new(LabelDomain::Finite(group), names, degrees, products)?)
}

/// `rad β` as elements of [`Bicharacter::group`], and the dimension of the
/// center of the twisted group algebra.
pub fn radical_and_center(beta: &Bicharacter) -> Result<(Vec<Element>, usize), TwistedError> {
    let group = beta.group()?;
    let coords: Vec<Vec<i64>> = group
        .elements()
        .map(|g| group.coordinates(g).unwrap().into_iter().map(|c| c as i64).collect())
        .collect();
    let rad: Vec<Element> = group
        .elements()
        .filter(|&g| coords.iter().all(|h| beta.eval(&coords[g], h) == 0))
        .collect();
    let dim = rad.len();
    Ok((rad, dim))
}

/// Largest order of an element of `rad β`.
pub fn max_central_order(beta: &Bicharacter) -> Result<usize, TwistedError> {
    let group = beta.group()?;
    let (rad, _) = radical_and_center(beta)?;
    Ok(rad.iter().map(|&g| group.element_order(g)).max().unwrap_or(1))
}

/// Block sizes of the semisimple twisted group algebra: `|rad β|` blocks
/// of size `sqrt(|H| / |rad β|)`.
pub fn wedderburn_shape(beta: &Bicharacter) -> Result<Vec<usize>, TwistedError> {
    let order = beta.group()?.order();
    let (rad, _) = radical_and_center(beta)?;
    let quotient = order / rad.len();
    let side = (quotient as f64).sqrt().round() as usize;
    assert_eq!(side * side, quotient, "|H / rad β| must be a square");
    Ok(vec![side; rad.len()])
}

/// Data of `M_n(F) ⊗ F^σ H` graded by `deg(e_ij ⊗ u_h) = g_i h g_j^-1`.
#[derive(Debug, Clone)]
pub struct MGammaSigma {
    ambient: Arc<FiniteGroup>,
    gamma: Vec<Element>,
    sigma: CocycleTable,
    embedding: Vec<Element>,
}

impl MGammaSigma {
    /// `embedding[h]` is the image in `ambient` of element `h` of the
    /// cocycle's group.
    pub fn new(
        ambient: Arc<FiniteGroup>,
        gamma: Vec<Element>,
        sigma: CocycleTable,
        embedding: Vec<Element>,
    ) -> Result<Self, TwistedError> {
        if gamma.is_empty() {
            return Err(TwistedError::WrongLength { expected: 1, got: 0 });
        }
        for (index, &g) in gamma.iter().enumerate() {
            if g >= ambient.order() {
                return Err(TwistedError::BadTuple { index, group: ambient.spec().to_string() });
            }
        }
        let h = &sigma.group;
        if embedding.len() != h.order() || embedding.iter().any(|&e| e >= ambient.order()) {
            return Err(TwistedError::BadEmbedding);
        }
        let distinct: std::collections::BTreeSet<_> = embedding.iter().collect();
        if distinct.len() != embedding.len() {
            return Err(TwistedError::BadEmbedding);
        }
        for a in h.elements() {
            for b in h.elements() {
                if embedding[h.mul(a, b)] != ambient.mul(embedding[a], embedding[b]) {
                    return Err(TwistedError::BadEmbedding);
                }
            }
        }
        Ok(MGammaSigma { ambient, gamma, sigma, embedding })
    }

    /// `H` trivial: the elementary grading by `gamma`.
    pub fn elementary(ambient: Arc<FiniteGroup>, gamma: Vec<Element>) -> Result<Self, TwistedError> {
        let sigma = CocycleTable::trivial(Arc::new(FiniteGroup::trivial()));
        Self::new(ambient, gamma, sigma, vec![0])
    }

    /// `n = 1`, `H = G`: the twisted group algebra with its standard grading.
    pub fn twisted(sigma: CocycleTable) -> Self {
        let group = sigma.group.clone();
        let embedding = group.elements().collect();
        Self::new(group, vec![0], sigma, embedding).expect("identity embedding")
    }

    pub fn n(&self) -> usize {
        self.gamma.len()
    }

    pub fn ambient(&self) -> &Arc<FiniteGroup> {
        &self.ambient
    }

    pub fn gamma(&self) -> &[Element] {
        &self.gamma
    }

    pub fn sigma(&self) -> &CocycleTable {
        &self.sigma
    }

    pub fn subgroup(&self) -> &Arc<FiniteGroup> {
        &self.sigma.group
    }

    pub fn embedding(&self) -> &[Element] {
        &self.embedding
    }

    /// `g_i h g_j^-1` in the ambient group.
    pub fn degree(&self, i: usize, j: usize, h: Element) -> Element {
        let g = &self.ambient;
        g.mul(g.mul(self.gamma[i], self.embedding[h]), g.inv(self.gamma[j]))
    }

    fn basis_index(&self, i: usize, j: usize, h: Element) -> usize {
        (i * self.n() + j) * self.subgroup().order() + h
    }
}

/// The algebra with basis `e_ij ⊗ u_h` and its support table.
pub fn build_m_gamma_sigma(spec: &MGammaSigma) -> Result<(GradedAlgebra, SupportTable), TwistedError> {
    let n = spec.n();
    let h = spec.subgroup().clone();
    let k = h.order();
    let mut names = Vec::with_capacity(n * n * k);
    let mut degrees = Vec::with_capacity(n * n * k);
    for i in 0..n {
        for j in 0..n {
            for x in 0..k {
                names.push(format!("e{}{}*u[{}]", i + 1, j + 1, h.name(x)));
                degrees.push(Label::Element(spec.degree(i, j, x)));
            }
        }
    }
    let mut products = std::collections::BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                for a in 0..k {
                    for b in 0..k {
                        let scalar = Scalar::root(spec.sigma.get(a, b), spec.sigma.modulus);
                        products.insert(
                            (spec.basis_index(i, j, a), spec.basis_index(j, l, b)),
                            vec![(spec.basis_index(i, l, h.mul(a, b)), scalar)],
                        );
                    }
                }
            }
        }
    }
    let algebra = GradedAlgebra::new(LabelDomain::Finite(spec.ambient.clone()), names, degrees, products)?;
    let (table, _) = algebra.support_table();
    Ok((algebra, table))
}

/// A witness `(α, π, t)` for Condition (*): `alpha[h]` is `α(h)`,
/// `pi[i]` is `π(i)`, `t[i]` is `t_i` (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarWitness {
    pub alpha: Vec<Element>,
    pub pi: Vec<usize>,
    pub t: Vec<Element>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StarOutcome {
    Satisfied(StarWitness),
    Unsatisfied,
}

impl StarOutcome {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, StarOutcome::Satisfied(_))
    }
}

pub fn condition_star(a: &MGammaSigma, b: &MGammaSigma) -> Result<StarOutcome, TwistedError> {
    condition_star_bounded(a, b, DEFAULT_STAR_BOUND)
}

/// Searches isomorphisms `α: H1 -> H2` with matching cohomology, then
/// permutations `π` and translations `t` position by position, rejecting
/// a partial assignment as soon as the degree coincidences disagree.
pub fn condition_star_bounded(a: &MGammaSigma, b: &MGammaSigma, bound: u64) -> Result<StarOutcome, TwistedError> {
    let n = a.n();
    if n != b.n() || a.subgroup().order() != b.subgroup().order() {
        return Ok(StarOutcome::Unsatisfied);
    }
    let (h1, h2) = (a.subgroup(), b.subgroup());
    for s in [&a.sigma, &b.sigma] {
        if !s.group.is_abelian() && !s.is_trivial_table() {
            return Err(TwistedError::NotAbelian(s.group.spec().to_string()));
        }
    }
    let size = (1..=n as u64)
        .product::<u64>()
        .saturating_mul((h2.order() as u64).saturating_pow(n as u32));
    if size > bound {
        return Err(TwistedError::BoundExceeded { size, bound });
    }
    let alt1 = a.sigma.alternating_table();
    let alt2 = b.sigma.alternating_table();
    let k = h1.order();
    let mut found = None;
    let _ = for_each_isomorphism(h1, h2, |alpha| {
        let cohomologous = (0..k).all(|x| {
            (0..k).all(|y| {
                same_turn(
                    alt1[x * k + y],
                    a.sigma.modulus,
                    alt2[alpha[x] * k + alpha[y]],
                    b.sigma.modulus,
                )
            })
        });
        if !cohomologous {
            return ControlFlow::Continue(());
        }
        let mut search = StarSearch {
            a,
            b,
            alpha,
            pi: Vec::with_capacity(n),
            t: Vec::with_capacity(n),
            used: vec![false; n],
        };
        if search.extend() {
            found = Some(StarWitness { alpha: alpha.to_vec(), pi: search.pi, t: search.t });
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    match found {
        Some(w) => {
            assert!(verify_star_witness(a, b, &w), "condition (*) witness failed re-verification");
            Ok(StarOutcome::Satisfied(w))
        }
        None => Ok(StarOutcome::Unsatisfied),
    }
}

struct StarSearch<'a> {
    a: &'a MGammaSigma,
    b: &'a MGammaSigma,
    alpha: &'a [Element],
    pi: Vec<usize>,
    t: Vec<Element>,
    used: Vec<bool>,
}

impl StarSearch<'_> {
    fn extend(&mut self) -> bool {
        let n = self.a.n();
        if self.pi.len() == n {
            return true;
        }
        for p in 0..n {
            if self.used[p] {
                continue;
            }
            for t in self.b.subgroup().elements() {
                self.pi.push(p);
                self.t.push(t);
                self.used[p] = true;
                if star_consistent(self.a, self.b, self.alpha, &self.pi, &self.t) && self.extend() {
                    return true;
                }
                self.used[p] = false;
                self.pi.pop();
                self.t.pop();
            }
        }
        false
    }
}

/// The degree-coincidence iff restricted to the first `pi.len()` indices.
fn star_consistent(a: &MGammaSigma, b: &MGammaSigma, alpha: &[Element], pi: &[usize], t: &[Element]) -> bool {
    let m = pi.len();
    let h2 = b.subgroup();
    let g2 = b.ambient();
    let mut forward: HashMap<Element, Element> = HashMap::new();
    let mut backward: HashMap<Element, Element> = HashMap::new();
    for i in 0..m {
        for j in 0..m {
            for h in a.subgroup().elements() {
                let d1 = a.degree(i, j, h);
                let inner = h2.mul(h2.mul(t[i], alpha[h]), h2.inv(t[j]));
                let d2 = g2.mul(g2.mul(b.gamma[pi[i]], b.embedding[inner]), g2.inv(b.gamma[pi[j]]));
                if *forward.entry(d1).or_insert(d2) != d2 || *backward.entry(d2).or_insert(d1) != d1 {
                    return false;
                }
            }
        }
    }
    true
}

/// Full check of a witness: `α` an isomorphism with matching alternating
/// tables, `π` a permutation, and equal degree coincidences.
pub fn verify_star_witness(a: &MGammaSigma, b: &MGammaSigma, w: &StarWitness) -> bool {
    let n = a.n();
    let (h1, h2) = (a.subgroup(), b.subgroup());
    if b.n() != n || w.pi.len() != n || w.t.len() != n || w.alpha.len() != h1.order() || h1.order() != h2.order() {
        return false;
    }
    let mut seen = vec![false; n];
    for &p in &w.pi {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return false;
        }
    }
    if w.t.iter().any(|&x| x >= h2.order()) || w.alpha.iter().any(|&x| x >= h2.order()) {
        return false;
    }
    let image: std::collections::BTreeSet<_> = w.alpha.iter().collect();
    if image.len() != h1.order() {
        return false;
    }
    let k = h1.order();
    for x in 0..k {
        for y in 0..k {
            if w.alpha[h1.mul(x, y)] != h2.mul(w.alpha[x], w.alpha[y]) {
                return false;
            }
        }
    }
    let (alt1, alt2) = (a.sigma.alternating_table(), b.sigma.alternating_table());
    if !(a.sigma.is_trivial_table() && b.sigma.is_trivial_table()) {
        if !(h1.is_abelian() && h2.is_abelian()) {
            return false;
        }
        for x in 0..k {
            for y in 0..k {
                if !same_turn(alt1[x * k + y], a.sigma.modulus, alt2[w.alpha[x] * k + w.alpha[y]], b.sigma.modulus) {
                    return false;
                }
            }
        }
    }
    let positions: Vec<(usize, usize, Element)> = (0..n)
        .flat_map(|i| (0..n).flat_map(move |j| (0..k).map(move |h| (i, j, h))))
        .collect();
    let d1: Vec<Vec<Element>> = vec![positions.iter().map(|&(i, j, h)| a.degree(i, j, h)).collect()];
    let g2 = b.ambient();
    let d2: Vec<Vec<Element>> = vec![positions
        .iter()
        .map(|&(i, j, h)| {
            let inner = h2.mul(h2.mul(w.t[i], w.alpha[h]), h2.inv(w.t[j]));
            g2.mul(g2.mul(b.gamma[w.pi[i]], b.embedding[inner]), g2.inv(b.gamma[w.pi[j]]))
        })
        .collect()];
    coincidence_pattern(&d1) == coincidence_pattern(&d2)
}

/// Smallest prime `p = 1 mod m` below `10^6`.
pub fn prime_one_mod(m: i64) -> Result<i64, TwistedError> {
    let is_prime = |p: i64| p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0);
    (1..)
        .map(|k| k * m + 1)
        .take_while(|&p| p < 1_000_000)
        .find(|&p| is_prime(p))
        .ok_or(TwistedError::NoPrime(m))
}

fn pow_mod(mut b: i64, mut e: i64, p: i64) -> i64 {
    let mut r = 1;
    b = b.mod_floor(&p);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn primitive_root_of_unity(m: i64, p: i64) -> i64 {
    let mut primes = Vec::new();
    let mut rest = m;
    let mut d = 2;
    while d * d <= rest {
        if rest % d == 0 {
            primes.push(d);
            while rest % d == 0 {
                rest /= d;
            }
        }
        d += 1;
    }
    if rest > 1 {
        primes.push(rest);
    }
    (2..p)
        .map(|x| pow_mod(x, (p - 1) / m, p))
        .find(|&w| primes.iter().all(|&q| pow_mod(w, m / q, p) != 1))
        .unwrap_or(1)
}

/// Row-echelon span over `F_p`.
struct Span {
    p: i64,
    rows: Vec<(usize, Vec<i64>)>,
}

impl Span {
    fn reduce(&self, v: &mut [i64]) {
        for (pivot, row) in &self.rows {
            let c = v[*pivot];
            if c != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = (*x - c * r).mod_floor(&self.p);
                }
            }
        }
    }

    fn insert(&mut self, mut v: Vec<i64>) -> bool {
        self.reduce(&mut v);
        let Some(pivot) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = pow_mod(v[pivot], self.p - 2, self.p);
        for x in v.iter_mut() {
            *x = *x * inv % self.p;
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[pivot];
            if c != 0 {
                for (x, r) in row.iter_mut().zip(&v) {
                    *x = (*x - c * r).mod_floor(&self.p);
                }
            }
        }
        self.rows.push((pivot, v));
        true
    }
}

/// Whether the module with basis `v_{i,h}` in degree `g_i h` and action
/// `(e_jk ⊗ u_g) v_{i,h} = δ_{ki} σ(g,h) v_{j,gh}` has no proper nonzero
/// graded submodule, computed over `F_p` with `p = 1 mod M`. Every nonzero
/// vector of a homogeneous component is tried when the component has at
/// most 4096 lines; otherwise its basis vectors are, which suffices since
/// `e_ii ⊗ u_1` isolates them.
pub fn is_graded_simple_module(spec: &MGammaSigma) -> Result<bool, TwistedError> {
    let modulus = spec.sigma.modulus.max(1);
    let p = prime_one_mod(modulus)?;
    let omega = primitive_root_of_unity(modulus, p);
    let n = spec.n();
    let h = spec.subgroup().clone();
    let k = h.order();
    let dim = n * k;
    let index = |i: usize, x: Element| i * k + x;
    let act = |j: usize, kk: usize, g: Element, v: &[i64]| -> Vec<i64> {
        let mut out = vec![0; dim];
        for x in 0..k {
            let c = v[index(kk, x)];
            if c != 0 {
                let s = pow_mod(omega, spec.sigma.get(g, x), p);
                out[index(j, h.mul(g, x))] = c * s % p;
            }
        }
        out
    };
    let generates_all = |w: Vec<i64>| -> bool {
        let mut span = Span { p, rows: Vec::new() };
        span.insert(w);
        let mut frontier = 0;
        while frontier < span.rows.len() {
            let v = span.rows[frontier].1.clone();
            frontier += 1;
            for j in 0..n {
                for kk in 0..n {
                    for g in 0..k {
                        span.insert(act(j, kk, g, &v));
                    }
                }
            }
        }
        span.rows.len() == dim
    };
    let mut components: HashMap<Element, Vec<usize>> = HashMap::new();
    for i in 0..n {
        for x in 0..k {
            let d = spec.ambient.mul(spec.gamma[i], spec.embedding[x]);
            components.entry(d).or_default().push(index(i, x));
        }
    }
    let mut keys: Vec<_> = components.keys().copied().collect();
    keys.sort_unstable();
    for d in keys {
        let basis = &components[&d];
        let lines = (p as f64).powi(basis.len() as i32);
        if lines <= 4096.0 {
            for coeffs in projective_points(basis.len(), p) {
                let mut w = vec![0; dim];
                for (&b, c) in basis.iter().zip(coeffs) {
                    w[b] = c;
                }
                if !generates_all(w) {
                    return Ok(false);
                }
            }
        } else {
            for &b in basis {
                let mut w = vec![0; dim];
                w[b] = 1;
                if !generates_all(w) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Nonzero vectors of `F_p^d` with first nonzero coordinate 1.
fn projective_points(d: usize, p: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for lead in 0..d {
        let free = d - lead - 1;
        let count = (p as usize).pow(free as u32);
        for mut code in 0..count {
            let mut v = vec![0; d];
            v[lead] = 1;
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = (code % p as usize) as i64;
                code /= p as usize;
            }
            out.push(v);
        }
    }
    out
}
