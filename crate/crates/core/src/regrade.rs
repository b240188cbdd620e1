//! Regradings by finite groups: certificates, the abelian fast path, the
//! Sidon-type constructions, the classifier for matrices of size at most 3,
//! the budgeted quotient search, padding and the hereditary check.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::coset::{coset_enumerate, CosetOutcome, DEFAULT_MAX_COSETS};
use crate::fingrp::{search_homomorphisms, Element, FiniteGroup, GroupError, GroupSpec};
use crate::grading::{
    enumerate_coarsenings_bounded, quotient_table, CoincidencePattern, ElementaryGrading, GradingError, Label,
    LabelDomain, SupportTable, DEFAULT_COARSENING_BOUND,
};
use crate::universal::universal_presentation;
use crate::words::{eval_word, FreeGroupPresentation, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegradeError {
    #[error("expected an image for each of the {expected} symbols, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("image {image} of symbol {symbol} is not an element of {group}")]
    ElementOutOfRange { symbol: usize, image: Element, group: String },
    #[error("symbols {a} ({a_label}) and {b} ({b_label}) collide at {image}")]
    NotInjective {
        a: usize,
        b: usize,
        a_label: String,
        b_label: String,
        image: String,
    },
    #[error("psi({s}) psi({t}) != psi({p}) for the product {s} * {t} = {p}")]
    NotMultiplicative { s: usize, t: usize, p: usize },
    #[error("unit symbol {0} is not sent to the identity")]
    UnitNotIdentity(usize),
    #[error("positions ({i},{j}) and ({k},{l}) share a degree but get different target degrees")]
    PatternMismatch { i: usize, j: usize, k: usize, l: usize },
    #[error("size {0} exceeds 3; use search_finite_regrading")]
    TooLarge(usize),
    #[error("expected integer-vector labels, got domain {0}")]
    NotFreeAbelian(String),
    #[error("empty candidate ladder")]
    EmptyLadder,
    #[error(transparent)]
    Grading(#[from] GradingError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Verified,
    NamedCase(String),
    Abelian,
    Sidon,
    Search,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Verified => f.write_str("verified"),
            Provenance::NamedCase(name) => write!(f, "case:{name}"),
            Provenance::Abelian => f.write_str("abelian"),
            Provenance::Sidon => f.write_str("sidon"),
            Provenance::Search => f.write_str("search"),
        }
    }
}

/// A support map into a finite group that is injective, multiplicative on
/// interacting pairs and sends the unit to the identity.
#[derive(Debug, Clone)]
pub struct RegradingCertificate {
    pub target: Arc<FiniteGroup>,
    pub psi: Vec<Element>,
    pub provenance: Provenance,
}

impl RegradingCertificate {
    fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// `ψ` as symbol label, element name pairs.
    pub fn named_pairs(&self, table: &SupportTable) -> Vec<(String, String)> {
        self.psi
            .iter()
            .enumerate()
            .map(|(s, &e)| (table.label(s).to_string(), self.target.name(e)))
            .collect()
    }

    /// The grading of the same matrix size with `e_ij` in degree
    /// `ψ(deg e_ij)`. `grading` must be the one the certificate was built for.
    pub fn regraded(&self, grading: &ElementaryGrading) -> ElementaryGrading {
        let support = grading.support();
        let n = grading.n();
        let tuple = (0..n)
            .map(|i| Label::Element(self.psi[support.position_symbol[i * n + n - 1]]))
            .collect();
        ElementaryGrading::new(LabelDomain::Finite(self.target.clone()), tuple)
            .expect("certificate images lie in the target")
    }
}

pub fn verify_regrading(
    table: &SupportTable,
    target: &Arc<FiniteGroup>,
    psi: &[Element],
) -> Result<RegradingCertificate, RegradeError> {
    if psi.len() != table.len() {
        return Err(RegradeError::WrongLength { expected: table.len(), got: psi.len() });
    }
    for (symbol, &image) in psi.iter().enumerate() {
        if image >= target.order() {
            return Err(RegradeError::ElementOutOfRange {
                symbol,
                image,
                group: target.spec().to_string(),
            });
        }
    }
    let mut seen: BTreeMap<Element, usize> = BTreeMap::new();
    for (s, &image) in psi.iter().enumerate() {
        if let Some(&a) = seen.get(&image) {
            return Err(RegradeError::NotInjective {
                a,
                b: s,
                a_label: table.label(a).to_string(),
                b_label: table.label(s).to_string(),
                image: target.name(image),
            });
        }
        seen.insert(image, s);
    }
    for (&(s, t), &p) in table.products() {
        if target.mul(psi[s], psi[t]) != psi[p] {
            return Err(RegradeError::NotMultiplicative { s, t, p });
        }
    }
    if let Some(u) = table.unit() {
        if psi[u] != target.identity() {
            return Err(RegradeError::UnitNotIdentity(u));
        }
    }
    Ok(RegradingCertificate {
        target: target.clone(),
        psi: psi.to_vec(),
        provenance: Provenance::Verified,
    })
}

/// Certificate sending the degree of each `e_ij` to `t_i t_j^-1`.
pub fn certify_tuple(
    grading: &ElementaryGrading,
    target: &Arc<FiniteGroup>,
    tuple: &[Element],
) -> Result<RegradingCertificate, RegradeError> {
    let n = grading.n();
    if tuple.len() != n {
        return Err(GradingError::WrongLength { expected: n, got: tuple.len() }.into());
    }
    let support = grading.support();
    let mut psi: Vec<Option<(Element, usize)>> = vec![None; support.table.len()];
    for i in 0..n {
        for j in 0..n {
            let pos = i * n + j;
            let image = target.div(tuple[i], tuple[j]);
            match psi[support.position_symbol[pos]] {
                None => psi[support.position_symbol[pos]] = Some((image, pos)),
                Some((old, first)) if old != image => {
                    return Err(RegradeError::PatternMismatch {
                        i: first / n,
                        j: first % n,
                        k: i,
                        l: j,
                    })
                }
                Some(_) => {}
            }
        }
    }
    let psi: Vec<Element> = psi.into_iter().map(|x| x.expect("every symbol occurs").0).collect();
    verify_regrading(&support.table, target, &psi)
}

/// Replaces `Z` by `Z/N` in every coordinate with `N = 2 * spread + 2`,
/// where the spread is the range of that coordinate over the tuple.
pub fn abelian_regrade(grading: &ElementaryGrading) -> Result<RegradingCertificate, RegradeError> {
    let rank = match grading.domain() {
        LabelDomain::FreeAbelian { rank } => *rank,
        other => return Err(RegradeError::NotFreeAbelian(other.to_string())),
    };
    let vectors: Vec<&Vec<i64>> = grading
        .tuple()
        .iter()
        .map(|l| match l {
            Label::Vector(v) => v,
            _ => unreachable!("free abelian domain holds vectors"),
        })
        .collect();
    let mut kept = Vec::new();
    let mut moduli = Vec::new();
    for c in 0..rank {
        let min = vectors.iter().map(|v| v[c]).min().unwrap_or(0);
        let max = vectors.iter().map(|v| v[c]).max().unwrap_or(0);
        let spread = max - min;
        if spread > 0 {
            kept.push(c);
            moduli.push((2 * spread + 2) as usize);
        }
    }
    let target = Arc::new(FiniteGroup::abelian(&moduli));
    let tuple: Vec<Element> = vectors
        .iter()
        .map(|v| {
            let coords: Vec<usize> = kept
                .iter()
                .zip(&moduli)
                .map(|(&c, &m)| v[c].rem_euclid(m as i64) as usize)
                .collect();
            if moduli.is_empty() {
                0
            } else {
                target.from_coordinates(&coords).expect("coordinates match the factors")
            }
        })
        .collect();
    Ok(certify_tuple(grading, &target, &tuple)?.with_provenance(Provenance::Abelian))
}

/// The transpositions `(1, i+1)` in `S_{n+1}` and the powers `2, 4, ..., 2^n`
/// in `Z/2^{n+1}`, both giving the all-distinct pattern on `M_n`.
pub fn sidon_regrades(n: usize) -> (ElementaryGrading, ElementaryGrading) {
    assert!(n >= 1, "matrix size must be at least 1");
    assert!(n < 62, "2^(n+1) must fit in a machine word");
    let degree = n + 1;
    let perms: Vec<Label> = (1..=n)
        .map(|i| {
            let mut p: Vec<u16> = (0..degree as u16).collect();
            p.swap(0, i);
            Label::Perm(p)
        })
        .collect();
    let sym = ElementaryGrading::new(LabelDomain::Permutations { degree }, perms).expect("transpositions");
    let modulus = 1usize << (n + 1);
    let cyc = ElementaryGrading::new(
        LabelDomain::finite(FiniteGroup::cyclic(modulus)),
        (1..=n).map(|i| Label::Element(1usize << i)).collect(),
    )
    .expect("powers of two below the modulus");
    let generic = CoincidencePattern::all_distinct(n);
    assert_eq!(sym.coincidence_pattern(), generic, "transposition tuple is not all-distinct");
    assert_eq!(cyc.coincidence_pattern(), generic, "power-of-two tuple is not all-distinct");
    (sym, cyc)
}

/// Which branch of the small-size classification applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SmallCase {
    Size1,
    Size2Trivial,
    Size2Involution,
    Size2Generic,
    AbelianFallback,
    Case(u8),
}

impl fmt::Display for SmallCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmallCase::Size1 => f.write_str("n=1"),
            SmallCase::Size2Trivial => f.write_str("n=2, g=1"),
            SmallCase::Size2Involution => f.write_str("n=2, g=g^-1"),
            SmallCase::Size2Generic => f.write_str("n=2, g!=g^-1"),
            SmallCase::AbelianFallback => f.write_str("abelian-fallback"),
            SmallCase::Case(k) => write!(f, "case ({k})"),
        }
    }
}

/// The case of the pair `g = g1 g2^-1`, `h = g2 g3^-1`.
pub fn small_case(domain: &LabelDomain, g: &Label, h: &Label) -> SmallCase {
    if cyclic_witness(domain, g, h).is_some() {
        return SmallCase::AbelianFallback;
    }
    let gh = domain.mul(g, h);
    let a = gh == domain.inv(&gh);
    let b = *g == domain.inv(g);
    let c = *h == domain.inv(h);
    SmallCase::Case(match (a, b, c) {
        (false, false, false) => 1,
        (true, false, false) => 2,
        (true, true, false) => 3,
        (true, false, true) => 4,
        (true, true, true) => 5,
        (false, true, false) => 6,
        (false, false, true) => 7,
        (false, true, true) => 8,
    })
}

/// `(r, a, b)` with `g = r^a`, `h = r^b`, `r ∈ {g, h}`, `|a|, |b| <= 2`,
/// when `g` lies in `{1, h, h^-1, gh, h^-1 g^-1}` or `h` in
/// `{1, g, g^-1, gh, h^-1 g^-1}`.
fn cyclic_witness(domain: &LabelDomain, g: &Label, h: &Label) -> Option<(Label, i64, i64)> {
    let id = domain.identity();
    let gh = domain.mul(g, h);
    let ghi = domain.inv(&gh);
    let (gi, hi) = (domain.inv(g), domain.inv(h));
    let degenerate = [&id, h, &hi, &gh, &ghi].contains(&g) || [&id, g, &gi, &gh, &ghi].contains(&h);
    if !degenerate {
        return None;
    }
    for b in -2..=2 {
        if domain.pow(g, b) == *h {
            return Some((g.clone(), 1, b));
        }
    }
    for a in -2..=2 {
        if domain.pow(h, a) == *g {
            return Some((h.clone(), a, 1));
        }
    }
    unreachable!("degenerate pairs generate a cyclic group with a small exponent")
}

/// The case name and the prescribed regrading for a grading on `M_n`,
/// `n <= 3`.
pub fn classify_small(grading: &ElementaryGrading) -> Result<(SmallCase, RegradingCertificate), RegradeError> {
    let domain = grading.domain();
    let t = grading.tuple();
    let (case, target, tuple): (SmallCase, FiniteGroup, Vec<Element>) = match grading.n() {
        1 => (SmallCase::Size1, FiniteGroup::trivial(), vec![0]),
        2 => {
            let g = domain.div(&t[0], &t[1]);
            if g == domain.identity() {
                (SmallCase::Size2Trivial, FiniteGroup::trivial(), vec![0, 0])
            } else if g == domain.inv(&g) {
                (SmallCase::Size2Involution, FiniteGroup::cyclic(2), vec![0, 1])
            } else {
                (SmallCase::Size2Generic, FiniteGroup::cyclic(3), vec![1, 0])
            }
        }
        3 => {
            let g = domain.div(&t[0], &t[1]);
            let h = domain.div(&t[1], &t[2]);
            let case = small_case(domain, &g, &h);
            let (target, pg, ph) = match case {
                SmallCase::AbelianFallback => {
                    let (r, a, b) = cyclic_witness(domain, &g, &h).expect("fallback has a witness");
                    let spread = [a + b, b, 0].iter().max().unwrap() - [a + b, b, 0].iter().min().unwrap();
                    let cap = (2 * spread + 2) as usize;
                    let m = domain.element_order(&r, cap).unwrap_or(cap);
                    let rm = |k: i64| k.rem_euclid(m as i64) as usize;
                    (FiniteGroup::cyclic(m), rm(a), rm(b))
                }
                SmallCase::Case(k) => case_target(k),
                _ => unreachable!(),
            };
            let gh = target.mul(pg, ph);
            let id = target.identity();
            (case, target, vec![gh, ph, id])
        }
        n => return Err(RegradeError::TooLarge(n)),
    };
    let target = Arc::new(target);
    let cert = certify_tuple(grading, &target, &tuple)?.with_provenance(Provenance::NamedCase(case.to_string()));
    Ok((case, cert))
}

fn case_target(case: u8) -> (FiniteGroup, Element, Element) {
    let s3 = || FiniteGroup::symmetric(3);
    let el = |g: &FiniteGroup, name: &str| g.element_by_name(name).expect("named element");
    match case {
        1 => {
            let s4 = FiniteGroup::symmetric(4);
            let (a, b, c) = (el(&s4, "(12)"), el(&s4, "(13)"), el(&s4, "(14)"));
            let (g, h) = (s4.div(a, b), s4.div(b, c));
            (s4, g, h)
        }
        2 => (FiniteGroup::cyclic(6), 1, 2),
        3 => {
            let g = s3();
            let (a, b) = (el(&g, "(12)"), el(&g, "(123)"));
            (g, a, b)
        }
        4 => {
            let g = s3();
            let (a, b) = (el(&g, "(123)"), el(&g, "(12)"));
            (g, a, b)
        }
        5 => {
            let v = FiniteGroup::abelian(&[2, 2]);
            let (a, b) = (v.from_coordinates(&[0, 1]).unwrap(), v.from_coordinates(&[1, 0]).unwrap());
            (v, a, b)
        }
        6 => (FiniteGroup::cyclic(6), 3, 1),
        7 => (FiniteGroup::cyclic(6), 1, 3),
        8 => {
            let g = s3();
            let (a, b) = (el(&g, "(12)"), el(&g, "(13)"));
            (g, a, b)
        }
        _ => panic!("no case {case}"),
    }
}

pub fn default_ladder() -> Vec<GroupSpec> {
    let mut ladder: Vec<GroupSpec> = (2..=12).map(GroupSpec::Cyclic).collect();
    let c = GroupSpec::Cyclic;
    ladder.extend([
        GroupSpec::Product(vec![c(2), c(2)]),
        GroupSpec::Product(vec![c(2), c(4)]),
        GroupSpec::Product(vec![c(2), c(6)]),
        GroupSpec::Symmetric(3),
        GroupSpec::Dihedral(4),
        GroupSpec::Dihedral(5),
        GroupSpec::Dihedral(6),
        GroupSpec::Symmetric(4),
        GroupSpec::Product(vec![c(2), GroupSpec::Symmetric(3)]),
        GroupSpec::Symmetric(5),
    ]);
    ladder
}

#[derive(Debug, Clone)]
pub struct SearchBudget {
    pub ladder: Vec<GroupSpec>,
    pub hom_limit: usize,
    /// Total search nodes over the whole ladder.
    pub node_limit: Option<u64>,
    /// Coset budget used by the hereditary check.
    pub max_cosets: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            ladder: default_ladder(),
            hom_limit: 1,
            node_limit: Some(5_000_000),
            max_cosets: DEFAULT_MAX_COSETS,
        }
    }
}

impl SearchBudget {
    pub fn with_ladder(ladder: Vec<GroupSpec>) -> Self {
        SearchBudget { ladder, ..Self::default() }
    }
}

/// What a failed search covered. Not a proof that no regrading exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotFoundReport {
    pub groups_tried: Vec<String>,
    pub nodes: u64,
    pub exhausted_budget: bool,
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found(RegradingCertificate),
    NotFound(NotFoundReport),
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&RegradingCertificate> {
        match self {
            SearchOutcome::Found(c) => Some(c),
            SearchOutcome::NotFound(_) => None,
        }
    }
}

/// Walks the ladder looking for a homomorphism from the universal group
/// that keeps all support symbols apart.
pub fn search_finite_regrading(table: &SupportTable, budget: &SearchBudget) -> Result<SearchOutcome, RegradeError> {
    let up = universal_presentation(table);
    search_through_presentation(table, up.presentation(), up.kappa(), budget)
}

/// Ladder search for a homomorphism from the group presented by `p` that
/// keeps the words `symbol_words` (one per symbol of `table`) apart; the
/// certificate sends each symbol to the image of its word. Every symbol
/// product must hold in the presented group for the result to verify.
pub fn search_through_presentation(
    table: &SupportTable,
    p: &FreeGroupPresentation,
    symbol_words: &[Word],
    budget: &SearchBudget,
) -> Result<SearchOutcome, RegradeError> {
    if budget.ladder.is_empty() {
        return Err(RegradeError::EmptyLadder);
    }
    if symbol_words.len() != table.len() {
        return Err(RegradeError::WrongLength { expected: table.len(), got: symbol_words.len() });
    }
    if table.len() <= 1 {
        let trivial = Arc::new(FiniteGroup::trivial());
        let cert = verify_regrading(table, &trivial, &vec![0; table.len()])?;
        return Ok(SearchOutcome::Found(cert.with_provenance(Provenance::Search)));
    }
    let mut separate = Vec::new();
    for u in 0..symbol_words.len() {
        for v in u + 1..symbol_words.len() {
            separate.push((symbol_words[u].clone(), symbol_words[v].clone()));
        }
    }
    let mut nodes = 0u64;
    let mut tried = Vec::new();
    for spec in &budget.ladder {
        let remaining = budget.node_limit.map(|l| l.saturating_sub(nodes));
        if remaining == Some(0) {
            return Ok(SearchOutcome::NotFound(NotFoundReport {
                groups_tried: tried,
                nodes,
                exhausted_budget: true,
            }));
        }
        let group = Arc::new(spec.build()?);
        tried.push(spec.to_string());
        if group.order() < table.len() {
            continue;
        }
        let outcome = search_homomorphisms(p, &group, &separate, budget.hom_limit.max(1), remaining);
        nodes += outcome.nodes;
        if let Some(hom) = outcome.homs.first() {
            let psi: Vec<Element> = symbol_words
                .iter()
                .map(|w| eval_word(w, hom.images(), &group).expect("words use presentation generators"))
                .collect();
            let cert = verify_regrading(table, &group, &psi)?;
            return Ok(SearchOutcome::Found(cert.with_provenance(Provenance::Search)));
        }
    }
    Ok(SearchOutcome::NotFound(NotFoundReport {
        groups_tried: tried,
        nodes,
        exhausted_budget: budget.node_limit.is_some_and(|l| nodes >= l),
    }))
}

/// Pads the tuple with copies of its last entry; the old support table
/// sits inside the new one.
pub fn extend_to_larger_matrix(grading: &ElementaryGrading, n: usize) -> Result<ElementaryGrading, RegradeError> {
    let padded = grading.extend_to(n)?;
    let (old, new) = (grading.support(), padded.support());
    let m = grading.n();
    let mut embed = vec![usize::MAX; old.table.len()];
    for i in 0..m {
        for j in 0..m {
            embed[old.position_symbol[i * m + j]] = new.position_symbol[i * n + j];
        }
    }
    for (&(s, t), &p) in old.table.products() {
        assert_eq!(
            new.table.product(embed[s], embed[t]),
            Some(embed[p]),
            "padding must keep the old products"
        );
    }
    Ok(padded)
}

#[derive(Debug, Clone)]
pub enum CoarseningStatus {
    Found(RegradingCertificate),
    /// The universal group of the quotient identifies more symbols than the
    /// partition does; the grading it defines is `saturated`.
    NotRealizable { saturated: Vec<usize> },
    NotFound(NotFoundReport),
}

#[derive(Debug, Clone)]
pub struct CoarseningReport {
    pub blocks: Vec<usize>,
    pub table: SupportTable,
    pub status: CoarseningStatus,
}

/// Runs the regrading search on every closed partition of the symbols.
/// Partitions whose quotient universal group glues further blocks are not
/// coarsenings of a grading and are reported as such.
pub fn hereditary_finite_check(
    table: &SupportTable,
    budget: &SearchBudget,
) -> Result<Vec<CoarseningReport>, RegradeError> {
    hereditary_finite_check_bounded(table, budget, DEFAULT_COARSENING_BOUND)
}

pub fn hereditary_finite_check_bounded(
    table: &SupportTable,
    budget: &SearchBudget,
    bound: usize,
) -> Result<Vec<CoarseningReport>, RegradeError> {
    let mut out = Vec::new();
    for (quotient, blocks) in enumerate_coarsenings_bounded(table, bound)? {
        let status = coarsening_status(&quotient, &blocks, budget)?;
        out.push(CoarseningReport { blocks, table: quotient, status });
    }
    Ok(out)
}

fn coarsening_status(
    quotient: &SupportTable,
    blocks: &[usize],
    budget: &SearchBudget,
) -> Result<CoarseningStatus, RegradeError> {
    let up = universal_presentation(quotient);
    let universal = match coset_enumerate(up.presentation(), budget.max_cosets) {
        CosetOutcome::Completed { group, generator_images } => {
            let images = up.symbol_images(&group, &generator_images);
            let mut fiber: BTreeMap<Element, usize> = BTreeMap::new();
            let ids: Vec<usize> = images
                .iter()
                .map(|e| {
                    let next = fiber.len();
                    *fiber.entry(*e).or_insert(next)
                })
                .collect();
            if fiber.len() < quotient.len() {
                let saturated = blocks.iter().map(|&b| ids[b]).collect();
                return Ok(CoarseningStatus::NotRealizable { saturated });
            }
            Some((group, images))
        }
        _ => None,
    };
    match search_finite_regrading(quotient, budget)? {
        SearchOutcome::Found(cert) => Ok(CoarseningStatus::Found(cert)),
        SearchOutcome::NotFound(report) => match universal {
            Some((group, images)) => {
                let cert = verify_regrading(quotient, &group, &images)?;
                Ok(CoarseningStatus::Found(cert.with_provenance(Provenance::Search)))
            }
            None => Ok(CoarseningStatus::NotFound(report)),
        },
    }
}

/// Quotient of `table` by an arbitrary closed partition.
pub fn coarsening_table(table: &SupportTable, blocks: &[usize]) -> SupportTable {
    quotient_table(table, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cyc(m: usize) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(m))
    }

    fn fin(g: &Arc<FiniteGroup>, tuple: &[Element]) -> ElementaryGrading {
        ElementaryGrading::new(
            LabelDomain::Finite(g.clone()),
            tuple.iter().map(|&e| Label::Element(e)).collect(),
        )
        .unwrap()
    }

    fn ints(tuple: &[i64]) -> ElementaryGrading {
        ElementaryGrading::new(
            LabelDomain::FreeAbelian { rank: 1 },
            tuple.iter().map(|&x| Label::Vector(vec![x])).collect(),
        )
        .unwrap()
    }

    /// `(gh, h, 1)` in `g`.
    fn gh_tuple(group: &Arc<FiniteGroup>, g: Element, h: Element) -> ElementaryGrading {
        fin(group, &[group.mul(g, h), h, 0])
    }

    fn assert_pattern_kept(grading: &ElementaryGrading, cert: &RegradingCertificate) {
        assert_eq!(grading.coincidence_pattern(), cert.regraded(grading).coincidence_pattern());
    }

    #[test]
    fn identity_regrading_verifies() {
        let g = cyc(5);
        let grading = fin(&g, &[3, 1, 0]);
        let support = grading.support();
        let psi: Vec<Element> = support
            .labels
            .iter()
            .map(|l| match l {
                Label::Element(e) => *e,
                _ => unreachable!(),
            })
            .collect();
        let cert = verify_regrading(&support.table, &g, &psi).unwrap();
        assert_eq!(cert.provenance, Provenance::Verified);
    }

    #[test]
    fn size_two_into_c3_and_collision_in_c2() {
        let grading = ints(&[1, 0]);
        let table = grading.interaction_relation();
        let g = table.symbol_by_label("1").unwrap();
        let gi = table.symbol_by_label("-1").unwrap();
        let mut psi = vec![0; 3];
        psi[g] = 1;
        psi[gi] = 2;
        verify_regrading(&table, &cyc(3), &psi).unwrap();
        psi[gi] = 1;
        match verify_regrading(&table, &cyc(2), &psi) {
            Err(RegradeError::NotInjective { a, b, .. }) => {
                assert_eq!([a.min(b), a.max(b)], [g.min(gi), g.max(gi)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_multiplicative_names_triple() {
        let grading = ints(&[1, 0]);
        let table = grading.interaction_relation();
        let err = verify_regrading(&table, &cyc(5), &[0, 1, 3]).unwrap_err();
        assert!(matches!(err, RegradeError::NotMultiplicative { .. }), "{err}");
    }

    #[test]
    fn abelian_examples() {
        for n in 2..=10 {
            let grading = ints(&(1..=n as i64).collect::<Vec<_>>());
            let cert = abelian_regrade(&grading).unwrap();
            assert_eq!(cert.target.order(), 2 * n);
            assert_pattern_kept(&grading, &cert);
        }
        let cert = abelian_regrade(&ints(&[0, 3])).unwrap();
        assert_eq!(cert.target.order(), 8);
        let cert = abelian_regrade(&ints(&[2, 2, 2])).unwrap();
        assert_eq!(cert.target.order(), 1);
    }

    #[test]
    fn sidon_small() {
        let (sym, cyc) = sidon_regrades(2);
        assert_eq!(sym.display_tuple(), vec!["(12)", "(13)"]);
        let diff = sym.degree(0, 1);
        assert_eq!(sym.domain().display(&diff), "(132)");
        assert_eq!(cyc.display_tuple(), vec!["2", "4"]);
        let (sym1, _) = sidon_regrades(1);
        assert_eq!(sym1.coincidence_pattern(), CoincidencePattern::all_distinct(1));
        for n in 1..=8 {
            let (a, b) = sidon_regrades(n);
            assert_eq!(a.coincidence_pattern(), b.coincidence_pattern());
        }
    }

    #[test]
    fn sidon_differences_are_the_expected_three_cycles() {
        let n = 5;
        let (sym, _) = sidon_regrades(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let name = sym.domain().display(&sym.degree(i, j));
                    assert_eq!(name, format!("(1{}{})", j + 2, i + 2));
                }
            }
        }
    }

    #[test]
    fn named_cases() {
        let c6 = cyc(6);
        let (case, cert) = classify_small(&gh_tuple(&c6, 1, 2)).unwrap();
        assert_eq!(case, SmallCase::Case(2));
        assert_eq!(cert.target.spec(), "C6");
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let a = s3.element_by_name("(12)").unwrap();
        let b = s3.element_by_name("(13)").unwrap();
        let (case, cert) = classify_small(&gh_tuple(&s3, a, b)).unwrap();
        assert_eq!(case, SmallCase::Case(8));
        assert_eq!(cert.target.spec(), "S3");
        let (case, cert) = classify_small(&ints(&[0, 5])).unwrap();
        assert_eq!(case, SmallCase::Size2Generic);
        assert_eq!(cert.target.order(), 3);
        let c2 = cyc(2);
        let (case, cert) = classify_small(&fin(&c2, &[1, 0])).unwrap();
        assert_eq!(case, SmallCase::Size2Involution);
        assert_eq!(cert.psi, vec![0, 1]);
        assert!(matches!(
            classify_small(&ints(&[0, 1, 2, 3])),
            Err(RegradeError::TooLarge(4))
        ));
    }

    #[test]
    fn free_generic_pair_is_case_one() {
        let f = LabelDomain::Free { rank: 2 };
        let w = |s: &str| Label::Word(s.parse().unwrap());
        let grading = ElementaryGrading::new(f, vec![w("x1 x2"), w("x2"), w("1")]).unwrap();
        let (case, cert) = classify_small(&grading).unwrap();
        assert_eq!(case, SmallCase::Case(1));
        assert_eq!(cert.target.spec(), "S4");
        assert_pattern_kept(&grading, &cert);
    }

    #[test]
    fn fallback_on_integers() {
        for tuple in [[0, 0, 0], [2, 1, 0], [3, 3, 0], [-1, 1, 0], [4, 2, 0], [1, 2, 0]] {
            let grading = ints(&tuple);
            let (case, cert) = classify_small(&grading).unwrap();
            assert_eq!(case, SmallCase::AbelianFallback, "{tuple:?}");
            assert_pattern_kept(&grading, &cert);
        }
        let (case, _) = classify_small(&ints(&[7, 3, 0])).unwrap();
        assert_eq!(case, SmallCase::Case(1));
    }

    #[test]
    fn search_examples() {
        let budget = SearchBudget::default();
        let table = ints(&[1, 0]).interaction_relation();
        let cert = search_finite_regrading(&table, &budget).unwrap().found().cloned().unwrap();
        assert_eq!(cert.target.spec(), "C3");
        let one = ints(&[0]).interaction_relation();
        let cert = search_finite_regrading(&one, &budget).unwrap().found().cloned().unwrap();
        assert_eq!(cert.target.order(), 1);
        let (glued, _) = crate::grading::coarsen(&table, &[(1, 2)]).unwrap();
        let cert = search_finite_regrading(&glued, &budget).unwrap().found().cloned().unwrap();
        assert_eq!(cert.target.spec(), "C2");
    }

    #[test]
    fn search_is_deterministic() {
        let table = ints(&[3, 1, 0]).interaction_relation();
        let budget = SearchBudget::default();
        let a = search_finite_regrading(&table, &budget).unwrap().found().cloned().unwrap();
        let b = search_finite_regrading(&table, &budget).unwrap().found().cloned().unwrap();
        assert_eq!(a.psi, b.psi);
        assert_eq!(a.target.spec(), b.target.spec());
    }

    #[test]
    fn starved_search_reports_budget() {
        let table = ints(&[3, 1, 0]).interaction_relation();
        let budget = SearchBudget {
            ladder: vec![GroupSpec::Cyclic(2), GroupSpec::Cyclic(3)],
            ..SearchBudget::default()
        };
        match search_finite_regrading(&table, &budget).unwrap() {
            SearchOutcome::NotFound(report) => assert_eq!(report.groups_tried, vec!["C2", "C3"]),
            SearchOutcome::Found(c) => panic!("{c:?}"),
        }
        let empty = SearchBudget::with_ladder(Vec::new());
        assert!(matches!(search_finite_regrading(&table, &empty), Err(RegradeError::EmptyLadder)));
    }

    #[test]
    fn padding() {
        let g = ints(&[1, 0]);
        assert_eq!(extend_to_larger_matrix(&g, 2).unwrap(), g);
        let p = extend_to_larger_matrix(&g, 3).unwrap();
        assert_eq!(p.tuple(), ints(&[1, 0, 0]).tuple());
        let old: std::collections::BTreeSet<String> = g.interaction_relation().labels().iter().cloned().collect();
        let new: std::collections::BTreeSet<String> = p.interaction_relation().labels().iter().cloned().collect();
        assert!(old.is_subset(&new));
        assert!(extend_to_larger_matrix(&p, 2).is_err());
    }

    #[test]
    fn hereditary_small() {
        let budget = SearchBudget::default();
        let one = ints(&[0]).interaction_relation();
        let report = hereditary_finite_check(&one, &budget).unwrap();
        assert_eq!(report.len(), 1);
        assert!(matches!(report[0].status, CoarseningStatus::Found(_)));
        let m2 = LabelDomain::Free { rank: 1 };
        let grading = ElementaryGrading::new(m2, vec![Label::Word("x1".parse().unwrap()), Label::Word("1".parse().unwrap())]).unwrap();
        let report = hereditary_finite_check(&grading.interaction_relation(), &budget).unwrap();
        assert_eq!(report.len(), 3);
        assert!(report.iter().all(|r| matches!(r.status, CoarseningStatus::Found(_))));
    }

    #[test]
    fn hereditary_generic_m3() {
        let f = LabelDomain::Free { rank: 2 };
        let w = |s: &str| Label::Word(s.parse().unwrap());
        let grading = ElementaryGrading::new(f, vec![w("x1 x2"), w("x2"), w("1")]).unwrap();
        let table = grading.interaction_relation();
        let report = hereditary_finite_check(&table, &SearchBudget::default()).unwrap();
        let mut found = 0;
        for r in &report {
            match &r.status {
                CoarseningStatus::Found(cert) => {
                    verify_regrading(&r.table, &cert.target, &cert.psi).unwrap();
                    found += 1;
                }
                CoarseningStatus::NotRealizable { saturated } => {
                    assert!(report.iter().any(|o| &o.blocks == saturated));
                }
                CoarseningStatus::NotFound(rep) => panic!("{:?}: {rep:?}", r.blocks),
            }
        }
        assert!(found > 1);
    }

    fn small_groups() -> Vec<Arc<FiniteGroup>> {
        let mut out: Vec<Arc<FiniteGroup>> = (1..=24).map(cyc).collect();
        out.extend(
            [
                FiniteGroup::abelian(&[2, 2]),
                FiniteGroup::abelian(&[2, 2, 2]),
                FiniteGroup::abelian(&[2, 6]),
                FiniteGroup::symmetric(3),
                FiniteGroup::symmetric(4),
                FiniteGroup::dihedral(4),
                FiniteGroup::dihedral(5),
                FiniteGroup::dihedral(6),
                FiniteGroup::product(&FiniteGroup::cyclic(3), &FiniteGroup::symmetric(3)),
            ]
            .map(Arc::new),
        );
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn cases_exhaustive_and_exclusive(which in 0usize..33, a in 0usize..24, b in 0usize..24) {
            let groups = small_groups();
            let group = &groups[which % groups.len()];
            let (g, h) = (a % group.order(), b % group.order());
            let domain = LabelDomain::Finite(group.clone());
            let (lg, lh) = (Label::Element(g), Label::Element(h));
            let gh = group.mul(g, h);
            let deg = [0, h, group.inv(h), gh, group.inv(gh)].contains(&g)
                || [0, g, group.inv(g), gh, group.inv(gh)].contains(&h);
            let flags = (gh == group.inv(gh), g == group.inv(g), h == group.inv(h));
            let matching: Vec<u8> = (1..=8u8)
                .filter(|&k| !deg && match k {
                    1 => flags == (false, false, false),
                    2 => flags == (true, false, false),
                    3 => flags == (true, true, false),
                    4 => flags == (true, false, true),
                    5 => flags == (true, true, true),
                    6 => flags == (false, true, false),
                    7 => flags == (false, false, true),
                    _ => flags == (false, true, true),
                })
                .collect();
            prop_assert_eq!(matching.len() + usize::from(deg), 1);
            let case = small_case(&domain, &lg, &lh);
            if deg {
                prop_assert_eq!(case, SmallCase::AbelianFallback);
            } else {
                prop_assert_eq!(case, SmallCase::Case(matching[0]));
            }
            let grading = gh_tuple(group, g, h);
            let (got, cert) = classify_small(&grading).unwrap();
            prop_assert_eq!(got, case);
            let support = grading.support();
            verify_regrading(&support.table, &cert.target, &cert.psi).unwrap();
            prop_assert_eq!(grading.coincidence_pattern(), cert.regraded(&grading).coincidence_pattern());
        }

        #[test]
        fn small_sizes_always_certified(which in 0usize..33, a in 0usize..24, b in 0usize..24, n in 1usize..=3) {
            let groups = small_groups();
            let group = &groups[which % groups.len()];
            let tuple: Vec<Element> = [a % group.order(), b % group.order(), 0][3 - n..].to_vec();
            let grading = fin(group, &tuple);
            let (_, cert) = classify_small(&grading).unwrap();
            prop_assert_eq!(grading.coincidence_pattern(), cert.regraded(&grading).coincidence_pattern());
        }

        #[test]
        fn abelian_keeps_pattern(v in proptest::collection::vec(proptest::collection::vec(-6i64..6, 2), 1..5)) {
            let grading = ElementaryGrading::new(
                LabelDomain::FreeAbelian { rank: 2 },
                v.into_iter().map(Label::Vector).collect(),
            ).unwrap();
            let cert = abelian_regrade(&grading).unwrap();
            prop_assert_eq!(grading.coincidence_pattern(), cert.regraded(&grading).coincidence_pattern());
        }

        #[test]
        fn integer_fallback_keeps_pattern(a in -2i64..=2, b in -2i64..=2, r in 1i64..5) {
            let grading = ints(&[(a + b) * r, b * r, 0]);
            let (_, cert) = classify_small(&grading).unwrap();
            prop_assert_eq!(grading.coincidence_pattern(), cert.regraded(&grading).coincidence_pattern());
        }
    }
}
