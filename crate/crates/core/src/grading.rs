//! Elementary gradings on matrix algebras and their support tables.
//!
//! A [`SupportTable`] records which homogeneous components multiply to a
//! nonzero component and where the product lands. It is all the universal
//! group and the regrading searches ever look at.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use thiserror::Error;

use crate::fingrp::{cycle_notation, Element, FiniteGroup, GroupSpec};
use crate::words::Word;

/// Default cap on the number of symbols for [`enumerate_coarsenings`].
pub const DEFAULT_COARSENING_BOUND: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradingError {
    #[error("label {index} ({label}) does not belong to the domain {domain}")]
    LabelOutsideDomain { index: usize, label: String, domain: String },
    #[error("expected {expected} labels, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("matrix size must be at least 1")]
    EmptyMatrix,
    #[error("symbol {0} out of range")]
    BadSymbol(usize),
    #[error("unit law fails: {unit} * {symbol} = {product}")]
    UnitLaw { unit: usize, symbol: usize, product: usize },
    #[error("{count} symbols exceed the enumeration bound {bound}; pass explicit glue sets instead")]
    TooManySymbols { count: usize, bound: usize },
    #[error("cannot parse label {text:?} in {domain}: {reason}")]
    BadLabel { text: String, domain: String, reason: String },
    #[error("cannot parse domain {0:?}")]
    BadDomain(String),
    #[error("cannot shrink a grading on size {from} to size {to}")]
    Shrink { from: usize, to: usize },
}

/// Where the labels of a grading live.
#[derive(Debug, Clone)]
pub enum LabelDomain {
    /// Free group on `rank` generators; labels are reduced words.
    Free { rank: u32 },
    /// `Z^rank`; labels are integer vectors.
    FreeAbelian { rank: usize },
    /// A finite group given by its table.
    Finite(Arc<FiniteGroup>),
    /// Permutations of `degree` points, for symmetric groups too large to
    /// tabulate.
    Permutations { degree: usize },
}

impl PartialEq for LabelDomain {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (LabelDomain::Free { rank: a }, LabelDomain::Free { rank: b }) => a == b,
            (LabelDomain::FreeAbelian { rank: a }, LabelDomain::FreeAbelian { rank: b }) => a == b,
            (LabelDomain::Finite(a), LabelDomain::Finite(b)) => Arc::ptr_eq(a, b) || a == b,
            (LabelDomain::Permutations { degree: a }, LabelDomain::Permutations { degree: b }) => a == b,
            _ => false,
        }
    }
}

impl Eq for LabelDomain {}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Word(Word),
    Vector(Vec<i64>),
    Element(Element),
    /// One-line notation, points numbered from 0.
    Perm(Vec<u16>),
}

impl fmt::Display for LabelDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelDomain::Free { rank } => write!(f, "free:{rank}"),
            LabelDomain::FreeAbelian { rank: 1 } => write!(f, "Z"),
            LabelDomain::FreeAbelian { rank } => write!(f, "Z^{rank}"),
            LabelDomain::Finite(g) => write!(f, "{}", g.spec()),
            LabelDomain::Permutations { degree } => write!(f, "perm:{degree}"),
        }
    }
}

impl LabelDomain {
    pub fn finite(group: FiniteGroup) -> Self {
        LabelDomain::Finite(Arc::new(group))
    }

    /// Parses `free:<l>`, `Z`, `Z^<k>`, `perm:<k>` or a group spec.
    pub fn parse(text: &str) -> Result<Self, GradingError> {
        let t = text.trim();
        let bad = || GradingError::BadDomain(text.to_string());
        if let Some(r) = t.strip_prefix("free:") {
            return Ok(LabelDomain::Free { rank: r.trim().parse().map_err(|_| bad())? });
        }
        if let Some(r) = t.strip_prefix("perm:") {
            let degree: usize = r.trim().parse().map_err(|_| bad())?;
            if degree == 0 || degree > u16::MAX as usize {
                return Err(bad());
            }
            return Ok(LabelDomain::Permutations { degree });
        }
        if t == "Z" {
            return Ok(LabelDomain::FreeAbelian { rank: 1 });
        }
        if let Some(r) = t.strip_prefix("Z^") {
            return Ok(LabelDomain::FreeAbelian { rank: r.trim().parse().map_err(|_| bad())? });
        }
        let spec: GroupSpec = t.parse().map_err(|_| bad())?;
        let group = spec.build().map_err(|_| bad())?;
        Ok(LabelDomain::finite(group))
    }

    pub fn identity(&self) -> Label {
        match self {
            LabelDomain::Free { .. } => Label::Word(Word::identity()),
            LabelDomain::FreeAbelian { rank } => Label::Vector(vec![0; *rank]),
            LabelDomain::Finite(_) => Label::Element(0),
            LabelDomain::Permutations { degree } => Label::Perm((0..*degree as u16).collect()),
        }
    }

    pub fn contains(&self, label: &Label) -> bool {
        match (self, label) {
            (LabelDomain::Free { rank }, Label::Word(w)) => w.max_generator() <= *rank,
            (LabelDomain::FreeAbelian { rank }, Label::Vector(v)) => v.len() == *rank,
            (LabelDomain::Finite(g), Label::Element(e)) => *e < g.order(),
            (LabelDomain::Permutations { degree }, Label::Perm(p)) => {
                p.len() == *degree && {
                    let distinct: BTreeSet<u16> = p.iter().copied().collect();
                    distinct.len() == p.len() && p.iter().all(|&x| (x as usize) < *degree)
                }
            }
            _ => false,
        }
    }

    /// Group product; both labels must belong to the domain.
    pub fn mul(&self, a: &Label, b: &Label) -> Label {
        match (self, a, b) {
            (LabelDomain::Free { .. }, Label::Word(x), Label::Word(y)) => Label::Word(x.mul(y)),
            (LabelDomain::FreeAbelian { .. }, Label::Vector(x), Label::Vector(y)) => {
                Label::Vector(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (LabelDomain::Finite(g), Label::Element(x), Label::Element(y)) => Label::Element(g.mul(*x, *y)),
            (LabelDomain::Permutations { .. }, Label::Perm(s), Label::Perm(t)) => {
                Label::Perm(t.iter().map(|&x| s[x as usize]).collect())
            }
            _ => panic!("label outside domain {self}"),
        }
    }

    pub fn inv(&self, a: &Label) -> Label {
        match (self, a) {
            (LabelDomain::Free { .. }, Label::Word(x)) => Label::Word(x.inverse()),
            (LabelDomain::FreeAbelian { .. }, Label::Vector(x)) => Label::Vector(x.iter().map(|p| -p).collect()),
            (LabelDomain::Finite(g), Label::Element(x)) => Label::Element(g.inv(*x)),
            (LabelDomain::Permutations { .. }, Label::Perm(s)) => {
                let mut inv = vec![0u16; s.len()];
                for (i, &x) in s.iter().enumerate() {
                    inv[x as usize] = i as u16;
                }
                Label::Perm(inv)
            }
            _ => panic!("label outside domain {self}"),
        }
    }

    /// `a * b^-1`
    pub fn div(&self, a: &Label, b: &Label) -> Label {
        self.mul(a, &self.inv(b))
    }

    pub fn pow(&self, a: &Label, k: i64) -> Label {
        let base = if k < 0 { self.inv(a) } else { a.clone() };
        (0..k.unsigned_abs()).fold(self.identity(), |acc, _| self.mul(&acc, &base))
    }

    /// Order of `a`, or `None` if it exceeds `bound` (as for every
    /// nontrivial label of a free domain).
    pub fn element_order(&self, a: &Label, bound: usize) -> Option<usize> {
        match (self, a) {
            (LabelDomain::Finite(g), Label::Element(e)) => Some(g.element_order(*e)).filter(|&o| o <= bound),
            (LabelDomain::Free { .. }, Label::Word(w)) => w.is_empty().then_some(1),
            (LabelDomain::FreeAbelian { .. }, Label::Vector(v)) => v.iter().all(|&x| x == 0).then_some(1),
            _ => {
                let id = self.identity();
                let mut x = a.clone();
                for k in 1..=bound {
                    if x == id {
                        return Some(k);
                    }
                    x = self.mul(&x, a);
                }
                None
            }
        }
    }

    pub fn display(&self, label: &Label) -> String {
        match (self, label) {
            (_, Label::Word(w)) => w.to_string(),
            (_, Label::Vector(v)) if v.len() == 1 => v[0].to_string(),
            (_, Label::Vector(v)) => {
                let parts: Vec<String> = v.iter().map(i64::to_string).collect();
                format!("({})", parts.join(","))
            }
            (LabelDomain::Finite(g), Label::Element(e)) => g.name(*e),
            (_, Label::Element(e)) => format!("#{e}"),
            (_, Label::Perm(p)) => {
                let bytes: Vec<u8> = p.iter().map(|&x| x as u8).collect();
                if p.len() <= u8::MAX as usize {
                    cycle_notation(&bytes)
                } else {
                    format!("{p:?}")
                }
            }
        }
    }

    pub fn parse_label(&self, text: &str) -> Result<Label, GradingError> {
        let bad = |reason: &str| GradingError::BadLabel {
            text: text.to_string(),
            domain: self.to_string(),
            reason: reason.to_string(),
        };
        let label = match self {
            LabelDomain::Free { .. } => Label::Word(text.parse().map_err(|e: crate::words::WordError| bad(&e.to_string()))?),
            LabelDomain::FreeAbelian { .. } => {
                let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
                let v: Result<Vec<i64>, _> = inner.split(',').map(|p| p.trim().parse::<i64>()).collect();
                Label::Vector(v.map_err(|_| bad("expected integers"))?)
            }
            LabelDomain::Finite(g) => Label::Element(g.parse_element(text).map_err(|e| bad(&e.to_string()))?),
            LabelDomain::Permutations { degree } => {
                Label::Perm(parse_perm(text, *degree).ok_or_else(|| bad("expected cycle notation"))?)
            }
        };
        if !self.contains(&label) {
            return Err(bad("outside the domain"));
        }
        Ok(label)
    }

    /// Permutation labels as a finite group, when small enough to tabulate.
    pub fn as_finite(&self) -> Option<&Arc<FiniteGroup>> {
        match self {
            LabelDomain::Finite(g) => Some(g),
            _ => None,
        }
    }
}

/// Cycle notation; points separated by commas or (for degree below 10)
/// written as single digits. Cycles compose right to left.
pub fn parse_perm(text: &str, degree: usize) -> Option<Vec<u16>> {
    let norm: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut perm: Vec<u16> = (0..degree as u16).collect();
    let mut cycles = Vec::new();
    let mut rest = norm.as_str();
    while !rest.is_empty() {
        let body = rest.strip_prefix('(')?;
        let close = body.find(')')?;
        let inner = &body[..close];
        let points: Vec<usize> = if inner.is_empty() {
            Vec::new()
        } else if inner.contains(',') || degree >= 10 {
            inner.split(',').map(|p| p.parse().ok()).collect::<Option<_>>()?
        } else {
            inner.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect::<Option<_>>()?
        };
        if points.iter().any(|&p| p == 0 || p > degree) {
            return None;
        }
        if points.iter().collect::<BTreeSet<_>>().len() != points.len() {
            return None;
        }
        cycles.push(points);
        rest = &body[close + 1..];
    }
    for cycle in cycles.iter().rev() {
        let mut step: Vec<u16> = (0..degree as u16).collect();
        for (i, &p) in cycle.iter().enumerate() {
            step[p - 1] = (cycle[(i + 1) % cycle.len()] - 1) as u16;
        }
        perm = perm.iter().map(|&x| step[x as usize]).collect();
    }
    Some(perm)
}

/// The grading of `M_n` in which `e_ij` has degree `g_i g_j^-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryGrading {
    domain: LabelDomain,
    tuple: Vec<Label>,
}

impl ElementaryGrading {
    pub fn new(domain: LabelDomain, tuple: Vec<Label>) -> Result<Self, GradingError> {
        if tuple.is_empty() {
            return Err(GradingError::EmptyMatrix);
        }
        for (index, label) in tuple.iter().enumerate() {
            if !domain.contains(label) {
                return Err(GradingError::LabelOutsideDomain {
                    index,
                    label: format!("{label:?}"),
                    domain: domain.to_string(),
                });
            }
        }
        Ok(ElementaryGrading { domain, tuple })
    }

    /// Builds the tuple from the degrees `h_i` of `e_{i,i+1}`:
    /// `g_i = h_i h_{i+1} ... h_{n-1}` and `g_n = 1`.
    pub fn from_offdiagonal(domain: LabelDomain, offdiagonal: Vec<Label>) -> Result<Self, GradingError> {
        for (index, label) in offdiagonal.iter().enumerate() {
            if !domain.contains(label) {
                return Err(GradingError::LabelOutsideDomain {
                    index,
                    label: format!("{label:?}"),
                    domain: domain.to_string(),
                });
            }
        }
        let n = offdiagonal.len() + 1;
        let mut tuple = vec![domain.identity(); n];
        for i in (0..n - 1).rev() {
            tuple[i] = domain.mul(&offdiagonal[i], &tuple[i + 1]);
        }
        Self::new(domain, tuple)
    }

    /// Degrees with every label in the identity.
    pub fn trivial(domain: LabelDomain, n: usize) -> Result<Self, GradingError> {
        let id = domain.identity();
        Self::new(domain, vec![id; n])
    }

    pub fn n(&self) -> usize {
        self.tuple.len()
    }

    pub fn domain(&self) -> &LabelDomain {
        &self.domain
    }

    pub fn tuple(&self) -> &[Label] {
        &self.tuple
    }

    /// Degrees `g_i g_{i+1}^-1` of the matrix units `e_{i,i+1}`.
    pub fn offdiagonal(&self) -> Vec<Label> {
        self.tuple.windows(2).map(|p| self.domain.div(&p[0], &p[1])).collect()
    }

    /// Degree of `e_ij`.
    pub fn degree(&self, i: usize, j: usize) -> Label {
        self.domain.div(&self.tuple[i], &self.tuple[j])
    }

    pub fn difference_matrix(&self) -> Vec<Vec<Label>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.degree(i, j)).collect())
            .collect()
    }

    pub fn coincidence_pattern(&self) -> CoincidencePattern {
        coincidence_pattern(&self.difference_matrix())
    }

    pub fn support(&self) -> ElementarySupport {
        let n = self.n();
        let matrix = self.difference_matrix();
        let mut index: HashMap<&Label, usize> = HashMap::new();
        let mut labels: Vec<Label> = Vec::new();
        let mut position_symbol = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let label = &matrix[i][j];
                let next = labels.len();
                let s = *index.entry(label).or_insert_with(|| {
                    labels.push(label.clone());
                    next
                });
                position_symbol[i * n + j] = s;
            }
        }
        let mut products = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let key = (position_symbol[i * n + j], position_symbol[j * n + k]);
                    let value = position_symbol[i * n + k];
                    let old = products.insert(key, value);
                    assert!(old.is_none_or(|o| o == value), "product of degrees is not well defined");
                }
            }
        }
        let names = labels.iter().map(|l| self.domain.display(l)).collect();
        let table = SupportTable::new(names, Some(0), products).expect("elementary support is a valid table");
        ElementarySupport {
            table,
            labels,
            position_symbol,
        }
    }

    /// Support symbols in row-major first occurrence; the identity is symbol 0.
    pub fn interaction_relation(&self) -> SupportTable {
        self.support().table
    }

    /// Pads the tuple with copies of its last label.
    pub fn extend_to(&self, n: usize) -> Result<Self, GradingError> {
        if n < self.n() {
            return Err(GradingError::Shrink { from: self.n(), to: n });
        }
        let mut tuple = self.tuple.clone();
        tuple.resize(n, self.tuple[self.n() - 1].clone());
        Self::new(self.domain.clone(), tuple)
    }

    /// Applies a label map to every tuple entry, landing in `domain`.
    pub fn relabel<F: Fn(&Label) -> Label>(&self, domain: LabelDomain, f: F) -> Result<Self, GradingError> {
        Self::new(domain, self.tuple.iter().map(f).collect())
    }

    pub fn display_tuple(&self) -> Vec<String> {
        self.tuple.iter().map(|l| self.domain.display(l)).collect()
    }
}

/// Support of an elementary grading with its symbol bookkeeping.
#[derive(Debug, Clone)]
pub struct ElementarySupport {
    pub table: SupportTable,
    /// Label of each symbol.
    pub labels: Vec<Label>,
    /// Symbol of `e_ij`, row-major.
    pub position_symbol: Vec<usize>,
}

/// Partition of the `n x n` positions by equality of entries, with blocks
/// numbered in row-major order of first occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoincidencePattern {
    n: usize,
    blocks: Vec<usize>,
}

pub fn coincidence_pattern<T: Eq + Hash>(matrix: &[Vec<T>]) -> CoincidencePattern {
    let n = matrix.len();
    let mut ids: HashMap<&T, usize> = HashMap::new();
    let mut blocks = Vec::with_capacity(n * n);
    for row in matrix {
        for entry in row {
            let next = ids.len();
            blocks.push(*ids.entry(entry).or_insert(next));
        }
    }
    CoincidencePattern { n, blocks }
}

impl CoincidencePattern {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Block id of each position, row-major.
    pub fn block_ids(&self) -> &[usize] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.iter().max().map_or(0, |m| m + 1)
    }

    /// Blocks as lists of 0-based `(i, j)` positions.
    pub fn blocks(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (p, &b) in self.blocks.iter().enumerate() {
            out[b].push((p / self.n, p % self.n));
        }
        out
    }

    /// The pattern after relabeling rows and columns by `perm`: position
    /// `(i, j)` of the result carries the entry at `(perm[i], perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> CoincidencePattern {
        let n = self.n;
        let mut ids: HashMap<usize, usize> = HashMap::new();
        let mut blocks = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let next = ids.len();
                blocks.push(*ids.entry(self.blocks[perm[i] * n + perm[j]]).or_insert(next));
            }
        }
        CoincidencePattern { n, blocks }
    }

    /// The generic pattern in which off-diagonal entries are pairwise
    /// distinct and distinct from the diagonal.
    pub fn all_distinct(n: usize) -> CoincidencePattern {
        let mut next = 1;
        let mut blocks = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    blocks.push(0);
                } else {
                    blocks.push(next);
                    next += 1;
                }
            }
        }
        CoincidencePattern { n, blocks }
    }
}

/// A permutation `π` with `b.permuted(π) == a`, searched in lexicographic
/// order.
pub fn find_pattern_permutation(a: &CoincidencePattern, b: &CoincidencePattern) -> Option<Vec<usize>> {
    if a.n != b.n || a.block_count() != b.block_count() {
        return None;
    }
    let n = a.n;
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    // a-block -> b-block, b-block -> a-block, built incrementally
    fn rec(
        a: &CoincidencePattern,
        b: &CoincidencePattern,
        perm: &mut Vec<usize>,
        used: &mut [bool],
    ) -> bool {
        let n = a.n;
        let depth = perm.len();
        if depth == n {
            return b.permuted(perm) == *a;
        }
        for c in 0..n {
            if used[c] {
                continue;
            }
            perm.push(c);
            used[c] = true;
            // Check consistency of the block bijection on the leading square.
            let mut ab: HashMap<usize, usize> = HashMap::new();
            let mut ba: HashMap<usize, usize> = HashMap::new();
            let ok = (0..=depth).all(|i| {
                (0..=depth).all(|j| {
                    let x = a.blocks[i * n + j];
                    let y = b.blocks[perm[i] * n + perm[j]];
                    *ab.entry(x).or_insert(y) == y && *ba.entry(y).or_insert(x) == x
                })
            });
            if ok && rec(a, b, perm, used) {
                return true;
            }
            perm.pop();
            used[c] = false;
        }
        false
    }
    if rec(a, b, &mut perm, &mut used) {
        Some(perm)
    } else {
        None
    }
}

/// Support symbols with a partial product defined exactly on interacting
/// pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportTable {
    labels: Vec<String>,
    unit: Option<usize>,
    products: BTreeMap<(usize, usize), usize>,
}

impl SupportTable {
    pub fn new(
        labels: Vec<String>,
        unit: Option<usize>,
        products: BTreeMap<(usize, usize), usize>,
    ) -> Result<Self, GradingError> {
        let k = labels.len();
        for (&(s, t), &p) in &products {
            for x in [s, t, p] {
                if x >= k {
                    return Err(GradingError::BadSymbol(x));
                }
            }
        }
        if let Some(u) = unit {
            if u >= k {
                return Err(GradingError::BadSymbol(u));
            }
            for (&(s, t), &p) in &products {
                if s == u && p != t {
                    return Err(GradingError::UnitLaw { unit: u, symbol: t, product: p });
                }
                if t == u && p != s {
                    return Err(GradingError::UnitLaw { unit: u, symbol: s, product: p });
                }
            }
        }
        Ok(SupportTable { labels, unit, products })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, s: usize) -> &str {
        &self.labels[s]
    }

    pub fn unit(&self) -> Option<usize> {
        self.unit
    }

    pub fn product(&self, s: usize, t: usize) -> Option<usize> {
        self.products.get(&(s, t)).copied()
    }

    pub fn products(&self) -> &BTreeMap<(usize, usize), usize> {
        &self.products
    }

    pub fn symbol_by_label(&self, label: &str) -> Option<usize> {
        let norm: String = label.chars().filter(|c| !c.is_whitespace()).collect();
        self.labels
            .iter()
            .position(|l| l.chars().filter(|c| !c.is_whitespace()).collect::<String>() == norm)
    }

    /// Same symbols, unit and products, ignoring display labels.
    pub fn same_shape(&self, other: &SupportTable) -> bool {
        self.len() == other.len() && self.unit == other.unit && self.products == other.products
    }
}

/// True iff every pair of support symbols interacts.
pub fn is_strongly_connected(table: &SupportTable) -> bool {
    table.products.len() == table.len() * table.len()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut y = x;
        while self.parent[y] != root {
            let next = self.parent[y];
            self.parent[y] = root;
            y = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Canonical block numbering (restricted growth string).
fn canonical_blocks(raw: &[usize]) -> Vec<usize> {
    let mut ids: HashMap<usize, usize> = HashMap::new();
    raw.iter()
        .map(|&r| {
            let next = ids.len();
            *ids.entry(r).or_insert(next)
        })
        .collect()
}

/// Smallest partition containing `blocks` that is compatible with the
/// partial product and closed under cancellation: if `a ~ a'`, `ab` and
/// `a'b'` are defined and `ab ~ a'b'`, then `b ~ b'` (and symmetrically).
pub fn close_partition(table: &SupportTable, blocks: &[usize]) -> Vec<usize> {
    let k = table.len();
    let mut uf = UnionFind::new(k);
    let mut first: HashMap<usize, usize> = HashMap::new();
    for (s, &b) in blocks.iter().enumerate() {
        match first.get(&b) {
            Some(&t) => {
                uf.union(s, t);
            }
            None => {
                first.insert(b, s);
            }
        }
    }
    let triples: Vec<(usize, usize, usize)> = table.products.iter().map(|(&(s, t), &p)| (s, t, p)).collect();
    loop {
        let mut changed = false;
        let mut by_factors: HashMap<(usize, usize), usize> = HashMap::new();
        let mut by_left: HashMap<(usize, usize), usize> = HashMap::new();
        let mut by_right: HashMap<(usize, usize), usize> = HashMap::new();
        for &(s, t, p) in &triples {
            let (rs, rt, rp) = (uf.find(s), uf.find(t), uf.find(p));
            for (map, key, value) in [
                (&mut by_factors, (rs, rt), rp),
                (&mut by_left, (rs, rp), rt),
                (&mut by_right, (rt, rp), rs),
            ] {
                match map.get(&key) {
                    Some(&other) => {
                        if uf.union(other, value) {
                            changed = true;
                        }
                    }
                    None => {
                        map.insert(key, value);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let raw: Vec<usize> = (0..k).map(|s| uf.find(s)).collect();
    canonical_blocks(&raw)
}

/// The quotient table of a closed partition.
pub fn quotient_table(table: &SupportTable, blocks: &[usize]) -> SupportTable {
    let count = blocks.iter().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (s, &b) in blocks.iter().enumerate() {
        members[b].push(s);
    }
    let labels = members
        .iter()
        .map(|m| {
            if m.len() == 1 {
                table.labels[m[0]].clone()
            } else {
                let names: Vec<&str> = m.iter().map(|&s| table.labels[s].as_str()).collect();
                format!("{{{}}}", names.join(", "))
            }
        })
        .collect();
    let mut products = BTreeMap::new();
    for (&(s, t), &p) in &table.products {
        let old = products.insert((blocks[s], blocks[t]), blocks[p]);
        assert!(
            old.is_none_or(|o| o == blocks[p]),
            "partial product does not descend to the quotient"
        );
    }
    SupportTable::new(labels, table.unit.map(|u| blocks[u]), products).expect("quotient of a valid table")
}

/// The coarsening generated by gluing the given symbol pairs: returns the
/// quotient table and the symbol-to-block map.
pub fn coarsen(table: &SupportTable, glue: &[(usize, usize)]) -> Result<(SupportTable, Vec<usize>), GradingError> {
    let k = table.len();
    let mut uf = UnionFind::new(k);
    for &(s, t) in glue {
        if s >= k {
            return Err(GradingError::BadSymbol(s));
        }
        if t >= k {
            return Err(GradingError::BadSymbol(t));
        }
        uf.union(s, t);
    }
    let raw: Vec<usize> = (0..k).map(|s| uf.find(s)).collect();
    let blocks = close_partition(table, &canonical_blocks(&raw));
    Ok((quotient_table(table, &blocks), blocks))
}

/// All closed partitions of the symbols, in restricted-growth-string order,
/// each with its quotient table.
pub fn enumerate_coarsenings(table: &SupportTable) -> Result<Vec<(SupportTable, Vec<usize>)>, GradingError> {
    enumerate_coarsenings_bounded(table, DEFAULT_COARSENING_BOUND)
}

pub fn enumerate_coarsenings_bounded(
    table: &SupportTable,
    bound: usize,
) -> Result<Vec<(SupportTable, Vec<usize>)>, GradingError> {
    let k = table.len();
    if k > bound {
        return Err(GradingError::TooManySymbols { count: k, bound });
    }
    let start = close_partition(table, &(0..k).collect::<Vec<_>>());
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        let count = p.iter().max().map_or(0, |m| m + 1);
        for a in 0..count {
            for b in a + 1..count {
                let merged: Vec<usize> = p.iter().map(|&x| if x == b { a } else { x }).collect();
                let closed = close_partition(table, &canonical_blocks(&merged));
                if seen.insert(closed.clone()) {
                    queue.push_back(closed);
                }
            }
        }
    }
    Ok(seen
        .into_iter()
        .map(|blocks| (quotient_table(table, &blocks), blocks))
        .collect())
}
