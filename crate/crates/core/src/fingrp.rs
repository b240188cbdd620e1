//! Finite groups as explicit multiplication tables.
//!
//! Element 0 is always the identity. Constructors fix a canonical element
//! order: residues ascending for cyclic groups, lexicographic one-line
//! order for symmetric groups, `r^i s^j` at index `i + m*j` for dihedral
//! groups and lexicographic pairs for direct products.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::ops::ControlFlow;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::words::{eval_word, FreeGroupPresentation, Word};

pub type Element = usize;

/// Default cap on the order of constructed groups.
pub const DEFAULT_ORDER_BOUND: usize = 5040;
/// Default cap for isomorphism testing.
pub const DEFAULT_ISOMORPHISM_BOUND: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group order {order} exceeds the bound {bound}")]
    OrderTooLarge { order: usize, bound: usize },
    #[error("invalid group parameter: {0}")]
    BadParameter(String),
    #[error("table is not a group: {0}")]
    NotAGroup(String),
    #[error("table is not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("cannot parse group spec {0:?}")]
    BadSpec(String),
    #[error("cannot read group table {path}: {reason}")]
    TableFile { path: String, reason: String },
    #[error("unknown element {name:?} in {group}")]
    UnknownElement { name: String, group: String },
    #[error("relator {relator} maps to {value}, not the identity")]
    RelatorFails { relator: String, value: String },
    #[error("expected {expected} generator images, got {got}")]
    ImageCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    inverse: Vec<u32>,
    parts: Vec<Vec<String>>,
    spec: String,
    cyclic_factors: Option<Vec<usize>>,
    symmetric_degree: Option<usize>,
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec)
    }
}

fn checked_order(order: usize) -> usize {
    assert!(order >= 1, "groups have at least one element");
    assert!(
        order <= u32::MAX as usize && order.checked_mul(order).is_some(),
        "group order {order} too large for a table"
    );
    order
}

impl FiniteGroup {
    fn from_mul<F: Fn(usize, usize) -> usize>(
        order: usize,
        mul: F,
        parts: Vec<Vec<String>>,
        spec: String,
    ) -> Self {
        let order = checked_order(order);
        let mut table = vec![0u32; order * order];
        for a in 0..order {
            for b in 0..order {
                table[a * order + b] = mul(a, b) as u32;
            }
        }
        let inverse = Self::inverses(order, &table).expect("constructor produced a group");
        FiniteGroup {
            order,
            table,
            inverse,
            parts,
            spec,
            cyclic_factors: None,
            symmetric_degree: None,
        }
    }

    fn inverses(order: usize, table: &[u32]) -> Option<Vec<u32>> {
        (0..order)
            .map(|a| (0..order).find(|&b| table[a * order + b] == 0).map(|b| b as u32))
            .collect()
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(m: usize) -> Self {
        let parts = (0..m).map(|i| vec![i.to_string()]).collect();
        let mut g = Self::from_mul(m, |a, b| (a + b) % m, parts, format!("C{m}"));
        g.cyclic_factors = Some(vec![m]);
        g
    }

    /// Direct product of cyclic groups `C_{f1} x C_{f2} x ...`.
    pub fn abelian(factors: &[usize]) -> Self {
        match factors.split_first() {
            None => Self::trivial(),
            Some((&first, rest)) => rest
                .iter()
                .fold(Self::cyclic(first), |acc, &f| Self::product(&acc, &Self::cyclic(f))),
        }
    }

    pub fn symmetric(k: usize) -> Self {
        assert!(k >= 1, "symmetric groups need degree at least 1");
        let perms = all_permutations(k);
        let index: HashMap<Vec<u8>, usize> =
            perms.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let parts = perms.iter().map(|p| vec![cycle_notation(p)]).collect();
        let perms_ref = &perms;
        let index_ref = &index;
        let mut g = Self::from_mul(
            perms.len(),
            |a, b| {
                let (s, t) = (&perms_ref[a], &perms_ref[b]);
                let composed: Vec<u8> = t.iter().map(|&x| s[x as usize]).collect();
                index_ref[&composed]
            },
            parts,
            format!("S{k}"),
        );
        g.symmetric_degree = Some(k);
        g
    }

    /// Dihedral group of order `2m`, elements `r^i s^j` at index `i + m*j`.
    pub fn dihedral(m: usize) -> Self {
        assert!(m >= 1, "dihedral groups need m at least 1");
        let name = |i: usize, j: usize| -> String {
            let r = match i {
                0 => String::new(),
                1 => "r".to_string(),
                _ => format!("r^{i}"),
            };
            match (r.is_empty(), j) {
                (true, 0) => "1".to_string(),
                (false, 0) => r,
                (_, _) => format!("{r}s"),
            }
        };
        let parts = (0..2 * m).map(|x| vec![name(x % m, x / m)]).collect();
        Self::from_mul(
            2 * m,
            |x, y| {
                let (a, b) = (x % m, x / m);
                let (c, d) = (y % m, y / m);
                let rot = if b == 0 { (a + c) % m } else { (a + m - c) % m };
                rot + m * ((b + d) % 2)
            },
            parts,
            format!("D{m}"),
        )
    }

    pub fn product(g1: &FiniteGroup, g2: &FiniteGroup) -> Self {
        let (n1, n2) = (g1.order, g2.order);
        let parts = (0..n1 * n2)
            .map(|x| {
                let mut p = g1.parts[x / n2].clone();
                p.extend(g2.parts[x % n2].iter().cloned());
                p
            })
            .collect();
        let mut g = Self::from_mul(
            n1 * n2,
            |x, y| g1.mul(x / n2, y / n2) * n2 + g2.mul(x % n2, y % n2),
            parts,
            format!("{}x{}", g1.spec, g2.spec),
        );
        if let (Some(a), Some(b)) = (&g1.cyclic_factors, &g2.cyclic_factors) {
            g.cyclic_factors = Some(a.iter().chain(b.iter()).copied().collect());
        }
        g
    }

    /// Builds a group from a raw table, checking the group axioms.
    pub fn from_table(rows: &[Vec<usize>], names: Option<Vec<String>>) -> Result<Self, GroupError> {
        let order = rows.len();
        if order == 0 {
            return Err(GroupError::NotAGroup("empty table".into()));
        }
        if order > DEFAULT_ORDER_BOUND {
            return Err(GroupError::OrderTooLarge {
                order,
                bound: DEFAULT_ORDER_BOUND,
            });
        }
        let mut table = Vec::with_capacity(order * order);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(GroupError::NotAGroup(format!(
                    "row {i} has {} entries, expected {order}",
                    row.len()
                )));
            }
            for &x in row {
                if x >= order {
                    return Err(GroupError::NotAGroup(format!("entry {x} in row {i} out of range")));
                }
                table.push(x as u32);
            }
        }
        for a in 0..order {
            if table[a] != a as u32 || table[a * order] != a as u32 {
                return Err(GroupError::NotAGroup(format!(
                    "element 0 is not the identity (fails at {a})"
                )));
            }
        }
        for a in 0..order {
            let mut seen_row = vec![false; order];
            let mut seen_col = vec![false; order];
            for b in 0..order {
                seen_row[table[a * order + b] as usize] = true;
                seen_col[table[b * order + a] as usize] = true;
            }
            if seen_row.iter().any(|s| !s) || seen_col.iter().any(|s| !s) {
                return Err(GroupError::NotAGroup(format!("element {a} has no inverse")));
            }
        }
        let assoc = |a: usize, b: usize, c: usize| {
            let ab = table[a * order + b] as usize;
            let bc = table[b * order + c] as usize;
            table[ab * order + c] == table[a * order + bc]
        };
        if order <= 64 {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        if !assoc(a, b, c) {
                            return Err(GroupError::NotAssociative { a, b, c });
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for _ in 0..10_000 {
                let (a, b, c) = (
                    rng.gen_range(0..order),
                    rng.gen_range(0..order),
                    rng.gen_range(0..order),
                );
                if !assoc(a, b, c) {
                    return Err(GroupError::NotAssociative { a, b, c });
                }
            }
        }
        let names = match names {
            Some(n) if n.len() == order => n,
            Some(n) => {
                return Err(GroupError::NotAGroup(format!(
                    "{} names for {order} elements",
                    n.len()
                )))
            }
            None => (0..order).map(|i| format!("#{i}")).collect(),
        };
        let inverse = Self::inverses(order, &table).expect("latin square has inverses");
        Ok(FiniteGroup {
            order,
            table,
            inverse,
            parts: names.into_iter().map(|n| vec![n]).collect(),
            spec: "table".to_string(),
            cyclic_factors: None,
            symmetric_degree: None,
        })
    }

    pub fn with_spec(mut self, spec: impl Into<String>) -> Self {
        self.spec = spec.into();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Element {
        0
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.order
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: Element) -> Element {
        self.inverse[a] as usize
    }

    /// `a * b^-1`
    pub fn div(&self, a: Element, b: Element) -> Element {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, g: Element, k: i64) -> Element {
        let base = if k < 0 { self.inv(g) } else { g };
        (0..k.unsigned_abs()).fold(0, |acc, _| self.mul(acc, base))
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn name(&self, g: Element) -> String {
        let parts = &self.parts[g];
        if parts.len() == 1 {
            parts[0].clone()
        } else {
            format!("({})", parts.join(","))
        }
    }

    /// Coordinates of an element of a direct product of cyclic groups.
    pub fn cyclic_factors(&self) -> Option<&[usize]> {
        self.cyclic_factors.as_deref()
    }

    pub fn coordinates(&self, g: Element) -> Option<Vec<usize>> {
        let factors = self.cyclic_factors.as_ref()?;
        let mut coords = vec![0; factors.len()];
        let mut rest = g;
        for (c, &f) in coords.iter_mut().zip(factors.iter()).rev() {
            *c = rest % f;
            rest /= f;
        }
        Some(coords)
    }

    pub fn from_coordinates(&self, coords: &[usize]) -> Option<Element> {
        let factors = self.cyclic_factors.as_ref()?;
        if coords.len() != factors.len() {
            return None;
        }
        Some(
            coords
                .iter()
                .zip(factors.iter())
                .fold(0, |acc, (&c, &f)| acc * f + c % f),
        )
    }

    /// Looks up an element by display name, by `#index`, or (for symmetric
    /// groups) by any cycle notation.
    pub fn element_by_name(&self, name: &str) -> Option<Element> {
        let norm: String = name.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(idx) = norm.strip_prefix('#') {
            return idx.parse::<usize>().ok().filter(|&i| i < self.order);
        }
        if let Some(g) = (0..self.order).find(|&g| self.name(g) == norm) {
            return Some(g);
        }
        if let Some(k) = self.symmetric_degree {
            let perm = parse_cycles(&norm, k)?;
            let all = all_permutations(k);
            return all.iter().position(|p| *p == perm);
        }
        if self.cyclic_factors.as_ref().is_some_and(|f| f.len() == 1) {
            let v: i64 = norm.parse().ok()?;
            return Some(v.rem_euclid(self.order as i64) as usize);
        }
        None
    }

    pub fn parse_element(&self, name: &str) -> Result<Element, GroupError> {
        self.element_by_name(name).ok_or_else(|| GroupError::UnknownElement {
            name: name.to_string(),
            group: self.spec.clone(),
        })
    }

    pub fn element_order(&self, g: Element) -> usize {
        let mut k = 1;
        let mut x = g;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a + 1..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Number of elements of each order, as a sorted map order -> count.
    pub fn order_histogram(&self) -> Vec<(usize, usize)> {
        let mut hist: std::collections::BTreeMap<usize, usize> = Default::default();
        for g in self.elements() {
            *hist.entry(self.element_order(g)).or_default() += 1;
        }
        hist.into_iter().collect()
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[Element]) -> Vec<Element> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order).filter(|&x| seen[x]).collect()
    }

    /// The subgroup generated by `gens` as a group in its own right,
    /// together with its embedding into `self`.
    pub fn subgroup_generated(&self, gens: &[Element]) -> (FiniteGroup, Vec<Element>) {
        let elems = self.closure(gens);
        let pos: HashMap<Element, usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let parts = elems.iter().map(|&e| self.parts[e].clone()).collect();
        let gen_names: Vec<String> = gens.iter().map(|&g| self.name(g)).collect();
        let sub = Self::from_mul(
            elems.len(),
            |a, b| pos[&self.mul(elems[a], elems[b])],
            parts,
            format!("<{}> in {}", gen_names.join(", "), self.spec),
        );
        (sub, elems)
    }

    /// Sorted elements of the normal closure of `gens`.
    pub fn normal_closure(&self, gens: &[Element]) -> Vec<Element> {
        let conjugates: BTreeSet<Element> = gens
            .iter()
            .flat_map(|&w| self.elements().map(move |x| (w, x)))
            .map(|(w, x)| self.mul(self.mul(x, w), self.inv(x)))
            .collect();
        let conj: Vec<Element> = conjugates.into_iter().collect();
        self.closure(&conj)
    }

    /// A small generating set, chosen greedily with elements of large order
    /// first.
    pub fn generating_set(&self) -> Vec<Element> {
        let mut by_order: Vec<Element> = self.elements().skip(1).collect();
        by_order.sort_by_key(|&g| (std::cmp::Reverse(self.element_order(g)), g));
        let mut gens = Vec::new();
        let mut current = vec![0];
        for g in by_order {
            if current.len() == self.order {
                break;
            }
            if current.binary_search(&g).is_err() {
                gens.push(g);
                current = self.closure(&gens);
            }
        }
        gens
    }
}

fn all_permutations(k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut current: Vec<u8> = Vec::with_capacity(k);
    let mut used = vec![false; k];
    fn rec(k: usize, current: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Vec<u8>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for x in 0..k {
            if !used[x] {
                used[x] = true;
                current.push(x as u8);
                rec(k, current, used, out);
                current.pop();
                used[x] = false;
            }
        }
    }
    rec(k, &mut current, &mut used, &mut out);
    out
}

/// Cycle notation with points numbered from 1; `()` is the identity.
pub fn cycle_notation(perm: &[u8]) -> String {
    let k = perm.len();
    let sep = if k >= 10 { "," } else { "" };
    let mut seen = vec![false; k];
    let mut out = String::new();
    for start in 0..k {
        if seen[start] || perm[start] as usize == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push((x + 1).to_string());
            x = perm[x] as usize;
        }
        out.push('(');
        out.push_str(&cycle.join(sep));
        out.push(')');
    }
    if out.is_empty() {
        "()".to_string()
    } else {
        out
    }
}

/// Parses a product of cycles, composed right to left.
fn parse_cycles(text: &str, k: usize) -> Option<Vec<u8>> {
    let mut perm: Vec<u8> = (0..k as u8).collect();
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        let body = rest.strip_prefix('(')?;
        let close = body.find(')')?;
        let inner = &body[..close];
        let points: Option<Vec<usize>> = if inner.is_empty() {
            Some(Vec::new())
        } else if inner.contains(',') {
            inner.split(',').map(|p| p.parse().ok()).collect()
        } else if k < 10 {
            inner.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect()
        } else {
            None
        };
        let points = points?;
        if points.iter().any(|&p| p == 0 || p > k) {
            return None;
        }
        let distinct: BTreeSet<usize> = points.iter().copied().collect();
        if distinct.len() != points.len() {
            return None;
        }
        cycles.push(points);
        rest = &body[close + 1..];
    }
    for cycle in cycles.iter().rev() {
        let mut step: Vec<u8> = (0..k as u8).collect();
        for (i, &p) in cycle.iter().enumerate() {
            step[p - 1] = (cycle[(i + 1) % cycle.len()] - 1) as u8;
        }
        // apply `step` after the permutation built so far
        perm = perm.iter().map(|&x| step[x as usize]).collect();
    }
    Some(perm)
}

/// Textual group descriptions such as `C6`, `S4`, `D5`, `C2xC2`, `C3xS3`
/// or `table:<path>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    Symmetric(usize),
    Dihedral(usize),
    Product(Vec<GroupSpec>),
    Table(PathBuf),
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(path) = s.strip_prefix("table:") {
            return Ok(GroupSpec::Table(PathBuf::from(path)));
        }
        let factors: Vec<&str> = s.split(['x', 'X', '×']).map(str::trim).collect();
        if factors.len() > 1 {
            return factors
                .iter()
                .map(|f| f.parse())
                .collect::<Result<Vec<_>, _>>()
                .map(GroupSpec::Product);
        }
        let bad = || GroupError::BadSpec(s.to_string());
        let mut chars = s.chars();
        let kind = chars.next().ok_or_else(bad)?;
        let number: usize = chars.as_str().parse().map_err(|_| bad())?;
        if number == 0 {
            return Err(bad());
        }
        match kind {
            'C' | 'Z' => Ok(GroupSpec::Cyclic(number)),
            'S' => Ok(GroupSpec::Symmetric(number)),
            'D' => Ok(GroupSpec::Dihedral(number)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(m) => write!(f, "C{m}"),
            GroupSpec::Symmetric(k) => write!(f, "S{k}"),
            GroupSpec::Dihedral(m) => write!(f, "D{m}"),
            GroupSpec::Product(parts) => {
                let names: Vec<String> = parts.iter().map(ToString::to_string).collect();
                f.write_str(&names.join("x"))
            }
            GroupSpec::Table(p) => write!(f, "table:{}", p.display()),
        }
    }
}

impl GroupSpec {
    pub fn order(&self) -> Option<usize> {
        match self {
            GroupSpec::Cyclic(m) => Some(*m),
            GroupSpec::Symmetric(k) => (1..=*k).try_fold(1usize, |acc, i| acc.checked_mul(i)),
            GroupSpec::Dihedral(m) => m.checked_mul(2),
            GroupSpec::Product(parts) => parts
                .iter()
                .try_fold(1usize, |acc, p| p.order().and_then(|o| acc.checked_mul(o))),
            GroupSpec::Table(_) => None,
        }
    }

    pub fn build(&self) -> Result<FiniteGroup, GroupError> {
        self.build_bounded(DEFAULT_ORDER_BOUND)
    }

    pub fn build_bounded(&self, bound: usize) -> Result<FiniteGroup, GroupError> {
        if let GroupSpec::Table(path) = self {
            let text = std::fs::read_to_string(path).map_err(|e| GroupError::TableFile {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
            return parse_table_text(&text).map(|g| g.with_spec(self.to_string()));
        }
        match self.order() {
            Some(o) if o <= bound => {}
            Some(o) => return Err(GroupError::OrderTooLarge { order: o, bound }),
            None => return Err(GroupError::OrderTooLarge { order: usize::MAX, bound }),
        }
        Ok(match self {
            GroupSpec::Cyclic(m) => FiniteGroup::cyclic(*m),
            GroupSpec::Symmetric(k) => FiniteGroup::symmetric(*k),
            GroupSpec::Dihedral(m) => FiniteGroup::dihedral(*m),
            GroupSpec::Product(parts) => {
                let built = parts
                    .iter()
                    .map(|p| p.build_bounded(bound))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut iter = built.into_iter();
                let first = iter.next().ok_or_else(|| GroupError::BadSpec(self.to_string()))?;
                iter.fold(first, |acc, g| FiniteGroup::product(&acc, &g))
            }
            GroupSpec::Table(_) => unreachable!(),
        })
    }
}

/// Whitespace-separated row-major indices; the order is the square root of
/// the entry count.
pub fn parse_table_text(text: &str) -> Result<FiniteGroup, GroupError> {
    let entries = text
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| GroupError::NotAGroup(format!("bad table entry {t:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let order = (entries.len() as f64).sqrt().round() as usize;
    if order * order != entries.len() || order == 0 {
        return Err(GroupError::NotAGroup(format!(
            "{} entries do not form a square table",
            entries.len()
        )));
    }
    let rows: Vec<Vec<usize>> = entries.chunks(order).map(<[usize]>::to_vec).collect();
    FiniteGroup::from_table(&rows, None)
}

/// A homomorphism from a finitely presented group to a finite group, given
/// by generator images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    source: Arc<FreeGroupPresentation>,
    target: Arc<FiniteGroup>,
    images: Vec<Element>,
}

impl GroupHom {
    pub fn new(
        source: Arc<FreeGroupPresentation>,
        target: Arc<FiniteGroup>,
        images: Vec<Element>,
    ) -> Result<Self, GroupError> {
        if images.len() != source.generators() as usize {
            return Err(GroupError::ImageCount {
                expected: source.generators() as usize,
                got: images.len(),
            });
        }
        for r in source.relators() {
            let value = eval_word(r, &images, &target).expect("images cover all generators");
            if value != 0 {
                return Err(GroupError::RelatorFails {
                    relator: r.to_string(),
                    value: target.name(value),
                });
            }
        }
        Ok(GroupHom {
            source,
            target,
            images,
        })
    }

    pub fn source(&self) -> &FreeGroupPresentation {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteGroup> {
        &self.target
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn apply(&self, w: &Word) -> Element {
        eval_word(w, &self.images, &self.target).expect("word over the source generators")
    }
}

/// Result of a node-limited homomorphism search.
#[derive(Debug, Clone)]
pub struct HomSearchOutcome {
    pub homs: Vec<GroupHom>,
    pub nodes: u64,
    /// False when the node limit stopped the search early.
    pub complete: bool,
}

/// All homomorphisms from `p` to `h` (up to `limit`) that keep the words of
/// each pair in `separate` apart, in lexicographic order of image tuples.
pub fn find_homomorphisms(
    p: &FreeGroupPresentation,
    h: &Arc<FiniteGroup>,
    separate: &[(Word, Word)],
    limit: usize,
) -> Vec<GroupHom> {
    search_homomorphisms(p, h, separate, limit, None).homs
}

struct Constraint {
    word: Word,
    separation: bool,
}

pub fn search_homomorphisms(
    p: &FreeGroupPresentation,
    h: &Arc<FiniteGroup>,
    separate: &[(Word, Word)],
    limit: usize,
    node_limit: Option<u64>,
) -> HomSearchOutcome {
    let rank = p.generators() as usize;
    let source = Arc::new(p.clone());
    let mut outcome = HomSearchOutcome {
        homs: Vec::new(),
        nodes: 0,
        complete: true,
    };
    if limit == 0 {
        return outcome;
    }
    // Constraints are bucketed by the generator that completes them.
    let mut by_depth: Vec<Vec<Constraint>> = (0..=rank).map(|_| Vec::new()).collect();
    for r in p.relators() {
        by_depth[r.max_generator() as usize].push(Constraint {
            word: r.clone(),
            separation: false,
        });
    }
    for (u, v) in separate {
        let w = u.mul(&v.inverse());
        by_depth[(w.max_generator() as usize).min(rank)].push(Constraint {
            word: w,
            separation: true,
        });
    }
    if by_depth[0].iter().any(|c| c.separation) {
        return outcome;
    }

    struct Search<'a> {
        rank: usize,
        h: &'a FiniteGroup,
        by_depth: &'a [Vec<Constraint>],
        images: Vec<Element>,
        node_limit: Option<u64>,
        limit: usize,
        found: Vec<Vec<Element>>,
        nodes: u64,
        aborted: bool,
    }

    impl Search<'_> {
        fn eval(&self, w: &Word) -> Element {
            let mut acc = 0;
            for l in w.letters() {
                let x = self.images[l.index()];
                acc = self.h.mul(acc, if l.is_inverse() { self.h.inv(x) } else { x });
            }
            acc
        }

        // A relator containing the newest generator exactly once fixes its image.
        fn forced(&self, depth: usize) -> Option<Element> {
            let gen = depth as u32;
            for c in self.by_depth[depth].iter().filter(|c| !c.separation) {
                let hits: Vec<usize> = c
                    .word
                    .letters()
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| l.generator() == gen)
                    .map(|(i, _)| i)
                    .collect();
                if hits.len() == 1 {
                    let i = hits[0];
                    let prefix = Word::reduce(c.word.letters()[..i].iter().copied());
                    let suffix = Word::reduce(c.word.letters()[i + 1..].iter().copied());
                    let a = self.eval(&prefix);
                    let b = self.eval(&suffix);
                    // a * x^e * b = 1  =>  x^e = a^-1 b^-1
                    let xe = self.h.inv(self.h.mul(b, a));
                    let x = if c.word.letters()[i].is_inverse() { self.h.inv(xe) } else { xe };
                    return Some(x);
                }
            }
            None
        }

        fn consistent(&self, depth: usize) -> bool {
            self.by_depth[depth].iter().all(|c| {
                let v = self.eval(&c.word);
                if c.separation {
                    v != 0
                } else {
                    v == 0
                }
            })
        }

        fn run(&mut self, depth: usize) {
            if self.aborted || self.found.len() >= self.limit {
                return;
            }
            if depth > self.rank {
                self.found.push(self.images.clone());
                return;
            }
            let candidates: Vec<Element> = match self.forced(depth) {
                Some(x) => vec![x],
                None => self.h.elements().collect(),
            };
            for x in candidates {
                if let Some(lim) = self.node_limit {
                    if self.nodes >= lim {
                        self.aborted = true;
                        return;
                    }
                }
                self.nodes += 1;
                self.images[depth - 1] = x;
                if self.consistent(depth) {
                    self.run(depth + 1);
                }
                if self.aborted || self.found.len() >= self.limit {
                    return;
                }
            }
        }
    }

    let mut search = Search {
        rank,
        h,
        by_depth: &by_depth,
        images: vec![0; rank],
        node_limit,
        limit,
        found: Vec::new(),
        nodes: 0,
        aborted: false,
    };
    if search.consistent(0) {
        search.run(1);
    }
    outcome.nodes = search.nodes;
    outcome.complete = !search.aborted;
    for images in search.found {
        let hom = GroupHom::new(source.clone(), h.clone(), images).expect("search emits homomorphisms");
        for (u, v) in separate {
            assert_ne!(hom.apply(u), hom.apply(v), "search emitted a hom gluing {u} and {v}");
        }
        outcome.homs.push(hom);
    }
    outcome
}

fn screen_isomorphic(g1: &FiniteGroup, g2: &FiniteGroup) -> bool {
    g1.order() == g2.order()
        && g1.is_abelian() == g2.is_abelian()
        && g1.order_histogram() == g2.order_histogram()
}

/// Extends generator images to a map on all of `g1`; `None` if the images do
/// not define an injective homomorphism onto `g2`.
fn extend_to_isomorphism(
    g1: &FiniteGroup,
    g2: &FiniteGroup,
    gens: &[Element],
    images: &[Element],
) -> Option<Vec<Element>> {
    let mut phi = vec![usize::MAX; g1.order()];
    phi[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        for (&g, &img) in gens.iter().zip(images) {
            let y = g1.mul(x, g);
            let want = g2.mul(phi[x], img);
            if phi[y] == usize::MAX {
                phi[y] = want;
                queue.push_back(y);
            } else if phi[y] != want {
                return None;
            }
        }
    }
    let mut hit = vec![false; g2.order()];
    for &v in &phi {
        if v == usize::MAX || hit[v] {
            return None;
        }
        hit[v] = true;
    }
    Some(phi)
}

/// Calls `visit` with every isomorphism `g1 -> g2` (as an element map) until
/// it breaks.
pub fn for_each_isomorphism<F>(g1: &FiniteGroup, g2: &FiniteGroup, mut visit: F) -> ControlFlow<()>
where
    F: FnMut(&[Element]) -> ControlFlow<()>,
{
    if !screen_isomorphic(g1, g2) {
        return ControlFlow::Continue(());
    }
    let gens = g1.generating_set();
    let candidates: Vec<Vec<Element>> = gens
        .iter()
        .map(|&g| {
            let o = g1.element_order(g);
            g2.elements().filter(|&y| g2.element_order(y) == o).collect()
        })
        .collect();
    let mut images = vec![0; gens.len()];
    fn rec<F: FnMut(&[Element]) -> ControlFlow<()>>(
        depth: usize,
        g1: &FiniteGroup,
        g2: &FiniteGroup,
        gens: &[Element],
        candidates: &[Vec<Element>],
        images: &mut Vec<Element>,
        visit: &mut F,
    ) -> ControlFlow<()> {
        if depth == gens.len() {
            if let Some(phi) = extend_to_isomorphism(g1, g2, gens, images) {
                return visit(&phi);
            }
            return ControlFlow::Continue(());
        }
        for &c in &candidates[depth] {
            images[depth] = c;
            rec(depth + 1, g1, g2, gens, candidates, images, visit)?;
        }
        ControlFlow::Continue(())
    }
    rec(0, g1, g2, &gens, &candidates, &mut images, &mut visit)
}

pub fn find_isomorphism(g1: &FiniteGroup, g2: &FiniteGroup) -> Option<Vec<Element>> {
    let mut found = None;
    let _ = for_each_isomorphism(g1, g2, |phi| {
        found = Some(phi.to_vec());
        ControlFlow::Break(())
    });
    found
}

pub fn are_isomorphic_small(g1: &FiniteGroup, g2: &FiniteGroup) -> Result<bool, GroupError> {
    are_isomorphic_bounded(g1, g2, DEFAULT_ISOMORPHISM_BOUND)
}

pub fn are_isomorphic_bounded(g1: &FiniteGroup, g2: &FiniteGroup, bound: usize) -> Result<bool, GroupError> {
    for g in [g1, g2] {
        if g.order() > bound {
            return Err(GroupError::OrderTooLarge {
                order: g.order(),
                bound,
            });
        }
    }
    Ok(find_isomorphism(g1, g2).is_some())
}
