//! Todd–Coxeter coset enumeration over the trivial subgroup.
//!
//! HLT strategy: every live coset is scanned against every relator in
//! order, with undefined entries filled by new cosets; coincidences are
//! processed in place with a union-find forwarding table. Coset numbering
//! is deterministic, so completed tables are reproducible.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::fingrp::{Element, FiniteGroup, DEFAULT_ORDER_BOUND};
use crate::words::{FreeGroupPresentation, Letter, Word};

/// Default coset budget.
pub const DEFAULT_MAX_COSETS: usize = 50_000;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub enum CosetOutcome {
    /// The group is finite; its table and the images of the generators.
    Completed {
        group: Arc<FiniteGroup>,
        generator_images: Vec<Element>,
    },
    /// The enumeration closed, but the group is larger than the order bound
    /// for tabulated groups.
    TooLarge { order: usize },
    /// The budget ran out. Nothing is claimed about finiteness.
    Inconclusive { cosets_used: usize },
}

impl CosetOutcome {
    pub fn order(&self) -> Option<usize> {
        match self {
            CosetOutcome::Completed { group, .. } => Some(group.order()),
            CosetOutcome::TooLarge { order } => Some(*order),
            CosetOutcome::Inconclusive { .. } => None,
        }
    }

    pub fn completed(&self) -> Option<(&Arc<FiniteGroup>, &[Element])> {
        match self {
            CosetOutcome::Completed { group, generator_images } => Some((group, generator_images)),
            _ => None,
        }
    }
}

struct Enumerator {
    cols: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    defined: usize,
    max_cosets: usize,
    overflow: bool,
    queue: Vec<u32>,
}

fn column(l: Letter) -> usize {
    2 * l.index() + usize::from(l.is_inverse())
}

fn inverse_column(x: usize) -> usize {
    x ^ 1
}

impl Enumerator {
    fn new(generators: usize, max_cosets: usize) -> Self {
        let cols = 2 * generators;
        Enumerator {
            cols,
            table: vec![NONE; cols],
            parent: vec![0],
            defined: 1,
            max_cosets,
            overflow: false,
            queue: Vec::new(),
        }
    }

    #[inline]
    fn get(&self, c: u32, x: usize) -> u32 {
        self.table[c as usize * self.cols + x]
    }

    #[inline]
    fn set(&mut self, c: u32, x: usize, d: u32) {
        self.table[c as usize * self.cols + x] = d;
    }

    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn define(&mut self, c: u32, x: usize) -> Option<u32> {
        if self.defined >= self.max_cosets {
            self.overflow = true;
            return None;
        }
        let d = self.parent.len() as u32;
        self.parent.push(d);
        self.table.extend(std::iter::repeat_n(NONE, self.cols));
        self.defined += 1;
        self.set(c, x, d);
        self.set(d, inverse_column(x), c);
        Some(d)
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut x = c;
        while self.parent[x as usize] != r {
            let next = self.parent[x as usize];
            self.parent[x as usize] = r;
            x = next;
        }
        r
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            self.parent[hi as usize] = lo;
            self.queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for x in 0..self.cols {
                let d = self.get(g, x);
                if d == NONE {
                    continue;
                }
                let xi = inverse_column(x);
                self.set(d, xi, NONE);
                let mu = self.rep(g);
                let nu = self.rep(d);
                let mux = self.get(mu, x);
                if mux != NONE {
                    self.merge(nu, mux);
                } else {
                    let nuxi = self.get(nu, xi);
                    if nuxi != NONE {
                        self.merge(mu, nuxi);
                    } else {
                        self.set(mu, x, nu);
                        self.set(nu, xi, mu);
                    }
                }
            }
        }
    }

    /// Scans relator `w` (as columns) at coset `c`, defining cosets as
    /// needed. Returns false when the budget ran out.
    fn scan_and_fill(&mut self, c: u32, w: &[usize]) -> bool {
        if w.is_empty() {
            return true;
        }
        let mut f = c;
        let mut b = c;
        let mut i = 0usize;
        let mut j = w.len() as isize - 1;
        loop {
            while (i as isize) <= j {
                let next = self.get(f, w[i]);
                if next == NONE {
                    break;
                }
                f = next;
                i += 1;
            }
            if (i as isize) > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return true;
            }
            while j >= i as isize {
                let next = self.get(b, inverse_column(w[j as usize]));
                if next == NONE {
                    break;
                }
                b = next;
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return true;
            }
            if j == i as isize {
                self.set(f, w[i], b);
                self.set(b, inverse_column(w[i]), f);
                return true;
            }
            if self.define(f, w[i]).is_none() {
                return false;
            }
        }
    }

    fn pass(&mut self, relators: &[Vec<usize>]) -> bool {
        let mut c: u32 = 0;
        while (c as usize) < self.parent.len() {
            for r in relators {
                if !self.is_live(c) {
                    break;
                }
                if !self.scan_and_fill(c, r) {
                    return false;
                }
            }
            for x in 0..self.cols {
                if !self.is_live(c) {
                    break;
                }
                if self.get(c, x) == NONE && self.define(c, x).is_none() {
                    return false;
                }
            }
            c += 1;
        }
        true
    }

    /// Every live row is full and every relator closes at every live coset.
    fn is_complete(&self, relators: &[Vec<usize>]) -> bool {
        (0..self.parent.len() as u32).filter(|&c| self.is_live(c)).all(|c| {
            (0..self.cols).all(|x| {
                let d = self.get(c, x);
                d != NONE && self.is_live(d) && self.get(d, inverse_column(x)) == c
            }) && relators.iter().all(|r| {
                r.iter()
                    .try_fold(c, |acc, &x| Some(self.get(acc, x)).filter(|&d| d != NONE))
                    == Some(c)
            })
        })
    }

    fn run(&mut self, relators: &[Vec<usize>]) -> bool {
        loop {
            if !self.pass(relators) {
                return false;
            }
            if self.is_complete(relators) {
                return true;
            }
        }
    }
}

/// Enumerates the cosets of the trivial subgroup of `p`.
pub fn coset_enumerate(p: &FreeGroupPresentation, max_cosets: usize) -> CosetOutcome {
    coset_enumerate_bounded(p, max_cosets, DEFAULT_ORDER_BOUND)
}

pub fn coset_enumerate_bounded(p: &FreeGroupPresentation, max_cosets: usize, order_bound: usize) -> CosetOutcome {
    let max_cosets = max_cosets.max(1);
    let generators = p.generators() as usize;
    let mut relators: Vec<Vec<usize>> = Vec::new();
    for r in p.relators() {
        let cols: Vec<usize> = r.letters().iter().map(|&l| column(l)).collect();
        if !relators.contains(&cols) {
            relators.push(cols);
        }
    }
    let mut e = Enumerator::new(generators, max_cosets);
    if !e.run(&relators) || e.overflow {
        return CosetOutcome::Inconclusive { cosets_used: max_cosets };
    }

    // Renumber live cosets breadth first from the subgroup coset.
    let total = e.parent.len();
    let mut number = vec![usize::MAX; total];
    let mut order_list: Vec<u32> = vec![0];
    // spanning tree: (parent element, column) for each element except 0
    let mut tree: Vec<(usize, usize)> = vec![(0, 0)];
    number[0] = 0;
    let mut queue = VecDeque::from([0u32]);
    while let Some(c) = queue.pop_front() {
        for x in 0..e.cols {
            let d = e.get(c, x);
            debug_assert!(d != NONE && e.is_live(d));
            if number[d as usize] == usize::MAX {
                number[d as usize] = order_list.len();
                tree.push((number[c as usize], x));
                order_list.push(d);
                queue.push_back(d);
            }
        }
    }
    let order = order_list.len();
    if order > order_bound {
        return CosetOutcome::TooLarge { order };
    }
    let action: Vec<Vec<usize>> = order_list
        .iter()
        .map(|&c| (0..e.cols).map(|x| number[e.get(c, x) as usize]).collect())
        .collect();

    // element b = (tree parent of b) * (letter of b); right multiplication
    // by a letter is the coset action.
    let mut table = vec![vec![0usize; order]; order];
    for a in 0..order {
        table[a][0] = a;
        for b in 1..order {
            let (pb, x) = tree[b];
            table[a][b] = action[table[a][pb]][x];
        }
    }
    let mut names: Vec<Word> = vec![Word::identity(); order];
    for b in 1..order {
        let (pb, x) = tree[b];
        let letter = Letter::new((x / 2 + 1) as u32, x % 2 == 1);
        names[b] = names[pb].mul(&Word::reduce([letter]));
    }
    let names: Vec<String> = names.iter().map(Word::to_string).collect();
    let group = FiniteGroup::from_table(&table, Some(names))
        .expect("coset enumeration produced a group table")
        .with_spec(format!("presented({order})"));
    let generator_images = (0..generators).map(|g| action[0][2 * g]).collect();
    CosetOutcome::Completed {
        group: Arc::new(group),
        generator_images,
    }
}
