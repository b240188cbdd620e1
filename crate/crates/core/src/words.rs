//! Free-group words, finite presentations and integer abelianization.
//!
//! Generators are numbered from 1 (`x1`, `x2`, ...). A [`Word`] is always
//! stored freely reduced, so two words denote the same element of the free
//! group exactly when they compare equal.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::fingrp::{Element, FiniteGroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("no image given for generator x{0}")]
    MissingImage(u32),
    #[error("generator x{generator} out of range for a presentation on {rank} generators")]
    GeneratorOutOfRange { generator: u32, rank: u32 },
    #[error("relator {0} is the identity word")]
    IdentityRelator(usize),
    #[error("matrix size must be at least 1")]
    EmptyMatrix,
    #[error("cannot parse word {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// A generator or the inverse of a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    generator: u32,
    inverse: bool,
}

impl Letter {
    /// `generator` is 1-based.
    pub fn new(generator: u32, inverse: bool) -> Self {
        assert!(generator >= 1, "generators are numbered from 1");
        Letter { generator, inverse }
    }

    pub fn positive(generator: u32) -> Self {
        Letter::new(generator, false)
    }

    pub fn negative(generator: u32) -> Self {
        Letter::new(generator, true)
    }

    pub fn generator(self) -> u32 {
        self.generator
    }

    /// Zero-based generator index.
    pub fn index(self) -> usize {
        self.generator as usize - 1
    }

    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

/// A freely reduced word in the free group.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(generator: u32) -> Self {
        Word(vec![Letter::positive(generator)])
    }

    /// Freely reduces an arbitrary sequence of letters.
    pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for letter in raw {
            match stack.last() {
                Some(&top) if top.cancels(letter) => {
                    stack.pop();
                }
                _ => stack.push(letter),
            }
        }
        Word(stack)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &Word) -> Self {
        Word::reduce(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn pow(&self, exponent: i64) -> Self {
        let base = if exponent < 0 {
            self.inverse()
        } else {
            self.clone()
        };
        let mut out = Word::identity();
        for _ in 0..exponent.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Strips letters that cancel cyclically, `a w a^-1 -> w`.
    pub fn cyclically_reduced(&self) -> Word {
        let mut s = 0;
        let mut e = self.0.len();
        while e - s >= 2 && self.0[s].cancels(self.0[e - 1]) {
            s += 1;
            e -= 1;
        }
        Word(self.0[s..e].to_vec())
    }

    /// Whether the cyclic reductions of the two words are rotations of
    /// each other.
    pub fn is_cyclic_conjugate(&self, other: &Word) -> bool {
        let (a, b) = (self.cyclically_reduced(), other.cyclically_reduced());
        if a.len() != b.len() {
            return false;
        }
        if a.is_empty() {
            return true;
        }
        (0..a.len()).any(|r| a.0[r..].iter().chain(&a.0[..r]).eq(b.0.iter()))
    }

    /// Largest generator number occurring in the word, 0 for the identity.
    pub fn max_generator(&self) -> u32 {
        self.0.iter().map(|l| l.generator).max().unwrap_or(0)
    }

    /// Exponent sum of each of the first `rank` generators.
    pub fn exponent_sums(&self, rank: u32) -> Vec<i64> {
        let mut sums = vec![0i64; rank as usize];
        for letter in &self.0 {
            if letter.index() < sums.len() {
                sums[letter.index()] += letter.sign();
            }
        }
        sums
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        // Runs of the same letter print as powers.
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let letter = self.0[i];
            let mut run = 1;
            while i + run < self.0.len() && self.0[i + run] == letter {
                run += 1;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let exp = run as i64 * letter.sign();
            if exp == 1 {
                write!(f, "x{}", letter.generator)?;
            } else {
                write!(f, "x{}^{}", letter.generator, exp)?;
            }
            i += run;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    /// Accepts `x1 x2 x1^-1`, `x1x2`, `(x1 x2)^3`, `x1*x2` and `1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parser = WordParser {
            input: s,
            chars: s.chars().collect(),
            pos: 0,
        };
        let word = parser.sequence()?;
        parser.skip_ws();
        if parser.pos != parser.chars.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(word)
    }
}

struct WordParser<'a> {
    input: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl WordParser<'_> {
    fn error(&self, reason: &str) -> WordError {
        WordError::Parse {
            input: self.input.to_string(),
            reason: format!("{reason} at offset {}", self.pos),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_whitespace() || self.chars[self.pos] == '*' || self.chars[self.pos] == '.')
        {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn sequence(&mut self) -> Result<Word, WordError> {
        let mut letters = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None | Some(')') => break,
                _ => {
                    let factor = self.factor()?;
                    letters.extend_from_slice(factor.letters());
                }
            }
        }
        Ok(Word::reduce(letters))
    }

    fn number(&mut self) -> Result<i64, WordError> {
        let start = self.pos;
        if matches!(self.peek(), Some('-') | Some('+')) {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<i64>().map_err(|_| self.error("expected an integer"))
    }

    fn factor(&mut self) -> Result<Word, WordError> {
        let base = match self.peek() {
            Some('x') | Some('X') => {
                self.pos += 1;
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let digits: String = self.chars[start..self.pos].iter().collect();
                let generator: u32 = digits
                    .parse()
                    .map_err(|_| self.error("expected generator number after 'x'"))?;
                if generator == 0 {
                    return Err(self.error("generators are numbered from 1"));
                }
                Word::generator(generator)
            }
            Some('1') => {
                self.pos += 1;
                Word::identity()
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.sequence()?;
                if self.peek() != Some(')') {
                    return Err(self.error("unbalanced parenthesis"));
                }
                self.pos += 1;
                inner
            }
            _ => return Err(self.error("expected 'x<k>', '1' or '('")),
        };
        self.skip_inline_ws();
        if self.peek() == Some('^') {
            self.pos += 1;
            while matches!(self.peek(), Some(' ') | Some('\t')) {
                self.pos += 1;
            }
            let exp = self.number()?;
            Ok(base.pow(exp))
        } else {
            Ok(base)
        }
    }

    fn skip_inline_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c == ' ' || c == '\t') {
            // Only skip if a caret follows; otherwise the space separates factors.
            let mut look = self.pos;
            while matches!(self.chars.get(look), Some(c) if *c == ' ' || *c == '\t') {
                look += 1;
            }
            if self.chars.get(look) == Some(&'^') {
                self.pos = look;
            } else {
                break;
            }
        }
    }
}

/// Evaluates `word` in `group`, with `images[k]` the image of generator
/// `x{k+1}`.
pub fn eval_word(word: &Word, images: &[Element], group: &FiniteGroup) -> Result<Element, WordError> {
    let mut acc = group.identity();
    for letter in word.letters() {
        let image = *images
            .get(letter.index())
            .ok_or(WordError::MissingImage(letter.generator()))?;
        let factor = if letter.is_inverse() {
            group.inv(image)
        } else {
            image
        };
        acc = group.mul(acc, factor);
    }
    Ok(acc)
}

/// The words `x_i x_{i+1} ... x_j`, their inverses and the identity, over
/// generators `x_1 .. x_{n-1}`: the support of the free elementary grading
/// on `n x n` matrices.
pub fn support_words(n: usize) -> Result<BTreeSet<Word>, WordError> {
    if n == 0 {
        return Err(WordError::EmptyMatrix);
    }
    let mut words = BTreeSet::new();
    words.insert(Word::identity());
    for i in 1..n as u32 {
        for j in i..n as u32 {
            let w = Word::reduce((i..=j).map(Letter::positive));
            words.insert(w.inverse());
            words.insert(w);
        }
    }
    Ok(words)
}

/// `<x1 .. xl | relators>` together with a list of marked words that should
/// end up in the support of a grading built from the presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeGroupPresentation {
    generators: u32,
    relators: Vec<Word>,
    marked: Vec<Word>,
}

impl FreeGroupPresentation {
    pub fn new(generators: u32, relators: Vec<Word>, marked: Vec<Word>) -> Result<Self, WordError> {
        for (i, r) in relators.iter().enumerate() {
            if r.is_empty() {
                return Err(WordError::IdentityRelator(i));
            }
        }
        for w in relators.iter().chain(marked.iter()) {
            if w.max_generator() > generators {
                return Err(WordError::GeneratorOutOfRange {
                    generator: w.max_generator(),
                    rank: generators,
                });
            }
        }
        Ok(FreeGroupPresentation {
            generators,
            relators,
            marked,
        })
    }

    pub fn free(generators: u32) -> Self {
        FreeGroupPresentation {
            generators,
            relators: Vec::new(),
            marked: Vec::new(),
        }
    }

    pub fn generators(&self) -> u32 {
        self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn marked(&self) -> &[Word] {
        &self.marked
    }

    pub fn with_marked(mut self, marked: Vec<Word>) -> Result<Self, WordError> {
        for w in &marked {
            if w.max_generator() > self.generators {
                return Err(WordError::GeneratorOutOfRange {
                    generator: w.max_generator(),
                    rank: self.generators,
                });
            }
        }
        self.marked = marked;
        Ok(self)
    }

    /// Total letter count of relators and marked words.
    pub fn total_length(&self) -> usize {
        self.relators.iter().chain(self.marked.iter()).map(Word::len).sum()
    }

    /// The generators x relators matrix of exponent sums.
    pub fn exponent_matrix(&self) -> Vec<Vec<BigInt>> {
        let columns: Vec<Vec<i64>> = self
            .relators
            .iter()
            .map(|r| r.exponent_sums(self.generators))
            .collect();
        (0..self.generators as usize)
            .map(|g| columns.iter().map(|c| BigInt::from(c[g])).collect())
            .collect()
    }
}

impl fmt::Display for FreeGroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = (1..=self.generators).map(|g| format!("x{g}")).collect();
        let rels: Vec<String> = self.relators.iter().map(Word::to_string).collect();
        write!(f, "< {} | {} >", gens.join(", "), rels.join(", "))
    }
}

/// Diagonal form `D = U * A * V` with `U`, `V` unimodular and the nonzero
/// diagonal entries forming a divisibility chain.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub left: Vec<Vec<BigInt>>,
    pub right: Vec<Vec<BigInt>>,
    pub reduced: Vec<Vec<BigInt>>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }
}

fn identity_matrix(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Smith normal form over the integers. `a` is given row-major with `rows`
/// rows; an empty `a` is treated as a `rows x 0` matrix.
pub fn smith_normal_form(a: &[Vec<BigInt>], rows: usize, cols: usize) -> SmithForm {
    let mut m: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| (0..cols).map(|j| a[i][j].clone()).collect())
        .collect();
    let mut u = identity_matrix(rows);
    let mut v = identity_matrix(cols);

    let swap_cols = |mat: &mut Vec<Vec<BigInt>>, a: usize, b: usize| {
        for row in mat.iter_mut() {
            row.swap(a, b);
        }
    };
    // row_i += q * row_k
    fn add_row(mat: &mut [Vec<BigInt>], target: usize, source: usize, q: &BigInt) {
        let src = mat[source].clone();
        for (t, s) in mat[target].iter_mut().zip(src.iter()) {
            *t += q * s;
        }
    }
    fn add_col(mat: &mut [Vec<BigInt>], target: usize, source: usize, q: &BigInt) {
        for row in mat.iter_mut() {
            let s = row[source].clone();
            row[target] += q * s;
        }
    }

    let mut k = 0;
    while k < rows.min(cols) {
        // Pivot: smallest nonzero absolute value in the trailing block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if !m[i][j].is_zero() {
                    let better = match pivot {
                        None => true,
                        Some((pi, pj)) => m[i][j].abs() < m[pi][pj].abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(k, pi);
        u.swap(k, pi);
        swap_cols(&mut m, k, pj);
        swap_cols(&mut v, k, pj);

        let mut dirty = false;
        for i in k + 1..rows {
            if !m[i][k].is_zero() {
                let q = -m[i][k].div_floor(&m[k][k]);
                add_row(&mut m, i, k, &q);
                add_row(&mut u, i, k, &q);
                if !m[i][k].is_zero() {
                    dirty = true;
                }
            }
        }
        for j in k + 1..cols {
            if !m[k][j].is_zero() {
                let q = -m[k][j].div_floor(&m[k][k]);
                add_col(&mut m, j, k, &q);
                add_col(&mut v, j, k, &q);
                if !m[k][j].is_zero() {
                    dirty = true;
                }
            }
        }
        if dirty {
            continue;
        }
        // Divisibility: fold an offending row into row k and retry.
        let mut offender = None;
        'search: for i in k + 1..rows {
            for j in k + 1..cols {
                if !(&m[i][j] % &m[k][k]).is_zero() {
                    offender = Some(i);
                    break 'search;
                }
            }
        }
        if let Some(i) = offender {
            let one = BigInt::one();
            add_row(&mut m, k, i, &one);
            add_row(&mut u, k, i, &one);
            continue;
        }
        if m[k][k].is_negative() {
            for x in m[k].iter_mut() {
                *x = -x.clone();
            }
            for x in u[k].iter_mut() {
                *x = -x.clone();
            }
        }
        k += 1;
    }
    let diagonal = (0..rows.min(cols)).map(|i| m[i][i].clone()).collect();
    SmithForm {
        diagonal,
        left: u,
        right: v,
        reduced: m,
    }
}

/// Free rank and torsion invariants of a finitely generated abelian group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|t| format!("Z/{t}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" x "))
        }
    }
}

pub fn abelianization_invariants(p: &FreeGroupPresentation) -> AbelianInvariants {
    let rows = p.generators() as usize;
    let cols = p.relators().len();
    let snf = smith_normal_form(&p.exponent_matrix(), rows, cols);
    let rank = snf.rank();
    let torsion = snf
        .diagonal
        .iter()
        .filter(|d| !d.is_zero() && !d.is_one())
        .cloned()
        .collect();
    AbelianInvariants {
        free_rank: rows - rank,
        torsion,
    }
}
