//! Universal groups of gradings as finite presentations, and the
//! construction of an elementary grading whose universal group is a given
//! finitely presented group.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::coset::{coset_enumerate, CosetOutcome};
use crate::fingrp::{Element, FiniteGroup};
use crate::grading::{close_partition, coarsen, ElementaryGrading, GradingError, Label, LabelDomain, SupportTable};
use crate::words::{eval_word, FreeGroupPresentation, Letter, Word};

/// `G_Γ = F(supp) / <<g h t^-1>>` with the unit symbol eliminated.
#[derive(Debug, Clone)]
pub struct UniversalPresentation {
    presentation: FreeGroupPresentation,
    kappa: Vec<Word>,
    generator_symbols: Vec<usize>,
    diff_set: BTreeSet<Word>,
}

impl UniversalPresentation {
    pub fn presentation(&self) -> &FreeGroupPresentation {
        &self.presentation
    }

    /// Image of each support symbol in the free group on the generators.
    pub fn kappa(&self) -> &[Word] {
        &self.kappa
    }

    /// Symbol carried by each generator.
    pub fn generator_symbols(&self) -> &[usize] {
        &self.generator_symbols
    }

    /// Reduced words `κ(u) κ(v)^-1` for distinct symbols `u, v`.
    pub fn diff_set(&self) -> &BTreeSet<Word> {
        &self.diff_set
    }

    /// All ordered pairs of distinct symbols as word pairs, one per pair
    /// before any deduplication.
    pub fn separation_pairs(&self) -> Vec<(Word, Word)> {
        let k = self.kappa.len();
        let mut out = Vec::with_capacity(k * k.saturating_sub(1));
        for u in 0..k {
            for v in 0..k {
                if u != v {
                    out.push((self.kappa[u].clone(), self.kappa[v].clone()));
                }
            }
        }
        out
    }

    /// Unordered pairs of distinct symbols, enough for separation.
    pub fn separation_pairs_unordered(&self) -> Vec<(Word, Word)> {
        let k = self.kappa.len();
        let mut out = Vec::new();
        for u in 0..k {
            for v in u + 1..k {
                out.push((self.kappa[u].clone(), self.kappa[v].clone()));
            }
        }
        out
    }

    /// Images of the support symbols under generator images in `group`.
    pub fn symbol_images(&self, group: &FiniteGroup, images: &[Element]) -> Vec<Element> {
        self.kappa
            .iter()
            .map(|w| eval_word(w, images, group).expect("kappa uses presentation generators"))
            .collect()
    }
}

pub fn universal_presentation(table: &SupportTable) -> UniversalPresentation {
    let k = table.len();
    let mut kappa = vec![Word::identity(); k];
    let mut generator_symbols = Vec::new();
    for s in 0..k {
        if Some(s) != table.unit() {
            generator_symbols.push(s);
            kappa[s] = Word::generator(generator_symbols.len() as u32);
        }
    }
    let mut relators: Vec<Word> = Vec::new();
    let mut seen = BTreeSet::new();
    for (&(g, h), &t) in table.products() {
        let r = kappa[g].mul(&kappa[h]).mul(&kappa[t].inverse());
        if !r.is_empty() && seen.insert(r.clone()) {
            relators.push(r);
        }
    }
    let mut diff_set = BTreeSet::new();
    for u in 0..k {
        for v in 0..k {
            if u != v {
                diff_set.insert(kappa[u].mul(&kappa[v].inverse()));
            }
        }
    }
    let presentation = FreeGroupPresentation::new(generator_symbols.len() as u32, relators, Vec::new())
        .expect("relators are nonempty words over the symbol generators");
    UniversalPresentation {
        presentation,
        kappa,
        generator_symbols,
        diff_set,
    }
}

/// The elementary grading on `M_n`, `n = l + 1 + Σ|w_i|`, whose
/// superdiagonal degrees spell the relators, then the marked words, then
/// the generators `x1 .. xl`. Labels are free words; interpret them in the
/// presented group with [`realize_in_group`].
pub fn grading_from_presentation(p: &FreeGroupPresentation) -> ElementaryGrading {
    let letters = p
        .relators()
        .iter()
        .chain(p.marked())
        .flat_map(|w| w.letters().iter().copied())
        .chain((1..=p.generators()).map(Letter::positive));
    let offdiagonal = letters.map(|l| Label::Word(Word::reduce([l]))).collect();
    ElementaryGrading::from_offdiagonal(LabelDomain::Free { rank: p.generators() }, offdiagonal)
        .expect("letters lie in the free group on the presentation generators")
}

/// Size of the matrix built by [`grading_from_presentation`].
pub fn construction_size(p: &FreeGroupPresentation) -> usize {
    p.generators() as usize + 1 + p.total_length()
}

/// 0-based `(row, column)` of the matrix unit spelling each relator and
/// then each marked word.
pub fn word_positions(p: &FreeGroupPresentation) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for w in p.relators().iter().chain(p.marked()) {
        out.push((start, start + w.len()));
        start += w.len();
    }
    out
}

/// Evaluates the free-word labels of `grading` in `group`.
pub fn realize_in_group(
    grading: &ElementaryGrading,
    group: &Arc<FiniteGroup>,
    images: &[Element],
) -> Result<ElementaryGrading, GradingError> {
    let tuple = grading
        .tuple()
        .iter()
        .map(|l| match l {
            Label::Word(w) => eval_word(w, images, group).map(Label::Element).map_err(|e| {
                GradingError::BadLabel {
                    text: w.to_string(),
                    domain: group.spec().to_string(),
                    reason: e.to_string(),
                }
            }),
            other => Err(GradingError::BadLabel {
                text: format!("{other:?}"),
                domain: group.spec().to_string(),
                reason: "expected a word".to_string(),
            }),
        })
        .collect::<Result<Vec<_>, _>>()?;
    ElementaryGrading::new(LabelDomain::Finite(group.clone()), tuple)
}

/// The grading of the construction with labels in the presented group,
/// when coset enumeration finishes within the budget.
pub fn presented_grading(
    p: &FreeGroupPresentation,
    max_cosets: usize,
) -> Option<(ElementaryGrading, Arc<FiniteGroup>, Vec<Element>)> {
    match coset_enumerate(p, max_cosets) {
        CosetOutcome::Completed { group, generator_images } => {
            let grading = realize_in_group(&grading_from_presentation(p), &group, &generator_images)
                .expect("words over the presentation generators");
            Some((grading, group, generator_images))
        }
        _ => None,
    }
}

/// `W = {κ(u) κ(v)^-1 : u ≠ v in one block}` for the coarsening generated by
/// `glue`; its normal closure is the kernel of the induced map of universal
/// groups.
pub fn coarsening_kernel_words(
    table: &SupportTable,
    glue: &[(usize, usize)],
) -> Result<BTreeSet<Word>, GradingError> {
    let (_, blocks) = coarsen(table, glue)?;
    Ok(kernel_words_for_blocks(table, &blocks))
}

pub fn kernel_words_for_blocks(table: &SupportTable, blocks: &[usize]) -> BTreeSet<Word> {
    let up = universal_presentation(table);
    let mut out = BTreeSet::new();
    for u in 0..table.len() {
        for v in 0..table.len() {
            if u != v && blocks[u] == blocks[v] {
                out.insert(up.kappa[u].mul(&up.kappa[v].inverse()));
            }
        }
    }
    out
}

/// Coincidences among free-word symbols that `p` forces: symbols `u, v`
/// are merged when `w_u w_v^-1` is a cyclic conjugate of a relator or its
/// inverse, and the result is closed under the partial product. Every
/// merge holds in the presented group; the converse is not checked.
pub fn relator_coincidences(table: &SupportTable, p: &FreeGroupPresentation, words: &[Word]) -> Vec<usize> {
    let mut blocks: Vec<usize> = (0..table.len()).collect();
    for u in 0..words.len() {
        for v in u + 1..words.len() {
            let w = words[u].mul(&words[v].inverse());
            if p.relators().iter().any(|r| w.is_cyclic_conjugate(r) || w.is_cyclic_conjugate(&r.inverse())) {
                let (bu, bv) = (blocks[u], blocks[v]);
                for b in blocks.iter_mut() {
                    if *b == bv {
                        *b = bu;
                    }
                }
            }
        }
    }
    close_partition(table, &blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::DEFAULT_MAX_COSETS;
    use crate::fingrp::are_isomorphic_small;
    use crate::grading::coarsen;

    fn word(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn pres(gens: u32, rels: &[&str], marked: &[&str]) -> FreeGroupPresentation {
        FreeGroupPresentation::new(
            gens,
            rels.iter().map(|r| word(r)).collect(),
            marked.iter().map(|r| word(r)).collect(),
        )
        .unwrap()
    }

    fn two_by_two() -> SupportTable {
        ElementaryGrading::from_offdiagonal(LabelDomain::Free { rank: 1 }, vec![Label::Word(word("x1"))])
            .unwrap()
            .interaction_relation()
    }

    #[test]
    fn two_by_two_universal_group_is_z() {
        let up = universal_presentation(&two_by_two());
        let p = up.presentation();
        assert_eq!(p.generators(), 2);
        let rels: BTreeSet<String> = p.relators().iter().map(Word::to_string).collect();
        assert_eq!(rels, ["x1 x2", "x2 x1"].iter().map(|s| s.to_string()).collect());
        let inv = crate::words::abelianization_invariants(p);
        assert_eq!(inv.free_rank, 1);
        assert!(inv.torsion.is_empty());
        assert!(matches!(coset_enumerate(p, 1000), CosetOutcome::Inconclusive { .. }));
        assert_eq!(up.separation_pairs().len(), 6);
        assert_eq!(up.diff_set().len(), 6);
    }

    #[test]
    fn single_symbol_is_trivial() {
        let t = ElementaryGrading::trivial(LabelDomain::Free { rank: 0 }, 1).unwrap().interaction_relation();
        let up = universal_presentation(&t);
        assert_eq!(up.presentation().generators(), 0);
        assert!(up.presentation().relators().is_empty());
        assert_eq!(coset_enumerate(up.presentation(), 10).order(), Some(1));
    }

    #[test]
    fn glued_two_by_two_is_c2() {
        let (q, _) = coarsen(&two_by_two(), &[(1, 2)]).unwrap();
        let up = universal_presentation(&q);
        assert_eq!(up.presentation().generators(), 1);
        assert_eq!(up.presentation().relators(), &[word("x1^2")]);
        assert_eq!(coset_enumerate(up.presentation(), 100).order(), Some(2));
    }

    #[test]
    fn construction_sizes() {
        let c2 = pres(1, &["x1^2"], &[]);
        let g = grading_from_presentation(&c2);
        assert_eq!(g.n(), 4);
        assert_eq!(construction_size(&c2), 4);
        let x = Label::Word(word("x1"));
        assert_eq!(g.offdiagonal(), vec![x.clone(), x.clone(), x]);
        let f2 = FreeGroupPresentation::free(2);
        let g = grading_from_presentation(&f2);
        assert_eq!(g.n(), 3);
        assert_eq!(g.offdiagonal(), vec![Label::Word(word("x1")), Label::Word(word("x2"))]);
    }

    #[test]
    fn inverse_letters_kept() {
        let p = pres(2, &["x1 x2^-1"], &[]);
        let g = grading_from_presentation(&p);
        assert_eq!(g.offdiagonal()[1], Label::Word(word("x2^-1")));
        assert_eq!(g.n(), 5);
    }

    fn round_trip(p: &FreeGroupPresentation) {
        let (grading, group, images) = presented_grading(p, DEFAULT_MAX_COSETS).unwrap();
        let support = grading.support();
        let up = universal_presentation(&support.table);
        let outcome = coset_enumerate(up.presentation(), DEFAULT_MAX_COSETS);
        let (universal, gen_images) = outcome.completed().expect("finite universal group");
        assert!(are_isomorphic_small(universal, &group).unwrap(), "{p}");
        let sym = up.symbol_images(universal, gen_images);
        let distinct: BTreeSet<Element> = sym.iter().copied().collect();
        assert_eq!(distinct.len(), sym.len());
        let killed = up
            .diff_set()
            .iter()
            .any(|w| up.presentation().generators() > 0 && eval_word(w, gen_images, universal).unwrap() == 0);
        assert!(!killed);
        let n = grading.n();
        for (r, c) in word_positions(p).into_iter().skip(p.relators().len()) {
            let w = &p.marked()[0];
            let target = eval_word(w, &images, &group).unwrap();
            assert_eq!(support.labels[support.position_symbol[r * n + c]], Label::Element(target));
        }
    }

    #[test]
    fn presentation_round_trips() {
        round_trip(&pres(1, &["x1^2"], &[]));
        round_trip(&pres(1, &["x1^6"], &["x1^3"]));
        round_trip(&pres(2, &["x1^2", "x2^2", "(x1 x2)^3"], &[]));
        round_trip(&pres(2, &["x1^4", "x2^2", "x2 x1 x2 x1"], &["x1 x2"]));
    }

    #[test]
    fn kernel_word_examples() {
        let t = two_by_two();
        assert!(coarsening_kernel_words(&t, &[]).unwrap().is_empty());
        let w = coarsening_kernel_words(&t, &[(1, 2)]).unwrap();
        let expected: BTreeSet<Word> = [word("x1 x2^-1"), word("x2 x1^-1")].into_iter().collect();
        assert_eq!(w, expected);
        assert_eq!(coarsening_kernel_words(&t, &[(0, 1), (1, 2)]).unwrap().len(), 6);
    }

    #[test]
    fn relator_coincidences_merge_parity() {
        let p = pres(1, &["x1^2"], &[]);
        let support = grading_from_presentation(&p).support();
        let words: Vec<Word> = support
            .labels
            .iter()
            .map(|l| match l {
                Label::Word(w) => w.clone(),
                _ => unreachable!(),
            })
            .collect();
        let blocks = relator_coincidences(&support.table, &p, &words);
        for (u, w) in words.iter().enumerate() {
            for (v, x) in words.iter().enumerate() {
                let same = (w.exponent_sums(1)[0] - x.exponent_sums(1)[0]) % 2 == 0;
                assert_eq!(blocks[u] == blocks[v], same, "{w} vs {x}");
            }
        }
        let free = FreeGroupPresentation::free(1);
        let blocks = relator_coincidences(&support.table, &free, &words);
        assert_eq!(blocks.iter().max().unwrap() + 1, words.len());
    }
}
