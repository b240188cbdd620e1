//! JSON input and output documents.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use weakgrade::coset::{coset_enumerate, CosetOutcome};
use weakgrade::fingrp::{Element, FiniteGroup, GroupSpec};
use weakgrade::grading::{quotient_table, ElementaryGrading, Label, LabelDomain, SupportTable};
use weakgrade::universal::{realize_in_group, relator_coincidences};
use weakgrade::twisted::{cocycle_from_bicharacter, Bicharacter, CocycleTable, MGammaSigma};
use weakgrade::words::{FreeGroupPresentation, Word};

/// Reads and deserializes a JSON file; errors carry line and column.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_json(&text).with_context(|| format!("in {}", path.display()))
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

/// A label written as a string, an integer or an integer vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelText {
    Text(String),
    Int(i64),
    Ints(Vec<i64>),
}

impl LabelText {
    fn text(&self) -> String {
        match self {
            LabelText::Text(s) => s.clone(),
            LabelText::Int(k) => k.to_string(),
            LabelText::Ints(v) => {
                let parts: Vec<String> = v.iter().map(i64::to_string).collect();
                format!("({})", parts.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradingDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub domain: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuple: Option<Vec<LabelText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offdiagonal: Option<Vec<LabelText>>,
    /// Relators of the labels when the domain is `free:<l>`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relators: Vec<String>,
}

impl GradingDoc {
    pub fn from_grading(g: &ElementaryGrading) -> Self {
        GradingDoc {
            n: Some(g.n()),
            domain: g.domain().to_string(),
            tuple: Some(g.display_tuple().into_iter().map(LabelText::Text).collect()),
            offdiagonal: None,
            relators: Vec::new(),
        }
    }

    pub fn grading(&self) -> Result<ElementaryGrading> {
        let domain = LabelDomain::parse(&self.domain)?;
        let parse = |list: &[LabelText]| -> Result<Vec<Label>> {
            list.iter().map(|l| Ok(domain.parse_label(&l.text())?)).collect()
        };
        let grading = match (&self.tuple, &self.offdiagonal) {
            (Some(t), None) => ElementaryGrading::new(domain.clone(), parse(t)?)?,
            (None, Some(h)) => ElementaryGrading::from_offdiagonal(domain.clone(), parse(h)?)?,
            (Some(_), Some(_)) => bail!("give either `tuple` or `offdiagonal`, not both"),
            (None, None) => bail!("missing `tuple` or `offdiagonal`"),
        };
        if let Some(n) = self.n {
            if n != grading.n() {
                bail!("`n` is {n} but the labels define a grading on M_{}", grading.n());
            }
        }
        if !self.relators.is_empty() && !matches!(domain, LabelDomain::Free { .. }) {
            bail!("`relators` needs a free domain");
        }
        Ok(grading)
    }

    pub fn presentation(&self) -> Result<Option<FreeGroupPresentation>> {
        if self.relators.is_empty() {
            return Ok(None);
        }
        let rank = match LabelDomain::parse(&self.domain)? {
            LabelDomain::Free { rank } => rank,
            _ => bail!("`relators` needs a free domain"),
        };
        let relators = parse_words(&self.relators, "relators")?;
        Ok(Some(FreeGroupPresentation::new(rank, relators, Vec::new())?))
    }
}

fn parse_words(list: &[String], field: &str) -> Result<Vec<Word>> {
    list.iter()
        .enumerate()
        .map(|(i, s)| s.parse::<Word>().with_context(|| format!("{field}[{i}]")))
        .collect()
}

/// A grading after its labels have been interpreted: either in a group
/// whose equality is decidable, or as free words modulo relators whose
/// group could not be enumerated.
#[derive(Debug, Clone)]
pub enum Resolved {
    Elementary(ElementaryGrading),
    Presented {
        free: ElementaryGrading,
        presentation: FreeGroupPresentation,
        cosets_used: usize,
        /// Support with the coincidences forced by the relators merged.
        table: SupportTable,
        /// A free word for each symbol of `table`.
        words: Vec<Word>,
    },
}

impl Resolved {
    pub fn table(&self) -> SupportTable {
        match self {
            Resolved::Elementary(g) => g.interaction_relation(),
            Resolved::Presented { table, .. } => table.clone(),
        }
    }
}

pub fn resolve(doc: &GradingDoc, max_cosets: usize) -> Result<Resolved> {
    let grading = doc.grading()?;
    let Some(p) = doc.presentation()? else {
        return Ok(Resolved::Elementary(grading));
    };
    let cosets_used = match coset_enumerate(&p, max_cosets) {
        CosetOutcome::Completed { group, generator_images } => {
            return Ok(Resolved::Elementary(realize_in_group(&grading, &group, &generator_images)?));
        }
        CosetOutcome::Inconclusive { cosets_used } => cosets_used,
        CosetOutcome::TooLarge { order } => order,
    };
    let support = grading.support();
    let free_words: Vec<Word> = support
        .labels
        .iter()
        .map(|l| match l {
            Label::Word(w) => w.clone(),
            _ => unreachable!("free domain"),
        })
        .collect();
    let blocks = relator_coincidences(&support.table, &p, &free_words);
    let table = quotient_table(&support.table, &blocks);
    let mut words = vec![None; table.len()];
    for (s, &b) in blocks.iter().enumerate() {
        words[b].get_or_insert_with(|| free_words[s].clone());
    }
    Ok(Resolved::Presented {
        free: grading,
        presentation: p,
        cosets_used,
        table,
        words: words.into_iter().map(|w| w.expect("nonempty block")).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationDoc {
    pub generators: u32,
    #[serde(default)]
    pub relators: Vec<String>,
    #[serde(default)]
    pub marked: Vec<String>,
}

impl PresentationDoc {
    pub fn presentation(&self) -> Result<FreeGroupPresentation> {
        Ok(FreeGroupPresentation::new(
            self.generators,
            parse_words(&self.relators, "relators")?,
            parse_words(&self.marked, "marked")?,
        )?)
    }

    pub fn from_presentation(p: &FreeGroupPresentation) -> Self {
        PresentationDoc {
            generators: p.generators(),
            relators: p.relators().iter().map(Word::to_string).collect(),
            marked: p.marked().iter().map(Word::to_string).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BicharacterDoc {
    pub factors: Vec<u64>,
    pub exponents: Vec<Vec<i64>>,
    pub modulus: i64,
}

impl BicharacterDoc {
    pub fn bicharacter(&self) -> Result<Bicharacter> {
        Ok(Bicharacter::new(self.factors.clone(), self.exponents.clone(), self.modulus)?)
    }
}

/// A cocycle given as an explicit table on a group, or by a bicharacter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CocycleDoc {
    FromBicharacter { from_bicharacter: BicharacterDoc },
    Table { group: String, modulus: i64, values: Vec<Vec<i64>> },
}

impl CocycleDoc {
    pub fn cocycle(&self) -> Result<CocycleTable> {
        match self {
            CocycleDoc::FromBicharacter { from_bicharacter } => {
                Ok(cocycle_from_bicharacter(&from_bicharacter.bicharacter()?)?)
            }
            CocycleDoc::Table { group, modulus, values } => {
                let spec: GroupSpec = group.parse()?;
                let group = Arc::new(spec.build()?);
                Ok(CocycleTable::new(group, values.concat(), *modulus)?)
            }
        }
    }
}

/// `M(γ, σ)`: ambient group, tuple, the cocycle on `H` and the images of
/// the coordinate generators of `H` in the ambient group. Omitted fields
/// default to `n = 1` and `H` equal to the ambient group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MgsDoc {
    #[serde(default)]
    pub ambient: Option<String>,
    #[serde(default)]
    pub gamma: Option<Vec<LabelText>>,
    #[serde(default)]
    pub cocycle: Option<CocycleDoc>,
    #[serde(default)]
    pub h_generators: Option<Vec<LabelText>>,
}

impl MgsDoc {
    pub fn spec(&self) -> Result<MGammaSigma> {
        let sigma = match &self.cocycle {
            Some(c) => c.cocycle()?,
            None => CocycleTable::trivial(Arc::new(FiniteGroup::trivial())),
        };
        let h = sigma.group().clone();
        let ambient = match &self.ambient {
            Some(a) => Arc::new(a.parse::<GroupSpec>()?.build()?),
            None => h.clone(),
        };
        let gamma = match &self.gamma {
            Some(list) => list
                .iter()
                .map(|l| Ok(ambient.parse_element(&l.text())?))
                .collect::<Result<Vec<Element>>>()?,
            None => vec![ambient.identity()],
        };
        let embedding = match &self.h_generators {
            None if self.ambient.is_none() => h.elements().collect(),
            None if h.order() == 1 => vec![ambient.identity()],
            None => bail!("`h_generators` is required when `ambient` is given and H is nontrivial"),
            Some(list) => {
                let images = list
                    .iter()
                    .map(|l| Ok(ambient.parse_element(&l.text())?))
                    .collect::<Result<Vec<Element>>>()?;
                let factors = h
                    .cyclic_factors()
                    .ok_or_else(|| anyhow!("H = {} has no cyclic coordinates", h.spec()))?;
                if images.len() != factors.len() {
                    bail!("H has {} coordinate generators, got {} images", factors.len(), images.len());
                }
                h.elements()
                    .map(|x| {
                        let coords = h.coordinates(x).expect("coordinates");
                        coords
                            .iter()
                            .zip(&images)
                            .fold(ambient.identity(), |acc, (&c, &g)| ambient.mul(acc, ambient.pow(g, c as i64)))
                    })
                    .collect()
            }
        };
        Ok(MGammaSigma::new(ambient, gamma, sigma, embedding)?)
    }
}

/// Either kind of input accepted by `weak-equiv`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeakEquivInput {
    Grading(GradingDoc),
    Mgs(MgsDoc),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiEntry {
    pub symbol: String,
    pub element: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub target: String,
    /// Multiplication table of the target when its name is not a group spec.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_table: Option<Vec<Vec<usize>>>,
    pub psi: Vec<PsiEntry>,
    pub provenance: String,
}

impl CertificateDoc {
    pub fn target_group(&self) -> Result<Arc<FiniteGroup>> {
        if let Some(rows) = &self.target_table {
            return Ok(Arc::new(FiniteGroup::from_table(rows, None)?.with_spec(self.target.clone())));
        }
        Ok(Arc::new(self.target.parse::<GroupSpec>()?.build()?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDoc {
    pub symbols: Vec<String>,
    pub unit: Option<usize>,
    pub products: Vec<[usize; 3]>,
}

impl TableDoc {
    pub fn from_table(t: &SupportTable) -> Self {
        TableDoc {
            symbols: t.labels().to_vec(),
            unit: t.unit(),
            products: t.products().iter().map(|(&(s, u), &p)| [s, u, p]).collect(),
        }
    }
}

impl From<GradingDoc> for WeakEquivInput {
    fn from(doc: GradingDoc) -> Self {
        WeakEquivInput::Grading(doc)
    }
}

impl From<MgsDoc> for WeakEquivInput {
    fn from(doc: MgsDoc) -> Self {
        WeakEquivInput::Mgs(doc)
    }
}
