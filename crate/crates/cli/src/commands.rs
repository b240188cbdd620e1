//! Command implementations. Each returns a [`CommandResult`]; the binary
//! prints it and maps its status to an exit code.

use anyhow::{anyhow, bail, Result};
use serde::Serialize;
use serde_json::{json, Value};

use weakgrade::coset::{coset_enumerate, CosetOutcome};
use weakgrade::fingrp::GroupSpec;
use weakgrade::grading::{
    coarsen, enumerate_coarsenings, find_pattern_permutation, ElementaryGrading, Label, LabelDomain, SupportTable,
};
use weakgrade::regrade::{
    abelian_regrade, classify_small, hereditary_finite_check, search_finite_regrading, search_through_presentation,
    verify_regrading, CoarseningStatus, RegradingCertificate, SearchBudget, SearchOutcome,
};
use weakgrade::twisted::{
    cohomologous_abelian, condition_star, max_central_order, radical_and_center, wedderburn_shape, MGammaSigma,
    StarOutcome,
};
use weakgrade::universal::{
    construction_size, grading_from_presentation, kernel_words_for_blocks, universal_presentation, word_positions,
};
use weakgrade::words::{abelianization_invariants, Word};

use crate::docs::{
    resolve, BicharacterDoc, CertificateDoc, CocycleDoc, GradingDoc, MgsDoc, PresentationDoc, PsiEntry,
    Resolved, TableDoc, WeakEquivInput,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    NotFound,
    Inconclusive,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::NotFound | Status::Inconclusive => 1,
            Status::Error => 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CommandResult {
    pub status: Status,
    pub payload: Value,
    pub diagnostics: Vec<String>,
}

impl CommandResult {
    pub fn ok(payload: Value) -> Self {
        CommandResult { status: Status::Ok, payload, diagnostics: Vec::new() }
    }

    pub fn with_status(status: Status, payload: Value) -> Self {
        CommandResult { status, payload, diagnostics: Vec::new() }
    }

    pub fn error(err: &anyhow::Error) -> Self {
        CommandResult {
            status: Status::Error,
            payload: Value::Null,
            diagnostics: err.chain().map(|e| e.to_string()).collect(),
        }
    }

    fn note(mut self, d: impl Into<String>) -> Self {
        self.diagnostics.push(d.into());
        self
    }
}

/// Budget knobs shared by all commands.
#[derive(Debug, Clone)]
pub struct Settings {
    pub max_cosets: usize,
    pub budget: SearchBudget,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            max_cosets: weakgrade::coset::DEFAULT_MAX_COSETS,
            budget: SearchBudget::default(),
        }
    }
}

pub fn parse_ladder(text: &str) -> Result<Vec<GroupSpec>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| Ok(s.trim().parse::<GroupSpec>()?))
        .collect()
}

fn coset_verdict(outcome: &CosetOutcome, max_cosets: usize) -> String {
    match outcome {
        CosetOutcome::Completed { group, .. } => format!("order={}", group.order()),
        CosetOutcome::TooLarge { order } => format!("too-large(order={order})"),
        CosetOutcome::Inconclusive { .. } => format!("inconclusive({max_cosets})"),
    }
}

pub fn universal_group(doc: &GradingDoc, settings: &Settings) -> Result<CommandResult> {
    let resolved = resolve(doc, settings.max_cosets)?;
    let table = resolved.table();
    let up = universal_presentation(&table);
    let p = up.presentation();
    let outcome = coset_enumerate(p, settings.max_cosets);
    let verdict = coset_verdict(&outcome, settings.max_cosets);
    let status = if outcome.completed().is_some() { Status::Ok } else { Status::Inconclusive };
    let payload = json!({
        "generators": p.generators(),
        "generator_symbols": up.generator_symbols().iter().map(|&s| table.label(s)).collect::<Vec<_>>(),
        "relators": p.relators().iter().map(Word::to_string).collect::<Vec<_>>(),
        "diff_set_size": up.diff_set().len(),
        "abelianization": abelianization_invariants(p).to_string(),
        "verdict": verdict,
    });
    let mut result = CommandResult::with_status(status, payload);
    if let Resolved::Presented { cosets_used, .. } = resolved {
        result = result.note(format!(
            "labels are free words: the relators did not enumerate within {cosets_used} cosets"
        ));
    }
    Ok(result)
}

fn certificate_doc(table: &SupportTable, cert: &RegradingCertificate, provenance: String) -> CertificateDoc {
    let target = &cert.target;
    let tabulated = target.spec().parse::<GroupSpec>().is_err();
    let psi = cert
        .psi
        .iter()
        .enumerate()
        .map(|(s, &e)| PsiEntry {
            symbol: table.label(s).to_string(),
            element: if tabulated { format!("#{e}") } else { target.name(e) },
        })
        .collect();
    let target_table = tabulated.then(|| {
        target
            .elements()
            .map(|a| target.elements().map(|b| target.mul(a, b)).collect())
            .collect()
    });
    CertificateDoc {
        target: target.spec().to_string(),
        target_table,
        psi,
        provenance,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Method {
    /// Classifier for `n <= 3`, the abelian construction for integer
    /// vectors, otherwise the ladder search.
    #[default]
    Auto,
    Classify,
    Abelian,
    Search,
}

pub fn regrade(doc: &GradingDoc, method: Method, hereditary: bool, settings: &Settings) -> Result<CommandResult> {
    let resolved = resolve(doc, settings.max_cosets)?;
    let table = resolved.table();
    if hereditary {
        return hereditary_report(&table, settings);
    }
    let outcome = match (&resolved, method) {
        (Resolved::Presented { presentation, words, .. }, Method::Auto | Method::Search) => {
            search_through_presentation(&table, presentation, words, &settings.budget)?
        }
        (Resolved::Presented { .. }, _) => bail!("labels in an unenumerated presented group support only the search"),
        (Resolved::Elementary(g), Method::Classify) => {
            let (_, cert) = classify_small(g)?;
            return Ok(found(&table, &cert, cert.provenance.to_string()));
        }
        (Resolved::Elementary(g), Method::Abelian) => {
            let cert = abelian_regrade(g)?;
            return Ok(found(&table, &cert, cert.provenance.to_string()));
        }
        (Resolved::Elementary(g), Method::Auto) if g.n() <= 3 => {
            let (_, cert) = classify_small(g)?;
            return Ok(found(&table, &cert, cert.provenance.to_string()));
        }
        (Resolved::Elementary(g), Method::Auto) if matches!(g.domain(), LabelDomain::FreeAbelian { .. }) => {
            let cert = abelian_regrade(g)?;
            return Ok(found(&table, &cert, cert.provenance.to_string()));
        }
        (Resolved::Elementary(_), _) => search_finite_regrading(&table, &settings.budget)?,
    };
    Ok(match outcome {
        SearchOutcome::Found(cert) => found(&table, &cert, cert.provenance.to_string()),
        SearchOutcome::NotFound(report) => CommandResult::with_status(
            Status::NotFound,
            json!({
                "groups_tried": report.groups_tried,
                "nodes": report.nodes,
                "exhausted_budget": report.exhausted_budget,
            }),
        )
        .note("no regrading found within the budget; this is not a proof that none exists"),
    })
}

fn found(table: &SupportTable, cert: &RegradingCertificate, provenance: String) -> CommandResult {
    let doc = certificate_doc(table, cert, provenance);
    CommandResult::ok(serde_json::to_value(doc).expect("serializable"))
}

fn hereditary_report(table: &SupportTable, settings: &Settings) -> Result<CommandResult> {
    let reports = hereditary_finite_check(table, &settings.budget)?;
    let mut all_found = true;
    let entries: Vec<Value> = reports
        .iter()
        .map(|r| {
            let labels = r.table.labels().to_vec();
            match &r.status {
                CoarseningStatus::Found(cert) => json!({
                    "blocks": r.blocks,
                    "symbols": labels,
                    "status": "found",
                    "certificate": certificate_doc(&r.table, cert, cert.provenance.to_string()),
                }),
                CoarseningStatus::NotRealizable { saturated } => json!({
                    "blocks": r.blocks,
                    "symbols": labels,
                    "status": "not-realizable",
                    "saturated": saturated,
                }),
                CoarseningStatus::NotFound(report) => {
                    all_found = false;
                    json!({
                        "blocks": r.blocks,
                        "symbols": labels,
                        "status": "not-found",
                        "groups_tried": report.groups_tried,
                        "nodes": report.nodes,
                    })
                }
            }
        })
        .collect();
    let status = if all_found { Status::Ok } else { Status::NotFound };
    Ok(CommandResult::with_status(status, json!({ "coarsenings": entries })))
}

pub fn verify(grading: &GradingDoc, certificate: &CertificateDoc, settings: &Settings) -> Result<CommandResult> {
    let table = resolve(grading, settings.max_cosets)?.table();
    let target = certificate.target_group()?;
    let mut psi = vec![None; table.len()];
    for entry in &certificate.psi {
        let s = table
            .symbol_by_label(&entry.symbol)
            .ok_or_else(|| anyhow!("certificate names unknown symbol {:?}", entry.symbol))?;
        psi[s] = Some(target.parse_element(&entry.element)?);
    }
    let psi = psi
        .into_iter()
        .enumerate()
        .map(|(s, e)| e.ok_or_else(|| anyhow!("no image for symbol {:?}", table.label(s))))
        .collect::<Result<Vec<_>>>()?;
    match verify_regrading(&table, &target, &psi) {
        Ok(_) => Ok(CommandResult::ok(json!({ "valid": true, "target": target.spec() }))),
        Err(e) => Ok(CommandResult::with_status(Status::Error, json!({ "valid": false })).note(e.to_string())),
    }
}

fn finite_elementary_spec(g: &ElementaryGrading) -> Result<MGammaSigma> {
    let group = g
        .domain()
        .as_finite()
        .ok_or_else(|| anyhow!("Condition (*) needs labels in a finite group, got {}", g.domain()))?;
    let gamma = g
        .tuple()
        .iter()
        .map(|l| match l {
            Label::Element(e) => *e,
            _ => unreachable!("finite domain"),
        })
        .collect();
    Ok(MGammaSigma::elementary(group.clone(), gamma)?)
}

pub fn weak_equiv(a: &WeakEquivInput, b: &WeakEquivInput, settings: &Settings) -> Result<CommandResult> {
    match (a, b) {
        (WeakEquivInput::Grading(x), WeakEquivInput::Grading(y)) => {
            let (ga, gb) = (elementary(x, settings)?, elementary(y, settings)?);
            let (pa, pb) = (ga.coincidence_pattern(), gb.coincidence_pattern());
            let pi = if ga.n() == gb.n() { find_pattern_permutation(&pa, &pb) } else { None };
            Ok(CommandResult::ok(json!({
                "equivalent": pi.is_some(),
                "method": "coincidence-pattern",
                "pi": pi.map(|p| p.iter().map(|i| i + 1).collect::<Vec<_>>()),
            })))
        }
        _ => {
            let spec = |input: &WeakEquivInput| -> Result<MGammaSigma> {
                match input {
                    WeakEquivInput::Grading(d) => finite_elementary_spec(&elementary(d, settings)?),
                    WeakEquivInput::Mgs(m) => m.spec(),
                }
            };
            let (sa, sb) = (spec(a)?, spec(b)?);
            let outcome = condition_star(&sa, &sb)?;
            Ok(CommandResult::ok(star_payload(&sa, &sb, &outcome)))
        }
    }
}

fn elementary(doc: &GradingDoc, settings: &Settings) -> Result<ElementaryGrading> {
    match resolve(doc, settings.max_cosets)? {
        Resolved::Elementary(g) => Ok(g),
        Resolved::Presented { cosets_used, .. } => {
            bail!("relators did not enumerate within {cosets_used} cosets; label equality is undecided")
        }
    }
}

fn star_payload(a: &MGammaSigma, b: &MGammaSigma, outcome: &StarOutcome) -> Value {
    match outcome {
        StarOutcome::Satisfied(w) => {
            let (h1, h2) = (a.subgroup(), b.subgroup());
            json!({
                "equivalent": true,
                "method": "condition-star",
                "alpha": h1.elements().map(|h| [h1.name(h), h2.name(w.alpha[h])]).collect::<Vec<_>>(),
                "pi": w.pi.iter().map(|i| i + 1).collect::<Vec<_>>(),
                "t": w.t.iter().map(|&t| h2.name(t)).collect::<Vec<_>>(),
            })
        }
        StarOutcome::Unsatisfied => json!({ "equivalent": false, "method": "condition-star" }),
    }
}

/// All closed partitions, or the single coarsening generated by `glue`
/// (pairs of symbol labels) with its kernel words.
pub fn coarsenings(doc: &GradingDoc, glue: &[(String, String)], settings: &Settings) -> Result<CommandResult> {
    let table = resolve(doc, settings.max_cosets)?.table();
    if glue.is_empty() {
        let list: Vec<Value> = enumerate_coarsenings(&table)?
            .into_iter()
            .map(|(q, blocks)| json!({ "blocks": blocks, "table": TableDoc::from_table(&q) }))
            .collect();
        return Ok(CommandResult::ok(json!({ "symbols": table.labels(), "coarsenings": list })));
    }
    let pairs = glue
        .iter()
        .map(|(a, b)| {
            let find = |l: &str| table.symbol_by_label(l).ok_or_else(|| anyhow!("unknown symbol {l:?}"));
            Ok((find(a)?, find(b)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (quotient, blocks) = coarsen(&table, &pairs)?;
    let kernel: Vec<String> = kernel_words_for_blocks(&table, &blocks).iter().map(Word::to_string).collect();
    Ok(CommandResult::ok(json!({
        "symbols": table.labels(),
        "blocks": blocks,
        "table": TableDoc::from_table(&quotient),
        "kernel_words": kernel,
    })))
}

pub fn from_presentation(doc: &PresentationDoc) -> Result<(CommandResult, GradingDoc)> {
    let p = doc.presentation()?;
    let grading = grading_from_presentation(&p);
    let mut out = GradingDoc::from_grading(&grading);
    out.relators = p.relators().iter().map(Word::to_string).collect();
    let positions: Vec<[usize; 2]> = word_positions(&p).into_iter().map(|(r, c)| [r + 1, c + 1]).collect();
    let payload = json!({
        "n": construction_size(&p),
        "word_positions": positions,
        "grading": out,
    });
    Ok((CommandResult::ok(payload), out))
}

pub fn twisted_center(doc: &BicharacterDoc) -> Result<CommandResult> {
    let beta = doc.bicharacter()?;
    let group = beta.group()?;
    let (rad, dim) = radical_and_center(&beta)?;
    Ok(CommandResult::ok(json!({
        "radical": rad.iter().map(|&g| group.name(g)).collect::<Vec<_>>(),
        "center_dimension": dim,
        "max_central_order": max_central_order(&beta)?,
    })))
}

pub fn twisted_blocks(doc: &BicharacterDoc) -> Result<CommandResult> {
    let beta = doc.bicharacter()?;
    Ok(CommandResult::ok(json!({ "blocks": wedderburn_shape(&beta)? })))
}

pub fn twisted_cohomologous(a: &CocycleDoc, b: &CocycleDoc) -> Result<CommandResult> {
    Ok(CommandResult::ok(json!({
        "cohomologous": cohomologous_abelian(&a.cocycle()?, &b.cocycle()?)?,
    })))
}

pub fn twisted_condition_star(a: &MgsDoc, b: &MgsDoc) -> Result<CommandResult> {
    let (sa, sb) = (a.spec()?, b.spec()?);
    let outcome = condition_star(&sa, &sb)?;
    Ok(CommandResult::ok(star_payload(&sa, &sb, &outcome)))
}
