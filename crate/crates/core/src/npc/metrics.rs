//! Entity-centric evaluation of named-person coreference.
//!
//! Each gold entity is paired with the system entity that shares one of its
//! name variants and has the best mention-level F1 against it. Mentions match
//! only on exact spans. The corpus score is the mean of per-entity F1 over
//! all gold entities, unmatched ones counting as zero.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::model::{Mention, MentionType};
use crate::npc::filter::NpcEntity;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntityMatch {
    pub gold_id: u64,
    pub predicted_id: Option<u64>,
    pub overlap: usize,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

fn overlap<'a>(a: impl Iterator<Item = &'a Mention>, b: &[&Mention]) -> usize {
    a.filter(|m| b.contains(m)).count()
}

fn prf(overlap: usize, gold: usize, sys: usize) -> (f64, f64, f64) {
    let recall = if gold == 0 { 0.0 } else { overlap as f64 / gold as f64 };
    let precision = if sys == 0 { 0.0 } else { overlap as f64 / sys as f64 };
    let f1 = if gold + sys == 0 { 0.0 } else { 2.0 * overlap as f64 / (gold + sys) as f64 };
    (recall, precision, f1)
}

/// Ranks candidate `a` against `b`: higher F1, then larger overlap, then
/// smaller chain, then lower id. F1 = 2·o/(g+s) is compared exactly.
fn better(gold_len: usize, a: (usize, &NpcEntity), b: (usize, &NpcEntity)) -> bool {
    let (oa, ea) = a;
    let (ob, eb) = b;
    let lhs = oa * (gold_len + eb.chain.len());
    let rhs = ob * (gold_len + ea.chain.len());
    lhs.cmp(&rhs)
        .then(oa.cmp(&ob))
        .then((eb.chain.len(), eb.id()).cmp(&(ea.chain.len(), ea.id())))
        == Ordering::Greater
}

/// Best name-sharing candidate for `gold`, or an empty match.
pub fn match_entity(gold: &NpcEntity, candidates: &[NpcEntity]) -> EntityMatch {
    let gold_mentions: Vec<&Mention> = gold.chain.mentions.iter().collect();
    let mut best: Option<(usize, &NpcEntity)> = None;
    for cand in candidates {
        if !cand.name_variants.intersects(&gold.name_variants) {
            continue;
        }
        let o = overlap(cand.chain.mentions.iter(), &gold_mentions);
        if best.is_none_or(|b| better(gold.chain.len(), (o, cand), b)) {
            best = Some((o, cand));
        }
    }
    match best {
        Some((o, cand)) => {
            let (recall, precision, f1) = prf(o, gold.chain.len(), cand.chain.len());
            EntityMatch {
                gold_id: gold.id(),
                predicted_id: Some(cand.id()),
                overlap: o,
                recall,
                precision,
                f1,
            }
        }
        None => EntityMatch {
            gold_id: gold.id(),
            predicted_id: None,
            overlap: 0,
            recall: 0.0,
            precision: 0.0,
            f1: 0.0,
        },
    }
}

pub fn match_all(gold: &[NpcEntity], sys: &[NpcEntity]) -> Vec<EntityMatch> {
    gold.iter().map(|g| match_entity(g, sys)).collect()
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Mean per-entity F1; `None` when there are no gold entities.
pub fn npc_f1(gold: &[NpcEntity], sys: &[NpcEntity]) -> Option<f64> {
    mean(match_all(gold, sys).iter().map(|m| m.f1))
}

/// Percent of gold entities without a name-sharing system entity.
pub fn chains_not_found(gold: &[NpcEntity], sys: &[NpcEntity]) -> Option<f64> {
    let matches = match_all(gold, sys);
    let missing = matches.iter().filter(|m| m.predicted_id.is_none()).count();
    (!matches.is_empty()).then(|| 100.0 * missing as f64 / matches.len() as f64)
}

/// F1 of one gold entity restricted to mentions of type `t`, keeping the
/// alignment found on the full chains. `None` when the gold entity has no
/// type-`t` mention.
pub fn entity_type_f1(gold: &NpcEntity, predicted: Option<&NpcEntity>, t: MentionType) -> Option<f64> {
    let gold_t: Vec<&Mention> = gold.mentions_of(t).collect();
    if gold_t.is_empty() {
        return None;
    }
    let Some(pred) = predicted else { return Some(0.0) };
    let sys_len = pred.mentions_of(t).count();
    let o = overlap(pred.mentions_of(t), &gold_t);
    Some(prf(o, gold_t.len(), sys_len).2)
}

fn find(entities: &[NpcEntity], id: Option<u64>) -> Option<&NpcEntity> {
    id.and_then(|id| entities.iter().find(|e| e.id() == id))
}

fn type_scores(gold: &[NpcEntity], sys: &[NpcEntity], matches: &[EntityMatch], t: MentionType) -> Vec<f64> {
    gold.iter()
        .zip(matches)
        .filter_map(|(g, m)| entity_type_f1(g, find(sys, m.predicted_id), t))
        .collect()
}

pub fn per_type_f1(gold: &[NpcEntity], sys: &[NpcEntity], t: MentionType) -> Option<f64> {
    let matches = match_all(gold, sys);
    mean(type_scores(gold, sys, &matches, t))
}

/// Whether `a` and `b` name each other and share at least one exact mention.
/// The shared mention keeps distinct people with a common surname (and the
/// surname variant generated for each) from being linked.
fn linked(a: &NpcEntity, b: &NpcEntity) -> bool {
    a.name_variants.intersects(&b.name_variants) && a.chain.mentions.intersection(&b.chain.mentions).next().is_some()
}

/// Gold entities spread over more than one system entity that names them.
pub fn detect_oversplit<'a>(gold: &'a [NpcEntity], sys: &'a [NpcEntity]) -> Vec<(&'a NpcEntity, Vec<&'a NpcEntity>)> {
    gold.iter()
        .filter_map(|g| {
            let hits: Vec<&NpcEntity> = sys.iter().filter(|s| linked(g, s)).collect();
            (hits.len() > 1).then_some((g, hits))
        })
        .collect()
}

/// System entities that name, and take mentions from, two or more gold entities.
pub fn detect_overmerge<'a>(gold: &'a [NpcEntity], sys: &'a [NpcEntity]) -> Vec<(&'a NpcEntity, Vec<&'a NpcEntity>)> {
    sys.iter()
        .filter_map(|s| {
            let hits: Vec<&NpcEntity> = gold.iter().filter(|g| linked(g, s)).collect();
            (hits.len() > 1).then_some((s, hits))
        })
        .collect()
}

/// One gold entity's row in the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntityRow {
    pub doc_id: String,
    pub gold_variants: Vec<String>,
    #[serde(flatten)]
    pub matched: EntityMatch,
    /// No gold mention appears, as an exact span, in any system entity.
    pub no_overlap: bool,
    #[serde(skip)]
    type_f1: [Option<f64>; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Finding {
    OverSplit {
        doc_id: String,
        gold_id: u64,
        gold_variants: Vec<String>,
        sys_ids: Vec<u64>,
    },
    OverMerge {
        doc_id: String,
        sys_id: u64,
        gold_ids: Vec<u64>,
        gold_variants: Vec<Vec<String>>,
    },
    NotFound {
        doc_id: String,
        gold_id: u64,
        gold_variants: Vec<String>,
    },
}

impl Finding {
    /// Tab-separated row: kind, doc id, gold variants, system chain ids.
    pub fn tsv(&self) -> String {
        fn ids(ids: &[u64]) -> String {
            ids.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        }
        match self {
            Finding::OverSplit {
                doc_id,
                gold_variants,
                sys_ids,
                ..
            } => format!("over-split\t{doc_id}\t{}\t{}", gold_variants.join("|"), ids(sys_ids)),
            Finding::OverMerge {
                doc_id,
                sys_id,
                gold_variants,
                ..
            } => format!(
                "over-merge\t{doc_id}\t{}\t{sys_id}",
                gold_variants.iter().map(|v| v.join("|")).collect::<Vec<_>>().join(" + ")
            ),
            Finding::NotFound {
                doc_id, gold_variants, ..
            } => format!("not-found\t{doc_id}\t{}\t-", gold_variants.join("|")),
        }
    }
}

fn variants(e: &NpcEntity) -> Vec<String> {
    e.name_variants.iter().map(str::to_owned).collect()
}

/// Per-document NPC evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentEvaluation {
    pub rows: Vec<EntityRow>,
    pub findings: Vec<Finding>,
}

pub fn evaluate_document(doc_id: &str, gold: &[NpcEntity], sys: &[NpcEntity]) -> DocumentEvaluation {
    let matches = match_all(gold, sys);
    let mut rows = Vec::with_capacity(gold.len());
    let mut findings = Vec::new();
    for (g, m) in gold.iter().zip(matches) {
        let predicted = find(sys, m.predicted_id);
        let type_f1 = MentionType::ALL.map(|t| entity_type_f1(g, predicted, t));
        let no_overlap = !sys
            .iter()
            .any(|s| g.chain.mentions.iter().any(|gm| s.chain.contains(gm)));
        if m.predicted_id.is_none() {
            findings.push(Finding::NotFound {
                doc_id: doc_id.to_owned(),
                gold_id: g.id(),
                gold_variants: variants(g),
            });
        }
        rows.push(EntityRow {
            doc_id: doc_id.to_owned(),
            gold_variants: variants(g),
            matched: m,
            no_overlap,
            type_f1,
        });
    }
    for (g, hits) in detect_oversplit(gold, sys) {
        findings.push(Finding::OverSplit {
            doc_id: doc_id.to_owned(),
            gold_id: g.id(),
            gold_variants: variants(g),
            sys_ids: hits.iter().map(|s| s.id()).collect(),
        });
    }
    for (s, hits) in detect_overmerge(gold, sys) {
        findings.push(Finding::OverMerge {
            doc_id: doc_id.to_owned(),
            sys_id: s.id(),
            gold_ids: hits.iter().map(|g| g.id()).collect(),
            gold_variants: hits.iter().map(|g| variants(g)).collect(),
        });
    }
    DocumentEvaluation { rows, findings }
}

/// Corpus-level NPC report, macro-averaged over gold entities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NpcReport {
    pub gold_entities: usize,
    pub npc_f1: Option<f64>,
    /// Percent of gold entities with no name-sharing system entity.
    pub chains_not_found: Option<f64>,
    pub not_found_count: usize,
    /// Gold entities sharing no exact mention with any system entity.
    pub no_overlap_count: usize,
    pub per_type_f1: BTreeMap<&'static str, Option<f64>>,
    pub oversplit_count: usize,
    pub overmerge_count: usize,
    pub entities: Vec<EntityRow>,
    pub findings: Vec<Finding>,
}

impl NpcReport {
    pub fn from_documents(docs: &[DocumentEvaluation]) -> Self {
        let rows: Vec<EntityRow> = docs.iter().flat_map(|d| d.rows.iter().cloned()).collect();
        let findings: Vec<Finding> = docs.iter().flat_map(|d| d.findings.iter().cloned()).collect();
        let not_found_count = rows.iter().filter(|r| r.matched.predicted_id.is_none()).count();
        let per_type_f1 = MentionType::ALL
            .iter()
            .enumerate()
            .map(|(i, t)| (t.label(), mean(rows.iter().filter_map(|r| r.type_f1[i]))))
            .collect();
        NpcReport {
            gold_entities: rows.len(),
            npc_f1: mean(rows.iter().map(|r| r.matched.f1)),
            chains_not_found: (!rows.is_empty()).then(|| 100.0 * not_found_count as f64 / rows.len() as f64),
            not_found_count,
            no_overlap_count: rows.iter().filter(|r| r.no_overlap).count(),
            per_type_f1,
            oversplit_count: findings.iter().filter(|f| matches!(f, Finding::OverSplit { .. })).count(),
            overmerge_count: findings.iter().filter(|f| matches!(f, Finding::OverMerge { .. })).count(),
            entities: rows,
            findings,
        }
    }

    pub fn type_f1(&self, t: MentionType) -> Option<f64> {
        self.per_type_f1.get(t.label()).copied().flatten()
    }

    pub fn to_table(&self) -> String {
        fn show(v: Option<f64>, digits: usize) -> String {
            v.map_or_else(|| "n/a".to_owned(), |v| format!("{v:.digits$}"))
        }
        let mut lines = vec![
            format!("{:<22}{:>10}", "gold entities", self.gold_entities),
            format!("{:<22}{:>10}", "NPC F1", show(self.npc_f1, 3)),
            format!(
                "{:<22}{:>10}",
                "chains not found",
                self.chains_not_found.map_or("n/a".into(), |v| format!("{v:.2}%"))
            ),
            format!("{:<22}{:>10}", "no mention overlap", self.no_overlap_count),
        ];
        for t in MentionType::ALL {
            lines.push(format!("{:<22}{:>10}", format!("F1 ({}s)", t.label()), show(self.type_f1(t), 3)));
        }
        lines.push(format!("{:<22}{:>10}", "over-split", self.oversplit_count));
        lines.push(format!("{:<22}{:>10}", "over-merge", self.overmerge_count));
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}
