//! Corpus statistics on how entity types participate in coreference.
//!
//! A chain takes the entity type that most of its mention heads fall into
//! (heads inside gold NER spans), ties going to PER, ORG, GPE, DATE in that
//! order. Chains with no typed head are untyped.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::model::{Chain, Document, EntityType, MentionType};
use crate::npc::filter::{classify_mention, mention_head, ANIMATE_PRONOUNS};

/// Entity type of `chain` by majority vote over its mention heads.
pub fn chain_type(doc: &Document, chain: &Chain) -> Result<Option<EntityType>> {
    let mut votes: BTreeMap<EntityType, usize> = BTreeMap::new();
    for &m in &chain.mentions {
        let head = mention_head(doc, m)?;
        // a head inside spans of several types votes for each
        let mut seen: Vec<&EntityType> = Vec::new();
        for span in doc.ner.iter().filter(|s| s.contains(head)) {
            if !seen.contains(&&span.entity_type) {
                seen.push(&span.entity_type);
                *votes.entry(span.entity_type.clone()).or_insert(0) += 1;
            }
        }
    }
    Ok(votes
        .into_iter()
        .max_by(|(ta, va), (tb, vb)| va.cmp(vb).then(tb.priority().cmp(&ta.priority())).then(tb.cmp(ta)))
        .map(|(t, _)| t))
}

fn percent(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

/// Coreference statistics for one entity type. Percentages are absent, not
/// zero, when their denominator is empty. The average cluster size is taken
/// over the type's non-singleton chains only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub entity_type: EntityType,
    pub documents: usize,
    pub total_chains: usize,
    pub total_mentions: usize,
    pub nonsingleton_mentions: usize,
    pub type_chains: usize,
    pub type_nonsingleton_chains: usize,
    pub type_mentions: usize,
    pub type_nonsingleton_mentions: usize,
    pub type_named_mentions: usize,
    pub type_chains_with_name: usize,
    /// Percent of the type's chains with two or more mentions.
    pub non_singleton_pct: Option<f64>,
    /// The type's share of all chains.
    pub entities_pct: Option<f64>,
    /// The type's share of mentions in non-singleton chains.
    pub entity_mentions_pct: Option<f64>,
    /// The type's share of all mentions, singletons included.
    pub entity_mentions_all_pct: Option<f64>,
    /// Named and non-named shares of mentions in the type's non-singleton chains.
    pub named_pct: Option<f64>,
    pub non_named_pct: Option<f64>,
    pub avg_cluster_size: Option<f64>,
    /// Percent of the type's chains with at least one named mention.
    pub chains_with_name_pct: Option<f64>,
}

pub fn corpus_stats(docs: &[Document], entity_type: &EntityType) -> Result<StatsReport> {
    let mut r = StatsReport {
        entity_type: entity_type.clone(),
        documents: docs.len(),
        total_chains: 0,
        total_mentions: 0,
        nonsingleton_mentions: 0,
        type_chains: 0,
        type_nonsingleton_chains: 0,
        type_mentions: 0,
        type_nonsingleton_mentions: 0,
        type_named_mentions: 0,
        type_chains_with_name: 0,
        non_singleton_pct: None,
        entities_pct: None,
        entity_mentions_pct: None,
        entity_mentions_all_pct: None,
        named_pct: None,
        non_named_pct: None,
        avg_cluster_size: None,
        chains_with_name_pct: None,
    };
    for doc in docs {
        for chain in &doc.chains {
            let size = chain.len();
            r.total_chains += 1;
            r.total_mentions += size;
            if size > 1 {
                r.nonsingleton_mentions += size;
            }
            if chain_type(doc, chain)?.as_ref() != Some(entity_type) {
                continue;
            }
            r.type_chains += 1;
            r.type_mentions += size;
            let mut named = 0;
            for &m in &chain.mentions {
                if classify_mention(doc, m, entity_type)? == MentionType::Name {
                    named += 1;
                }
            }
            if named > 0 {
                r.type_chains_with_name += 1;
            }
            if size > 1 {
                r.type_nonsingleton_chains += 1;
                r.type_nonsingleton_mentions += size;
                r.type_named_mentions += named;
            }
        }
    }
    r.non_singleton_pct = percent(r.type_nonsingleton_chains, r.type_chains);
    r.entities_pct = percent(r.type_chains, r.total_chains);
    r.entity_mentions_pct = percent(r.type_nonsingleton_mentions, r.nonsingleton_mentions);
    r.entity_mentions_all_pct = percent(r.type_mentions, r.total_mentions);
    r.named_pct = percent(r.type_named_mentions, r.type_nonsingleton_mentions);
    r.non_named_pct = percent(r.type_nonsingleton_mentions - r.type_named_mentions, r.type_nonsingleton_mentions);
    r.avg_cluster_size = (r.type_nonsingleton_chains > 0)
        .then(|| r.type_nonsingleton_mentions as f64 / r.type_nonsingleton_chains as f64);
    r.chains_with_name_pct = percent(r.type_chains_with_name, r.type_chains);
    Ok(r)
}

fn cell(v: Option<f64>, pct: bool) -> String {
    match v {
        Some(v) if pct => format!("{v:.2}%"),
        Some(v) => format!("{v:.2}"),
        None => "n/a".to_owned(),
    }
}

/// Renders reports side by side, one column per entity type.
pub fn stats_table(reports: &[StatsReport]) -> String {
    type Row = (&'static str, fn(&StatsReport) -> Option<f64>, bool);
    let rows: [Row; 8] = [
        ("Non-singleton", |r| r.non_singleton_pct, true),
        ("Entities", |r| r.entities_pct, true),
        ("Entity mentions", |r| r.entity_mentions_pct, true),
        ("Entity mentions (all)", |r| r.entity_mentions_all_pct, true),
        ("Named mentions", |r| r.named_pct, true),
        ("Non-named mentions", |r| r.non_named_pct, true),
        ("Avg cluster size", |r| r.avg_cluster_size, false),
        ("With named mention", |r| r.chains_with_name_pct, true),
    ];
    let mut out = format!("{:<24}", "");
    for r in reports {
        out.push_str(&format!("{:>10}", r.entity_type.to_string()));
    }
    out.push('\n');
    for (label, get, pct) in rows {
        out.push_str(&format!("{label:<24}"));
        for r in reports {
            out.push_str(&format!("{:>10}", cell(get(r), pct)));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PronounRow {
    pub form: &'static str,
    pub total: usize,
    pub in_per_cluster: usize,
    pub percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PronounReport {
    pub rows: Vec<PronounRow>,
}

impl PronounReport {
    pub fn row(&self, form: &str) -> Option<&PronounRow> {
        self.rows.iter().find(|r| r.form == form)
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{:<8}{:>8}{:>24}\n", "", "Total", "Part of PER cluster");
        for r in &self.rows {
            let pct = r.percent.map_or("n/a".to_owned(), |p| format!("{p:.1}%"));
            out.push_str(&format!("{:<8}{:>8}{:>24}\n", r.form, r.total, format!("{} ({pct})", r.in_per_cluster)));
        }
        out
    }
}

/// Occurrences of the third-person singular animate pronouns, and how many
/// fall inside a mention of a PER-typed chain. Matching is on the lower-cased
/// surface form.
pub fn pronoun_stats(docs: &[Document]) -> Result<PronounReport> {
    let mut totals = [0usize; 6];
    let mut in_per = [0usize; 6];
    for doc in docs {
        let mut covered = vec![false; doc.tokens.len()];
        for chain in &doc.chains {
            if chain_type(doc, chain)? == Some(EntityType::Per) {
                for m in &chain.mentions {
                    covered[m.range()].iter_mut().for_each(|c| *c = true);
                }
            }
        }
        for (i, token) in doc.tokens.iter().enumerate() {
            let lower = token.text.to_lowercase();
            if let Some(k) = ANIMATE_PRONOUNS.iter().position(|p| *p == lower) {
                totals[k] += 1;
                if covered[i] {
                    in_per[k] += 1;
                }
            }
        }
    }
    Ok(PronounReport {
        rows: ANIMATE_PRONOUNS
            .iter()
            .enumerate()
            .map(|(k, form)| PronounRow {
                form,
                total: totals[k],
                in_per_cluster: in_per[k],
                percent: percent(in_per[k], totals[k]),
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Mention, NerSpan, Token};

    fn doc(words: &[&str]) -> Document {
        Document::new("d", words.iter().map(|w| Token::new(*w, 0)).collect())
    }

    #[test]
    fn sizes_three_and_one() {
        let mut d = doc(&["Ann", "she", "her", "Bob"]);
        d.ner = vec![NerSpan::new(EntityType::Per, 0, 1), NerSpan::new(EntityType::Per, 3, 4)];
        d.chains = vec![
            Chain::new(0, [Mention::new(0, 1), Mention::new(1, 2), Mention::new(2, 3)]),
            Chain::new(1, [Mention::new(3, 4)]),
        ];
        let r = corpus_stats(&[d], &EntityType::Per).unwrap();
        assert_eq!(r.non_singleton_pct, Some(50.0));
        assert_eq!(r.avg_cluster_size, Some(3.0));
        assert_eq!(r.entities_pct, Some(100.0));
        assert_eq!(r.entity_mentions_all_pct, Some(100.0));
    }

    #[test]
    fn named_share() {
        let mut d = doc(&["Ann", "left", ".", "She", "smiled"]);
        d.ner = vec![NerSpan::new(EntityType::Per, 0, 1)];
        d.chains = vec![Chain::new(0, [Mention::new(0, 1), Mention::new(3, 4)])];
        let r = corpus_stats(&[d.clone()], &EntityType::Per).unwrap();
        assert_eq!(r.named_pct, Some(50.0));
        assert_eq!(r.non_named_pct, Some(50.0));

        let p = pronoun_stats(&[d]).unwrap();
        let she = p.row("she").unwrap();
        assert_eq!((she.total, she.in_per_cluster, she.percent), (1, 1, Some(100.0)));
    }

    #[test]
    fn pronoun_outside_chain() {
        let d = doc(&["he", "went"]);
        let p = pronoun_stats(&[d]).unwrap();
        assert_eq!(p.row("he").unwrap().total, 1);
        assert_eq!(p.row("he").unwrap().in_per_cluster, 0);
        let none = pronoun_stats(&[doc(&["rain"])]).unwrap();
        assert!(none.rows.iter().all(|r| r.total == 0 && r.percent.is_none()));
    }

    #[test]
    fn empty_corpus_is_absent() {
        let r = corpus_stats(&[], &EntityType::Per).unwrap();
        assert_eq!(r.non_singleton_pct, None);
        assert_eq!(r.avg_cluster_size, None);
        assert_eq!(r.named_pct, None);
        assert!(stats_table(&[r]).contains("n/a"));
    }

    #[test]
    fn type_vote_and_priority() {
        let mut d = doc(&["Acme", "Ann", "it"]);
        d.ner = vec![NerSpan::new(EntityType::Org, 0, 1), NerSpan::new(EntityType::Per, 1, 2)];
        let tie = Chain::new(0, [Mention::new(0, 1), Mention::new(1, 2)]);
        assert_eq!(chain_type(&d, &tie).unwrap(), Some(EntityType::Per));
        let org = Chain::new(1, [Mention::new(0, 1)]);
        assert_eq!(chain_type(&d, &org).unwrap(), Some(EntityType::Org));
        let none = Chain::new(2, [Mention::new(2, 3)]);
        assert_eq!(chain_type(&d, &none).unwrap(), None);
    }
}
