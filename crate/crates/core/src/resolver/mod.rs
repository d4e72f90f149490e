//! NER-driven rule-based coreference.
//!
//! The pipeline works on one document at a time:
//!
//! 1. every entity span of the configured type becomes a named mention whose
//!    extent is derived from the dependency parse ([`derive_mention_span`]);
//! 2. named mentions are clustered agglomeratively by name similarity
//!    ([`cluster_names`]);
//! 3. each cluster gets the gazetteer gender of the first token of its
//!    longest name;
//! 4. first-person and third-person singular pronouns are attached in
//!    document order by the subject-continuity and nearest-name rules;
//! 5. chains left with a single mention are dropped.

pub mod cluster;
pub mod gazetteer;
pub mod pronoun;
pub mod similarity;
pub mod span;

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Chain, Document, EntityType, Mention};
use crate::npc::names::Honorifics;

pub use cluster::{chain_gender, cluster_names, clusters_to_chains, NameMention};
pub use gazetteer::{Gazetteer, Gender};
pub use pronoun::{pronoun_gender, NameChain, PronounContext, Rule};
pub use similarity::{name_similarity, name_similarity_with};
pub use span::derive_mention_span;

#[derive(Debug, Clone, PartialEq)]
pub struct ResolverConfig {
    /// Names merge when their similarity is strictly above this.
    pub similarity_threshold: f64,
    /// A pronoun may only attach to a chain named within this many preceding tokens.
    pub window: usize,
    pub entity_type: EntityType,
    pub pronoun_rules: bool,
}

impl Default for ResolverConfig {
    fn default() -> Self {
        ResolverConfig {
            similarity_threshold: 0.5,
            window: 100,
            entity_type: EntityType::Per,
            pronoun_rules: true,
        }
    }
}

impl ResolverConfig {
    /// Defaults for `entity_type`; pronoun rules only apply to persons.
    pub fn for_entity_type(entity_type: EntityType) -> Self {
        ResolverConfig {
            pronoun_rules: entity_type == EntityType::Per,
            entity_type,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.similarity_threshold > 0.0 && self.similarity_threshold < 1.0) {
            return Err(Error::Config(format!(
                "similarity threshold must lie in (0, 1), got {}",
                self.similarity_threshold
            )));
        }
        if self.window == 0 {
            return Err(Error::Config("window must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PronounLink {
    pub token: usize,
    pub chain: u64,
    pub rule: Rule,
    pub gender: Gender,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedChain {
    pub chain: Chain,
    pub gender: Gender,
    /// Derived spans of the chain's named mentions.
    pub names: Vec<Mention>,
}

/// Resolver output: surviving chains (renumbered from 0) and how each
/// pronoun was attached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolution {
    pub chains: Vec<ResolvedChain>,
    pub links: Vec<PronounLink>,
}

impl Resolution {
    pub fn into_chains(self) -> Vec<Chain> {
        self.chains.into_iter().map(|c| c.chain).collect()
    }
}

/// Named mentions for every entity span of `entity_type`, in document order.
/// A span deriving the same extent as an earlier one is skipped.
pub fn name_mentions(doc: &Document, entity_type: &EntityType) -> Vec<NameMention> {
    let children = doc.dependents();
    let mut spans: Vec<_> = doc.ner.iter().filter(|s| &s.entity_type == entity_type).collect();
    spans.sort_by_key(|s| (s.start, s.end));
    let mut seen = HashSet::new();
    spans
        .into_iter()
        .filter_map(|ner| {
            let mention = span::derive_with_children(doc, &children, ner);
            seen.insert(mention).then(|| NameMention {
                mention,
                ner: ner.clone(),
                text: doc.text(ner.range()),
            })
        })
        .collect()
}

/// Attaches the pronoun at `p` to one of `chains`, if any rule applies.
pub fn resolve_pronoun(
    doc: &Document,
    p: usize,
    names: &[NameMention],
    chains: &[NameChain],
    cfg: &ResolverConfig,
) -> Option<(usize, Rule)> {
    let children = doc.dependents();
    PronounContext::new(doc, &children, names, chains, cfg.window).resolve(p, chains)
}

fn check_layers(doc: &Document) -> Result<()> {
    if doc.is_empty() {
        return Ok(());
    }
    if !doc.has_pos_layer() {
        return Err(Error::MissingLayer {
            doc: doc.doc_id.clone(),
            layer: "pos",
        });
    }
    if !doc.has_dependency_layer() {
        return Err(Error::MissingLayer {
            doc: doc.doc_id.clone(),
            layer: "dependency",
        });
    }
    Ok(())
}

/// Runs the full resolver on one document.
pub fn run_ner_de(doc: &Document, cfg: &ResolverConfig, gazetteer: &Gazetteer, honorifics: &Honorifics) -> Result<Resolution> {
    cfg.validate()?;
    check_layers(doc)?;

    let names = name_mentions(doc, &cfg.entity_type);
    let clusters = cluster_names(&names, cfg.similarity_threshold, honorifics);
    let mut name_chains: Vec<NameChain> = clusters
        .iter()
        .map(|members| NameChain {
            names: members.clone(),
            gender: chain_gender(&names, members, gazetteer, honorifics),
        })
        .collect();
    let mut mentions: Vec<Vec<Mention>> = clusters
        .iter()
        .map(|members| members.iter().map(|&k| names[k].mention).collect())
        .collect();
    let mut attached: Vec<(usize, usize, Rule, Gender)> = Vec::new();

    if cfg.pronoun_rules && !name_chains.is_empty() {
        let children = doc.dependents();
        let in_name: Vec<bool> = (0..doc.len())
            .map(|t| names.iter().any(|n| n.ner.contains(t)))
            .collect();
        for (p, token) in doc.tokens.iter().enumerate() {
            if in_name[p] || !token.pos.starts_with("PRP") {
                continue;
            }
            let Some(gender) = pronoun_gender(&token.text) else { continue };
            let ctx = PronounContext::new(doc, &children, &names, &name_chains, cfg.window);
            if let Some((c, rule)) = ctx.resolve(p, &name_chains) {
                mentions[c].push(Mention::new(p, p + 1));
                // a unisex chain takes the gender of its first gendered pronoun
                if name_chains[c].gender == Gender::Unisex {
                    name_chains[c].gender = gender;
                }
                attached.push((p, c, rule, gender));
            }
        }
    }

    let mut new_ids = vec![None; mentions.len()];
    let mut chains = Vec::new();
    for (c, ms) in mentions.into_iter().enumerate() {
        let chain = Chain::new(chains.len() as u64, ms);
        if chain.len() < 2 {
            continue;
        }
        new_ids[c] = Some(chain.id);
        chains.push(ResolvedChain {
            names: clusters[c].iter().map(|&k| names[k].mention).collect(),
            gender: name_chains[c].gender,
            chain,
        });
    }
    let links = attached
        .into_iter()
        .filter_map(|(token, c, rule, gender)| {
            new_ids[c].map(|chain| PronounLink {
                token,
                chain,
                rule,
                gender,
            })
        })
        .collect();
    Ok(Resolution { chains, links })
}
