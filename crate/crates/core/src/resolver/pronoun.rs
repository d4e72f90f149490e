//! Attaching first-person and third-person singular pronouns to name chains.

use serde::Serialize;

use crate::model::{Document, Mention};
use crate::resolver::cluster::NameMention;
use crate::resolver::gazetteer::Gender;

/// Pronoun forms the resolver links, with the gender each one requires.
pub const RESOLVABLE: &[(&str, Gender)] = &[
    ("i", Gender::Unisex),
    ("me", Gender::Unisex),
    ("my", Gender::Unisex),
    ("mine", Gender::Unisex),
    ("he", Gender::M),
    ("him", Gender::M),
    ("his", Gender::M),
    ("she", Gender::F),
    ("her", Gender::F),
    ("hers", Gender::F),
];

pub fn pronoun_gender(word: &str) -> Option<Gender> {
    let lower = word.to_lowercase();
    RESOLVABLE.iter().find(|(w, _)| *w == lower).map(|&(_, g)| g)
}

pub fn is_subject(deprel: &str) -> bool {
    deprel == "nsubj" || deprel == "nsubjpass" || deprel.starts_with("nsubj:")
}

pub fn is_object(deprel: &str) -> bool {
    matches!(deprel, "dobj" | "obj" | "iobj")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    /// Subject pronoun following a named subject.
    PrecedingSubject,
    /// Nearest admissible preceding name.
    NearestName,
}

/// A name chain as seen by the pronoun rules.
#[derive(Debug, Clone)]
pub struct NameChain {
    /// Indices into the resolver's name list.
    pub names: Vec<usize>,
    pub gender: Gender,
}

/// Read-only view of a document's names and parse for pronoun resolution.
pub struct PronounContext<'a> {
    doc: &'a Document,
    children: &'a [Vec<usize>],
    names: &'a [NameMention],
    /// token -> chain whose named mention covers it
    owner: Vec<Option<usize>>,
    window: usize,
}

impl<'a> PronounContext<'a> {
    pub fn new(
        doc: &'a Document,
        children: &'a [Vec<usize>],
        names: &'a [NameMention],
        chains: &[NameChain],
        window: usize,
    ) -> Self {
        // Entity spans take precedence over the wider derived spans, and
        // narrower derived spans over wider ones.
        let mut owner = vec![None; doc.tokens.len()];
        let mut by_width: Vec<(usize, Mention, usize)> = Vec::new();
        for (c, chain) in chains.iter().enumerate() {
            for &k in &chain.names {
                let name = &names[k];
                by_width.push((0, Mention::new(name.ner.start, name.ner.end), c));
                by_width.push((1, name.mention, c));
            }
        }
        by_width.sort_by_key(|&(rank, m, c)| (rank, m.len(), m.start, c));
        for (_, m, c) in by_width {
            for t in m.range() {
                owner[t].get_or_insert(c);
            }
        }
        PronounContext {
            doc,
            children,
            names,
            owner,
            window,
        }
    }

    fn chain_at(&self, token: usize) -> Option<usize> {
        self.owner[token]
    }

    /// Whether the verb governing `p` has a dependent with relation
    /// `wanted` that lies in a named mention of `chain`.
    fn verb_partner_in(&self, p: usize, wanted: fn(&str) -> bool, chain: usize) -> bool {
        let Some(verb) = self.doc.tokens[p].head else { return false };
        self.children[verb]
            .iter()
            .any(|&d| d != p && wanted(&self.doc.tokens[d].deprel) && self.chain_at(d) == Some(chain))
    }

    fn within_window(&self, p: usize, chain: &NameChain) -> bool {
        chain.names.iter().any(|&k| {
            let last = self.names[k].ner.end - 1;
            last < p && p - last <= self.window
        })
    }

    /// Chain index for the pronoun at `p`, or `None`.
    pub fn resolve(&self, p: usize, chains: &[NameChain]) -> Option<(usize, Rule)> {
        let gender = pronoun_gender(&self.doc.tokens[p].text)?;
        let deprel = self.doc.tokens[p].deprel.as_str();
        let subject = is_subject(deprel);
        let object = is_object(deprel);

        if subject {
            let previous = (0..p).rev().find(|&t| is_subject(&self.doc.tokens[t].deprel));
            if let Some(c) = previous.and_then(|s| self.chain_at(s)) {
                if chains[c].gender.compatible(gender) {
                    return Some((c, Rule::PrecedingSubject));
                }
            }
        }

        let mut candidates: Vec<(usize, usize)> = chains
            .iter()
            .enumerate()
            .flat_map(|(c, chain)| chain.names.iter().map(move |&k| (self.names[k].ner.end - 1, c)))
            .filter(|&(last, _)| last < p)
            .collect();
        candidates.sort_by(|a, b| b.cmp(a));
        for (_, c) in candidates {
            if !chains[c].gender.compatible(gender) {
                continue;
            }
            if subject && self.verb_partner_in(p, is_object, c) {
                continue;
            }
            if object && self.verb_partner_in(p, is_subject, c) {
                continue;
            }
            if !self.within_window(p, &chains[c]) {
                continue;
            }
            return Some((c, Rule::NearestName));
        }
        None
    }
}
