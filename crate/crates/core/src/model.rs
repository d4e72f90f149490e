//! Document, mention and chain data model shared by the scorers and the resolver.
//!
//! All token positions are document-global and 0-based. Spans are half-open
//! `[start, end)`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub pos: String,
    /// Document-global index of the dependency head; `None` for a sentence root.
    pub head: Option<usize>,
    pub deprel: String,
    pub sentence: usize,
}

impl Token {
    pub fn new(text: impl Into<String>, sentence: usize) -> Self {
        Token {
            text: text.into(),
            pos: String::new(),
            head: None,
            deprel: String::new(),
            sentence,
        }
    }
}

/// Named-entity category. OntoNotes long labels (`PERSON`, `ORGANIZATION`)
/// are accepted on input.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityType {
    Per,
    Org,
    Gpe,
    Date,
    Other(String),
}

impl EntityType {
    /// Tie-break priority when a chain's mentions vote for several types.
    pub(crate) fn priority(&self) -> usize {
        match self {
            EntityType::Per => 0,
            EntityType::Org => 1,
            EntityType::Gpe => 2,
            EntityType::Date => 3,
            EntityType::Other(_) => 4,
        }
    }

    /// Label used in the CoNLL-2012 named-entity column.
    pub fn conll_label(&self) -> &str {
        match self {
            EntityType::Per => "PERSON",
            EntityType::Org => "ORG",
            EntityType::Gpe => "GPE",
            EntityType::Date => "DATE",
            EntityType::Other(label) => label,
        }
    }
}

impl FromStr for EntityType {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "PER" | "PERSON" => EntityType::Per,
            "ORG" | "ORGANIZATION" => EntityType::Org,
            "GPE" => EntityType::Gpe,
            "DATE" => EntityType::Date,
            _ => EntityType::Other(s.to_owned()),
        })
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityType::Per => f.write_str("PER"),
            EntityType::Org => f.write_str("ORG"),
            EntityType::Gpe => f.write_str("GPE"),
            EntityType::Date => f.write_str("DATE"),
            EntityType::Other(label) => f.write_str(label),
        }
    }
}

impl Serialize for EntityType {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EntityType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(s.parse().unwrap_or_else(|e| match e {}))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NerSpan {
    #[serde(rename = "type")]
    pub entity_type: EntityType,
    pub start: usize,
    pub end: usize,
}

impl NerSpan {
    pub fn new(entity_type: EntityType, start: usize, end: usize) -> Self {
        NerSpan {
            entity_type,
            start,
            end,
        }
    }

    pub fn contains(&self, token: usize) -> bool {
        self.start <= token && token < self.end
    }

    pub fn range(&self) -> Range<usize> {
        self.start..self.end
    }
}

/// A token span; identity is the exact span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mention {
    pub start: usize,
    pub end: usize,
}

impl Mention {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start < end, "empty mention [{start}, {end})");
        Mention { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, token: usize) -> bool {
        self.start <= token && token < self.end
    }

    pub fn overlaps(&self, other: &Mention) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn range(&self) -> Range<usize> {
        self.start..self.end
    }
}

impl fmt::Display for Mention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MentionType {
    Name,
    Pronoun,
    Nominal,
}

impl MentionType {
    pub const ALL: [MentionType; 3] = [MentionType::Name, MentionType::Pronoun, MentionType::Nominal];

    pub fn label(self) -> &'static str {
        match self {
            MentionType::Name => "name",
            MentionType::Pronoun => "pronoun",
            MentionType::Nominal => "nominal",
        }
    }
}

/// A set of mentions asserted to corefer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub id: u64,
    pub mentions: BTreeSet<Mention>,
}

impl Chain {
    pub fn new(id: u64, mentions: impl IntoIterator<Item = Mention>) -> Self {
        Chain {
            id,
            mentions: mentions.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mentions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mentions.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.mentions.len() == 1
    }

    pub fn contains(&self, mention: &Mention) -> bool {
        self.mentions.contains(mention)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    /// CoNLL-2012 part number; 0 for single-part documents.
    pub part: u32,
    pub tokens: Vec<Token>,
    pub ner: Vec<NerSpan>,
    pub chains: Vec<Chain>,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, tokens: Vec<Token>) -> Self {
        Document {
            doc_id: doc_id.into(),
            part: 0,
            tokens,
            ner: Vec::new(),
            chains: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn sentence_count(&self) -> usize {
        self.tokens.last().map_or(0, |t| t.sentence + 1)
    }

    /// Token range of the sentence containing `token`.
    pub fn sentence_range(&self, token: usize) -> Range<usize> {
        let sentence = self.tokens[token].sentence;
        let mut start = token;
        while start > 0 && self.tokens[start - 1].sentence == sentence {
            start -= 1;
        }
        let mut end = token + 1;
        while end < self.tokens.len() && self.tokens[end].sentence == sentence {
            end += 1;
        }
        start..end
    }

    /// Token ranges of all sentences, in order.
    pub fn sentences(&self) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.tokens.len() {
            if i == self.tokens.len() || self.tokens[i].sentence != self.tokens[start].sentence {
                out.push(start..i);
                start = i;
            }
        }
        out
    }

    /// Space-joined token texts of `range`.
    pub fn text(&self, range: Range<usize>) -> String {
        self.tokens[range]
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn has_pos_layer(&self) -> bool {
        self.tokens.iter().any(|t| !t.pos.is_empty())
    }

    pub fn has_dependency_layer(&self) -> bool {
        self.tokens.iter().any(|t| !t.deprel.is_empty())
    }

    /// Children of every token in the dependency tree.
    pub fn dependents(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.tokens.len()];
        for (i, token) in self.tokens.iter().enumerate() {
            if let Some(head) = token.head {
                children[head].push(i);
            }
        }
        children
    }

    pub fn chain(&self, id: u64) -> Option<&Chain> {
        self.chains.iter().find(|c| c.id == id)
    }

    /// Checks the model invariants: dense sentence numbering, in-sentence
    /// heads, span bounds, unique chain ids, non-overlapping same-type NER
    /// spans.
    pub fn validate(&self) -> Result<()> {
        let n = self.tokens.len();
        let mut expected_sentence = 0;
        for (i, token) in self.tokens.iter().enumerate() {
            if token.sentence != expected_sentence {
                if i > 0 && token.sentence == expected_sentence + 1 {
                    expected_sentence += 1;
                } else {
                    return Err(Error::invalid(
                        &self.doc_id,
                        format!("token {i} has sentence index {}", token.sentence),
                    ));
                }
            }
        }
        for (i, token) in self.tokens.iter().enumerate() {
            if let Some(head) = token.head {
                if head >= n || self.tokens[head].sentence != token.sentence {
                    return Err(Error::invalid(
                        &self.doc_id,
                        format!("token {i} has head {head} outside its sentence"),
                    ));
                }
            }
        }
        for (i, span) in self.ner.iter().enumerate() {
            if span.start >= span.end || span.end > n {
                return Err(Error::invalid(
                    &self.doc_id,
                    format!("ner span {i} [{}, {}) out of bounds", span.start, span.end),
                ));
            }
        }
        for (i, a) in self.ner.iter().enumerate() {
            for b in &self.ner[i + 1..] {
                if a.entity_type == b.entity_type && a.start < b.end && b.start < a.end {
                    return Err(Error::invalid(
                        &self.doc_id,
                        format!("overlapping {} spans at token {}", a.entity_type, a.start.max(b.start)),
                    ));
                }
            }
        }
        let mut ids = HashSet::new();
        for chain in &self.chains {
            if !ids.insert(chain.id) {
                return Err(Error::invalid(&self.doc_id, format!("duplicate chain id {}", chain.id)));
            }
            for m in &chain.mentions {
                if m.start >= m.end || m.end > n {
                    return Err(Error::invalid(
                        &self.doc_id,
                        format!("chain {} mention {m} out of bounds", chain.id),
                    ));
                }
            }
        }
        Ok(())
    }
}
