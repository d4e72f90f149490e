//! Reduces coreference chains to named-person (or other named-type) entities.
//!
//! A chain survives when at least one of its mentions is headed by a token
//! inside a named-entity span of the requested type. Heads come from the
//! dependency layer: the head of a mention is the token none of whose
//! ancestors lies inside the mention.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Chain, Document, EntityType, Mention, MentionType, NerSpan};
use crate::npc::names::{Honorifics, NameVariants};

const PRONOUN_WORDS: &[&str] = &[
    "i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "he", "him", "his",
    "himself", "she", "her", "hers", "herself", "it", "its", "itself", "we", "us", "our", "ours",
    "ourselves", "they", "them", "their", "theirs", "themselves",
];

/// Third-person singular animate pronouns.
pub const ANIMATE_PRONOUNS: &[&str] = &["he", "him", "his", "she", "her", "hers"];

/// The token of `m` with no ancestor inside `m`; the rightmost one when the
/// span is not connected.
pub fn mention_head(doc: &Document, m: Mention) -> Result<usize> {
    let n = doc.tokens.len();
    let mut head = None;
    for i in m.range() {
        let mut ancestor = doc.tokens[i].head;
        let mut steps = 0;
        let mut dominated = false;
        while let Some(a) = ancestor {
            if m.contains(a) {
                dominated = true;
                break;
            }
            steps += 1;
            if steps > n {
                return Err(Error::DependencyCycle {
                    doc: doc.doc_id.clone(),
                    token: i,
                });
            }
            ancestor = doc.tokens[a].head;
        }
        if !dominated {
            head = Some(i);
        }
    }
    head.ok_or_else(|| Error::DependencyCycle {
        doc: doc.doc_id.clone(),
        token: m.start,
    })
}

/// The NER span of type `entity_type` covering `token`, if any.
pub fn ner_span_at<'a>(doc: &'a Document, token: usize, entity_type: &EntityType) -> Option<&'a NerSpan> {
    doc.ner
        .iter()
        .find(|s| &s.entity_type == entity_type && s.contains(token))
}

pub fn is_type_headed(doc: &Document, m: Mention, entity_type: &EntityType) -> Result<bool> {
    let head = mention_head(doc, m)?;
    Ok(ner_span_at(doc, head, entity_type).is_some())
}

/// Whether the mention's head is a name of a person.
pub fn is_person_headed(doc: &Document, m: Mention) -> Result<bool> {
    is_type_headed(doc, m, &EntityType::Per)
}

/// PRP/PRP$ tags when the document is tagged, a closed word list otherwise.
pub fn is_pronoun_token(doc: &Document, token: usize) -> bool {
    let t = &doc.tokens[token];
    if t.pos.is_empty() {
        PRONOUN_WORDS.contains(&t.text.to_lowercase().as_str())
    } else {
        t.pos.starts_with("PRP")
    }
}

pub fn classify_mention(doc: &Document, m: Mention, entity_type: &EntityType) -> Result<MentionType> {
    let head = mention_head(doc, m)?;
    Ok(if is_pronoun_token(doc, head) {
        MentionType::Pronoun
    } else if ner_span_at(doc, head, entity_type).is_some() {
        MentionType::Name
    } else {
        MentionType::Nominal
    })
}

/// A chain that has at least one named mention of the requested type.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NpcEntity {
    pub chain: Chain,
    pub name_variants: NameVariants,
    #[serde(skip)]
    pub mention_types: BTreeMap<Mention, MentionType>,
}

impl NpcEntity {
    pub fn id(&self) -> u64 {
        self.chain.id
    }

    pub fn mentions_of(&self, t: MentionType) -> impl Iterator<Item = &Mention> {
        self.mention_types
            .iter()
            .filter(move |(_, &ty)| ty == t)
            .map(|(m, _)| m)
    }
}

/// Surface strings of the NER spans heading the chain's named mentions, plus
/// the family name of each multi-token variant.
pub fn name_variants(
    doc: &Document,
    mention_types: &BTreeMap<Mention, MentionType>,
    entity_type: &EntityType,
    honorifics: &Honorifics,
) -> Result<NameVariants> {
    let mut variants = NameVariants::new();
    for (&m, &ty) in mention_types {
        if ty != MentionType::Name {
            continue;
        }
        let head = mention_head(doc, m)?;
        if let Some(span) = ner_span_at(doc, head, entity_type) {
            variants.insert_with_surname(&honorifics.normalize(&doc.text(span.range())));
        }
    }
    Ok(variants)
}

fn mention_types(doc: &Document, chain: &Chain, entity_type: &EntityType) -> Result<BTreeMap<Mention, MentionType>> {
    chain
        .mentions
        .iter()
        .map(|&m| Ok((m, classify_mention(doc, m, entity_type)?)))
        .collect()
}

/// Builds the entity for `chain`, or `None` when no mention is type-headed.
pub fn to_entity(
    doc: &Document,
    chain: &Chain,
    entity_type: &EntityType,
    honorifics: &Honorifics,
) -> Result<Option<NpcEntity>> {
    let types = mention_types(doc, chain, entity_type)?;
    if !types.values().any(|&t| t == MentionType::Name) {
        return Ok(None);
    }
    let name_variants = name_variants(doc, &types, entity_type, honorifics)?;
    Ok(Some(NpcEntity {
        chain: chain.clone(),
        name_variants,
        mention_types: types,
    }))
}

/// Keeps exactly the chains with at least one named mention of `entity_type`.
pub fn filter_chains(
    doc: &Document,
    chains: &[Chain],
    entity_type: &EntityType,
    honorifics: &Honorifics,
) -> Result<Vec<NpcEntity>> {
    let mut out = Vec::new();
    for chain in chains {
        if let Some(entity) = to_entity(doc, chain, entity_type, honorifics)? {
            out.push(entity);
        }
    }
    Ok(out)
}

/// Counts describing what filtering removed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct FilterDiagnostic {
    pub chains: usize,
    pub kept: usize,
    pub dropped: usize,
    /// Dropped chains containing a third-person animate pronoun.
    pub dropped_with_pronoun: usize,
    /// Chains (kept or dropped) containing a third-person animate pronoun.
    pub with_pronoun: usize,
}

impl FilterDiagnostic {
    pub fn add(&mut self, other: &FilterDiagnostic) {
        self.chains += other.chains;
        self.kept += other.kept;
        self.dropped += other.dropped;
        self.dropped_with_pronoun += other.dropped_with_pronoun;
        self.with_pronoun += other.with_pronoun;
    }

    /// Percent of dropped chains that contain an animate pronoun.
    pub fn dropped_pronoun_percent(&self) -> Option<f64> {
        percent(self.dropped_with_pronoun, self.dropped)
    }

    /// Percent of pronoun-bearing chains that have no named mention.
    pub fn pronoun_chains_without_name_percent(&self) -> Option<f64> {
        percent(self.dropped_with_pronoun, self.with_pronoun)
    }
}

fn percent(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

fn has_animate_pronoun(doc: &Document, chain: &Chain) -> Result<bool> {
    for &m in &chain.mentions {
        let head = mention_head(doc, m)?;
        if ANIMATE_PRONOUNS.contains(&doc.tokens[head].text.to_lowercase().as_str()) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// [`filter_chains`] plus the dropped-chain diagnostic.
pub fn filter_with_diagnostic(
    doc: &Document,
    chains: &[Chain],
    entity_type: &EntityType,
    honorifics: &Honorifics,
) -> Result<(Vec<NpcEntity>, FilterDiagnostic)> {
    let mut kept = Vec::new();
    let mut diag = FilterDiagnostic {
        chains: chains.len(),
        ..Default::default()
    };
    for chain in chains {
        let pronoun = has_animate_pronoun(doc, chain)?;
        if pronoun {
            diag.with_pronoun += 1;
        }
        match to_entity(doc, chain, entity_type, honorifics)? {
            Some(entity) => kept.push(entity),
            None => {
                diag.dropped += 1;
                if pronoun {
                    diag.dropped_with_pronoun += 1;
                }
            }
        }
    }
    diag.kept = kept.len();
    Ok((kept, diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Token;

    /// (text, pos, sentence-local head or -1, deprel); single sentence.
    fn parsed(rows: &[(&str, &str, i64, &str)]) -> Document {
        let tokens = rows
            .iter()
            .map(|&(text, pos, head, deprel)| Token {
                text: text.into(),
                pos: pos.into(),
                head: (head >= 0).then_some(head as usize),
                deprel: deprel.into(),
                sentence: 0,
            })
            .collect();
        Document::new("t", tokens)
    }

    fn curzio() -> Document {
        // Queens newsletter writer Francis X. Curzio said . Mr. Curzio agreed . he smiled
        let mut d = parsed(&[
            ("Queens", "NNP", 2, "compound"),
            ("newsletter", "NN", 2, "compound"),
            ("writer", "NN", 5, "compound"),
            ("Francis", "NNP", 5, "compound"),
            ("X.", "NNP", 5, "compound"),
            ("Curzio", "NNP", 6, "nsubj"),
            ("said", "VBD", -1, "root"),
            ("Mr.", "NNP", 8, "compound"),
            ("Curzio", "NNP", 9, "nsubj"),
            ("agreed", "VBD", 6, "conj"),
            ("he", "PRP", 11, "nsubj"),
            ("smiled", "VBD", 6, "conj"),
        ]);
        d.ner = vec![NerSpan::new(EntityType::Per, 3, 6), NerSpan::new(EntityType::Per, 7, 9)];
        d
    }

    #[test]
    fn head_of_determiner_phrase() {
        let d = parsed(&[
            ("the", "DT", 2, "det"),
            ("German", "JJ", 2, "amod"),
            ("chancellor", "NN", 3, "nsubj"),
            ("spoke", "VBD", -1, "root"),
        ]);
        assert_eq!(mention_head(&d, Mention::new(0, 3)).unwrap(), 2);
        assert_eq!(mention_head(&d, Mention::new(1, 2)).unwrap(), 1);
    }

    #[test]
    fn head_with_honorific() {
        let d = curzio();
        assert_eq!(mention_head(&d, Mention::new(7, 9)).unwrap(), 8);
        assert_eq!(mention_head(&d, Mention::new(0, 6)).unwrap(), 5);
    }

    #[test]
    fn disconnected_span_takes_rightmost() {
        let d = parsed(&[("a", "DT", -1, "root"), ("b", "NN", -1, "root"), ("c", "NN", -1, "root")]);
        assert_eq!(mention_head(&d, Mention::new(0, 3)).unwrap(), 2);
    }

    #[test]
    fn cycle_is_an_error() {
        let d = parsed(&[("a", "DT", 1, "x"), ("b", "NN", 0, "x"), ("c", "NN", -1, "root")]);
        assert!(matches!(mention_head(&d, Mention::new(0, 2)), Err(Error::DependencyCycle { .. })));
        assert!(matches!(mention_head(&d, Mention::new(0, 1)), Err(Error::DependencyCycle { .. })));
    }

    #[test]
    fn person_headed() {
        let d = curzio();
        assert!(is_person_headed(&d, Mention::new(0, 6)).unwrap());
        assert!(!is_person_headed(&d, Mention::new(10, 11)).unwrap());
        assert!(!is_person_headed(&d, Mention::new(0, 3)).unwrap());
    }

    #[test]
    fn classification() {
        let d = curzio();
        let per = EntityType::Per;
        assert_eq!(classify_mention(&d, Mention::new(10, 11), &per).unwrap(), MentionType::Pronoun);
        assert_eq!(classify_mention(&d, Mention::new(7, 9), &per).unwrap(), MentionType::Name);
        assert_eq!(classify_mention(&d, Mention::new(1, 3), &per).unwrap(), MentionType::Nominal);
    }

    #[test]
    fn secretary_general_is_nominal() {
        let d = parsed(&[
            ("the", "DT", 2, "det"),
            ("Secretary", "NNP", 2, "compound"),
            ("General", "NNP", 3, "nsubj"),
            ("says", "VBZ", -1, "root"),
        ]);
        assert_eq!(
            classify_mention(&d, Mention::new(0, 3), &EntityType::Per).unwrap(),
            MentionType::Nominal
        );
    }

    #[test]
    fn untagged_pronoun_uses_word_list() {
        let mut d = Document::new("t", vec![Token::new("His", 0), Token::new("dog", 0)]);
        d.tokens[1].head = None;
        assert!(is_pronoun_token(&d, 0));
        assert!(!is_pronoun_token(&d, 1));
    }

    #[test]
    fn filter_keeps_named_chain_with_variants() {
        let d = curzio();
        let chains = vec![
            Chain::new(0, [Mention::new(0, 6), Mention::new(7, 9), Mention::new(10, 11)]),
            Chain::new(1, [Mention::new(10, 11)]),
        ];
        let kept = filter_chains(&d, &chains, &EntityType::Per, &Honorifics::default()).unwrap();
        assert_eq!(kept.len(), 1);
        let v: Vec<_> = kept[0].name_variants.iter().collect();
        assert_eq!(v, vec!["Curzio", "Francis X. Curzio"]);
        assert_eq!(kept[0].mentions_of(MentionType::Name).count(), 2);

        let again_chains: Vec<Chain> = kept.iter().map(|e| e.chain.clone()).collect();
        let again = filter_chains(&d, &again_chains, &EntityType::Per, &Honorifics::default()).unwrap();
        assert_eq!(again, kept);
    }

    #[test]
    fn filter_empty() {
        let d = curzio();
        assert!(filter_chains(&d, &[], &EntityType::Per, &Honorifics::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn diagnostic_counts_pronoun_chains() {
        let d = curzio();
        let chains = vec![
            Chain::new(0, [Mention::new(7, 9), Mention::new(10, 11)]),
            Chain::new(1, [Mention::new(10, 11), Mention::new(1, 3)]),
            Chain::new(2, [Mention::new(1, 3)]),
        ];
        let (kept, diag) = filter_with_diagnostic(&d, &chains, &EntityType::Per, &Honorifics::default()).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(diag.dropped, 2);
        assert_eq!(diag.dropped_with_pronoun, 1);
        assert_eq!(diag.with_pronoun, 2);
        assert_eq!(diag.dropped_pronoun_percent(), Some(50.0));
        assert_eq!(diag.pronoun_chains_without_name_percent(), Some(50.0));
    }
}
