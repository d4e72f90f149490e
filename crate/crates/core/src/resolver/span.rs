use std::ops::Range;

use crate::model::{Document, Mention, NerSpan};

/// `token` and every token below it in the dependency tree.
pub(crate) fn subtree(children: &[Vec<usize>], token: usize) -> Vec<usize> {
    let mut seen = vec![token];
    let mut stack = vec![token];
    while let Some(t) = stack.pop() {
        for &c in &children[t] {
            if !seen.contains(&c) {
                seen.push(c);
                stack.push(c);
            }
        }
    }
    seen
}

fn hull(tokens: &[usize], sentence: &Range<usize>, start: &mut usize, end: &mut usize) {
    for &t in tokens.iter().filter(|t| sentence.contains(t)) {
        *start = (*start).min(t);
        *end = (*end).max(t + 1);
    }
}

fn is_coordinator(pos: &str, text: &str) -> bool {
    pos == "CC" || text.eq_ignore_ascii_case("and")
}

fn is_punctuation(doc: &Document, t: usize) -> bool {
    let token = &doc.tokens[t];
    token.deprel == "punct" || !token.text.chars().any(char::is_alphanumeric)
}

/// Noun phrase headed by a named entity: the smallest span covering the
/// entity and the subtree of its last token, cut after the name when `and`
/// follows it, and extended over a directly preceding noun and that noun's
/// subtree. Never crosses the sentence.
pub fn derive_mention_span(doc: &Document, ner: &NerSpan) -> Mention {
    derive_with_children(doc, &doc.dependents(), ner)
}

pub(crate) fn derive_with_children(doc: &Document, children: &[Vec<usize>], ner: &NerSpan) -> Mention {
    let sentence = doc.sentence_range(ner.start);
    let (mut start, mut end) = (ner.start, ner.end);
    hull(&subtree(children, ner.end - 1), &sentence, &mut start, &mut end);

    let and_follows = ner.end < sentence.end && doc.tokens[ner.end].text.eq_ignore_ascii_case("and");
    if and_follows {
        end = ner.end;
    }

    // a conjunct's subtree carries the coordinator in front of it, and a
    // root name carries the sentence punctuation
    while start < ner.start && (is_coordinator(&doc.tokens[start].pos, &doc.tokens[start].text) || is_punctuation(doc, start)) {
        start += 1;
    }
    while end > ner.end && is_punctuation(doc, end - 1) {
        end -= 1;
    }

    if ner.start > sentence.start {
        let before = ner.start - 1;
        if doc.tokens[before].pos.starts_with("NN") {
            hull(&subtree(children, before), &sentence, &mut start, &mut end);
            if and_follows {
                end = ner.end;
            }
        }
    }
    Mention::new(start, end)
}
