//! Person-name similarity.
//!
//! Scores are deliberately bimodal: related name forms land at 0.8 or above,
//! unrelated names at 0.4 or below.
//!
//! | relation                                              | score |
//! |-------------------------------------------------------|-------|
//! | same tokens (case-insensitive, honorifics stripped)   | 1.0   |
//! | one token sequence is a subsequence of the other      | 0.9   |
//! | same last token                                       | 0.8   |
//! | otherwise: 0.4 × mean best per-token edit similarity  | ≤ 0.4 |
//!
//! An initial such as `X.` matches any token beginning with `X`.

use strsim::normalized_levenshtein;

use crate::npc::names::{is_initial, Honorifics};

pub const EXACT: f64 = 1.0;
pub const CONTAINED: f64 = 0.9;
pub const SAME_LAST: f64 = 0.8;
pub const EDIT_CEILING: f64 = 0.4;

fn name_tokens(name: &str, honorifics: &Honorifics) -> Vec<String> {
    let raw: Vec<&str> = name.split_whitespace().collect();
    honorifics.strip(&raw).iter().map(|t| t.to_lowercase()).collect()
}

fn tokens_match(a: &str, b: &str) -> bool {
    let initial_of = |init: &str, full: &str| is_initial(init) && full.starts_with(&init[..init.len() - 1]);
    a == b || initial_of(a, b) || initial_of(b, a)
}

fn is_subsequence(short: &[String], long: &[String]) -> bool {
    let mut rest = long.iter();
    short.iter().all(|s| rest.any(|l| tokens_match(s, l)))
}

fn directed_edit(a: &[String], b: &[String]) -> f64 {
    let total: f64 = a
        .iter()
        .map(|x| b.iter().map(|y| normalized_levenshtein(x, y)).fold(0.0, f64::max))
        .sum();
    total / a.len() as f64
}

/// Symmetric similarity in [0, 1] between two names.
pub fn name_similarity_with(a: &str, b: &str, honorifics: &Honorifics) -> f64 {
    let ta = name_tokens(a, honorifics);
    let tb = name_tokens(b, honorifics);
    if ta == tb {
        return EXACT;
    }
    if ta.is_empty() || tb.is_empty() {
        return 0.0;
    }
    if is_subsequence(&ta, &tb) || is_subsequence(&tb, &ta) {
        return CONTAINED;
    }
    if ta.last() == tb.last() {
        return SAME_LAST;
    }
    EDIT_CEILING * directed_edit(&ta, &tb).max(directed_edit(&tb, &ta))
}

pub fn name_similarity(a: &str, b: &str) -> f64 {
    name_similarity_with(a, b, &Honorifics::default())
}
