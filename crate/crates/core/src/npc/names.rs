//! Name normalization: honorific stripping and name-variant sets.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

const DEFAULT_HONORIFICS: &[&str] = &["Mr", "Mr.", "Mrs", "Mrs.", "Ms", "Ms.", "Dr", "Dr.", "Messrs."];

/// Case-insensitive set of title tokens stripped from the front of names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Honorifics {
    tokens: HashSet<String>,
}

impl Default for Honorifics {
    fn default() -> Self {
        Honorifics::new(DEFAULT_HONORIFICS.iter().copied())
    }
}

impl Honorifics {
    pub fn new<'a>(tokens: impl IntoIterator<Item = &'a str>) -> Self {
        Honorifics {
            tokens: tokens.into_iter().map(str::to_lowercase).collect(),
        }
    }

    /// One token per line; blank lines and `#` comments are skipped.
    pub fn parse(source_name: &str, text: &str) -> Result<Self> {
        let mut tokens = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.split_whitespace().count() != 1 {
                return Err(Error::Resource {
                    source_name: source_name.to_owned(),
                    line: i + 1,
                    msg: format!("expected a single token, found {line:?}"),
                });
            }
            tokens.insert(line.to_lowercase());
        }
        Ok(Honorifics { tokens })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Honorifics::parse(&path.display().to_string(), &text)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.tokens.contains(&token.to_lowercase())
    }

    /// Drops leading honorifics. A name made only of honorifics is returned
    /// unchanged.
    pub fn strip<'a>(&self, tokens: &[&'a str]) -> Vec<&'a str> {
        let skip = tokens.iter().take_while(|t| self.contains(t)).count();
        if skip == tokens.len() {
            tokens.to_vec()
        } else {
            tokens[skip..].to_vec()
        }
    }

    /// Whitespace-normalized name with leading honorifics removed.
    pub fn normalize(&self, name: &str) -> String {
        let tokens: Vec<&str> = name.split_whitespace().collect();
        self.strip(&tokens).join(" ")
    }
}

/// Middle initials such as `X.` never stand alone as a variant.
pub fn is_initial(token: &str) -> bool {
    let mut chars = token.chars();
    matches!((chars.next(), chars.next(), chars.next()), (Some(c), Some('.'), None) if c.is_alphabetic())
}

/// Distinct name strings for one entity. Comparison is case-insensitive;
/// the first-seen casing is kept for display.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameVariants {
    by_key: BTreeMap<String, String>,
}

impl NameVariants {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str) {
        let name = name.split_whitespace().collect::<Vec<_>>().join(" ");
        if name.is_empty() {
            return;
        }
        self.by_key.entry(name.to_lowercase()).or_insert(name);
    }

    /// Adds a full name and, for multi-token names, its final token.
    pub fn insert_with_surname(&mut self, name: &str) {
        self.insert(name);
        let tokens: Vec<&str> = name.split_whitespace().collect();
        if let [_, .., last] = tokens.as_slice() {
            if !is_initial(last) {
                self.insert(last);
            }
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.by_key.contains_key(&name.to_lowercase())
    }

    pub fn intersects(&self, other: &NameVariants) -> bool {
        self.by_key.keys().any(|k| other.by_key.contains_key(k))
    }

    pub fn len(&self) -> usize {
        self.by_key.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_key.is_empty()
    }

    /// Variants in case-folded order.
    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.by_key.values().map(String::as_str)
    }

    pub fn joined(&self, sep: &str) -> String {
        self.iter().collect::<Vec<_>>().join(sep)
    }
}

impl Serialize for NameVariants {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for v in self.iter() {
            seq.serialize_element(v)?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_leading_honorifics_only() {
        let h = Honorifics::default();
        assert_eq!(h.normalize("Mr.  Curzio"), "Curzio");
        assert_eq!(h.normalize("mrs. Jane Dr. Doe"), "Jane Dr. Doe");
        assert_eq!(h.normalize("Dr."), "Dr.");
    }

    #[test]
    fn honorific_file() {
        let h = Honorifics::parse("t", "# titles\nSen.\n\nGov.\n").unwrap();
        assert!(h.contains("sen."));
        assert!(!h.contains("Mr."));
        assert!(Honorifics::parse("t", "two words\n").is_err());
    }

    #[test]
    fn surname_variants_skip_initials() {
        let mut v = NameVariants::new();
        v.insert_with_surname("Francis X. Curzio");
        v.insert_with_surname("Frank   Curzio");
        v.insert_with_surname("curzio");
        assert_eq!(v.iter().collect::<Vec<_>>(), vec!["Curzio", "Francis X. Curzio", "Frank Curzio"]);

        let mut w = NameVariants::new();
        w.insert_with_surname("John Q.");
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn case_insensitive_intersection() {
        let mut a = NameVariants::new();
        a.insert("Kofi Annan");
        let mut b = NameVariants::new();
        b.insert("KOFI annan");
        assert!(a.intersects(&b));
        assert!(a.contains("kofi ANNAN"));
    }
}
