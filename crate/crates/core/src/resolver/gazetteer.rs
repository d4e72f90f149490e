use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

const BUNDLED: &str = include_str!("../../data/gazetteer_sample.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Gender {
    M,
    F,
    Unisex,
}

impl Gender {
    /// Unisex is compatible with everything; M and F only with themselves
    /// and Unisex.
    pub fn compatible(self, other: Gender) -> bool {
        self == Gender::Unisex || other == Gender::Unisex || self == other
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gender::M => "M",
            Gender::F => "F",
            Gender::Unisex => "U",
        })
    }
}

/// First-name → gender lookup. Names not listed are unisex.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: HashMap<String, Gender>,
}

impl Gazetteer {
    /// Parses `token<TAB>M|F` lines; blank lines and `#` comments are skipped.
    pub fn parse(source_name: &str, text: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Resource {
                source_name: source_name.to_owned(),
                line: i + 1,
                msg,
            };
            let (token, gender) = trimmed
                .split_once('\t')
                .ok_or_else(|| err(format!("expected token<TAB>gender, found {trimmed:?}")))?;
            let gender = match gender.trim() {
                "M" | "m" => Gender::M,
                "F" | "f" => Gender::F,
                other => return Err(err(format!("gender must be M or F, found {other:?}"))),
            };
            entries.insert(token.trim().to_lowercase(), gender);
        }
        Ok(Gazetteer { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Gazetteer::parse(&path.display().to_string(), &text)
    }

    /// The small sample list shipped with the crate.
    pub fn bundled() -> Self {
        Gazetteer::parse("bundled gazetteer", BUNDLED).expect("bundled gazetteer is well-formed")
    }

    pub fn gender(&self, token: &str) -> Gender {
        self.entries
            .get(&token.to_lowercase())
            .copied()
            .unwrap_or(Gender::Unisex)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
