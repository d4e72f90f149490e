use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed CoNLL-2012 input.
    #[error("document {doc}, line {line}: {msg}")]
    Conll {
        doc: String,
        line: usize,
        msg: String,
    },

    /// Malformed JSON annotated document; `path` points at the offending value.
    #[error("{path}: {msg}")]
    Json { path: String, msg: String },

    /// A document violates a model invariant.
    #[error("document {doc}: {msg}")]
    Invalid { doc: String, msg: String },

    #[error("document {doc}: dependency cycle through token {token}")]
    DependencyCycle { doc: String, token: usize },

    #[error("document {doc}: missing {layer} layer")]
    MissingLayer { doc: String, layer: &'static str },

    /// Malformed resource file (gazetteer, honorific list, config).
    #[error("{source_name}, line {line}: {msg}")]
    Resource {
        source_name: String,
        line: usize,
        msg: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(doc: &str, msg: impl Into<String>) -> Self {
        Error::Invalid {
            doc: doc.to_owned(),
            msg: msg.into(),
        }
    }
}
