use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("malformed fixture record on line {line}: {message}")]
    Fixture { line: usize, message: String },

    #[error("unknown node id {0}")]
    UnknownNode(usize),

    #[error("article {0} is not a vertex of the See Also graph")]
    UnknownArticle(u64),

    #[error("line {line}: {message}")]
    Trec { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Path {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn at_path(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Path { path, source }
    }
}

/// Counted, non-fatal anomalies keyed by a short reason string.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Warnings(BTreeMap<String, u64>);

impl Warnings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bump(&mut self, reason: &str) {
        self.add(reason, 1);
    }

    pub fn add(&mut self, reason: &str, n: u64) {
        if n == 0 {
            return;
        }
        *self.0.entry(reason.to_owned()).or_default() += n;
    }

    pub fn merge(&mut self, other: &Warnings) {
        for (reason, n) in &other.0 {
            self.add(reason, *n);
        }
    }

    pub fn get(&self, reason: &str) -> u64 {
        self.0.get(reason).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }
}
