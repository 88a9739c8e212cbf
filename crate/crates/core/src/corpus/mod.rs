//! Email ingestion and labeled corpora.
//!
//! Raw sources (single EML messages, mbox files, the CSV interchange format)
//! are decoded into [`RawEmail`]s and [`LabeledExample`]s. A [`Corpus`] is
//! immutable once built; [`stratified_split`] partitions it deterministically.

mod dataset;
mod eml;
mod mbox;
mod sources;
mod split;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::label::Label;

pub use dataset::{load_csv, parse_csv, write_csv};
pub use eml::parse_eml;
pub use mbox::{parse_mbox, MboxSkip, ParsedMbox};
pub use sources::{load_eml_dir, load_mbox_file};
pub use split::{stratified_split, CorpusSplit, SplitSpec};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("malformed message: no blank line separating headers from body")]
    MalformedMessage,
    #[error("unsupported content: {0}")]
    UnsupportedContent(String),
    #[error("mailbox contains no messages")]
    EmptyMailbox,
    #[error("bad CSV header: expected `label,text`, found `{0}`")]
    BadHeader(String),
    #[error("bad label {label:?} in row {row}")]
    BadLabel { row: usize, label: String },
    #[error("unbalanced quote in row {row}")]
    UnbalancedQuote { row: usize },
    #[error("row {row}: {message}")]
    BadRow { row: usize, message: String },
    #[error("train fraction {0} must lie strictly between 0 and 1")]
    BadFraction(f64),
    #[error("class {0} has fewer than 2 examples; cannot stratify")]
    TooFewExamples(Label),
    #[error("degenerate split: train has {train} examples, test has {test}")]
    DegenerateSplit { train: usize, test: usize },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<CorpusError>,
    },
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn in_file(path: &Path, source: CorpusError) -> Self {
        CorpusError::InFile {
            path: path.to_path_buf(),
            source: Box::new(source),
        }
    }
}

/// One decoded email message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEmail {
    pub id: String,
    pub subject: String,
    pub body: String,
    pub source: String,
}

/// An email's classified text plus its class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledExample {
    /// Stable identifier within the corpus it was loaded into.
    pub id: String,
    pub text: String,
    pub label: Label,
}

/// Subject and body joined by a single newline.
pub fn to_example(email: &RawEmail, label: Label) -> LabeledExample {
    LabeledExample {
        id: email.id.clone(),
        text: format!("{}\n{}", email.subject, email.body),
        label,
    }
}

/// Like [`to_example`], but with the subject dropped when `include_subject`
/// is false.
pub fn to_example_with(email: &RawEmail, label: Label, include_subject: bool) -> LabeledExample {
    if include_subject {
        to_example(email, label)
    } else {
        LabeledExample {
            id: email.id.clone(),
            text: email.body.clone(),
            label,
        }
    }
}

/// Which side of a split a corpus came from. Vocabulary construction refuses
/// test-side corpora.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusRole {
    Full,
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    examples: Vec<LabeledExample>,
    class_counts: [usize; 2],
    role: CorpusRole,
}

impl Corpus {
    pub fn new(examples: Vec<LabeledExample>) -> Self {
        Self::with_role(examples, CorpusRole::Full)
    }

    pub(crate) fn with_role(examples: Vec<LabeledExample>, role: CorpusRole) -> Self {
        let mut class_counts = [0usize; 2];
        for ex in &examples {
            class_counts[ex.label.index()] += 1;
        }
        Self {
            examples,
            class_counts,
            role,
        }
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn count(&self, label: Label) -> usize {
        self.class_counts[label.index()]
    }

    pub fn role(&self) -> CorpusRole {
        self.role
    }

    /// CRC-32 over every example's id, label and text, in order. Used by the
    /// split manifest to detect that a dataset changed under it.
    pub fn fingerprint(&self) -> u32 {
        let mut h = crc32fast::Hasher::new();
        for ex in &self.examples {
            h.update(ex.id.as_bytes());
            h.update(&[0, ex.label.index() as u8, 0]);
            h.update(ex.text.as_bytes());
            h.update(&[0xff]);
        }
        h.finalize()
    }

    pub fn into_examples(self) -> Vec<LabeledExample> {
        self.examples
    }
}
