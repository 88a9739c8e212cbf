//! Persisted train/test split.
//!
//! ```text
//! # spamlab-manifest v1
//! examples<TAB>1500
//! fingerprint<TAB>89abcdef
//! train_fraction<TAB>0.75
//! seed<TAB>42
//! stratified<TAB>true
//! train<TAB><id>
//! test<TAB><id>
//! ```
//!
//! The fingerprint is [`Corpus::fingerprint`] of the whole dataset as eight
//! lowercase hex digits. Id lines follow corpus order within each side.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::corpus::{Corpus, CorpusRole, CorpusSplit, SplitSpec};

pub const MANIFEST_HEADER: &str = "# spamlab-manifest v1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ManifestError {
    #[error("manifest line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("manifest does not match dataset: {0}")]
    Mismatch(String),
    #[error("example id {0:?} contains a tab or line break and cannot be recorded")]
    BadId(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitManifest {
    pub examples: usize,
    pub fingerprint: u32,
    pub spec: SplitSpec,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
}

impl SplitManifest {
    pub fn from_split(dataset: &Corpus, spec: &SplitSpec, split: &CorpusSplit) -> Self {
        let ids = |c: &Corpus| c.examples().iter().map(|e| e.id.clone()).collect();
        Self {
            examples: dataset.len(),
            fingerprint: dataset.fingerprint(),
            spec: *spec,
            train_ids: ids(&split.train),
            test_ids: ids(&split.test),
        }
    }

    pub fn render(&self) -> Result<String, ManifestError> {
        let mut out = String::new();
        let s = &self.spec;
        let _ = writeln!(out, "{MANIFEST_HEADER}");
        let _ = writeln!(out, "examples\t{}", self.examples);
        let _ = writeln!(out, "fingerprint\t{:08x}", self.fingerprint);
        let _ = writeln!(out, "train_fraction\t{}", s.train_fraction);
        let _ = writeln!(out, "seed\t{}", s.seed);
        let _ = writeln!(out, "stratified\t{}", s.stratified);
        for (side, ids) in [("train", &self.train_ids), ("test", &self.test_ids)] {
            for id in ids {
                if id.contains(['\t', '\n', '\r']) {
                    return Err(ManifestError::BadId(id.clone()));
                }
                let _ = writeln!(out, "{side}\t{id}");
            }
        }
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self, ManifestError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let err = |line: usize, message: String| ManifestError::Parse { line, message };
        match lines.next() {
            Some((_, h)) if h == MANIFEST_HEADER => {}
            _ => return Err(err(1, format!("expected header {MANIFEST_HEADER:?}"))),
        }
        let mut field = |key: &str| -> Result<(usize, String), ManifestError> {
            let (n, line) = lines.next().ok_or_else(|| err(0, format!("missing {key}")))?;
            let value = line
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix('\t'))
                .ok_or_else(|| err(n, format!("expected {key:?}")))?;
            Ok((n, value.to_string()))
        };
        let (n, v) = field("examples")?;
        let examples = v.parse().map_err(|_| err(n, format!("bad example count {v:?}")))?;
        let (n, v) = field("fingerprint")?;
        let fingerprint = u32::from_str_radix(&v, 16).map_err(|_| err(n, format!("bad fingerprint {v:?}")))?;
        let (n, v) = field("train_fraction")?;
        let train_fraction = v.parse().map_err(|_| err(n, format!("bad fraction {v:?}")))?;
        let (n, v) = field("seed")?;
        let seed = v.parse().map_err(|_| err(n, format!("bad seed {v:?}")))?;
        let (n, v) = field("stratified")?;
        let stratified = v.parse().map_err(|_| err(n, format!("bad boolean {v:?}")))?;

        let mut train_ids = Vec::new();
        let mut test_ids = Vec::new();
        for (n, line) in lines {
            if line.is_empty() {
                continue;
            }
            match line.split_once('\t') {
                Some(("train", id)) => train_ids.push(id.to_string()),
                Some(("test", id)) => test_ids.push(id.to_string()),
                _ => return Err(err(n, format!("expected train/test id line, found {line:?}"))),
            }
        }
        Ok(Self {
            examples,
            fingerprint,
            spec: SplitSpec {
                train_fraction,
                seed,
                stratified,
            },
            train_ids,
            test_ids,
        })
    }

    /// Rebuild the recorded split from `dataset`, which must be the exact
    /// dataset the manifest was written for.
    pub fn resolve(&self, dataset: &Corpus) -> Result<CorpusSplit, ManifestError> {
        let mismatch = |m: String| ManifestError::Mismatch(m);
        if dataset.len() != self.examples {
            return Err(mismatch(format!(
                "manifest records {} examples, dataset has {}",
                self.examples,
                dataset.len()
            )));
        }
        let fp = dataset.fingerprint();
        if fp != self.fingerprint {
            return Err(mismatch(format!(
                "dataset fingerprint {fp:08x} differs from recorded {:08x}",
                self.fingerprint
            )));
        }
        let mut index: HashMap<&str, usize> = HashMap::with_capacity(dataset.len());
        for (i, e) in dataset.examples().iter().enumerate() {
            if index.insert(e.id.as_str(), i).is_some() {
                return Err(mismatch(format!("dataset id {:?} is not unique", e.id)));
            }
        }
        let mut side: Vec<Option<CorpusRole>> = vec![None; dataset.len()];
        for (role, ids) in [(CorpusRole::Train, &self.train_ids), (CorpusRole::Test, &self.test_ids)] {
            for id in ids {
                let &i = index
                    .get(id.as_str())
                    .ok_or_else(|| mismatch(format!("id {id:?} not found in dataset")))?;
                if side[i].replace(role).is_some() {
                    return Err(mismatch(format!("id {id:?} listed twice")));
                }
            }
        }
        let mut train = Vec::with_capacity(self.train_ids.len());
        let mut test = Vec::with_capacity(self.test_ids.len());
        for (e, s) in dataset.examples().iter().zip(&side) {
            match s {
                Some(CorpusRole::Train) => train.push(e.clone()),
                Some(CorpusRole::Test) => test.push(e.clone()),
                _ => return Err(mismatch(format!("id {:?} is on neither side", e.id))),
            }
        }
        Ok(CorpusSplit {
            train: Corpus::with_role(train, CorpusRole::Train),
            test: Corpus::with_role(test, CorpusRole::Test),
        })
    }
}
