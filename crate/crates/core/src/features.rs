//! Bag-of-words features over a vocabulary frozen on the training split.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::label::Label;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeatureError {
    #[error("no term reaches the minimum document frequency; vocabulary is empty")]
    EmptyVocabulary,
}

/// Dense term index built from training documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    doc_frequency: Vec<u32>,
    term_to_index: HashMap<String, u32>,
    min_df: u32,
    max_size: Option<usize>,
}

impl Vocabulary {
    /// Keep terms with document frequency `>= min_df`; if more than
    /// `max_size` survive keep the highest-df ones (ties: lexicographically
    /// smaller first). Indices follow lexicographic term order.
    pub fn build<D: AsRef<[String]>>(
        train_docs: &[D],
        min_df: u32,
        max_size: Option<usize>,
    ) -> Result<Self, FeatureError> {
        let mut df: BTreeMap<&str, u32> = BTreeMap::new();
        for doc in train_docs {
            let mut seen: Vec<&str> = doc.as_ref().iter().map(String::as_str).collect();
            seen.sort_unstable();
            seen.dedup();
            for t in seen {
                *df.entry(t).or_default() += 1;
            }
        }
        let mut kept: Vec<(&str, u32)> = df.into_iter().filter(|&(_, n)| n >= min_df).collect();
        if let Some(cap) = max_size {
            if kept.len() > cap {
                kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
                kept.truncate(cap);
                kept.sort_by(|a, b| a.0.cmp(b.0));
            }
        }
        if kept.is_empty() {
            return Err(FeatureError::EmptyVocabulary);
        }
        Ok(Self::from_parts(
            kept.iter().map(|(t, _)| t.to_string()).collect(),
            kept.iter().map(|&(_, n)| n).collect(),
            min_df,
            max_size,
        ))
    }

    /// Rebuild from stored parts. `terms` must be sorted and unique.
    pub(crate) fn from_parts(
        terms: Vec<String>,
        doc_frequency: Vec<u32>,
        min_df: u32,
        max_size: Option<usize>,
    ) -> Self {
        let term_to_index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Self {
            terms,
            doc_frequency,
            term_to_index,
            min_df,
            max_size,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<u32> {
        self.term_to_index.get(term).copied()
    }

    pub fn term(&self, index: u32) -> Option<&str> {
        self.terms.get(index as usize).map(String::as_str)
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_frequency(&self) -> &[u32] {
        &self.doc_frequency
    }

    pub fn min_df(&self) -> u32 {
        self.min_df
    }

    pub fn max_size(&self) -> Option<usize> {
        self.max_size
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Representation {
    #[default]
    Count,
    Binary,
    TermFrequency,
}

impl Representation {
    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Count => "count",
            Representation::Binary => "binary",
            Representation::TermFrequency => "tf",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Representation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "count" => Ok(Representation::Count),
            "binary" => Ok(Representation::Binary),
            "tf" | "term-frequency" | "termfrequency" => Ok(Representation::TermFrequency),
            other => Err(format!("unknown representation {other:?} (count|binary|tf)")),
        }
    }
}

/// Sparse vector: strictly increasing indices, strictly positive values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureVector {
    entries: Vec<(u32, f64)>,
    representation: Representation,
}

impl FeatureVector {
    /// Build from arbitrary `(index, value)` pairs; duplicates are summed and
    /// non-positive results dropped.
    pub fn from_pairs(
        pairs: impl IntoIterator<Item = (u32, f64)>,
        representation: Representation,
    ) -> Self {
        let mut map: BTreeMap<u32, f64> = BTreeMap::new();
        for (i, v) in pairs {
            *map.entry(i).or_default() += v;
        }
        Self {
            entries: map.into_iter().filter(|&(_, v)| v > 0.0).collect(),
            representation,
        }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Value at `index`; absent entries read as 0.
    pub fn get(&self, index: u32) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map_or(0.0, |p| self.entries[p].1)
    }

    pub fn max_index(&self) -> Option<u32> {
        self.entries.last().map(|&(i, _)| i)
    }

    /// Dense copy of length `dim`; indices `>= dim` are ignored.
    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for &(i, v) in &self.entries {
            if let Some(slot) = out.get_mut(i as usize) {
                *slot = v;
            }
        }
        out
    }
}

/// Map terms onto the vocabulary; out-of-vocabulary terms are dropped.
pub fn vectorize<S: AsRef<str>>(terms: &[S], vocab: &Vocabulary, repr: Representation) -> FeatureVector {
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for t in terms {
        if let Some(i) = vocab.index_of(t.as_ref()) {
            *counts.entry(i).or_default() += 1;
        }
    }
    let total: u32 = counts.values().sum();
    let entries = counts
        .into_iter()
        .map(|(i, c)| {
            let v = match repr {
                Representation::Count => c as f64,
                Representation::Binary => 1.0,
                Representation::TermFrequency => c as f64 / total as f64,
            };
            (i, v)
        })
        .collect();
    FeatureVector {
        entries,
        representation: repr,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledVector {
    pub vector: FeatureVector,
    pub label: Label,
}
