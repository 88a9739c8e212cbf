//! Text preprocessing: normalization, tokenization, lemmatization, stopword
//! and numeric/punctuation flagging, and term extraction.
//!
//! The whole pipeline is a pure function of the input text, the
//! [`PreprocessConfig`], the [`StopwordList`] and the [`LemmaRules`].

mod lemma;
mod stopwords;
mod tokenize;

use thiserror::Error;

pub use lemma::{lemmatize, LemmaRules, SuffixRule};
pub use stopwords::StopwordList;
pub use tokenize::{normalize, tokenize};

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("lemma rules line {line}: cannot parse {content:?}")]
    BadRulesLine { line: usize, content: String },
    #[error("stopword list line {line}: entry {content:?} contains whitespace")]
    BadStopword { line: usize, content: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub is_stop: bool,
    pub is_numeric: bool,
    pub is_punct: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedDoc {
    pub tokens: Vec<Token>,
    /// Codepoints in the (normalized) source text.
    pub source_length: usize,
}

/// Pipeline switches. All default to on.
///
/// `lowercase` only affects the emitted terms when `use_lemmas` is off;
/// lemmas, stopword matching and the flags are always computed on the
/// lowercased surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PreprocessConfig {
    pub lowercase: bool,
    pub remove_stopwords: bool,
    pub remove_numbers: bool,
    pub remove_punct: bool,
    pub use_lemmas: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            lowercase: true,
            remove_stopwords: true,
            remove_numbers: true,
            remove_punct: true,
            use_lemmas: true,
        }
    }
}

impl PreprocessConfig {
    pub fn all_off() -> Self {
        Self {
            lowercase: false,
            remove_stopwords: false,
            remove_numbers: false,
            remove_punct: false,
            use_lemmas: false,
        }
    }
}

/// Digits with an optional leading sign and `.`/`,` separators strictly
/// between digits.
pub fn is_numeric_token(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let chars: Vec<char> = body.chars().collect();
    if chars.is_empty() || !chars[0].is_numeric() || !chars[chars.len() - 1].is_numeric() {
        return false;
    }
    chars
        .windows(2)
        .all(|w| w[0].is_numeric() || (w[1].is_numeric() && matches!(w[0], '.' | ',')))
        && chars.iter().all(|c| c.is_numeric() || matches!(c, '.' | ','))
}

/// Non-empty and made only of punctuation or non-currency symbols.
pub fn is_punct_token(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| tokenize::is_peelable(c) && !tokenize::is_currency(c))
}

pub fn annotate<S: AsRef<str>>(
    surfaces: &[S],
    stopwords: &StopwordList,
    rules: &LemmaRules,
) -> TokenizedDoc {
    let tokens = surfaces
        .iter()
        .map(|s| {
            let surface = s.as_ref();
            let lower = surface.to_lowercase();
            Token {
                surface: surface.to_string(),
                lemma: lemmatize(&lower, rules),
                is_stop: stopwords.contains(&lower),
                is_numeric: is_numeric_token(surface),
                is_punct: is_punct_token(surface),
            }
        })
        .collect();
    let source_length = surfaces
        .iter()
        .map(|s| s.as_ref().chars().count())
        .sum::<usize>()
        + surfaces.len().saturating_sub(1);
    TokenizedDoc {
        tokens,
        source_length,
    }
}

pub fn extract_terms(doc: &TokenizedDoc, config: &PreprocessConfig) -> Vec<String> {
    doc.tokens
        .iter()
        .filter(|t| !(config.remove_stopwords && t.is_stop))
        .filter(|t| !(config.remove_numbers && t.is_numeric))
        .filter(|t| !(config.remove_punct && t.is_punct))
        .map(|t| {
            if config.use_lemmas {
                t.lemma.clone()
            } else if config.lowercase {
                t.surface.to_lowercase()
            } else {
                t.surface.clone()
            }
        })
        .collect()
}

/// A configured preprocessing pipeline: text in, terms out.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Preprocessor {
    pub config: PreprocessConfig,
    pub stopwords: StopwordList,
    pub rules: LemmaRules,
}

impl Preprocessor {
    pub fn new(config: PreprocessConfig, stopwords: StopwordList, rules: LemmaRules) -> Self {
        Self {
            config,
            stopwords,
            rules,
        }
    }

    /// Token table for a text (surface, lemma, flags).
    pub fn analyze(&self, text: &str) -> TokenizedDoc {
        let normalized = normalize(text);
        let mut doc = annotate(&tokenize(&normalized), &self.stopwords, &self.rules);
        doc.source_length = normalized.chars().count();
        doc
    }

    pub fn terms(&self, text: &str) -> Vec<String> {
        extract_terms(&self.analyze(text), &self.config)
    }
}
