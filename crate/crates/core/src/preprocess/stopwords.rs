use std::collections::BTreeSet;

use super::PreprocessError;

const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

/// Set of lowercase stopwords.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopwordList {
    words: BTreeSet<String>,
}

impl Default for StopwordList {
    fn default() -> Self {
        Self::parse(DEFAULT_STOPWORDS).expect("bundled stopword list is valid")
    }
}

impl StopwordList {
    /// One word per line; `#` starts a comment line; entries are lowercased.
    pub fn parse(text: &str) -> Result<Self, PreprocessError> {
        let mut words = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let w = line.trim();
            if w.is_empty() || w.starts_with('#') {
                continue;
            }
            if w.chars().any(char::is_whitespace) {
                return Err(PreprocessError::BadStopword {
                    line: i + 1,
                    content: line.to_string(),
                });
            }
            words.insert(w.to_lowercase());
        }
        Ok(Self { words })
    }

    pub fn from_words<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        Self {
            words: words.into_iter().map(|w| w.as_ref().to_lowercase()).collect(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    pub fn to_text(&self) -> String {
        self.words.iter().map(|w| format!("{w}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_list_is_lowercase_without_whitespace() {
        let s = StopwordList::default();
        assert!(s.len() >= 140, "{}", s.len());
        for w in s.words() {
            assert_eq!(w, w.to_lowercase());
            assert!(!w.chars().any(char::is_whitespace));
        }
        assert!(s.contains("the"));
        assert!(!s.contains("free"));
    }

    #[test]
    fn parse_handles_comments_and_case() {
        let s = StopwordList::parse("# header\nThe\n\n  AND \n").unwrap();
        assert_eq!(s.words().collect::<Vec<_>>(), ["and", "the"]);
        assert!(StopwordList::parse("two words\n").is_err());
    }
}
