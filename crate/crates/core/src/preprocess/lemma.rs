use std::collections::HashMap;

use super::PreprocessError;

const DEFAULT_RULES: &str = include_str!("../../data/lemma_rules.tsv");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixRule {
    pub suffix: String,
    pub replacement: String,
    pub min_stem: usize,
}

/// Irregular-form exceptions plus ordered suffix rewrite rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaRules {
    pub exceptions: HashMap<String, String>,
    pub suffix_rules: Vec<SuffixRule>,
}

impl Default for LemmaRules {
    fn default() -> Self {
        Self::parse(DEFAULT_RULES).expect("bundled lemma rules are valid")
    }
}

impl LemmaRules {
    /// Parse the tab-separated rules format (see `data/lemma_rules.tsv`).
    pub fn parse(text: &str) -> Result<Self, PreprocessError> {
        let mut exceptions = HashMap::new();
        let mut suffix_rules = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let bad = || PreprocessError::BadRulesLine {
                line: i + 1,
                content: line.to_string(),
            };
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                ["exception", surface, lemma] if !surface.is_empty() && !lemma.is_empty() => {
                    exceptions.insert(surface.to_string(), lemma.to_string());
                }
                ["rule", suffix, replacement, min_stem] if !suffix.is_empty() => {
                    suffix_rules.push(SuffixRule {
                        suffix: suffix.to_string(),
                        replacement: replacement.to_string(),
                        min_stem: min_stem.trim().parse().map_err(|_| bad())?,
                    });
                }
                _ => return Err(bad()),
            }
        }
        Ok(Self {
            exceptions,
            suffix_rules,
        })
    }

    /// Serialize back to the rules format. Exceptions are sorted so the
    /// output is deterministic.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut ex: Vec<_> = self.exceptions.iter().collect();
        ex.sort();
        for (s, l) in ex {
            out.push_str(&format!("exception\t{s}\t{l}\n"));
        }
        for r in &self.suffix_rules {
            out.push_str(&format!("rule\t{}\t{}\t{}\n", r.suffix, r.replacement, r.min_stem));
        }
        out
    }
}

/// Lemma of a lowercase surface form. Never returns an empty string for a
/// non-empty input.
pub fn lemmatize(surface: &str, rules: &LemmaRules) -> String {
    if let Some(lemma) = rules.exceptions.get(surface) {
        return lemma.clone();
    }
    for rule in &rules.suffix_rules {
        if let Some(stem) = surface.strip_suffix(rule.suffix.as_str()) {
            if stem.chars().count() >= rule.min_stem {
                let lemma = format!("{stem}{}", rule.replacement);
                if lemma.is_empty() {
                    break;
                }
                return lemma;
            }
        }
    }
    surface.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let r = LemmaRules::default();
        assert_eq!(lemmatize("running", &r), "run");
        assert_eq!(lemmatize("went", &r), "go");
        assert_eq!(lemmatize("cat", &r), "cat");
    }

    #[test]
    fn shipped_table_lookups() {
        // Oracle: the rule that fires is the first row of the table whose
        // suffix matches with a long enough stem.
        let r = LemmaRules::default();
        let nning = r.suffix_rules.iter().find(|x| x.suffix == "nning").unwrap();
        assert_eq!((nning.replacement.as_str(), nning.min_stem), ("n", 1));
        for (w, l) in [
            ("offers", "offer"),
            ("companies", "company"),
            ("classes", "class"),
            ("class", "class"),
            ("bonus", "bonus"),
            ("shopping", "shop"),
            ("saving", "save"),
            ("received", "receive"),
            ("clicked", "click"),
            ("needed", "need"),
            ("need", "need"),
            ("processed", "process"),
            ("updating", "update"),
            ("sharing", "share"),
            ("its", "its"),
            ("thing", "thing"),
        ] {
            assert_eq!(lemmatize(w, &r), l, "{w}");
        }
    }

    #[test]
    fn min_stem_skips_to_later_rules() {
        let r = LemmaRules::parse("rule\ting\t\t3\nrule\tg\tG\t0\n").unwrap();
        // "sing" has stem "s" (too short for the first rule).
        assert_eq!(lemmatize("sing", &r), "sinG");
        assert_eq!(lemmatize("singing", &r), "sing");
    }

    #[test]
    fn rule_never_empties_a_word() {
        let r = LemmaRules::parse("rule\ts\t\t0\n").unwrap();
        assert_eq!(lemmatize("s", &r), "s");
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = LemmaRules::parse("# ok\nrule\tx\n").unwrap_err();
        assert!(matches!(err, PreprocessError::BadRulesLine { line: 2, .. }));
        assert!(LemmaRules::parse("rule\ting\t\tmany\n").is_err());
    }

    #[test]
    fn text_round_trip() {
        let r = LemmaRules::default();
        assert_eq!(LemmaRules::parse(&r.to_text()).unwrap(), r);
    }
}
