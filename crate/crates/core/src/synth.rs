//! Deterministic synthetic spam/ham corpus with tunable class signal.
//!
//! Every word of a message is drawn independently: with probability
//! `signal` from its own class's cue list (Zipf-weighted, earlier
//! entries more frequent), otherwise from a shared pool
//! holding neutral words and both cue lists. Subjects and decorations are
//! class-typed with probability `signal` and random otherwise. At `signal = 0` the two
//! classes have identical word distributions; as `signal` grows they
//! separate. Messages alternate spam, ham, spam, ... and ids are their
//! zero-based positions, matching the ids [`crate::corpus::parse_csv`]
//! assigns when the corpus is written as CSV and read back.

use thiserror::Error;

use crate::corpus::{Corpus, LabeledExample};
use crate::label::Label;
use crate::rng::SplitMix64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("signal must lie in [0, 1], got {0}")]
    BadSignal(f64),
    #[error("need at least one message per class")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub per_class: usize,
    pub signal: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    /// The shipped corpus: 750 messages per class.
    fn default() -> Self {
        Self {
            per_class: 750,
            signal: 0.4,
            seed: 42,
        }
    }
}

const SPAM_CUES: &[&str] = &[
    "free", "winner", "prize", "cash", "offer", "click", "unsubscribe", "guaranteed", "credit", "loan",
    "discount", "deal", "limited", "bonus", "viagra", "casino", "lottery", "claim", "urgent", "congratulations",
    "selected", "exclusive", "cheap", "save", "earn", "income", "investment", "risk-free", "refund", "bargain",
    "subscribe", "promotion", "voucher", "gift", "reward", "million", "rich", "pills", "weight", "miracle",
    "winning", "offers", "clicking", "rates", "debt", "approved", "instant", "order", "buy", "sale",
];

const HAM_CUES: &[&str] = &[
    "meeting", "agenda", "project", "report", "schedule", "review", "deadline", "team", "lunch", "minutes",
    "draft", "attached", "thanks", "regards", "colleague", "conference", "presentation", "budget", "quarter", "slides",
    "feedback", "proposal", "calendar", "office", "manager", "client", "contract", "invoice", "lecture", "homework",
    "seminar", "family", "weekend", "dinner", "birthday", "recipe", "library", "thesis", "appointment", "reminder",
    "meetings", "reviewed", "scheduled", "discussed", "notes", "update", "summary", "plan", "question", "answer",
];

const NEUTRAL: &[&str] = &[
    "the", "a", "and", "to", "of", "in", "for", "on", "with", "is",
    "this", "that", "you", "we", "your", "our", "please", "today", "tomorrow", "week",
    "time", "day", "email", "message", "information", "details", "next", "new", "good", "great",
    "people", "work", "home", "call", "phone", "address", "number", "group", "list", "page",
    "link", "site", "online", "service", "account", "year", "month", "morning", "evening", "now",
    "just", "also", "very", "well", "see", "know", "make", "get", "need", "want",
    "help", "send", "reply", "find", "look", "start", "end", "part", "point", "case",
];

const SPAM_SUBJECTS: &[&str] = &[
    "You have been selected", "Limited time offer", "Claim your reward", "Congratulations winner",
    "Exclusive deal inside", "Earn cash fast", "Act now", "Your account bonus",
];

const HAM_SUBJECTS: &[&str] = &[
    "Meeting notes", "Project update", "Re: agenda", "Lunch tomorrow",
    "Draft for review", "Weekly summary", "Quick question", "Schedule change",
];

fn pick<'a>(rng: &mut SplitMix64, list: &[&'a str]) -> &'a str {
    list[rng.below(list.len())]
}

/// Item `k` drawn with weight `1 / (k + 1)`.
fn pick_zipf<'a>(rng: &mut SplitMix64, list: &[&'a str]) -> &'a str {
    let total: f64 = (1..=list.len()).map(|k| 1.0 / k as f64).sum();
    let mut u = rng.next_f64() * total;
    for (k, item) in list.iter().enumerate() {
        u -= 1.0 / (k + 1) as f64;
        if u < 0.0 {
            return item;
        }
    }
    list[list.len() - 1]
}

/// Own-class item with probability `signal`, otherwise either class's
/// item with equal odds.
fn cue<'a>(rng: &mut SplitMix64, label: Label, signal: f64, spam: &[&'a str], ham: &[&'a str]) -> &'a str {
    let own_class = rng.next_f64() < signal;
    let spammy = if own_class { label == Label::Spam } else { rng.below(2) == 0 };
    pick(rng, if spammy { spam } else { ham })
}

fn message(rng: &mut SplitMix64, label: Label, signal: f64) -> String {
    let cues = match label {
        Label::Spam => SPAM_CUES,
        Label::Ham => HAM_CUES,
    };
    let pool_len = NEUTRAL.len() + SPAM_CUES.len() + HAM_CUES.len();
    let mut text = String::from(cue(rng, label, signal, SPAM_SUBJECTS, HAM_SUBJECTS));
    text.push('\n');
    let words = 20 + rng.below(41);
    for i in 0..words {
        let word = if rng.next_f64() < signal {
            pick_zipf(rng, cues)
        } else {
            let k = rng.below(pool_len);
            if k < NEUTRAL.len() {
                NEUTRAL[k]
            } else if k < NEUTRAL.len() + SPAM_CUES.len() {
                SPAM_CUES[k - NEUTRAL.len()]
            } else {
                HAM_CUES[k - NEUTRAL.len() - SPAM_CUES.len()]
            }
        };
        if i > 0 {
            text.push(if i % 12 == 0 { '\n' } else { ' ' });
        }
        text.push_str(word);
        // Occasional amounts and punctuation exercise the tokenizer.
        match rng.below(16) {
            0 => text.push_str(cue(rng, label, signal, &[" $100!"], &[" at 10.30,"])),
            1 => text.push('.'),
            _ => {}
        }
    }
    text
}

pub fn generate(config: &SynthConfig) -> Result<Corpus, SynthError> {
    if !(0.0..=1.0).contains(&config.signal) {
        return Err(SynthError::BadSignal(config.signal));
    }
    if config.per_class == 0 {
        return Err(SynthError::Empty);
    }
    let mut rng = SplitMix64::new(config.seed);
    let examples = (0..2 * config.per_class)
        .map(|i| {
            let label = if i % 2 == 0 { Label::Spam } else { Label::Ham };
            LabeledExample {
                id: i.to_string(),
                text: message(&mut rng, label, config.signal),
                label,
            }
        })
        .collect();
    Ok(Corpus::new(examples))
}
