use std::path::PathBuf;

use proptest::prelude::*;
use spamlab::corpus::{parse_eml, parse_mbox, CorpusError};
use spamlab::preprocess::{lemmatize, LemmaRules};

fn fixture(name: &str) -> Vec<u8> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/eml").join(name);
    std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn golden(name: &str, subject: &str, body: &str) {
    let email = parse_eml(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    assert_eq!(email.subject, subject, "{name} subject");
    assert_eq!(email.body, body, "{name} body");
}

#[test]
fn plain_text() {
    golden("plain.eml", "Lunch on Friday", "Are we still on for lunch on Friday?\nSee you at noon.");
}

#[test]
fn base64_body_and_encoded_word_subject() {
    golden(
        "base64.eml",
        "You won a prize \u{2013} act now",
        "Congratulations! You have won a FREE prize.\nClaim your $1000 reward now.",
    );
}

#[test]
fn quoted_printable_body() {
    golden(
        "quoted_printable.eml",
        "Caf\u{e9} meeting notes",
        "The caf\u{e9} meeting moved to room 4. \nThis line is soft-wrapped across two physical lines in the file.\nTotal budget: 3=1+2",
    );
}

#[test]
fn multipart_alternative_prefers_plain() {
    golden("multipart_alternative.eml", "Weekly digest", "Plain part wins.");
}

#[test]
fn nested_multipart_skips_attachment() {
    golden("multipart_mixed.eml", "Report attached", "Na\u{ef}ve summary: the report is attached.");
}

#[test]
fn html_only_is_stripped() {
    let email = parse_eml(&fixture("html_only.eml")).unwrap();
    assert_eq!(email.subject, "Big sale");
    let words: Vec<&str> = email.body.split_whitespace().collect();
    assert_eq!(words.join(" "), "Save 50% & more Today only!");
    assert!(!email.body.contains('<'));
}

#[test]
fn malformed_fixtures_raise_expected_errors() {
    assert!(matches!(
        parse_eml(&fixture("malformed_no_separator.eml")),
        Err(CorpusError::MalformedMessage)
    ));
    assert!(matches!(parse_eml(&fixture("image_only.eml")), Err(CorpusError::UnsupportedContent(_))));
    assert!(matches!(
        parse_eml(&fixture("multipart_no_text.eml")),
        Err(CorpusError::UnsupportedContent(_))
    ));
}

#[test]
fn mbox_of_fixtures() {
    let mut stream = Vec::new();
    for name in ["plain.eml", "image_only.eml", "quoted_printable.eml"] {
        stream.extend_from_slice(b"From sender@example.org Mon Mar  3 10:00:00 2025\n");
        stream.extend_from_slice(&fixture(name));
        stream.push(b'\n');
    }
    let parsed = parse_mbox(&stream, "fixtures.mbox").unwrap();
    assert_eq!(parsed.emails.len(), 2);
    assert_eq!(parsed.skipped.len(), 1);
    assert_eq!(parsed.skipped[0].index, 1);
    assert_eq!(parsed.emails[0].subject, "Lunch on Friday");
    assert_eq!(parsed.emails[1].id, "fixtures.mbox#2");
}

/// Base64 with 76-column lines, as mail agents emit it.
fn b64(bytes: &[u8]) -> String {
    const A: &[u8; 64] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    let mut out = String::new();
    for chunk in bytes.chunks(3) {
        let b = [chunk[0], *chunk.get(1).unwrap_or(&0), *chunk.get(2).unwrap_or(&0)];
        let n = (u32::from(b[0]) << 16) | (u32::from(b[1]) << 8) | u32::from(b[2]);
        for k in 0..4 {
            if k <= chunk.len() {
                out.push(A[(n >> (18 - 6 * k) & 63) as usize] as char);
            } else {
                out.push('=');
            }
        }
    }
    out.as_bytes().chunks(76).map(|c| std::str::from_utf8(c).unwrap()).collect::<Vec<_>>().join("\r\n")
}

proptest! {
    #[test]
    fn synthesized_message_round_trips(
        subject in "[A-Za-z0-9][A-Za-z0-9 ,.!?]{0,40}[A-Za-z0-9!?]",
        // A leading U+FEFF is a byte-order mark to the charset decoder.
        lines in proptest::collection::vec("[^\r\n\u{feff}]{0,60}", 1..5),
    ) {
        let body = lines.join("\n");
        let body = body.trim_end_matches(['\r', '\n']).to_string();
        let raw = format!(
            "From: a@example.org\r\nSubject: {subject}\r\nMIME-Version: 1.0\r\nContent-Type: text/plain; charset=utf-8\r\nContent-Transfer-Encoding: base64\r\n\r\n{}\r\n",
            b64(body.as_bytes())
        );
        let email = parse_eml(raw.as_bytes()).unwrap();
        prop_assert_eq!(email.subject, subject);
        prop_assert_eq!(email.body, body);
    }
}

/// Inflected and base forms the bundled rules are expected to handle.
const LEXICON: &[&str] = &[
    "running", "runs", "ran", "went", "going", "goes", "made", "making", "took", "taken", "bought", "buying",
    "sent", "sending", "winners", "winning", "won", "offers", "offered", "clicked", "clicking", "prizes", "boxes",
    "watches", "wishes", "cities", "studies", "studied", "stopped", "planned", "hoped", "hoping", "moving", "moved",
    "dancing", "danced", "rating", "rated", "caring", "cared", "children", "women", "mice", "feet", "better", "best",
    "was", "were", "been", "is", "are", "has", "had", "did", "does", "news", "always", "series", "morning",
    "something", "string", "spring", "glasses", "addresses", "bus", "status", "analysis", "meetings", "agreed",
    "free", "cash", "money", "email", "emails", "accounts", "payment", "paid", "selling", "sold", "writes", "wrote",
    "written", "calling", "called", "filled", "filling", "passed", "missing", "said", "says", "seen", "knew",
];

#[test]
fn lemmas_are_fixpoints() {
    let rules = LemmaRules::default();
    for w in LEXICON {
        let once = lemmatize(w, &rules);
        assert!(!once.is_empty());
        assert_eq!(lemmatize(&once, &rules), once, "{w} -> {once}");
    }
}

#[test]
fn exception_targets_are_fixpoints() {
    let rules = LemmaRules::default();
    for lemma in rules.exceptions.values() {
        assert_eq!(&lemmatize(lemma, &rules), lemma);
    }
}
