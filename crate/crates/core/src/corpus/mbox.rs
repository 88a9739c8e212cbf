use super::{parse_eml, CorpusError, RawEmail};

/// A message that could not be parsed and was skipped.
#[derive(Debug)]
pub struct MboxSkip {
    /// Zero-based position of the message in the mailbox.
    pub index: usize,
    pub error: CorpusError,
}

#[derive(Debug, Default)]
pub struct ParsedMbox {
    pub emails: Vec<RawEmail>,
    pub skipped: Vec<MboxSkip>,
}

/// Split an mbox stream on `From ` lines and parse each message.
///
/// `>From ` quoting in bodies is undone. Messages that fail to parse are
/// recorded in [`ParsedMbox::skipped`]; only a mailbox with no messages at
/// all is an error. Each email's id is `<label>#<index>` where `label` is the
/// caller-supplied source name.
pub fn parse_mbox(stream: &[u8], source: &str) -> Result<ParsedMbox, CorpusError> {
    let mut messages: Vec<Vec<u8>> = Vec::new();
    let mut current: Option<Vec<u8>> = None;
    for line in stream.split_inclusive(|&b| b == b'\n') {
        if line.starts_with(b"From ") {
            if let Some(msg) = current.take() {
                messages.push(msg);
            }
            current = Some(Vec::new());
            continue;
        }
        if let Some(msg) = current.as_mut() {
            match line.iter().position(|&b| b != b'>') {
                Some(n) if n > 0 && line[n..].starts_with(b"From ") => msg.extend_from_slice(&line[1..]),
                _ => msg.extend_from_slice(line),
            }
        }
    }
    if let Some(msg) = current.take() {
        messages.push(msg);
    }
    if messages.is_empty() {
        return Err(CorpusError::EmptyMailbox);
    }

    let mut out = ParsedMbox::default();
    for (index, msg) in messages.iter().enumerate() {
        match parse_eml(msg) {
            Ok(mut email) => {
                email.id = format!("{source}#{index}");
                email.source = format!("{source}:{index}");
                out.emails.push(email);
            }
            Err(error) => out.skipped.push(MboxSkip { index, error }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_messages() {
        let mbox = b"From a@b Mon Jan  1 00:00:00 2024\nSubject: one\n\nfirst\n\nFrom c@d Mon Jan  1 00:00:00 2024\nSubject: two\n\nsecond\n";
        let parsed = parse_mbox(mbox, "box").unwrap();
        assert_eq!(parsed.emails.len(), 2);
        assert_eq!(parsed.emails[0].subject, "one");
        assert_eq!(parsed.emails[1].body, "second");
        assert_eq!(parsed.emails[1].id, "box#1");
        assert!(parsed.skipped.is_empty());
    }

    #[test]
    fn empty_mailbox() {
        assert!(matches!(parse_mbox(b"", "x"), Err(CorpusError::EmptyMailbox)));
    }

    #[test]
    fn malformed_middle_message_is_skipped() {
        let mbox = b"From x\nSubject: one\n\nfirst\nFrom y\nSubject: broken\nX-No-Body: yes\nFrom z\nSubject: three\n\nthird\n";
        let parsed = parse_mbox(mbox, "box").unwrap();
        assert_eq!(parsed.emails.len(), 2);
        assert_eq!(parsed.skipped.len(), 1);
        assert_eq!(parsed.skipped[0].index, 1);
        assert!(matches!(parsed.skipped[0].error, CorpusError::MalformedMessage));
        assert_eq!(parsed.emails[1].subject, "three");
    }

    #[test]
    fn from_quoting_is_undone() {
        let mbox = b"From x\nSubject: q\n\n>From the desk of\n";
        let parsed = parse_mbox(mbox, "box").unwrap();
        assert_eq!(parsed.emails[0].body, "From the desk of");
    }
}
