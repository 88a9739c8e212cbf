//! The `label,text` CSV interchange format.
//!
//! Rows are numbered by record, with the header as row 1, so the first data
//! row is row 2. Example ids are the zero-based data row positions.

use std::io::Write;
use std::path::Path;

use crate::label::Label;

use super::{Corpus, CorpusError, LabeledExample};

pub fn load_csv(path: &Path) -> Result<Corpus, CorpusError> {
    let bytes = std::fs::read(path).map_err(|e| CorpusError::io(path, e))?;
    parse_csv(&bytes).map_err(|e| CorpusError::in_file(path, e))
}

pub fn parse_csv(bytes: &[u8]) -> Result<Corpus, CorpusError> {
    if let Some(row) = unterminated_quote_row(bytes) {
        return Err(CorpusError::UnbalancedQuote { row });
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes);
    let mut records = reader.records();

    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(CorpusError::BadHeader(e.to_string())),
        None => return Err(CorpusError::BadHeader(String::new())),
    };
    let fields: Vec<String> = header.iter().map(|f| f.trim().to_ascii_lowercase()).collect();
    if fields != ["label", "text"] {
        return Err(CorpusError::BadHeader(header.iter().collect::<Vec<_>>().join(",")));
    }

    let mut examples = Vec::new();
    for (i, record) in records.enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| CorpusError::BadRow {
            row,
            message: e.to_string(),
        })?;
        if record.len() != 2 {
            return Err(CorpusError::BadRow {
                row,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let label: Label = record[0].parse().map_err(|_| CorpusError::BadLabel {
            row,
            label: record[0].to_string(),
        })?;
        examples.push(LabeledExample {
            id: examples.len().to_string(),
            text: record[1].to_string(),
            label,
        });
    }
    Ok(Corpus::new(examples))
}

/// Returns the row whose quoted field never closes, if any.
fn unterminated_quote_row(bytes: &[u8]) -> Option<usize> {
    let mut row = 1;
    let mut field_start = true;
    let mut quoted_since: Option<usize> = None;
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if quoted_since.is_some() {
            if b == b'"' {
                if bytes.get(i + 1) == Some(&b'"') {
                    i += 1;
                } else {
                    quoted_since = None;
                }
            }
        } else {
            match b {
                b'"' if field_start => quoted_since = Some(row),
                b'\n' => row += 1,
                _ => {}
            }
            field_start = matches!(b, b',' | b'\n' | b'\r');
        }
        i += 1;
    }
    quoted_since
}

pub fn write_csv<W: Write>(writer: W, examples: &[LabeledExample]) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(["label", "text"])?;
    for ex in examples {
        w.write_record([ex.label.as_str(), ex.text.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_rows() {
        let c = parse_csv(b"label,text\nspam,\"buy now, cheap\"\nHAM,see you at lunch\n").unwrap();
        assert_eq!(c.count(Label::Spam), 1);
        assert_eq!(c.count(Label::Ham), 1);
        assert_eq!(c.examples()[0].text, "buy now, cheap");
        assert_eq!(c.examples()[1].id, "1");
    }

    #[test]
    fn bad_label_reports_row() {
        let err = parse_csv(b"label,text\nspam,a\njunk,b\n").unwrap_err();
        match err {
            CorpusError::BadLabel { row, label } => {
                assert_eq!(row, 3);
                assert_eq!(label, "junk");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_header() {
        assert!(matches!(
            parse_csv(b"class,body\nspam,a\n"),
            Err(CorpusError::BadHeader(_))
        ));
        assert!(matches!(parse_csv(b""), Err(CorpusError::BadHeader(_))));
    }

    #[test]
    fn unbalanced_quote_reports_row() {
        let err = parse_csv(b"label,text\nspam,\"ok\"\nham,\"never closed\nspam,x\n").unwrap_err();
        assert!(matches!(err, CorpusError::UnbalancedQuote { row: 3 }));
    }

    #[test]
    fn interior_quotes_are_literal() {
        let c = parse_csv(b"label,text\nham,he said \"hi\" to me\n").unwrap();
        assert_eq!(c.examples()[0].text, "he said \"hi\" to me");
    }

    #[test]
    fn multiline_and_escaped_quotes_round_trip() {
        let examples = vec![
            LabeledExample {
                id: "0".into(),
                text: "line one\nline \"two\", with comma".into(),
                label: Label::Ham,
            },
            LabeledExample {
                id: "1".into(),
                text: "FREE $$$".into(),
                label: Label::Spam,
            },
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &examples).unwrap();
        let back = parse_csv(&buf).unwrap();
        assert_eq!(back.examples(), examples.as_slice());
    }
}
