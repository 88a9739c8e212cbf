use mailparse::{DispositionType, MailHeaderMap, ParsedMail};

use super::{CorpusError, RawEmail};

/// Parse one RFC 822 style message.
///
/// The body is the first `text/plain` part (depth-first, attachments
/// skipped). When a message has no plain part, the first `text/html` part is
/// used with its markup stripped. Transfer encodings and charsets are
/// decoded; line breaks become `\n` and trailing ones are trimmed.
///
/// The returned `id` and `source` are placeholders; loaders overwrite them
/// with file-derived values.
pub fn parse_eml(bytes: &[u8]) -> Result<RawEmail, CorpusError> {
    if !has_header_separator(bytes) {
        return Err(CorpusError::MalformedMessage);
    }
    let mail = mailparse::parse_mail(bytes).map_err(|_| CorpusError::MalformedMessage)?;
    let subject = mail
        .headers
        .get_first_value("Subject")
        .map(|s| s.trim().to_string())
        .unwrap_or_default();
    let body = extract_text(&mail)?;
    Ok(RawEmail {
        id: "0".to_string(),
        subject,
        body: body.replace("\r\n", "\n").replace('\r', "\n").trim_end_matches('\n').to_string(),
        source: "<bytes>".to_string(),
    })
}

fn has_header_separator(bytes: &[u8]) -> bool {
    if bytes.starts_with(b"\n") || bytes.starts_with(b"\r\n") {
        return true;
    }
    bytes
        .windows(2)
        .enumerate()
        .any(|(i, w)| w == b"\n\n" || (w == b"\n\r" && bytes.get(i + 2) == Some(&b'\n')))
}

fn extract_text(mail: &ParsedMail<'_>) -> Result<String, CorpusError> {
    let mimetype = mail.ctype.mimetype.as_str();
    if !mimetype.starts_with("multipart/") {
        return if mimetype == "text/html" {
            Ok(strip_html(&body_string(mail)?))
        } else if mimetype.starts_with("text/") {
            body_string(mail)
        } else {
            Err(CorpusError::UnsupportedContent(format!(
                "single-part message of type {mimetype}"
            )))
        };
    }
    if let Some(part) = find_part(mail, "text/plain") {
        return body_string(part);
    }
    if let Some(part) = find_part(mail, "text/html") {
        return Ok(strip_html(&body_string(part)?));
    }
    Err(CorpusError::UnsupportedContent(
        "multipart message has no text part".to_string(),
    ))
}

fn find_part<'a, 'b>(mail: &'b ParsedMail<'a>, mimetype: &str) -> Option<&'b ParsedMail<'a>> {
    for part in &mail.subparts {
        if part.ctype.mimetype.starts_with("multipart/") {
            if let Some(found) = find_part(part, mimetype) {
                return Some(found);
            }
        } else if part.ctype.mimetype == mimetype
            && part.get_content_disposition().disposition != DispositionType::Attachment
        {
            return Some(part);
        }
    }
    None
}

fn body_string(part: &ParsedMail<'_>) -> Result<String, CorpusError> {
    part.get_body()
        .map_err(|e| CorpusError::UnsupportedContent(format!("undecodable body: {e}")))
}

/// Drop tags, `<script>`/`<style>` contents and comments; decode the common
/// named entities. Block-level tags become line breaks.
pub(crate) fn strip_html(html: &str) -> String {
    let mut out = String::with_capacity(html.len());
    let lower = html.to_ascii_lowercase();
    let mut i = 0;
    while i < html.len() {
        let rest = &html[i..];
        if rest.starts_with("<!--") {
            i += rest.find("-->").map_or(rest.len(), |e| e + 3);
            continue;
        }
        if rest.starts_with('<') {
            let end = rest.find('>').map_or(rest.len(), |e| e + 1);
            let tag = lower[i + 1..i + end.min(rest.len())]
                .trim_start_matches('/')
                .split(|c: char| c.is_whitespace() || c == '>' || c == '/')
                .next()
                .unwrap_or("")
                .to_string();
            i += end;
            if (tag == "script" || tag == "style") && !rest.starts_with("</") {
                let close = format!("</{tag}");
                i = lower[i..].find(&close).map_or(html.len(), |p| i + p);
                continue;
            }
            if matches!(tag.as_str(), "br" | "p" | "div" | "li" | "tr" | "h1" | "h2" | "h3") {
                out.push('\n');
            }
            continue;
        }
        if rest.starts_with('&') {
            if let Some((entity, len)) = decode_entity(rest) {
                out.push(entity);
                i += len;
                continue;
            }
        }
        let c = rest.chars().next().expect("non-empty");
        out.push(c);
        i += c.len_utf8();
    }
    out.trim().to_string()
}

fn decode_entity(s: &str) -> Option<(char, usize)> {
    let end = s.find(';').filter(|&e| e <= 10)?;
    let name = &s[1..end];
    let c = match name {
        "amp" => '&',
        "lt" => '<',
        "gt" => '>',
        "quot" => '"',
        "apos" => '\'',
        "nbsp" => ' ',
        _ if name.starts_with("#x") || name.starts_with("#X") => {
            char::from_u32(u32::from_str_radix(&name[2..], 16).ok()?)?
        }
        _ if name.starts_with('#') => char::from_u32(name[1..].parse().ok()?)?,
        _ => return None,
    };
    Some((c, end + 1))
}
