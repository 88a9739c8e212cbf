use unicode_normalization::UnicodeNormalization;

/// NFC-compose, collapse whitespace runs to one space, trim. Case is kept.
pub fn normalize(text: &str) -> String {
    let composed: String = text.nfc().collect();
    let mut out = String::with_capacity(composed.len());
    for word in composed.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

pub(crate) fn is_currency(c: char) -> bool {
    matches!(c,
        '$' | '¢' | '£' | '¤' | '¥' | '֏' | '؋' | '৲' | '৳' | '฿' | '﷼'
        | '\u{20A0}'..='\u{20C0}'
        | '＄' | '￠' | '￡' | '￥' | '￦')
}

/// Codepoints that are peeled off word edges as single-codepoint tokens.
pub(crate) fn is_peelable(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

/// Split normalized text into surface tokens.
///
/// Each whitespace-separated chunk has leading and trailing punctuation
/// peeled into single-codepoint tokens. The remaining core is split so that
/// currency symbols stand alone and digit runs (with `.`/`,` between digits)
/// separate from adjacent letters. Interior apostrophes and hyphens stay in
/// the word.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let (core, trailing) = peel(&chars, &mut out);
        split_core(core, &mut out);
        out.extend(trailing);
    }
    out
}

/// Pushes leading peelables onto `out`; returns the core and the trailing
/// peelables in order.
fn peel<'a>(chars: &'a [char], out: &mut Vec<String>) -> (&'a [char], Vec<String>) {
    let mut start = 0;
    while start < chars.len() && is_peelable(chars[start]) {
        out.push(chars[start].to_string());
        start += 1;
    }
    let mut end = chars.len();
    while end > start && is_peelable(chars[end - 1]) {
        end -= 1;
    }
    let trailing = chars[end..].iter().map(|c| c.to_string()).collect();
    (&chars[start..end], trailing)
}

#[derive(PartialEq)]
enum Run {
    None,
    Word,
    Digits,
}

fn split_core(core: &[char], out: &mut Vec<String>) {
    let mut segment = String::new();
    let mut run = Run::None;
    let flush = |segment: &mut String, run: &mut Run, out: &mut Vec<String>| {
        if segment.is_empty() {
            return;
        }
        let s = std::mem::take(segment);
        if *run == Run::Word {
            // A word cut at a digit boundary may now end (or start) in punctuation.
            let chars: Vec<char> = s.chars().collect();
            let (inner, trailing) = peel(&chars, out);
            if !inner.is_empty() {
                out.push(inner.iter().collect());
            }
            out.extend(trailing);
        } else {
            out.push(s);
        }
        *run = Run::None;
    };

    for (i, &c) in core.iter().enumerate() {
        if is_currency(c) {
            flush(&mut segment, &mut run, out);
            out.push(c.to_string());
        } else if c.is_numeric() {
            if run == Run::Word {
                flush(&mut segment, &mut run, out);
            }
            run = Run::Digits;
            segment.push(c);
        } else if run == Run::Digits
            && (c == '.' || c == ',')
            && core.get(i + 1).is_some_and(|n| n.is_numeric())
        {
            segment.push(c);
        } else {
            if run == Run::Digits {
                flush(&mut segment, &mut run, out);
            }
            run = Run::Word;
            segment.push(c);
        }
    }
    flush(&mut segment, &mut run, out);
}
