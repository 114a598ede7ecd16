//! A forgiving start-tag scanner.
//!
//! Counts element start tags the way a browser tokenizer would see them,
//! without building a tree: comments, doctypes, processing instructions and
//! end tags are skipped, and the bodies of raw-text elements (`script`,
//! `style`, ...) are not scanned for tags. Malformed markup never fails; a
//! stray `<` that does not open a tag is treated as text.

use std::collections::BTreeMap;

/// Elements whose content is raw text up to the matching end tag.
const RAW_TEXT: &[&str] = &[
    "script", "style", "textarea", "title", "xmp", "iframe", "noembed", "noframes",
];

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct TagCensus {
    pub total: u64,
    pub counts: BTreeMap<String, u64>,
}

pub fn census(src: &str) -> TagCensus {
    let bytes = src.as_bytes();
    let mut out = TagCensus::default();
    let mut i = 0;

    while let Some(off) = memchr(b'<', &bytes[i..]) {
        i += off;
        let rest = &bytes[i..];
        if rest.starts_with(b"<!--") {
            i = skip_past(bytes, i + 4, b"-->");
        } else if starts_with_ci(rest, b"<![cdata[") {
            i = skip_past(bytes, i + 9, b"]]>");
        } else if rest.starts_with(b"<!") || rest.starts_with(b"<?") || rest.starts_with(b"</") {
            i = skip_past(bytes, i + 2, b">");
        } else if rest.len() > 1 && rest[1].is_ascii_alphabetic() {
            let name_end = i + 1 + rest[1..]
                .iter()
                .position(|b| b.is_ascii_whitespace() || *b == b'/' || *b == b'>')
                .unwrap_or(rest.len() - 1);
            let name = src[i + 1..name_end].to_ascii_lowercase();
            i = skip_tag_body(bytes, name_end);
            if RAW_TEXT.contains(&name.as_str()) {
                i = skip_raw_text(bytes, i, name.as_bytes());
            }
            out.total += 1;
            *out.counts.entry(name).or_insert(0) += 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Advances over attributes to just past the closing `>`, honoring quotes.
fn skip_tag_body(bytes: &[u8], mut i: usize) -> usize {
    let mut quote: Option<u8> = None;
    // A quote only opens an attribute value directly after `=`.
    let mut after_eq = false;
    while i < bytes.len() {
        let b = bytes[i];
        match quote {
            Some(q) if b == q => quote = None,
            Some(_) => {}
            None => match b {
                b'>' => return i + 1,
                b'"' | b'\'' if after_eq => quote = Some(b),
                _ => {}
            },
        }
        if !b.is_ascii_whitespace() {
            after_eq = quote.is_none() && b == b'=';
        }
        i += 1;
    }
    bytes.len()
}

/// Returns the index of the `</name` that ends a raw-text element, or the end.
fn skip_raw_text(bytes: &[u8], mut i: usize, name: &[u8]) -> usize {
    while let Some(off) = memchr(b'<', &bytes[i..]) {
        i += off;
        let rest = &bytes[i..];
        if rest.len() >= name.len() + 2
            && rest[1] == b'/'
            && rest[2..2 + name.len()].eq_ignore_ascii_case(name)
            && rest
                .get(2 + name.len())
                .is_none_or(|b| b.is_ascii_whitespace() || *b == b'>' || *b == b'/')
        {
            return i;
        }
        i += 1;
    }
    bytes.len()
}

fn skip_past(bytes: &[u8], from: usize, needle: &[u8]) -> usize {
    if from >= bytes.len() {
        return bytes.len();
    }
    bytes[from..]
        .windows(needle.len())
        .position(|w| w == needle)
        .map_or(bytes.len(), |p| from + p + needle.len())
}

fn starts_with_ci(hay: &[u8], needle: &[u8]) -> bool {
    hay.len() >= needle.len() && hay[..needle.len()].eq_ignore_ascii_case(needle)
}

fn memchr(needle: u8, hay: &[u8]) -> Option<usize> {
    hay.iter().position(|b| *b == needle)
}
