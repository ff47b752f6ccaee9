//! Reuters-21578 `reut2-NNN.sgm` files.
//!
//! Only the parts the pipeline needs are read: the `NEWID` and `LEWISSPLIT`
//! attributes of each `<REUTERS>` element, the `<D>` entries inside
//! `<TOPICS>`, and the `<BODY>` text.

use serde::{Deserialize, Serialize};

use super::IngestError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitTag {
    Train,
    Test,
    NotUsed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub doc_id: String,
    pub body_text: String,
    pub topics: Vec<String>,
    pub split_tag: SplitTag,
}

const OPEN: &str = "<REUTERS";
const CLOSE: &str = "</REUTERS>";

pub fn parse_reuters_sgml(text: &str) -> Result<Vec<RawDocument>, IngestError> {
    let mut docs = Vec::new();
    let mut pos = 0;
    while let Some(rel) = text[pos..].find(OPEN) {
        let start = pos + rel;
        let after = start + OPEN.len();
        // `<REUTERSX` is some other tag.
        if !text[after..].starts_with(|c: char| c == '>' || c.is_whitespace()) {
            pos = after;
            continue;
        }
        let tag_end = text[after..]
            .find('>')
            .map(|i| after + i)
            .ok_or(IngestError::UnclosedElement { offset: start })?;
        let close = text[tag_end..]
            .find(CLOSE)
            .map(|i| tag_end + i)
            .ok_or(IngestError::UnclosedElement { offset: start })?;
        let attrs = parse_attributes(&text[after..tag_end]);
        let inner = &text[tag_end + 1..close];

        let doc_id = attr(&attrs, "NEWID").ok_or(IngestError::MissingNewId { offset: start })?;
        let split_tag = match attr(&attrs, "LEWISSPLIT") {
            Some("TRAIN") => SplitTag::Train,
            Some("TEST") => SplitTag::Test,
            _ => SplitTag::NotUsed,
        };
        let topics = element(inner, "TOPICS")
            .map(|t| elements(t, "D").map(decode_entities).collect())
            .unwrap_or_default();
        let body_text = element(inner, "BODY").map(decode_entities).unwrap_or_default();
        docs.push(RawDocument {
            doc_id: doc_id.to_string(),
            body_text,
            topics,
            split_tag,
        });
        pos = close + CLOSE.len();
    }
    Ok(docs)
}

fn attr<'a>(attrs: &'a [(String, String)], name: &str) -> Option<&'a str> {
    attrs
        .iter()
        .find(|(k, _)| k.eq_ignore_ascii_case(name))
        .map(|(_, v)| v.as_str())
}

/// `NAME="value" NAME2='v' FLAG` pairs from the inside of a start tag.
fn parse_attributes(s: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut rest = s.trim_start();
    while !rest.is_empty() {
        let name_end = rest
            .find(|c: char| c == '=' || c.is_whitespace())
            .unwrap_or(rest.len());
        let name = &rest[..name_end];
        rest = rest[name_end..].trim_start();
        let mut value = String::new();
        if let Some(after_eq) = rest.strip_prefix('=') {
            let after_eq = after_eq.trim_start();
            match after_eq.chars().next() {
                Some(q @ ('"' | '\'')) => {
                    let body = &after_eq[1..];
                    let end = body.find(q).unwrap_or(body.len());
                    value = body[..end].to_string();
                    rest = body.get(end + 1..).unwrap_or("");
                }
                _ => {
                    let end = after_eq.find(char::is_whitespace).unwrap_or(after_eq.len());
                    value = after_eq[..end].to_string();
                    rest = &after_eq[end..];
                }
            }
        }
        if !name.is_empty() {
            out.push((name.to_string(), value));
        }
        rest = rest.trim_start();
    }
    out
}

/// Content of the first `<NAME ...>...</NAME>` element.
fn element<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    elements(s, name).next()
}

fn elements<'a>(s: &'a str, name: &str) -> impl Iterator<Item = &'a str> + 'a {
    let open = format!("<{name}");
    let close = format!("</{name}>");
    let mut pos = 0;
    std::iter::from_fn(move || loop {
        let start = pos + s[pos..].find(&open)?;
        let after = start + open.len();
        if !s[after..].starts_with(|c: char| c == '>' || c.is_whitespace()) {
            pos = after;
            continue;
        }
        let content_start = after + s[after..].find('>')? + 1;
        let end = content_start + s[content_start..].find(&close)?;
        pos = end + close.len();
        return Some(&s[content_start..end]);
    })
}

/// Decodes `&lt;`, `&gt;`, `&amp;` and `&#N;`; anything else is kept as is.
fn decode_entities(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let tail = &rest[amp..];
        let decoded = tail.find(';').and_then(|semi| {
            let entity = &tail[1..semi];
            let ch = match entity {
                "lt" => Some('<'),
                "gt" => Some('>'),
                "amp" => Some('&'),
                _ => entity
                    .strip_prefix('#')
                    .and_then(|n| n.parse::<u32>().ok())
                    .and_then(char::from_u32),
            };
            ch.map(|c| (c, semi + 1))
        });
        match decoded {
            Some((c, len)) => {
                out.push(c);
                rest = &tail[len..];
            }
            None => {
                out.push('&');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
    out
}
