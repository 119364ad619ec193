//! Plain-text `key = value` files shared by the cost table and experiment
//! configuration. `#` starts a comment; `:` is accepted in place of `=`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

pub fn parse(text: &str) -> Result<Vec<Entry>> {
    let mut out: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let split = body.find(['=', ':']).ok_or_else(|| Error::parse(line, "expected `key = value`"))?;
        let key = body[..split].trim();
        let value = body[split + 1..].trim();
        if key.is_empty() {
            return Err(Error::parse(line, "empty key"));
        }
        if out.iter().any(|e| e.key == key) {
            return Err(Error::parse(line, format!("duplicate key `{key}`")));
        }
        out.push(Entry {
            line,
            key: key.to_string(),
            value: value.to_string(),
        });
    }
    Ok(out)
}
