//! The MQT text format for operation tables.
//!
//! ```text
//! mq <arity> <order>
//! # optional comment lines
//! <order^arity whitespace-separated values in table index order>
//! ```
//!
//! The writer puts one header line, then any comments, then one line per
//! run of `order` consecutive cells (the last argument varying).

use crate::error::{Error, Result};
use crate::quasigroup::{validate, MultaryQuasigroup};

pub const MQT_FORMAT_VERSION: u32 = 1;

/// A parsed MQT file: the quasigroup plus its comment lines (without `#`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MqtDocument {
    pub quasigroup: MultaryQuasigroup,
    pub comments: Vec<String>,
}

pub fn parse_mqt(text: &str) -> Result<MqtDocument> {
    let mut header: Option<(usize, usize)> = None;
    let mut comments = Vec::new();
    let mut values = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let trimmed = line.trim();
        if let Some(c) = trimmed.strip_prefix('#') {
            comments.push(c.strip_prefix(' ').unwrap_or(c).to_string());
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        if header.is_none() {
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != "mq" {
                return Err(Error::Parse { line: line_no, message: "expected header `mq <arity> <order>`".into() });
            }
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::Parse { line: line_no, message: format!("`{s}` is not a number") })
            };
            header = Some((num(parts[1])?, num(parts[2])?));
            continue;
        }
        for tok in trimmed.split_whitespace() {
            let v = tok
                .parse::<usize>()
                .map_err(|_| Error::Parse { line: line_no, message: format!("`{tok}` is not a number") })?;
            values.push(v);
        }
    }
    let (arity, order) = header.ok_or(Error::Parse { line: 1, message: "missing header".into() })?;
    let quasigroup = validate(arity, order, &values)?;
    Ok(MqtDocument { quasigroup, comments })
}

pub fn write_mqt(q: &MultaryQuasigroup, comments: &[String]) -> String {
    let mut out = format!("mq {} {}\n", q.arity(), q.order());
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    for row in q.table().chunks(q.order()) {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}
