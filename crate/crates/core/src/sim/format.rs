//! Line-oriented trace files:
//!
//! ```text
//! t=<ticks> kind=<cs|exc|irq|ckpt|input> task=<id> job=<n> [pp=<k>] size=<bytes>
//! ```
//!
//! `pp` appears on checkpoint lines only. Blank lines are ignored.

use std::io::{self, Write};

use thiserror::Error;

use super::trace::TraceEvent;
use crate::types::EntryKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

pub fn format_event(e: &TraceEvent) -> String {
    match e.program_point {
        Some(pp) => format!(
            "t={} kind={} task={} job={} pp={} size={}",
            e.at,
            e.kind.tag(),
            e.task_id,
            e.job_index,
            pp,
            e.payload_bytes
        ),
        None => format!(
            "t={} kind={} task={} job={} size={}",
            e.at,
            e.kind.tag(),
            e.task_id,
            e.job_index,
            e.payload_bytes
        ),
    }
}

pub fn write_trace<W: Write>(events: &[TraceEvent], mut out: W) -> io::Result<()> {
    for e in events {
        writeln!(out, "{}", format_event(e))?;
    }
    out.flush()
}

pub fn trace_to_string(events: &[TraceEvent]) -> String {
    let mut buf = Vec::new();
    write_trace(events, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

fn field<'a>(
    parts: &mut std::iter::Peekable<std::str::SplitWhitespace<'a>>,
    key: &str,
    line: usize,
) -> Result<&'a str, TraceParseError> {
    let err = |message: String| TraceParseError { line, message };
    let tok = parts.next().ok_or_else(|| err(format!("missing field `{key}`")))?;
    let (k, v) = tok
        .split_once('=')
        .ok_or_else(|| err(format!("expected `{key}=<value>`, found `{tok}`")))?;
    if k != key {
        return Err(err(format!("expected field `{key}`, found `{k}`")));
    }
    Ok(v)
}

fn number<T: std::str::FromStr>(v: &str, key: &str, line: usize) -> Result<T, TraceParseError> {
    if v.is_empty() || !v.bytes().all(|b| b.is_ascii_digit()) {
        return Err(TraceParseError {
            line,
            message: format!("field `{key}`: `{v}` is not a decimal integer"),
        });
    }
    v.parse().map_err(|_| TraceParseError {
        line,
        message: format!("field `{key}`: `{v}` is out of range"),
    })
}

pub fn parse_event(text: &str, line: usize) -> Result<TraceEvent, TraceParseError> {
    let mut parts = text.split_whitespace().peekable();
    let at = number(field(&mut parts, "t", line)?, "t", line)?;
    let tag = field(&mut parts, "kind", line)?;
    let kind = EntryKind::from_tag(tag).ok_or_else(|| TraceParseError {
        line,
        message: format!("field `kind`: unknown kind `{tag}`"),
    })?;
    let task_id = number(field(&mut parts, "task", line)?, "task", line)?;
    let job_index = number(field(&mut parts, "job", line)?, "job", line)?;
    let program_point = if kind == EntryKind::Checkpoint {
        Some(number(field(&mut parts, "pp", line)?, "pp", line)?)
    } else {
        None
    };
    let payload_bytes = number(field(&mut parts, "size", line)?, "size", line)?;
    if let Some(extra) = parts.next() {
        return Err(TraceParseError {
            line,
            message: format!("unexpected trailing field `{extra}`"),
        });
    }
    Ok(TraceEvent {
        at,
        kind,
        task_id,
        program_point,
        job_index,
        payload_bytes,
    })
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceEvent>, TraceParseError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_event(l, i + 1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_fixed_field_order() {
        let e = TraceEvent {
            at: 12,
            kind: EntryKind::Checkpoint,
            task_id: 3,
            program_point: Some(1),
            job_index: 4,
            payload_bytes: 40,
        };
        assert_eq!(format_event(&e), "t=12 kind=ckpt task=3 job=4 pp=1 size=40");
        let cs = TraceEvent {
            kind: EntryKind::ContextSwitch,
            program_point: None,
            ..e
        };
        assert_eq!(format_event(&cs), "t=12 kind=cs task=3 job=4 size=40");
    }

    #[test]
    fn parse_errors_name_line_and_field() {
        let err = parse_trace("t=1 kind=cs task=0 job=0 size=8\nt=2 kind=cs task=x job=0 size=8\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("`task`"), "{err}");

        let err = parse_event("t=1 kind=ckpt task=0 job=0 size=8", 1).unwrap_err();
        assert!(err.message.contains("`pp`"), "{err}");
        assert!(parse_event("t=1 kind=nope task=0 job=0 size=8", 1).is_err());
        assert!(parse_event("t=1 kind=cs task=0 job=0 size=8 extra=1", 1).is_err());
        assert!(parse_event("t=-1 kind=cs task=0 job=0 size=8", 1).is_err());
        assert!(parse_event("kind=cs t=1 task=0 job=0 size=8", 1).is_err());
    }

    #[test]
    fn blank_lines_are_skipped() {
        let t = parse_trace("\nt=1 kind=irq task=0 job=0 size=0\n\n").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].kind, EntryKind::Interrupt);
    }
}
