//! Best-effort adapter for `strace -f -tt` style output.
//!
//! Each completed syscall line becomes one event:
//! - the syscall name becomes a binding to the first integer argument (the
//!   file descriptor for fd-based calls) when one is present, otherwise a
//!   flag, so both `forall f : fd(f) => ...` and flag-style properties work;
//! - `fd` binds the first integer argument when present;
//! - `pid` binds the traced pid when the `[pid N]` prefix is present;
//! - `ret` binds the return value.
//!
//! Lines that do not look like completed syscalls (`<unfinished ...>`,
//! resumption fragments, signal deliveries, exit notices) are skipped; this
//! adapter is a convenience, not a parser for the full strace grammar.

use super::Event;
use regex::Regex;
use std::sync::OnceLock;

fn call_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r#"(?x)
            ^\s*
            (?:\[pid\s+(?P<pid>\d+)\]\s+)?      # optional pid prefix
            (?:\d+(?:[:.]\d+)*\s+)?             # optional timestamp
            (?P<name>[a-zA-Z_][a-zA-Z0-9_]*)
            \((?P<args>.*)\)
            \s*=\s*
            (?P<ret>-?\d+|\?)
            "#,
        )
        .expect("static regex")
    })
}

fn first_int_arg(args: &str) -> Option<&str> {
    let head = args.split(',').next()?.trim();
    (!head.is_empty() && head.chars().all(|c| c.is_ascii_digit())).then_some(head)
}

/// Convert strace text to events. Unrecognized lines are counted, not kept.
#[must_use]
pub fn convert(text: &str) -> (Vec<Event>, u64) {
    let mut events = Vec::new();
    let mut skipped = 0u64;
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        if line.contains("<unfinished") || line.contains("resumed>") {
            skipped += 1;
            continue;
        }
        let Some(caps) = call_re().captures(line) else {
            skipped += 1;
            continue;
        };
        let name = caps["name"].to_string();
        let mut bindings = Vec::new();
        let mut flags = Vec::new();
        if let Some(pid) = caps.name("pid") {
            bindings.push(("pid".to_string(), pid.as_str().to_string()));
        }
        bindings.push(("ret".to_string(), caps["ret"].to_string()));
        match first_int_arg(&caps["args"]) {
            Some(fd) => {
                bindings.push(("fd".to_string(), fd.to_string()));
                bindings.push((name, fd.to_string()));
            }
            None => flags.push(name),
        }
        events.push(Event::new(events.len() as u64, bindings, flags));
    }
    (events, skipped)
}
