//! Standard-input streaming: a reader thread parses lines into events
//! while this thread cuts batches by size or latency and prints one
//! verdict line per non-empty batch.

use std::io::BufRead;
use std::sync::mpsc;
use std::time::{Duration, Instant};

use anyhow::{bail, Result};

use ltl4c_core::pipeline::Pipeline;
use ltl4c_core::trace::{parse_event_line, Event};
use ltl4c_core::verdict::Verdict6;

use crate::config::{Format, OnMalformed, Settings};

enum Message {
    Event(Event),
    Fatal(String),
}

pub fn run(
    pipeline: &mut Pipeline,
    reader: impl BufRead + Send + 'static,
    settings: Settings,
) -> Result<Verdict6> {
    let (tx, rx) = mpsc::channel::<Message>();
    let policy = settings.on_malformed;
    let reader_thread = std::thread::spawn(move || {
        let mut accepted = 0u64;
        for (line_no, line) in reader.lines().enumerate() {
            let line = match line {
                Ok(line) => line,
                Err(e) => {
                    let _ = tx.send(Message::Fatal(format!("line {}: {e}", line_no + 1)));
                    return;
                }
            };
            match parse_event_line(&line, accepted) {
                Ok(Some(event)) => {
                    accepted += 1;
                    if tx.send(Message::Event(event)).is_err() {
                        return;
                    }
                }
                Ok(None) => {}
                Err(message) => match policy {
                    OnMalformed::Skip => {
                        eprintln!("warning: line {}: {message}", line_no + 1);
                    }
                    OnMalformed::Abort => {
                        let _ = tx.send(Message::Fatal(format!(
                            "line {}: {message}",
                            line_no + 1
                        )));
                        return;
                    }
                },
            }
        }
    });
    let latency = Duration::from_millis(settings.batch_latency_ms);
    let mut batch: Vec<Event> = Vec::with_capacity(settings.batch_size);
    // Deadline exists while a partial batch is waiting.
    let mut deadline: Option<Instant> = None;
    let flush = |pipeline: &mut Pipeline, batch: &mut Vec<Event>| {
        if batch.is_empty() {
            return;
        }
        let report = pipeline.feed(batch);
        match settings.format {
            Format::Human => println!("{report}"),
            Format::JsonLines => {
                println!("{}", serde_json::to_string(&report).expect("report serializes"));
            }
        }
        batch.clear();
    };
    loop {
        let message = match deadline {
            None => rx.recv().ok(),
            Some(at) => match rx.recv_timeout(at.saturating_duration_since(Instant::now())) {
                Ok(message) => Some(message),
                Err(mpsc::RecvTimeoutError::Timeout) => {
                    flush(pipeline, &mut batch);
                    deadline = None;
                    continue;
                }
                Err(mpsc::RecvTimeoutError::Disconnected) => None,
            },
        };
        match message {
            Some(Message::Event(event)) => {
                if batch.is_empty() {
                    deadline = Some(Instant::now() + latency);
                }
                batch.push(event);
                if batch.len() >= settings.batch_size {
                    flush(pipeline, &mut batch);
                    deadline = None;
                }
            }
            Some(Message::Fatal(message)) => {
                let _ = reader_thread.join();
                bail!("{message}");
            }
            None => {
                flush(pipeline, &mut batch);
                break;
            }
        }
    }
    let _ = reader_thread.join();
    Ok(pipeline.verdict())
}
