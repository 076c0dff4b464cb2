//! `ltl4c`: check counting temporal properties against event traces.
//!
//! Exit codes: 0 when the final verdict leans true, 1 when it leans
//! false, 2 for usage, parse or ingest errors.

mod config;
mod render;
mod stream;

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::exit;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use ltl4c_core::gen::{self, Shape};
use ltl4c_core::monitor::{synthesize, SynthOptions};
use ltl4c_core::pipeline::{Pipeline, PipelineOptions};
use ltl4c_core::syntax::Property;
use ltl4c_core::trace::event_to_json_line;
use ltl4c_core::Verdict6;

use config::{Format, OnMalformed, Overrides, Settings};
use render::{exit_code, fsm_report, rows_text, sort_rows, ExplainTree, RunReport, SCHEMA};

/// Events handed to the pipeline per batch when checking a file.
const FILE_CHUNK: usize = 65536;

#[derive(Parser)]
#[command(
    name = "ltl4c",
    version,
    about = "Check counting temporal properties against event traces"
)]
struct Cli {
    /// Worker threads for the data-parallel phases (0 = one per core).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum, value_name = "FORMAT")]
    format: Option<Format>,
    /// TOML file with default settings (flags and LTL4C_THREADS win).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a property against a recorded trace file.
    Check {
        /// Property file.
        property: PathBuf,
        /// Trace file, one JSON object per line.
        trace: PathBuf,
        /// What to do with malformed trace lines.
        #[arg(long, value_enum, value_name = "POLICY")]
        on_malformed: Option<OnMalformed>,
    },
    /// Check a property against events streamed on standard input.
    Stream {
        /// Property file.
        property: PathBuf,
        /// Events per batch.
        #[arg(long, value_name = "N")]
        batch_size: Option<usize>,
        /// Flush a partial batch after this many milliseconds.
        #[arg(long, value_name = "MS")]
        batch_latency_ms: Option<u64>,
        /// What to do with malformed trace lines.
        #[arg(long, value_enum, value_name = "POLICY")]
        on_malformed: Option<OnMalformed>,
    },
    /// Print the body monitor and the quantifier tree for a trace.
    Explain {
        /// Property file.
        property: PathBuf,
        /// Trace file; without one the tree holds only the root.
        trace: Option<PathBuf>,
        /// Quantifier variables whose instances sort numerically.
        #[arg(long, value_delimiter = ',', value_name = "VARS")]
        numeric_keys: Vec<String>,
        /// What to do with malformed trace lines.
        #[arg(long, value_enum, value_name = "POLICY")]
        on_malformed: Option<OnMalformed>,
    },
    /// Write a seeded synthetic trace to standard output.
    Gen {
        /// Trace shape: sockets, chunks or cache.
        shape: Shape,
        /// Events to emit.
        #[arg(long, default_value_t = 10_000, value_name = "N")]
        events: u64,
        /// Generator seed; equal seeds give byte-identical traces.
        #[arg(long, default_value_t = 0, value_name = "N")]
        seed: u64,
        /// Distinct objects in the trace (default: shape-specific).
        #[arg(long, value_name = "N")]
        objects: Option<u64>,
    },
    /// Time the checker over a generated trace at several thread counts.
    Bench {
        /// Property file (default: the shape's built-in property).
        #[arg(long, value_name = "FILE")]
        property: Option<PathBuf>,
        /// Trace shape to generate.
        #[arg(long, default_value = "sockets", value_name = "SHAPE")]
        shape: Shape,
        /// Events to generate.
        #[arg(long, default_value_t = 1_000_000, value_name = "N")]
        events: u64,
        /// Generator seed.
        #[arg(long, default_value_t = 0, value_name = "N")]
        seed: u64,
        /// Distinct objects in the trace (default: shape-specific).
        #[arg(long, value_name = "N")]
        objects: Option<u64>,
        /// Comma-separated thread counts to time.
        #[arg(long, value_delimiter = ',', default_value = "1,4", value_name = "LIST")]
        threads_list: Vec<usize>,
    },
}

/// Die silently when a consumer like `head` closes the pipe, as line
/// tools are expected to, instead of panicking on the next print.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() {
    reset_sigpipe();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let file = config::load_file(cli.config.as_deref())?;
    let base = Overrides {
        threads: cli.threads,
        format: cli.format,
        ..Overrides::default()
    };
    match cli.command {
        Command::Check {
            property,
            trace,
            on_malformed,
        } => {
            let settings = config::resolve(
                Overrides {
                    on_malformed,
                    ..base
                },
                &file,
            )?;
            cmd_check(&property, &trace, &settings)
        }
        Command::Stream {
            property,
            batch_size,
            batch_latency_ms,
            on_malformed,
        } => {
            let settings = config::resolve(
                Overrides {
                    batch_size,
                    batch_latency_ms,
                    on_malformed,
                    ..base
                },
                &file,
            )?;
            cmd_stream(&property, &settings)
        }
        Command::Explain {
            property,
            trace,
            numeric_keys,
            on_malformed,
        } => {
            let settings = config::resolve(
                Overrides {
                    on_malformed,
                    ..base
                },
                &file,
            )?;
            cmd_explain(&property, trace.as_deref(), &numeric_keys, &settings)
        }
        Command::Gen {
            shape,
            events,
            seed,
            objects,
        } => cmd_gen(shape, seed, events, objects),
        Command::Bench {
            property,
            shape,
            events,
            seed,
            objects,
            threads_list,
        } => {
            let settings = config::resolve(base, &file)?;
            cmd_bench(
                property.as_deref(),
                shape,
                seed,
                events,
                objects,
                &threads_list,
                settings.format,
            )
        }
    }
}

fn load_property(path: &Path) -> Result<Property> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading property file {}", path.display()))?;
    ltl4c_core::parse_property(text.trim())
        .with_context(|| format!("parsing property file {}", path.display()))
}

fn build_pipeline(property: Property, settings: &Settings) -> Result<Pipeline> {
    let options = PipelineOptions {
        threads: settings.threads,
        synth: SynthOptions::default(),
    };
    Pipeline::new(property, options).context("building the checker")
}

/// Feed every event from `reader` into the pipeline in fixed-size chunks.
/// Returns (accepted, skipped); under the abort policy the first
/// malformed line fails instead.
fn feed_reader(
    pipeline: &mut Pipeline,
    reader: impl BufRead,
    policy: OnMalformed,
) -> Result<(u64, u64)> {
    let mut accepted = 0u64;
    let mut skipped = 0u64;
    let mut chunk = Vec::with_capacity(FILE_CHUNK);
    for (line_no, line) in reader.lines().enumerate() {
        let line = line.with_context(|| format!("reading line {}", line_no + 1))?;
        match ltl4c_core::trace::parse_event_line(&line, accepted) {
            Ok(Some(event)) => {
                accepted += 1;
                chunk.push(event);
                if chunk.len() == FILE_CHUNK {
                    pipeline.feed(&chunk);
                    chunk.clear();
                }
            }
            Ok(None) => {}
            Err(message) => match policy {
                OnMalformed::Skip => {
                    skipped += 1;
                    eprintln!("warning: line {}: {message}", line_no + 1);
                }
                OnMalformed::Abort => bail!("line {}: {message}", line_no + 1),
            },
        }
    }
    if !chunk.is_empty() {
        pipeline.feed(&chunk);
    }
    Ok((accepted, skipped))
}

fn cmd_check(property: &Path, trace: &Path, settings: &Settings) -> Result<i32> {
    let property = load_property(property)?;
    let mut pipeline = build_pipeline(property, settings)?;
    let file =
        File::open(trace).with_context(|| format!("opening trace file {}", trace.display()))?;
    let started = Instant::now();
    let (events, skipped) = feed_reader(&mut pipeline, BufReader::new(file), settings.on_malformed)?;
    let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    let verdict = pipeline.verdict();
    let report = RunReport {
        schema: SCHEMA,
        verdict: verdict.token(),
        events,
        matched: pipeline.summary().matched,
        skipped,
        elapsed_ms,
        workers: pipeline.threads(),
        nodes: pipeline.dump().rows,
    };
    match settings.format {
        Format::Human => print!("{}", report.human()),
        Format::JsonLines => println!("{}", serde_json::to_string(&report)?),
    }
    Ok(exit_code(verdict))
}

fn cmd_stream(property: &Path, settings: &Settings) -> Result<i32> {
    let property = load_property(property)?;
    let mut pipeline = build_pipeline(property, settings)?;
    let verdict = stream::run(&mut pipeline, BufReader::new(io::stdin()), *settings)?;
    let summary = pipeline.summary();
    match settings.format {
        Format::Human => println!("{summary}"),
        Format::JsonLines => println!("{}", serde_json::to_string(&summary)?),
    }
    Ok(exit_code(verdict))
}

fn cmd_explain(
    property: &Path,
    trace: Option<&Path>,
    numeric_keys: &[String],
    settings: &Settings,
) -> Result<i32> {
    let property = load_property(property)?;
    let guards: Vec<String> = property.prefix.iter().map(|q| q.variable.clone()).collect();
    for key in numeric_keys {
        if !guards.contains(key) {
            bail!(
                "--numeric-keys {key:?} is not a quantifier variable (have: {})",
                guards.join(", ")
            );
        }
    }
    let numeric_depths: Vec<bool> = guards.iter().map(|g| numeric_keys.contains(g)).collect();
    let monitor =
        synthesize(&property.body, SynthOptions::default()).context("synthesizing the monitor")?;
    let fsm = fsm_report(&monitor);
    let mut pipeline = build_pipeline(property, settings)?;
    if let Some(path) = trace {
        let file =
            File::open(path).with_context(|| format!("opening trace file {}", path.display()))?;
        feed_reader(&mut pipeline, BufReader::new(file), settings.on_malformed)?;
    }
    let verdict = pipeline.verdict();
    let mut rows = pipeline.dump().rows;
    sort_rows(&mut rows, &numeric_depths);
    match settings.format {
        Format::Human => {
            print!("{}", fsm.human());
            println!("tree:");
            print!("{}", rows_text(&rows));
        }
        Format::JsonLines => {
            println!("{}", serde_json::to_string(&fsm)?);
            let tree = ExplainTree {
                schema: SCHEMA,
                verdict: verdict.token(),
                nodes: rows,
            };
            println!("{}", serde_json::to_string(&tree)?);
        }
    }
    Ok(exit_code(verdict))
}

fn cmd_gen(shape: Shape, seed: u64, events: u64, objects: Option<u64>) -> Result<i32> {
    let objects = objects.unwrap_or_else(|| shape.default_objects());
    let stdout = io::stdout().lock();
    let mut out = io::BufWriter::new(stdout);
    for event in gen::trace_sized(shape, seed, events, objects) {
        out.write_all(event_to_json_line(&event).as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(0)
}

#[derive(serde::Serialize)]
struct BenchRow {
    schema: u32,
    threads: usize,
    workers: usize,
    elapsed_s: f64,
    events_per_s: u64,
    verdict: &'static str,
}

fn cmd_bench(
    property: Option<&Path>,
    shape: Shape,
    seed: u64,
    events: u64,
    objects: Option<u64>,
    threads_list: &[usize],
    format: Format,
) -> Result<i32> {
    let property = match property {
        Some(path) => load_property(path)?,
        None => ltl4c_core::parse_property(shape.property_text())
            .expect("built-in property parses"),
    };
    let objects = objects.unwrap_or_else(|| shape.default_objects());
    let trace: Vec<_> = gen::trace_sized(shape, seed, events, objects).collect();
    if format == Format::Human {
        println!("threads workers elapsed_s events_per_s verdict");
    }
    for &threads in threads_list {
        let options = PipelineOptions {
            threads,
            synth: SynthOptions::default(),
        };
        let mut pipeline = Pipeline::new(property.clone(), options).context("building the checker")?;
        let started = Instant::now();
        for chunk in trace.chunks(FILE_CHUNK) {
            pipeline.feed(chunk);
        }
        let elapsed_s = started.elapsed().as_secs_f64();
        let verdict: Verdict6 = pipeline.verdict();
        let row = BenchRow {
            schema: SCHEMA,
            threads,
            workers: pipeline.threads(),
            elapsed_s,
            events_per_s: (events as f64 / elapsed_s) as u64,
            verdict: verdict.token(),
        };
        match format {
            Format::Human => println!(
                "{} {} {:.3} {} {}",
                row.threads, row.workers, row.elapsed_s, row.events_per_s, row.verdict
            ),
            Format::JsonLines => println!("{}", serde_json::to_string(&row)?),
        }
    }
    Ok(0)
}
