//! Quantifier-tree invariants: agreement with the literal from-scratch
//! evaluator, count conservation, latch permanence and verdict-rule
//! exclusivity.

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{brute_verdict, random_property, random_trace};
use ltl4c_core::pipeline::{Pipeline, PipelineOptions};
use ltl4c_core::verdict::Verdict6;

#[test]
fn tree_verdicts_match_the_literal_evaluator() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..400 {
        let property = random_property(&mut rng, 2, 3);
        let events = random_trace(&mut rng, &property, 8);
        let mut pipeline =
            Pipeline::new(property.clone(), PipelineOptions::default()).expect("pipeline");
        pipeline.feed(&events);
        let got = pipeline.verdict();
        let want = brute_verdict(&property, &events);
        assert_eq!(
            got, want,
            "case {case}: {property} over {} events, engine {got}, evaluator {want}",
            events.len()
        );
    }
}

#[test]
fn every_prefix_matches_the_literal_evaluator() {
    // The evaluator recomputes from scratch, so running it per prefix
    // checks the incremental engine at every step, not just at the end.
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..120 {
        let property = random_property(&mut rng, 2, 2);
        let events = random_trace(&mut rng, &property, 6);
        let mut pipeline =
            Pipeline::new(property.clone(), PipelineOptions::default()).expect("pipeline");
        for k in 0..events.len() {
            pipeline.feed(&events[k..=k]);
            let want = brute_verdict(&property, &events[..=k]);
            assert_eq!(
                pipeline.verdict(),
                want,
                "{property} after {} events",
                k + 1
            );
        }
    }
}

#[test]
fn counts_are_conserved_on_unlatched_nodes() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..150 {
        let property = random_property(&mut rng, 2, 2);
        let events = random_trace(&mut rng, &property, 8);
        let mut pipeline =
            Pipeline::new(property.clone(), PipelineOptions::default()).expect("pipeline");
        pipeline.feed(&events);
        let dump = pipeline.dump();
        // Group rows by parent path; compare counted children to the
        // parent's count histogram.
        for row in &dump.rows {
            let Some(counts) = row.counts else { continue };
            let frozen = row.latched
                || dump.rows.iter().any(|r| {
                    r.latched
                        && r.path.len() < row.path.len()
                        && row.path[..r.path.len()] == r.path[..]
                });
            let children = dump
                .rows
                .iter()
                .filter(|r| {
                    r.path.len() == row.path.len() + 1 && r.path[..row.path.len()] == row.path[..]
                })
                .count() as u64;
            let total: u64 = counts.iter().sum();
            assert!(
                total <= children,
                "node {:?} counts {total} exceed {children} children",
                row.path
            );
            // A live node has counted every child exactly once; latched or
            // frozen subtrees may lag behind later spawns.
            if !frozen {
                assert_eq!(total, children, "node {:?}", row.path);
            }
        }
    }
}

#[test]
fn latched_verdicts_never_change() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..120 {
        let property = random_property(&mut rng, 2, 2);
        let events = random_trace(&mut rng, &property, 8);
        let mut pipeline =
            Pipeline::new(property.clone(), PipelineOptions::default()).expect("pipeline");
        let mut latched: Vec<(Vec<String>, String)> = Vec::new();
        for e in &events {
            pipeline.feed(std::slice::from_ref(e));
            let dump = pipeline.dump();
            for (path, verdict) in &latched {
                let row = dump
                    .rows
                    .iter()
                    .find(|r| &r.path == path)
                    .expect("latched row persists");
                assert!(row.latched, "{path:?} lost its latch");
                assert_eq!(&row.verdict, verdict, "{path:?} changed after latch");
            }
            for row in &dump.rows {
                if row.latched && !latched.iter().any(|(p, _)| p == &row.path) {
                    latched.push((row.path.clone(), row.verdict.clone()));
                }
            }
        }
    }
}

#[test]
fn latches_and_permanence_line_up_at_the_root() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..150 {
        let property = random_property(&mut rng, 2, 2);
        if property.prefix.is_empty() {
            continue;
        }
        let events = random_trace(&mut rng, &property, 8);
        let mut pipeline =
            Pipeline::new(property.clone(), PipelineOptions::default()).expect("pipeline");
        pipeline.feed(&events);
        let dump = pipeline.dump();
        let root = dump.rows.iter().find(|r| r.path.is_empty()).expect("root");
        let verdict = pipeline.verdict();
        assert_eq!(root.verdict, verdict.token());
        if root.latched {
            assert!(verdict.is_permanent(), "{property}");
        }
        // False is only ever produced by a latch rule; True may also be a
        // retractable instance-count match, so only one direction holds.
        if verdict == Verdict6::False {
            assert!(root.latched, "{property}");
        }
    }
}

#[test]
fn vacuous_domains_follow_the_zero_count_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for _ in 0..200 {
        let property = random_property(&mut rng, 2, 2);
        if property.prefix.is_empty() {
            continue;
        }
        let mut pipeline =
            Pipeline::new(property.clone(), PipelineOptions::default()).expect("pipeline");
        pipeline.feed(&[]);
        let verdict = pipeline.verdict();
        assert!(
            matches!(verdict, Verdict6::PresumablyTrue | Verdict6::PresumablyFalse),
            "empty trace must stay presumable, got {verdict} for {property}"
        );
        assert_eq!(verdict, brute_verdict(&property, &[]));
    }
}
