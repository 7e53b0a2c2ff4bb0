//! Acceptance gate: one test per release criterion, each printing an
//! explicit pass line (run with `--nocapture` to see them).

mod common;

use std::path::{Path, PathBuf};
use std::time::Instant;

use bitbranch::interp::{shadow_replay, ReplayOutcome, DEFAULT_BUDGET};
use bitbranch::oracle::{self, CheckPlan};
use bitbranch::transform::{transform_program, transform_program_with, TransformConfig};
use bitbranch::{parse_with_options, print, Catalog, ParseOptions};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

fn manifest_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(manifest_dir().join("corpus"))
        .expect("corpus directory")
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "c"))
        .collect();
    files.sort();
    files
}

fn load(path: &Path, allow_reserved: bool) -> bitbranch::Program {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{path:?}: {e}"));
    parse_with_options(
        &text,
        ParseOptions {
            width: bitbranch::ast::DEFAULT_WIDTH,
            allow_reserved,
        },
    )
    .unwrap_or_else(|e| panic!("{path:?}: {e}"))
}

/// Criterion 1: every rule in the expanded catalog passes exhaustive
/// enumeration at widths 4 and 6 (all rules) and 8 (obligations with at
/// most two enumerated values), with zero counterexamples, in under 60s.
#[test]
fn criterion_1_rule_soundness() {
    let start = Instant::now();
    let verdicts = oracle::check_all(&CheckPlan::default());
    let elapsed = start.elapsed();
    let mut checked = 0u64;
    for v in &verdicts {
        assert!(v.is_pass(), "counterexample: {v}");
        assert!(v.checked > 0, "vacuous obligation: {v}");
        checked += v.checked;
    }
    assert!(
        elapsed.as_secs() < 60,
        "rule check took {elapsed:?}, budget is 60s"
    );
    let (rw, wk) = Catalog::for_width(6).base_counts();
    assert_eq!((rw, wk), (11, 13));
    println!(
        "acceptance criterion 1 rule soundness: PASS ({} verdicts, {} valuations, {:.1}s)",
        verdicts.len(),
        checked,
        elapsed.as_secs_f64()
    );
}

/// Criterion 2: the golden example transforms to the checked-in file,
/// compared structurally (guard chain, havoc, bounding assume, original in
/// the final else).
#[test]
fn criterion_2_golden_transformation() {
    let dir = manifest_dir().join("tests/golden");
    let original = load(&dir.join("ex1.c"), false);
    let golden = load(&dir.join("ex1.bwb.c"), true);
    let (transformed, report) = transform_program(&original, &TransformConfig::default());
    assert!(
        transformed.struct_eq(&golden),
        "transformation diverged from golden file:\n{}",
        print(&transformed)
    );
    for rule in ["W-And-Pos", "W-And-Neg", "W-And-Mix", "W-And-Mix@1"] {
        assert_eq!(report.fired.get(rule), Some(&1), "missing firing: {rule}");
    }
    println!("acceptance criterion 2 golden transformation: PASS (struct_eq, 4 rules fired)");
}

/// Criterion 3: the bundled corpus replays clean on 1000 seeds per program
/// in under 2 minutes, and coverage spans at least 10 distinct rules.
#[test]
fn criterion_3_corpus_trace_inclusion() {
    let files = corpus_files();
    assert!(files.len() >= 20, "corpus has only {} programs", files.len());
    let start = Instant::now();
    let cfg = TransformConfig::default();
    let mut distinct = std::collections::BTreeSet::new();
    for file in &files {
        let program = load(file, false);
        let (transformed, report) = transform_program(&program, &cfg);
        distinct.extend(report.fired.keys().cloned());
        use rayon::prelude::*;
        let failures: Vec<String> = (0u64..1000)
            .into_par_iter()
            .filter_map(|seed| {
                match shadow_replay(&program, &transformed, seed, DEFAULT_BUDGET) {
                    Ok(ReplayOutcome::Ok) => None,
                    Ok(ReplayOutcome::Violation(v)) => Some(format!(
                        "{file:?} seed {seed}: violation: assume({})",
                        v.cond_text
                    )),
                    Ok(ReplayOutcome::TraceMismatch { detail }) => {
                        Some(format!("{file:?} seed {seed}: {detail}"))
                    }
                    Err(e) => Some(format!("{file:?} seed {seed}: {e}")),
                }
            })
            .collect();
        assert!(failures.is_empty(), "{}", failures.join("\n"));
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 120,
        "corpus replay took {elapsed:?}, budget is 120s"
    );
    assert!(
        distinct.len() >= 10,
        "only {} distinct rules fired",
        distinct.len()
    );
    println!(
        "acceptance criterion 3 corpus trace inclusion: PASS ({} programs x 1000 seeds, {} distinct rules, {:.1}s)",
        files.len(),
        distinct.len(),
        elapsed.as_secs_f64()
    );
}

/// Criterion 4: each checked-in mutation is caught by the oracle with a
/// counterexample that reproduces, and at least one mutation also breaks
/// shadow replay on the corpus.
#[test]
fn criterion_4_mutation_sensitivity() {
    let muts = oracle::mutations();
    assert_eq!(muts.len(), 5);
    let plan = CheckPlan {
        small_widths: vec![6],
        wide_width: None,
        wide_max_vars: 0,
    };
    for m in &muts {
        let verdicts = oracle::check_catalog_with(&plan, |w| {
            oracle::mutated_catalog(m.name, w).expect("known mutation")
        });
        let failing: Vec<_> = verdicts.iter().filter(|v| !v.is_pass()).collect();
        assert!(!failing.is_empty(), "{} went undetected", m.name);
        for v in &failing {
            assert_eq!(v.rule.name, m.target, "{v}");
        }
    }

    // W-And-Pos with the bound flipped must break replay on the program
    // whose assignments it guards.
    let file = manifest_dir().join("corpus/and_positive.c");
    let program = load(&file, false);
    let catalog =
        oracle::mutated_catalog("W-And-Pos:flip-relop", bitbranch::ast::DEFAULT_WIDTH).unwrap();
    let (transformed, _) =
        transform_program_with(&program, &TransformConfig::default(), catalog);
    let violation = (0u64..100).find_map(|seed| {
        match shadow_replay(&program, &transformed, seed, DEFAULT_BUDGET) {
            Ok(ReplayOutcome::Violation(v)) => Some((seed, v)),
            _ => None,
        }
    });
    let (seed, v) = violation.expect("flipped bound never violated replay in 100 seeds");
    println!(
        "acceptance criterion 4 mutation sensitivity: PASS (5/5 caught; replay violation at seed {seed}: assume({}))",
        v.cond_text
    );
}

/// Criterion 5: parse/print identity over 500 generated programs and
/// transform fixed-point on the corpus.
#[test]
fn criterion_5_idempotence_and_roundtrip() {
    let mut runner = TestRunner::deterministic();
    let strategy = common::arb_program();
    for i in 0..500 {
        let p = strategy
            .new_tree(&mut runner)
            .expect("generation")
            .current();
        let text = print(&p);
        let back = bitbranch::parse(&text)
            .unwrap_or_else(|e| panic!("program {i} failed to reparse: {e}\n{text}"));
        assert!(back.struct_eq(&p), "program {i} round-trip changed:\n{text}");
    }

    let cfg = TransformConfig::default();
    for file in corpus_files() {
        let program = load(&file, false);
        let (once, _) = transform_program(&program, &cfg);
        let (twice, report) = transform_program(&once, &cfg);
        assert_eq!(
            report.total_fired(),
            0,
            "{file:?}: second pass fired {:?}",
            report.fired
        );
        assert!(twice.struct_eq(&once), "{file:?}: second pass changed output");
    }
    println!(
        "acceptance criterion 5 idempotence and round-trip: PASS (500 programs, corpus fixed-point)"
    );
}

/// Criterion 6 is a non-goal: verifier-backed end-to-end results require
/// external tooling and unpublished benchmark suites; criteria 1-5 stand in
/// for them. This test records the exclusion explicitly.
#[test]
fn criterion_6_out_of_scope_note() {
    println!(
        "acceptance criterion 6 external verification results: SKIPPED by design (out of scope)"
    );
}
