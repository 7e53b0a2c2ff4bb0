//! Printer/parser round-trip and normalization-semantics properties over
//! randomly generated programs.

mod common;

use bitbranch::ast::{Program, StmtKind};
use bitbranch::interp::{run, Env, NondetStream, RunStatus, Trace};
use bitbranch::transform::normalize_three_address;
use bitbranch::{parse, print, print_expr};
use proptest::prelude::*;

fn reparse(p: &Program) -> Program {
    let text = print(p);
    match parse(&text) {
        Ok(back) => back,
        Err(e) => panic!("printed program failed to parse: {e}\n{text}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, ..ProptestConfig::default() })]

    #[test]
    fn parse_print_identity(p in common::arb_program()) {
        let back = reparse(&p);
        prop_assert!(back.struct_eq(&p), "round-trip changed the program:\n{}", print(&p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    // Precedence fidelity: any expression embedded in a probe assignment
    // survives printing with minimal parentheses.
    #[test]
    fn expr_precedence_fidelity(e in common::arb_expr()) {
        let mut p = Program::new(bitbranch::ast::DEFAULT_WIDTH);
        for name in common::VAR_POOL {
            p.decls.push((name.to_string(), None));
        }
        p.body = vec![bitbranch::Stmt::assign("a", e.clone())];
        let back = reparse(&p);
        let rhs = match &back.body[0].kind {
            StmtKind::Assign { rhs, .. } => rhs.clone(),
            other => panic!("probe changed shape: {other:?}"),
        };
        prop_assert!(
            rhs.struct_eq(&e),
            "printed as `{}`, reparsed as `{}`",
            print_expr(&e),
            print_expr(&rhs)
        );
    }
}

/// User-visible effect sequence: drop temp-targeted entries, restrict to
/// user variables, collapse consecutive duplicates.
fn project(trace: &Trace) -> Vec<Env> {
    let mut out: Vec<Env> = Vec::new();
    for entry in &trace.entries {
        if let Some(t) = &entry.target {
            if t.starts_with("__bwb_") {
                continue;
            }
        }
        let user: Env = entry
            .env
            .iter()
            .filter(|(k, _)| !k.starts_with("__bwb_"))
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        if out.last() != Some(&user) {
            out.push(user);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, ..ProptestConfig::default() })]

    // Hoisting temporaries must not change what the program does: same
    // nondet draws, same user-visible environments, same terminal status
    // (fault kinds may differ when a fault is merely reordered).
    #[test]
    fn normalize_preserves_behavior((p, seed) in (common::arb_program(), any::<u64>())) {
        let n = normalize_three_address(&p);
        let budget = 2_000;
        let mut s1 = NondetStream::new(seed, p.width);
        let t1 = run(&p, &mut s1, budget);
        let mut s2 = NondetStream::new(seed, n.width);
        let t2 = run(&n, &mut s2, budget * 4);
        prop_assume!(t1.status != RunStatus::BudgetExhausted);
        prop_assume!(t2.status != RunStatus::BudgetExhausted);
        let p1 = project(&t1);
        let p2 = project(&t2);
        match (&t1.status, &t2.status) {
            (RunStatus::Fault(_), RunStatus::Fault(_)) => {
                let k = p1.len().min(p2.len());
                prop_assert_eq!(&p1[..k], &p2[..k]);
            }
            (a, b) => {
                prop_assert_eq!(a, b);
                prop_assert_eq!(p1, p2);
            }
        }
    }
}

#[test]
fn golden_file_reparses() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let text = std::fs::read_to_string(dir.join("ex1.bwb.c")).unwrap();
    let opts = bitbranch::ParseOptions {
        width: bitbranch::ast::DEFAULT_WIDTH,
        allow_reserved: true,
    };
    let p = bitbranch::parse_with_options(&text, opts).unwrap();
    assert!(p.decls.iter().any(|(n, _)| n == "__bwb_s0"));
    let printed = print(&p);
    let back = bitbranch::parse_with_options(&printed, opts).unwrap();
    assert!(back.struct_eq(&p));
}

#[test]
fn reserved_prefix_rejected_without_option() {
    let err = parse("int __bwb_t0; __bwb_t0 = 1;").unwrap_err();
    assert!(err.message.contains("reserved"), "{err}");
}
