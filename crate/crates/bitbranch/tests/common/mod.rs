//! Random program generation shared by the integration tests.

use bitbranch::ast::{BinOpTag, Expr, Program, Stmt, StmtKind, UnOpTag};
use proptest::prelude::*;

pub const VAR_POOL: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

fn arb_binop() -> impl Strategy<Value = BinOpTag> {
    prop::sample::select(vec![
        BinOpTag::Add,
        BinOpTag::Sub,
        BinOpTag::Mul,
        BinOpTag::Div,
        BinOpTag::Mod,
        BinOpTag::BitAnd,
        BinOpTag::BitOr,
        BinOpTag::BitXor,
        BinOpTag::Shl,
        BinOpTag::Shr,
        BinOpTag::Lt,
        BinOpTag::Le,
        BinOpTag::Gt,
        BinOpTag::Ge,
        BinOpTag::Eq,
        BinOpTag::Ne,
        BinOpTag::LogAnd,
        BinOpTag::LogOr,
    ])
}

fn arb_unop() -> impl Strategy<Value = UnOpTag> {
    prop::sample::select(vec![UnOpTag::Neg, UnOpTag::BitNot, UnOpTag::LogNot])
}

/// Folds negation of a literal into the literal itself: the parser performs
/// that fold, so keeping it out of generated trees preserves round-trips.
fn fold_neg(op: UnOpTag, operand: Expr) -> Expr {
    match (op, &operand) {
        (UnOpTag::Neg, Expr::IntLit(v)) => Expr::lit(-v),
        _ => Expr::unary(op, operand),
    }
}

pub fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        prop::sample::select(VAR_POOL.to_vec()).prop_map(Expr::var),
        (-100i64..=100).prop_map(Expr::lit),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (arb_binop(), inner.clone(), inner.clone())
                .prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            (arb_unop(), inner.clone()).prop_map(|(op, e)| fold_neg(op, e)),
            (inner.clone(), inner.clone(), inner)
                .prop_map(|(c, t, e)| Expr::ternary(c, t, e, false)),
        ]
    })
}

fn arb_target() -> impl Strategy<Value = String> {
    prop::sample::select(VAR_POOL.to_vec()).prop_map(str::to_string)
}

pub fn arb_stmt() -> impl Strategy<Value = Stmt> {
    let leaf = prop_oneof![
        (arb_target(), arb_expr()).prop_map(|(t, e)| Stmt::assign(t, e)),
        arb_target().prop_map(Stmt::havoc),
        arb_expr().prop_map(Stmt::assume),
        arb_expr().prop_map(|e| Stmt::new(StmtKind::Assert(e))),
    ];
    leaf.prop_recursive(3, 12, 4, |inner| {
        prop_oneof![
            (
                arb_expr(),
                prop::collection::vec(inner.clone(), 0..3),
                prop::collection::vec(inner.clone(), 0..3)
            )
                .prop_map(|(cond, then_branch, else_branch)| Stmt::new(StmtKind::If {
                    cond,
                    then_branch,
                    else_branch,
                })),
            (arb_expr(), prop::collection::vec(inner.clone(), 0..3))
                .prop_map(|(cond, body)| Stmt::new(StmtKind::While { cond, body })),
            prop::collection::vec(inner, 0..3).prop_map(|stmts| Stmt::new(StmtKind::Block(stmts))),
        ]
    })
}

pub fn arb_program() -> impl Strategy<Value = Program> {
    (
        prop::collection::vec(prop::option::of(-100i64..=100), VAR_POOL.len()),
        prop::collection::vec(arb_stmt(), 0..8),
    )
        .prop_map(|(inits, body)| {
            let mut p = Program::new(bitbranch::ast::DEFAULT_WIDTH);
            for (name, init) in VAR_POOL.iter().zip(inits) {
                p.decls.push((name.to_string(), init.map(Expr::lit)));
            }
            p.body = body;
            p
        })
}
