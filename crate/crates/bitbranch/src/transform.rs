//! Applies the catalog to programs: rewriting rules become guarded
//! conditional expressions, weakening rules become guard / havoc / assume
//! branches around assignments and assumptions.

use std::collections::BTreeMap;

use crate::ast::{
    substitute, BinOpTag, Expr, MetaVar, Program, Stmt, StmtKind, Substitution, UnOpTag,
};
use crate::rules::{Catalog, RuleId, WeakenRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    WeakenFirst,
    RewriteFirst,
    RewriteOnly,
    WeakenOnly,
}

#[derive(Debug, Clone)]
pub struct TransformConfig {
    pub width: u32,
    /// Hoist nested bitwise sub-expressions into fresh temporaries before
    /// rule application.
    pub normalize: bool,
    pub strategy: Strategy,
}

impl Default for TransformConfig {
    fn default() -> Self {
        TransformConfig {
            width: crate::ast::DEFAULT_WIDTH,
            normalize: true,
            strategy: Strategy::WeakenFirst,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct TransformReport {
    pub fired: BTreeMap<String, u64>,
    pub guards_inserted: u64,
    pub temps_introduced: u64,
}

impl TransformReport {
    pub fn total_fired(&self) -> u64 {
        self.fired.values().sum()
    }
}

struct Transformer {
    catalog: Catalog,
    cfg: TransformConfig,
    temp_counter: usize,
    snap_counter: usize,
    new_decls: Vec<String>,
    report: TransformReport,
}

impl Transformer {
    fn new(cfg: TransformConfig) -> Transformer {
        Transformer {
            catalog: Catalog::for_width(cfg.width),
            cfg,
            temp_counter: 0,
            snap_counter: 0,
            new_decls: Vec::new(),
            report: TransformReport::default(),
        }
    }

    fn fresh_temp(&mut self) -> String {
        let name = format!("__bwb_t{}", self.temp_counter);
        self.temp_counter += 1;
        self.new_decls.push(name.clone());
        self.report.temps_introduced += 1;
        name
    }

    fn fresh_snapshot(&mut self) -> String {
        let name = format!("__bwb_s{}", self.snap_counter);
        self.snap_counter += 1;
        self.new_decls.push(name.clone());
        self.report.temps_introduced += 1;
        name
    }

    fn record_fired(&mut self, id: &RuleId) {
        *self.report.fired.entry(id.to_string()).or_insert(0) += 1;
    }

    // --- three-address normalization ---

    fn is_bitwise_node(e: &Expr) -> bool {
        match e {
            Expr::Binary { op, .. } => op.is_bitwise(),
            Expr::Unary { op, .. } => *op == UnOpTag::BitNot,
            _ => false,
        }
    }

    /// Hoists every bitwise subtree of `e` (including `e` itself) into a
    /// temporary; returns the replacing expression.
    fn hoist_all(&mut self, e: &Expr, pre: &mut Vec<Stmt>) -> Expr {
        let rebuilt = self.hoist_children(e, pre);
        if Self::is_bitwise_node(&rebuilt) {
            let name = self.fresh_temp();
            pre.push(Stmt::assign(name.clone(), rebuilt));
            Expr::var(name)
        } else {
            rebuilt
        }
    }

    /// Keeps `e`'s top node in place, hoisting bitwise subtrees strictly
    /// inside it. Only positions that are evaluated unconditionally are
    /// hoisted: the right operand of `&&`/`||` and ternary branches stay
    /// untouched, otherwise a hoisted temporary would evaluate an
    /// expression the original program might skip. Generated ternaries are
    /// never revisited.
    fn hoist_children(&mut self, e: &Expr, pre: &mut Vec<Stmt>) -> Expr {
        match e {
            Expr::Ternary {
                generated: true, ..
            } => e.clone(),
            Expr::Unary { op, operand } => Expr::unary(*op, self.hoist_all(operand, pre)),
            Expr::Binary { op, left, right }
                if matches!(op, BinOpTag::LogAnd | BinOpTag::LogOr) =>
            {
                Expr::binary(*op, self.hoist_all(left, pre), (**right).clone())
            }
            Expr::Binary { op, left, right } => Expr::binary(
                *op,
                self.hoist_all(left, pre),
                self.hoist_all(right, pre),
            ),
            Expr::Ternary {
                cond,
                then_branch,
                else_branch,
                generated,
            } => Expr::ternary(
                self.hoist_all(cond, pre),
                (**then_branch).clone(),
                (**else_branch).clone(),
                *generated,
            ),
            other => other.clone(),
        }
    }

    /// Assume conditions keep a weaken-matchable shape: a bitwise node
    /// directly under the top relational operator stays in place.
    fn hoist_assume_cond(&mut self, cond: &Expr, pre: &mut Vec<Stmt>) -> Expr {
        if let Expr::Binary { op, left, right } = cond {
            if op.is_relational() {
                let l = if Self::is_bitwise_node(left) {
                    self.hoist_children(left, pre)
                } else {
                    self.hoist_all(left, pre)
                };
                let r = if Self::is_bitwise_node(right) {
                    self.hoist_children(right, pre)
                } else {
                    self.hoist_all(right, pre)
                };
                return Expr::binary(*op, l, r);
            }
        }
        self.hoist_children(cond, pre)
    }

    fn normalize_stmts(&mut self, stmts: &[Stmt]) -> Vec<Stmt> {
        let mut out = Vec::new();
        for s in stmts {
            if s.generated {
                out.push(s.clone());
                continue;
            }
            match &s.kind {
                StmtKind::Assign { target, rhs } => {
                    let mut pre = Vec::new();
                    let rhs = self.hoist_children(rhs, &mut pre);
                    out.extend(pre);
                    let mut ns = Stmt::assign(target.clone(), rhs);
                    ns.notes = s.notes.clone();
                    out.push(ns);
                }
                StmtKind::Assume(cond) => {
                    let mut pre = Vec::new();
                    let cond = self.hoist_assume_cond(cond, &mut pre);
                    out.extend(pre);
                    out.push(Stmt::assume(cond));
                }
                StmtKind::If {
                    cond,
                    then_branch,
                    else_branch,
                } => {
                    let mut pre = Vec::new();
                    let cond = self.hoist_children(cond, &mut pre);
                    out.extend(pre);
                    out.push(Stmt::new(StmtKind::If {
                        cond,
                        then_branch: self.normalize_stmts(then_branch),
                        else_branch: self.normalize_stmts(else_branch),
                    }));
                }
                StmtKind::While { cond, body } => {
                    // The condition temporaries are recomputed before the
                    // loop and at the end of each iteration so the loop
                    // head always sees fresh values.
                    let mut pre = Vec::new();
                    let cond = self.hoist_children(cond, &mut pre);
                    let mut body = self.normalize_stmts(body);
                    body.extend(pre.iter().cloned());
                    out.extend(pre);
                    out.push(Stmt::new(StmtKind::While { cond, body }));
                }
                StmtKind::Block(stmts) => {
                    out.push(Stmt::new(StmtKind::Block(self.normalize_stmts(stmts))));
                }
                _ => out.push(s.clone()),
            }
        }
        out
    }

    // --- expression rewriting ---

    fn rewrite_expr(&mut self, e: &Expr, fired: &mut Vec<String>) -> Expr {
        let rebuilt = match e {
            Expr::Ternary {
                generated: true, ..
            } => return e.clone(),
            Expr::Unary { op, operand } => Expr::unary(*op, self.rewrite_expr(operand, fired)),
            Expr::Binary { op, left, right } => Expr::binary(
                *op,
                self.rewrite_expr(left, fired),
                self.rewrite_expr(right, fired),
            ),
            Expr::Ternary {
                cond,
                then_branch,
                else_branch,
                generated,
            } => Expr::ternary(
                self.rewrite_expr(cond, fired),
                self.rewrite_expr(then_branch, fired),
                self.rewrite_expr(else_branch, fired),
                *generated,
            ),
            other => other.clone(),
        };
        let matches: Vec<(RuleId, Substitution)> = self
            .catalog
            .rewrite
            .iter()
            .filter_map(|rule| {
                rule.try_match(&rebuilt)
                    .map(|delta| (rule.id.clone(), delta))
            })
            .collect();
        if matches.is_empty() {
            return rebuilt;
        }
        let mut acc = rebuilt;
        for (id, delta) in matches.iter().rev() {
            let rule = self
                .catalog
                .rewrite
                .iter()
                .find(|r| r.id == *id)
                .expect("matched rule present");
            let guard = substitute(&rule.guard, delta).expect("guard metavars bound");
            let replacement =
                substitute(&rule.replacement, delta).expect("replacement metavars bound");
            acc = Expr::ternary(guard, replacement, acc, true);
        }
        for (id, _) in &matches {
            fired.push(id.to_string());
            self.record_fired(id);
            self.report.guards_inserted += 1;
        }
        acc
    }

    // --- weakening ---

    fn weaken_matches_assign(&self, target: &str, rhs: &Expr) -> Vec<(usize, Substitution)> {
        self.catalog
            .weaken
            .iter()
            .enumerate()
            .filter_map(|(i, rule)| {
                rule.match_assign(target, rhs, self.cfg.width)
                    .map(|d| (i, d))
            })
            .collect()
    }

    fn weaken_matches_cond(&self, cond: &Expr) -> Vec<(usize, Substitution)> {
        self.catalog
            .weaken
            .iter()
            .enumerate()
            .filter_map(|(i, rule)| rule.match_cond(cond, self.cfg.width).map(|d| (i, d)))
            .collect()
    }

    /// Builds the guard chain for a weakened assignment:
    /// `if C1 { x = *; assume(s1); } else if C2 { ... } else { original }`.
    fn weaken_assign(
        &mut self,
        target: &str,
        rhs: &Expr,
        original: &Stmt,
        matches: Vec<(usize, Substitution)>,
    ) -> Vec<Stmt> {
        debug_assert!(!matches.is_empty());
        // A snapshot of the pre-state target is needed whenever a matched
        // operand mentions the assignment target: the inserted assume runs
        // after the havoc, so those occurrences must read the old value.
        let needs_snapshot = matches.iter().any(|(i, delta)| {
            let _ = i;
            [MetaVar::E1, MetaVar::E2].iter().any(|m| {
                delta
                    .get(*m)
                    .map(|e| e.mentions_var(target))
                    .unwrap_or(false)
            })
        });
        let mut out = Vec::new();
        let snap_name = if needs_snapshot {
            let name = self.fresh_snapshot();
            out.push(Stmt::generated(StmtKind::Assign {
                target: name.clone(),
                rhs: Expr::var(target),
            }));
            Some(name)
        } else {
            None
        };

        let mut notes = Vec::new();
        let mut chain: Vec<Stmt> = vec![original.clone()];
        for (i, delta) in matches.iter().rev() {
            let rule: &WeakenRule = &self.catalog.weaken[*i];
            let guard = substitute(&rule.guard, delta).expect("guard metavars bound");
            let mut repl_delta = delta.clone();
            if let Some(snap) = &snap_name {
                for m in [MetaVar::E1, MetaVar::E2] {
                    if let Some(binding) = delta.get(m) {
                        repl_delta.bind(m, binding.rename_var(target, snap));
                    }
                }
            }
            repl_delta.bind(MetaVar::R, Expr::var(target));
            let assume_expr =
                substitute(&rule.replacement, &repl_delta).expect("replacement metavars bound");
            let havoc = Stmt::generated(StmtKind::Havoc {
                target: target.to_string(),
                original: Some(rhs.clone()),
            });
            let assume = Stmt::generated(StmtKind::Assume(assume_expr));
            chain = vec![Stmt::generated(StmtKind::If {
                cond: guard,
                then_branch: vec![havoc, assume],
                else_branch: chain,
            })];
        }
        for (i, _) in &matches {
            let id = self.catalog.weaken[*i].id.clone();
            notes.push(id.to_string());
            self.record_fired(&id);
            self.report.guards_inserted += 1;
        }
        let mut top = chain.pop().expect("nonempty chain");
        top.notes = notes;
        out.push(top);
        out
    }

    /// Guard chain for a weakened assume condition.
    fn weaken_assume(
        &mut self,
        original: &Stmt,
        matches: Vec<(usize, Substitution)>,
    ) -> Stmt {
        debug_assert!(!matches.is_empty());
        let mut notes = Vec::new();
        let mut chain: Vec<Stmt> = vec![original.clone()];
        for (i, delta) in matches.iter().rev() {
            let rule = &self.catalog.weaken[*i];
            let guard = substitute(&rule.guard, delta).expect("guard metavars bound");
            let weakened =
                substitute(&rule.replacement, delta).expect("replacement metavars bound");
            chain = vec![Stmt::generated(StmtKind::If {
                cond: guard,
                then_branch: vec![Stmt::generated(StmtKind::Assume(weakened))],
                else_branch: chain,
            })];
        }
        for (i, _) in &matches {
            let id = self.catalog.weaken[*i].id.clone();
            notes.push(id.to_string());
            self.record_fired(&id);
            self.report.guards_inserted += 1;
        }
        let mut top = chain.pop().expect("nonempty chain");
        top.notes = notes;
        top
    }

    // --- statement walk ---

    fn transform_assign(&mut self, s: &Stmt, target: &str, rhs: &Expr) -> Vec<Stmt> {
        let weaken_eligible = Self::is_bitwise_node(rhs);
        let try_weaken = |t: &mut Self| -> Option<Vec<Stmt>> {
            if !weaken_eligible {
                return None;
            }
            let matches = t.weaken_matches_assign(target, rhs);
            if matches.is_empty() {
                None
            } else {
                Some(t.weaken_assign(target, rhs, s, matches))
            }
        };
        let rewrite = |t: &mut Self| -> Vec<Stmt> {
            let mut fired = Vec::new();
            let new_rhs = t.rewrite_expr(rhs, &mut fired);
            let mut ns = Stmt::assign(target.to_string(), new_rhs);
            ns.notes = fired;
            vec![ns]
        };
        match self.cfg.strategy {
            Strategy::WeakenFirst => try_weaken(self).unwrap_or_else(|| rewrite(self)),
            Strategy::WeakenOnly => try_weaken(self).unwrap_or_else(|| vec![s.clone()]),
            Strategy::RewriteOnly => rewrite(self),
            Strategy::RewriteFirst => {
                let mut fired = Vec::new();
                let new_rhs = self.rewrite_expr(rhs, &mut fired);
                if fired.is_empty() {
                    try_weaken(self).unwrap_or_else(|| vec![s.clone()])
                } else {
                    let mut ns = Stmt::assign(target.to_string(), new_rhs);
                    ns.notes = fired;
                    vec![ns]
                }
            }
        }
    }

    fn transform_assume(&mut self, s: &Stmt, cond: &Expr) -> Stmt {
        let try_weaken = |t: &mut Self| -> Option<Stmt> {
            let matches = t.weaken_matches_cond(cond);
            if matches.is_empty() {
                None
            } else {
                Some(t.weaken_assume(s, matches))
            }
        };
        let rewrite = |t: &mut Self| -> Stmt {
            let mut fired = Vec::new();
            let new_cond = t.rewrite_expr(cond, &mut fired);
            let mut ns = Stmt::assume(new_cond);
            ns.notes = fired;
            ns
        };
        match self.cfg.strategy {
            Strategy::WeakenFirst => try_weaken(self).unwrap_or_else(|| rewrite(self)),
            Strategy::WeakenOnly => try_weaken(self).unwrap_or_else(|| s.clone()),
            Strategy::RewriteOnly => rewrite(self),
            Strategy::RewriteFirst => {
                let mut fired = Vec::new();
                let new_cond = self.rewrite_expr(cond, &mut fired);
                if fired.is_empty() {
                    try_weaken(self).unwrap_or_else(|| s.clone())
                } else {
                    let mut ns = Stmt::assume(new_cond);
                    ns.notes = fired;
                    ns
                }
            }
        }
    }

    fn rewrite_cond_stmt(&mut self, cond: &Expr) -> (Expr, Vec<String>) {
        if self.cfg.strategy == Strategy::WeakenOnly {
            return (cond.clone(), Vec::new());
        }
        let mut fired = Vec::new();
        let new_cond = self.rewrite_expr(cond, &mut fired);
        (new_cond, fired)
    }

    fn transform_stmts(&mut self, stmts: &[Stmt]) -> Vec<Stmt> {
        let mut out = Vec::new();
        for s in stmts {
            if s.generated {
                out.push(s.clone());
                continue;
            }
            match &s.kind {
                StmtKind::Assign { target, rhs } => {
                    out.extend(self.transform_assign(s, target, rhs));
                }
                StmtKind::Assume(cond) => out.push(self.transform_assume(s, cond)),
                StmtKind::Assert(cond) => {
                    let (cond, fired) = self.rewrite_cond_stmt(cond);
                    let mut ns = Stmt::new(StmtKind::Assert(cond));
                    ns.notes = fired;
                    out.push(ns);
                }
                StmtKind::If {
                    cond,
                    then_branch,
                    else_branch,
                } => {
                    let (cond, fired) = self.rewrite_cond_stmt(cond);
                    let mut ns = Stmt::new(StmtKind::If {
                        cond,
                        then_branch: self.transform_stmts(then_branch),
                        else_branch: self.transform_stmts(else_branch),
                    });
                    ns.notes = fired;
                    out.push(ns);
                }
                StmtKind::While { cond, body } => {
                    let (cond, fired) = self.rewrite_cond_stmt(cond);
                    let mut ns = Stmt::new(StmtKind::While {
                        cond,
                        body: self.transform_stmts(body),
                    });
                    ns.notes = fired;
                    out.push(ns);
                }
                StmtKind::Block(inner) => {
                    out.push(Stmt::new(StmtKind::Block(self.transform_stmts(inner))));
                }
                StmtKind::Havoc { .. } => out.push(s.clone()),
            }
        }
        out
    }
}

fn seed_counters(t: &mut Transformer, p: &Program) {
    for (name, _) in &p.decls {
        if let Some(n) = name.strip_prefix("__bwb_t").and_then(|s| s.parse::<usize>().ok()) {
            t.temp_counter = t.temp_counter.max(n + 1);
        }
        if let Some(n) = name.strip_prefix("__bwb_s").and_then(|s| s.parse::<usize>().ok()) {
            t.snap_counter = t.snap_counter.max(n + 1);
        }
    }
}

/// Hoists nested bitwise sub-expressions into fresh temporaries.
pub fn normalize_three_address(p: &Program) -> Program {
    let mut t = Transformer::new(TransformConfig {
        width: p.width,
        ..TransformConfig::default()
    });
    seed_counters(&mut t, p);
    let body = t.normalize_stmts(&p.body);
    let mut out = p.clone();
    out.body = body;
    for name in t.new_decls {
        out.decls.push((name, None));
    }
    out
}

/// Rewrites a single expression against a catalog (ternary chains per
/// matching rule, catalog order).
pub fn rewrite_expr(e: &Expr, catalog: &Catalog, cfg: &TransformConfig) -> Expr {
    let mut t = Transformer::new(cfg.clone());
    t.catalog = catalog.clone();
    let mut fired = Vec::new();
    t.rewrite_expr(e, &mut fired)
}

/// Transforms a whole program, returning the transformed program and a
/// report of every rule firing.
pub fn transform_program(p: &Program, cfg: &TransformConfig) -> (Program, TransformReport) {
    transform_program_with(p, cfg, Catalog::for_width(cfg.width))
}

/// Like `transform_program` but with a caller-supplied catalog (used by the
/// mutation harness and rule-subset tests).
pub fn transform_program_with(
    p: &Program,
    cfg: &TransformConfig,
    catalog: Catalog,
) -> (Program, TransformReport) {
    let mut t = Transformer::new(cfg.clone());
    t.catalog = catalog;
    seed_counters(&mut t, p);
    let normalized = if cfg.normalize {
        let body = t.normalize_stmts(&p.body);
        body
    } else {
        p.body.clone()
    };
    let body = t.transform_stmts(&normalized);
    let mut out = p.clone();
    out.body = body;
    for name in t.new_decls {
        out.decls.push((name, None));
    }
    (out, t.report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::stmts_struct_eq;
    use crate::parser::{parse, print_expr};
    use crate::rules::RewriteRule;

    fn cfg() -> TransformConfig {
        TransformConfig::default()
    }

    fn parse_expr_in(decls: &str, text: &str) -> Expr {
        let p = parse(&format!("{decls} probe = {text};")).unwrap();
        match &p.body[0].kind {
            StmtKind::Assign { rhs, .. } => rhs.clone(),
            _ => panic!(),
        }
    }

    #[test]
    fn rewrite_leaves_integer_expressions_alone() {
        let e = parse_expr_in("int x; int y; int probe;", "x + y");
        let cat = Catalog::for_width(32);
        let out = rewrite_expr(&e, &cat, &cfg());
        assert!(out.struct_eq(&e));
    }

    #[test]
    fn rewrite_shift_by_width_minus_one() {
        let e = parse_expr_in("int y; int probe;", "y >> 31");
        let cat = Catalog::for_width(32);
        let out = rewrite_expr(&e, &cat, &cfg());
        // (y >= 0) ? 0 : ((y < 0) ? (-1) : y >> 31)
        assert_eq!(
            print_expr(&out),
            "(y >= 0 ? 0 : (y < 0 ? (-1) : y >> 31))"
        );
    }

    #[test]
    fn rewrite_chains_in_catalog_order() {
        // Restricted catalog with just the base And rows named in the
        // expected chain; each branch is checked for exactness separately
        // by the oracle tests.
        let full = Catalog::for_width(8);
        let keep = ["R-And-0", "R-And-1", "R-And-LBS"];
        let restricted = Catalog {
            width: 8,
            rewrite: full
                .rewrite
                .iter()
                .filter(|r| keep.contains(&r.id.name) && r.id.variant == 0)
                .cloned()
                .collect::<Vec<RewriteRule>>(),
            weaken: Vec::new(),
        };
        let e = parse_expr_in("int x; int probe;", "x & 1");
        let out = rewrite_expr(&e, &restricted, &cfg());
        assert_eq!(
            print_expr(&out),
            "(x == 0 ? 0 : ((x == 0 || x == 1) && 1 == 1 ? x : (x >= 0 && 1 == 1 ? x % 2 : x & 1)))"
        );
    }

    #[test]
    fn weaken_assign_builds_guard_havoc_assume_chain() {
        let p = parse("int x; int a; x = x & a;").unwrap();
        let (out, report) = transform_program(&p, &cfg());
        // Snapshot of pre-state x, then the guard chain.
        assert!(report.fired.contains_key("W-And-Pos"));
        let snap = &out.body[0];
        assert!(snap.generated);
        match &snap.kind {
            StmtKind::Assign { target, rhs } => {
                assert_eq!(target, "__bwb_s0");
                assert!(rhs.struct_eq(&Expr::var("x")));
            }
            other => panic!("expected snapshot assign, got {other:?}"),
        }
        let chain = &out.body[1];
        match &chain.kind {
            StmtKind::If {
                cond,
                then_branch,
                ..
            } => {
                assert_eq!(print_expr(cond), "x >= 0 && a >= 0");
                match &then_branch[0].kind {
                    StmtKind::Havoc { target, original } => {
                        assert_eq!(target, "x");
                        assert!(original.as_ref().unwrap().struct_eq(&Expr::binary(
                            BinOpTag::BitAnd,
                            Expr::var("x"),
                            Expr::var("a")
                        )));
                    }
                    other => panic!("expected havoc, got {other:?}"),
                }
                match &then_branch[1].kind {
                    StmtKind::Assume(c) => {
                        assert_eq!(print_expr(c), "x <= __bwb_s0 && x <= a");
                    }
                    other => panic!("expected assume, got {other:?}"),
                }
            }
            other => panic!("expected guard chain, got {other:?}"),
        }
        // The final else of the chain is the unmodified original statement.
        let mut cursor = chain;
        loop {
            match &cursor.kind {
                StmtKind::If { else_branch, .. } => {
                    if else_branch.len() == 1 && matches!(else_branch[0].kind, StmtKind::If { .. })
                    {
                        cursor = &else_branch[0];
                    } else {
                        assert!(else_branch[0].struct_eq(&p.body[0]));
                        break;
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn weaken_assign_or_without_self_reference() {
        let p = parse("int x; int y; int z; x = y | z;").unwrap();
        let (out, report) = transform_program(&p, &cfg());
        assert!(report.fired.contains_key("W-Or-Pos"));
        // No snapshot needed: target does not occur in the operands.
        match &out.body[0].kind {
            StmtKind::If { cond, then_branch, .. } => {
                assert_eq!(print_expr(cond), "y >= 0 && z >= 0");
                match &then_branch[1].kind {
                    StmtKind::Assume(c) => assert_eq!(print_expr(c), "x >= y && x >= z"),
                    other => panic!("expected assume, got {other:?}"),
                }
            }
            other => panic!("expected guard chain, got {other:?}"),
        }
    }

    #[test]
    fn non_bitwise_assign_unchanged() {
        let p = parse("int x; int y; int z; x = y + z;").unwrap();
        let (out, report) = transform_program(&p, &cfg());
        assert_eq!(report.total_fired(), 0);
        assert!(stmts_struct_eq(&out.body, &p.body));
    }

    #[test]
    fn weaken_assume_and_pattern() {
        let p = parse("int r; int x; int y; assume(r <= (x & y));").unwrap();
        let (out, report) = transform_program(&p, &cfg());
        assert!(report.fired.contains_key("W-And-Pos"));
        match &out.body[0].kind {
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                assert_eq!(print_expr(cond), "x >= 0 && y >= 0");
                match &then_branch[0].kind {
                    StmtKind::Assume(c) => assert_eq!(print_expr(c), "r <= x && r <= y"),
                    other => panic!("expected assume, got {other:?}"),
                }
                // Final else holds the original assume.
                let mut els = else_branch;
                while els.len() == 1 {
                    if let StmtKind::If { else_branch, .. } = &els[0].kind {
                        els = else_branch;
                    } else {
                        break;
                    }
                }
                assert!(els[0].struct_eq(&p.body[0]));
            }
            other => panic!("expected guard chain, got {other:?}"),
        }
    }

    #[test]
    fn weaken_assume_or_log_bare_pattern() {
        let p = parse("int x; int y; assume((x | y) == 0);").unwrap();
        let (out, report) = transform_program(&p, &cfg());
        assert!(report.fired.contains_key("R-Or-LOG"));
        match &out.body[0].kind {
            StmtKind::If { cond, then_branch, .. } => {
                assert_eq!(
                    print_expr(cond),
                    "(x == 0 || x == 1) && (y == 0 || y == 1)"
                );
                match &then_branch[0].kind {
                    StmtKind::Assume(c) => assert_eq!(print_expr(c), "x == 0 && y == 0"),
                    other => panic!("expected assume, got {other:?}"),
                }
            }
            other => panic!("expected guard chain, got {other:?}"),
        }
    }

    #[test]
    fn plain_assume_unchanged() {
        let p = parse("int x; assume(x > 0);").unwrap();
        let (out, report) = transform_program(&p, &cfg());
        assert_eq!(report.total_fired(), 0);
        assert!(stmts_struct_eq(&out.body, &p.body));
    }

    #[test]
    fn normalize_hoists_nested_bitwise() {
        let p = parse("int x; int y; int z; if ((x & y) < z) { x = 0; }").unwrap();
        let n = normalize_three_address(&p);
        match &n.body[0].kind {
            StmtKind::Assign { target, rhs } => {
                assert_eq!(target, "__bwb_t0");
                assert_eq!(print_expr(rhs), "x & y");
            }
            other => panic!("expected hoist, got {other:?}"),
        }
        match &n.body[1].kind {
            StmtKind::If { cond, .. } => assert_eq!(print_expr(cond), "__bwb_t0 < z"),
            other => panic!("expected if, got {other:?}"),
        }
    }

    #[test]
    fn normalize_keeps_top_level_rhs() {
        let p = parse("int x; int a; while (x > 0) { x = x & a; }").unwrap();
        let n = normalize_three_address(&p);
        assert!(stmts_struct_eq(&n.body, &p.body));
    }

    #[test]
    fn normalize_splits_chained_bitwise_assign() {
        let p = parse("int x; int a; int b; int c; x = (a & b) | c;").unwrap();
        let n = normalize_three_address(&p);
        assert_eq!(n.body.len(), 2);
        match (&n.body[0].kind, &n.body[1].kind) {
            (
                StmtKind::Assign { target: t0, rhs: r0 },
                StmtKind::Assign { target: t1, rhs: r1 },
            ) => {
                assert_eq!(t0, "__bwb_t0");
                assert_eq!(print_expr(r0), "a & b");
                assert_eq!(t1, "x");
                assert_eq!(print_expr(r1), "__bwb_t0 | c");
            }
            other => panic!("unexpected shape {other:?}"),
        }
    }

    #[test]
    fn normalize_while_cond_reevaluates_per_iteration() {
        let p = parse("int x; int y; int z; while ((x & y) < z) { z--; }").unwrap();
        let n = normalize_three_address(&p);
        match &n.body[1].kind {
            StmtKind::While { cond, body } => {
                assert_eq!(print_expr(cond), "__bwb_t0 < z");
                // Last body statement recomputes the temp.
                match &body.last().unwrap().kind {
                    StmtKind::Assign { target, rhs } => {
                        assert_eq!(target, "__bwb_t0");
                        assert_eq!(print_expr(rhs), "x & y");
                    }
                    other => panic!("expected recompute, got {other:?}"),
                }
            }
            other => panic!("expected while, got {other:?}"),
        }
    }

    #[test]
    fn transform_is_idempotent() {
        let src = "int x; int a; int y; int z;\n\
                   x = x & a;\n\
                   y = (x | z) ^ a;\n\
                   assume(y <= (x & z));\n\
                   while (x > 0) { x = x & a; a = a >> 31; }";
        let p = parse(src).unwrap();
        let c = cfg();
        let (t1, r1) = transform_program(&p, &c);
        assert!(r1.total_fired() > 0);
        let (t2, r2) = transform_program(&t1, &c);
        assert_eq!(r2.total_fired(), 0, "second pass fired rules: {:?}", r2.fired);
        assert!(t2.struct_eq(&t1));
    }

    #[test]
    fn rewrite_only_strategy_produces_ternary() {
        let p = parse("int x; int a; x = x & a;").unwrap();
        let c = TransformConfig {
            strategy: Strategy::RewriteOnly,
            ..cfg()
        };
        let (out, report) = transform_program(&p, &c);
        assert!(report.total_fired() > 0);
        match &out.body[0].kind {
            StmtKind::Assign { rhs, .. } => {
                assert!(matches!(rhs, Expr::Ternary { .. }));
            }
            other => panic!("expected assign, got {other:?}"),
        }
    }

    #[test]
    fn report_counts_match_notes() {
        let src = "int x; int a; int y; x = x & a; y = x | a; assume(y <= (x & a));";
        let p = parse(src).unwrap();
        let (out, report) = transform_program(&p, &cfg());
        let printed = crate::parser::print(&out);
        let note_count = printed.matches("// bwb: ").count() as u64;
        assert_eq!(report.total_fired(), note_count);
    }
}
