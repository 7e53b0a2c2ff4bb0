//! Exhaustive fixed-width validity checking for every catalog rule, using a
//! bit-level evaluator kept separate from the interpreter.

use std::fmt;

use rayon::prelude::*;

use crate::ast::{BinOpTag, Expr, MetaVar, UnOpTag};
use crate::rules::{Catalog, Relop, RewriteRule, RuleId, WeakenRule, WeakenShape};

/// A `w`-bit two's-complement value stored as its raw bit pattern. The
/// bitwise operations are computed bit by bit rather than delegated to the
/// interpreter's signed arithmetic, so the two evaluators can cross-check
/// each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bv {
    raw: u64,
    w: u32,
}

impl Bv {
    pub fn from_i64(v: i64, w: u32) -> Bv {
        Bv {
            raw: (v as u64) & Bv::mask(w),
            w,
        }
    }

    fn mask(w: u32) -> u64 {
        debug_assert!(w >= 1 && w < 64);
        (1u64 << w) - 1
    }

    pub fn to_i64(self) -> i64 {
        if (self.raw >> (self.w - 1)) & 1 == 1 {
            (self.raw | !Bv::mask(self.w)) as i64
        } else {
            self.raw as i64
        }
    }

    fn bit(self, i: u32) -> bool {
        (self.raw >> i) & 1 == 1
    }

    fn from_bits(bits: impl Fn(u32) -> bool, w: u32) -> Bv {
        let mut raw = 0u64;
        for i in 0..w {
            if bits(i) {
                raw |= 1u64 << i;
            }
        }
        Bv { raw, w }
    }

    fn and(self, o: Bv) -> Bv {
        Bv::from_bits(|i| self.bit(i) && o.bit(i), self.w)
    }

    fn or(self, o: Bv) -> Bv {
        Bv::from_bits(|i| self.bit(i) || o.bit(i), self.w)
    }

    fn xor(self, o: Bv) -> Bv {
        Bv::from_bits(|i| self.bit(i) != o.bit(i), self.w)
    }

    fn not(self) -> Bv {
        Bv::from_bits(|i| !self.bit(i), self.w)
    }

    fn shl(self, k: u32) -> Bv {
        Bv::from_bits(|i| i >= k && self.bit(i - k), self.w)
    }

    /// Arithmetic shift: vacated high bits copy the sign bit.
    fn ashr(self, k: u32) -> Bv {
        let sign = self.bit(self.w - 1);
        Bv::from_bits(
            |i| {
                if i + k < self.w {
                    self.bit(i + k)
                } else {
                    sign
                }
            },
            self.w,
        )
    }

    fn add(self, o: Bv) -> Bv {
        Bv {
            raw: self.raw.wrapping_add(o.raw) & Bv::mask(self.w),
            w: self.w,
        }
    }

    fn sub(self, o: Bv) -> Bv {
        Bv {
            raw: self.raw.wrapping_sub(o.raw) & Bv::mask(self.w),
            w: self.w,
        }
    }

    fn mul(self, o: Bv) -> Bv {
        Bv {
            raw: self.raw.wrapping_mul(o.raw) & Bv::mask(self.w),
            w: self.w,
        }
    }

    fn neg(self) -> Bv {
        Bv::from_i64(0, self.w).sub(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BvFault {
    DivByZero,
    ShiftRange,
}

/// Metavariable valuation for an obligation check.
#[derive(Debug, Clone, Copy, Default)]
struct MEnv {
    e1: Option<i64>,
    e2: Option<i64>,
    r: Option<i64>,
}

impl MEnv {
    fn get(&self, m: MetaVar) -> Option<i64> {
        match m {
            MetaVar::E1 => self.e1,
            MetaVar::E2 => self.e2,
            MetaVar::R => self.r,
        }
    }
}

fn beval(e: &Expr, env: &MEnv, w: u32) -> Result<Bv, BvFault> {
    match e {
        Expr::IntLit(v) => Ok(Bv::from_i64(*v, w)),
        Expr::Meta(m) => Ok(Bv::from_i64(
            env.get(*m).expect("metavariable bound in obligation"),
            w,
        )),
        Expr::Var(_) | Expr::Nondet => {
            unreachable!("rule patterns contain only metavariables and literals")
        }
        Expr::Unary { op, operand } => {
            let v = beval(operand, env, w)?;
            Ok(match op {
                UnOpTag::Neg => v.neg(),
                UnOpTag::BitNot => v.not(),
                UnOpTag::LogNot => Bv::from_i64((v.to_i64() == 0) as i64, w),
            })
        }
        Expr::Binary { op, left, right } => {
            // Logical connectives short-circuit.
            match op {
                BinOpTag::LogAnd => {
                    let l = beval(left, env, w)?;
                    if l.to_i64() == 0 {
                        return Ok(Bv::from_i64(0, w));
                    }
                    let r = beval(right, env, w)?;
                    return Ok(Bv::from_i64((r.to_i64() != 0) as i64, w));
                }
                BinOpTag::LogOr => {
                    let l = beval(left, env, w)?;
                    if l.to_i64() != 0 {
                        return Ok(Bv::from_i64(1, w));
                    }
                    let r = beval(right, env, w)?;
                    return Ok(Bv::from_i64((r.to_i64() != 0) as i64, w));
                }
                _ => {}
            }
            let l = beval(left, env, w)?;
            let r = beval(right, env, w)?;
            let bool_of = |b: bool| Bv::from_i64(b as i64, w);
            Ok(match op {
                BinOpTag::Add => l.add(r),
                BinOpTag::Sub => l.sub(r),
                BinOpTag::Mul => l.mul(r),
                BinOpTag::Div => {
                    if r.to_i64() == 0 {
                        return Err(BvFault::DivByZero);
                    }
                    Bv::from_i64((l.to_i64() as i128 / r.to_i64() as i128) as i64, w)
                }
                BinOpTag::Mod => {
                    if r.to_i64() == 0 {
                        return Err(BvFault::DivByZero);
                    }
                    Bv::from_i64((l.to_i64() as i128 % r.to_i64() as i128) as i64, w)
                }
                BinOpTag::BitAnd => l.and(r),
                BinOpTag::BitOr => l.or(r),
                BinOpTag::BitXor => l.xor(r),
                BinOpTag::Shl | BinOpTag::Shr => {
                    let k = r.to_i64();
                    if k < 0 || k >= w as i64 {
                        return Err(BvFault::ShiftRange);
                    }
                    if *op == BinOpTag::Shl {
                        l.shl(k as u32)
                    } else {
                        l.ashr(k as u32)
                    }
                }
                BinOpTag::Lt => bool_of(l.to_i64() < r.to_i64()),
                BinOpTag::Le => bool_of(l.to_i64() <= r.to_i64()),
                BinOpTag::Gt => bool_of(l.to_i64() > r.to_i64()),
                BinOpTag::Ge => bool_of(l.to_i64() >= r.to_i64()),
                BinOpTag::Eq => bool_of(l.to_i64() == r.to_i64()),
                BinOpTag::Ne => bool_of(l.to_i64() != r.to_i64()),
                BinOpTag::LogAnd | BinOpTag::LogOr => unreachable!(),
            })
        }
        Expr::Ternary {
            cond,
            then_branch,
            else_branch,
            ..
        } => {
            if beval(cond, env, w)?.to_i64() != 0 {
                beval(then_branch, env, w)
            } else {
                beval(else_branch, env, w)
            }
        }
    }
}

fn beval_bool(e: &Expr, env: &MEnv, w: u32) -> Result<bool, BvFault> {
    Ok(beval(e, env, w)?.to_i64() != 0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail { cex: Vec<(&'static str, i64)> },
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub rule: RuleId,
    /// Relational operator the obligation was checked under, `":="` for the
    /// assignment form, `"bare"` for whole-condition patterns, `"expr"` for
    /// rewriting rules.
    pub relop: &'static str,
    pub width: u32,
    pub status: Status,
    /// Valuations on which the implication premise held and the conclusion
    /// was actually tested.
    pub checked: u64,
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self.status, Status::Pass)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RULE={} VARIANT={} RELOP={} W={}",
            self.rule.name, self.rule.variant, self.relop, self.width
        )?;
        match &self.status {
            Status::Pass => write!(f, " STATUS=pass")?,
            Status::Fail { cex } => {
                write!(f, " STATUS=fail CEX")?;
                for (name, v) in cex {
                    write!(f, " {name}={v}")?;
                }
            }
        }
        write!(f, " N={}", self.checked)
    }
}

fn range(w: u32) -> std::ops::RangeInclusive<i64> {
    let half = 1i64 << (w - 1);
    -half..=half - 1
}

/// Number of free values enumerated for a rule's obligation (used to decide
/// which widths are feasible).
pub fn rewrite_var_count(rule: &RewriteRule) -> usize {
    rule.source.metavars().len()
}

pub fn weaken_var_count(rule: &WeakenRule, relop: Option<Relop>) -> usize {
    let base = match &rule.shape {
        WeakenShape::Rel { subject, .. } => subject.metavars().len(),
        WeakenShape::Bare { pattern } => pattern.metavars().len(),
    };
    match relop {
        Some(Relop::Assign) | None => base,
        Some(_) => base + 1,
    }
}

/// Checks `guard(e) ==> source(e) == replacement(e)` over all valuations.
pub fn check_rewrite_rule(rule: &RewriteRule, w: u32) -> Verdict {
    let vars = rule.source.metavars();
    let mut checked = 0u64;
    let mut run = |env: &MEnv| -> Option<Vec<(&'static str, i64)>> {
        match beval_bool(&rule.guard, env, w) {
            Ok(true) => {}
            _ => return None,
        }
        let lhs = beval(&rule.source, env, w);
        let rhs = beval(&rule.replacement, env, w);
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => {
                checked += 1;
                if l.to_i64() != r.to_i64() {
                    let mut cex = Vec::new();
                    if let Some(v) = env.e1 {
                        cex.push(("e1", v));
                    }
                    if let Some(v) = env.e2 {
                        cex.push(("e2", v));
                    }
                    return Some(cex);
                }
                None
            }
            // A faulting valuation (division by zero, shift out of range)
            // is outside both semantics and carries no obligation.
            _ => None,
        }
    };
    let two_vars = vars.contains(&MetaVar::E2);
    let mut fail = None;
    'outer: for a in range(w) {
        let e2s: Vec<Option<i64>> = if two_vars {
            range(w).map(Some).collect()
        } else {
            vec![None]
        };
        for b in e2s {
            let env = MEnv {
                e1: Some(a),
                e2: b,
                r: None,
            };
            if let Some(cex) = run(&env) {
                fail = Some(cex);
                break 'outer;
            }
        }
    }
    Verdict {
        rule: rule.id.clone(),
        relop: "expr",
        width: w,
        status: match fail {
            Some(cex) => Status::Fail { cex },
            None => Status::Pass,
        },
        checked,
    }
}

/// Checks a weakening rule's obligation at width `w`:
/// - relational form: `guard /\ (r rho exact) ==> replacement`,
/// - assignment form: `guard ==> replacement[r := exact]`,
/// - bare form: `guard /\ pattern ==> replacement`.
pub fn check_weaken_rule(rule: &WeakenRule, relop: Option<Relop>, w: u32) -> Verdict {
    let (subject, bare_pattern, mirrored) = match &rule.shape {
        WeakenShape::Rel { subject, mirrored } => (Some(subject), None, *mirrored),
        WeakenShape::Bare { pattern } => (None, Some(pattern), false),
    };
    let pattern_vars = match (&subject, &bare_pattern) {
        (Some(s), _) => s.metavars(),
        (_, Some(p)) => p.metavars(),
        _ => unreachable!(),
    };
    let two_vars = pattern_vars.contains(&MetaVar::E2);
    let needs_r = !matches!(relop, Some(Relop::Assign) | None);

    let mut checked = 0u64;
    let mut fail: Option<Vec<(&'static str, i64)>> = None;
    'outer: for a in range(w) {
        let e2s: Vec<Option<i64>> = if two_vars {
            range(w).map(Some).collect()
        } else {
            vec![None]
        };
        for b in e2s {
            let rs: Vec<Option<i64>> = if needs_r {
                range(w).map(Some).collect()
            } else {
                vec![None]
            };
            for r in rs {
                let env = MEnv {
                    e1: Some(a),
                    e2: b,
                    r,
                };
                if !matches!(beval_bool(&rule.guard, &env, w), Ok(true)) {
                    continue;
                }
                let premise_and_conclusion = || -> Result<Option<bool>, BvFault> {
                    match (relop, subject, bare_pattern) {
                        (Some(Relop::Assign), Some(subject), _) => {
                            // r is the exact value; no extra premise.
                            let exact = beval(subject, &env, w)?;
                            let env = MEnv {
                                r: Some(exact.to_i64()),
                                ..env
                            };
                            Ok(Some(beval_bool(&rule.replacement, &env, w)?))
                        }
                        (Some(rho), Some(subject), _) => {
                            let exact = beval(subject, &env, w)?;
                            let rv = env.r.expect("r enumerated");
                            let op = rho.as_binop().expect("non-assign relop");
                            // Mirrored rules store the comparator of the
                            // `subject OP r` form, so the premise flips sides.
                            let (lhs, rhs) = if mirrored {
                                (exact.to_i64(), rv)
                            } else {
                                (rv, exact.to_i64())
                            };
                            let holds = match op {
                                BinOpTag::Lt => lhs < rhs,
                                BinOpTag::Le => lhs <= rhs,
                                BinOpTag::Gt => lhs > rhs,
                                BinOpTag::Ge => lhs >= rhs,
                                BinOpTag::Eq => lhs == rhs,
                                _ => unreachable!(),
                            };
                            if !holds {
                                return Ok(None);
                            }
                            Ok(Some(beval_bool(&rule.replacement, &env, w)?))
                        }
                        (None, _, Some(pattern)) => {
                            if !beval_bool(pattern, &env, w)? {
                                return Ok(None);
                            }
                            Ok(Some(beval_bool(&rule.replacement, &env, w)?))
                        }
                        _ => unreachable!(),
                    }
                };
                match premise_and_conclusion() {
                    Ok(Some(conclusion)) => {
                        checked += 1;
                        if !conclusion {
                            let mut cex = Vec::new();
                            cex.push(("e1", a));
                            if let Some(v) = b {
                                cex.push(("e2", v));
                            }
                            if let Some(v) = r {
                                cex.push(("r", v));
                            }
                            fail = Some(cex);
                            break 'outer;
                        }
                    }
                    // Premise false or faulting valuation: no obligation.
                    _ => {}
                }
            }
        }
    }
    Verdict {
        rule: rule.id.clone(),
        relop: match relop {
            Some(Relop::Assign) => ":=",
            Some(rho) => rho.symbol(),
            None => "bare",
        },
        width: w,
        status: match fail {
            Some(cex) => Status::Fail { cex },
            None => Status::Pass,
        },
        checked,
    }
}

/// Which widths each obligation is enumerated at.
#[derive(Debug, Clone)]
pub struct CheckPlan {
    /// Widths at which every obligation is enumerated.
    pub small_widths: Vec<u32>,
    /// An extra width applied only to obligations with at most
    /// `wide_max_vars` enumerated values.
    pub wide_width: Option<u32>,
    pub wide_max_vars: usize,
}

impl Default for CheckPlan {
    fn default() -> Self {
        CheckPlan {
            small_widths: vec![4, 6],
            wide_width: Some(8),
            wide_max_vars: 2,
        }
    }
}

enum Job<'a> {
    Rewrite(&'a RewriteRule, u32),
    Weaken(&'a WeakenRule, Option<Relop>, u32),
}

fn weaken_checks(rule: &WeakenRule) -> Vec<Option<Relop>> {
    if rule.relops.is_empty() {
        vec![None]
    } else {
        rule.relops.iter().copied().map(Some).collect()
    }
}

/// Runs every obligation in `catalogs` (one catalog per width in the plan)
/// in parallel, returning verdicts in deterministic catalog order.
pub fn check_catalog_with(plan: &CheckPlan, catalog_for: impl Fn(u32) -> Catalog) -> Vec<Verdict> {
    let mut widths = plan.small_widths.clone();
    if let Some(w) = plan.wide_width {
        widths.push(w);
    }
    let catalogs: Vec<(u32, Catalog)> = widths.iter().map(|&w| (w, catalog_for(w))).collect();
    let mut jobs: Vec<Job<'_>> = Vec::new();
    for (w, cat) in &catalogs {
        let wide = Some(*w) == plan.wide_width;
        for rule in &cat.rewrite {
            if wide && rewrite_var_count(rule) > plan.wide_max_vars {
                continue;
            }
            jobs.push(Job::Rewrite(rule, *w));
        }
        for rule in &cat.weaken {
            for relop in weaken_checks(rule) {
                if wide && weaken_var_count(rule, relop) > plan.wide_max_vars {
                    continue;
                }
                jobs.push(Job::Weaken(rule, relop, *w));
            }
        }
    }
    jobs.par_iter()
        .map(|job| match job {
            Job::Rewrite(rule, w) => check_rewrite_rule(rule, *w),
            Job::Weaken(rule, relop, w) => check_weaken_rule(rule, *relop, *w),
        })
        .collect()
}

/// Checks the full catalog with the default plan.
pub fn check_all(plan: &CheckPlan) -> Vec<Verdict> {
    check_catalog_with(plan, Catalog::for_width)
}

// --- deliberate rule mutations ---

/// A named, deliberately unsound edit to a catalog rule, kept checked in so
/// the oracle's ability to catch bad rules is itself tested.
#[derive(Clone, Copy)]
pub struct Mutation {
    pub name: &'static str,
    /// Rule name the edit applies to (all commutative/mirror variants).
    pub target: &'static str,
    edit: fn(&mut RewriteRule) -> bool,
    edit_weaken: fn(&mut WeakenRule) -> bool,
}

fn no_rewrite_edit(_: &mut RewriteRule) -> bool {
    false
}

fn no_weaken_edit(_: &mut WeakenRule) -> bool {
    false
}

fn flip_relops(e: &Expr) -> Expr {
    match e {
        Expr::Binary { op, left, right } => {
            let op = match op {
                BinOpTag::Le => BinOpTag::Ge,
                BinOpTag::Ge => BinOpTag::Le,
                BinOpTag::Lt => BinOpTag::Gt,
                BinOpTag::Gt => BinOpTag::Lt,
                other => *other,
            };
            Expr::binary(op, flip_relops(left), flip_relops(right))
        }
        other => other.clone(),
    }
}

fn tighten_relops(e: &Expr) -> Expr {
    match e {
        Expr::Binary { op, left, right } => {
            let op = match op {
                BinOpTag::Ge => BinOpTag::Gt,
                BinOpTag::Le => BinOpTag::Lt,
                other => *other,
            };
            Expr::binary(op, tighten_relops(left), tighten_relops(right))
        }
        other => other.clone(),
    }
}

pub fn mutations() -> Vec<Mutation> {
    vec![
        // Drops the sign guard: `e1 & 1 ~> e1 % 2` is wrong for negative e1
        // because `%` truncates toward zero.
        Mutation {
            name: "R-And-LBS:drop-guard",
            target: "R-And-LBS",
            edit: |r| {
                r.guard = Expr::lit(1);
                true
            },
            edit_weaken: no_weaken_edit,
        },
        // Keeps only the second conjunct of the guard, so the rule claims
        // `e1 & 1 == e1` for arbitrary e1.
        Mutation {
            name: "R-And-1:widen-guard",
            target: "R-And-1",
            edit: |r| {
                if let Expr::Binary {
                    op: BinOpTag::LogAnd,
                    right,
                    ..
                } = &r.guard
                {
                    r.guard = (**right).clone();
                    true
                } else {
                    false
                }
            },
            edit_weaken: no_weaken_edit,
        },
        // Flips the bound direction: claims `r >= e1 && r >= e2` for a
        // conjunction of non-negative operands.
        Mutation {
            name: "W-And-Pos:flip-relop",
            target: "W-And-Pos",
            edit: no_rewrite_edit,
            edit_weaken: |r| {
                r.replacement = flip_relops(&r.replacement);
                true
            },
        },
        // Makes the lower bound strict: `e1 | e2 > e1` fails whenever the
        // second operand adds no bits.
        Mutation {
            name: "W-Or-Pos:tighten-bound",
            target: "W-Or-Pos",
            edit: no_rewrite_edit,
            edit_weaken: |r| {
                r.replacement = tighten_relops(&r.replacement);
                true
            },
        },
        // Tightens `r < 0` to `r < -1`: wrong at e1 = 0 where ~e1 = -1.
        Mutation {
            name: "W-Cpl-Pos:tighten-bound",
            target: "W-Cpl-Pos",
            edit: no_rewrite_edit,
            edit_weaken: |r| {
                if let Expr::Binary {
                    op: BinOpTag::Lt,
                    left,
                    right,
                } = &r.replacement
                {
                    if matches!(**right, Expr::IntLit(0)) {
                        r.replacement =
                            Expr::binary(BinOpTag::Lt, (**left).clone(), Expr::lit(-1));
                        return true;
                    }
                }
                false
            },
        },
    ]
}

/// Applies a mutation to every variant of its target rule; panics if the
/// mutation no longer matches the catalog (a drifted rule definition).
pub fn apply_mutation(cat: &mut Catalog, m: &Mutation) {
    let mut hit = false;
    for rule in &mut cat.rewrite {
        if rule.id.name == m.target {
            hit |= (m.edit)(rule);
        }
    }
    for rule in &mut cat.weaken {
        if rule.id.name == m.target {
            hit |= (m.edit_weaken)(rule);
        }
    }
    assert!(hit, "mutation {} matched no rule", m.name);
}

pub fn mutated_catalog(name: &str, width: u32) -> Option<Catalog> {
    let m = mutations().into_iter().find(|m| m.name == name)?;
    let mut cat = Catalog::for_width(width);
    apply_mutation(&mut cat, &m);
    Some(cat)
}
