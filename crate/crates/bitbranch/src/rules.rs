//! The rule catalog: guarded rewriting rules for bitwise arithmetic
//! expressions and weakening rules for relational expressions and
//! assignments, expanded with their commutative closure.

use std::fmt;

use crate::ast::{BinOpTag, Expr, MetaVar, Substitution, UnOpTag};
use crate::interp::const_fold;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleId {
    pub name: &'static str,
    /// 0 is the rule as printed in the catalog; higher indices are
    /// commutative/mirror variants.
    pub variant: u32,
}

impl RuleId {
    pub fn base(name: &'static str) -> RuleId {
        RuleId { name, variant: 0 }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.variant == 0 {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}@{}", self.name, self.variant)
        }
    }
}

/// Relational operators a weakening rule admits. `Assign` stands for the
/// figure's `:=` and is admitted only against assignment statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relop {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Assign,
}

impl Relop {
    pub fn as_binop(self) -> Option<BinOpTag> {
        match self {
            Relop::Lt => Some(BinOpTag::Lt),
            Relop::Le => Some(BinOpTag::Le),
            Relop::Gt => Some(BinOpTag::Gt),
            Relop::Ge => Some(BinOpTag::Ge),
            Relop::Eq => Some(BinOpTag::Eq),
            Relop::Assign => None,
        }
    }

    fn mirror(self) -> Option<Relop> {
        match self {
            Relop::Lt => Some(Relop::Gt),
            Relop::Le => Some(Relop::Ge),
            Relop::Gt => Some(Relop::Lt),
            Relop::Ge => Some(Relop::Le),
            Relop::Eq => Some(Relop::Eq),
            Relop::Assign => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relop::Lt => "<",
            Relop::Le => "<=",
            Relop::Gt => ">",
            Relop::Ge => ">=",
            Relop::Eq => "==",
            Relop::Assign => ":=",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RewriteRule {
    pub id: RuleId,
    pub guard: Expr,
    pub source: Expr,
    pub replacement: Expr,
}

impl RewriteRule {
    pub fn try_match(&self, subject: &Expr) -> Option<Substitution> {
        match_expr(&self.source, subject)
    }
}

/// Shape of a weakening rule's source.
#[derive(Debug, Clone)]
pub enum WeakenShape {
    /// `r OP subject` (or `subject OP r` when mirrored), subject being the
    /// bitwise expression pattern.
    Rel { subject: Expr, mirrored: bool },
    /// A complete condition pattern such as `(e1 | e2) == 0`.
    Bare { pattern: Expr },
}

#[derive(Debug, Clone)]
pub struct WeakenRule {
    pub id: RuleId,
    pub guard: Expr,
    /// Metavariables that must constant-fold for the rule to apply.
    pub side_const: Vec<MetaVar>,
    pub relops: Vec<Relop>,
    pub shape: WeakenShape,
    pub replacement: Expr,
}

impl WeakenRule {
    pub fn admits_assign(&self) -> bool {
        self.relops.contains(&Relop::Assign)
    }

    fn side_const_ok(&self, delta: &Substitution, width: u32) -> bool {
        self.side_const.iter().all(|m| {
            delta
                .get(*m)
                .map(|e| const_fold(e, width).is_some())
                .unwrap_or(false)
        })
    }

    /// Matches `target := rhs` against this rule's source.
    pub fn match_assign(&self, target: &str, rhs: &Expr, width: u32) -> Option<Substitution> {
        if !self.admits_assign() {
            return None;
        }
        let subject = match &self.shape {
            WeakenShape::Rel {
                subject,
                mirrored: false,
            } => subject,
            _ => return None,
        };
        let mut delta = match_expr(subject, rhs)?;
        if !self.side_const_ok(&delta, width) {
            return None;
        }
        delta.bind(MetaVar::R, Expr::var(target));
        Some(delta)
    }

    /// Matches a condition expression against this rule's source, honoring
    /// the admitted relational operators.
    pub fn match_cond(&self, cond: &Expr, width: u32) -> Option<Substitution> {
        match &self.shape {
            WeakenShape::Bare { pattern } => {
                let delta = match_expr(pattern, cond)?;
                if self.side_const_ok(&delta, width) {
                    Some(delta)
                } else {
                    None
                }
            }
            WeakenShape::Rel { subject, mirrored } => {
                let (op, left, right) = match cond {
                    Expr::Binary { op, left, right } if op.is_relational() => (op, left, right),
                    _ => return None,
                };
                let admitted = self
                    .relops
                    .iter()
                    .any(|r| r.as_binop() == Some(*op));
                if !admitted {
                    return None;
                }
                let (r_side, subj_side) = if *mirrored {
                    (right, left)
                } else {
                    (left, right)
                };
                let mut delta = match_expr(subject, subj_side)?;
                if !self.side_const_ok(&delta, width) {
                    return None;
                }
                if !delta.unify(MetaVar::R, r_side) {
                    return None;
                }
                Some(delta)
            }
        }
    }
}

/// Purely structural matching: metavariables match any expression
/// (consistently), literals match only equal literals.
pub fn match_expr(pattern: &Expr, subject: &Expr) -> Option<Substitution> {
    let mut delta = Substitution::new();
    if match_into(pattern, subject, &mut delta) {
        Some(delta)
    } else {
        None
    }
}

fn match_into(pattern: &Expr, subject: &Expr, delta: &mut Substitution) -> bool {
    match (pattern, subject) {
        (Expr::Meta(m), s) => delta.unify(*m, s),
        (Expr::IntLit(a), Expr::IntLit(b)) => a == b,
        (Expr::Var(a), Expr::Var(b)) => a == b,
        (Expr::Nondet, Expr::Nondet) => true,
        (
            Expr::Unary { op: oa, operand: a },
            Expr::Unary { op: ob, operand: b },
        ) => oa == ob && match_into(a, b, delta),
        (
            Expr::Binary {
                op: oa,
                left: la,
                right: ra,
            },
            Expr::Binary {
                op: ob,
                left: lb,
                right: rb,
            },
        ) => oa == ob && match_into(la, lb, delta) && match_into(ra, rb, delta),
        (
            Expr::Ternary {
                cond: ca,
                then_branch: ta,
                else_branch: ea,
                ..
            },
            Expr::Ternary {
                cond: cb,
                then_branch: tb,
                else_branch: eb,
                ..
            },
        ) => {
            match_into(ca, cb, delta) && match_into(ta, tb, delta) && match_into(ea, eb, delta)
        }
        _ => false,
    }
}

#[derive(Debug, Clone)]
pub struct Catalog {
    pub width: u32,
    pub rewrite: Vec<RewriteRule>,
    pub weaken: Vec<WeakenRule>,
}

// --- pattern construction helpers ---

fn e1() -> Expr {
    Expr::meta(MetaVar::E1)
}

fn e2() -> Expr {
    Expr::meta(MetaVar::E2)
}

fn r() -> Expr {
    Expr::meta(MetaVar::R)
}

fn bin(op: BinOpTag, l: Expr, rr: Expr) -> Expr {
    Expr::binary(op, l, rr)
}

fn ge0(e: Expr) -> Expr {
    bin(BinOpTag::Ge, e, Expr::lit(0))
}

fn lt0(e: Expr) -> Expr {
    bin(BinOpTag::Lt, e, Expr::lit(0))
}

fn eq(e: Expr, v: i64) -> Expr {
    bin(BinOpTag::Eq, e, Expr::lit(v))
}

fn is01(e: Expr) -> Expr {
    Expr::lor(eq(e.clone(), 0), eq(e, 1))
}

/// Swaps metavariables e1 and e2 throughout a pattern.
fn swap_metas(e: &Expr) -> Expr {
    match e {
        Expr::Meta(MetaVar::E1) => e2(),
        Expr::Meta(MetaVar::E2) => e1(),
        Expr::Unary { op, operand } => Expr::unary(*op, swap_metas(operand)),
        Expr::Binary { op, left, right } => {
            Expr::binary(*op, swap_metas(left), swap_metas(right))
        }
        Expr::Ternary {
            cond,
            then_branch,
            else_branch,
            generated,
        } => Expr::ternary(
            swap_metas(cond),
            swap_metas(then_branch),
            swap_metas(else_branch),
            *generated,
        ),
        other => other.clone(),
    }
}

/// Equality modulo commutativity of `&&` and `||` (used only to recognize
/// fully symmetric rules whose operand swap adds nothing).
fn ac_eq(a: &Expr, b: &Expr) -> bool {
    match (a, b) {
        (
            Expr::Binary { op: oa, .. },
            Expr::Binary { op: ob, .. },
        ) if oa == ob && matches!(oa, BinOpTag::LogAnd | BinOpTag::LogOr) => {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            flatten(a, *oa, &mut xs);
            flatten(b, *oa, &mut ys);
            if xs.len() != ys.len() {
                return false;
            }
            let mut used = vec![false; ys.len()];
            xs.iter().all(|x| {
                ys.iter().enumerate().any(|(i, y)| {
                    if !used[i] && ac_eq(x, y) {
                        used[i] = true;
                        true
                    } else {
                        false
                    }
                })
            })
        }
        (
            Expr::Unary { op: oa, operand: ua },
            Expr::Unary { op: ob, operand: ub },
        ) => oa == ob && ac_eq(ua, ub),
        (
            Expr::Binary {
                op: oa,
                left: la,
                right: ra,
            },
            Expr::Binary {
                op: ob,
                left: lb,
                right: rb,
            },
        ) => oa == ob && ac_eq(la, lb) && ac_eq(ra, rb),
        _ => a.struct_eq(b),
    }
}

fn flatten<'a>(e: &'a Expr, op: BinOpTag, out: &mut Vec<&'a Expr>) {
    match e {
        Expr::Binary {
            op: o,
            left,
            right,
        } if *o == op => {
            flatten(left, op, out);
            flatten(right, op, out);
        }
        other => out.push(other),
    }
}

#[derive(Clone, Copy)]
enum RelopClass {
    OpLe,
    OpGe,
    OpEq,
}

impl RelopClass {
    fn relops(self) -> Vec<Relop> {
        match self {
            RelopClass::OpLe => vec![Relop::Lt, Relop::Le, Relop::Eq, Relop::Assign],
            RelopClass::OpGe => vec![Relop::Gt, Relop::Ge, Relop::Eq, Relop::Assign],
            RelopClass::OpEq => vec![Relop::Eq, Relop::Assign],
        }
    }
}

fn mirror_relops(relops: &[Relop]) -> Vec<Relop> {
    relops.iter().filter_map(|r| r.mirror()).collect()
}

struct RewriteRow {
    name: &'static str,
    guard: Expr,
    source: Expr,
    replacement: Expr,
    commutative: bool,
}

struct WeakenRow {
    name: &'static str,
    guard: Expr,
    side_const: Vec<MetaVar>,
    class: Option<RelopClass>,
    /// Bitwise side pattern for relational rows, full pattern for bare rows.
    subject: Expr,
    bare: bool,
    replacement: Expr,
    commutative: bool,
}

fn rewrite_rows(width: u32) -> Vec<RewriteRow> {
    use BinOpTag::{BitAnd, BitOr, BitXor, LogAnd, Mod, Shr};
    let top = Expr::lit(i64::from(width) - 1);
    vec![
        RewriteRow {
            name: "R-And-0",
            guard: eq(e1(), 0),
            source: bin(BitAnd, e1(), e2()),
            replacement: Expr::lit(0),
            commutative: true,
        },
        RewriteRow {
            name: "R-And-1",
            guard: Expr::land(is01(e1()), eq(e2(), 1)),
            source: bin(BitAnd, e1(), e2()),
            replacement: e1(),
            commutative: true,
        },
        RewriteRow {
            name: "R-And-LOG",
            guard: Expr::land(is01(e1()), is01(e2())),
            source: bin(BitAnd, e1(), e2()),
            replacement: bin(LogAnd, e1(), e2()),
            commutative: true,
        },
        RewriteRow {
            name: "R-And-LBS",
            guard: Expr::land(ge0(e1()), eq(e2(), 1)),
            source: bin(BitAnd, e1(), e2()),
            replacement: bin(Mod, e1(), Expr::lit(2)),
            commutative: true,
        },
        RewriteRow {
            name: "R-Or-0",
            guard: eq(e2(), 0),
            source: bin(BitOr, e1(), e2()),
            replacement: e1(),
            commutative: true,
        },
        RewriteRow {
            name: "R-Or-1",
            guard: Expr::land(is01(e1()), eq(e2(), 1)),
            source: bin(BitOr, e1(), e2()),
            replacement: Expr::lit(1),
            commutative: true,
        },
        RewriteRow {
            name: "R-Xor-0",
            guard: eq(e2(), 0),
            source: bin(BitXor, e1(), e2()),
            replacement: e1(),
            commutative: true,
        },
        RewriteRow {
            name: "R-Xor-Eq",
            guard: Expr::lor(
                Expr::land(eq(e1(), 0), eq(e2(), 0)),
                Expr::land(eq(e1(), 1), eq(e2(), 1)),
            ),
            source: bin(BitXor, e1(), e2()),
            replacement: Expr::lit(0),
            commutative: true,
        },
        RewriteRow {
            name: "R-Xor-Neq",
            guard: Expr::lor(
                Expr::land(eq(e1(), 1), eq(e2(), 0)),
                Expr::land(eq(e1(), 0), eq(e2(), 1)),
            ),
            source: bin(BitXor, e1(), e2()),
            replacement: Expr::lit(1),
            commutative: true,
        },
        // CHAR_BIT * sizeof(e1) - 1 resolves to width - 1.
        RewriteRow {
            name: "R-RightShift-Pos",
            guard: ge0(e1()),
            source: bin(Shr, e1(), top.clone()),
            replacement: Expr::lit(0),
            commutative: false,
        },
        RewriteRow {
            name: "R-RightShift-Neg",
            guard: lt0(e1()),
            source: bin(Shr, e1(), top),
            replacement: Expr::lit(-1),
            commutative: false,
        },
    ]
}

fn weaken_rows() -> Vec<WeakenRow> {
    use BinOpTag::{BitAnd, BitOr, BitXor, Eq as EqOp, Ge, Le};
    let and_subj = bin(BitAnd, e1(), e2());
    let or_subj = bin(BitOr, e1(), e2());
    let xor_subj = bin(BitXor, e1(), e2());
    let cpl_subj = Expr::unary(UnOpTag::BitNot, e1());
    vec![
        WeakenRow {
            name: "W-And-Pos",
            guard: Expr::land(ge0(e1()), ge0(e2())),
            side_const: vec![],
            class: Some(RelopClass::OpLe),
            subject: and_subj.clone(),
            bare: false,
            replacement: Expr::land(bin(Le, r(), e1()), bin(Le, r(), e2())),
            commutative: true,
        },
        WeakenRow {
            name: "W-And-Neg",
            guard: Expr::land(lt0(e1()), lt0(e2())),
            side_const: vec![],
            class: Some(RelopClass::OpLe),
            subject: and_subj.clone(),
            bare: false,
            replacement: Expr::land(
                Expr::land(bin(Le, r(), e1()), bin(Le, r(), e2())),
                lt0(r()),
            ),
            commutative: true,
        },
        WeakenRow {
            name: "W-And-Mix",
            guard: Expr::land(ge0(e1()), lt0(e2())),
            side_const: vec![],
            class: Some(RelopClass::OpEq),
            subject: and_subj,
            bare: false,
            replacement: Expr::land(bin(Le, Expr::lit(0), r()), bin(Le, r(), e1())),
            commutative: true,
        },
        WeakenRow {
            name: "R-Or-LOG",
            guard: Expr::land(is01(e1()), is01(e2())),
            side_const: vec![],
            class: None,
            subject: bin(EqOp, bin(BitOr, e1(), e2()), Expr::lit(0)),
            bare: true,
            replacement: Expr::land(eq(e1(), 0), eq(e2(), 0)),
            commutative: true,
        },
        WeakenRow {
            name: "W-Or-Const",
            guard: ge0(e1()),
            side_const: vec![MetaVar::E2],
            class: Some(RelopClass::OpGe),
            subject: or_subj.clone(),
            bare: false,
            replacement: bin(Ge, r(), e2()),
            commutative: true,
        },
        WeakenRow {
            name: "W-Or-Pos",
            guard: Expr::land(ge0(e1()), ge0(e2())),
            side_const: vec![],
            class: Some(RelopClass::OpGe),
            subject: or_subj.clone(),
            bare: false,
            replacement: Expr::land(bin(Ge, r(), e1()), bin(Ge, r(), e2())),
            commutative: true,
        },
        WeakenRow {
            name: "W-Or-Neg",
            guard: Expr::land(lt0(e1()), lt0(e2())),
            side_const: vec![],
            class: Some(RelopClass::OpEq),
            subject: or_subj.clone(),
            bare: false,
            replacement: Expr::land(
                Expr::land(bin(Ge, r(), e1()), bin(Ge, r(), e2())),
                lt0(r()),
            ),
            commutative: true,
        },
        WeakenRow {
            name: "W-Or-Mix",
            guard: Expr::land(ge0(e1()), lt0(e2())),
            side_const: vec![],
            class: Some(RelopClass::OpEq),
            subject: or_subj,
            bare: false,
            replacement: Expr::land(bin(Le, e2(), r()), lt0(r())),
            commutative: true,
        },
        WeakenRow {
            name: "W-XOr-Pos",
            guard: Expr::land(ge0(e1()), ge0(e2())),
            side_const: vec![],
            class: Some(RelopClass::OpGe),
            subject: xor_subj.clone(),
            bare: false,
            replacement: ge0(r()),
            commutative: true,
        },
        WeakenRow {
            name: "W-XOr-Neg",
            guard: Expr::land(lt0(e1()), lt0(e2())),
            side_const: vec![],
            class: Some(RelopClass::OpGe),
            subject: xor_subj.clone(),
            bare: false,
            replacement: ge0(r()),
            commutative: true,
        },
        WeakenRow {
            name: "W-XOr-Mix",
            guard: Expr::land(ge0(e1()), lt0(e2())),
            side_const: vec![],
            class: Some(RelopClass::OpLe),
            subject: xor_subj,
            bare: false,
            replacement: lt0(r()),
            commutative: true,
        },
        WeakenRow {
            name: "W-Cpl-Pos",
            guard: ge0(e1()),
            side_const: vec![],
            class: Some(RelopClass::OpLe),
            subject: cpl_subj.clone(),
            bare: false,
            replacement: lt0(r()),
            commutative: false,
        },
        WeakenRow {
            name: "W-Cpl-Neg",
            guard: lt0(e1()),
            side_const: vec![],
            class: Some(RelopClass::OpGe),
            subject: cpl_subj,
            bare: false,
            replacement: ge0(r()),
            commutative: false,
        },
    ]
}

fn swap_consts(side: &[MetaVar]) -> Vec<MetaVar> {
    side.iter()
        .map(|m| match m {
            MetaVar::E1 => MetaVar::E2,
            MetaVar::E2 => MetaVar::E1,
            MetaVar::R => MetaVar::R,
        })
        .collect()
}

impl Catalog {
    /// Builds the full catalog at the given width: every figure row
    /// followed by its commutative/mirror variants.
    pub fn for_width(width: u32) -> Catalog {
        assert!((2..=63).contains(&width), "width must be in 2..=63");
        let mut rewrite = Vec::new();
        for row in rewrite_rows(width) {
            let mut variant = 0u32;
            rewrite.push(RewriteRule {
                id: RuleId { name: row.name, variant },
                guard: row.guard.clone(),
                source: row.source.clone(),
                replacement: row.replacement.clone(),
            });
            if row.commutative {
                let guard = swap_metas(&row.guard);
                let replacement = swap_metas(&row.replacement);
                if !(ac_eq(&guard, &row.guard) && ac_eq(&replacement, &row.replacement)) {
                    variant += 1;
                    rewrite.push(RewriteRule {
                        id: RuleId { name: row.name, variant },
                        guard,
                        source: row.source,
                        replacement,
                    });
                }
            }
        }
        let mut weaken = Vec::new();
        for row in weaken_rows() {
            let relops = row.class.map(|c| c.relops()).unwrap_or_default();
            let mut variant = 0u32;
            let push = |weaken: &mut Vec<WeakenRule>,
                            variant: &mut u32,
                            guard: Expr,
                            side_const: Vec<MetaVar>,
                            relops: Vec<Relop>,
                            shape: WeakenShape,
                            replacement: Expr| {
                weaken.push(WeakenRule {
                    id: RuleId {
                        name: row.name,
                        variant: *variant,
                    },
                    guard,
                    side_const,
                    relops,
                    shape,
                    replacement,
                });
                *variant += 1;
            };
            let swapped = if row.commutative {
                let guard = swap_metas(&row.guard);
                let replacement = swap_metas(&row.replacement);
                let side = swap_consts(&row.side_const);
                let symmetric = ac_eq(&guard, &row.guard)
                    && ac_eq(&replacement, &row.replacement)
                    && side == row.side_const;
                if symmetric {
                    None
                } else {
                    Some((guard, side, replacement))
                }
            } else {
                None
            };
            if row.bare {
                push(
                    &mut weaken,
                    &mut variant,
                    row.guard.clone(),
                    row.side_const.clone(),
                    relops.clone(),
                    WeakenShape::Bare {
                        pattern: row.subject.clone(),
                    },
                    row.replacement.clone(),
                );
                if let Some((guard, side, replacement)) = swapped.clone() {
                    push(
                        &mut weaken,
                        &mut variant,
                        guard,
                        side,
                        relops.clone(),
                        WeakenShape::Bare {
                            pattern: row.subject.clone(),
                        },
                        replacement,
                    );
                }
                // Mirrored bare pattern: flip the top-level comparison.
                if let Expr::Binary { op, left, right } = &row.subject {
                    if *op == BinOpTag::Eq {
                        let mirrored = Expr::binary(*op, (**right).clone(), (**left).clone());
                        push(
                            &mut weaken,
                            &mut variant,
                            row.guard.clone(),
                            row.side_const.clone(),
                            relops.clone(),
                            WeakenShape::Bare { pattern: mirrored },
                            row.replacement.clone(),
                        );
                    }
                }
            } else {
                push(
                    &mut weaken,
                    &mut variant,
                    row.guard.clone(),
                    row.side_const.clone(),
                    relops.clone(),
                    WeakenShape::Rel {
                        subject: row.subject.clone(),
                        mirrored: false,
                    },
                    row.replacement.clone(),
                );
                if let Some((guard, side, replacement)) = swapped.clone() {
                    push(
                        &mut weaken,
                        &mut variant,
                        guard,
                        side,
                        relops.clone(),
                        WeakenShape::Rel {
                            subject: row.subject.clone(),
                            mirrored: false,
                        },
                        replacement,
                    );
                }
                let mirrored_relops = mirror_relops(&relops);
                push(
                    &mut weaken,
                    &mut variant,
                    row.guard.clone(),
                    row.side_const.clone(),
                    mirrored_relops.clone(),
                    WeakenShape::Rel {
                        subject: row.subject.clone(),
                        mirrored: true,
                    },
                    row.replacement.clone(),
                );
                if let Some((guard, side, replacement)) = swapped {
                    push(
                        &mut weaken,
                        &mut variant,
                        guard,
                        side,
                        mirrored_relops,
                        WeakenShape::Rel {
                            subject: row.subject.clone(),
                            mirrored: true,
                        },
                        replacement,
                    );
                }
            }
        }
        Catalog {
            width,
            rewrite,
            weaken,
        }
    }

    /// Number of figure rows (variant-0 rules).
    pub fn base_counts(&self) -> (usize, usize) {
        (
            self.rewrite.iter().filter(|r| r.id.variant == 0).count(),
            self.weaken.iter().filter(|r| r.id.variant == 0).count(),
        )
    }

    /// One audit line per rule: id, guard, source, replacement.
    pub fn dump(&self) -> String {
        use crate::parser::print_expr;
        let mut out = String::new();
        for rule in &self.rewrite {
            out.push_str(&format!(
                "{} | {} | {} | {}\n",
                rule.id,
                print_expr(&rule.guard),
                print_expr(&rule.source),
                print_expr(&rule.replacement)
            ));
        }
        for rule in &self.weaken {
            let guard = if rule.side_const.is_empty() {
                print_expr(&rule.guard)
            } else {
                let consts: Vec<String> = rule
                    .side_const
                    .iter()
                    .map(|m| format!("is_const(${})", m.name()))
                    .collect();
                format!("{} && {}", print_expr(&rule.guard), consts.join(" && "))
            };
            let source = match &rule.shape {
                WeakenShape::Bare { pattern } => print_expr(pattern),
                WeakenShape::Rel { subject, mirrored } => {
                    let ops: Vec<&str> = rule.relops.iter().map(|r| r.symbol()).collect();
                    if *mirrored {
                        format!("({}) {{{}}} $r", print_expr(subject), ops.join(","))
                    } else {
                        format!("$r {{{}}} ({})", ops.join(","), print_expr(subject))
                    }
                }
            };
            out.push_str(&format!(
                "{} | {} | {} | {}\n",
                rule.id,
                guard,
                source,
                print_expr(&rule.replacement)
            ));
        }
        out
    }
}

/// Expands one rewrite rule into its commutative closure (including the
/// rule itself). Exposed for rule-level tests; `Catalog::for_width` applies
/// the same expansion to every row.
pub fn expand_commutative(rule: &RewriteRule) -> Vec<RewriteRule> {
    let commutes = matches!(
        &rule.source,
        Expr::Binary { op, .. }
            if matches!(op, BinOpTag::BitAnd | BinOpTag::BitOr | BinOpTag::BitXor)
    );
    let mut out = vec![rule.clone()];
    if commutes {
        let guard = swap_metas(&rule.guard);
        let replacement = swap_metas(&rule.replacement);
        if !(ac_eq(&guard, &rule.guard) && ac_eq(&replacement, &rule.replacement)) {
            out.push(RewriteRule {
                id: RuleId {
                    name: rule.id.name,
                    variant: rule.id.variant + 1,
                },
                guard,
                source: rule.source.clone(),
                replacement,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::substitute as subst;

    fn find_rewrite<'a>(cat: &'a Catalog, name: &str, variant: u32) -> &'a RewriteRule {
        cat.rewrite
            .iter()
            .find(|r| r.id.name == name && r.id.variant == variant)
            .unwrap()
    }

    fn find_weaken<'a>(cat: &'a Catalog, name: &str, variant: u32) -> &'a WeakenRule {
        cat.weaken
            .iter()
            .find(|r| r.id.name == name && r.id.variant == variant)
            .unwrap()
    }

    #[test]
    fn base_row_counts() {
        let cat = Catalog::for_width(32);
        assert_eq!(cat.base_counts(), (11, 13));
    }

    #[test]
    fn catalog_contains_and_lbs_row() {
        // <e1 >= 0 && e2 == 1> e1 & e2 ~> e1 % 2
        let cat = Catalog::for_width(32);
        let rule = find_rewrite(&cat, "R-And-LBS", 0);
        assert!(rule.guard.struct_eq(&Expr::land(ge0(e1()), eq(e2(), 1))));
        assert!(rule
            .replacement
            .struct_eq(&bin(BinOpTag::Mod, e1(), Expr::lit(2))));
    }

    #[test]
    fn catalog_contains_w_and_pos_row() {
        let cat = Catalog::for_width(32);
        let rule = find_weaken(&cat, "W-And-Pos", 0);
        assert!(rule.guard.struct_eq(&Expr::land(ge0(e1()), ge0(e2()))));
        assert!(rule.replacement.struct_eq(&Expr::land(
            bin(BinOpTag::Le, r(), e1()),
            bin(BinOpTag::Le, r(), e2())
        )));
        assert_eq!(
            rule.relops,
            vec![Relop::Lt, Relop::Le, Relop::Eq, Relop::Assign]
        );
    }

    #[test]
    fn and_zero_gets_swapped_variant() {
        let cat = Catalog::for_width(32);
        let variant = find_rewrite(&cat, "R-And-0", 1);
        assert!(variant.guard.struct_eq(&eq(e2(), 0)));
        assert!(variant.replacement.struct_eq(&Expr::lit(0)));
    }

    #[test]
    fn xor_eq_has_no_swapped_variant() {
        let cat = Catalog::for_width(32);
        assert!(cat
            .rewrite
            .iter()
            .filter(|r| r.id.name == "R-Xor-Eq")
            .count()
            == 1);
    }

    #[test]
    fn and_mix_swap_retargets_replacement() {
        let cat = Catalog::for_width(32);
        let swap = find_weaken(&cat, "W-And-Mix", 1);
        assert!(swap.guard.struct_eq(&Expr::land(ge0(e2()), lt0(e1()))));
        assert!(swap.replacement.struct_eq(&Expr::land(
            bin(BinOpTag::Le, Expr::lit(0), r()),
            bin(BinOpTag::Le, r(), e2())
        )));
    }

    #[test]
    fn match_and_pattern() {
        let pattern = bin(BinOpTag::BitAnd, e1(), e2());
        let subject = bin(BinOpTag::BitAnd, Expr::var("x"), Expr::var("a"));
        let delta = match_expr(&pattern, &subject).unwrap();
        assert!(delta.get(MetaVar::E1).unwrap().struct_eq(&Expr::var("x")));
        assert!(delta.get(MetaVar::E2).unwrap().struct_eq(&Expr::var("a")));
        // Operator mismatch: no match.
        let or_subject = bin(BinOpTag::BitOr, Expr::var("x"), Expr::var("a"));
        assert!(match_expr(&pattern, &or_subject).is_none());
    }

    #[test]
    fn shift_pattern_matches_literal_amount() {
        // e1 >> 31 at width 32 matches y >> 31, not y >> 30.
        let cat = Catalog::for_width(32);
        let rule = find_rewrite(&cat, "R-RightShift-Pos", 0);
        let subject = bin(BinOpTag::Shr, Expr::var("y"), Expr::lit(31));
        let delta = rule.try_match(&subject).unwrap();
        assert!(delta.get(MetaVar::E1).unwrap().struct_eq(&Expr::var("y")));
        let wrong = bin(BinOpTag::Shr, Expr::var("y"), Expr::lit(30));
        assert!(rule.try_match(&wrong).is_none());
    }

    #[test]
    fn match_soundness_substitute_roundtrip() {
        let cat = Catalog::for_width(32);
        let subject = bin(
            BinOpTag::BitAnd,
            bin(BinOpTag::Add, Expr::var("x"), Expr::lit(1)),
            Expr::var("a"),
        );
        for rule in &cat.rewrite {
            if let Some(delta) = rule.try_match(&subject) {
                let back = subst(&rule.source, &delta).unwrap();
                assert!(back.struct_eq(&subject), "rule {}", rule.id);
            }
        }
    }

    #[test]
    fn or_const_requires_constant_operand() {
        let cat = Catalog::for_width(32);
        let rule = find_weaken(&cat, "W-Or-Const", 0);
        let const_rhs = bin(
            BinOpTag::BitOr,
            Expr::var("x"),
            bin(BinOpTag::Add, Expr::lit(2), Expr::lit(3)),
        );
        assert!(rule.match_assign("y", &const_rhs, 32).is_some());
        let nonconst_rhs = bin(BinOpTag::BitOr, Expr::var("x"), Expr::var("z"));
        assert!(rule.match_assign("y", &nonconst_rhs, 32).is_none());
    }

    #[test]
    fn mirrored_variant_matches_flipped_condition() {
        let cat = Catalog::for_width(32);
        // (x & y) >= r  should match a mirrored W-And-Pos variant.
        let cond = bin(
            BinOpTag::Ge,
            bin(BinOpTag::BitAnd, Expr::var("x"), Expr::var("y")),
            Expr::var("z"),
        );
        let matched: Vec<&WeakenRule> = cat
            .weaken
            .iter()
            .filter(|w| w.id.name == "W-And-Pos" && w.match_cond(&cond, 32).is_some())
            .collect();
        assert!(!matched.is_empty());
        assert!(matched
            .iter()
            .all(|w| matches!(&w.shape, WeakenShape::Rel { mirrored: true, .. })));
    }

    #[test]
    fn closure_completeness_for_commutative_and() {
        // Any subject a & b matched by a base rule under operand swap is
        // matched directly by some catalog variant.
        let cat = Catalog::for_width(32);
        let subject = bin(BinOpTag::BitAnd, Expr::lit(0), Expr::var("b"));
        // Base R-And-0 guard targets e1; with e1 = 0 literal the swapped
        // subject b & 0 must be covered by the @1 variant's guard on e2.
        let swapped_subject = bin(BinOpTag::BitAnd, Expr::var("b"), Expr::lit(0));
        let hit = |s: &Expr| {
            cat.rewrite
                .iter()
                .filter(|r| r.id.name == "R-And-0")
                .any(|r| r.try_match(s).is_some())
        };
        assert!(hit(&subject));
        assert!(hit(&swapped_subject));
    }
}
