//! Program representation shared by every pass: expressions, statements,
//! programs, and the metavariable substitutions used by rule patterns.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Reserved prefix for names minted by the transformer.
pub const RESERVED_PREFIX: &str = "__bwb_";

/// Pattern metavariables. These form a lexical class disjoint from program
/// identifiers, so substitution never captures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetaVar {
    E1,
    E2,
    R,
}

impl MetaVar {
    pub fn name(self) -> &'static str {
        match self {
            MetaVar::E1 => "e1",
            MetaVar::E2 => "e2",
            MetaVar::R => "r",
        }
    }
}

impl fmt::Display for MetaVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "${}", self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOpTag {
    Neg,
    BitNot,
    LogNot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOpTag {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    BitAnd,
    BitOr,
    BitXor,
    Shl,
    /// Arithmetic right shift on signed values.
    Shr,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    LogAnd,
    LogOr,
}

impl BinOpTag {
    pub fn is_bitwise(self) -> bool {
        matches!(
            self,
            BinOpTag::BitAnd | BinOpTag::BitOr | BinOpTag::BitXor | BinOpTag::Shl | BinOpTag::Shr
        )
    }

    pub fn is_relational(self) -> bool {
        matches!(
            self,
            BinOpTag::Lt | BinOpTag::Le | BinOpTag::Gt | BinOpTag::Ge | BinOpTag::Eq | BinOpTag::Ne
        )
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOpTag::Add => "+",
            BinOpTag::Sub => "-",
            BinOpTag::Mul => "*",
            BinOpTag::Div => "/",
            BinOpTag::Mod => "%",
            BinOpTag::BitAnd => "&",
            BinOpTag::BitOr => "|",
            BinOpTag::BitXor => "^",
            BinOpTag::Shl => "<<",
            BinOpTag::Shr => ">>",
            BinOpTag::Lt => "<",
            BinOpTag::Le => "<=",
            BinOpTag::Gt => ">",
            BinOpTag::Ge => ">=",
            BinOpTag::Eq => "==",
            BinOpTag::Ne => "!=",
            BinOpTag::LogAnd => "&&",
            BinOpTag::LogOr => "||",
        }
    }
}

/// Expression tree. `Meta` nodes appear only in rule patterns, never in
/// parsed programs. The `generated` flag on `Ternary` marks conditionals
/// inserted by the rewriting pass; it is ignored by equality.
#[derive(Debug, Clone)]
pub enum Expr {
    Var(String),
    IntLit(i64),
    Nondet,
    Meta(MetaVar),
    Unary {
        op: UnOpTag,
        operand: Box<Expr>,
    },
    Binary {
        op: BinOpTag,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    Ternary {
        cond: Box<Expr>,
        then_branch: Box<Expr>,
        else_branch: Box<Expr>,
        generated: bool,
    },
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn lit(v: i64) -> Expr {
        Expr::IntLit(v)
    }

    pub fn meta(m: MetaVar) -> Expr {
        Expr::Meta(m)
    }

    pub fn unary(op: UnOpTag, operand: Expr) -> Expr {
        Expr::Unary {
            op,
            operand: Box::new(operand),
        }
    }

    pub fn binary(op: BinOpTag, left: Expr, right: Expr) -> Expr {
        Expr::Binary {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn ternary(cond: Expr, then_branch: Expr, else_branch: Expr, generated: bool) -> Expr {
        Expr::Ternary {
            cond: Box::new(cond),
            then_branch: Box::new(then_branch),
            else_branch: Box::new(else_branch),
            generated,
        }
    }

    pub fn land(left: Expr, right: Expr) -> Expr {
        Expr::binary(BinOpTag::LogAnd, left, right)
    }

    pub fn lor(left: Expr, right: Expr) -> Expr {
        Expr::binary(BinOpTag::LogOr, left, right)
    }

    /// Exact structural equality; ternary `generated` marks are ignored.
    pub fn struct_eq(&self, other: &Expr) -> bool {
        match (self, other) {
            (Expr::Var(a), Expr::Var(b)) => a == b,
            (Expr::IntLit(a), Expr::IntLit(b)) => a == b,
            (Expr::Nondet, Expr::Nondet) => true,
            (Expr::Meta(a), Expr::Meta(b)) => a == b,
            (
                Expr::Unary { op: oa, operand: a },
                Expr::Unary { op: ob, operand: b },
            ) => oa == ob && a.struct_eq(b),
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
            ) => oa == ob && la.struct_eq(lb) && ra.struct_eq(rb),
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
            ) => ca.struct_eq(cb) && ta.struct_eq(tb) && ea.struct_eq(eb),
            _ => false,
        }
    }

    /// Metavariables occurring in this pattern, in first-occurrence order.
    pub fn metavars(&self) -> Vec<MetaVar> {
        let mut out = Vec::new();
        self.collect_metavars(&mut out);
        out
    }

    fn collect_metavars(&self, out: &mut Vec<MetaVar>) {
        match self {
            Expr::Meta(m) => {
                if !out.contains(m) {
                    out.push(*m);
                }
            }
            Expr::Unary { operand, .. } => operand.collect_metavars(out),
            Expr::Binary { left, right, .. } => {
                left.collect_metavars(out);
                right.collect_metavars(out);
            }
            Expr::Ternary {
                cond,
                then_branch,
                else_branch,
                ..
            } => {
                cond.collect_metavars(out);
                then_branch.collect_metavars(out);
                else_branch.collect_metavars(out);
            }
            _ => {}
        }
    }

    /// True iff the variable `name` occurs in this expression.
    pub fn mentions_var(&self, name: &str) -> bool {
        match self {
            Expr::Var(v) => v == name,
            Expr::Unary { operand, .. } => operand.mentions_var(name),
            Expr::Binary { left, right, .. } => {
                left.mentions_var(name) || right.mentions_var(name)
            }
            Expr::Ternary {
                cond,
                then_branch,
                else_branch,
                ..
            } => {
                cond.mentions_var(name)
                    || then_branch.mentions_var(name)
                    || else_branch.mentions_var(name)
            }
            _ => false,
        }
    }

    /// Replaces every occurrence of variable `from` with `to`.
    pub fn rename_var(&self, from: &str, to: &str) -> Expr {
        match self {
            Expr::Var(v) if v == from => Expr::Var(to.to_string()),
            Expr::Unary { op, operand } => Expr::unary(*op, operand.rename_var(from, to)),
            Expr::Binary { op, left, right } => {
                Expr::binary(*op, left.rename_var(from, to), right.rename_var(from, to))
            }
            Expr::Ternary {
                cond,
                then_branch,
                else_branch,
                generated,
            } => Expr::ternary(
                cond.rename_var(from, to),
                then_branch.rename_var(from, to),
                else_branch.rename_var(from, to),
                *generated,
            ),
            other => other.clone(),
        }
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.struct_eq(other)
    }
}

impl Eq for Expr {}

/// Mapping from pattern metavariables to concrete expressions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<MetaVar, Expr>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn bind(&mut self, m: MetaVar, e: Expr) {
        self.bindings.insert(m, e);
    }

    pub fn get(&self, m: MetaVar) -> Option<&Expr> {
        self.bindings.get(&m)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MetaVar, &Expr)> {
        self.bindings.iter()
    }

    /// Checks an existing binding for consistency, or installs a new one.
    /// Returns false on a conflicting rebind.
    pub fn unify(&mut self, m: MetaVar, e: &Expr) -> bool {
        match self.bindings.get(&m) {
            Some(prev) => prev.struct_eq(e),
            None => {
                self.bindings.insert(m, e.clone());
                true
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AstError {
    #[error("unbound metavariable ${0} in template")]
    UnboundMetaVar(&'static str),
}

/// Instantiates a pattern: every metavariable is replaced by its binding.
pub fn substitute(template: &Expr, delta: &Substitution) -> Result<Expr, AstError> {
    match template {
        Expr::Meta(m) => delta
            .get(*m)
            .cloned()
            .ok_or(AstError::UnboundMetaVar(m.name())),
        Expr::Unary { op, operand } => Ok(Expr::unary(*op, substitute(operand, delta)?)),
        Expr::Binary { op, left, right } => Ok(Expr::binary(
            *op,
            substitute(left, delta)?,
            substitute(right, delta)?,
        )),
        Expr::Ternary {
            cond,
            then_branch,
            else_branch,
            generated,
        } => Ok(Expr::ternary(
            substitute(cond, delta)?,
            substitute(then_branch, delta)?,
            substitute(else_branch, delta)?,
            *generated,
        )),
        other => Ok(other.clone()),
    }
}

/// Statement with transformer bookkeeping: `generated` marks statements
/// inserted by the transformer (never re-transformed), `notes` carries one
/// rule id per rule fired inside this statement (printed as `// bwb:` lines).
#[derive(Debug, Clone)]
pub struct Stmt {
    pub kind: StmtKind,
    pub generated: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub enum StmtKind {
    Assign {
        target: String,
        rhs: Expr,
    },
    /// Nondeterministic assignment (`x = *`). `original` records, on
    /// generated havocs, the exact expression the havoc replaced; shadow
    /// replay resolves the havoc by evaluating it.
    Havoc {
        target: String,
        original: Option<Expr>,
    },
    Assume(Expr),
    Assert(Expr),
    If {
        cond: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
    },
    Block(Vec<Stmt>),
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Stmt {
        Stmt {
            kind,
            generated: false,
            notes: Vec::new(),
        }
    }

    pub fn generated(kind: StmtKind) -> Stmt {
        Stmt {
            kind,
            generated: true,
            notes: Vec::new(),
        }
    }

    pub fn assign(target: impl Into<String>, rhs: Expr) -> Stmt {
        Stmt::new(StmtKind::Assign {
            target: target.into(),
            rhs,
        })
    }

    pub fn havoc(target: impl Into<String>) -> Stmt {
        Stmt::new(StmtKind::Havoc {
            target: target.into(),
            original: None,
        })
    }

    pub fn assume(cond: Expr) -> Stmt {
        Stmt::new(StmtKind::Assume(cond))
    }

    /// Structural equality; `generated`, `notes`, and havoc `original`
    /// metadata are ignored.
    pub fn struct_eq(&self, other: &Stmt) -> bool {
        match (&self.kind, &other.kind) {
            (
                StmtKind::Assign {
                    target: ta,
                    rhs: ra,
                },
                StmtKind::Assign {
                    target: tb,
                    rhs: rb,
                },
            ) => ta == tb && ra.struct_eq(rb),
            (StmtKind::Havoc { target: ta, .. }, StmtKind::Havoc { target: tb, .. }) => ta == tb,
            (StmtKind::Assume(a), StmtKind::Assume(b)) => a.struct_eq(b),
            (StmtKind::Assert(a), StmtKind::Assert(b)) => a.struct_eq(b),
            (
                StmtKind::If {
                    cond: ca,
                    then_branch: ta,
                    else_branch: ea,
                },
                StmtKind::If {
                    cond: cb,
                    then_branch: tb,
                    else_branch: eb,
                },
            ) => ca.struct_eq(cb) && stmts_struct_eq(ta, tb) && stmts_struct_eq(ea, eb),
            (
                StmtKind::While { cond: ca, body: ba },
                StmtKind::While { cond: cb, body: bb },
            ) => ca.struct_eq(cb) && stmts_struct_eq(ba, bb),
            (StmtKind::Block(a), StmtKind::Block(b)) => stmts_struct_eq(a, b),
            _ => false,
        }
    }
}

pub fn stmts_struct_eq(a: &[Stmt], b: &[Stmt]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.struct_eq(y))
}

/// A whole program: declarations with optional initializers, a statement
/// body, and the two's-complement bit width everything is evaluated at.
#[derive(Debug, Clone)]
pub struct Program {
    pub decls: Vec<(String, Option<Expr>)>,
    pub body: Vec<Stmt>,
    pub width: u32,
}

pub const DEFAULT_WIDTH: u32 = 32;

impl Program {
    pub fn new(width: u32) -> Program {
        Program {
            decls: Vec::new(),
            body: Vec::new(),
            width,
        }
    }

    pub fn struct_eq(&self, other: &Program) -> bool {
        self.width == other.width
            && self.decls.len() == other.decls.len()
            && self
                .decls
                .iter()
                .zip(&other.decls)
                .all(|((na, ia), (nb, ib))| {
                    na == nb
                        && match (ia, ib) {
                            (None, None) => true,
                            (Some(a), Some(b)) => a.struct_eq(b),
                            _ => false,
                        }
                })
            && stmts_struct_eq(&self.body, &other.body)
    }

    pub fn is_declared(&self, name: &str) -> bool {
        self.decls.iter().any(|(n, _)| n == name)
    }
}
