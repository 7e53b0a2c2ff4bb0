//! Concrete execution: width-limited two's-complement evaluation, program
//! runs with a deterministic nondet stream, and the shadow-replay harness
//! that witnesses trace inclusion of the original program in its
//! transformed over-approximation.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ast::{BinOpTag, Expr, Program, Stmt, StmtKind, UnOpTag, RESERVED_PREFIX};

pub type Env = BTreeMap<String, i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalFault {
    #[error("division or modulo by zero")]
    DivByZero,
    #[error("shift amount {0} outside [0, {1}]")]
    ShiftRange(i64, u32),
    #[error("undefined variable `{0}`")]
    UndefinedVar(String),
    #[error("nondeterministic value in expression position")]
    NondetInExpr,
    #[error("metavariable in concrete expression")]
    MetaInExpr,
}

/// Sign-extends the low `w` bits of `v`.
pub fn wrap(v: i64, w: u32) -> i64 {
    debug_assert!((2..=63).contains(&w));
    let m = 1i64 << (w - 1);
    ((v & ((1i64 << w) - 1)) ^ m) - m
}

pub fn eval_binop(op: BinOpTag, l: i64, r: i64, w: u32) -> Result<i64, EvalFault> {
    let v = match op {
        BinOpTag::Add => wrap(l.wrapping_add(r), w),
        BinOpTag::Sub => wrap(l.wrapping_sub(r), w),
        BinOpTag::Mul => wrap(l.wrapping_mul(r), w),
        BinOpTag::Div => {
            if r == 0 {
                return Err(EvalFault::DivByZero);
            }
            wrap(l.wrapping_div(r), w)
        }
        BinOpTag::Mod => {
            if r == 0 {
                return Err(EvalFault::DivByZero);
            }
            wrap(l.wrapping_rem(r), w)
        }
        BinOpTag::BitAnd => l & r,
        BinOpTag::BitOr => l | r,
        BinOpTag::BitXor => l ^ r,
        BinOpTag::Shl => {
            if !(0..i64::from(w)).contains(&r) {
                return Err(EvalFault::ShiftRange(r, w - 1));
            }
            wrap(l.wrapping_shl(r as u32), w)
        }
        BinOpTag::Shr => {
            if !(0..i64::from(w)).contains(&r) {
                return Err(EvalFault::ShiftRange(r, w - 1));
            }
            l >> r
        }
        BinOpTag::Lt => i64::from(l < r),
        BinOpTag::Le => i64::from(l <= r),
        BinOpTag::Gt => i64::from(l > r),
        BinOpTag::Ge => i64::from(l >= r),
        BinOpTag::Eq => i64::from(l == r),
        BinOpTag::Ne => i64::from(l != r),
        BinOpTag::LogAnd | BinOpTag::LogOr => unreachable!("handled by eval_expr"),
    };
    Ok(v)
}

/// Two's-complement evaluation at width `w`. Relational and logical
/// operators yield 0/1; `&&`, `||`, and `?:` short-circuit.
pub fn eval_expr(e: &Expr, env: &Env, w: u32) -> Result<i64, EvalFault> {
    match e {
        Expr::Var(name) => env
            .get(name)
            .copied()
            .ok_or_else(|| EvalFault::UndefinedVar(name.clone())),
        Expr::IntLit(v) => Ok(*v),
        Expr::Nondet => Err(EvalFault::NondetInExpr),
        Expr::Meta(_) => Err(EvalFault::MetaInExpr),
        Expr::Unary { op, operand } => {
            let v = eval_expr(operand, env, w)?;
            Ok(match op {
                UnOpTag::Neg => wrap(v.wrapping_neg(), w),
                UnOpTag::BitNot => wrap(!v, w),
                UnOpTag::LogNot => i64::from(v == 0),
            })
        }
        Expr::Binary { op, left, right } => match op {
            BinOpTag::LogAnd => {
                if eval_expr(left, env, w)? == 0 {
                    Ok(0)
                } else {
                    Ok(i64::from(eval_expr(right, env, w)? != 0))
                }
            }
            BinOpTag::LogOr => {
                if eval_expr(left, env, w)? != 0 {
                    Ok(1)
                } else {
                    Ok(i64::from(eval_expr(right, env, w)? != 0))
                }
            }
            _ => {
                let l = eval_expr(left, env, w)?;
                let r = eval_expr(right, env, w)?;
                eval_binop(*op, l, r, w)
            }
        },
        Expr::Ternary {
            cond,
            then_branch,
            else_branch,
            ..
        } => {
            if eval_expr(cond, env, w)? != 0 {
                eval_expr(then_branch, env, w)
            } else {
                eval_expr(else_branch, env, w)
            }
        }
    }
}

/// Constant folding: `Some(v)` iff the expression evaluates without
/// variables or faults at width `w`.
pub fn const_fold(e: &Expr, w: u32) -> Option<i64> {
    eval_expr(e, &Env::new(), w).ok()
}

/// Deterministic pseudo-random stream of w-bit values (splitmix64).
#[derive(Debug, Clone)]
pub struct NondetStream {
    state: u64,
    width: u32,
}

impl NondetStream {
    pub fn new(seed: u64, width: u32) -> NondetStream {
        NondetStream { state: seed, width }
    }

    pub fn next_value(&mut self) -> i64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
        wrap(z as i64, self.width)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunStatus {
    Terminated,
    BudgetExhausted,
    AssumeStuck,
    Fault(String),
    AssertFailed,
}

#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub stmt_index: usize,
    pub env: Env,
    pub generated: bool,
    /// Target of an assignment/havoc entry, empty for assume/assert.
    pub target: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub entries: Vec<TraceEntry>,
    pub status: RunStatus,
}

impl Trace {
    /// One line per step: `<idx> <var>=<val> ...`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            let vars: Vec<String> = entry
                .env
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            out.push_str(&format!("{} {}\n", entry.stmt_index, vars.join(" ")));
        }
        out
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("generated havoc of `{0}` carries no original expression; program was not produced by this transformer")]
    MissingMetadata(String),
}

struct Runner<'a> {
    width: u32,
    stream: &'a mut NondetStream,
    budget: u64,
    steps: u64,
    entries: Vec<TraceEntry>,
    counter: usize,
    /// Replay mode: resolve generated havocs from their recorded original
    /// expression and flag generated assumes that evaluate false.
    replay: bool,
    /// True right after a generated havoc was resolved from its original
    /// expression: the generated assume that follows carries an obligation.
    after_resolved_havoc: bool,
    violation: Option<ReplayViolation>,
    error: Option<ReplayError>,
}

#[derive(Debug, Clone)]
pub struct ReplayViolation {
    pub stmt_index: usize,
    pub cond_text: String,
    pub env: Env,
}

enum Flow {
    Continue,
    Stop(RunStatus),
}

impl<'a> Runner<'a> {
    fn exec_stmts(&mut self, stmts: &[Stmt], env: &mut Env) -> Flow {
        for s in stmts {
            match self.exec_stmt(s, env) {
                Flow::Continue => {}
                stop => return stop,
            }
        }
        Flow::Continue
    }

    fn charge(&mut self) -> bool {
        self.steps += 1;
        self.steps <= self.budget
    }

    fn record(&mut self, env: &Env, generated: bool, target: Option<String>) {
        self.entries.push(TraceEntry {
            stmt_index: self.counter,
            env: env.clone(),
            generated,
            target,
        });
    }

    fn eval(&self, e: &Expr, env: &Env) -> Result<i64, EvalFault> {
        eval_expr(e, env, self.width)
    }

    fn exec_stmt(&mut self, s: &Stmt, env: &mut Env) -> Flow {
        self.counter += 1;
        if !self.charge() {
            return Flow::Stop(RunStatus::BudgetExhausted);
        }
        let after_havoc = std::mem::replace(&mut self.after_resolved_havoc, false);
        match &s.kind {
            StmtKind::Assign { target, rhs } => match self.eval(rhs, env) {
                Ok(v) => {
                    env.insert(target.clone(), v);
                    self.record(env, s.generated, Some(target.clone()));
                    Flow::Continue
                }
                Err(f) => Flow::Stop(RunStatus::Fault(f.to_string())),
            },
            StmtKind::Havoc { target, original } => {
                let v = if self.replay && s.generated {
                    match original {
                        Some(orig) => match self.eval(orig, env) {
                            Ok(v) => {
                                self.after_resolved_havoc = true;
                                v
                            }
                            Err(f) => return Flow::Stop(RunStatus::Fault(f.to_string())),
                        },
                        None => {
                            self.error = Some(ReplayError::MissingMetadata(target.clone()));
                            return Flow::Stop(RunStatus::Terminated);
                        }
                    }
                } else {
                    self.stream.next_value()
                };
                env.insert(target.clone(), v);
                self.record(env, s.generated, Some(target.clone()));
                Flow::Continue
            }
            StmtKind::Assume(cond) => match self.eval(cond, env) {
                Ok(v) => {
                    if v == 0 {
                        if self.replay && s.generated && after_havoc {
                            // An exact value failing the assume that
                            // constrains a resolved havoc refutes
                            // over-approximation. A generated assume in a
                            // weakened-assume chain may be false like any
                            // other assume: the run just blocks.
                            self.violation = Some(ReplayViolation {
                                stmt_index: self.counter,
                                cond_text: crate::parser::print_expr(cond),
                                env: env.clone(),
                            });
                            return Flow::Stop(RunStatus::Terminated);
                        }
                        Flow::Stop(RunStatus::AssumeStuck)
                    } else {
                        self.record(env, s.generated, None);
                        Flow::Continue
                    }
                }
                Err(f) => Flow::Stop(RunStatus::Fault(f.to_string())),
            },
            StmtKind::Assert(cond) => match self.eval(cond, env) {
                Ok(0) => Flow::Stop(RunStatus::AssertFailed),
                Ok(_) => Flow::Continue,
                Err(f) => Flow::Stop(RunStatus::Fault(f.to_string())),
            },
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => match self.eval(cond, env) {
                Ok(v) => {
                    if v != 0 {
                        self.exec_stmts(then_branch, env)
                    } else {
                        self.exec_stmts(else_branch, env)
                    }
                }
                Err(f) => Flow::Stop(RunStatus::Fault(f.to_string())),
            },
            StmtKind::While { cond, body } => loop {
                match self.eval(cond, env) {
                    Ok(0) => return Flow::Continue,
                    Ok(_) => match self.exec_stmts(body, env) {
                        Flow::Continue => {
                            // Charge one step per iteration for the
                            // condition re-evaluation.
                            if !self.charge() {
                                return Flow::Stop(RunStatus::BudgetExhausted);
                            }
                        }
                        stop => return stop,
                    },
                    Err(f) => return Flow::Stop(RunStatus::Fault(f.to_string())),
                }
            },
            StmtKind::Block(stmts) => self.exec_stmts(stmts, env),
        }
    }
}

fn initial_env(p: &Program) -> Result<Env, EvalFault> {
    let mut env = Env::new();
    for (name, _) in &p.decls {
        env.insert(name.clone(), 0);
    }
    for (name, init) in &p.decls {
        if let Some(e) = init {
            let v = eval_expr(e, &env, p.width)?;
            env.insert(name.clone(), v);
        }
    }
    Ok(env)
}

pub const DEFAULT_BUDGET: u64 = 100_000;

/// Big-step execution from a zero-initialized environment (overridden by
/// declared initializers).
pub fn run(p: &Program, stream: &mut NondetStream, budget: u64) -> Trace {
    assert!(budget >= 1);
    run_inner(p, stream, budget, false).0
}

fn run_inner(
    p: &Program,
    stream: &mut NondetStream,
    budget: u64,
    replay: bool,
) -> (Trace, Option<ReplayViolation>, Option<ReplayError>) {
    let mut env = match initial_env(p) {
        Ok(env) => env,
        Err(f) => {
            return (
                Trace {
                    entries: Vec::new(),
                    status: RunStatus::Fault(f.to_string()),
                },
                None,
                None,
            )
        }
    };
    let mut runner = Runner {
        width: p.width,
        stream,
        budget,
        steps: 0,
        entries: Vec::new(),
        counter: 0,
        replay,
        after_resolved_havoc: false,
        violation: None,
        error: None,
    };
    let status = match runner.exec_stmts(&p.body, &mut env) {
        Flow::Continue => RunStatus::Terminated,
        Flow::Stop(status) => status,
    };
    (
        Trace {
            entries: runner.entries,
            status,
        },
        runner.violation,
        runner.error,
    )
}

#[derive(Debug, Clone)]
pub enum ReplayOutcome {
    Ok,
    Violation(ReplayViolation),
    TraceMismatch { detail: String },
}

/// Projects a trace to user-visible effects: entries targeting transformer
/// temporaries are dropped, environments are restricted to user variables,
/// and consecutive duplicates collapse. A generated havoc standing in for
/// an original assignment survives projection with the same environment the
/// original assignment would have produced.
fn project(trace: &Trace) -> Vec<Env> {
    let mut out: Vec<Env> = Vec::new();
    for entry in &trace.entries {
        if let Some(t) = &entry.target {
            if t.starts_with(RESERVED_PREFIX) {
                continue;
            }
        }
        let user_env: Env = entry
            .env
            .iter()
            .filter(|(k, _)| !k.starts_with(RESERVED_PREFIX))
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        if out.last() != Some(&user_env) {
            out.push(user_env);
        }
    }
    out
}

/// Runs the transformed program resolving each generated havoc with the
/// exact value of the expression it replaced, then checks that the
/// projected trace matches the original's.
pub fn shadow_replay(
    original: &Program,
    transformed: &Program,
    seed: u64,
    budget: u64,
) -> Result<ReplayOutcome, ReplayError> {
    let mut orig_stream = NondetStream::new(seed, original.width);
    let orig_trace = run(original, &mut orig_stream, budget);

    let mut stream = NondetStream::new(seed, transformed.width);
    // The transformed program executes strictly more statements; give it
    // headroom so budget comparisons happen on the original's terms.
    let (trans_trace, violation, error) =
        run_inner(transformed, &mut stream, budget.saturating_mul(16), true);
    if let Some(err) = error {
        return Err(err);
    }
    if let Some(v) = violation {
        return Ok(ReplayOutcome::Violation(v));
    }

    let orig_proj = project(&orig_trace);
    let trans_proj = project(&trans_trace);
    let budget_cut = orig_trace.status == RunStatus::BudgetExhausted
        || trans_trace.status == RunStatus::BudgetExhausted;
    if budget_cut {
        let n = orig_proj.len().min(trans_proj.len());
        if orig_proj[..n] != trans_proj[..n] {
            return Ok(ReplayOutcome::TraceMismatch {
                detail: format!("projected trace prefix diverges within {n} steps"),
            });
        }
        return Ok(ReplayOutcome::Ok);
    }
    if orig_trace.status == RunStatus::AssumeStuck && trans_trace.status != RunStatus::AssumeStuck
    {
        // Weakened assumes are strictly weaker, so a run the original blocks
        // may continue in the transformed program. The original's projected
        // trace must still be a prefix of the transformed one.
        if trans_proj.len() < orig_proj.len() || orig_proj != trans_proj[..orig_proj.len()] {
            return Ok(ReplayOutcome::TraceMismatch {
                detail: "blocked original trace is not a prefix of the transformed trace"
                    .to_string(),
            });
        }
        return Ok(ReplayOutcome::Ok);
    }
    if orig_trace.status != trans_trace.status {
        return Ok(ReplayOutcome::TraceMismatch {
            detail: format!(
                "status mismatch: original {:?}, transformed {:?}",
                orig_trace.status, trans_trace.status
            ),
        });
    }
    if orig_proj != trans_proj {
        let at = orig_proj
            .iter()
            .zip(&trans_proj)
            .position(|(a, b)| a != b)
            .unwrap_or(orig_proj.len().min(trans_proj.len()));
        return Ok(ReplayOutcome::TraceMismatch {
            detail: format!(
                "projected traces diverge at step {at} (original {} steps, transformed {})",
                orig_proj.len(),
                trans_proj.len()
            ),
        });
    }
    Ok(ReplayOutcome::Ok)
}
