//! The six expansion policies and the exact iteration driver shared by
//! them.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cf::{Expansion, Status};
use crate::error::{Error, Result};
use crate::padic::{
    pow_rat, BranchTag, Convention, Digits, Env, PNum, PadicContext, QState, QpNumber, QuadField,
    QuadraticIrrational, Rational, Scalar, Valuation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgorithmId {
    Schneider,
    Ruban,
    BrowkinI,
    BrowkinII,
    Mrs3,
    MrST,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 6] = [
        AlgorithmId::Schneider,
        AlgorithmId::Ruban,
        AlgorithmId::BrowkinI,
        AlgorithmId::BrowkinII,
        AlgorithmId::Mrs3,
        AlgorithmId::MrST,
    ];

    pub fn convention(self) -> Convention {
        match self {
            AlgorithmId::Schneider | AlgorithmId::Ruban => Convention::Standard,
            _ => Convention::Balanced,
        }
    }

    /// Number of distinct step rules the policy cycles through.
    pub fn phase_modulus(self) -> usize {
        match self {
            AlgorithmId::BrowkinII | AlgorithmId::MrST => 2,
            AlgorithmId::Mrs3 => 3,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmId::Schneider => "schneider",
            AlgorithmId::Ruban => "ruban",
            AlgorithmId::BrowkinI => "browkin1",
            AlgorithmId::BrowkinII => "browkin2",
            AlgorithmId::Mrs3 => "mrs3",
            AlgorithmId::MrST => "mr-st",
        }
    }

    /// A context for this algorithm's convention.
    pub fn context(self, p: u64) -> Result<PadicContext> {
        PadicContext::new(p, self.convention())
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgorithmId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown algorithm {s:?}")))
    }
}

/// A complete quotient as the driver stores it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum State {
    Rat(Rational),
    Quad(QState),
}

impl State {
    pub fn from_qp(x: &QpNumber, p: &BigInt) -> Self {
        match x {
            QpNumber::Rational(r) => State::Rat(r.clone()),
            QpNumber::Quadratic(q) => State::Quad(QState::from_scalar(&x.to_scalar(), &q.d, p)),
        }
    }

    pub fn from_scalar(x: &Scalar, d: &BigInt, p: &BigInt) -> Self {
        if x.b.is_zero() {
            State::Rat(x.a.clone())
        } else {
            State::Quad(QState::from_scalar(x, d, p))
        }
    }

    /// Back to a public number over the unscaled radicand `d`.
    pub fn to_qp(&self, d: &BigInt, p: &BigInt) -> QpNumber {
        match self {
            State::Rat(r) => QpNumber::Rational(r.clone()),
            State::Quad(q) => {
                let (pp, qq) = q.to_pq(p);
                QpNumber::Quadratic(QuadraticIrrational {
                    p: pp,
                    q: qq,
                    d: d.clone(),
                    branch: BranchTag::Principal,
                })
            }
        }
    }
}

/// One application of a policy.
pub(crate) struct Step {
    pub a: Rational,
    /// `b_{n+1}` and `alpha_{n+1}`; `None` when `alpha_n = a_n`.
    pub next: Option<(Rational, State)>,
}

fn sign(x: &Rational) -> Rational {
    if x.is_positive() {
        Rational::one()
    } else if x.is_negative() {
        -Rational::one()
    } else {
        Rational::zero()
    }
}

/// `t`, replaced by `t - sign(t)` when `alpha - t` is not a unit. This
/// includes `alpha = t`, where `v(alpha - t)` is infinite.
fn t_signed<X: Digits>(env: &Env, alpha: &X) -> Rational {
    let t = env.floor_t(alpha);
    if alpha.valuation_minus(env, &t) != Valuation::Finite(0) {
        let s = sign(&t);
        t - s
    } else {
        t
    }
}

/// The partial quotient `a_n` chosen by `alg` for the complete quotient
/// `alpha` of index `n`.
pub(crate) fn choose<X: Digits>(alg: AlgorithmId, env: &Env, alpha: &X, n: usize) -> Result<Rational> {
    Ok(match alg {
        AlgorithmId::Schneider => {
            if let Valuation::Finite(v) = env.valuation(alpha) {
                if v < 0 {
                    return Err(Error::SchneiderDomain);
                }
            }
            Rational::from_integer(env.digit0(alpha, false).into())
        }
        AlgorithmId::Ruban => env.floor_ruban(alpha),
        AlgorithmId::BrowkinI => env.floor_s(alpha),
        AlgorithmId::BrowkinII => {
            if n.is_multiple_of(2) {
                env.floor_s(alpha)
            } else {
                t_signed(env, alpha)
            }
        }
        AlgorithmId::Mrs3 => match n % 3 {
            0 => env.floor_s(alpha),
            1 => t_signed(env, alpha),
            _ => env.floor_s(alpha) - Rational::from_integer(env.floor_u(alpha)?.into()),
        },
        AlgorithmId::MrST => {
            if n.is_multiple_of(2) {
                env.floor_s(alpha)
            } else {
                env.floor_t(alpha)
            }
        }
    })
}

/// One step on a general element `a + b r`.
pub(crate) fn apply_scalar(alg: AlgorithmId, env: &Env, alpha: &Scalar, n: usize) -> Result<(Rational, Option<(Rational, Scalar)>)> {
    let a = choose(alg, env, alpha, n)?;
    let rest = alpha.sub_rational(&a);
    if rest.is_zero() {
        return Ok((a, None));
    }
    let b = match alg {
        AlgorithmId::Schneider => pow_rat(env.p, env.valuation(&rest).finite().expect("nonzero")),
        _ => Rational::one(),
    };
    let next = env.recip(&rest).expect("nonzero").scale(&b);
    Ok((a, Some((b, next))))
}

/// Applies the policy of `alg` to the complete quotient `alpha` of index `n`.
pub(crate) fn apply(alg: AlgorithmId, env: &Env, alpha: &State, n: usize) -> Result<Step> {
    match alpha {
        State::Rat(r) => {
            let (a, next) = apply_scalar(alg, env, &Scalar::rational(r.clone()), n)?;
            Ok(Step { a, next: next.map(|(b, x)| (b, State::Rat(x.a))) })
        }
        State::Quad(q) => {
            let a = choose(alg, env, q, n)?;
            let b = match alg {
                AlgorithmId::Schneider => {
                    pow_rat(env.p, q.valuation_minus(env, &a).finite().expect("irrational"))
                }
                _ => Rational::one(),
            };
            let field = env.field.expect("quadratic state without a field");
            let pn = |x: &Rational| PNum::from_rational(x, env.p).expect("integer parts lie in Z[1/p]");
            let next = q.shift(&pn(&a), &pn(&b), field.radicand(), env.p);
            Ok(Step { a, next: Some((b, State::Quad(next))) })
        }
    }
}

/// Everything the driver saw: quotients, numerators and the complete
/// quotients `alpha_0, alpha_1, ...` (one per stored quotient).
pub(crate) struct Trace {
    pub quotients: Vec<Rational>,
    pub numerators: Vec<Rational>,
    pub states: Vec<State>,
    pub status: Status,
    /// Set when the `stop` hook ended the run early.
    pub stopped: bool,
}

/// Runs the policy from `alpha` for at most `budget` steps. `stop` sees
/// every complete quotient before its step is applied and may end the run;
/// the status is then `Truncated` with the number of quotients produced.
pub(crate) fn drive(
    alg: AlgorithmId,
    env: &Env,
    alpha: State,
    budget: usize,
    mut stop: impl FnMut(usize, &State) -> bool,
) -> Result<Trace> {
    let modulus = alg.phase_modulus();
    let mut seen: HashMap<(State, usize), usize> = HashMap::new();
    let mut trace = Trace {
        quotients: Vec::new(),
        numerators: Vec::new(),
        states: Vec::new(),
        status: Status::Truncated { steps: 0 },
        stopped: false,
    };
    let mut alpha = alpha;
    let mut n = 0usize;
    loop {
        let key = (alpha.clone(), n % modulus);
        if let Some(&first) = seen.get(&key) {
            trace.status = Status::Periodic { pre_period: first, period: n - first };
            return Ok(trace);
        }
        if n >= budget {
            trace.status = Status::Truncated { steps: n };
            return Ok(trace);
        }
        if stop(n, &alpha) {
            trace.status = Status::Truncated { steps: n };
            trace.stopped = true;
            return Ok(trace);
        }
        let step = apply(alg, env, &alpha, n)?;
        trace.quotients.push(step.a);
        trace.states.push(alpha.clone());
        match step.next {
            None => {
                trace.status = Status::Finite;
                return Ok(trace);
            }
            Some((b, next)) => {
                seen.insert(key, n);
                trace.numerators.push(b);
                alpha = next;
            }
        }
        n += 1;
    }
}

/// Budget for Schneider on a rational `a/b`: `64 * ceil(ln^2 H)` with
/// `H = max(|a|, |b|)`, at least 64 and at most the context budget.
pub fn schneider_rational_budget(x: &Rational, step_budget: usize) -> usize {
    let h = x.numer().abs().max(x.denom().abs());
    let ln = bigint_ln(&h);
    let bound = (64.0 * (ln * ln).ceil()).max(64.0);
    if bound >= step_budget as f64 {
        step_budget
    } else {
        bound as usize
    }
}

fn bigint_ln(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        n.to_f64().unwrap_or(1.0).max(1.0).ln()
    } else {
        let shift = bits - 64;
        let top = (n >> shift).to_f64().unwrap_or(1.0);
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

pub(crate) fn check_convention(alg: AlgorithmId, ctx: &PadicContext) -> Result<()> {
    if ctx.convention != alg.convention() {
        return Err(Error::ConventionMismatch(format!(
            "{alg} needs the {} convention, context uses {}",
            alg.convention(),
            ctx.convention
        )));
    }
    Ok(())
}

/// Validates inputs and builds the field for `x`.
pub(crate) fn prepare(
    x: &QpNumber,
    alg: AlgorithmId,
    ctx: &PadicContext,
) -> Result<Option<QuadField>> {
    ctx.validate()?;
    check_convention(alg, ctx)?;
    let field = match x {
        QpNumber::Rational(_) => None,
        QpNumber::Quadratic(q) => Some(QuadField::new(&q.d, ctx.p)?),
    };
    if alg == AlgorithmId::Schneider {
        let env = Env::new(ctx, field.as_ref());
        if let Valuation::Finite(v) = env.valuation(&x.to_scalar()) {
            if v < 0 {
                return Err(Error::SchneiderDomain);
            }
        }
    }
    Ok(field)
}

pub(crate) fn default_budget(x: &QpNumber, alg: AlgorithmId, ctx: &PadicContext) -> usize {
    match (alg, x) {
        (AlgorithmId::Schneider, QpNumber::Rational(r)) => {
            schneider_rational_budget(r, ctx.step_budget)
        }
        _ => ctx.step_budget,
    }
}

/// Expands `x` until it terminates, a complete quotient repeats (in the same
/// phase), or the budget runs out.
pub fn expand(x: &QpNumber, alg: AlgorithmId, ctx: &PadicContext) -> Result<Expansion> {
    let field = prepare(x, alg, ctx)?;
    let env = Env::new(ctx, field.as_ref());
    let budget = default_budget(x, alg, ctx);
    let trace = drive(alg, &env, State::from_qp(x, env.p), budget, |_, _| false)?;
    Ok(Expansion::from_trace(trace, Some(alg), *ctx))
}

/// The complete quotients `alpha_0, ..., alpha_{count-1}` (fewer when the
/// expansion terminates or repeats first).
pub fn complete_quotients(x: &QpNumber, alg: AlgorithmId, ctx: &PadicContext, count: usize) -> Result<Vec<QpNumber>> {
    let field = prepare(x, alg, ctx)?;
    let env = Env::new(ctx, field.as_ref());
    let d = x.radicand().cloned().unwrap_or_else(BigInt::one);
    let trace = drive(alg, &env, State::from_qp(x, env.p), count, |_, _| false)?;
    Ok(trace.states.iter().map(|s| s.to_qp(&d, env.p)).collect())
}

/// The position of an expansion in progress.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionState {
    pub alpha: QpNumber,
    pub index: usize,
    pub terminated: bool,
}

impl ExpansionState {
    pub fn new(x: QpNumber) -> Self {
        ExpansionState { alpha: x, index: 0, terminated: false }
    }
}

/// Result of a single step: `a_n`, then `b_{n+1}` (absent on termination).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepResult {
    pub a: Rational,
    pub b: Option<Rational>,
    pub next: ExpansionState,
}

/// One policy application on `state`.
pub fn step(state: &ExpansionState, alg: AlgorithmId, ctx: &PadicContext) -> Result<StepResult> {
    if state.terminated {
        return Err(Error::Terminated);
    }
    let field = prepare(&state.alpha, alg, ctx)?;
    let env = Env::new(ctx, field.as_ref());
    let d = state.alpha.radicand().cloned().unwrap_or_else(BigInt::one);
    let out = apply(alg, &env, &State::from_qp(&state.alpha, env.p), state.index)?;
    Ok(match out.next {
        None => StepResult {
            a: out.a,
            b: None,
            next: ExpansionState {
                alpha: state.alpha.clone(),
                index: state.index,
                terminated: true,
            },
        },
        Some((b, next)) => StepResult {
            a: out.a,
            b: Some(b),
            next: ExpansionState {
                alpha: next.to_qp(&d, env.p),
                index: state.index + 1,
                terminated: false,
            },
        },
    })
}
