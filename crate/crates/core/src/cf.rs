//! Algorithm-independent continued fraction machinery: the `Expansion`
//! container, convergents, matrix products and evaluation.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Number, Value};

use crate::algorithms::{self, AlgorithmId, State, Trace};
use crate::error::{Error, Result};
use crate::padic::{
    fmt_rational, is_square, rational_valuation, split_int, Convention, Env, PadicContext,
    QpNumber, QuadField, Rational, Scalar, Valuation,
};

/// How an expansion ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Finite,
    Periodic { pre_period: usize, period: usize },
    Truncated { steps: usize },
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Finite => f.write_str("finite"),
            Status::Periodic { pre_period, period } => write!(f, "periodic({pre_period},{period})"),
            Status::Truncated { steps } => write!(f, "truncated({steps})"),
        }
    }
}

/// Partial quotients `a_n` and numerators `b_n` of a continued fraction
///
/// ```text
/// a_0 + b_1/(a_1 + b_2/(a_2 + ...))
/// ```
///
/// Periodic expansions store the pre-period and one period; later terms are
/// synthesized. `numerators[k]` holds `b_{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    quotients: Vec<Rational>,
    numerators: Vec<Rational>,
    status: Status,
    algorithm: Option<AlgorithmId>,
    context: PadicContext,
}

/// `(A_n, B_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub index: usize,
    /// `A_n`
    pub num: Rational,
    /// `B_n`
    pub den: Rational,
}

impl Convergent {
    pub fn value(&self) -> Option<Rational> {
        if self.den.is_zero() {
            None
        } else {
            Some(&self.num / &self.den)
        }
    }
}

pub type Matrix = [[Rational; 2]; 2];

fn mat_mul(x: &Matrix, y: &Matrix) -> Matrix {
    [
        [
            &x[0][0] * &y[0][0] + &x[0][1] * &y[1][0],
            &x[0][0] * &y[0][1] + &x[0][1] * &y[1][1],
        ],
        [
            &x[1][0] * &y[0][0] + &x[1][1] * &y[1][0],
            &x[1][0] * &y[0][1] + &x[1][1] * &y[1][1],
        ],
    ]
}

fn identity() -> Matrix {
    [[Rational::one(), Rational::zero()], [Rational::zero(), Rational::one()]]
}

impl Expansion {
    /// Builds an expansion from raw parts, checking that the lengths agree
    /// with the status.
    pub fn new(
        quotients: Vec<Rational>,
        numerators: Vec<Rational>,
        status: Status,
        algorithm: Option<AlgorithmId>,
        context: PadicContext,
    ) -> Result<Self> {
        context.validate()?;
        let expected = match status {
            Status::Finite => {
                if quotients.is_empty() {
                    return Err(Error::InvalidInput("finite expansion without quotients".into()));
                }
                quotients.len() - 1
            }
            Status::Periodic { pre_period, period } => {
                if period == 0 || pre_period + period != quotients.len() {
                    return Err(Error::InvalidInput(format!(
                        "periodic({pre_period},{period}) needs exactly {} quotients, got {}",
                        pre_period + period,
                        quotients.len()
                    )));
                }
                quotients.len()
            }
            Status::Truncated { steps } => {
                if steps != quotients.len() {
                    return Err(Error::InvalidInput(format!(
                        "truncated({steps}) needs {steps} quotients, got {}",
                        quotients.len()
                    )));
                }
                steps
            }
        };
        if numerators.len() != expected {
            return Err(Error::InvalidInput(format!(
                "expected {expected} numerators, got {}",
                numerators.len()
            )));
        }
        if numerators.iter().any(Zero::is_zero) {
            return Err(Error::InvalidInput("partial numerators must be nonzero".into()));
        }
        Ok(Expansion { quotients, numerators, status, algorithm, context })
    }

    /// A simple (`b_n = 1`) expansion not tied to any algorithm.
    pub fn simple(quotients: Vec<Rational>, status: Status, context: PadicContext) -> Result<Self> {
        let count = match status {
            Status::Finite => quotients.len().saturating_sub(1),
            _ => quotients.len(),
        };
        Self::new(quotients, vec![Rational::one(); count], status, None, context)
    }

    pub(crate) fn from_trace(trace: Trace, algorithm: Option<AlgorithmId>, ctx: PadicContext) -> Self {
        Expansion {
            quotients: trace.quotients,
            numerators: trace.numerators,
            status: trace.status,
            algorithm,
            context: ctx,
        }
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn algorithm(&self) -> Option<AlgorithmId> {
        self.algorithm
    }

    pub fn context(&self) -> &PadicContext {
        &self.context
    }

    pub fn stored_quotients(&self) -> &[Rational] {
        &self.quotients
    }

    pub fn stored_numerators(&self) -> &[Rational] {
        &self.numerators
    }

    pub fn is_simple(&self) -> bool {
        self.numerators.iter().all(One::is_one)
    }

    /// Number of available quotients; `None` for periodic (unbounded).
    pub fn len(&self) -> Option<usize> {
        match self.status {
            Status::Periodic { .. } => None,
            _ => Some(self.quotients.len()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    fn periodic_index(&self, idx: usize) -> usize {
        match self.status {
            Status::Periodic { pre_period, period } if idx >= pre_period => {
                pre_period + (idx - pre_period) % period
            }
            _ => idx,
        }
    }

    fn beyond(&self, index: usize) -> Error {
        Error::IndexBeyondFinite { index, len: self.quotients.len() }
    }

    /// `a_n`, synthesized from the period when needed.
    pub fn quotient(&self, n: usize) -> Result<Rational> {
        let idx = self.periodic_index(n);
        self.quotients.get(idx).cloned().ok_or_else(|| self.beyond(n))
    }

    /// `b_n` for `n >= 1`.
    pub fn numerator(&self, n: usize) -> Result<Rational> {
        if n == 0 {
            return Err(Error::InvalidInput("b_0 is not defined".into()));
        }
        let idx = self.periodic_index(n - 1);
        self.numerators.get(idx).cloned().ok_or_else(|| self.beyond(n))
    }

    /// The first `count` quotients (all available ones if fewer exist).
    pub fn prefix(&self, count: usize) -> Vec<Rational> {
        let limit = self.len().map_or(count, |l| l.min(count));
        (0..limit).map(|n| self.quotient(n).expect("in range")).collect()
    }

    /// JSON form; integers are emitted as exact JSON numbers.
    pub fn to_json(&self) -> Value {
        let status = match self.status {
            Status::Finite => json!({"kind": "finite"}),
            Status::Periodic { pre_period, period } => {
                json!({"kind": "periodic", "pre_period": pre_period, "period": period})
            }
            Status::Truncated { steps } => json!({"kind": "truncated", "steps": steps}),
        };
        json!({
            "p": self.context.p,
            "convention": self.context.convention.to_string(),
            "algorithm": self.algorithm.map_or("custom", AlgorithmId::name),
            "quotients": self.quotients.iter().map(rational_json).collect::<Vec<_>>(),
            "numerators": self.numerators.iter().map(rational_json).collect::<Vec<_>>(),
            "status": status,
            "precision_guard": self.context.precision_guard,
            "step_budget": self.context.step_budget,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = as_object(v)?;
        let p = field_u64(obj, "p")?;
        let convention = match field_str(obj, "convention")? {
            "standard" => Convention::Standard,
            "balanced" => Convention::Balanced,
            other => return Err(Error::Parse(format!("unknown convention {other:?}"))),
        };
        let mut ctx = PadicContext::new(p, convention)?;
        if obj.contains_key("precision_guard") {
            ctx = ctx.with_guard(field_u64(obj, "precision_guard")? as u32)?;
        }
        if obj.contains_key("step_budget") {
            ctx = ctx.with_budget(field_u64(obj, "step_budget")? as usize)?;
        }
        let algorithm = match field_str(obj, "algorithm")? {
            "custom" => None,
            name => Some(AlgorithmId::from_str(name)?),
        };
        let quotients = rational_list(obj.get("quotients"))?;
        let numerators = rational_list(obj.get("numerators"))?;
        let st = as_object(obj.get("status").ok_or_else(|| missing("status"))?)?;
        let status = match field_str(st, "kind")? {
            "finite" => Status::Finite,
            "periodic" => Status::Periodic {
                pre_period: field_u64(st, "pre_period")? as usize,
                period: field_u64(st, "period")? as usize,
            },
            "truncated" => Status::Truncated { steps: field_u64(st, "steps")? as usize },
            other => return Err(Error::Parse(format!("unknown status {other:?}"))),
        };
        Expansion::new(quotients, numerators, status, algorithm, ctx)
    }
}

impl fmt::Display for Expansion {
    /// `[1, 44/7 | 48/7]` for periodic, `[1, -5/7]` for finite and
    /// `[a_0, ..., a_k, ...]` for truncated expansions.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[Rational]| xs.iter().map(fmt_rational).collect::<Vec<_>>().join(", ");
        match self.status {
            Status::Finite => write!(f, "[{}]", join(&self.quotients)),
            Status::Periodic { pre_period, .. } => {
                let (head, tail) = self.quotients.split_at(pre_period);
                if head.is_empty() {
                    write!(f, "[| {}]", join(tail))
                } else {
                    write!(f, "[{} | {}]", join(head), join(tail))
                }
            }
            Status::Truncated { .. } => {
                if self.quotients.is_empty() {
                    f.write_str("[...]")
                } else {
                    write!(f, "[{}, ...]", join(&self.quotients))
                }
            }
        }
    }
}

pub(crate) fn int_json(n: &BigInt) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("integer literal"))
}

pub(crate) fn rational_json(r: &Rational) -> Value {
    Value::Array(vec![int_json(r.numer()), int_json(r.denom())])
}

pub(crate) fn json_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => BigInt::from_str(&n.to_string())
            .map_err(|_| Error::Parse(format!("expected an integer, got {n}"))),
        other => Err(Error::Parse(format!("expected an integer, got {other}"))),
    }
}

pub(crate) fn json_rational(v: &Value) -> Result<Rational> {
    match v.as_array().map(Vec::as_slice) {
        Some([n, d]) => {
            let d = json_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(Rational::new(json_int(n)?, d))
        }
        _ => Err(Error::Parse(format!("expected [num, den], got {v}"))),
    }
}

pub(crate) fn rational_list(v: Option<&Value>) -> Result<Vec<Rational>> {
    v.and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("expected an array of [num, den] pairs".into()))?
        .iter()
        .map(json_rational)
        .collect()
}

pub(crate) fn as_object(v: &Value) -> Result<&Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::Parse("expected a JSON object".into()))
}

fn missing(key: &str) -> Error {
    Error::Parse(format!("missing key {key:?}"))
}

pub(crate) fn field_u64(obj: &Map<String, Value>, key: &str) -> Result<u64> {
    obj.get(key)
        .ok_or_else(|| missing(key))?
        .as_u64()
        .ok_or_else(|| Error::Parse(format!("{key:?} must be a non-negative integer")))
}

pub(crate) fn field_str<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a str> {
    obj.get(key)
        .ok_or_else(|| missing(key))?
        .as_str()
        .ok_or_else(|| Error::Parse(format!("{key:?} must be a string")))
}

/// Convergents `(A_0, B_0), ..., (A_n, B_n)` from `A_{-1} = 1`, `B_{-1} = 0`,
/// `A_n = a_n A_{n-1} + b_n A_{n-2}`.
pub fn convergents(e: &Expansion, upto: usize) -> Result<Vec<Convergent>> {
    if let Some(len) = e.len() {
        if upto >= len {
            return Err(e.beyond(upto));
        }
    }
    let mut out = Vec::with_capacity(upto + 1);
    let (mut a_prev, mut b_prev) = (Rational::one(), Rational::zero());
    let a0 = e.quotient(0)?;
    let (mut a_cur, mut b_cur) = (a0, Rational::one());
    out.push(Convergent { index: 0, num: a_cur.clone(), den: b_cur.clone() });
    for n in 1..=upto {
        let a = e.quotient(n)?;
        let b = e.numerator(n)?;
        let a_next = &a * &a_cur + &b * &a_prev;
        let b_next = &a * &b_cur + &b * &b_prev;
        a_prev = std::mem::replace(&mut a_cur, a_next);
        b_prev = std::mem::replace(&mut b_cur, b_next);
        out.push(Convergent { index: n, num: a_cur.clone(), den: b_cur.clone() });
    }
    Ok(out)
}

/// `[[a_0, 1], [1, 0]] * prod_{i=1..n} [[1, 0], [0, b_i]] [[a_i, 1], [1, 0]]`,
/// which equals `[[A_n, A_{n-1}], [B_n, B_{n-1}]]`.
pub fn matrix_form(e: &Expansion, n: usize) -> Result<Matrix> {
    if let Some(len) = e.len() {
        if n >= len {
            return Err(e.beyond(n));
        }
    }
    let one = Rational::one;
    let zero = Rational::zero;
    let mut m: Matrix = [[e.quotient(0)?, one()], [one(), zero()]];
    for i in 1..=n {
        let scale: Matrix = [[one(), zero()], [zero(), e.numerator(i)?]];
        let factor: Matrix = [[e.quotient(i)?, one()], [one(), zero()]];
        m = mat_mul(&mat_mul(&m, &scale), &factor);
    }
    Ok(m)
}

/// The value of a finite expansion, folded from the last quotient.
pub fn evaluate_finite(e: &Expansion) -> Result<Rational> {
    if e.status != Status::Finite {
        return Err(Error::NotFinite);
    }
    let mut acc = e.quotients.last().expect("nonempty").clone();
    for k in (0..e.quotients.len() - 1).rev() {
        if acc.is_zero() {
            return Err(Error::DivisionByZero);
        }
        acc = &e.quotients[k] + &e.numerators[k] / acc;
    }
    Ok(acc)
}

/// `M_k = [[a_k, b_{k+1}], [1, 0]]`, so that `alpha_k = M_k . alpha_{k+1}`.
fn mobius_product(e: &Expansion, from: usize, to: usize) -> Matrix {
    let mut m = identity();
    for k in from..to {
        let f: Matrix = [
            [e.quotients[k].clone(), e.numerators[k].clone()],
            [Rational::one(), Rational::zero()],
        ];
        m = mat_mul(&m, &f);
    }
    m
}

/// Largest square `s^2` dividing `n` found by trial division up to 10^4,
/// and by `p`; returns `(core, s)` with `n = s^2 core`.
fn strip_squares(n: &BigInt, p: u64) -> (BigInt, BigInt) {
    let mut core = n.clone();
    let mut s = BigInt::one();
    let pb = BigInt::from(p);
    let (e, _) = split_int(&core, &pb);
    for _ in 0..e / 2 {
        core /= &pb * &pb;
        s *= &pb;
    }
    let mut k = 2u64;
    while k <= 10_000 {
        let kk = BigInt::from(k * k);
        if kk > core.abs() {
            break;
        }
        while (&core % &kk).is_zero() {
            core /= &kk;
            s *= k;
        }
        k += 1;
    }
    (core, s)
}

/// Roots `center +- coeff sqrt(core)` of the fixed-point equation of the
/// period block. `core = 1` means the roots are rational.
struct Candidates {
    core: BigInt,
    roots: Vec<Scalar>,
}

fn fixed_points(m: &Matrix, p: u64) -> Result<Candidates> {
    let [[al, be], [ga, de]] = m;
    let one = BigInt::one;
    // gamma y^2 + (delta - alpha) y - beta = 0
    if ga.is_zero() {
        let lin = de - al;
        if lin.is_zero() {
            return Err(Error::InconsistentPeriod("degenerate period matrix".into()));
        }
        return Ok(Candidates { core: one(), roots: vec![Scalar::rational(be / lin)] });
    }
    let two_g = ga * Rational::from_integer(2.into());
    let center = (al - de) / &two_g;
    let disc = (de - al) * (de - al) + Rational::from_integer(4.into()) * be * ga;
    if disc.is_zero() {
        return Ok(Candidates { core: one(), roots: vec![Scalar::rational(center)] });
    }
    // sqrt(n/d) = sqrt(n d) / d
    let nd = disc.numer() * disc.denom();
    let (mut core, s) = strip_squares(&nd, p);
    let mut coeff = Rational::new(s, disc.denom().clone()) / &two_g;
    if is_square(&core) {
        coeff *= Rational::from_integer(core.sqrt());
        core = one();
    }
    let roots = if core.is_one() {
        vec![Scalar::rational(&center + &coeff), Scalar::rational(&center - &coeff)]
    } else {
        vec![Scalar { a: center.clone(), b: coeff.clone() }, Scalar { a: center, b: -coeff }]
    };
    Ok(Candidates { core, roots })
}

/// Whether running `alg` from `y` reproduces `periods` copies of the stored
/// block.
fn reproduces(e: &Expansion, alg: AlgorithmId, env: &Env, y: &Scalar, periods: usize) -> bool {
    let Status::Periodic { pre_period, period } = e.status else { return false };
    let d = env.radicand();
    let start = State::from_scalar(y, &d, env.p);
    let mut alpha = start.clone();
    for k in 0..period * periods {
        let n = pre_period + k;
        let Ok(step) = algorithms::apply(alg, env, &alpha, n) else { return false };
        let idx = pre_period + k % period;
        if step.a != e.quotients[idx] {
            return false;
        }
        match step.next {
            Some((b, next)) if b == e.numerators[idx] => alpha = next,
            _ => return false,
        }
    }
    alpha == start
}

/// A deep convergent of the periodic tail, or `None` if it is infinite.
fn tail_convergent(e: &Expansion, depth: usize) -> Result<Option<Rational>> {
    let Status::Periodic { pre_period, period } = e.status else { unreachable!() };
    let tail = Expansion {
        quotients: e.quotients[pre_period..].to_vec(),
        numerators: e.numerators[pre_period..].to_vec(),
        status: Status::Periodic { pre_period: 0, period },
        algorithm: None,
        context: e.context,
    };
    Ok(convergents(&tail, depth)?.pop().expect("nonempty").value())
}

/// For expansions not produced by an algorithm: the root the tail
/// convergents approach p-adically, or failing that (the roots are not in
/// Q_p, or the convergents do not converge p-adically) in the reals.
fn limit_root(e: &Expansion, cands: &Candidates) -> Result<usize> {
    let Status::Periodic { period, .. } = e.status else { unreachable!() };
    let roots = &cands.roots;
    if let Ok(field) = QuadField::new(&cands.core, e.context.p).map(Some).or_else(|err| {
        if cands.core.is_one() {
            Ok(None)
        } else {
            Err(err)
        }
    }) {
        let env = Env::new(&e.context, field.as_ref());
        // a root counts as the p-adic limit only if the distance to it keeps
        // shrinking along the convergents
        let mut seqs: [Vec<Valuation>; 2] = [Vec::new(), Vec::new()];
        for depth in [8, 16, 32, 64].map(|k| k * period) {
            let Some(c) = tail_convergent(e, depth)? else { continue };
            for (i, y) in roots.iter().enumerate() {
                seqs[i].push(env.valuation(&y.sub_rational(&c)));
            }
        }
        let converging = |v: &Vec<Valuation>| v.len() >= 3 && v.windows(2).all(|w| w[0] < w[1]);
        match (converging(&seqs[0]), converging(&seqs[1])) {
            (true, false) => return Ok(0),
            (false, true) => return Ok(1),
            _ => {}
        }
    }
    // Real limit: |u + w| < |u - w| iff u w < 0, with u = center - C and
    // w = b sqrt(core) for the first root.
    if cands.core.is_positive() {
        let c = tail_convergent(e, period * 64)?;
        if let Some(c) = c {
            let u = &roots[0].a - &c;
            let w = if cands.core.is_one() { roots[0].a.clone() - &roots[1].a } else { roots[0].b.clone() };
            let prod = u * w;
            if !prod.is_zero() {
                return Ok(if prod.is_negative() { 0 } else { 1 });
            }
        }
    }
    Err(Error::InconsistentPeriod("the convergents do not single out a fixed point".into()))
}

/// Exact value of a periodic expansion: the fixed point of the period's
/// Mobius map that regenerates the period, pushed through the pre-period.
///
/// Expansions produced by an algorithm are checked by re-running the
/// algorithm from each root. Hand-built expansions take the root their
/// convergents approach, p-adically when possible and in the reals
/// otherwise.
pub fn evaluate_periodic(e: &Expansion) -> Result<QpNumber> {
    let Status::Periodic { pre_period, period } = e.status else {
        return Err(Error::NotPeriodic);
    };
    let m = mobius_product(e, pre_period, pre_period + period);
    let cands = fixed_points(&m, e.context.p)?;
    let chosen = match (e.algorithm, cands.roots.len()) {
        (Some(alg), _) => {
            let field = if cands.core.is_one() {
                None
            } else {
                Some(QuadField::new(&cands.core, e.context.p).map_err(|err| {
                    Error::InconsistentPeriod(format!("fixed points outside Q_{}: {err}", e.context.p))
                })?)
            };
            let env = Env::new(&e.context, field.as_ref());
            cands.roots.iter().position(|y| reproduces(e, alg, &env, y, 2)).ok_or_else(|| {
                Error::InconsistentPeriod(format!(
                    "neither fixed point regenerates the period under {alg}"
                ))
            })?
        }
        (None, 1) => 0,
        (None, _) => limit_root(e, &cands)?,
    };
    let d = &cands.core;
    let y = &cands.roots[chosen];
    let pre = mobius_product(e, 0, pre_period);
    let lift = |k: &Rational| Scalar::rational(k.clone());
    let num = lift(&pre[0][0]).mul(y, d).add(&lift(&pre[0][1]));
    let den = lift(&pre[1][0]).mul(y, d).add(&lift(&pre[1][1]));
    let x = num.div(&den, d).ok_or(Error::DivisionByZero)?;
    Ok(x.to_qp(d))
}

/// `v_p(x - A_k/B_k)` for `k = 0..=upto`, computed exactly.
pub fn approximation_profile(e: &Expansion, x: &QpNumber, upto: usize) -> Result<Vec<Valuation>> {
    let field = x.field(&e.context)?;
    let env = Env::new(&e.context, field.as_deref());
    let xs = x.to_scalar();
    convergents(e, upto)?
        .iter()
        .map(|c| {
            let v = c.value().ok_or(Error::DivisionByZero)?;
            Ok(env.valuation(&xs.sub_rational(&v)))
        })
        .collect()
}

/// The valuation the convergence theory predicts for
/// `v_p(x - A_k/B_k)`: `v_p(b_1 ... b_{k+1}) - v_p(B_k B_{k+1})`, which is
/// `-v_p(B_k B_{k+1})` for simple expansions. The last index of a finite
/// expansion maps to `Infinite`.
pub fn predicted_profile(e: &Expansion, upto: usize) -> Result<Vec<Valuation>> {
    let p = e.context.p;
    let last = match e.status {
        Status::Finite => Some(e.quotients.len() - 1),
        Status::Truncated { steps } => {
            if upto + 1 >= steps {
                return Err(e.beyond(upto + 1));
            }
            None
        }
        Status::Periodic { .. } => None,
    };
    let reach = match last {
        Some(l) if upto > l => return Err(e.beyond(upto)),
        Some(l) if upto == l => upto,
        _ => upto + 1,
    };
    let convs = convergents(e, reach)?;
    let mut out = Vec::with_capacity(upto + 1);
    let mut prod_b = 0i64;
    for k in 0..=upto {
        if Some(k) == last {
            out.push(Valuation::Infinite);
            continue;
        }
        prod_b += rational_valuation(&e.numerator(k + 1)?, p).finite().expect("nonzero");
        let bb = &convs[k].den * &convs[k + 1].den;
        out.push(match rational_valuation(&bb, p) {
            Valuation::Finite(v) => Valuation::Finite(prod_b - v),
            Valuation::Infinite => Valuation::Infinite,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::expand;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn ctx(p: u64, c: Convention) -> PadicContext {
        PadicContext::new(p, c).unwrap()
    }

    fn finite(qs: Vec<Rational>, p: u64) -> Expansion {
        Expansion::simple(qs, Status::Finite, ctx(p, Convention::Balanced)).unwrap()
    }

    #[test]
    fn convergent_examples() {
        let e = finite(vec![r(1, 1), r(-5, 7)], 7);
        let c = convergents(&e, 1).unwrap();
        assert_eq!(c[1].value().unwrap(), r(-2, 5));
        let e = finite(vec![r(3, 1)], 7);
        assert_eq!(convergents(&e, 0).unwrap()[0], Convergent { index: 0, num: r(3, 1), den: r(1, 1) });
        assert_eq!(
            convergents(&e, 1),
            Err(Error::IndexBeyondFinite { index: 1, len: 1 })
        );
        let e = finite(vec![r(1, 1), r(-1, 5), r(-1, 1), r(-3, 5), r(1, 1)], 5);
        assert_eq!(convergents(&e, 4).unwrap()[4].value().unwrap(), r(22, 7));
        assert_eq!(evaluate_finite(&e).unwrap(), r(22, 7));
    }

    #[test]
    fn matrix_agrees_with_recursion() {
        let c = ctx(5, Convention::Standard);
        let e = expand(&QpNumber::rational(2, 7).unwrap(), AlgorithmId::Schneider, &c).unwrap();
        let convs = convergents(&e, 12).unwrap();
        for n in 1..=12 {
            let m = matrix_form(&e, n).unwrap();
            assert_eq!(m[0][0], convs[n].num);
            assert_eq!(m[1][0], convs[n].den);
            assert_eq!(m[0][1], convs[n - 1].num);
            assert_eq!(m[1][1], convs[n - 1].den);
        }
        let m0 = matrix_form(&e, 0).unwrap();
        assert_eq!(m0, [[r(1, 1), r(1, 1)], [r(1, 1), r(0, 1)]]);
    }

    #[test]
    fn determinant_identity_with_numerators() {
        let c = ctx(5, Convention::Standard);
        let e = expand(&QpNumber::rational(2, 7).unwrap(), AlgorithmId::Schneider, &c).unwrap();
        let convs = convergents(&e, 10).unwrap();
        let mut prod = Rational::one();
        for n in 1..=10 {
            prod *= e.numerator(n).unwrap();
            let det = &convs[n].num * &convs[n - 1].den - &convs[n - 1].num * &convs[n].den;
            let sign = if n % 2 == 1 { r(1, 1) } else { r(-1, 1) };
            assert_eq!(det, sign * &prod);
        }
    }

    #[test]
    fn evaluate_finite_requires_finite() {
        let c = ctx(7, Convention::Standard);
        let e = expand(&QpNumber::rational(-2, 5).unwrap(), AlgorithmId::Ruban, &c).unwrap();
        assert_eq!(evaluate_finite(&e), Err(Error::NotFinite));
        let f = finite(vec![r(1, 1)], 7);
        assert_eq!(evaluate_periodic(&f), Err(Error::NotPeriodic));
    }

    #[test]
    fn periodic_ruban_evaluates_back() {
        let c = ctx(7, Convention::Standard);
        let e = expand(&QpNumber::rational(-2, 5).unwrap(), AlgorithmId::Ruban, &c).unwrap();
        assert_eq!(evaluate_periodic(&e).unwrap(), QpNumber::rational(-2, 5).unwrap());
    }

    #[test]
    fn pure_lao_tail_value() {
        // [overline{p - 1/p}] is the fixed point -1/p, the tail of -p.
        for p in [3i64, 5, 7, 11] {
            let c = ctx(p as u64, Convention::Standard);
            let e = Expansion::new(
                vec![r(p * p - 1, p)],
                vec![r(1, 1)],
                Status::Periodic { pre_period: 0, period: 1 },
                Some(AlgorithmId::Ruban),
                c,
            )
            .unwrap();
            assert_eq!(evaluate_periodic(&e).unwrap(), QpNumber::rational(-1, p).unwrap());
            let custom = Expansion::simple(
                vec![r(p * p - 1, p)],
                Status::Periodic { pre_period: 0, period: 1 },
                c,
            )
            .unwrap();
            assert_eq!(evaluate_periodic(&custom).unwrap(), QpNumber::rational(-1, p).unwrap());
        }
    }

    #[test]
    fn real_limit_fallback() {
        // [1, overline{2, 2}] = sqrt(2)
        let c = ctx(7, Convention::Balanced);
        let e = Expansion::simple(
            vec![r(1, 1), r(2, 1), r(2, 1)],
            Status::Periodic { pre_period: 1, period: 2 },
            c,
        )
        .unwrap();
        let x = evaluate_periodic(&e).unwrap();
        let QpNumber::Quadratic(q) = &x else { panic!("{x}") };
        assert_eq!(q.d, BigInt::from(2));
        assert!(q.p.is_zero());
        // quotients of valuation 0 do not converge 7-adically; the real
        // limit is +sqrt(2)
        assert_eq!(q.q, r(1, 1));
    }

    #[test]
    fn quadratic_periodic_round_trip() {
        for alg in [AlgorithmId::BrowkinI, AlgorithmId::BrowkinII, AlgorithmId::MrST] {
            for d in [2i64, 11, 15, 22, -3, -5] {
                let c = alg.context(7).unwrap().with_budget(400).unwrap();
                let x = QpNumber::sqrt(d).unwrap();
                let Ok(e) = expand(&x, alg, &c) else { continue };
                if let Status::Periodic { .. } = e.status() {
                    let y = evaluate_periodic(&e).unwrap();
                    assert!(y.same_value(&x, &c).unwrap(), "{alg} {d}: {y}");
                }
            }
        }
    }

    #[test]
    fn text_and_json() {
        let c = ctx(7, Convention::Standard);
        let e = expand(&QpNumber::rational(-2, 5).unwrap(), AlgorithmId::Ruban, &c).unwrap();
        assert_eq!(e.to_string(), "[1, 44/7 | 48/7]");
        assert_eq!(e.status().to_string(), "periodic(2,1)");
        let j = e.to_json();
        assert_eq!(j["status"]["pre_period"], 2);
        assert_eq!(Expansion::from_json(&j).unwrap(), e);
        let t = serde_json::to_string(&j).unwrap();
        assert!(t.contains("[[1,1],[44,7],[48,7]]"), "{t}");
        let e2 = finite(vec![r(1, 1), r(-1, 5)], 5);
        assert_eq!(e2.to_string(), "[1, -1/5]");
    }

    #[test]
    fn constructor_checks_lengths() {
        let c = ctx(7, Convention::Standard);
        assert!(Expansion::simple(vec![], Status::Finite, c).is_err());
        assert!(Expansion::simple(vec![r(1, 1)], Status::Periodic { pre_period: 1, period: 1 }, c).is_err());
        assert!(Expansion::new(vec![r(1, 1)], vec![r(0, 1)], Status::Truncated { steps: 1 }, None, c).is_err());
    }

    #[test]
    fn predicted_profile_matches_simple_identity() {
        let c = ctx(7, Convention::Balanced);
        let x = QpNumber::sqrt(2).unwrap();
        let e = expand(&x, AlgorithmId::BrowkinI, &c.with_budget(30).unwrap()).unwrap();
        let actual = approximation_profile(&e, &x, 20).unwrap();
        let predicted = predicted_profile(&e, 20).unwrap();
        assert_eq!(actual, predicted);
    }

    #[test]
    fn strip_squares_examples() {
        assert_eq!(strip_squares(&BigInt::from(8), 7), (BigInt::from(2), BigInt::from(2)));
        assert_eq!(strip_squares(&BigInt::from(98), 7), (BigInt::from(2), BigInt::from(7)));
        assert_eq!(strip_squares(&BigInt::from(-12), 5), (BigInt::from(-3), BigInt::from(2)));
    }
}
