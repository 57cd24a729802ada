//! Convergence validators, finiteness and periodicity classification, and
//! approximation diagnostics.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{Map, Value};

use crate::algorithms::{drive, prepare, AlgorithmId, State};
use crate::cf::{as_object, convergents, field_str, field_u64, Expansion, Status};
use crate::error::{Error, Result};
use crate::padic::{
    pow_int, pow_rat, rational_valuation, Digits, Env, PadicContext, QState, QpNumber, QuadraticIrrational,
    Rational, Valuation,
};

/// Valuation patterns on partial quotients that force convergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConvergenceCondition {
    /// `v(a_n) < 0` for `n >= 1`.
    AllNegative,
    /// `v(a_{2n}) = 0` for `n >= 1` and `v(a_{2n+1}) < 0`.
    EvenZeroOddNegative,
    /// `v(a_n a_{n+1}) < 0` for `n >= 1`.
    PairwiseNegative,
    /// `v(a_{3n+1}) < 0`, `v(a_{3n+2}) = v(a_{3n+3}) = 0` and
    /// `v(a_{3n+3} a_{3n+2} + 1) = 0`.
    ThreeStep,
}

impl ConvergenceCondition {
    pub const ALL: [ConvergenceCondition; 4] = [
        ConvergenceCondition::AllNegative,
        ConvergenceCondition::EvenZeroOddNegative,
        ConvergenceCondition::PairwiseNegative,
        ConvergenceCondition::ThreeStep,
    ];

    /// The pattern an algorithm is built to satisfy, if any.
    pub fn for_algorithm(alg: AlgorithmId) -> Option<Self> {
        match alg {
            AlgorithmId::BrowkinI => Some(ConvergenceCondition::AllNegative),
            AlgorithmId::BrowkinII => Some(ConvergenceCondition::EvenZeroOddNegative),
            AlgorithmId::MrST => Some(ConvergenceCondition::PairwiseNegative),
            AlgorithmId::Mrs3 => Some(ConvergenceCondition::ThreeStep),
            AlgorithmId::Schneider | AlgorithmId::Ruban => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub condition: ConvergenceCondition,
    pub holds: bool,
    pub first_violation: Option<usize>,
}

/// Number of quotients inspected by the validators: everything stored, and
/// three periods past the pre-period for periodic expansions.
fn inspected(e: &Expansion) -> usize {
    match e.status() {
        Status::Finite => e.stored_quotients().len(),
        Status::Truncated { steps } => steps,
        Status::Periodic { pre_period, period } => pre_period + 3 * period.max(2) + 3,
    }
}

fn v(x: &Rational, p: u64) -> Valuation {
    rational_valuation(x, p)
}

fn negative(x: Valuation) -> bool {
    x < Valuation::Finite(0)
}

fn zero(x: Valuation) -> bool {
    x == Valuation::Finite(0)
}

/// Checks `cond` on the inspected prefix of `e`.
pub fn check_convergence(e: &Expansion, cond: ConvergenceCondition) -> Result<ConvergenceReport> {
    let n = inspected(e);
    let p = e.context().p;
    let a = e.prefix(n);
    let va: Vec<Valuation> = a.iter().map(|x| v(x, p)).collect();
    let first_violation = match cond {
        ConvergenceCondition::AllNegative => (1..n).find(|&i| !negative(va[i])),
        ConvergenceCondition::EvenZeroOddNegative => (1..n).find(|&i| {
            if i % 2 == 0 {
                !zero(va[i])
            } else {
                !negative(va[i])
            }
        }),
        ConvergenceCondition::PairwiseNegative => {
            (1..n.saturating_sub(1)).find(|&i| !negative(v(&(&a[i] * &a[i + 1]), p)))
        }
        ConvergenceCondition::ThreeStep => {
            let quotients = (1..n).find(|&i| match i % 3 {
                1 => !negative(va[i]),
                2 => !zero(va[i]),
                _ => !zero(va[i]) || !zero(v(&(&a[i] * &a[i - 1] + Rational::one()), p)),
            });
            let chain = if n >= 2 {
                let convs = convergents(e, n - 1)?;
                let vb: Vec<Valuation> = convs.iter().map(|c| v(&c.den, p)).collect();
                let mut bad = None;
                let mut k = 1;
                while 3 * k + 1 < n {
                    let (b1, b2, b3, b4) = (vb[3 * k - 2], vb[3 * k - 1], vb[3 * k], vb[3 * k + 1]);
                    if !(b1 == b2 && b2 == b3 && b3 > b4) {
                        bad = Some(3 * k - 2);
                        break;
                    }
                    k += 1;
                }
                bad
            } else {
                None
            };
            match (quotients, chain) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            }
        }
    };
    Ok(ConvergenceReport { condition: cond, holds: first_violation.is_none(), first_violation })
}

/// Checks `v(A_k) = v(a_0) + ... + v(a_k)` and `v(B_k) = v(a_1) + ... + v(a_k)`
/// for `k <= upto` (clamped to the available quotients). A zero quotient
/// makes the sums infinite, which never matches a nonzero `A_k`.
pub fn verify_valuation_identities(e: &Expansion, upto: usize) -> bool {
    let upto = match e.len() {
        Some(len) => upto.min(len - 1),
        None => upto,
    };
    let Ok(convs) = convergents(e, upto) else {
        return false;
    };
    let p = e.context().p;
    let a = e.prefix(upto + 1);
    let add = |x: Valuation, y: Valuation| match (x, y) {
        (Valuation::Finite(s), Valuation::Finite(t)) => Valuation::Finite(s + t),
        _ => Valuation::Infinite,
    };
    let mut sum_a = Valuation::Finite(0);
    let mut sum_b = Valuation::Finite(0);
    for k in 0..=upto {
        let vk = v(&a[k], p);
        sum_a = add(sum_a, vk);
        if k > 0 {
            sum_b = add(sum_b, vk);
        }
        if v(&convs[k].num, p) != sum_a || v(&convs[k].den, p) != sum_b {
            return false;
        }
    }
    true
}

/// A sufficient condition for (non-)periodicity that was observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Certificate {
    /// Ruban: `P_n Q_n <= 0` and `P_{n+1}^2 > D`.
    OotoSign,
    /// Schneider: `P_n`, `Q_n` of opposite signs and `P_{n+1}^2 > D`.
    DeWegerSign,
    /// Ruban: both real embeddings of some `alpha_n` are negative.
    TwoNegativeEmbeddings,
    /// Ruban: the complete quotient `-1/p`, after which every quotient is
    /// `p - 1/p`.
    LaoTail,
}

impl Certificate {
    pub fn name(self) -> &'static str {
        match self {
            Certificate::OotoSign => "OotoSign",
            Certificate::DeWegerSign => "DeWegerSign",
            Certificate::TwoNegativeEmbeddings => "TwoNegativeEmbeddings",
            Certificate::LaoTail => "LaoTail",
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Certificate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "OotoSign" => Certificate::OotoSign,
            "DeWegerSign" => Certificate::DeWegerSign,
            "TwoNegativeEmbeddings" => Certificate::TwoNegativeEmbeddings,
            "LaoTail" => Certificate::LaoTail,
            _ => return Err(Error::Parse(format!("unknown certificate {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Finite { steps: usize },
    Periodic { pre_period: usize, period: usize },
    NotPeriodic(Certificate),
    Undetermined { budget: usize },
}

/// Outcome of a classifier. `certificate` is always set for `NotPeriodic`
/// and may accompany `Periodic` (Lao tail).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Classification {
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    pub steps_used: usize,
}

impl Classification {
    fn new(verdict: Verdict, steps_used: usize) -> Self {
        let certificate = match verdict {
            Verdict::NotPeriodic(c) => Some(c),
            _ => None,
        };
        Classification { verdict, certificate, steps_used }
    }

    fn from_status(status: Status, steps_used: usize) -> Self {
        Classification::new(
            match status {
                Status::Finite => Verdict::Finite { steps: steps_used },
                Status::Periodic { pre_period, period } => Verdict::Periodic { pre_period, period },
                Status::Truncated { steps } => Verdict::Undetermined { budget: steps },
            },
            steps_used,
        )
    }

    pub fn verdict_name(&self) -> &'static str {
        match self.verdict {
            Verdict::Finite { .. } => "Finite",
            Verdict::Periodic { .. } => "Periodic",
            Verdict::NotPeriodic(_) => "NotPeriodic",
            Verdict::Undetermined { .. } => "Undetermined",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("verdict".into(), Value::from(self.verdict_name()));
        if let Verdict::Periodic { pre_period, period } = self.verdict {
            m.insert("pre_period".into(), Value::from(pre_period));
            m.insert("period".into(), Value::from(period));
        }
        if let Some(c) = self.certificate {
            m.insert("certificate".into(), Value::from(c.name()));
        }
        m.insert("steps_used".into(), Value::from(self.steps_used));
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = as_object(v)?;
        let steps_used = field_u64(obj, "steps_used")? as usize;
        let certificate = match obj.get("certificate") {
            None => None,
            Some(c) => Some(
                c.as_str()
                    .ok_or_else(|| Error::Parse("certificate must be a string".into()))?
                    .parse()?,
            ),
        };
        let verdict = match field_str(obj, "verdict")? {
            "Finite" => Verdict::Finite { steps: steps_used },
            "Periodic" => Verdict::Periodic {
                pre_period: field_u64(obj, "pre_period")? as usize,
                period: field_u64(obj, "period")? as usize,
            },
            "NotPeriodic" => Verdict::NotPeriodic(
                certificate.ok_or_else(|| Error::Parse("NotPeriodic needs a certificate".into()))?,
            ),
            "Undetermined" => Verdict::Undetermined { budget: steps_used },
            other => return Err(Error::Parse(format!("unknown verdict {other:?}"))),
        };
        Ok(Classification { verdict, certificate, steps_used })
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            Verdict::Finite { steps } => write!(f, "Finite({steps})")?,
            Verdict::Periodic { pre_period, period } => write!(f, "Periodic({pre_period},{period})")?,
            Verdict::NotPeriodic(c) => write!(f, "NotPeriodic({c})")?,
            Verdict::Undetermined { budget } => write!(f, "Undetermined({budget})")?,
        }
        if let (Verdict::Periodic { .. }, Some(c)) = (self.verdict, self.certificate) {
            write!(f, " via {c}")?;
        }
        Ok(())
    }
}

/// Runs `alg` on a rational with exact cycle detection. Ruban runs stop at
/// the complete quotient `-1/p` and report its tail.
pub fn classify_rational(x: &Rational, alg: AlgorithmId, ctx: &PadicContext) -> Result<Classification> {
    let qp = QpNumber::Rational(x.clone());
    let field = prepare(&qp, alg, ctx)?;
    let env = Env::new(ctx, field.as_ref());
    if x.is_zero() {
        return Ok(Classification::new(Verdict::Finite { steps: 1 }, 1));
    }
    let budget = crate::algorithms::default_budget(&qp, alg, ctx);
    let lao = -Rational::new(BigInt::one(), ctx.prime());
    let mut tail_at = None;
    let trace = drive(alg, &env, State::Rat(x.clone()), budget, |n, s| {
        if alg == AlgorithmId::Ruban && matches!(s, State::Rat(r) if *r == lao) {
            tail_at = Some(n);
            true
        } else {
            false
        }
    })?;
    Ok(match tail_at {
        Some(n) if trace.stopped => Classification {
            verdict: Verdict::Periodic { pre_period: n, period: 1 },
            certificate: Some(Certificate::LaoTail),
            steps_used: n + 1,
        },
        _ => Classification::from_status(trace.status, trace.quotients.len()),
    })
}

/// Sign of `(P + sign * k sqrt(D))/Q` in the real embedding, `D > 0`.
fn embedding_sign(s: &QState, d: &BigInt, p: &BigInt, root_sign: i32) -> Ordering {
    let dk = s.d_eff(d);
    let num = if root_sign > 0 {
        if s.p.signum() != Ordering::Less {
            Ordering::Greater
        } else {
            s.p.cmp_square(&dk, p).reverse()
        }
    } else if s.p.signum() != Ordering::Greater {
        Ordering::Less
    } else {
        s.p.cmp_square(&dk, p)
    };
    if s.q.signum() == Ordering::Less {
        num.reverse()
    } else {
        num
    }
}

/// Runs `alg` on a quadratic irrational with exact `(P, Q, phase)` cycle
/// detection. Ruban runs also test the Ooto sign condition and the
/// two-negative-embeddings condition; Schneider runs test the de Weger
/// sign condition. The Browkin family has no such certificate, so those
/// runs end `Periodic` or `Undetermined`.
pub fn classify_quadratic(x: &QuadraticIrrational, alg: AlgorithmId, ctx: &PadicContext) -> Result<Classification> {
    let qp = QpNumber::Quadratic(x.clone());
    let field = prepare(&qp, alg, ctx)?.expect("quadratic input has a field");
    let env = Env::new(ctx, Some(&field));
    let d = field.radicand().clone();
    let p = ctx.prime();
    let mut prev: Option<QState> = None;
    let mut found: Option<(Certificate, usize)> = None;
    let trace = drive(alg, &env, State::from_qp(&qp, &p), ctx.step_budget, |n, s| {
        let State::Quad(s) = s else { return false };
        let dk = s.d_eff(&d);
        if let Some(prev_s) = &prev {
            let pq = prev_s.p.signum() as i32 * prev_s.q.signum() as i32;
            let grows = s.p.cmp_square(&dk, &p) == Ordering::Greater;
            match alg {
                AlgorithmId::Ruban if pq <= 0 && grows => found = Some((Certificate::OotoSign, n)),
                AlgorithmId::Schneider if pq < 0 && grows => found = Some((Certificate::DeWegerSign, n)),
                _ => {}
            }
        }
        if found.is_none()
            && alg == AlgorithmId::Ruban
            && d.is_positive()
            && embedding_sign(s, &d, &p, 1) == Ordering::Less
            && embedding_sign(s, &d, &p, -1) == Ordering::Less
        {
            found = Some((Certificate::TwoNegativeEmbeddings, n + 1));
        }
        prev = Some(s.clone());
        found.is_some()
    })?;
    Ok(match found {
        Some((c, steps)) if trace.stopped => Classification::new(Verdict::NotPeriodic(c), steps),
        _ => Classification::from_status(trace.status, trace.quotients.len()),
    })
}

/// Dispatches on the kind of `x`.
pub fn classify(x: &QpNumber, alg: AlgorithmId, ctx: &PadicContext) -> Result<Classification> {
    match x {
        QpNumber::Rational(r) => classify_rational(r, alg, ctx),
        QpNumber::Quadratic(q) => classify_quadratic(q, alg, ctx),
    }
}

/// Valuations of `x` and of its conjugate.
fn conjugate_valuations(x: &QuadraticIrrational, ctx: &PadicContext) -> Result<(Valuation, Valuation)> {
    let qp = QpNumber::Quadratic(x.clone());
    let field = qp.field(ctx)?;
    let env = Env::new(ctx, field.as_deref());
    let conj = qp.conjugate();
    Ok((env.valuation(&qp.to_scalar()), env.valuation(&conj.to_scalar())))
}

/// Condition on `|x|_p` and `|conj x|_p` characterizing purely periodic
/// expansions among periodic ones. Browkin I: `v(x) < 0 < v(conj x)`.
/// MR-ST: `v(x) <= 0 < v(conj x)`. Browkin II: `v(x) = 0 < v(conj x)`,
/// which is only necessary.
pub fn purely_periodic_predicate(x: &QuadraticIrrational, alg: AlgorithmId, ctx: &PadicContext) -> Result<bool> {
    let (vx, vc) = conjugate_valuations(x, ctx)?;
    let zero = Valuation::Finite(0);
    Ok(match alg {
        AlgorithmId::BrowkinI => vx < zero && vc > zero,
        AlgorithmId::MrST => vx <= zero && vc > zero,
        AlgorithmId::BrowkinII => vx == zero && vc > zero,
        other => {
            return Err(Error::UnsupportedAlgorithm(format!(
                "no purely periodic criterion for {other}"
            )))
        }
    })
}

/// `Some(D)` when `x` is `sqrt(D)` on either branch.
fn as_square_root(x: &QuadraticIrrational) -> Option<&BigInt> {
    let c = x.canonical();
    (c.p.is_zero() && c.q.abs().is_one()).then_some(&x.d)
}

/// Checks a periodic classification of `sqrt(D)` against the known
/// pre-period constraints: Browkin I has pre-period 2 or 3, Browkin II 1
/// or even, MR-ST 1 when `v(sqrt D) <= 0` and 2 otherwise. Anything else
/// (other inputs, algorithms or verdicts) is vacuously consistent.
pub fn preperiod_constraints(x: &QuadraticIrrational, alg: AlgorithmId, found: &Classification, ctx: &PadicContext) -> bool {
    let Verdict::Periodic { pre_period, .. } = found.verdict else {
        return true;
    };
    let Some(d) = as_square_root(x) else {
        return true;
    };
    match alg {
        AlgorithmId::BrowkinI => pre_period == 2 || pre_period == 3,
        AlgorithmId::BrowkinII => pre_period == 1 || pre_period % 2 == 0,
        AlgorithmId::MrST => {
            let vd = rational_valuation(&Rational::from_integer(d.clone()), ctx.p);
            let expected = if vd <= Valuation::Finite(0) { 1 } else { 2 };
            pre_period == expected
        }
        _ => true,
    }
}

/// A reduced basis of the approximation lattice
/// `{(A, B) : v_p(B x' - A) >= n}` where `x' = p^shift x` has `v_p(x') >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    pub shift: i64,
    pub basis: [(BigInt, BigInt); 2],
}

fn dot(u: &(BigInt, BigInt), w: &(BigInt, BigInt)) -> BigInt {
    &u.0 * &w.0 + &u.1 * &w.1
}

/// Lagrange-Gauss reduction: returns `(v1, v2)` with `|v1| <= |v2|` and
/// `|<v1, v2>| <= |v1|^2 / 2`.
pub fn gauss_reduce(a: (BigInt, BigInt), b: (BigInt, BigInt)) -> [(BigInt, BigInt); 2] {
    let (mut u, mut w) = if dot(&a, &a) <= dot(&b, &b) { (a, b) } else { (b, a) };
    loop {
        let nu = dot(&u, &u);
        if nu.is_zero() {
            return [u, w];
        }
        // nearest integer to <u,w>/|u|^2
        let num = dot(&u, &w);
        let two = BigInt::from(2);
        let m = (&two * &num + &nu).div_floor(&(&two * &nu));
        w = (&w.0 - &m * &u.0, &w.1 - &m * &u.1);
        if dot(&w, &w) >= nu {
            return [u, w];
        }
        std::mem::swap(&mut u, &mut w);
    }
}

/// Reduced basis of the lattice of `(A, B)` with `|B x - A|_p <= p^-n`,
/// starting from `{(p^n, 0), (r_n, 1)}` with `r_n = x mod p^n`.
pub fn approximation_lattice(x: &QpNumber, n: u32, ctx: &PadicContext) -> Result<LatticeBasis> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    ctx.validate()?;
    let field = x.field(ctx)?;
    let env = Env::new(ctx, field.as_deref());
    let p = ctx.prime();
    let modulus = pow_int(&p, n);
    let (shift, r) = match x.to_scalar().unit(&env, n) {
        None => (0, BigInt::zero()),
        Some((vx, w)) => {
            let shift = (-vx).max(0);
            let vs = vx + shift;
            if vs >= n as i64 {
                (shift, BigInt::zero())
            } else {
                (shift, (w * pow_int(&p, vs as u32)).mod_floor(&modulus))
            }
        }
    };
    let basis = gauss_reduce((modulus, BigInt::zero()), (r, BigInt::one()));
    Ok(LatticeBasis { shift, basis })
}

/// `v_p(B x' - A)` for the shifted input of `approximation_lattice`.
pub fn lattice_valuation(x: &QpNumber, shift: i64, pair: &(BigInt, BigInt), ctx: &PadicContext) -> Result<Valuation> {
    ctx.validate()?;
    let field = x.field(ctx)?;
    let env = Env::new(ctx, field.as_deref());
    let scale = pow_rat(&ctx.prime(), shift);
    let xs = x.to_scalar().scale(&(scale * Rational::from_integer(pair.1.clone())));
    Ok(env.valuation(&xs.sub_rational(&Rational::from_integer(pair.0.clone()))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::expand;
    use crate::padic::{BranchTag, Convention};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn ctx(alg: AlgorithmId, p: u64) -> PadicContext {
        alg.context(p).unwrap()
    }

    fn sqrt(d: i64) -> QuadraticIrrational {
        QuadraticIrrational::sqrt(d.into()).unwrap()
    }

    #[test]
    fn policies_satisfy_their_patterns() {
        let x = QpNumber::sqrt(2).unwrap();
        for alg in [AlgorithmId::BrowkinI, AlgorithmId::BrowkinII, AlgorithmId::MrST, AlgorithmId::Mrs3] {
            let c = ctx(alg, 7).with_budget(40).unwrap();
            let e = expand(&x, alg, &c).unwrap();
            let cond = ConvergenceCondition::for_algorithm(alg).unwrap();
            let rep = check_convergence(&e, cond).unwrap();
            assert!(rep.holds, "{alg}: {rep:?}");
        }
    }

    #[test]
    fn pairwise_violation_is_located() {
        let c = PadicContext::new(5, Convention::Balanced).unwrap();
        let qs = vec![r(1, 1), r(1, 5), r(1, 5), r(2, 1), r(3, 1), r(1, 5)];
        let e = Expansion::simple(qs, Status::Truncated { steps: 6 }, c).unwrap();
        let rep = check_convergence(&e, ConvergenceCondition::PairwiseNegative).unwrap();
        assert_eq!(rep.first_violation, Some(3));
        assert!(!rep.holds);
    }

    #[test]
    fn valuation_identities() {
        let c = ctx(AlgorithmId::BrowkinI, 7);
        let e = expand(&QpNumber::sqrt(2).unwrap().clone(), AlgorithmId::BrowkinI, &c.with_budget(30).unwrap()).unwrap();
        assert!(verify_valuation_identities(&e, 25));
        let e = expand(&"-2/5".parse().unwrap(), AlgorithmId::BrowkinI, &c).unwrap();
        assert!(verify_valuation_identities(&e, 10));
        let bad = Expansion::simple(vec![r(1, 1), r(1, 1), r(-1, 1)], Status::Finite, c).unwrap();
        assert!(!verify_valuation_identities(&bad, 2));
    }

    #[test]
    fn ruban_rationals() {
        let c = ctx(AlgorithmId::Ruban, 7);
        let k = classify_rational(&r(-2, 5), AlgorithmId::Ruban, &c).unwrap();
        assert_eq!(k.verdict, Verdict::Periodic { pre_period: 2, period: 1 });
        assert_eq!(k.certificate, Some(Certificate::LaoTail));
        let c5 = ctx(AlgorithmId::Ruban, 5);
        let k = classify_rational(&r(-5, 1), AlgorithmId::Ruban, &c5).unwrap();
        assert_eq!(k.verdict, Verdict::Periodic { pre_period: 1, period: 1 });
        let k = classify_rational(&r(5, 1), AlgorithmId::Ruban, &c5).unwrap();
        assert!(matches!(k.verdict, Verdict::Finite { .. }));
    }

    #[test]
    fn browkin_rationals_are_finite() {
        let c = ctx(AlgorithmId::BrowkinI, 5);
        let k = classify_rational(&r(3, 4), AlgorithmId::BrowkinI, &c).unwrap();
        assert!(matches!(k.verdict, Verdict::Finite { .. }), "{k}");
        let k = classify_rational(&r(0, 1), AlgorithmId::BrowkinI, &c).unwrap();
        assert_eq!(k.verdict, Verdict::Finite { steps: 1 });
    }

    #[test]
    fn certificates_for_negative_radicands() {
        // -1 is a square mod 5
        let k = classify_quadratic(&sqrt(-1), AlgorithmId::Schneider, &ctx(AlgorithmId::Schneider, 5)).unwrap();
        assert_eq!(k.verdict, Verdict::NotPeriodic(Certificate::DeWegerSign), "{k}");
        let k = classify_quadratic(&sqrt(-1), AlgorithmId::Ruban, &ctx(AlgorithmId::Ruban, 5)).unwrap();
        assert!(matches!(k.verdict, Verdict::NotPeriodic(_)), "{k}");
        assert_eq!(k.certificate, Some(Certificate::OotoSign));
    }

    #[test]
    fn browkin_one_square_root_cycles() {
        let c = ctx(AlgorithmId::BrowkinI, 5).with_budget(2000).unwrap();
        let x = sqrt(11);
        let k = classify_quadratic(&x, AlgorithmId::BrowkinI, &c).unwrap();
        if let Verdict::Periodic { .. } = k.verdict {
            assert!(preperiod_constraints(&x, AlgorithmId::BrowkinI, &k, &c), "{k}");
        }
    }

    #[test]
    fn predicates() {
        let c = ctx(AlgorithmId::BrowkinI, 7);
        // (P + sqrt 2)/7 with P = 3: v(x) and v(conj) from P^2 - 2 = 7
        let x = QuadraticIrrational::new(r(3, 1), r(49, 1), 2.into(), BranchTag::Principal).unwrap();
        let (vx, vc) = conjugate_valuations(&x, &c).unwrap();
        assert_ne!(vx, vc);
        assert!(purely_periodic_predicate(&sqrt(2), AlgorithmId::Ruban, &c).is_err());
        let fake = Classification::new(Verdict::Periodic { pre_period: 3, period: 2 }, 10);
        assert!(!preperiod_constraints(&sqrt(2), AlgorithmId::BrowkinII, &fake, &c));
        let pure = Classification::new(Verdict::Periodic { pre_period: 0, period: 2 }, 10);
        assert!(preperiod_constraints(&sqrt(2), AlgorithmId::BrowkinII, &pure, &c));
    }

    #[test]
    fn embedding_signs() {
        let p = BigInt::from(7);
        let d = BigInt::from(2);
        let st = |pp: i64, qq: i64| {
            QState::from_scalar(
                &QpNumber::Quadratic(QuadraticIrrational::new(r(pp, 1), r(qq, 1), d.clone(), BranchTag::Principal).unwrap())
                    .to_scalar(),
                &d,
                &p,
            )
        };
        // (1 +- sqrt 2)/1
        assert_eq!(embedding_sign(&st(1, 1), &d, &p, 1), Ordering::Greater);
        assert_eq!(embedding_sign(&st(1, 1), &d, &p, -1), Ordering::Less);
        // (-2 +- sqrt 2)/1: both negative
        assert_eq!(embedding_sign(&st(-2, 1), &d, &p, 1), Ordering::Less);
        assert_eq!(embedding_sign(&st(-2, 1), &d, &p, -1), Ordering::Less);
        // (2 +- sqrt 2)/(-1)
        assert_eq!(embedding_sign(&st(2, -1), &d, &p, -1), Ordering::Less);
    }

    #[test]
    fn lattice_basis_is_reduced_and_in_lattice() {
        let c = PadicContext::new(5, Convention::Standard).unwrap();
        let x = QpNumber::rational(2, 7).unwrap();
        let lb = approximation_lattice(&x, 3, &c).unwrap();
        let [v1, v2] = &lb.basis;
        assert!(dot(v1, v1) <= dot(v2, v2));
        assert!(2 * dot(v1, v2).abs() <= dot(v1, v1));
        let det = &v1.0 * &v2.1 - &v1.1 * &v2.0;
        assert_eq!(det.abs(), BigInt::from(125));
        for v in [v1, v2] {
            assert!(lattice_valuation(&x, lb.shift, v, &c).unwrap() >= Valuation::Finite(3));
        }
        let z = approximation_lattice(&QpNumber::rational(5, 1).unwrap(), 1, &c).unwrap();
        let mut norms: Vec<BigInt> = z.basis.iter().map(|v| dot(v, v)).collect();
        norms.sort();
        assert_eq!(norms, vec![BigInt::one(), BigInt::from(25)]);
    }

    #[test]
    fn classification_json_round_trip() {
        for k in [
            Classification::new(Verdict::Finite { steps: 4 }, 4),
            Classification { verdict: Verdict::Periodic { pre_period: 2, period: 1 }, certificate: Some(Certificate::LaoTail), steps_used: 3 },
            Classification::new(Verdict::NotPeriodic(Certificate::OotoSign), 2),
            Classification::new(Verdict::Undetermined { budget: 9 }, 9),
        ] {
            assert_eq!(Classification::from_json(&k.to_json()).unwrap(), k);
        }
    }
}
