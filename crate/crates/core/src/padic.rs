//! Exact p-adic inputs: rationals and quadratic irrationals `(P + sqrt(D))/Q`,
//! their digit expansions and the integer-part functions used by the
//! continued fraction algorithms.
//!
//! A quadratic irrational is never approximated by a truncated series. Its
//! valuation is bounded through the norm: for integers `A`, `B` and a p-adic
//! integer `r` with `r^2 = D`,
//!
//! ```text
//! v(A + B r) + v(A - B r) = v(A^2 - B^2 D)
//! ```
//!
//! and both terms on the left are non-negative, so `v(A + B r)` never exceeds
//! `v(A^2 - B^2 D)`. Lifting `r` to that many digits (plus what the caller
//! asked for) is always enough.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Extra digits computed beyond what a caller demands.
pub const DEFAULT_PRECISION_GUARD: u32 = 8;
/// Default cap on the number of expansion steps.
pub const DEFAULT_STEP_BUDGET: usize = 10_000;

/// A p-adic valuation; `Infinite` is the valuation of zero and sorts above
/// every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// Digit representatives for Z/pZ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Convention {
    /// `{0, ..., p-1}`
    Standard,
    /// `{-(p-1)/2, ..., (p-1)/2}`
    Balanced,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Standard => "standard",
            Convention::Balanced => "balanced",
        })
    }
}

/// Ambient parameters of every computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicContext {
    pub p: u64,
    pub convention: Convention,
    pub precision_guard: u32,
    pub step_budget: usize,
}

impl PadicContext {
    /// Context for an odd prime `p < 2^32` with default guard and budget.
    pub fn new(p: u64, convention: Convention) -> Result<Self> {
        let ctx = PadicContext {
            p,
            convention,
            precision_guard: DEFAULT_PRECISION_GUARD,
            step_budget: DEFAULT_STEP_BUDGET,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn with_budget(mut self, step_budget: usize) -> Result<Self> {
        self.step_budget = step_budget;
        self.validate()?;
        Ok(self)
    }

    pub fn with_guard(mut self, precision_guard: u32) -> Result<Self> {
        self.precision_guard = precision_guard;
        self.validate()?;
        Ok(self)
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 3 || self.p > u32::MAX as u64 || !is_prime(self.p) {
            return Err(Error::InvalidPrime(self.p.to_string()));
        }
        if self.precision_guard == 0 {
            return Err(Error::InvalidContext("precision_guard must be at least 1".into()));
        }
        if self.step_budget == 0 {
            return Err(Error::InvalidContext("step_budget must be at least 1".into()));
        }
        Ok(())
    }

    pub fn prime(&self) -> BigInt {
        BigInt::from(self.p)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Which of the two p-adic square roots of `D` is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchTag {
    /// The root whose leading unit digit lies in `{1, ..., (p-1)/2}`. This is
    /// simultaneously the root with the smaller standard leading digit and the
    /// root with the positive balanced leading digit.
    Principal,
    /// The negation of the principal root.
    Conjugate,
}

impl BranchTag {
    pub fn flip(self) -> Self {
        match self {
            BranchTag::Principal => BranchTag::Conjugate,
            BranchTag::Conjugate => BranchTag::Principal,
        }
    }

    fn sign(self) -> i32 {
        match self {
            BranchTag::Principal => 1,
            BranchTag::Conjugate => -1,
        }
    }
}

/// `(P + sqrt(D)) / Q` with `sqrt(D)` resolved by `branch`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticIrrational {
    pub p: Rational,
    pub q: Rational,
    pub d: BigInt,
    pub branch: BranchTag,
}

impl QuadraticIrrational {
    /// Checks the field-independent invariants (`Q != 0`, `D` not a square).
    pub fn new(p: Rational, q: Rational, d: BigInt, branch: BranchTag) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::InvalidInput("Q must be nonzero".into()));
        }
        if d.is_zero() || is_square(&d) {
            return Err(Error::InvalidInput(format!("D = {d} is a perfect square")));
        }
        Ok(QuadraticIrrational { p, q, d, branch })
    }

    /// `sqrt(D)` on the principal branch.
    pub fn sqrt(d: BigInt) -> Result<Self> {
        Self::new(Rational::zero(), Rational::one(), d, BranchTag::Principal)
    }

    /// The same number written with the principal root:
    /// `(P - r)/Q = (-P + r)/(-Q)`.
    pub fn canonical(&self) -> Self {
        match self.branch {
            BranchTag::Principal => self.clone(),
            BranchTag::Conjugate => QuadraticIrrational {
                p: -self.p.clone(),
                q: -self.q.clone(),
                d: self.d.clone(),
                branch: BranchTag::Principal,
            },
        }
    }

    /// The Galois conjugate `(P - sqrt(D))/Q`.
    pub fn conjugate(&self) -> Self {
        QuadraticIrrational { branch: self.branch.flip(), ..self.clone() }
    }

    /// `a + b r` coefficients with respect to the principal root `r`.
    pub(crate) fn to_scalar(&self) -> Scalar {
        let inv_q = self.q.recip();
        let b = if self.branch.sign() > 0 { inv_q.clone() } else { -inv_q.clone() };
        Scalar { a: &self.p * inv_q, b }
    }
}

/// An exact element of Q_p handled by the library.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QpNumber {
    Rational(Rational),
    Quadratic(QuadraticIrrational),
}

impl QpNumber {
    pub fn rational(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(QpNumber::Rational(Rational::new(num.into(), den.into())))
    }

    pub fn from_rational(r: Rational) -> Self {
        QpNumber::Rational(r)
    }

    pub fn sqrt(d: i64) -> Result<Self> {
        Ok(QpNumber::Quadratic(QuadraticIrrational::sqrt(d.into())?))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            QpNumber::Rational(r) => Some(r),
            QpNumber::Quadratic(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, QpNumber::Rational(r) if r.is_zero())
    }

    /// The radicand, if any.
    pub fn radicand(&self) -> Option<&BigInt> {
        match self {
            QpNumber::Rational(_) => None,
            QpNumber::Quadratic(q) => Some(&q.d),
        }
    }

    /// Galois conjugate (identity on rationals).
    pub fn conjugate(&self) -> Self {
        match self {
            QpNumber::Rational(_) => self.clone(),
            QpNumber::Quadratic(q) => QpNumber::Quadratic(q.conjugate()),
        }
    }

    /// Builds a field for this number's radicand, if it has one.
    pub(crate) fn field(&self, ctx: &PadicContext) -> Result<Option<Arc<QuadField>>> {
        match self {
            QpNumber::Rational(_) => Ok(None),
            QpNumber::Quadratic(q) => Ok(Some(Arc::new(QuadField::new(&q.d, ctx.p)?))),
        }
    }

    pub(crate) fn to_scalar(&self) -> Scalar {
        match self {
            QpNumber::Rational(r) => Scalar::rational(r.clone()),
            QpNumber::Quadratic(q) => q.to_scalar(),
        }
    }

    /// Exact equality of values. Two quadratic forms are equal when their
    /// rational parts agree, their radicands differ by a rational square and
    /// the resulting roots coincide p-adically.
    pub fn same_value(&self, other: &QpNumber, ctx: &PadicContext) -> Result<bool> {
        match (self, other) {
            (QpNumber::Rational(a), QpNumber::Rational(b)) => Ok(a == b),
            (QpNumber::Quadratic(x), QpNumber::Quadratic(y)) => {
                let sx = x.to_scalar();
                let sy = y.to_scalar();
                if sx.a != sy.a {
                    return Ok(false);
                }
                // b_x^2 D_x must equal b_y^2 D_y
                let lhs = &sx.b * &sx.b * Rational::from_integer(x.d.clone());
                let rhs = &sy.b * &sy.b * Rational::from_integer(y.d.clone());
                if lhs != rhs {
                    return Ok(false);
                }
                // same magnitude; compare the p-adic leading digit of b_x r_x and b_y r_y
                let fx = QuadField::new(&x.d, ctx.p)?;
                let fy = QuadField::new(&y.d, ctx.p)?;
                let env_x = Env::new(ctx, Some(&fx));
                let env_y = Env::new(ctx, Some(&fy));
                let ux = env_x.unit(&Scalar { a: Rational::zero(), b: sx.b.clone() }, 1);
                let uy = env_y.unit(&Scalar { a: Rational::zero(), b: sy.b.clone() }, 1);
                Ok(ux == uy)
            }
            _ => Ok(false),
        }
    }
}

impl fmt::Display for QpNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QpNumber::Rational(r) => f.write_str(&fmt_rational(r)),
            QpNumber::Quadratic(q) => {
                let branch = if q.branch == BranchTag::Principal { "" } else { ",conj" };
                write!(f, "quad:{},{},{}{}", fmt_rational(&q.p), fmt_rational(&q.q), q.d, branch)
            }
        }
    }
}

impl FromStr for QpNumber {
    type Err = Error;

    /// Parses `a/b`, `a`, or `quad:P,Q,D` (P and Q may themselves be `a/b`).
    /// A trailing `,conj` selects the conjugate branch.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("quad:") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            if parts.len() != 3 && parts.len() != 4 {
                return Err(Error::Parse(format!("expected quad:P,Q,D, got {s:?}")));
            }
            let p = parse_rational(parts[0])?;
            let q = parse_rational(parts[1])?;
            let d = BigInt::from_str(parts[2])
                .map_err(|_| Error::Parse(format!("bad radicand {:?}", parts[2])))?;
            let branch = match parts.get(3) {
                None => BranchTag::Principal,
                Some(&"conj") | Some(&"conjugate") => BranchTag::Conjugate,
                Some(&"principal") => BranchTag::Principal,
                Some(other) => return Err(Error::Parse(format!("unknown branch {other:?}"))),
            };
            return Ok(QpNumber::Quadratic(QuadraticIrrational::new(p, q, d, branch)?));
        }
        Ok(QpNumber::Rational(parse_rational(s)?))
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// `num/den`, or just `num` for integers.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Whether a finite expansion window reproduces the value exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    Window,
}

/// Digits `c_r, c_{r+1}, ...` of `sum c_i p^i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicDigits {
    pub start_valuation: i64,
    pub digits: Vec<i64>,
    pub exactness: Exactness,
}

impl PAdicDigits {
    /// `sum c_i p^i` over the stored window.
    pub fn partial_sum(&self, p: u64) -> Rational {
        let pb = BigInt::from(p);
        let mut acc = BigInt::zero();
        for d in self.digits.iter().rev() {
            acc = acc * &pb + BigInt::from(*d);
        }
        Rational::from_integer(acc) * pow_rat(&pb, self.start_valuation)
    }
}

// ---------------------------------------------------------------------------
// Integer helpers

pub(crate) fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// `v_p(n)` for a nonzero integer, together with the cofactor.
pub(crate) fn split_int(n: &BigInt, p: &BigInt) -> (i64, BigInt) {
    debug_assert!(!n.is_zero());
    let mut k = 0i64;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            break;
        }
        m = q;
        k += 1;
    }
    (k, m)
}

pub fn rational_valuation(x: &Rational, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let pb = BigInt::from(p);
    Valuation::Finite(split_int(x.numer(), &pb).0 - split_int(x.denom(), &pb).0)
}

pub(crate) fn pow_rat(p: &BigInt, e: i64) -> Rational {
    let m = num_traits::pow(p.clone(), e.unsigned_abs() as usize);
    if e >= 0 {
        Rational::from_integer(m)
    } else {
        Rational::new(BigInt::one(), m)
    }
}

pub(crate) fn pow_int(p: &BigInt, e: u32) -> BigInt {
    num_traits::pow(p.clone(), e as usize)
}

/// Representative of `a mod m` in `(-m/2, m/2]`; for odd `m` this is the
/// balanced-digit integer.
pub(crate) fn symmetric_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let r = a.mod_floor(m);
    if &r + &r > *m {
        r - m
    } else {
        r
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.extended_gcd(m);
    debug_assert!(g.gcd.is_one());
    g.x.mod_floor(m)
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

/// Tonelli-Shanks square root of a unit modulo an odd prime.
pub(crate) fn sqrt_mod_prime(n: u64, p: u64) -> Option<u64> {
    let n = n % p;
    if n == 0 {
        return Some(0);
    }
    if powmod(n, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(powmod(n, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while powmod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod(z, q, p);
    let mut t = powmod(n, q, p);
    let mut r = powmod(n, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut tt = t;
        while tt != 1 {
            tt = mulmod(tt, tt, p);
            i += 1;
        }
        let b = powmod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    Some(r)
}

// ---------------------------------------------------------------------------
// Quadratic fields

/// `Q(sqrt(D))` embedded in Q_p through the principal root.
///
/// `D = p^(2k) D'` with `p` not dividing `D'`, and the principal root is
/// `r = p^k u` where `u^2 = D'` and `u mod p` lies in `{1, ..., (p-1)/2}`.
/// Lifts of `u` are cached and only ever extended.
pub struct QuadField {
    d: BigInt,
    p: BigInt,
    half_exp: u32,
    unit: BigInt,
    lift: Mutex<(u32, BigInt)>,
}

impl QuadField {
    pub fn new(d: &BigInt, p: u64) -> Result<Self> {
        if d.is_zero() || is_square(d) {
            return Err(Error::InvalidInput(format!("D = {d} is a perfect square")));
        }
        let pb = BigInt::from(p);
        let (e, unit) = split_int(d, &pb);
        if e % 2 == 1 {
            return Err(Error::NonResidue(format!(
                "{d} has odd {p}-adic valuation, so its square root is not in Q_{p}"
            )));
        }
        let residue = unit.mod_floor(&pb).to_u64().expect("residue below p");
        let root = sqrt_mod_prime(residue, p)
            .ok_or_else(|| Error::NonResidue(format!("{d} is not a square modulo {p}")))?;
        let root = root.min(p - root);
        Ok(QuadField {
            d: d.clone(),
            p: pb,
            half_exp: (e / 2) as u32,
            unit,
            lift: Mutex::new((1, BigInt::from(root))),
        })
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn prime(&self) -> &BigInt {
        &self.p
    }

    /// `v_p(sqrt(D))`.
    pub fn root_valuation(&self) -> i64 {
        self.half_exp as i64
    }

    /// The unit part `u` of the principal root modulo `p^n`, by Newton lifting.
    pub(crate) fn unit_root(&self, n: u32) -> BigInt {
        let mut guard = self.lift.lock().expect("lift cache poisoned");
        let (mut prec, mut u) = guard.clone();
        while prec < n {
            let next = (prec * 2).min(n);
            let m = pow_int(&self.p, next);
            let two_u = (&u + &u).mod_floor(&m);
            let f = (&u * &u - &self.unit).mod_floor(&m);
            u = (&u - f * mod_inverse(&two_u, &m)).mod_floor(&m);
            prec = next;
        }
        if prec > guard.0 {
            *guard = (prec, u.clone());
        }
        drop(guard);
        if prec == n {
            u
        } else {
            u.mod_floor(&pow_int(&self.p, n))
        }
    }

    /// The principal root `r` modulo `p^n`.
    pub fn root_mod(&self, n: u32) -> BigInt {
        if n <= self.half_exp {
            return BigInt::zero();
        }
        let u = self.unit_root(n - self.half_exp);
        (pow_int(&self.p, self.half_exp) * u).mod_floor(&pow_int(&self.p, n))
    }
}

impl fmt::Debug for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadField").field("d", &self.d).field("p", &self.p).finish()
    }
}

impl PartialEq for QuadField {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.p == other.p
    }
}

impl Eq for QuadField {}

/// `a + b r` over the principal root of a field (or just `a` when `b = 0`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Scalar {
    pub a: Rational,
    pub b: Rational,
}

impl Scalar {
    pub fn rational(a: Rational) -> Self {
        Scalar { a, b: Rational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn sub_rational(&self, q: &Rational) -> Scalar {
        Scalar { a: &self.a - q, b: self.b.clone() }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        Scalar { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn scale(&self, k: &Rational) -> Scalar {
        Scalar { a: &self.a * k, b: &self.b * k }
    }

    pub fn mul(&self, o: &Scalar, d: &BigInt) -> Scalar {
        let dr = Rational::from_integer(d.clone());
        Scalar {
            a: &self.a * &o.a + &self.b * &o.b * dr,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }

    /// `1 / (a + b r) = (a - b r) / (a^2 - b^2 D)`; `None` for zero.
    pub fn recip(&self, d: &BigInt) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.a * &self.a - &self.b * &self.b * Rational::from_integer(d.clone());
        Some(Scalar { a: &self.a / &norm, b: -(&self.b / &norm) })
    }

    pub fn div(&self, o: &Scalar, d: &BigInt) -> Option<Scalar> {
        o.recip(d).map(|inv| self.mul(&inv, d))
    }

    /// Back to the public representation. `D` is only consulted when `b != 0`.
    pub fn to_qp(&self, d: &BigInt) -> QpNumber {
        if self.b.is_zero() {
            QpNumber::Rational(self.a.clone())
        } else {
            let q = self.b.recip();
            QpNumber::Quadratic(QuadraticIrrational {
                p: &self.a * &q,
                q,
                d: d.clone(),
                branch: BranchTag::Principal,
            })
        }
    }
}

/// Evaluation environment: prime, guard digits and (optionally) a field.
#[derive(Clone, Copy)]
pub(crate) struct Env<'a> {
    pub p: &'a BigInt,
    pub guard: u32,
    pub field: Option<&'a QuadField>,
}

thread_local! {
    static PRIMES: std::cell::RefCell<Vec<(u64, &'static BigInt)>> = const { std::cell::RefCell::new(Vec::new()) };
}

fn prime_ref(p: u64) -> &'static BigInt {
    PRIMES.with(|cell| {
        let mut v = cell.borrow_mut();
        if let Some((_, r)) = v.iter().find(|(q, _)| *q == p) {
            return *r;
        }
        let leaked: &'static BigInt = Box::leak(Box::new(BigInt::from(p)));
        v.push((p, leaked));
        leaked
    })
}

impl<'a> Env<'a> {
    pub fn new(ctx: &PadicContext, field: Option<&'a QuadField>) -> Self {
        Env { p: prime_ref(ctx.p), guard: ctx.precision_guard, field }
    }

    fn scalar_unit(&self, x: &Scalar, count: u32) -> Option<(i64, BigInt)> {
        if x.is_zero() {
            return None;
        }
        let p = self.p;
        let modulus = pow_int(p, count);
        if x.b.is_zero() {
            let (vn, un) = split_int(x.a.numer(), p);
            let (vd, ud) = split_int(x.a.denom(), p);
            let w = (un * mod_inverse(&ud.mod_floor(&modulus), &modulus)).mod_floor(&modulus);
            return Some((vn - vd, w));
        }
        let field = self.field.expect("quadratic scalar without a field");
        // a + b r = (A + B r) / den with integers A, B
        let big_a = x.a.numer() * x.b.denom();
        let big_b = x.b.numer() * x.a.denom();
        let den = x.a.denom() * x.b.denom();
        let norm = &big_a * &big_a - &big_b * &big_b * field.radicand();
        let bound = split_int(&norm, p).0 as u32;
        let ceiling = bound + count;
        let mut prec = (count + self.guard).min(ceiling);
        let (w, unit) = loop {
            let m = pow_int(p, prec);
            let z = (&big_a + &big_b * field.root_mod(prec)).mod_floor(&m);
            if !z.is_zero() {
                let (w, u) = split_int(&z, p);
                if prec as i64 - w >= count as i64 {
                    break (w, u);
                }
            }
            // leading digits undetermined at this precision
            debug_assert!(prec < ceiling, "norm bound violated");
            prec = (prec * 2).min(ceiling);
        };
        let (vd, ud) = split_int(&den, p);
        let w_unit = (unit * mod_inverse(&ud.mod_floor(&modulus), &modulus)).mod_floor(&modulus);
        Some((w - vd, w_unit))
    }

    /// `x = p^v w` with `w` a unit; returns `(v, w mod p^count)`, or `None`
    /// for zero.
    pub fn unit<X: Digits>(&self, x: &X, count: u32) -> Option<(i64, BigInt)> {
        x.unit(self, count)
    }

    /// The radicand of the field, or 1 when working over Q.
    pub fn radicand(&self) -> BigInt {
        self.field.map(|f| f.radicand().clone()).unwrap_or_else(BigInt::one)
    }

    pub fn mul(&self, x: &Scalar, y: &Scalar) -> Scalar {
        x.mul(y, &self.radicand())
    }

    pub fn recip(&self, x: &Scalar) -> Option<Scalar> {
        x.recip(&self.radicand())
    }

    pub fn valuation<X: Digits>(&self, x: &X) -> Valuation {
        match self.unit(x, 1) {
            None => Valuation::Infinite,
            Some((v, _)) => Valuation::Finite(v),
        }
    }

    /// Browkin's `s`: balanced digits of index `<= 0`.
    pub fn floor_s<X: Digits>(&self, x: &X) -> Rational {
        self.truncated(x, 0, true)
    }

    /// Browkin's `t`: balanced digits of index `<= -1`.
    pub fn floor_t<X: Digits>(&self, x: &X) -> Rational {
        self.truncated(x, -1, true)
    }

    /// Ruban's integer part: standard digits of index `<= 0`.
    pub fn floor_ruban<X: Digits>(&self, x: &X) -> Rational {
        self.truncated(x, 0, false)
    }

    /// Sum of the digits with index `<= last`.
    fn truncated<X: Digits>(&self, x: &X, last: i64, balanced: bool) -> Rational {
        let Some((v, _)) = self.unit(x, 1) else {
            return Rational::zero();
        };
        if v > last {
            return Rational::zero();
        }
        let count = (last - v + 1) as u32;
        let (_, w) = self.unit(x, count).expect("nonzero");
        let m = pow_int(self.p, count);
        let top = if balanced { symmetric_mod(&w, &m) } else { w };
        Rational::from_integer(top) * pow_rat(self.p, v)
    }

    /// The digit of index 0 in the given convention.
    pub fn digit0<X: Digits>(&self, x: &X, balanced: bool) -> i64 {
        let Some((v, _)) = self.unit(x, 1) else {
            return 0;
        };
        if v > 0 {
            return 0;
        }
        let count = (1 - v) as u32;
        let (_, w) = self.unit(x, count).expect("nonzero");
        let m = pow_int(self.p, count);
        let top = if balanced { symmetric_mod(&w, &m) } else { w };
        // the digit of index 0 is the top digit of the window
        let digits = extract_digits(&top, self.p, count as usize, balanced);
        *digits.last().expect("count >= 1")
    }

    /// The sign-correction `u` of the three-step algorithm.
    pub fn floor_u<X: Digits>(&self, x: &X) -> Result<i64> {
        if let Valuation::Finite(v) = self.valuation(x) {
            if v < 0 {
                return Err(Error::NegativeValuation);
            }
        }
        let c0 = self.digit0(x, true);
        Ok(u_of_digit(c0))
    }
}

/// Anything whose leading p-adic digits can be read exactly.
pub(crate) trait Digits {
    /// `(v, w mod p^count)` where `self = p^v w` with `w` a unit; `None`
    /// for zero.
    fn unit(&self, env: &Env, count: u32) -> Option<(i64, BigInt)>;

    /// `v_p(self - c)` for `c` in `Z[1/p]`.
    fn valuation_minus(&self, env: &Env, c: &Rational) -> Valuation;
}

impl Digits for Scalar {
    fn unit(&self, env: &Env, count: u32) -> Option<(i64, BigInt)> {
        env.scalar_unit(self, count)
    }

    fn valuation_minus(&self, env: &Env, c: &Rational) -> Valuation {
        env.valuation(&self.sub_rational(c))
    }
}

/// An element `m p^e` of `Z[1/p]` with `p` not dividing `m` (or `m = 0`,
/// `e = 0`). Sums and products need no gcd, which keeps long quadratic
/// expansions linear in the size of their numbers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct PNum {
    pub m: BigInt,
    pub e: i64,
}

impl PNum {
    pub fn zero() -> Self {
        PNum { m: BigInt::zero(), e: 0 }
    }

    pub fn normalize(m: BigInt, e: i64, p: &BigInt) -> Self {
        if m.is_zero() {
            return PNum::zero();
        }
        let (k, u) = split_int(&m, p);
        PNum { m: u, e: e + k }
    }

    /// `None` when the denominator has a prime factor other than `p`.
    pub fn from_rational(r: &Rational, p: &BigInt) -> Option<Self> {
        if r.is_zero() {
            return Some(PNum::zero());
        }
        let (vn, un) = split_int(r.numer(), p);
        let (vd, ud) = split_int(r.denom(), p);
        ud.is_one().then_some(PNum { m: un, e: vn - vd })
    }

    pub fn to_rational(&self, p: &BigInt) -> Rational {
        Rational::from_integer(self.m.clone()) * pow_rat(p, self.e)
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn signum(&self) -> Ordering {
        self.m.sign().cmp(&num_bigint::Sign::NoSign)
    }

    pub fn neg(&self) -> Self {
        PNum { m: -&self.m, e: self.e }
    }

    pub fn add(&self, o: &PNum, p: &BigInt) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.e.min(o.e);
        let lift = |x: &PNum| {
            if x.e == e {
                x.m.clone()
            } else {
                &x.m * pow_int(p, (x.e - e) as u32)
            }
        };
        let m = lift(self) + lift(o);
        if self.e != o.e {
            // exactly one term is a unit, so the sum is one too
            PNum { m, e }
        } else {
            PNum::normalize(m, e, p)
        }
    }

    pub fn sub(&self, o: &PNum, p: &BigInt) -> Self {
        self.add(&o.neg(), p)
    }

    pub fn mul(&self, o: &PNum) -> Self {
        if self.is_zero() || o.is_zero() {
            return PNum::zero();
        }
        PNum { m: &self.m * &o.m, e: self.e + o.e }
    }

    pub fn mul_int(&self, k: &BigInt, p: &BigInt) -> Self {
        PNum::normalize(&self.m * k, self.e, p)
    }

    /// `self / o` when the quotient lies in `Z[1/p]`.
    pub fn div_exact(&self, o: &PNum) -> Option<Self> {
        let (q, r) = self.m.div_rem(&o.m);
        r.is_zero().then_some(PNum { m: q, e: self.e - o.e })
    }

    /// Compares `self^2` with the integer `d`.
    pub fn cmp_square(&self, d: &BigInt, p: &BigInt) -> Ordering {
        let sq = &self.m * &self.m;
        if self.e >= 0 {
            (sq * pow_int(p, 2 * self.e as u32)).cmp(d)
        } else {
            sq.cmp(&(d * pow_int(p, (-2 * self.e) as u32)))
        }
    }
}

/// A complete quotient `(P + k r)/Q` of a quadratic irrational, where `r`
/// is the principal root of the field radicand `D` and `k > 0` is a scale
/// prime to `p` chosen so that `Q` divides `k^2 D - P^2` in `Z[1/p]`. That
/// divisibility is preserved by every step, so `P` and `Q` stay in
/// `Z[1/p]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct QState {
    pub p: PNum,
    pub q: PNum,
    pub k: BigInt,
}

impl QState {
    /// Writes `a + b r` (with `b != 0`) in scaled form.
    pub fn from_scalar(x: &Scalar, d: &BigInt, p: &BigInt) -> Self {
        debug_assert!(!x.b.is_zero());
        let big_p = &x.a / &x.b;
        let big_q = x.b.recip();
        let p_free_den = |r: &Rational| split_int(r.denom(), p).1;
        let k1 = p_free_den(&big_p).lcm(&p_free_den(&big_q));
        let (p1, q1) = (&big_p * Rational::from_integer(k1.clone()), &big_q * Rational::from_integer(k1.clone()));
        let q1 = PNum::from_rational(&q1, p).expect("denominator cleared");
        let k2 = q1.m.abs();
        let k = &k1 * &k2;
        let pk = PNum::from_rational(&(p1 * Rational::from_integer(k2.clone())), p).expect("cleared");
        let qk = q1.mul_int(&k2, p);
        let st = QState { p: pk, q: qk, k };
        debug_assert!(st.norm_remainder(d, p).is_some());
        st
    }

    /// `k^2 D`.
    pub fn d_eff(&self, d: &BigInt) -> BigInt {
        &self.k * &self.k * d
    }

    /// `(k^2 D - P^2)/Q`, which exists by construction.
    fn norm_remainder(&self, d: &BigInt, p: &BigInt) -> Option<PNum> {
        let num = PNum::normalize(self.d_eff(d), 0, p).sub(&self.p.mul(&self.p), p);
        num.div_exact(&self.q)
    }

    /// `(P, Q)` of `(P + sqrt(D))/Q` for the unscaled radicand.
    pub fn to_pq(&self, p: &BigInt) -> (Rational, Rational) {
        let k = Rational::from_integer(self.k.clone());
        (self.p.to_rational(p) / &k, self.q.to_rational(p) / k)
    }

    /// `b / (self - a)` for `a` in `Z[1/p]`:
    /// `P' = aQ - P`, `Q' = (k^2 D - P'^2)/(b Q)`.
    pub fn shift(&self, a: &PNum, b: &PNum, d: &BigInt, p: &BigInt) -> QState {
        let p_next = a.mul(&self.q).sub(&self.p, p);
        let num = PNum::normalize(self.d_eff(d), 0, p).sub(&p_next.mul(&p_next), p);
        let q_next = num.div_exact(&b.mul(&self.q)).expect("Q divides k^2 D - P^2");
        QState { p: p_next, q: q_next, k: self.k.clone() }
    }
}

impl Digits for QState {
    fn unit(&self, env: &Env, count: u32) -> Option<(i64, BigInt)> {
        let field = env.field.expect("quadratic state without a field");
        let p = env.p;
        let kk = field.root_valuation();
        let modulus = pow_int(p, count);
        // numerator P + k p^kk u = p^w X with X a unit
        let (w, x) = if self.p.is_zero() {
            (kk, (&self.k * field.unit_root(count)).mod_floor(&modulus))
        } else if self.p.e != kk {
            let s = self.p.e.min(kk);
            let a = &self.p.m * pow_int(p, (self.p.e - s) as u32);
            let b = &self.k * field.unit_root(count) * pow_int(p, (kk - s) as u32);
            (s, (a + b).mod_floor(&modulus))
        } else {
            let mut prec = count + env.guard;
            loop {
                let m = pow_int(p, prec);
                let z = (&self.p.m + &self.k * field.unit_root(prec)).mod_floor(&m);
                if !z.is_zero() {
                    let (j, u) = split_int(&z, p);
                    if prec as i64 - j >= count as i64 {
                        break (kk + j, u.mod_floor(&modulus));
                    }
                }
                prec *= 2;
            }
        };
        let inv = mod_inverse(&self.q.m.mod_floor(&modulus), &modulus);
        Some((w - self.q.e, (x * inv).mod_floor(&modulus)))
    }

    fn valuation_minus(&self, env: &Env, c: &Rational) -> Valuation {
        let c = PNum::from_rational(c, env.p).expect("integer parts lie in Z[1/p]");
        let shifted = QState { p: self.p.sub(&c.mul(&self.q), env.p), q: self.q.clone(), k: self.k.clone() };
        env.valuation(&shifted)
    }
}

/// `u` as a function of the balanced digit `c_0`.
pub(crate) fn u_of_digit(c0: i64) -> i64 {
    match c0 {
        0 => 0,
        -1 => 1,
        1 => -1,
        c if c >= 2 => 1,
        _ => -1,
    }
}

/// First `count` digits of `n` (an integer read as a p-adic integer).
pub(crate) fn extract_digits(n: &BigInt, p: &BigInt, count: usize, balanced: bool) -> Vec<i64> {
    let mut out = Vec::with_capacity(count);
    let mut m = n.clone();
    for _ in 0..count {
        let c = if balanced { symmetric_mod(&m, p) } else { m.mod_floor(p) };
        m = (&m - &c) / p;
        out.push(c.to_i64().expect("digit fits in i64"));
    }
    out
}

// ---------------------------------------------------------------------------
// Public operations

fn with_env<T>(x: &QpNumber, ctx: &PadicContext, f: impl FnOnce(&Env, &Scalar) -> T) -> Result<T> {
    ctx.validate()?;
    let field = match x {
        QpNumber::Rational(_) => None,
        QpNumber::Quadratic(q) => Some(QuadField::new(&q.d, ctx.p)?),
    };
    let env = Env::new(ctx, field.as_ref());
    Ok(f(&env, &x.to_scalar()))
}

fn require(ctx: &PadicContext, conv: Convention, what: &str) -> Result<()> {
    if ctx.convention != conv {
        return Err(Error::ConventionMismatch(format!("{what} needs the {conv} convention")));
    }
    Ok(())
}

/// `v_p(x)`, `Infinite` for zero. Fails only when the radicand has no
/// square root in Q_p.
pub fn valuation(x: &QpNumber, ctx: &PadicContext) -> Result<Valuation> {
    with_env(x, ctx, |env, s| env.valuation(s))
}

/// The first `count` digits of `x` starting at `v_p(x)`, in the context's
/// convention.
pub fn digits(x: &QpNumber, ctx: &PadicContext, count: usize) -> Result<PAdicDigits> {
    if count == 0 {
        return Err(Error::InvalidInput("count must be positive".into()));
    }
    let balanced = ctx.convention == Convention::Balanced;
    with_env(x, ctx, |env, s| match env.unit(s, count as u32) {
        None => PAdicDigits { start_valuation: 0, digits: vec![0; count], exactness: Exactness::Exact },
        Some((v, w)) => {
            let m = pow_int(env.p, count as u32);
            let top = if balanced { symmetric_mod(&w, &m) } else { w };
            let digits = extract_digits(&top, env.p, count, balanced);
            let mut out = PAdicDigits { start_valuation: v, digits, exactness: Exactness::Window };
            if let QpNumber::Rational(r) = x {
                if out.partial_sum(ctx.p) == *r {
                    out.exactness = Exactness::Exact;
                }
            }
            out
        }
    })
}

/// `s` with `s^2 = D (mod p^k)`, on the requested branch, in `[0, p^k)`.
pub fn sqrt_hensel(d: &BigInt, ctx: &PadicContext, k: u32, branch: BranchTag) -> Result<BigInt> {
    ctx.validate()?;
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let field = QuadField::new(d, ctx.p)?;
    let m = pow_int(&field.p, k);
    let r = field.root_mod(k);
    Ok(match branch {
        BranchTag::Principal => r,
        BranchTag::Conjugate => (-r).mod_floor(&m),
    })
}

pub fn floor_s(x: &QpNumber, ctx: &PadicContext) -> Result<Rational> {
    require(ctx, Convention::Balanced, "s")?;
    with_env(x, ctx, |env, s| env.floor_s(s))
}

pub fn floor_t(x: &QpNumber, ctx: &PadicContext) -> Result<Rational> {
    require(ctx, Convention::Balanced, "t")?;
    with_env(x, ctx, |env, s| env.floor_t(s))
}

pub fn floor_u(x: &QpNumber, ctx: &PadicContext) -> Result<i64> {
    require(ctx, Convention::Balanced, "u")?;
    with_env(x, ctx, |env, s| env.floor_u(s))?
}

pub fn floor_ruban(x: &QpNumber, ctx: &PadicContext) -> Result<Rational> {
    require(ctx, Convention::Standard, "Ruban's integer part")?;
    with_env(x, ctx, |env, s| env.floor_ruban(s))
}

/// `1/(x - a)`. Quadratic inputs keep `D` and the branch:
/// `P' = aQ - P`, `Q' = (D - P'^2)/Q`.
pub fn reciprocal_shift(x: &QpNumber, a: &Rational) -> Result<QpNumber> {
    match x {
        QpNumber::Rational(r) => {
            let diff = r - a;
            if diff.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(QpNumber::Rational(diff.recip()))
        }
        QpNumber::Quadratic(q) => {
            let p_next = a * &q.q - &q.p;
            let d = Rational::from_integer(q.d.clone());
            let q_next = (d - &p_next * &p_next) / &q.q;
            Ok(QpNumber::Quadratic(QuadraticIrrational {
                p: p_next,
                q: q_next,
                d: q.d.clone(),
                branch: q.branch,
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn ctx(p: u64, c: Convention) -> PadicContext {
        PadicContext::new(p, c).unwrap()
    }

    #[test]
    fn context_rejects_bad_primes() {
        for p in [0, 1, 2, 4, 9, 15] {
            assert!(matches!(
                PadicContext::new(p, Convention::Standard),
                Err(Error::InvalidPrime(_))
            ));
        }
        assert!(PadicContext::new(7, Convention::Balanced).unwrap().with_budget(0).is_err());
        assert!(PadicContext::new(7, Convention::Balanced).unwrap().with_guard(0).is_err());
    }

    #[test]
    fn rational_valuations() {
        let c = ctx(5, Convention::Standard);
        assert_eq!(valuation(&QpNumber::rational(22, 7).unwrap(), &c).unwrap(), Valuation::Finite(0));
        let c7 = ctx(7, Convention::Standard);
        assert_eq!(valuation(&QpNumber::rational(1, 7).unwrap(), &c7).unwrap(), Valuation::Finite(-1));
        assert_eq!(valuation(&QpNumber::rational(0, 1).unwrap(), &c7).unwrap(), Valuation::Infinite);
        assert!(Valuation::Infinite > Valuation::Finite(i64::MAX));
    }

    #[test]
    fn sqrt_two_is_a_seven_adic_unit() {
        let c = ctx(7, Convention::Balanced);
        assert_eq!(valuation(&QpNumber::sqrt(2).unwrap(), &c).unwrap(), Valuation::Finite(0));
        // p^2 * 2 has root of valuation 1
        assert_eq!(valuation(&QpNumber::sqrt(98).unwrap(), &c).unwrap(), Valuation::Finite(1));
    }

    #[test]
    fn digit_examples() {
        let d = digits(&QpNumber::rational(2, 7).unwrap(), &ctx(5, Convention::Standard), 3).unwrap();
        assert_eq!((d.start_valuation, d.digits.clone()), (0, vec![1, 2, 1]));
        assert_eq!(d.exactness, Exactness::Window);
        let x = QpNumber::rational(-2, 5).unwrap();
        let d = digits(&x, &ctx(7, Convention::Standard), 3).unwrap();
        assert_eq!(d.digits, vec![1, 4, 5]);
        let d = digits(&x, &ctx(7, Convention::Balanced), 3).unwrap();
        assert_eq!(d.digits, vec![1, -3, -1]);
        let d = digits(&QpNumber::rational(44, 7).unwrap(), &ctx(7, Convention::Standard), 4).unwrap();
        assert_eq!((d.start_valuation, d.digits, d.exactness), (-1, vec![2, 6, 0, 0], Exactness::Exact));
    }

    #[test]
    fn hensel_examples() {
        let c = ctx(7, Convention::Standard);
        assert_eq!(sqrt_hensel(&2.into(), &c, 1, BranchTag::Principal).unwrap(), 3.into());
        assert_eq!(sqrt_hensel(&2.into(), &c, 2, BranchTag::Principal).unwrap(), 10.into());
        assert_eq!(sqrt_hensel(&2.into(), &c, 2, BranchTag::Conjugate).unwrap(), 39.into());
        let c5 = ctx(5, Convention::Standard);
        assert!(matches!(
            sqrt_hensel(&3.into(), &c5, 1, BranchTag::Principal),
            Err(Error::NonResidue(_))
        ));
        // odd power of p
        assert!(matches!(
            sqrt_hensel(&10.into(), &c5, 1, BranchTag::Principal),
            Err(Error::NonResidue(_))
        ));
    }

    #[test]
    fn tonelli_shanks_matches_brute_force() {
        for p in [3u64, 5, 7, 13, 17, 41, 97, 113] {
            for n in 1..p {
                let brute = (1..p).find(|x| x * x % p == n);
                match sqrt_mod_prime(n, p) {
                    Some(x) => assert_eq!(x * x % p, n),
                    None => assert!(brute.is_none()),
                }
            }
        }
    }

    #[test]
    fn floor_examples() {
        let b7 = ctx(7, Convention::Balanced);
        let s7 = ctx(7, Convention::Standard);
        let q = |n, d| QpNumber::rational(n, d).unwrap();
        assert_eq!(floor_s(&q(-2, 5), &b7).unwrap(), r(1, 1));
        assert_eq!(floor_s(&q(-5, 7), &b7).unwrap(), r(-5, 7));
        assert_eq!(floor_s(&q(7 * 3, 2), &b7).unwrap(), r(0, 1));
        assert_eq!(floor_t(&q(7, 15), &ctx(5, Convention::Balanced)).unwrap(), r(-1, 5));
        assert_eq!(floor_t(&q(3, 2), &ctx(5, Convention::Balanced)).unwrap(), r(0, 1));
        assert_eq!(floor_t(&q(-5, 7), &b7).unwrap(), r(2, 7));
        assert_eq!(floor_ruban(&q(-5, 7), &s7).unwrap(), r(44, 7));
        assert_eq!(floor_ruban(&q(-1, 7), &s7).unwrap(), r(48, 7));
        assert_eq!(floor_ruban(&q(-2, 5), &s7).unwrap(), r(1, 1));
        assert!(matches!(floor_s(&q(1, 2), &s7), Err(Error::ConventionMismatch(_))));
        assert!(matches!(floor_ruban(&q(1, 2), &b7), Err(Error::ConventionMismatch(_))));
    }

    #[test]
    fn u_examples() {
        let b7 = ctx(7, Convention::Balanced);
        let q = |n, d| QpNumber::rational(n, d).unwrap();
        assert_eq!(floor_u(&q(-1, 1), &b7).unwrap(), 1);
        assert_eq!(floor_u(&q(6, 1), &b7).unwrap(), 1); // c_0 = -1
        assert_eq!(floor_u(&q(7, 1), &b7).unwrap(), 0);
        assert_eq!(floor_u(&q(3, 1), &b7).unwrap(), 1);
        assert_eq!(floor_u(&q(2, 1), &b7).unwrap(), 1);
        assert_eq!(floor_u(&q(1, 1), &b7).unwrap(), -1);
        assert_eq!(floor_u(&q(-3, 1), &b7).unwrap(), -1);
        assert_eq!(floor_u(&q(-2, 1), &b7).unwrap(), -1);
        assert!(matches!(floor_u(&q(1, 7), &b7), Err(Error::NegativeValuation)));
    }

    #[test]
    fn reciprocal_examples() {
        let q = |n, d| QpNumber::rational(n, d).unwrap();
        assert_eq!(reciprocal_shift(&q(-2, 5), &r(1, 1)).unwrap(), q(-5, 7));
        assert_eq!(reciprocal_shift(&q(22, 7), &r(1, 1)).unwrap(), q(7, 15));
        assert!(matches!(reciprocal_shift(&q(3, 1), &r(3, 1)), Err(Error::DivisionByZero)));
        // (sqrt(D)) shifted by z: P' = z, Q' = D - z^2
        let x = QpNumber::sqrt(2).unwrap();
        let y = reciprocal_shift(&x, &r(3, 1)).unwrap();
        match y {
            QpNumber::Quadratic(ref qi) => {
                assert_eq!(qi.p, r(3, 1));
                assert_eq!(qi.q, r(-7, 1));
            }
            _ => panic!(),
        }
        // x * y' = 1 where y' = 1/(x - 3)... check (x - 3) * y == 1 in Q(sqrt 2)
        let d = BigInt::from(2);
        let prod = x.to_scalar().sub_rational(&r(3, 1)).mul(&y.to_scalar(), &d);
        assert_eq!(prod, Scalar::rational(r(1, 1)));
    }

    #[test]
    fn conjugate_canonical_form_is_same_value() {
        let c = ctx(7, Convention::Balanced);
        let x: QpNumber = "quad:1/2,3,2,conj".parse().unwrap();
        let QpNumber::Quadratic(qi) = &x else { panic!() };
        let y = QpNumber::Quadratic(qi.canonical());
        assert!(x.same_value(&y, &c).unwrap());
        assert!(!x.same_value(&x.conjugate(), &c).unwrap());
        // sqrt(8) = 2 sqrt(2)
        let a: QpNumber = "quad:0,1,8".parse().unwrap();
        let b: QpNumber = "quad:0,1/2,2".parse().unwrap();
        let b_conj: QpNumber = "quad:0,-1/2,2".parse().unwrap();
        let two_sqrt2_is_principal = a.same_value(&b, &c).unwrap();
        assert_ne!(two_sqrt2_is_principal, a.same_value(&b_conj, &c).unwrap());
    }

    #[test]
    fn parse_and_display() {
        let x: QpNumber = "-2/5".parse().unwrap();
        assert_eq!(x.to_string(), "-2/5");
        let y: QpNumber = "quad:0,1,2".parse().unwrap();
        assert_eq!(y.to_string(), "quad:0,1,2");
        assert!("quad:0,1,4".parse::<QpNumber>().is_err());
        assert!("quad:0,0,2".parse::<QpNumber>().is_err());
        assert!("1/0".parse::<QpNumber>().is_err());
        assert!("abc".parse::<QpNumber>().is_err());
    }}
