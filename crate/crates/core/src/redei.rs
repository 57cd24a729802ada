//! Periodic expansions of roots of `x^2 + h x - d` built from the identity
//! `x = z + 1/(-(h+2z)/N + 1/(h + 2z + ...))` with `N = z^2 + h z - d`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algorithms::{expand, AlgorithmId};
use crate::cf::{Expansion, Status};
use crate::error::{Error, Result};
use crate::padic::{is_square, BranchTag, PadicContext, QpNumber, QuadraticIrrational, Rational};

fn discriminant(h: &BigInt, d: &BigInt) -> BigInt {
    h * h + BigInt::from(4) * d
}

fn check_irreducible(h: &BigInt, d: &BigInt) -> Result<()> {
    let disc = discriminant(h, d);
    if !disc.is_negative() && is_square(&disc) {
        return Err(Error::InvalidInput(format!("x^2 + {h}x - {d} has rational roots")));
    }
    Ok(())
}

/// `[z | -(h+2z)/(z^2+hz-d), h+2z]`, all numerators 1.
pub fn redei_expansion(h: &BigInt, d: &BigInt, z: &BigInt, ctx: &PadicContext) -> Result<Expansion> {
    ctx.validate()?;
    let n = z * z + h * z - d;
    if n.is_zero() {
        return Err(Error::DegenerateZ);
    }
    check_irreducible(h, d)?;
    let w = h + BigInt::from(2) * z;
    if w.is_zero() {
        return Err(Error::InvalidInput("h + 2z = 0 makes the period block vanish".into()));
    }
    let quotients = vec![
        Rational::from_integer(z.clone()),
        Rational::new(-w.clone(), n),
        Rational::from_integer(w),
    ];
    Expansion::simple(quotients, Status::Periodic { pre_period: 1, period: 2 }, *ctx)
}

/// The root `(-h + sqrt(h^2 + 4d))/2` on the given branch of the square root.
pub fn polynomial_root(h: &BigInt, d: &BigInt, branch: BranchTag) -> Result<QuadraticIrrational> {
    check_irreducible(h, d)?;
    QuadraticIrrational::new(
        Rational::from_integer(-h.clone()),
        Rational::from_integer(BigInt::from(2)),
        discriminant(h, d),
        branch,
    )
}

/// Whether `x^2 + h x - d = 0` holds exactly.
pub fn satisfies_polynomial(x: &QpNumber, h: &BigInt, d: &BigInt) -> bool {
    let (h, d) = (Rational::from_integer(h.clone()), Rational::from_integer(d.clone()));
    match x {
        QpNumber::Rational(r) => (r * r + &h * r - d).is_zero(),
        QpNumber::Quadratic(q) => {
            // x = (P + s)/Q with s^2 = D: rational and irrational parts vanish
            let c = q.canonical();
            let big_d = Rational::from_integer(c.d.clone());
            let q2 = &c.q * &c.q;
            let rational = (&c.p * &c.p + big_d) / &q2 + &h * &c.p / &c.q - d;
            let irrational = Rational::from_integer(BigInt::from(2)) * &c.p / q2 + h / &c.q;
            rational.is_zero() && irrational.is_zero()
        }
    }
}

/// The `z` with `z^2 + h z - d = p`, `1 <= |z| <= (p-1)/2` and
/// `1 <= |h + 2z| <= (p-1)/2`, if there is one. For such `z`, Browkin II
/// expands a root of `x^2 + h x - d` as `[z | -(h+2z)/p, h+2z]`.
pub fn browkin2_redei_match(h: &BigInt, d: &BigInt, ctx: &PadicContext) -> Option<BigInt> {
    check_irreducible(h, d).ok()?;
    let p = ctx.prime();
    // z = (-h +- sqrt(h^2 + 4(d + p)))/2
    let disc = h * h + BigInt::from(4) * (d + &p);
    if disc.is_negative() {
        return None;
    }
    let s: BigInt = disc.sqrt();
    if &s * &s != disc {
        return None;
    }
    let half = (&p - 1) / 2;
    let bounded = |x: &BigInt| x.abs() >= BigInt::one() && x.abs() <= half;
    let two = BigInt::from(2);
    let mut zs: Vec<BigInt> = [-h + &s, -h - &s]
        .into_iter()
        .filter(|t| (t % &two).is_zero())
        .map(|t| t / &two)
        .collect();
    zs.sort();
    zs.dedup();
    zs.into_iter().find(|z| bounded(z) && bounded(&(h + BigInt::from(2) * z)))
}

/// Browkin II's expansions of the two roots of `x^2 + h x - d`.
pub fn browkin2_root_expansions(h: &BigInt, d: &BigInt, ctx: &PadicContext) -> Result<Vec<Expansion>> {
    [BranchTag::Principal, BranchTag::Conjugate]
        .into_iter()
        .map(|b| {
            let x = QpNumber::Quadratic(polynomial_root(h, d, b)?);
            expand(&x, AlgorithmId::BrowkinII, ctx)
        })
        .collect()
}
