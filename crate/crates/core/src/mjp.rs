//! The p-adic Jacobi-Perron algorithm on m-tuples, using Browkin's `s`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{Map, Value};

use crate::cf::{as_object, field_str, field_u64, json_rational, rational_json, Status};
use crate::error::{Error, Result};
use crate::padic::{
    fmt_rational, rational_valuation, Convention, Env, PadicContext, QpNumber, QuadField, Rational,
    Scalar, Valuation,
};

/// Rows `(a_n^(1), ..., a_n^(m))`; `a_n^(m+1) = 1` is implicit. The last
/// row of a finite expansion holds the exact final complete quotients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MjpExpansion {
    m: usize,
    rows: Vec<Vec<Rational>>,
    status: Status,
    context: PadicContext,
}

impl MjpExpansion {
    pub fn dimension(&self) -> usize {
        self.m
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn context(&self) -> &PadicContext {
        &self.context
    }

    pub fn stored_rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// Number of rows, `None` for periodic expansions.
    pub fn len(&self) -> Option<usize> {
        match self.status {
            Status::Periodic { .. } => None,
            _ => Some(self.rows.len()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Row `n`, following the period when there is one.
    pub fn row(&self, n: usize) -> Result<&[Rational]> {
        match self.status {
            Status::Periodic { pre_period, period } if n >= self.rows.len() => {
                Ok(&self.rows[pre_period + (n - pre_period) % period])
            }
            _ => self
                .rows
                .get(n)
                .map(|r| r.as_slice())
                .ok_or(Error::IndexBeyondFinite { index: n, len: self.rows.len() }),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut status = Map::new();
        match self.status {
            Status::Finite => {
                status.insert("kind".into(), "finite".into());
            }
            Status::Periodic { pre_period, period } => {
                status.insert("kind".into(), "periodic".into());
                status.insert("pre_period".into(), pre_period.into());
                status.insert("period".into(), period.into());
            }
            Status::Truncated { steps } => {
                status.insert("kind".into(), "truncated".into());
                status.insert("steps".into(), steps.into());
            }
        }
        let rows = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(rational_json).collect()))
            .collect();
        let mut out = Map::new();
        out.insert("p".into(), self.context.p.into());
        out.insert("m".into(), self.m.into());
        out.insert("rows".into(), Value::Array(rows));
        out.insert("status".into(), Value::Object(status));
        out.insert("precision_guard".into(), self.context.precision_guard.into());
        out.insert("step_budget".into(), self.context.step_budget.into());
        Value::Object(out)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = as_object(v)?;
        let mut ctx = PadicContext::new(field_u64(obj, "p")?, Convention::Balanced)?;
        if obj.contains_key("precision_guard") {
            ctx = ctx.with_guard(field_u64(obj, "precision_guard")? as u32)?;
        }
        if obj.contains_key("step_budget") {
            ctx = ctx.with_budget(field_u64(obj, "step_budget")? as usize)?;
        }
        let m = field_u64(obj, "m")? as usize;
        let rows = obj
            .get("rows")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing rows".into()))?
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Parse("row must be an array".into()))?
                    .iter()
                    .map(json_rational)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let st = as_object(obj.get("status").ok_or_else(|| Error::Parse("missing status".into()))?)?;
        let status = match field_str(st, "kind")? {
            "finite" => Status::Finite,
            "periodic" => Status::Periodic {
                pre_period: field_u64(st, "pre_period")? as usize,
                period: field_u64(st, "period")? as usize,
            },
            "truncated" => Status::Truncated { steps: field_u64(st, "steps")? as usize },
            k => return Err(Error::Parse(format!("unknown status {k:?}"))),
        };
        if m == 0 || rows.is_empty() || rows.iter().any(|r| r.len() != m) {
            return Err(Error::Parse("rows must be nonempty m-tuples".into()));
        }
        Ok(MjpExpansion { m, rows, status, context: ctx })
    }
}

impl fmt::Display for MjpExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, r) in self.rows.iter().enumerate() {
            let cells: Vec<String> = r.iter().map(fmt_rational).collect();
            writeln!(f, "{n}: ({})", cells.join(", "))?;
        }
        write!(f, "{}", self.status)
    }
}

/// The common radicand of the irrational coordinates.
fn common_field(xs: &[QpNumber], ctx: &PadicContext) -> Result<Option<QuadField>> {
    let mut d: Option<&BigInt> = None;
    for x in xs {
        if let Some(dx) = x.radicand() {
            match d {
                None => d = Some(dx),
                Some(d0) if d0 == dx => {}
                Some(d0) => {
                    return Err(Error::UnsupportedInput(format!(
                        "coordinates over different radicands {d0} and {dx}"
                    )))
                }
            }
        }
    }
    d.map(|d| QuadField::new(d, ctx.p)).transpose()
}

/// Expands `xs` with `a_n^(i) = s(alpha_n^(i))`,
/// `alpha_{n+1}^(1) = 1/(alpha_n^(m) - a_n^(m))` and
/// `alpha_{n+1}^(i) = (alpha_n^(i-1) - a_n^(i-1))/(alpha_n^(m) - a_n^(m))`,
/// stopping when `alpha_n^(m) = a_n^(m)`, when a tuple of complete quotients
/// repeats, or at the step budget.
pub fn jp_expand(xs: &[QpNumber], ctx: &PadicContext) -> Result<MjpExpansion> {
    ctx.validate()?;
    if xs.is_empty() {
        return Err(Error::InvalidInput("need at least one coordinate".into()));
    }
    if ctx.convention != Convention::Balanced {
        return Err(Error::ConventionMismatch("Jacobi-Perron uses s and needs the balanced convention".into()));
    }
    let m = xs.len();
    let field = common_field(xs, ctx)?;
    let env = Env::new(ctx, field.as_ref());
    let mut alpha: Vec<Scalar> = xs.iter().map(QpNumber::to_scalar).collect();
    let mut seen: HashMap<Vec<Scalar>, usize> = HashMap::new();
    let mut rows = Vec::new();
    let mut n = 0;
    let status = loop {
        if let Some(&first) = seen.get(&alpha) {
            break Status::Periodic { pre_period: first, period: n - first };
        }
        if n >= ctx.step_budget {
            break Status::Truncated { steps: n };
        }
        let a: Vec<Rational> = alpha.iter().map(|x| env.floor_s(x)).collect();
        let last = alpha[m - 1].sub_rational(&a[m - 1]);
        if last.is_zero() {
            if alpha.iter().all(|x| x.b.is_zero()) {
                rows.push(alpha.iter().map(|x| x.a.clone()).collect());
            } else {
                rows.push(a);
            }
            break Status::Finite;
        }
        let inv = env.recip(&last).expect("nonzero");
        let mut next = Vec::with_capacity(m);
        next.push(inv.clone());
        for i in 1..m {
            next.push(env.mul(&alpha[i - 1].sub_rational(&a[i - 1]), &inv));
        }
        seen.insert(std::mem::replace(&mut alpha, next), n);
        rows.push(a);
        n += 1;
    };
    Ok(MjpExpansion { m, rows, status, context: *ctx })
}

/// `A_k^(i)` for `k = 0..=upto` and `i = 1..m+1`, from `A_{-j}^(i) = delta_ij`
/// and `A_k^(i) = sum_j a_k^(j) A_{k-j}^(i)` with `a_k^(m+1) = 1`.
pub fn jp_convergents(e: &MjpExpansion, upto: usize) -> Result<Vec<Vec<Rational>>> {
    let m = e.m;
    // history[j] = A_{k-1-j}, seeded with A_{-1}, ..., A_{-(m+1)}
    let mut history: Vec<Vec<Rational>> = (1..=m + 1)
        .map(|j| (1..=m + 1).map(|i| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    let mut out = Vec::with_capacity(upto + 1);
    for k in 0..=upto {
        let row = e.row(k)?;
        let coeff = |j: usize| if j == m { Rational::one() } else { row[j].clone() };
        let next: Vec<Rational> = (0..=m)
            .map(|i| (0..=m).map(|j| coeff(j) * &history[j][i]).sum())
            .collect();
        history.pop();
        history.insert(0, next.clone());
        out.push(next);
    }
    Ok(out)
}

/// Checks `v(a_n^(1)) <= 0` and `v(a_n^(1)) < v(a_n^(i))` for `i = 2..m+1`
/// on every row after the first (row 0 holds the integer parts of the
/// input, on which no condition is placed).
pub fn jp_check_convergence(e: &MjpExpansion) -> bool {
    let p = e.context.p;
    let rows = match e.status {
        Status::Periodic { pre_period, period } => pre_period + 2 * period,
        _ => e.rows.len(),
    };
    (1..rows).all(|n| {
        let row = e.row(n).expect("within range");
        let v1 = rational_valuation(&row[0], p);
        // a_n^(m+1) = 1 turns the weak inequality into a strict one
        v1 < Valuation::Finite(0) && row[1..].iter().all(|a| v1 < rational_valuation(a, p))
    })
}

/// `v_p(A_k^(i) - x^(i) A_k^(m+1))` for `k = 0..=upto`, one sequence per
/// coordinate.
pub fn jp_strong_convergence_profile(e: &MjpExpansion, xs: &[QpNumber], upto: usize) -> Result<Vec<Vec<Valuation>>> {
    if xs.len() != e.m {
        return Err(Error::InvalidInput("coordinate count differs from the expansion".into()));
    }
    let field = common_field(xs, &e.context)?;
    let env = Env::new(&e.context, field.as_ref());
    let convs = jp_convergents(e, upto)?;
    Ok((0..e.m)
        .map(|i| {
            let x = xs[i].to_scalar();
            convs
                .iter()
                .map(|c| {
                    let diff = x.scale(&c[e.m]).sub_rational(&c[i]);
                    env.valuation(&diff)
                })
                .collect()
        })
        .collect())
}

/// Whether `1, x^(1), ..., x^(m)` are linearly dependent over Q. All
/// coordinates live in `Q + Q sqrt(D)`, so this is a rank computation in
/// two dimensions.
pub fn linearly_dependent(xs: &[QpNumber]) -> Result<bool> {
    let mut d: Option<&BigInt> = None;
    for x in xs {
        if let Some(dx) = x.radicand() {
            if d.is_some_and(|d0| d0 != dx) {
                return Err(Error::UnsupportedInput("coordinates over different radicands".into()));
            }
            d = Some(dx);
        }
    }
    let any_irrational = xs.iter().any(|x| !x.to_scalar().b.is_zero());
    let rank = if any_irrational { 2 } else { 1 };
    Ok(xs.len() + 1 > rank)
}
