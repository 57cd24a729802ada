//! Exact p-adic continued fractions.
//!
//! The crate expands rationals and quadratic irrationals with the Schneider,
//! Ruban, Browkin I, Browkin II, three-step (`s`/`t`/`u`) and alternating
//! (`s`/`t`) algorithms, detects periodicity on exact complete-quotient
//! states, validates convergence patterns and measures approximation quality.
//! A multidimensional Jacobi-Perron variant and Redei-type periodic
//! constructions are included.
//!
//! ```
//! use padic_cf::{expand, AlgorithmId, Convention, PadicContext, QpNumber};
//!
//! let ctx = PadicContext::new(7, Convention::Standard).unwrap();
//! let x: QpNumber = "-2/5".parse().unwrap();
//! let e = expand(&x, AlgorithmId::Ruban, &ctx).unwrap();
//! assert_eq!(e.to_string(), "[1, 44/7 | 48/7]");
//! ```

pub mod algorithms;
pub mod analysis;
pub mod cf;
pub mod cli;
pub mod error;
pub mod mjp;
pub mod padic;
pub mod redei;

pub use algorithms::{complete_quotients, expand, step, AlgorithmId, ExpansionState, StepResult};
pub use analysis::{
    approximation_lattice, check_convergence, classify, classify_quadratic, classify_rational,
    preperiod_constraints, purely_periodic_predicate, verify_valuation_identities, Certificate,
    Classification, ConvergenceCondition, ConvergenceReport, LatticeBasis, Verdict,
};
pub use cf::{
    approximation_profile, convergents, evaluate_finite, evaluate_periodic, matrix_form,
    predicted_profile, Convergent, Expansion, Status,
};
pub use error::{Error, Result};
pub use mjp::{
    jp_check_convergence, jp_convergents, jp_expand, jp_strong_convergence_profile,
    linearly_dependent, MjpExpansion,
};
pub use redei::{
    browkin2_redei_match, browkin2_root_expansions, polynomial_root, redei_expansion,
    satisfies_polynomial,
};
pub use padic::{
    BranchTag, Convention, Exactness, PAdicDigits, PadicContext, QpNumber, QuadraticIrrational,
    Rational, Valuation,
};
