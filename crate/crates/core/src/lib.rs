//! Exact computation of the μ̄-invariant and of `½η_Dir + ⅛η_Sign` for
//! Seifert fibered homology spheres Σ(a₁,…,aₙ).
//!
//! Three independent routes to μ̄ are provided: the `c(q, p)` integers, the
//! Dedekind-sum form, and the plumbing intersection form with its integral
//! Wu class. The η-invariant combination comes from Dedekind–Rademacher sums.
//! All arithmetic is exact.

pub mod cli;
pub mod dedekind;
pub mod error;
pub mod invariants;
pub mod numeric;
pub mod plumbing;
pub mod seifert;

pub use dedekind::{
    c_invariant, c_invariant_cotangent, dedekind_rademacher_sum, dedekind_sum,
    dedekind_sum_general,
};
pub use error::{Error, Result};
pub use invariants::{
    eta_combination, mubar_c_form, mubar_dedekind_form, verify_main_theorem, InvariantReport,
};
pub use numeric::{fractional_part, sawtooth, ExactRational};
pub use plumbing::{aps_index, build_plumbing, mubar_oracle, IntersectionForm, PlumbingGraph, WuClass};
pub use seifert::{
    alternate_coefficients, enumerate_corpus, normalize_even, solve_coefficients, validate,
    CoefficientVector, Parity, SeifertData,
};
