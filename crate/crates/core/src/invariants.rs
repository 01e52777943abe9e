//! Closed forms for `½η_Dir + ⅛η_Sign` and for μ̄ on Σ(a₁,…,aₙ), and the
//! report that checks them against each other and against the plumbing.
//!
//! Every function here returns μ̄ itself, never −μ̄.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::dedekind::{c_invariant, dedekind_rademacher_sum_big, dedekind_sum, dedekind_sum_big};
use crate::error::{Error, Result};
use crate::numeric::ExactRational;
use crate::plumbing::{self, aps_index_from};
use crate::seifert::{normalize_even, solve_coefficients, CoefficientVector, Parity, SeifertData};

fn sign(b: i64) -> i64 {
    assert!(b != 0, "b_i is coprime to a_i >= 2, so never zero");
    b.signum()
}

/// `½η_Dir(Y) + ⅛η_Sign(Y)`:
///
/// `1/8 + ½ Σ s(A/aᵢ, aᵢ) + Σ s(A/aᵢ, aᵢ; ½, ½)`, minus `1/(8A)` when every
/// `aᵢ` is odd.
pub fn eta_combination(y: &SeifertData) -> Result<ExactRational> {
    let half = ExactRational::new(1, 2);
    let mut total = ExactRational::new(1, 8);
    for (i, &a) in y.multiplicities().iter().enumerate() {
        let c = y.cofactor(i);
        total += &half * dedekind_sum_big(&c, a)?;
        total += dedekind_rademacher_sum_big(&c, a, &half, &half)?;
    }
    if y.parity() == Parity::Odd {
        total -= ExactRational::new(1, BigInt::from(8) * y.product());
    }
    Ok(total)
}

// The even-case formulas want every a_i - b_i odd.
fn prepared(y: &SeifertData, coeffs: &CoefficientVector) -> Result<CoefficientVector> {
    if !coeffs.satisfies_equation(y) {
        return Err(Error::Consistency(format!(
            "coefficients {:?} do not solve the equation for {y}",
            coeffs.b
        )));
    }
    match y.parity() {
        Parity::Even if !coeffs.even_normalized => normalize_even(y, coeffs),
        _ => Ok(coeffs.clone()),
    }
}

/// μ̄ through the integers `c(q, p)`.
pub fn mubar_c_form(y: &SeifertData) -> Result<i64> {
    mubar_c_form_with(y, &solve_coefficients(y)?)
}

/// Odd case: `μ̄ = (Σ (c(aᵢ, bᵢ) + sign bᵢ) − 1) / 8`.
/// Even case: `μ̄ = (Σ c(aᵢ − bᵢ, aᵢ) − 1) / 8` for normalized `b`.
pub fn mubar_c_form_with(y: &SeifertData, coeffs: &CoefficientVector) -> Result<i64> {
    let coeffs = prepared(y, coeffs)?;
    let a = y.multiplicities();
    let mut total: i64 = -1;
    for (&ai, &bi) in a.iter().zip(&coeffs.b) {
        total += match y.parity() {
            Parity::Odd => c_invariant(ai, bi)? + sign(bi),
            Parity::Even => c_invariant(ai - bi, ai)?,
        };
    }
    let (q, r) = total.div_rem(&8);
    if r != 0 {
        return Err(Error::Consistency(format!(
            "c-form of {y} gives non-integral mu-bar {total}/8"
        )));
    }
    Ok(q)
}

/// μ̄ through Dedekind sums, as an exact rational (integral when correct).
pub fn mubar_dedekind_form(y: &SeifertData) -> Result<ExactRational> {
    mubar_dedekind_form_with(y, &solve_coefficients(y)?)
}

/// Odd case:
/// `−μ̄ = 1/8 − ⅛Σ sign bᵢ + ½Σ sign bᵢ·s(aᵢ, |bᵢ|) − Σ sign bᵢ·s(aᵢ, 2|bᵢ|)`.
///
/// Even case, `b` normalized:
/// `−μ̄ = 1/8 + ½Σ s(aᵢ − bᵢ, aᵢ) − Σ s(aᵢ − bᵢ, 2aᵢ)`.
pub fn mubar_dedekind_form_with(y: &SeifertData, coeffs: &CoefficientVector) -> Result<ExactRational> {
    let coeffs = prepared(y, coeffs)?;
    let half = ExactRational::new(1, 2);
    let eighth = ExactRational::new(1, 8);
    let mut minus_mubar = eighth.clone();
    for (&ai, &bi) in y.multiplicities().iter().zip(&coeffs.b) {
        match y.parity() {
            Parity::Odd => {
                let sb = ExactRational::from(sign(bi));
                let m = bi.abs();
                let twice = m.checked_mul(2).ok_or(Error::Overflow("2|b_i|"))?;
                minus_mubar -= &eighth * &sb;
                minus_mubar += &half * &sb * dedekind_sum(ai, m)?;
                minus_mubar -= &sb * dedekind_sum(ai, twice)?;
            }
            Parity::Even => {
                let q = ai - bi;
                minus_mubar += &half * dedekind_sum(q, ai)?;
                minus_mubar -= dedekind_sum(q, 2 * ai)?;
            }
        }
    }
    Ok(-minus_mubar)
}

pub const ETA_EQUALS_MINUS_MUBAR: &str = "eta_equals_minus_mubar";
pub const DEDEKIND_EQUALS_C_FORM: &str = "dedekind_equals_c_form";
pub const MUBAR_IS_INTEGER: &str = "mubar_is_integer";
pub const ORACLE_AGREES: &str = "oracle_agrees";
pub const APS_INDEX_ZERO: &str = "aps_index_zero";

/// All invariants of one sphere and the checks relating them.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    pub seifert: SeifertData,
    pub eta_combination: Option<ExactRational>,
    #[serde(rename = "mubar")]
    pub mubar_c_form: Option<i64>,
    #[serde(rename = "mubar_dedekind")]
    pub mubar_dedekind_form: Option<ExactRational>,
    pub mubar_oracle: Option<i64>,
    pub signature: Option<i64>,
    pub wu_self_intersection: Option<i64>,
    pub aps_index: Option<ExactRational>,
    pub verdicts: BTreeMap<String, bool>,
    /// Messages of any computation that errored out.
    pub errors: Vec<String>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }

    pub fn failed_verdicts(&self) -> Vec<String> {
        self.verdicts
            .iter()
            .filter(|(_, &ok)| !ok)
            .map(|(k, _)| k.clone())
            .collect()
    }
}

fn keep<T>(errors: &mut Vec<String>, r: Result<T>) -> Option<T> {
    r.map_err(|e| errors.push(e.to_string())).ok()
}

/// Full report, including the plumbing oracle and the index check.
pub fn verify_main_theorem(y: &SeifertData) -> InvariantReport {
    verify(y, true)
}

/// Report; the plumbing-based fields and verdicts are skipped unless
/// `with_plumbing` is set.
pub fn verify(y: &SeifertData, with_plumbing: bool) -> InvariantReport {
    let mut errors = Vec::new();
    let eta = keep(&mut errors, eta_combination(y));
    let c_form = keep(&mut errors, mubar_c_form(y));
    let dedekind = keep(&mut errors, mubar_dedekind_form(y));
    let plumbing = if with_plumbing {
        keep(&mut errors, plumbing::analyze(y))
    } else {
        None
    };
    let oracle = plumbing.as_ref().and_then(|p| keep(&mut errors, p.mubar()));
    let aps = match (&eta, &plumbing) {
        (Some(eta), Some(p)) => Some(aps_index_from(eta, p)),
        _ => None,
    };

    let mut verdicts = BTreeMap::new();
    let integer_dedekind = dedekind.as_ref().and_then(ExactRational::to_i64);
    verdicts.insert(
        MUBAR_IS_INTEGER.to_string(),
        c_form.is_some() && integer_dedekind.is_some(),
    );
    verdicts.insert(
        DEDEKIND_EQUALS_C_FORM.to_string(),
        c_form.is_some() && integer_dedekind == c_form,
    );
    verdicts.insert(
        ETA_EQUALS_MINUS_MUBAR.to_string(),
        matches!((&eta, c_form), (Some(e), Some(m)) if *e == ExactRational::from(-m)),
    );
    if with_plumbing {
        verdicts.insert(ORACLE_AGREES.to_string(), oracle.is_some() && oracle == c_form);
        verdicts.insert(
            APS_INDEX_ZERO.to_string(),
            aps.as_ref().is_some_and(ExactRational::is_zero),
        );
    }

    InvariantReport {
        seifert: y.clone(),
        eta_combination: eta,
        mubar_c_form: c_form,
        mubar_dedekind_form: dedekind,
        mubar_oracle: oracle,
        signature: plumbing.as_ref().map(|p| p.signature),
        wu_self_intersection: plumbing.as_ref().map(|p| p.wu_square),
        aps_index: aps,
        verdicts,
        errors,
    }
}
