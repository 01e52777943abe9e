//! Dedekind sums `s(q, p)`, Dedekind–Rademacher sums `s(q, p; x, y)`, and the
//! integers `c(q, p) = -4 s(q, p) + 8 s(q, 2p)`.
//!
//! Sums are evaluated by direct summation over `μ = 0, …, p - 1`. Every
//! sawtooth value in a given sum shares the denominator `2M` for a fixed `M`,
//! so the summation runs over `i128` numerators and builds one rational at the
//! end. Overflow of that fast path falls back to full big-rational arithmetic.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::numeric::{sawtooth, ExactRational};

/// Largest modulus accepted by the O(p) summations.
pub const MAX_MODULUS: i64 = 1 << 40;

fn check_modulus(p: i64) -> Result<()> {
    if p <= 0 {
        return Err(Error::NonPositiveModulus(p));
    }
    if p > MAX_MODULUS {
        return Err(Error::Overflow("dedekind sum modulus"));
    }
    Ok(())
}

fn check_coprime(q: i64, p: i64) -> Result<()> {
    let g = q.unsigned_abs().gcd(&p.unsigned_abs());
    if g != 1 {
        return Err(Error::NotCoprime(q, p, g as i64));
    }
    Ok(())
}

/// The classical Dedekind sum `s(q, p) = Σ_{μ mod p} ((μ/p)) ((qμ/p))`.
///
/// Negative `q` is handled as an odd extension, `s(-q, p) = -s(q, p)`.
/// Requires `p > 0` and `gcd(|q|, p) = 1`.
pub fn dedekind_sum(q: i64, p: i64) -> Result<ExactRational> {
    check_modulus(p)?;
    check_coprime(q, p)?;
    Ok(dedekind_sum_unchecked(q.rem_euclid(p), p))
}

/// The defining sum `Σ_{μ mod p} ((μ/p)) ((qμ/p))` for any integer `q`, without
/// the coprimality requirement of [`dedekind_sum`].
pub fn dedekind_sum_general(q: i64, p: i64) -> Result<ExactRational> {
    check_modulus(p)?;
    Ok(dedekind_sum_unchecked(q.rem_euclid(p), p))
}

/// Same as [`dedekind_sum`] with a big-integer first argument, reduced mod `p`.
pub fn dedekind_sum_big(q: &BigInt, p: i64) -> Result<ExactRational> {
    check_modulus(p)?;
    let r = reduce(q, p);
    check_coprime(r, p)?;
    Ok(dedekind_sum_unchecked(r, p))
}

/// `q` reduced into `[0, m)`.
pub(crate) fn reduce(q: &BigInt, m: i64) -> i64 {
    q.mod_floor(&BigInt::from(m))
        .to_i64()
        .expect("residue fits the modulus")
}

// Assumes 0 <= q < p. The odd extension in q is the same as reducing -q mod
// p, since ((x)) is odd and 1-periodic.
fn dedekind_sum_unchecked(q: i64, p: i64) -> ExactRational {
    if p == 1 {
        return ExactRational::zero();
    }
    let (q, p) = (q as i128, p as i128);
    // ((μ/p)) = (2μ - p) / 2p for 0 < μ < p, and likewise for qμ mod p != 0.
    let mut r = 0i128;
    let mut acc = 0i128;
    for mu in 1..p {
        r += q;
        if r >= p {
            r -= p;
        }
        if r != 0 {
            acc += (2 * mu - p) * (2 * r - p);
        }
    }
    ExactRational::new(acc, 4 * p * p)
}

/// Reduces `r` into `[0, 1)` and returns `(numer, denom)` as `i128` when they fit.
fn unit_residue(r: &ExactRational) -> Option<(i128, i128)> {
    let n = r.numer().mod_floor(r.denom());
    Some((n.to_i128()?, r.denom().to_i128()?))
}

/// The Dedekind–Rademacher sum
/// `s(q, p; x, y) = Σ_{μ mod p} (((μ + y)/p)) ((q(μ + y)/p + x))`.
///
/// Requires `p, q > 0` and coprime. The value depends on `x` and `y` only
/// modulo 1. With `x = y = 0` it is the ordinary Dedekind sum.
pub fn dedekind_rademacher_sum(
    q: i64,
    p: i64,
    x: &ExactRational,
    y: &ExactRational,
) -> Result<ExactRational> {
    if q <= 0 {
        return Err(Error::NonPositiveModulus(q));
    }
    check_modulus(p)?;
    check_coprime(q, p)?;
    let fast = unit_residue(x)
        .zip(unit_residue(y))
        .and_then(|((xn, xd), (yn, yd))| rademacher_i128(q as i128, p as i128, xn, xd, yn, yd));
    Ok(fast.unwrap_or_else(|| rademacher_exact(q, p, x, y)))
}

/// Big-integer first argument; reduced modulo `p · den(y)`, which is a period
/// of the sum in `q`.
pub fn dedekind_rademacher_sum_big(
    q: &BigInt,
    p: i64,
    x: &ExactRational,
    y: &ExactRational,
) -> Result<ExactRational> {
    if !q.is_positive() {
        return Err(Error::Consistency(format!(
            "Dedekind–Rademacher sum needs positive q, got {q}"
        )));
    }
    check_modulus(p)?;
    let yd = y
        .denom()
        .to_i64()
        .and_then(|d| d.checked_mul(p))
        .ok_or(Error::Overflow("Dedekind–Rademacher period"))?;
    let mut r = reduce(q, yd);
    if r == 0 {
        r = yd;
    }
    dedekind_rademacher_sum(r, p, x, y)
}

// Fast path. With x = xn/xd, y = yn/yd reduced into [0, 1):
//   (μ + y)/p          = N1 / M1,  M1 = p·yd,       N1 = μ·yd + yn
//   q(μ + y)/p + x     = N2 / M2,  M2 = p·yd·xd,    N2 = q·N1·xd + xn·M1
// and ((N/M)) = (2 (N mod M) - M) / 2M unless M | N.
fn rademacher_i128(q: i128, p: i128, xn: i128, xd: i128, yn: i128, yd: i128) -> Option<ExactRational> {
    let m1 = p.checked_mul(yd)?;
    let m2 = m1.checked_mul(xd)?;
    let q = q % m1;
    let mut acc = 0i128;
    for mu in 0..p {
        let n1 = mu.checked_mul(yd)?.checked_add(yn)?;
        if n1 == 0 {
            continue;
        }
        let n2 = q
            .checked_mul(n1)?
            .checked_mul(xd)?
            .checked_add(xn.checked_mul(m1)?)?;
        let r2 = n2.rem_euclid(m2);
        if r2 == 0 {
            continue;
        }
        let term = (2 * n1 - m1).checked_mul(r2.checked_mul(2)?.checked_sub(m2)?)?;
        acc = acc.checked_add(term)?;
    }
    let denom = m1.checked_mul(m2)?.checked_mul(4)?;
    Some(ExactRational::new(acc, denom))
}

fn rademacher_exact(q: i64, p: i64, x: &ExactRational, y: &ExactRational) -> ExactRational {
    let pr = ExactRational::from(p);
    let qr = ExactRational::from(q);
    (0..p)
        .map(|mu| {
            let shifted = (ExactRational::from(mu) + y) / &pr;
            sawtooth(&shifted) * sawtooth(&(&qr * &shifted + x))
        })
        .sum()
}

/// The integer `c(q, p)` for coprime `q` odd and `p ≠ 0`, evaluated as
/// `sign(pq) · (-4 s(|q|, |p|) + 8 s(|q|, 2|p|))`.
pub fn c_invariant(q: i64, p: i64) -> Result<i64> {
    if q % 2 == 0 {
        return Err(Error::EvenNumerator(q));
    }
    if p == 0 {
        return Err(Error::NonPositiveModulus(p));
    }
    check_coprime(q, p)?;
    let (aq, ap) = (q.abs(), p.abs());
    let twice = ap.checked_mul(2).ok_or(Error::Overflow("c(q, p) modulus"))?;
    let value = ExactRational::from(-4) * dedekind_sum(aq, ap)?
        + ExactRational::from(8) * dedekind_sum(aq, twice)?;
    let magnitude = value.to_i64().ok_or_else(|| {
        Error::Consistency(format!("c({q}, {p}) evaluated to non-integer {value}"))
    })?;
    Ok(if (q < 0) != (p < 0) { -magnitude } else { magnitude })
}

/// Floating-point evaluation of
/// `c(q, p) = (1/p) Σ_{k odd, 1 ≤ k < 2p} cot(πk/2p) cot(πqk/2p)`,
/// kept only as an independent cross-check on [`c_invariant`].
pub fn c_invariant_cotangent(q: i64, p: i64) -> Result<f64> {
    if q % 2 == 0 {
        return Err(Error::EvenNumerator(q));
    }
    if q <= 0 {
        return Err(Error::NonPositiveModulus(q));
    }
    check_modulus(p)?;
    check_coprime(q, p)?;
    let two_p = 2 * p as i128;
    let cot = |j: i128| {
        let theta = PI * (j.rem_euclid(two_p) as f64) / (two_p as f64);
        theta.cos() / theta.sin()
    };
    let sum: f64 = (1..two_p)
        .step_by(2)
        .map(|k| cot(k) * cot(q as i128 * k))
        .sum();
    Ok(sum / p as f64)
}
