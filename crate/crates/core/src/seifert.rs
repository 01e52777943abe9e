//! Seifert invariants of Σ(a₁,…,aₙ): validated multiplicities, solutions
//! `b` of `Σ bᵢ·A/aᵢ = 1` (with `A = a₁⋯aₙ`), and corpus enumeration.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// Every multiplicity is odd.
    Odd,
    /// Exactly one multiplicity is even, stored first.
    Even,
}

/// Multiplicities of a Seifert fibered homology sphere.
///
/// At least three entries, all `≥ 2`, pairwise coprime. If one entry is even
/// it sits at index 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeifertData {
    a: Vec<i64>,
}

impl SeifertData {
    pub fn multiplicities(&self) -> &[i64] {
        &self.a
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn parity(&self) -> Parity {
        if self.a[0] % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `A = a₁⋯aₙ`.
    pub fn product(&self) -> BigInt {
        self.a.iter().map(|&x| BigInt::from(x)).product()
    }

    /// `A / aᵢ`.
    pub fn cofactor(&self, i: usize) -> BigInt {
        self.a
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &x)| BigInt::from(x))
            .product()
    }
}

impl fmt::Display for SeifertData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.a.iter().map(i64::to_string).collect();
        write!(f, "Sigma({})", parts.join(","))
    }
}

impl Serialize for SeifertData {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Checks the standing hypotheses and moves the even multiplicity (if any)
/// to the front. The other entries keep their order.
pub fn validate(raw: &[i64]) -> Result<SeifertData> {
    if raw.len() < 3 {
        return Err(Error::TooFewFibers(raw.len()));
    }
    if let Some(&x) = raw.iter().find(|&&x| x < 2) {
        return Err(Error::MultiplicityTooSmall(x));
    }
    for (i, &x) in raw.iter().enumerate() {
        for &y in &raw[i + 1..] {
            let g = x.gcd(&y);
            if g != 1 {
                return Err(Error::MultiplicitiesNotCoprime(x, y, g));
            }
        }
    }
    let mut a = raw.to_vec();
    if let Some(pos) = a.iter().position(|x| x % 2 == 0) {
        let even = a.remove(pos);
        a.insert(0, even);
    }
    Ok(SeifertData { a })
}

/// Integers `b₁,…,bₙ` with `Σ bᵢ·A/aᵢ = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoefficientVector {
    pub b: Vec<i64>,
    /// Set when every `aᵢ - bᵢ` is odd (even case only).
    pub even_normalized: bool,
}

impl CoefficientVector {
    /// Recomputes `Σ bᵢ·A/aᵢ` exactly.
    pub fn weighted_sum(&self, y: &SeifertData) -> BigInt {
        self.b
            .iter()
            .enumerate()
            .map(|(i, &b)| BigInt::from(b) * y.cofactor(i))
            .sum()
    }

    pub fn satisfies_equation(&self, y: &SeifertData) -> bool {
        self.b.len() == y.len() && self.weighted_sum(y).is_one()
    }

    fn has_odd_differences(&self, y: &SeifertData) -> bool {
        y.multiplicities()
            .iter()
            .zip(&self.b)
            .all(|(a, b)| (a - b) % 2 != 0)
    }
}

fn ensure_solution(y: &SeifertData, c: CoefficientVector) -> Result<CoefficientVector> {
    if c.satisfies_equation(y) {
        Ok(c)
    } else {
        Err(Error::Consistency(format!(
            "coefficients {:?} do not solve the equation for {y}",
            c.b
        )))
    }
}

// b₁ = (1 - Σ_{i≥2} bᵢ·A/aᵢ) / (A/a₁), which must divide exactly.
fn solve_first(y: &SeifertData, b: &mut [i64]) -> Result<()> {
    let rest: BigInt = (1..y.len()).map(|i| BigInt::from(b[i]) * y.cofactor(i)).sum();
    let (quot, rem) = (BigInt::one() - rest).div_rem(&y.cofactor(0));
    if !rem.is_zero() {
        return Err(Error::Consistency(format!("b1 is not integral for {y}")));
    }
    b[0] = quot.to_i64().ok_or(Error::Overflow("b1"))?;
    Ok(())
}

/// Canonical solution: `bᵢ ∈ (0, aᵢ)` is the inverse of `A/aᵢ` mod `aᵢ` for
/// `i ≥ 2`, and `b₁` is solved from the equation.
pub fn solve_coefficients(y: &SeifertData) -> Result<CoefficientVector> {
    let a = y.multiplicities();
    let mut b = vec![0i64; a.len()];
    for i in 1..a.len() {
        let c = crate::dedekind::reduce(&y.cofactor(i), a[i]);
        let eg = c.extended_gcd(&a[i]);
        if eg.gcd != 1 {
            return Err(Error::Consistency(format!(
                "A/a{} not invertible mod {}",
                i + 1,
                a[i]
            )));
        }
        b[i] = eg.x.rem_euclid(a[i]);
    }
    solve_first(y, &mut b)?;
    let mut out = CoefficientVector { b, even_normalized: false };
    out.even_normalized = y.parity() == Parity::Even && out.has_odd_differences(y);
    ensure_solution(y, out)
}

/// Makes every `aᵢ - bᵢ` odd by shifting odd `bᵢ` (i ≥ 2) by `∓aᵢ`,
/// toward the smaller magnitude, and compensating `b₁` by `±a₁`.
pub fn normalize_even(y: &SeifertData, coeffs: &CoefficientVector) -> Result<CoefficientVector> {
    if y.parity() != Parity::Even {
        return Err(Error::NotEvenCase);
    }
    let a = y.multiplicities();
    let mut b = coeffs.b.clone();
    for i in 1..a.len() {
        if b[i] % 2 != 0 {
            let k: i64 = if b[i] > 0 { -1 } else { 1 };
            b[i] += k * a[i];
            b[0] = b[0]
                .checked_sub(k * a[0])
                .ok_or(Error::Overflow("b1"))?;
        }
    }
    let out = CoefficientVector { b, even_normalized: true };
    if !out.has_odd_differences(y) {
        return Err(Error::Consistency(format!(
            "normalized coefficients {:?} for {y} still have an even a_i - b_i",
            out.b
        )));
    }
    ensure_solution(y, out)
}

/// Another solution: `bᵢ ↦ bᵢ + kᵢ·aᵢ` for `i ≥ 2`, then `b₁` re-solved.
/// `shifts[0]` is ignored since `b₁` is determined by the rest.
pub fn alternate_coefficients(
    y: &SeifertData,
    coeffs: &CoefficientVector,
    shifts: &[i64],
) -> Result<CoefficientVector> {
    if shifts.len() != y.len() {
        return Err(Error::ShiftLength { expected: y.len(), got: shifts.len() });
    }
    let a = y.multiplicities();
    let mut b = coeffs.b.clone();
    for i in 1..a.len() {
        b[i] = shifts[i]
            .checked_mul(a[i])
            .and_then(|s| s.checked_add(b[i]))
            .ok_or(Error::Overflow("shifted coefficient"))?;
    }
    solve_first(y, &mut b)?;
    let mut out = CoefficientVector { b, even_normalized: false };
    out.even_normalized = y.parity() == Parity::Even && out.has_odd_differences(y);
    ensure_solution(y, out)
}

/// All valid Seifert data with `n` fibers and multiplicities `≤ max_a`.
///
/// Tuples are produced in lexicographic order of their sorted multiplicities
/// `a₁ < … < aₙ`, then canonically reordered (even entry first).
pub fn enumerate_corpus(n: usize, max_a: i64) -> Corpus {
    Corpus {
        n,
        max_a,
        cur: if n >= 3 { vec![1] } else { Vec::new() },
    }
}

/// Iterator returned by [`enumerate_corpus`].
#[derive(Debug, Clone)]
pub struct Corpus {
    n: usize,
    max_a: i64,
    cur: Vec<i64>,
}

impl Iterator for Corpus {
    type Item = SeifertData;

    fn next(&mut self) -> Option<SeifertData> {
        loop {
            let k = self.cur.len().checked_sub(1)?;
            let room = (self.n - 1 - k) as i64;
            let prefix = &self.cur[..k];
            let next = (self.cur[k] + 1..=self.max_a - room)
                .find(|c| prefix.iter().all(|x| x.gcd(c) == 1));
            match next {
                None => {
                    self.cur.pop();
                }
                Some(c) => {
                    self.cur[k] = c;
                    if self.cur.len() == self.n {
                        return Some(validate(&self.cur).expect("enumerated tuple is valid"));
                    }
                    self.cur.push(c);
                }
            }
        }
    }
}
