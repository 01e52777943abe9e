//! Star-shaped plumbing bounded by Σ(a₁,…,aₙ), and the independent route to
//! μ̄ through its intersection form: `μ̄ = (sign Q − wᵀQw) / 8` with `w` the
//! integral Wu class.
//!
//! Orientation is the one of a singularity link: the plumbing is negative
//! definite and the Seifert Euler number is `-1/A`. For Σ(2,3,5) this is the
//! negative definite E8 graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::invariants::eta_combination;
use crate::numeric::ExactRational;
use crate::seifert::{solve_coefficients, CoefficientVector, SeifertData};

/// `a/b = c₁ − 1/(c₂ − 1/(⋯ − 1/c_k))` with every `cⱼ ≥ 2`.
pub fn negative_continued_fraction(a: i64, b: i64) -> Result<Vec<i64>> {
    if !(0 < b && b < a) || a.gcd(&b) != 1 {
        return Err(Error::BadContinuedFraction(a, b));
    }
    let (mut num, mut den) = (a, b);
    let mut out = Vec::new();
    while den != 0 {
        let c = Integer::div_ceil(&num, &den);
        out.push(c);
        (num, den) = (den, c * den - num);
    }
    Ok(out)
}

/// Evaluates `c₁ − 1/(c₂ − ⋯)`; the inverse of [`negative_continued_fraction`].
pub fn evaluate_negative_continued_fraction(coeffs: &[i64]) -> ExactRational {
    let mut iter = coeffs.iter().rev();
    let Some(&last) = iter.next() else {
        return ExactRational::zero();
    };
    iter.fold(ExactRational::from(last), |acc, &c| {
        ExactRational::from(c) - ExactRational::one() / acc
    })
}

/// Weighted star-shaped tree. Vertex 0 is the center; each arm lists its
/// vertices from the one adjacent to the center outward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlumbingGraph {
    pub framings: Vec<i64>,
    pub edges: Vec<(usize, usize)>,
    pub center: usize,
    pub arms: Vec<Vec<usize>>,
}

impl PlumbingGraph {
    pub fn vertex_count(&self) -> usize {
        self.framings.len()
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph plumbing {\n");
        for (v, f) in self.framings.iter().enumerate() {
            let _ = writeln!(s, "  v{v} [label=\"{f}\"];");
        }
        for (u, v) in &self.edges {
            let _ = writeln!(s, "  v{u} -- v{v};");
        }
        s.push_str("}\n");
        s
    }

    /// `{"center": id, "arms": [[ids…]…], "framings": {id: int}}`, vertex ids in order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }
}

struct Framings<'a>(&'a [i64]);

impl Serialize for Framings<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (v, f) in self.0.iter().enumerate() {
            map.serialize_entry(&v.to_string(), f)?;
        }
        map.end()
    }
}

impl Serialize for PlumbingGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("PlumbingGraph", 3)?;
        st.serialize_field("center", &self.center)?;
        st.serialize_field("arms", &self.arms)?;
        st.serialize_field("framings", &Framings(&self.framings))?;
        st.end()
    }
}

/// Plumbing for the canonical coefficient solution of `y`.
pub fn build_plumbing(y: &SeifertData) -> Result<PlumbingGraph> {
    build_plumbing_with(y, &solve_coefficients(y)?)
}

/// Plumbing from any solution `b`: normalized invariants `bᵢ' = (−bᵢ) mod aᵢ`,
/// central framing `−1/A − Σ bᵢ'/aᵢ`, and arm `i` framed by the negated
/// continued fraction of `aᵢ/bᵢ'`.
pub fn build_plumbing_with(y: &SeifertData, coeffs: &CoefficientVector) -> Result<PlumbingGraph> {
    if !coeffs.satisfies_equation(y) {
        return Err(Error::Consistency(format!(
            "coefficients {:?} do not solve the equation for {y}",
            coeffs.b
        )));
    }
    let a = y.multiplicities();
    let normalized: Vec<i64> = a.iter().zip(&coeffs.b).map(|(&ai, &bi)| (-bi).rem_euclid(ai)).collect();
    let mut central = -ExactRational::one() / ExactRational::from_integer(y.product());
    for (&ai, &bi) in a.iter().zip(&normalized) {
        central -= ExactRational::new(bi, ai);
    }
    let central = central
        .to_i64()
        .ok_or_else(|| Error::Consistency(format!("central framing {central} of {y} is not an integer")))?;

    let mut framings = vec![central];
    let mut edges = Vec::new();
    let mut arms = Vec::with_capacity(a.len());
    for (&ai, &bi) in a.iter().zip(&normalized) {
        let mut arm = Vec::new();
        let mut prev = 0;
        for c in negative_continued_fraction(ai, bi)? {
            let v = framings.len();
            framings.push(-c);
            edges.push((prev, v));
            arm.push(v);
            prev = v;
        }
        arms.push(arm);
    }
    Ok(PlumbingGraph { framings, edges, center: 0, arms })
}

/// Symmetric integer matrix of a plumbing or any other quadratic form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionForm {
    pub matrix: Vec<Vec<i64>>,
}

impl IntersectionForm {
    /// Wraps a square symmetric matrix. No definiteness or determinant checks.
    pub fn from_matrix(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let m = matrix.len();
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Consistency("intersection matrix is not square".into()));
            }
            if (0..i).any(|j| row[j] != matrix[j][i]) {
                return Err(Error::Consistency("intersection matrix is not symmetric".into()));
            }
        }
        Ok(IntersectionForm { matrix })
    }

    /// Framings on the diagonal, 1 per edge off the diagonal.
    pub fn of_graph(g: &PlumbingGraph) -> Self {
        let m = g.vertex_count();
        let mut matrix = vec![vec![0i64; m]; m];
        for (v, &f) in g.framings.iter().enumerate() {
            matrix[v][v] = f;
        }
        for &(u, v) in &g.edges {
            matrix[u][v] = 1;
            matrix[v][u] = 1;
        }
        IntersectionForm { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// `xᵀQy`.
    pub fn pairing(&self, x: &[i64], y: &[i64]) -> BigInt {
        let mut total = BigInt::zero();
        for (i, row) in self.matrix.iter().enumerate() {
            if x[i] == 0 {
                continue;
            }
            let inner: i128 = row.iter().zip(y).map(|(&q, &yj)| q as i128 * yj as i128).sum();
            total += BigInt::from(x[i]) * BigInt::from(inner);
        }
        total
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        bareiss_i128(&self.matrix).map_or_else(|| bareiss_big(&self.matrix), BigInt::from)
    }

    /// Diagonal of a congruent diagonal form, found by symmetric elimination
    /// over exact rationals. Their product is the determinant and their signs
    /// give the inertia.
    pub fn pivots(&self) -> Result<Vec<ExactRational>> {
        congruence_pivots(&self.matrix)
    }
}

/// Intersection form of a plumbing, gated on `|det| = 1` and negative
/// definiteness.
pub fn intersection_form(g: &PlumbingGraph) -> Result<IntersectionForm> {
    let q = IntersectionForm::of_graph(g);
    let det = q.determinant();
    if !det.abs().is_one() {
        return Err(Error::Consistency(format!(
            "not a homology sphere: plumbing determinant {det}"
        )));
    }
    if q.pivots()?.iter().any(|p| !p.is_negative()) {
        return Err(Error::Consistency("plumbing is not negative definite".into()));
    }
    Ok(q)
}

/// Signature from the signs of exact elimination pivots.
pub fn signature(q: &IntersectionForm) -> Result<i64> {
    let pivots = q.pivots()?;
    Ok(pivots.iter().map(|p| if p.is_negative() { -1 } else { 1 }).sum())
}

fn bareiss_i128(m: &[Vec<i64>]) -> Option<i128> {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let swap = (k + 1..n).find(|&i| a[i][k] != 0)?;
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[k][k].checked_mul(a[i][j])?.checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = t / prev;
            }
        }
        prev = a[k][k];
    }
    if n == 0 {
        return Some(1);
    }
    Some(sign * a[n - 1][n - 1])
}

fn bareiss_big(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(swap) => {
                    a.swap(k, swap);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

// Sparse symmetric elimination. Each step picks a remaining index with a
// nonzero diagonal and the fewest off-diagonal entries (leaves first on a
// tree, so no fill-in). If every remaining diagonal vanishes, the congruence
// x_k ← x_k + x_j makes the (k, k) entry 2·a_kj nonzero.
fn congruence_pivots(m: &[Vec<i64>]) -> Result<Vec<ExactRational>> {
    let n = m.len();
    let mut rows: Vec<BTreeMap<usize, ExactRational>> = m
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(j, &x)| (j, ExactRational::from(x)))
                .collect()
        })
        .collect();
    let mut active: BTreeSet<usize> = (0..n).collect();
    let mut pivots = Vec::with_capacity(n);

    while !active.is_empty() {
        let choice = active
            .iter()
            .copied()
            .filter(|&k| rows[k].contains_key(&k))
            .min_by_key(|&k| rows[k].len());
        let k = match choice {
            Some(k) => k,
            None => {
                let (k, j) = active
                    .iter()
                    .find_map(|&k| rows[k].keys().next().map(|&j| (k, j)))
                    .ok_or_else(|| Error::Consistency("form is singular".into()))?;
                add_to_index(&mut rows, k, j);
                k
            }
        };
        active.remove(&k);
        let row_k = std::mem::take(&mut rows[k]);
        let d = row_k[&k].clone();
        let nbrs: Vec<(usize, ExactRational)> =
            row_k.into_iter().filter(|&(j, _)| j != k).collect();
        for (i, aik) in &nbrs {
            rows[*i].remove(&k);
            let scale = aik / &d;
            for (j, akj) in &nbrs {
                let entry = rows[*i].entry(*j).or_insert_with(ExactRational::zero);
                *entry -= &scale * akj;
                if entry.is_zero() {
                    rows[*i].remove(j);
                }
            }
        }
        pivots.push(d);
    }
    Ok(pivots)
}

// Congruence by E = I + e_j e_kᵀ: row and column k gain row and column j.
fn add_to_index(rows: &mut [BTreeMap<usize, ExactRational>], k: usize, j: usize) {
    let akj = rows[k].get(&j).cloned().unwrap_or_default();
    let akk = rows[k].get(&k).cloned().unwrap_or_default();
    let ajj = rows[j].get(&j).cloned().unwrap_or_default();
    let new_diag = akk + &akj + &akj + ajj;
    let row_j: Vec<(usize, ExactRational)> = rows[j].iter().map(|(&l, v)| (l, v.clone())).collect();
    for (l, v) in row_j {
        if l == k {
            continue;
        }
        let entry = rows[k].entry(l).or_insert_with(ExactRational::zero);
        *entry += &v;
        let updated = entry.clone();
        if updated.is_zero() {
            rows[k].remove(&l);
            rows[l].remove(&k);
        } else {
            rows[l].insert(k, updated);
        }
    }
    if new_diag.is_zero() {
        rows[k].remove(&k);
    } else {
        rows[k].insert(k, new_diag);
    }
}

/// Characteristic vector with 0/1 coordinates in the sphere basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WuClass {
    pub coords: Vec<u8>,
}

impl WuClass {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn as_vector(&self) -> Vec<i64> {
        self.coords.iter().map(|&c| c as i64).collect()
    }

    /// `wᵀQw`.
    pub fn square(&self, q: &IntersectionForm) -> BigInt {
        let w = self.as_vector();
        q.pairing(&w, &w)
    }

    /// `wᵀQeᵢ ≡ Qᵢᵢ (mod 2)` for every basis vector.
    pub fn is_characteristic(&self, q: &IntersectionForm) -> bool {
        q.matrix.iter().enumerate().all(|(i, row)| {
            let dot: i64 = row.iter().zip(&self.coords).map(|(&x, &c)| (x & 1) * c as i64).sum();
            (dot - row[i]).rem_euclid(2) == 0
        })
    }
}

/// Solves `Q·w ≡ diag(Q) (mod 2)` by Gaussian elimination on packed bit rows.
pub fn wu_class(q: &IntersectionForm) -> Result<WuClass> {
    let m = q.dim();
    let words = (m + 1).div_ceil(64);
    let bit = |row: &[u64], j: usize| (row[j / 64] >> (j % 64)) & 1 == 1;
    let mut rows: Vec<Vec<u64>> = q
        .matrix
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut bits = vec![0u64; words];
            for (j, &x) in r.iter().enumerate() {
                if x & 1 == 1 {
                    bits[j / 64] |= 1 << (j % 64);
                }
            }
            if r[i] & 1 == 1 {
                bits[m / 64] |= 1 << (m % 64);
            }
            bits
        })
        .collect();

    for col in 0..m {
        let pivot = (col..m)
            .find(|&r| bit(&rows[r], col))
            .ok_or_else(|| Error::Consistency("intersection form is singular mod 2".into()))?;
        rows.swap(col, pivot);
        let pivot_row = rows[col].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != col && bit(row, col) {
                for (w, p) in row.iter_mut().zip(&pivot_row) {
                    *w ^= p;
                }
            }
        }
    }
    let coords = rows.iter().map(|r| bit(r, m) as u8).collect();
    Ok(WuClass { coords })
}

/// Everything the oracle computes for one sphere.
#[derive(Debug, Clone)]
pub struct PlumbingData {
    pub graph: PlumbingGraph,
    pub form: IntersectionForm,
    pub signature: i64,
    pub wu: WuClass,
    pub wu_square: i64,
}

impl PlumbingData {
    /// `(sign − w·w) / 8`, asserting divisibility.
    pub fn mubar(&self) -> Result<i64> {
        let diff = self.signature - self.wu_square;
        if diff.rem_euclid(8) != 0 {
            return Err(Error::Consistency(format!(
                "sign - w.w = {diff} is not divisible by 8"
            )));
        }
        Ok(diff / 8)
    }
}

pub fn analyze(y: &SeifertData) -> Result<PlumbingData> {
    analyze_graph(build_plumbing(y)?)
}

pub fn analyze_graph(graph: PlumbingGraph) -> Result<PlumbingData> {
    let form = intersection_form(&graph)?;
    let signature = signature(&form)?;
    let wu = wu_class(&form)?;
    if !wu.is_characteristic(&form) {
        return Err(Error::Consistency("Wu class is not characteristic".into()));
    }
    let wu_square = i64::try_from(wu.square(&form)).map_err(|_| Error::Overflow("w.w"))?;
    Ok(PlumbingData { graph, form, signature, wu, wu_square })
}

/// μ̄ from the plumbing: `(sign Q − wᵀQw) / 8`.
pub fn mubar_oracle(y: &SeifertData) -> Result<i64> {
    analyze(y)?.mubar()
}

/// `ind D⁺_L(X) = −(½η_Dir + ⅛η_Sign) − sign(X)/8 + c₁(L)²/8` with `c₁(L)`
/// dual to the Wu class. Vanishes for every Seifert homology sphere.
pub fn aps_index(y: &SeifertData) -> Result<ExactRational> {
    let data = analyze(y)?;
    Ok(aps_index_from(&eta_combination(y)?, &data))
}

pub(crate) fn aps_index_from(eta: &ExactRational, data: &PlumbingData) -> ExactRational {
    -eta - ExactRational::new(data.signature, 8) + ExactRational::new(data.wu_square, 8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seifert::validate;

    fn sd(a: &[i64]) -> SeifertData {
        validate(a).unwrap()
    }

    fn form(m: Vec<Vec<i64>>) -> IntersectionForm {
        IntersectionForm::from_matrix(m).unwrap()
    }

    #[test]
    fn continued_fraction_examples() {
        assert_eq!(negative_continued_fraction(5, 4).unwrap(), vec![2, 2, 2, 2]);
        assert_eq!(negative_continued_fraction(7, 1).unwrap(), vec![7]);
        assert_eq!(negative_continued_fraction(3, 2).unwrap(), vec![2, 2]);
        assert_eq!(negative_continued_fraction(7, 3).unwrap(), vec![3, 2, 2]);
        assert!(negative_continued_fraction(4, 2).is_err());
        assert!(negative_continued_fraction(3, 3).is_err());
        assert!(negative_continued_fraction(3, 0).is_err());
        for (a, b) in [(5, 4), (7, 3), (97, 35), (2, 1)] {
            let cf = negative_continued_fraction(a, b).unwrap();
            assert_eq!(evaluate_negative_continued_fraction(&cf), ExactRational::new(a, b));
        }
    }

    #[test]
    fn e8_plumbing() {
        let g = build_plumbing(&sd(&[2, 3, 5])).unwrap();
        assert_eq!(g.vertex_count(), 8);
        assert!(g.framings.iter().all(|&f| f == -2));
        let lens: Vec<usize> = g.arms.iter().map(Vec::len).collect();
        assert_eq!(lens, vec![1, 2, 4]);
        let q = intersection_form(&g).unwrap();
        assert_eq!(q.determinant(), BigInt::one());
        assert_eq!(signature(&q).unwrap(), -8);
        assert!(wu_class(&q).unwrap().is_zero());
        assert_eq!(mubar_oracle(&sd(&[2, 3, 5])).unwrap(), -1);
        assert!(aps_index(&sd(&[2, 3, 5])).unwrap().is_zero());
    }

    #[test]
    fn sigma_237_plumbing() {
        let y = sd(&[2, 3, 7]);
        let g = build_plumbing(&y).unwrap();
        assert_eq!(g.framings, vec![-1, -2, -3, -7]);
        assert_eq!(g.edges, vec![(0, 1), (0, 2), (0, 3)]);
        let q = intersection_form(&g).unwrap();
        assert_eq!(
            q.matrix,
            vec![vec![-1, 1, 1, 1], vec![1, -2, 0, 0], vec![1, 0, -3, 0], vec![1, 0, 0, -7]]
        );
        assert_eq!(q.determinant().abs(), BigInt::one());
        assert_eq!(signature(&q).unwrap(), -4);
        let w = wu_class(&q).unwrap();
        assert_eq!(w.coords, vec![0, 1, 1, 1]);
        assert_eq!(w.square(&q), BigInt::from(-12));
        assert_eq!(mubar_oracle(&y).unwrap(), 1);
        assert!(aps_index(&y).unwrap().is_zero());
    }

    #[test]
    fn single_vertex_and_diagonal_forms() {
        let q = form(vec![vec![-1]]);
        assert_eq!(q.determinant(), BigInt::from(-1));
        assert_eq!(signature(&q).unwrap(), -1);
        let q = form(vec![vec![1, 0], vec![0, -1]]);
        assert_eq!(signature(&q).unwrap(), 0);
        let q = form(vec![vec![3, 0, 0], vec![0, -5, 0], vec![0, 0, 1]]);
        assert_eq!(wu_class(&q).unwrap().coords, vec![1, 1, 1]);
    }

    #[test]
    fn zero_diagonal_needs_congruence_step() {
        // hyperbolic plane and a 3x3 form with zero diagonal
        let q = form(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(signature(&q).unwrap(), 0);
        assert_eq!(q.determinant(), BigInt::from(-1));
        let q = form(vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
        // eigenvalues 2, -1, -1
        assert_eq!(signature(&q).unwrap(), -1);
        let prod: ExactRational = q.pivots().unwrap().iter().fold(ExactRational::one(), |a, p| a * p);
        assert_eq!(prod.to_integer().unwrap(), q.determinant());
        assert!(form(vec![vec![0, 0], vec![0, 0]]).pivots().is_err());
    }

    #[test]
    fn non_definite_plumbing_is_rejected() {
        let g = PlumbingGraph {
            framings: vec![1, -2],
            edges: vec![(0, 1)],
            center: 0,
            arms: vec![vec![1]],
        };
        assert!(intersection_form(&g).is_err());
    }

    #[test]
    fn graph_serializations() {
        let g = build_plumbing(&sd(&[2, 3, 7])).unwrap();
        assert_eq!(
            g.to_json(),
            r#"{"center":0,"arms":[[1],[2],[3]],"framings":{"0":-1,"1":-2,"2":-3,"3":-7}}"#
        );
        let dot = g.to_dot();
        assert!(dot.starts_with("graph plumbing {"));
        assert!(dot.contains("v3 [label=\"-7\"];"));
        assert!(dot.contains("v0 -- v2;"));
    }
}
