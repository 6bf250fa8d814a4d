//! Matrices over the rational quaternions, their 4n×4n rational
//! representation, and a decomposition of any `X ∈ M_n(ℍ)`, `n ≥ 2`, as a
//! rational multiple of `I` plus a rational combination of square-zero
//! matrices.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::quaternion::Unit;
use crate::field::{FieldDescriptor, Quaternion, Scalar};
use crate::linalg::{ExactMatrix, Polynomial};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuaternionMatrix {
    n: usize,
    entries: Vec<Quaternion>,
}

impl QuaternionMatrix {
    pub fn new(n: usize, entries: Vec<Quaternion>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::shape(format!("{} entries for a {n}×{n} quaternion matrix", entries.len())));
        }
        Ok(QuaternionMatrix { n, entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        QuaternionMatrix { n, entries }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| Quaternion::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { Quaternion::one() } else { Quaternion::zero() })
    }

    /// `q` in position `(r, s)`, zero elsewhere.
    pub fn single(n: usize, r: usize, s: usize, q: Quaternion) -> Self {
        let mut m = Self::zeros(n);
        m.entries[r * n + s] = q;
        m
    }

    /// Parses a square grid of quaternion literals.
    pub fn parse<S: AsRef<str>>(grid: &[Vec<S>]) -> Result<Self> {
        let n = grid.len();
        if grid.iter().any(|row| row.len() != n) {
            return Err(Error::shape("quaternion matrix must be square"));
        }
        let entries = grid
            .iter()
            .flatten()
            .map(|t| Quaternion::parse(t.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Quaternion {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, q: Quaternion) {
        self.entries[i * self.n + j] = q;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Quaternion::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "quaternion matrices of different sizes");
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        QuaternionMatrix { n: self.n, entries }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        QuaternionMatrix {
            n: self.n,
            entries: self.entries.iter().map(|q| q.scale(s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "quaternion matrices of different sizes");
        let n = self.n;
        Self::from_fn(n, |i, j| {
            (0..n).fold(Quaternion::zero(), |acc, k| &acc + &(self.get(i, k) * other.get(k, j)))
        })
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_string()).collect())
            .collect()
    }
}

impl fmt::Display for QuaternionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.to_strings().iter().map(|r| r.join(", ")).collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

impl fmt::Debug for QuaternionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuaternionMatrix({self})")
    }
}

/// Left multiplication by `q` on ℍ = ℚ⁴ in the basis `1, i, j, k`.
pub fn left_multiplication(q: &Quaternion) -> [[BigRational; 4]; 4] {
    let (a, b, c, d) = (q.a.clone(), q.b.clone(), q.c.clone(), q.d.clone());
    [
        [a.clone(), -b.clone(), -c.clone(), -d.clone()],
        [b.clone(), a.clone(), -d.clone(), c.clone()],
        [c.clone(), d.clone(), a.clone(), -b.clone()],
        [d, -c, b, a],
    ]
}

/// The 4n×4n rational matrix of `X` acting on ℍⁿ = ℚ⁴ⁿ.
pub fn real_representation(x: &QuaternionMatrix) -> ExactMatrix {
    let q = FieldDescriptor::rationals();
    let n = x.n;
    let blocks: Vec<[[BigRational; 4]; 4]> = x.entries.iter().map(left_multiplication).collect();
    ExactMatrix::from_fn(&q, 4 * n, 4 * n, |i, j| {
        Scalar::Rational(blocks[(i / 4) * n + j / 4][i % 4][j % 4].clone())
    })
}

pub fn is_nilpotent_quaternion(x: &QuaternionMatrix) -> bool {
    let rep = real_representation(x);
    let q = rep.field().clone();
    rep.char_poly().expect("square") == Polynomial::monomial(&q, q.one(), 4 * x.n)
}

/// Which construction produced a term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pattern {
    /// `u` at `(row, col)`, `row ≠ col`.
    SingleEntry { row: usize, col: usize, unit: Unit },
    /// `[[u, u], [-u, -u]]` on rows and columns `first, second`.
    Balanced { first: usize, second: usize, unit: Unit },
    /// `[[q, w], [-w, q]]` on `first, second`, with `w` the imaginary unit
    /// after `q`.
    Anticommuting { first: usize, second: usize, unit: Unit },
}

impl Pattern {
    pub fn matrix(&self, n: usize) -> QuaternionMatrix {
        let mut m = QuaternionMatrix::zeros(n);
        match *self {
            Pattern::SingleEntry { row, col, unit } => m.set(row, col, Quaternion::unit(unit)),
            Pattern::Balanced { first, second, unit } => {
                let u = Quaternion::unit(unit);
                let neg = -&u;
                m.set(first, first, u.clone());
                m.set(first, second, u);
                m.set(second, first, neg.clone());
                m.set(second, second, neg);
            }
            Pattern::Anticommuting { first, second, unit } => {
                let q = Quaternion::unit(unit);
                let w = Quaternion::unit(unit.next_imaginary());
                m.set(first, first, q.clone());
                m.set(second, second, q);
                m.set(first, second, w.clone());
                m.set(second, first, -&w);
            }
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentTerm {
    pub coefficient: BigRational,
    pub pattern: Pattern,
    pub matrix: QuaternionMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentDecomposition {
    pub n: usize,
    pub scalar: BigRational,
    pub terms: Vec<NilpotentTerm>,
}

impl NilpotentDecomposition {
    pub fn reconstruct(&self) -> QuaternionMatrix {
        self.terms.iter().fold(
            QuaternionMatrix::identity(self.n).scale(&self.scalar),
            |acc, t| acc.add(&t.matrix.scale(&t.coefficient)),
        )
    }
}

fn pair_partition(n: usize) -> Vec<(usize, usize, BigRational)> {
    let one = BigRational::one();
    let half = BigRational::new(1.into(), 2.into());
    let mut out = Vec::new();
    let start = if n % 2 == 1 {
        // each of 0, 1, 2 lies in two of these pairs
        out.push((0, 1, half.clone()));
        out.push((0, 2, half.clone()));
        out.push((1, 2, half));
        3
    } else {
        0
    };
    let mut i = start;
    while i + 1 < n {
        out.push((i, i + 1, one.clone()));
        i += 2;
    }
    out
}

/// Writes `X = s·I + Σ c_k N_k` with every `N_k² = 0`.
///
/// The diagonal is split into its mean μ and deviations summing to zero.
/// Each deviation at index `i < n-1` is moved to index `n-1` by a balanced
/// pattern. The imaginary part of μ times `I` is a sum of anticommuting
/// patterns over a pairing of the indices (a perfect matching for even `n`,
/// a half-weighted triangle on `0, 1, 2` plus a matching otherwise). Every
/// off-diagonal entry left over is a sum of single-entry terms.
pub fn nilpotent_span_decomposition(x: &QuaternionMatrix) -> Result<NilpotentDecomposition> {
    let n = x.n;
    if n < 2 {
        return Err(Error::NotApplicable("a 1×1 quaternion matrix has no nonzero nilpotents".into()));
    }
    let nq = BigRational::from_integer((n as i64).into());
    let mean = (0..n)
        .fold(Quaternion::zero(), |acc, i| &acc + x.get(i, i))
        .scale(&(BigRational::one() / nq));

    let mut balanced = Vec::new();
    for i in 0..n - 1 {
        let dev = x.get(i, i) - &mean;
        for u in Unit::ALL {
            let c = dev.coef(u).clone();
            if !c.is_zero() {
                balanced.push((c, Pattern::Balanced { first: i, second: n - 1, unit: u }));
            }
        }
    }
    let mut anticommuting = Vec::new();
    for q in Unit::IMAGINARY {
        let beta = mean.coef(q).clone();
        if beta.is_zero() {
            continue;
        }
        for (r, s, weight) in pair_partition(n) {
            anticommuting.push((&beta * &weight, Pattern::Anticommuting { first: r, second: s, unit: q }));
        }
    }

    // Off-diagonal residual after the patterns above.
    let mut residual = x.clone();
    for i in 0..n {
        residual.set(i, i, Quaternion::zero());
    }
    for (c, p) in balanced.iter().chain(&anticommuting) {
        let m = p.matrix(n).scale(&-c.clone());
        for r in 0..n {
            for s in 0..n {
                if r != s {
                    let v = residual.get(r, s) + m.get(r, s);
                    residual.set(r, s, v);
                }
            }
        }
    }
    let mut terms = Vec::new();
    for r in 0..n {
        for s in 0..n {
            if r == s {
                continue;
            }
            for u in Unit::ALL {
                let c = residual.get(r, s).coef(u).clone();
                if !c.is_zero() {
                    let pattern = Pattern::SingleEntry { row: r, col: s, unit: u };
                    terms.push((c, pattern));
                }
            }
        }
    }
    terms.extend(balanced);
    terms.extend(anticommuting);
    let dec = NilpotentDecomposition {
        n,
        scalar: mean.a.clone(),
        terms: terms
            .into_iter()
            .map(|(coefficient, pattern)| NilpotentTerm {
                matrix: pattern.matrix(n),
                coefficient,
                pattern,
            })
            .collect(),
    };
    if !verify_decomposition(x, &dec) {
        return Err(Error::StructureViolation("nilpotent decomposition failed verification".into()));
    }
    Ok(dec)
}

/// Reconstruction is exact and every term squares to zero.
pub fn verify_decomposition(x: &QuaternionMatrix, dec: &NilpotentDecomposition) -> bool {
    dec.n == x.n && dec.reconstruct() == *x && dec.terms.iter().all(|t| t.matrix.mul(&t.matrix).is_zero())
}

/// Serialized form of a decomposition, with every matrix spelled out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub input: Vec<Vec<String>>,
    pub scalar: String,
    pub terms: Vec<TermRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub coefficient: String,
    pub pattern: Pattern,
    pub matrix: Vec<Vec<String>>,
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let q = FieldDescriptor::rationals();
    match q.parse_scalar(s)? {
        Scalar::Rational(r) => Ok(r),
        Scalar::Finite(_) => unreachable!("rational field"),
    }
}

impl DecompositionReport {
    pub fn new(x: &QuaternionMatrix, dec: &NilpotentDecomposition) -> Self {
        let q = FieldDescriptor::rationals();
        let fmt = |r: &BigRational| q.format_scalar(&Scalar::Rational(r.clone()));
        DecompositionReport {
            input: x.to_strings(),
            scalar: fmt(&dec.scalar),
            terms: dec
                .terms
                .iter()
                .map(|t| TermRecord {
                    coefficient: fmt(&t.coefficient),
                    pattern: t.pattern.clone(),
                    matrix: t.matrix.to_strings(),
                })
                .collect(),
        }
    }

    /// Re-parses everything and rechecks reconstruction, square-zero terms,
    /// and that each matrix matches its declared pattern.
    pub fn verify(&self) -> Result<bool> {
        let x = QuaternionMatrix::parse(&self.input)?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let matrix = QuaternionMatrix::parse(&t.matrix)?;
            if matrix != t.pattern.matrix(x.n) {
                return Ok(false);
            }
            terms.push(NilpotentTerm {
                coefficient: parse_rational(&t.coefficient)?,
                pattern: t.pattern.clone(),
                matrix,
            });
        }
        let dec = NilpotentDecomposition {
            n: x.n,
            scalar: parse_rational(&self.scalar)?,
            terms,
        };
        Ok(verify_decomposition(&x, &dec))
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("scalar part: {}\n", self.scalar);
        out.push_str(&format!("{} nilpotent term(s)\n", self.terms.len()));
        for t in &self.terms {
            let rows: Vec<String> = t.matrix.iter().map(|r| r.join(", ")).collect();
            out.push_str(&format!("  {} * [{}]\n", t.coefficient, rows.join("; ")));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qm(grid: &[&[&str]]) -> QuaternionMatrix {
        let g: Vec<Vec<&str>> = grid.iter().map(|r| r.to_vec()).collect();
        QuaternionMatrix::parse(&g).unwrap()
    }

    #[test]
    fn representation_examples() {
        let q = FieldDescriptor::rationals();
        assert_eq!(real_representation(&QuaternionMatrix::identity(1)), ExactMatrix::identity(&q, 4));
        let i = qm(&[&["i"]]);
        let r = real_representation(&i);
        assert_eq!(&r * &r, ExactMatrix::identity(&q, 4).neg());
        let x = qm(&[&["1+i", "j-2k"], &["1/2", "3i+k"]]);
        let y = qm(&[&["k", "-1"], &["2+j", "1/3i"]]);
        assert_eq!(real_representation(&x.mul(&y)), &real_representation(&x) * &real_representation(&y));
    }

    #[test]
    fn nilpotency_examples() {
        let x = qm(&[&["i", "j"], &["-j", "i"]]);
        assert!(x.mul(&x).is_zero());
        assert!(is_nilpotent_quaternion(&x));
        assert!(!is_nilpotent_quaternion(&QuaternionMatrix::identity(2)));
        let p = Quaternion::parse("2-i+1/3k").unwrap();
        assert!(is_nilpotent_quaternion(&QuaternionMatrix::single(3, 0, 1, p)));
    }

    #[test]
    fn decomposition_examples() {
        let x = qm(&[&["i", "j"], &["-j", "i"]]);
        let dec = nilpotent_span_decomposition(&x).unwrap();
        assert!(dec.scalar.is_zero());
        assert_eq!(dec.terms.len(), 1);
        assert_eq!(dec.terms[0].matrix, x);
        assert!(dec.terms[0].coefficient.is_one());

        let dec = nilpotent_span_decomposition(&QuaternionMatrix::identity(2)).unwrap();
        assert!(dec.scalar.is_one());
        assert!(dec.terms.is_empty());

        assert!(matches!(
            nilpotent_span_decomposition(&QuaternionMatrix::identity(1)),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn odd_size_uses_half_weights() {
        let x = qm(&[&["1+k", "0", "0"], &["0", "1+k", "0"], &["0", "0", "1+k"]]);
        let dec = nilpotent_span_decomposition(&x).unwrap();
        assert!(dec.scalar.is_one());
        let half = BigRational::new(1.into(), 2.into());
        assert!(dec
            .terms
            .iter()
            .filter(|t| matches!(t.pattern, Pattern::Anticommuting { .. }))
            .all(|t| t.coefficient == half));
        let report = DecompositionReport::new(&x, &dec);
        assert!(report.verify().unwrap());
    }

    #[test]
    fn report_detects_tampering() {
        let x = qm(&[&["1", "i"], &["j", "2k"]]);
        let dec = nilpotent_span_decomposition(&x).unwrap();
        let mut report = DecompositionReport::new(&x, &dec);
        assert!(report.verify().unwrap());
        report.scalar = "7".into();
        assert!(!report.verify().unwrap());
    }
}
