#![allow(dead_code)]

use burnside_core::field::quaternion::Unit;
use burnside_core::quat::left_multiplication;
use burnside_core::{ExactMatrix, FieldDescriptor, Quaternion, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gf(q: u64) -> FieldDescriptor {
    FieldDescriptor::of_order(q).unwrap()
}

pub fn random_matrix(f: &FieldDescriptor, n: usize, rng: &mut impl Rng) -> ExactMatrix {
    ExactMatrix::from_fn(f, n, n, |_, _| f.random(rng))
}

pub fn random_invertible(f: &FieldDescriptor, n: usize, rng: &mut impl Rng) -> ExactMatrix {
    loop {
        let m = random_matrix(f, n, rng);
        if m.rank() == n {
            return m;
        }
    }
}

pub fn random_upper_triangular(f: &FieldDescriptor, n: usize, rng: &mut impl Rng) -> ExactMatrix {
    ExactMatrix::from_fn(f, n, n, |i, j| if i <= j { f.random(rng) } else { f.zero() })
}

/// `Q⁻¹ M Q`.
pub fn conjugate(m: &ExactMatrix, q: &ExactMatrix) -> ExactMatrix {
    &(&q.inverse().unwrap() * m) * q
}

pub fn matrix_units(f: &FieldDescriptor, n: usize) -> Vec<ExactMatrix> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            out.push(ExactMatrix::unit(f, n, i, j));
        }
    }
    out
}

/// Companion matrix of `x² + x + 1` over GF(2).
pub fn omega() -> ExactMatrix {
    let f = gf(2);
    ExactMatrix::parse(&f, &[vec!["0", "1"], vec!["1", "1"]]).unwrap()
}

/// Left multiplication by `1, i, j, k` on ℍ = ℚ⁴.
pub fn quaternion_form() -> Vec<ExactMatrix> {
    let q = FieldDescriptor::rationals();
    Unit::ALL
        .iter()
        .map(|&u| {
            let l = left_multiplication(&Quaternion::unit(u));
            ExactMatrix::from_fn(&q, 4, 4, |i, j| Scalar::Rational(l[i][j].clone()))
        })
        .collect()
}

/// Rank of the matrices as vectors of length n², by Gaussian elimination on a
/// stacked matrix.
pub fn span_dim(f: &FieldDescriptor, mats: &[ExactMatrix]) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let n = mats[0].rows();
    let rows: Vec<Vec<Scalar>> = mats.iter().map(|m| m.flatten().to_vec()).collect();
    let stacked = ExactMatrix::new(f, rows.len(), n * n, rows.concat()).unwrap();
    stacked.rank()
}

/// Total algebraic multiplicity of eigenvalues in a finite field: the sum of
/// `dim ker (M - λ)^n` over all λ. Equals n exactly when M is
/// triangularizable.
pub fn eigenvalue_count(m: &ExactMatrix) -> usize {
    let f = m.field();
    let n = m.rows();
    f.elements()
        .map(|lambda| {
            let shifted = m - &ExactMatrix::scalar(f, n, lambda);
            shifted.pow(n as u64).unwrap().nullity()
        })
        .sum()
}

/// Centralizer dimension by solving `X B = B X` for every basis element B as
/// one linear system in the n² entries of X.
pub fn centralizer_dim(f: &FieldDescriptor, basis: &[ExactMatrix]) -> usize {
    let n = basis[0].rows();
    let mut rows = Vec::new();
    for b in basis {
        for r in 0..n {
            for c in 0..n {
                // (XB - BX)[r][c] = Σ_k X[r][k] B[k][c] - B[r][k] X[k][c]
                let mut row = vec![f.zero(); n * n];
                for k in 0..n {
                    row[r * n + k] = f.add(&row[r * n + k], b.get(k, c));
                    row[k * n + c] = f.sub(&row[k * n + c], b.get(r, k));
                }
                rows.push(row);
            }
        }
    }
    let m = ExactMatrix::new(f, rows.len(), n * n, rows.concat()).unwrap();
    m.nullity()
}

/// Preimage of `x ∈ K` in the subfield F, by search.
pub fn pull_back(k: &FieldDescriptor, sub: &FieldDescriptor, x: &Scalar) -> Option<Scalar> {
    sub.elements().find(|e| k.embed(sub, e).unwrap() == *x)
}

/// The same matrix with entries viewed in the extension `k`.
pub fn embed(k: &FieldDescriptor, sub: &FieldDescriptor, m: &ExactMatrix) -> ExactMatrix {
    ExactMatrix::from_fn(k, m.rows(), m.cols(), |i, j| k.embed(sub, m.get(i, j)).unwrap())
}
