use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;

use super::ExactMatrix;
use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, Scalar};

/// Dense univariate polynomial, coefficients lowest degree first.
/// The leading coefficient is nonzero unless the polynomial is zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    field: FieldDescriptor,
    coeffs: Vec<Scalar>,
}

impl Polynomial {
    pub fn new(field: &FieldDescriptor, mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        Polynomial {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn zero(field: &FieldDescriptor) -> Self {
        Polynomial::new(field, Vec::new())
    }

    pub fn one(field: &FieldDescriptor) -> Self {
        Polynomial::constant(field, field.one())
    }

    pub fn x(field: &FieldDescriptor) -> Self {
        Polynomial::new(field, vec![field.zero(), field.one()])
    }

    pub fn constant(field: &FieldDescriptor, c: Scalar) -> Self {
        Polynomial::new(field, vec![c])
    }

    pub fn monomial(field: &FieldDescriptor, c: Scalar, degree: usize) -> Self {
        let mut coeffs = vec![field.zero(); degree];
        coeffs.push(c);
        Polynomial::new(field, coeffs)
    }

    /// `x - r`
    pub fn linear(field: &FieldDescriptor, r: &Scalar) -> Self {
        Polynomial::new(field, vec![field.neg(r), field.one()])
    }

    /// `∏ (x - r)` over `roots`.
    pub fn from_roots(field: &FieldDescriptor, roots: &[Scalar]) -> Self {
        roots
            .iter()
            .fold(Polynomial::one(field), |acc, r| acc.mul(&Polynomial::linear(field, r)))
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.field.is_one(&self.coeffs[0])
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| self.field.is_one(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| f.add(&self.coeff(k), &other.coeff(k))).collect();
        Polynomial::new(f, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| f.sub(&self.coeff(k), &other.coeff(k))).collect();
        Polynomial::new(f, coeffs)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.field.neg(c)).collect();
        Polynomial::new(&self.field, coeffs)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.field.mul(c, s)).collect();
        Polynomial::new(&self.field, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(f);
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.mul_add(&out[i + j], a, b);
            }
        }
        Polynomial::new(f, out)
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn divrem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let f = &self.field;
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let inv_lead = f.inv(&divisor.leading())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Polynomial::zero(f), self.clone()));
        }
        let mut quot = vec![f.zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = f.mul(&rem[k], &inv_lead);
            if f.is_zero(&c) {
                continue;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                let idx = k - dd + i;
                rem[idx] = f.sub(&rem[idx], &f.mul(&c, d));
            }
            quot[k - dd] = c;
        }
        rem.truncate(dd);
        Ok((Polynomial::new(f, quot), Polynomial::new(f, rem)))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        Ok(self.divrem(divisor)?.1)
    }

    /// Quotient of an exact division; fails if the remainder is nonzero.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.divrem(divisor)?;
        if !r.is_zero() {
            return Err(Error::PreconditionViolated(format!("{divisor} does not divide {self}")));
        }
        Ok(q)
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.rem(self).is_ok_and(|r| r.is_zero())
    }

    /// Monic associate; the zero polynomial is returned unchanged.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(&self.leading()).expect("leading coefficient is nonzero");
        self.scale(&inv)
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("divisor is nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| f.mul(c, &f.from_int(k as i64)))
            .collect();
        Polynomial::new(f, coeffs)
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    /// `p(A)` by Horner's rule.
    pub fn eval_matrix(&self, a: &ExactMatrix) -> Result<ExactMatrix> {
        if !a.is_square() {
            return Err(Error::shape("polynomial evaluation needs a square matrix"));
        }
        let n = a.rows();
        let mut acc = ExactMatrix::zeros(&self.field, n, n);
        for c in self.coeffs.iter().rev() {
            acc = &acc * a;
            for i in 0..n {
                let v = self.field.add(acc.get(i, i), c);
                acc.set(i, i, v);
            }
        }
        Ok(acc)
    }

    pub fn mulmod(&self, other: &Self, modulus: &Self) -> Result<Self> {
        self.mul(other).rem(modulus)
    }

    /// `self^e mod modulus` by square-and-multiply.
    pub fn powmod(&self, e: &BigUint, modulus: &Self) -> Result<Self> {
        let mut acc = Polynomial::one(&self.field).rem(modulus)?;
        let base = self.rem(modulus)?;
        for i in (0..e.bits()).rev() {
            acc = acc.mulmod(&acc, modulus)?;
            if e.bit(i) {
                acc = acc.mulmod(&base, modulus)?;
            }
        }
        Ok(acc)
    }

    /// For `self = g(x^p)` in characteristic p, returns `g` with every
    /// coefficient replaced by its p-th root, i.e. `self^{1/p}`.
    pub(crate) fn pth_root(&self) -> Self {
        let f = &self.field;
        let p = f.characteristic() as usize;
        let coeffs = self.coeffs.iter().step_by(p).map(|c| f.pth_root(c)).collect();
        Polynomial::new(f, coeffs)
    }

    /// Canonical order: by degree, then coefficients from the top down.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::field::format_poly(&self.field, &self.coeffs, "x"))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self} over {})", self.field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(field: &FieldDescriptor, coeffs: &[i64]) -> Polynomial {
        Polynomial::new(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    #[test]
    fn division_and_gcd() {
        let q = FieldDescriptor::rationals();
        let a = poly(&q, &[-1, 0, 1]); // x^2 - 1
        let b = poly(&q, &[1, 1]); // x + 1
        let (quot, rem) = a.divrem(&b).unwrap();
        assert_eq!(quot, poly(&q, &[-1, 1]));
        assert!(rem.is_zero());
        assert_eq!(a.gcd(&poly(&q, &[-1, 1]).mul(&poly(&q, &[2, 1]))), poly(&q, &[-1, 1]));
        assert_eq!(a.divrem(&Polynomial::zero(&q)), Err(Error::DivisionByZero));
        assert!(a.exact_div(&poly(&q, &[0, 1])).is_err());
    }

    #[test]
    fn derivative_in_characteristic_p() {
        let f = FieldDescriptor::prime(3).unwrap();
        let p = poly(&f, &[1, 0, 0, 1]); // x^3 + 1
        assert!(p.derivative().is_zero());
        assert_eq!(p.pth_root(), poly(&f, &[1, 1]));
    }

    #[test]
    fn powmod_matches_repeated_multiplication() {
        let f = FieldDescriptor::finite(2, 2).unwrap();
        let m = poly(&f, &[1, 1, 0, 1]);
        let x = Polynomial::x(&f);
        let mut naive = Polynomial::one(&f);
        for _ in 0..37 {
            naive = naive.mulmod(&x, &m).unwrap();
        }
        assert_eq!(x.powmod(&BigUint::from(37u32), &m).unwrap(), naive);
    }

    #[test]
    fn display() {
        let q = FieldDescriptor::rationals();
        assert_eq!(poly(&q, &[1, -3, 1]).to_string(), "x^2-3x+1");
        assert_eq!(Polynomial::zero(&q).to_string(), "0");
    }
}
