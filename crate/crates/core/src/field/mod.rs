//! Exact scalar fields: the rationals and finite fields GF(p^m).
//!
//! A [`FieldDescriptor`] is a cheap, shareable handle describing a field;
//! [`Scalar`] is a bare element value whose meaning depends on the
//! descriptor it is used with. Matrices and polynomials store one descriptor
//! and many scalars. [`FieldElement`] pairs the two for checked, standalone
//! arithmetic.

mod finite;
mod literal;
pub mod quaternion;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use finite::FiniteField;

pub use quaternion::Quaternion;

pub(crate) use finite::is_prime;
pub(crate) use literal::format_poly;

/// A field element stripped of its field. Rationals are kept in lowest terms;
/// finite-field elements are packed power-basis coordinates (see
/// [`FieldDescriptor::digits`]).
///
/// The derived ordering is the canonical total order used for sorting roots
/// and breaking ties: numeric order on ℚ, packed-integer order on GF(p^m).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Rational(BigRational),
    Finite(u64),
}

#[derive(Debug, PartialEq, Eq)]
enum FieldKind {
    Rationals,
    Finite(FiniteField),
}

/// Handle to an exact field (ℚ or GF(p^m)).
#[derive(Clone)]
pub struct FieldDescriptor(Arc<FieldKind>);

impl PartialEq for FieldDescriptor {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for FieldDescriptor {}

impl Hash for FieldDescriptor {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &*self.0 {
            FieldKind::Rationals => 0u64.hash(state),
            FieldKind::Finite(f) => {
                f.characteristic().hash(state);
                f.modulus().hash(state);
            }
        }
    }
}

impl fmt::Debug for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldDescriptor({self})")
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            FieldKind::Rationals => write!(f, "Q"),
            FieldKind::Finite(ff) if ff.is_canonical() => write!(f, "GF({})", ff.order()),
            FieldKind::Finite(ff) => {
                let modulus: Vec<Scalar> = ff.modulus().iter().map(|&c| Scalar::Finite(c)).collect();
                let prime = FieldDescriptor::prime(ff.characteristic()).map_err(|_| fmt::Error)?;
                write!(f, "GF({}, {})", ff.order(), literal::format_poly(&prime, &modulus, "t"))
            }
        }
    }
}

impl FieldDescriptor {
    pub fn rationals() -> Self {
        FieldDescriptor(Arc::new(FieldKind::Rationals))
    }

    /// The prime field GF(p). Fails unless `p` is prime.
    pub fn prime(p: u64) -> Result<Self> {
        Self::finite(p, 1)
    }

    /// GF(p^m) with the canonical modulus.
    pub fn finite(p: u64, m: usize) -> Result<Self> {
        Ok(FieldDescriptor(Arc::new(FieldKind::Finite(FiniteField::canonical(p, m)?))))
    }

    /// GF(p^m) with an explicit monic irreducible modulus given lowest degree
    /// first. Irreducibility is verified here.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        Ok(FieldDescriptor(Arc::new(FieldKind::Finite(FiniteField::with_modulus(p, modulus)?))))
    }

    /// GF(q) for a prime power `q`, canonical modulus.
    pub fn of_order(q: u64) -> Result<Self> {
        let (p, m) = prime_power(q).ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        Self::finite(p, m)
    }

    /// Parses `Q`, `GF(q)`, `GF(p^m)` or `GF(q, <modulus in t>)`.
    pub fn parse(spec: &str) -> Result<Self> {
        literal::parse_descriptor(spec)
    }

    pub fn is_rationals(&self) -> bool {
        matches!(&*self.0, FieldKind::Rationals)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_rationals()
    }

    pub fn characteristic(&self) -> u64 {
        match &*self.0 {
            FieldKind::Rationals => 0,
            FieldKind::Finite(f) => f.characteristic(),
        }
    }

    /// Extension degree over the prime field (1 for ℚ).
    pub fn degree(&self) -> usize {
        match &*self.0 {
            FieldKind::Rationals => 1,
            FieldKind::Finite(f) => f.degree(),
        }
    }

    /// Number of elements, `None` for ℚ.
    pub fn order(&self) -> Option<u64> {
        match &*self.0 {
            FieldKind::Rationals => None,
            FieldKind::Finite(f) => Some(f.order()),
        }
    }

    /// Modulus coefficients (lowest degree first) for extension fields.
    pub fn modulus(&self) -> Option<Vec<u64>> {
        match &*self.0 {
            FieldKind::Finite(f) if f.degree() > 1 => Some(f.modulus().to_vec()),
            _ => None,
        }
    }

    fn finite_field(&self) -> Option<&FiniteField> {
        match &*self.0 {
            FieldKind::Finite(f) => Some(f),
            FieldKind::Rationals => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        match &*self.0 {
            FieldKind::Rationals => Scalar::Rational(BigRational::zero()),
            FieldKind::Finite(_) => Scalar::Finite(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match &*self.0 {
            FieldKind::Rationals => Scalar::Rational(BigRational::one()),
            FieldKind::Finite(_) => Scalar::Finite(1),
        }
    }

    pub fn from_int(&self, v: i64) -> Scalar {
        match &*self.0 {
            FieldKind::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            FieldKind::Finite(f) => Scalar::Finite(f.reduce_int(v as i128)),
        }
    }

    pub fn from_rational(&self, v: BigRational) -> Result<Scalar> {
        match &*self.0 {
            FieldKind::Rationals => Ok(Scalar::Rational(v)),
            FieldKind::Finite(_) => Err(Error::MixedField {
                left: "Q".into(),
                right: self.to_string(),
            }),
        }
    }

    /// True if `x` is a well-formed element of this field.
    pub fn owns(&self, x: &Scalar) -> bool {
        match (&*self.0, x) {
            (FieldKind::Rationals, Scalar::Rational(_)) => true,
            (FieldKind::Finite(f), Scalar::Finite(v)) => *v < f.order(),
            _ => false,
        }
    }

    pub fn is_zero(&self, x: &Scalar) -> bool {
        match x {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Finite(v) => *v == 0,
        }
    }

    pub fn is_one(&self, x: &Scalar) -> bool {
        match x {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Finite(v) => *v == 1,
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (&*self.0, a, b) {
            (FieldKind::Rationals, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x + y),
            (FieldKind::Finite(f), Scalar::Finite(x), Scalar::Finite(y)) => Scalar::Finite(f.add(*x, *y)),
            _ => foreign(self, a, b),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (&*self.0, a, b) {
            (FieldKind::Rationals, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x - y),
            (FieldKind::Finite(f), Scalar::Finite(x), Scalar::Finite(y)) => Scalar::Finite(f.sub(*x, *y)),
            _ => foreign(self, a, b),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (&*self.0, a) {
            (FieldKind::Rationals, Scalar::Rational(x)) => Scalar::Rational(-x),
            (FieldKind::Finite(f), Scalar::Finite(x)) => Scalar::Finite(f.neg(*x)),
            _ => foreign(self, a, a),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (&*self.0, a, b) {
            (FieldKind::Rationals, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x * y),
            (FieldKind::Finite(f), Scalar::Finite(x), Scalar::Finite(y)) => Scalar::Finite(f.mul(*x, *y)),
            _ => foreign(self, a, b),
        }
    }

    /// `acc + a * b`
    pub fn mul_add(&self, acc: &Scalar, a: &Scalar, b: &Scalar) -> Scalar {
        match (&*self.0, acc, a, b) {
            (FieldKind::Finite(f), Scalar::Finite(s), Scalar::Finite(x), Scalar::Finite(y)) => {
                Scalar::Finite(f.add(*s, f.mul(*x, *y)))
            }
            _ => self.add(acc, &self.mul(a, b)),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar> {
        match (&*self.0, a) {
            (FieldKind::Rationals, Scalar::Rational(x)) => {
                if x.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Scalar::Rational(x.recip()))
                }
            }
            (FieldKind::Finite(f), Scalar::Finite(x)) => f.inv(*x).map(Scalar::Finite).ok_or(Error::DivisionByZero),
            _ => foreign(self, a, a),
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Scalar, e: u64) -> Scalar {
        match (&*self.0, a) {
            (FieldKind::Finite(f), Scalar::Finite(x)) => Scalar::Finite(f.pow(*x, e as u128)),
            _ => {
                let mut acc = self.one();
                let mut base = a.clone();
                let mut e = e;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = self.mul(&acc, &base);
                    }
                    base = self.mul(&base, &base);
                    e >>= 1;
                }
                acc
            }
        }
    }

    /// Inverse Frobenius (`a^{1/p}`); the identity on ℚ.
    pub fn pth_root(&self, a: &Scalar) -> Scalar {
        match (&*self.0, a) {
            (FieldKind::Finite(f), Scalar::Finite(x)) => Scalar::Finite(f.pth_root(*x)),
            _ => a.clone(),
        }
    }

    /// Power-basis coordinates over the prime field (finite fields only).
    pub fn digits(&self, a: &Scalar) -> Vec<u64> {
        match (&*self.0, a) {
            (FieldKind::Finite(f), Scalar::Finite(x)) => f.digits(*x),
            _ => panic!("digits() needs a finite-field element"),
        }
    }

    pub fn from_digits(&self, digits: &[u64]) -> Scalar {
        let f = self.finite_field().expect("from_digits() needs a finite field");
        Scalar::Finite(f.pack(digits))
    }

    /// Every element in canonical order. Finite fields only.
    pub fn elements(&self) -> impl Iterator<Item = Scalar> {
        let q = self.order().expect("elements() needs a finite field");
        (0..q).map(Scalar::Finite)
    }

    /// Uniform element of a finite field; a small rational (numerator in
    /// `-4..=4`, occasionally halved or thirded) over ℚ.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        match &*self.0 {
            FieldKind::Finite(f) => Scalar::Finite(rng.random_range(0..f.order())),
            FieldKind::Rationals => {
                let num = rng.random_range(-4i64..=4);
                let den = match rng.random_range(0..6) {
                    0 => 2,
                    1 => 3,
                    _ => 1,
                };
                Scalar::Rational(BigRational::new(num.into(), BigInt::from(den)))
            }
        }
    }

    pub fn parse_scalar(&self, token: &str) -> Result<Scalar> {
        literal::parse_scalar(self, token)
    }

    pub fn format_scalar(&self, x: &Scalar) -> String {
        literal::format_scalar(self, x)
    }

    /// Image of `x ∈ sub` under the embedding `sub ↪ self`.
    ///
    /// Supported towers: `sub == self`, and GF(p) inside GF(p^m).
    pub fn embed(&self, sub: &FieldDescriptor, x: &Scalar) -> Result<Scalar> {
        self.check_tower(sub)?;
        Ok(x.clone())
    }

    /// Whether `x ∈ self` lies in the embedded copy of `sub`.
    pub fn in_subfield(&self, sub: &FieldDescriptor, x: &Scalar) -> Result<bool> {
        self.check_tower(sub)?;
        Ok(match x {
            Scalar::Finite(v) => *v < sub.order().unwrap_or(u64::MAX),
            Scalar::Rational(_) => true,
        })
    }

    /// Degree `[self : sub]` for a supported tower.
    pub fn check_tower(&self, sub: &FieldDescriptor) -> Result<usize> {
        if self == sub {
            return Ok(1);
        }
        let unsupported = || Error::UnsupportedTower {
            sub: sub.to_string(),
            ext: self.to_string(),
        };
        match (&*sub.0, &*self.0) {
            (FieldKind::Finite(s), FieldKind::Finite(k)) if s.degree() == 1 && s.characteristic() == k.characteristic() => {
                Ok(k.degree())
            }
            _ => Err(unsupported()),
        }
    }

    pub fn cmp_scalars(&self, a: &Scalar, b: &Scalar) -> Ordering {
        a.cmp(b)
    }

    pub fn element(&self, value: Scalar) -> Result<FieldElement> {
        FieldElement::new(self.clone(), value)
    }
}

#[cold]
fn foreign(field: &FieldDescriptor, a: &Scalar, b: &Scalar) -> ! {
    panic!("scalars {a:?}, {b:?} do not belong to {field}")
}

fn prime_power(q: u64) -> Option<(u64, usize)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut m = 0;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1 && is_prime(p)).then_some((p, m))
}

/// A scalar bundled with its field, for checked standalone arithmetic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: FieldDescriptor,
    value: Scalar,
}

impl FieldElement {
    pub fn new(field: FieldDescriptor, value: Scalar) -> Result<Self> {
        if !field.owns(&value) {
            return Err(Error::MixedField {
                left: format!("{value:?}"),
                right: field.to_string(),
            });
        }
        Ok(FieldElement { field, value })
    }

    pub fn parse(field: &FieldDescriptor, token: &str) -> Result<Self> {
        Ok(FieldElement {
            field: field.clone(),
            value: field.parse_scalar(token)?,
        })
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn value(&self) -> &Scalar {
        &self.value
    }

    pub fn into_value(self) -> Scalar {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.field.is_zero(&self.value)
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::MixedField {
                left: self.field.to_string(),
                right: other.field.to_string(),
            });
        }
        Ok(())
    }

    fn with(&self, value: Scalar) -> Self {
        FieldElement {
            field: self.field.clone(),
            value,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.add(&self.value, &other.value)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.sub(&self.value, &other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.mul(&self.value, &other.value)))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.div(&self.value, &other.value)?))
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(self.with(self.field.inv(&self.value)?))
    }

    pub fn neg(&self) -> Self {
        self.with(self.field.neg(&self.value))
    }

    /// Equality that refuses to compare across fields.
    pub fn checked_eq(&self, other: &Self) -> Result<bool> {
        self.same_field(other)?;
        Ok(self.value == other.value)
    }

    pub fn embed_into(&self, ext: &FieldDescriptor) -> Result<Self> {
        Ok(FieldElement {
            field: ext.clone(),
            value: ext.embed(&self.field, &self.value)?,
        })
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format_scalar(&self.value))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self, self.field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> FieldDescriptor {
        FieldDescriptor::rationals()
    }

    #[test]
    fn rational_sum() {
        let f = q();
        let a = FieldElement::parse(&f, "2/3").unwrap();
        let b = FieldElement::parse(&f, "1/6").unwrap();
        assert_eq!(a.add(&b).unwrap().to_string(), "5/6");
    }

    #[test]
    fn prime_field_product() {
        let f = FieldDescriptor::prime(7).unwrap();
        let a = FieldElement::parse(&f, "3").unwrap();
        let b = FieldElement::parse(&f, "5").unwrap();
        assert_eq!(a.mul(&b).unwrap().to_string(), "1");
    }

    #[test]
    fn gf4_reduction_by_modulus() {
        let f = FieldDescriptor::finite(2, 2).unwrap();
        assert_eq!(f.modulus(), Some(vec![1, 1, 1]));
        let t = FieldElement::parse(&f, "t").unwrap();
        assert_eq!(t.mul(&t).unwrap().to_string(), "t+1");
    }

    #[test]
    fn mixed_fields_and_zero_division() {
        let a = FieldElement::parse(&FieldDescriptor::prime(3).unwrap(), "1").unwrap();
        let b = FieldElement::parse(&FieldDescriptor::prime(5).unwrap(), "1").unwrap();
        assert!(matches!(a.add(&b), Err(Error::MixedField { .. })));
        assert!(matches!(a.checked_eq(&b), Err(Error::MixedField { .. })));
        let zero = FieldElement::parse(&q(), "0").unwrap();
        assert_eq!(zero.inv(), Err(Error::DivisionByZero));
        let one = FieldElement::parse(&q(), "1").unwrap();
        assert_eq!(one.div(&zero), Err(Error::DivisionByZero));
    }

    #[test]
    fn invalid_descriptors() {
        assert!(FieldDescriptor::prime(1).is_err());
        assert!(FieldDescriptor::prime(9).is_err());
        assert!(FieldDescriptor::of_order(6).is_err());
        assert_eq!(FieldDescriptor::of_order(9).unwrap(), FieldDescriptor::finite(3, 2).unwrap());
    }

    #[test]
    fn descriptor_equality_is_structural() {
        let a = FieldDescriptor::finite(2, 2).unwrap();
        let b = FieldDescriptor::with_modulus(2, vec![1, 1, 1]).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.to_string(), "GF(4)");
        let c = FieldDescriptor::with_modulus(3, vec![2, 1, 1]).unwrap();
        assert_ne!(c, FieldDescriptor::finite(3, 2).unwrap());
        assert_eq!(c.to_string(), "GF(9, t^2+t+2)");
        assert_eq!(FieldDescriptor::parse(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn embeddings() {
        let gf2 = FieldDescriptor::prime(2).unwrap();
        let gf4 = FieldDescriptor::finite(2, 2).unwrap();
        let one = FieldElement::parse(&gf2, "1").unwrap().embed_into(&gf4).unwrap();
        assert_eq!(one.value(), &gf4.one());

        let gf3 = FieldDescriptor::prime(3).unwrap();
        let gf9 = FieldDescriptor::finite(3, 2).unwrap();
        let two = FieldElement::parse(&gf3, "2").unwrap().embed_into(&gf9).unwrap();
        assert_eq!(two.to_string(), "2");
        assert_eq!(two.value(), &gf9.from_int(2));

        let half = FieldElement::parse(&q(), "1/2").unwrap();
        assert!(matches!(half.embed_into(&gf4), Err(Error::UnsupportedTower { .. })));
        assert!(matches!(gf9.check_tower(&gf2), Err(Error::UnsupportedTower { .. })));
        assert!(matches!(gf4.check_tower(&FieldDescriptor::finite(2, 2).unwrap()), Ok(1)));
    }

    #[test]
    fn embedding_is_multiplicative_exhaustively() {
        for &(p, m) in &[(2u64, 2usize), (2, 3), (3, 2), (5, 2), (7, 2)] {
            let sub = FieldDescriptor::prime(p).unwrap();
            let ext = FieldDescriptor::finite(p, m).unwrap();
            for x in sub.elements() {
                for y in sub.elements() {
                    let lhs = ext.embed(&sub, &sub.mul(&x, &y)).unwrap();
                    let rhs = ext.mul(&ext.embed(&sub, &x).unwrap(), &ext.embed(&sub, &y).unwrap());
                    assert_eq!(lhs, rhs);
                    let lhs = ext.embed(&sub, &sub.add(&x, &y)).unwrap();
                    let rhs = ext.add(&ext.embed(&sub, &x).unwrap(), &ext.embed(&sub, &y).unwrap());
                    assert_eq!(lhs, rhs);
                }
            }
            assert_eq!(ext.embed(&sub, &sub.one()).unwrap(), ext.one());
            assert_eq!(ext.embed(&sub, &sub.zero()).unwrap(), ext.zero());
        }
    }

    fn check_axioms(f: &FieldDescriptor, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let x = f.random(&mut rng);
            let y = f.random(&mut rng);
            let z = f.random(&mut rng);
            assert_eq!(f.mul(&f.mul(&x, &y), &z), f.mul(&x, &f.mul(&y, &z)));
            assert_eq!(f.add(&f.add(&x, &y), &z), f.add(&x, &f.add(&y, &z)));
            assert_eq!(f.mul(&x, &y), f.mul(&y, &x));
            assert_eq!(f.add(&x, &y), f.add(&y, &x));
            assert_eq!(f.mul(&x, &f.add(&y, &z)), f.add(&f.mul(&x, &y), &f.mul(&x, &z)));
            assert_eq!(f.sub(&f.add(&x, &y), &y), x);
            if !f.is_zero(&x) {
                assert!(f.is_one(&f.mul(&x, &f.inv(&x).unwrap())));
            }
        }
    }

    #[test]
    fn field_axioms_random() {
        check_axioms(&q(), 1);
        for (seed, (p, m)) in [(2u64, 1usize), (7, 1), (2, 2), (3, 2), (2, 5), (5, 3), (65_537, 2)]
            .into_iter()
            .enumerate()
        {
            check_axioms(&FieldDescriptor::finite(p, m).unwrap(), seed as u64 + 2);
        }
    }

    #[test]
    fn pth_root_inverts_frobenius() {
        let f = FieldDescriptor::finite(3, 3).unwrap();
        for x in f.elements() {
            assert_eq!(f.pth_root(&f.pow(&x, 3)), x);
        }
    }
}
