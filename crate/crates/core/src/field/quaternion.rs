//! Rational quaternions `a + bi + cj + dk`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::literal::{format_rational_coefficient, parse_terms};
use crate::error::{Error, Result};

/// A quaternion with rational coefficients on `1, i, j, k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Quaternion {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

/// The four basis units, in the order `1, i, j, k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Unit {
    One,
    I,
    J,
    K,
}

impl Unit {
    pub const IMAGINARY: [Unit; 3] = [Unit::I, Unit::J, Unit::K];
    pub const ALL: [Unit; 4] = [Unit::One, Unit::I, Unit::J, Unit::K];

    /// Cyclic successor among `i -> j -> k -> i`; anticommutes with `self`.
    pub fn next_imaginary(self) -> Unit {
        match self {
            Unit::I => Unit::J,
            Unit::J => Unit::K,
            Unit::K | Unit::One => Unit::I,
        }
    }
}

impl Quaternion {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Quaternion { a, b, c, d }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        let r = |v: i64| BigRational::from_integer(v.into());
        Quaternion::new(r(a), r(b), r(c), r(d))
    }

    pub fn zero() -> Self {
        Quaternion::default()
    }

    pub fn one() -> Self {
        Self::unit(Unit::One)
    }

    pub fn real(a: BigRational) -> Self {
        Quaternion {
            a,
            ..Default::default()
        }
    }

    pub fn unit(u: Unit) -> Self {
        Self::scaled_unit(BigRational::one(), u)
    }

    pub fn scaled_unit(coef: BigRational, u: Unit) -> Self {
        let mut q = Quaternion::zero();
        *q.coef_mut(u) = coef;
        q
    }

    pub fn coef(&self, u: Unit) -> &BigRational {
        match u {
            Unit::One => &self.a,
            Unit::I => &self.b,
            Unit::J => &self.c,
            Unit::K => &self.d,
        }
    }

    fn coef_mut(&mut self, u: Unit) -> &mut BigRational {
        match u {
            Unit::One => &mut self.a,
            Unit::I => &mut self.b,
            Unit::J => &mut self.c,
            Unit::K => &mut self.d,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn conj(&self) -> Self {
        Quaternion::new(self.a.clone(), -&self.b, -&self.c, -&self.d)
    }

    /// `a² + b² + c² + d²`
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a + &self.b * &self.b + &self.c * &self.c + &self.d * &self.d
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Quaternion::new(&self.a * s, &self.b * s, &self.c * s, &self.d * s)
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.conj().scale(&n.recip()))
    }

    pub fn parse(token: &str) -> Result<Self> {
        let mut q = Quaternion::zero();
        for term in parse_terms(token, &['i', 'j', 'k'])? {
            let unit = match term.var {
                None => Unit::One,
                Some('i') => Unit::I,
                Some('j') => Unit::J,
                Some(_) => Unit::K,
            };
            if term.exp > 1 {
                return Err(Error::literal(token, "powers of units are not part of the grammar"));
            }
            *q.coef_mut(unit) += term.coef;
        }
        Ok(q)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (u, name) in Unit::ALL.iter().zip(["", "i", "j", "k"]) {
            let c = self.coef(*u);
            if c.is_zero() {
                continue;
            }
            let term = format_rational_coefficient(c, name);
            if !out.is_empty() && !term.starts_with('-') {
                out.push('+');
            }
            out.push_str(&term);
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl Add for &Quaternion {
    type Output = Quaternion;
    fn add(self, o: &Quaternion) -> Quaternion {
        Quaternion::new(&self.a + &o.a, &self.b + &o.b, &self.c + &o.c, &self.d + &o.d)
    }
}

impl Sub for &Quaternion {
    type Output = Quaternion;
    fn sub(self, o: &Quaternion) -> Quaternion {
        Quaternion::new(&self.a - &o.a, &self.b - &o.b, &self.c - &o.c, &self.d - &o.d)
    }
}

impl Neg for &Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }
}

impl Mul for &Quaternion {
    type Output = Quaternion;
    fn mul(self, o: &Quaternion) -> Quaternion {
        let (a1, b1, c1, d1) = (&self.a, &self.b, &self.c, &self.d);
        let (a2, b2, c2, d2) = (&o.a, &o.b, &o.c, &o.d);
        Quaternion::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        &self + &o
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Quaternion {
        Quaternion::parse(s).unwrap()
    }

    #[test]
    fn defining_relations() {
        let (i, j, k) = (q("i"), q("j"), q("k"));
        assert_eq!(&i * &j, k);
        assert_eq!(&j * &k, i);
        assert_eq!(&k * &i, j);
        assert_eq!(&j * &i, -&k);
        let minus_one = q("-1");
        assert_eq!(&i * &i, minus_one);
        assert_eq!(&j * &j, minus_one);
        assert_eq!(&k * &k, minus_one);
        assert_eq!(&(&i * &j) * &k, minus_one);
    }

    #[test]
    fn norm_of_one_plus_i() {
        assert_eq!(&q("1+i") * &q("1-i"), q("2"));
        assert_eq!(q("1+i").norm(), BigRational::from_integer(2.into()));
    }

    #[test]
    fn literal_round_trip() {
        for s in ["0", "1", "-i", "1/2-i+3k", "-2/3j+k", "i+j+k"] {
            assert_eq!(q(s).to_string(), s);
        }
        assert_eq!(q("2i + i - 1"), q("-1+3i"));
        assert!(Quaternion::parse("i^2").is_err());
        assert!(Quaternion::parse("1/0i").is_err());
        assert!(Quaternion::parse("l").is_err());
    }

    fn arb_rational() -> impl Strategy<Value = BigRational> {
        (-20i64..=20, 1i64..=6).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
    }

    fn arb_quaternion() -> impl Strategy<Value = Quaternion> {
        (arb_rational(), arb_rational(), arb_rational(), arb_rational())
            .prop_map(|(a, b, c, d)| Quaternion::new(a, b, c, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn associative_and_norm_multiplicative(x in arb_quaternion(), y in arb_quaternion(), z in arb_quaternion()) {
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
            prop_assert_eq!(&x.conj() * &x, Quaternion::real(x.norm()));
        }
    }

    #[test]
    fn inverse() {
        let x = q("1+2i-j+1/2k");
        assert_eq!(&x * &x.inverse().unwrap(), Quaternion::one());
        assert_eq!(Quaternion::zero().inverse(), Err(Error::DivisionByZero));
    }
}
