//! Text syntax for fields and scalars.
//!
//! * fields: `Q`, `GF(7)`, `GF(9)`, `GF(3^2)`, `GF(9, t^2+t+2)`
//! * rationals: `3`, `-2/5`
//! * GF(p^m) elements: polynomials in `t`, e.g. `2t^2+1`, `t+1`, `-t`
//! * quaternions: `a+bi+cj+dk` with rational coefficients, e.g. `1/2-i+3k`

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{FieldDescriptor, Scalar};
use crate::error::{Error, Result};

/// One signed monomial `coef * var^exp`.
#[derive(Debug)]
pub(crate) struct Term {
    pub coef: BigRational,
    pub var: Option<char>,
    pub exp: u32,
}

fn parse_rational(token: &str, whole: &str) -> Result<BigRational> {
    let (num, den) = match token.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (token, None),
    };
    let is_int = |s: &str| {
        let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !is_int(num) || den.is_some_and(|d| !d.bytes().all(|b| b.is_ascii_digit()) || d.is_empty()) {
        return Err(Error::literal(whole, "malformed rational"));
    }
    let num: BigInt = num.trim_start_matches('+').parse().map_err(|_| Error::literal(whole, "malformed integer"))?;
    let den: BigInt = match den {
        Some(d) => d.parse().map_err(|_| Error::literal(whole, "malformed integer"))?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(Error::literal(whole, "zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

/// Splits `token` into signed monomials in the variables `vars`.
pub(crate) fn parse_terms(token: &str, vars: &[char]) -> Result<Vec<Term>> {
    let compact: String = token.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::literal(token, "empty literal"));
    }
    let mut pieces = Vec::new();
    let mut start = 0;
    for (i, c) in compact.char_indices() {
        if i > start && (c == '+' || c == '-') {
            pieces.push(&compact[start..i]);
            start = i;
        }
    }
    pieces.push(&compact[start..]);

    let mut terms = Vec::with_capacity(pieces.len());
    for piece in pieces {
        let (negative, body) = match piece.as_bytes().first() {
            Some(b'-') => (true, &piece[1..]),
            Some(b'+') => (false, &piece[1..]),
            _ => (false, piece),
        };
        if body.is_empty() {
            return Err(Error::literal(token, "dangling sign"));
        }
        let split = body.find(|c: char| !(c.is_ascii_digit() || c == '/')).unwrap_or(body.len());
        let (num_part, mut rest) = body.split_at(split);
        let mut coef = if num_part.is_empty() {
            BigRational::one()
        } else {
            parse_rational(num_part, token)?
        };
        if let Some(r) = rest.strip_prefix('*') {
            if num_part.is_empty() {
                return Err(Error::literal(token, "`*` without coefficient"));
            }
            rest = r;
        }
        let mut var = None;
        let mut exp = 0;
        if let Some(c) = rest.chars().next() {
            if !vars.contains(&c) {
                return Err(Error::literal(token, format!("unexpected `{c}`")));
            }
            var = Some(c);
            exp = 1;
            rest = &rest[c.len_utf8()..];
            if let Some(e) = rest.strip_prefix('^') {
                exp = e.parse().map_err(|_| Error::literal(token, "malformed exponent"))?;
                rest = "";
            }
        } else if num_part.is_empty() {
            return Err(Error::literal(token, "missing term"));
        }
        if !rest.is_empty() {
            return Err(Error::literal(token, format!("trailing `{rest}`")));
        }
        if negative {
            coef = -coef;
        }
        terms.push(Term { coef, var, exp });
    }
    Ok(terms)
}

fn rational_into_prime_field(field: &FieldDescriptor, r: &BigRational, token: &str) -> Result<Scalar> {
    let p = BigInt::from(field.characteristic());
    let reduce = |v: &BigInt| v.mod_floor(&p).to_u64().expect("residue fits");
    let num = field.from_digits(&[reduce(r.numer())]);
    let den = reduce(r.denom());
    if den == 0 {
        return Err(Error::literal(token, "denominator vanishes in this characteristic"));
    }
    field.div(&num, &field.from_digits(&[den]))
}

pub(crate) fn parse_scalar(field: &FieldDescriptor, token: &str) -> Result<Scalar> {
    if field.is_rationals() {
        let compact: String = token.chars().filter(|c| !c.is_whitespace()).collect();
        return Ok(Scalar::Rational(parse_rational(&compact, token)?));
    }
    let terms = parse_terms(token, &['t'])?;
    let t = if field.degree() > 1 {
        Some(field.from_digits(&[0, 1]))
    } else {
        None
    };
    let mut acc = field.zero();
    for term in terms {
        let c = rational_into_prime_field(field, &term.coef, token)?;
        let value = match term.var {
            None => c,
            Some(_) => {
                let t = t.as_ref().ok_or_else(|| Error::literal(token, "`t` is not defined in a prime field"))?;
                field.mul(&c, &field.pow(t, term.exp as u64))
            }
        };
        acc = field.add(&acc, &value);
    }
    Ok(acc)
}

pub(crate) fn format_scalar(field: &FieldDescriptor, x: &Scalar) -> String {
    match x {
        Scalar::Rational(r) => r.to_string(),
        Scalar::Finite(v) if field.degree() == 1 => v.to_string(),
        Scalar::Finite(_) => {
            let digits = field.digits(x);
            let prime = FieldDescriptor::prime(field.characteristic()).expect("characteristic is prime");
            let coeffs: Vec<Scalar> = digits.into_iter().map(Scalar::Finite).collect();
            format_poly(&prime, &coeffs, "t")
        }
    }
}

/// Renders `coeffs` (lowest degree first) as a polynomial in `var`.
pub(crate) fn format_poly(field: &FieldDescriptor, coeffs: &[Scalar], var: &str) -> String {
    let mut out = String::new();
    for (k, c) in coeffs.iter().enumerate().rev() {
        if field.is_zero(c) {
            continue;
        }
        let mut cs = format_scalar(field, c);
        let compound = cs.chars().skip(1).any(|ch| ch == '+' || ch == '-');
        if compound {
            cs = format!("({cs})");
        }
        let monomial = match k {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{k}"),
        };
        let term = if k == 0 {
            cs
        } else if cs == "1" {
            monomial
        } else if cs == "-1" {
            format!("-{monomial}")
        } else {
            format!("{cs}{monomial}")
        };
        if !out.is_empty() && !term.starts_with('-') {
            out.push('+');
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub(crate) fn parse_descriptor(spec: &str) -> Result<FieldDescriptor> {
    let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = |msg: &str| Error::InvalidField(format!("`{spec}`: {msg}"));
    if matches!(s.as_str(), "Q" | "QQ" | "Rationals" | "rationals") {
        return Ok(FieldDescriptor::rationals());
    }
    let inner = s
        .strip_prefix("GF(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| bad("expected Q or GF(...)"))?;
    let (order, modulus) = match inner.split_once(',') {
        Some((o, m)) => (o, Some(m)),
        None => (inner, None),
    };
    let (p, m) = match order.split_once('^') {
        Some((p, m)) => (
            p.parse::<u64>().map_err(|_| bad("malformed characteristic"))?,
            m.parse::<usize>().map_err(|_| bad("malformed degree"))?,
        ),
        None => {
            let q = order.parse::<u64>().map_err(|_| bad("malformed order"))?;
            let field = FieldDescriptor::of_order(q)?;
            (field.characteristic(), field.degree())
        }
    };
    match modulus {
        None => FieldDescriptor::finite(p, m),
        Some(poly) => {
            let prime = FieldDescriptor::prime(p)?;
            let terms = parse_terms(poly, &['t', 'x'])?;
            let degree = terms.iter().map(|t| t.exp as usize).max().unwrap_or(0);
            let mut coeffs = vec![0u64; degree + 1];
            for term in &terms {
                let c = rational_into_prime_field(&prime, &term.coef, poly)?;
                let slot = &mut coeffs[term.exp as usize];
                *slot = match prime.add(&Scalar::Finite(*slot), &c) {
                    Scalar::Finite(v) => v,
                    Scalar::Rational(_) => unreachable!(),
                };
            }
            if degree != m {
                return Err(bad("modulus degree does not match the field order"));
            }
            FieldDescriptor::with_modulus(p, coeffs)
        }
    }
}

pub(crate) fn format_rational_coefficient(r: &BigRational, unit: &str) -> String {
    if unit.is_empty() {
        return r.to_string();
    }
    if r.is_one() {
        unit.to_string()
    } else if (-r).is_one() {
        format!("-{unit}")
    } else if r.is_negative() {
        format!("-{}{unit}", -r)
    } else {
        format!("{r}{unit}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors() {
        assert!(parse_descriptor("Q").unwrap().is_rationals());
        assert_eq!(parse_descriptor("GF(7)").unwrap().order(), Some(7));
        assert_eq!(parse_descriptor("GF(3^2)").unwrap(), parse_descriptor("GF(9)").unwrap());
        assert_eq!(parse_descriptor("GF( 4 , t^2 + t + 1 )").unwrap(), parse_descriptor("GF(4)").unwrap());
        assert!(parse_descriptor("GF(6)").is_err());
        assert!(parse_descriptor("GF(4, t^2+1)").is_err());
        assert!(parse_descriptor("R").is_err());
    }

    #[test]
    fn rational_literals() {
        let q = FieldDescriptor::rationals();
        assert_eq!(format_scalar(&q, &parse_scalar(&q, "-6/4").unwrap()), "-3/2");
        assert_eq!(format_scalar(&q, &parse_scalar(&q, "+7").unwrap()), "7");
        assert!(matches!(parse_scalar(&q, "1/0"), Err(Error::Literal { .. })));
        assert!(parse_scalar(&q, "1/").is_err());
        assert!(parse_scalar(&q, "x").is_err());
        assert!(parse_scalar(&q, "").is_err());
    }

    #[test]
    fn finite_literals() {
        let gf9 = FieldDescriptor::finite(3, 2).unwrap();
        for token in ["0", "1", "2", "t", "t+1", "2t+2", "2t"] {
            let x = parse_scalar(&gf9, token).unwrap();
            assert_eq!(format_scalar(&gf9, &x), token);
        }
        // t^2 = -1 with the canonical modulus t^2 + 1
        assert_eq!(format_scalar(&gf9, &parse_scalar(&gf9, "t^2").unwrap()), "2");
        assert_eq!(format_scalar(&gf9, &parse_scalar(&gf9, "-t + 4").unwrap()), "2t+1");
        assert_eq!(format_scalar(&gf9, &parse_scalar(&gf9, "1/2").unwrap()), "2");
        assert!(parse_scalar(&gf9, "1/3").is_err());
        assert!(parse_scalar(&FieldDescriptor::prime(5).unwrap(), "t").is_err());
        assert!(parse_scalar(&gf9, "t+").is_err());
        assert!(parse_scalar(&gf9, "s").is_err());
    }

    #[test]
    fn poly_rendering() {
        let q = FieldDescriptor::rationals();
        let c: Vec<Scalar> = ["1", "-3", "0", "1"].iter().map(|s| parse_scalar(&q, s).unwrap()).collect();
        assert_eq!(format_poly(&q, &c, "x"), "x^3-3x+1");
        let gf4 = FieldDescriptor::finite(2, 2).unwrap();
        let c = vec![gf4.one(), parse_scalar(&gf4, "t+1").unwrap()];
        assert_eq!(format_poly(&gf4, &c, "x"), "(t+1)x+1");
    }
}
