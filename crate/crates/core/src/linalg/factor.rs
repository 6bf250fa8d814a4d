//! Root finding and factorization of univariate polynomials.
//!
//! Over GF(q): squarefree decomposition, distinct-degree and equal-degree
//! (Cantor–Zassenhaus) factorization. Over ℚ only linear factors are
//! extracted, via the rational root theorem.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Polynomial;
use crate::error::{Error, Result};
use crate::field::{is_prime, Scalar};

/// Fields up to this order have their roots found by direct enumeration.
pub const ENUMERATION_LIMIT: u64 = 1 << 16;

/// Fixed seed for the randomized splitting step. The factorization itself is
/// unique, so the seed only affects running time.
const EDF_SEED: u64 = 0x5eed_edf0;

/// Outcome of [`splits_with_roots`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    /// True iff the polynomial is a product of linear factors.
    pub splits: bool,
    /// Roots in the base field, repeated by multiplicity, canonically sorted.
    pub roots: Vec<Scalar>,
    /// Monic part without roots in the base field (`1` when `splits`).
    pub cofactor: Polynomial,
}

/// Decides whether a monic polynomial splits into linear factors over its
/// field, and returns the roots it has there.
pub fn splits_with_roots(f: &Polynomial) -> Result<Splitting> {
    if !f.is_monic() {
        return Err(Error::NonMonicInput);
    }
    if f.degree() == Some(0) {
        return Err(Error::PreconditionViolated("polynomial must have degree at least 1".into()));
    }
    let field = f.field();
    let distinct = if field.is_finite() {
        finite_distinct_roots(f)
    } else {
        rational_roots(f)?
    };
    let mut roots = Vec::new();
    let mut cofactor = f.clone();
    for r in distinct {
        let lin = Polynomial::linear(field, &r);
        loop {
            let (q, rem) = cofactor.divrem(&lin)?;
            if !rem.is_zero() {
                break;
            }
            cofactor = q;
            roots.push(r.clone());
        }
    }
    roots.sort();
    Ok(Splitting {
        splits: cofactor.degree() == Some(0),
        roots,
        cofactor,
    })
}

/// Distinct roots in GF(q): the roots of `gcd(rad f, x^q - x)`.
fn finite_distinct_roots(f: &Polynomial) -> Vec<Scalar> {
    let field = f.field();
    let q = field.order().expect("finite field");
    let rad = radical(f);
    let x = Polynomial::x(field);
    let xq = x.powmod(&BigUint::from(q), &rad).expect("nonzero modulus");
    // rad | x^q - x exactly when the polynomial splits.
    let linear_part = if xq == x.rem(&rad).expect("nonzero modulus") {
        rad
    } else {
        rad.gcd(&xq.sub(&x))
    };
    let Some(d) = linear_part.degree() else {
        return Vec::new();
    };
    if d == 0 {
        return Vec::new();
    }
    let mut roots = if q <= ENUMERATION_LIMIT {
        let mut found = Vec::with_capacity(d);
        for r in field.elements() {
            if field.is_zero(&linear_part.eval(&r)) {
                found.push(r);
                if found.len() == d {
                    break;
                }
            }
        }
        found
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(EDF_SEED);
        equal_degree(&linear_part, 1, &mut rng)
            .into_iter()
            .map(|lin| field.neg(&lin.coeff(0)))
            .collect()
    };
    roots.sort();
    roots
}

/// Product of the distinct monic irreducible factors.
pub fn radical(f: &Polynomial) -> Polynomial {
    squarefree_decomposition(f)
        .into_iter()
        .fold(Polynomial::one(f.field()), |acc, (g, _)| acc.mul(&g))
}

/// Squarefree decomposition `f = lc · ∏ g_i^{e_i}` with pairwise coprime,
/// squarefree, monic, nonconstant `g_i`. Handles characteristic p.
pub fn squarefree_decomposition(f: &Polynomial) -> Vec<(Polynomial, usize)> {
    let field = f.field();
    let f = f.monic();
    if f.is_constant() {
        return Vec::new();
    }
    let mut out = Vec::new();
    if field.characteristic() == 0 {
        // Yun's algorithm.
        let df = f.derivative();
        let mut a = f.gcd(&df);
        let mut b = f.exact_div(&a).expect("gcd divides");
        let mut c = df.exact_div(&a).expect("gcd divides");
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while !b.is_one() {
            a = b.gcd(&d);
            if !a.is_one() {
                out.push((a.clone(), i));
            }
            b = b.exact_div(&a).expect("gcd divides");
            c = d.exact_div(&a).expect("gcd divides");
            d = c.sub(&b.derivative());
            i += 1;
        }
        return out;
    }
    let p = field.characteristic() as usize;
    let mut c = f.gcd(&f.derivative());
    let mut w = f.exact_div(&c).expect("gcd divides");
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.exact_div(&y).expect("gcd divides");
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.exact_div(&w).expect("gcd divides");
        i += 1;
    }
    if !c.is_one() {
        for (g, e) in squarefree_decomposition(&c.pth_root()) {
            out.push((g, e * p));
        }
    }
    out
}

/// Splits a squarefree monic polynomial over GF(q) into products of
/// irreducible factors of equal degree: returns `(product, degree)` pairs.
pub fn distinct_degree(f: &Polynomial) -> Vec<(Polynomial, usize)> {
    let field = f.field();
    let q = BigUint::from(field.order().expect("finite field"));
    let x = Polynomial::x(field);
    let mut rest = f.monic();
    let mut h = x.clone();
    let mut out = Vec::new();
    let mut d = 1;
    while rest.degree().unwrap_or(0) >= 2 * d {
        h = h.powmod(&q, &rest).expect("nonzero modulus");
        let g = rest.gcd(&h.sub(&x));
        if !g.is_one() {
            rest = rest.exact_div(&g).expect("gcd divides");
            h = h.rem(&rest).expect("nonzero modulus");
            out.push((g, d));
        }
        d += 1;
    }
    if let Some(deg) = rest.degree().filter(|&k| k > 0) {
        out.push((rest, deg));
    }
    out
}

/// Cantor–Zassenhaus: splits a squarefree product of irreducibles of degree
/// `d` into its irreducible factors.
pub fn equal_degree<R: Rng + ?Sized>(f: &Polynomial, d: usize, rng: &mut R) -> Vec<Polynomial> {
    let field = f.field();
    let n = f.degree().unwrap_or(0);
    if n <= d {
        return vec![f.monic()];
    }
    let q = field.order().expect("finite field");
    let p = field.characteristic();
    let qd = BigUint::from(q).pow(d as u32);
    loop {
        let a = Polynomial::new(field, (0..n).map(|_| field.random(rng)).collect());
        if a.is_constant() {
            continue;
        }
        let b = if p == 2 {
            // trace map a + a^2 + ... + a^{2^{kd - 1}}, q = 2^k
            let steps = field.degree() * d;
            let mut term = a.rem(f).expect("nonzero modulus");
            let mut acc = term.clone();
            for _ in 1..steps {
                term = term.mulmod(&term, f).expect("nonzero modulus");
                acc = acc.add(&term);
            }
            acc
        } else {
            let e = (&qd - 1u32) / 2u32;
            a.powmod(&e, f).expect("nonzero modulus").sub(&Polynomial::one(field))
        };
        let g = f.gcd(&b);
        let k = g.degree().unwrap_or(0);
        if k > 0 && k < n {
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&f.exact_div(&g).expect("gcd divides"), d, rng));
            return out;
        }
    }
}

/// Complete factorization over GF(q) into monic irreducibles with
/// multiplicities, in canonical order.
pub fn factor_finite(f: &Polynomial) -> Vec<(Polynomial, usize)> {
    assert!(f.field().is_finite(), "factor_finite needs a finite field");
    let mut rng = ChaCha8Rng::seed_from_u64(EDF_SEED);
    let mut out = Vec::new();
    for (g, e) in squarefree_decomposition(f) {
        for (h, d) in distinct_degree(&g) {
            for irr in equal_degree(&h, d, &mut rng) {
                out.push((irr, e));
            }
        }
    }
    out.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    out
}

/// Irreducibility over the coefficient field, when decidable here.
///
/// Always decided over GF(q). Over ℚ the answer is known for degree 1, for
/// any polynomial with a rational root, and for degrees 2 and 3 (where
/// reducible implies a linear factor); otherwise `None`.
pub fn is_irreducible(f: &Polynomial) -> Result<Option<bool>> {
    let Some(n) = f.degree().filter(|&n| n > 0) else {
        return Ok(Some(false));
    };
    if n == 1 {
        return Ok(Some(true));
    }
    let field = f.field();
    if field.is_finite() {
        let f = f.monic();
        let q = BigUint::from(field.order().expect("finite field"));
        let x = Polynomial::x(field);
        let mut h = x.clone();
        for _ in 0..n / 2 {
            h = h.powmod(&q, &f)?;
            if !f.gcd(&h.sub(&x)).is_one() {
                return Ok(Some(false));
            }
        }
        return Ok(Some(true));
    }
    if !rational_roots(&f.monic())?.is_empty() {
        return Ok(Some(false));
    }
    Ok((n <= 3).then_some(true))
}

/// A factor used by the irreducibility engine, with whether it is known to
/// be irreducible.
#[derive(Clone, Debug)]
pub struct CandidateFactor {
    pub poly: Polynomial,
    pub irreducible: bool,
}

/// Distinct monic factors of a characteristic polynomial, as used by the
/// Norton test. Over GF(q) these are the irreducible factors. Over ℚ they are
/// the linear factors plus the squarefree part of the remaining cofactor,
/// which is flagged irreducible only when that is provable.
pub fn candidate_factors(f: &Polynomial) -> Result<Vec<CandidateFactor>> {
    let field = f.field();
    if field.is_finite() {
        return Ok(factor_finite(f)
            .into_iter()
            .map(|(poly, _)| CandidateFactor { poly, irreducible: true })
            .collect());
    }
    let split = splits_with_roots(f)?;
    let mut roots = split.roots.clone();
    roots.dedup();
    let mut out: Vec<CandidateFactor> = roots
        .iter()
        .map(|r| CandidateFactor {
            poly: Polynomial::linear(field, r),
            irreducible: true,
        })
        .collect();
    if !split.splits {
        let rest = radical(&split.cofactor);
        let irreducible = is_irreducible(&rest)? == Some(true);
        out.push(CandidateFactor { poly: rest, irreducible });
    }
    Ok(out)
}

/// Distinct rational roots of a nonzero polynomial over ℚ, ascending.
pub(crate) fn rational_roots(f: &Polynomial) -> Result<Vec<Scalar>> {
    let field = f.field();
    let coeffs: Vec<BigRational> = f
        .coeffs()
        .iter()
        .map(|c| match c {
            Scalar::Rational(r) => r.clone(),
            Scalar::Finite(_) => unreachable!("rational field"),
        })
        .collect();
    if coeffs.is_empty() {
        return Ok(Vec::new());
    }
    let denom_lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut ints: Vec<BigInt> = coeffs.iter().map(|c| (c * &denom_lcm).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    for c in ints.iter_mut() {
        *c /= &content;
    }

    let mut roots = Vec::new();
    let zeros = ints.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        roots.push(BigRational::zero());
        ints.drain(..zeros);
    }
    if ints.len() >= 2 {
        let lead = ints.last().expect("nonempty").abs();
        let constant = ints[0].abs();
        let nums = divisors(&constant.to_biguint().expect("nonnegative"))?;
        let dens = divisors(&lead.to_biguint().expect("nonnegative"))?;
        // Cauchy bound on root magnitude.
        let bound = BigRational::one()
            + ints[..ints.len() - 1]
                .iter()
                .map(|c| BigRational::new(c.abs(), lead.clone()))
                .max()
                .unwrap_or_else(BigRational::zero);
        for b in &dens {
            for a in &nums {
                if !a.gcd(b).is_one() {
                    continue;
                }
                let (a, b) = (BigInt::from(a.clone()), BigInt::from(b.clone()));
                if BigRational::new(a.clone(), b.clone()) > bound {
                    continue;
                }
                for a in [a.clone(), -a] {
                    if eval_scaled(&ints, &a, &b).is_zero() {
                        roots.push(BigRational::new(a, b.clone()));
                    }
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    Ok(roots.into_iter().map(|r| field.from_rational(r).expect("rational field")).collect())
}

/// `b^n f(a/b)` for integer coefficients `f`.
fn eval_scaled(coeffs: &[BigInt], a: &BigInt, b: &BigInt) -> BigInt {
    let n = coeffs.len() - 1;
    let mut acc = BigInt::zero();
    let mut b_pow = BigInt::one();
    let mut a_pows = Vec::with_capacity(n + 1);
    let mut ap = BigInt::one();
    for _ in 0..=n {
        a_pows.push(ap.clone());
        ap *= a;
    }
    for k in (0..=n).rev() {
        acc += &coeffs[k] * &a_pows[k] * &b_pow;
        b_pow *= b;
    }
    acc
}

fn divisors(n: &BigUint) -> Result<Vec<BigUint>> {
    let mut divs = vec![BigUint::one()];
    for (p, e) in factor_integer(n)? {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigUint::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    Ok(divs)
}

/// Prime factorization by trial division and Pollard's rho.
fn factor_integer(n: &BigUint) -> Result<Vec<(BigUint, u32)>> {
    let mut primes: Vec<BigUint> = Vec::new();
    let mut rest = n.clone();
    if rest.is_zero() {
        return Err(Error::PreconditionViolated("cannot factor zero".into()));
    }
    const TRIAL: u32 = 1 << 16;
    let mut d = 2u32;
    while d < TRIAL && &BigUint::from(d) * &BigUint::from(d) <= rest {
        while (&rest % d).is_zero() {
            primes.push(BigUint::from(d));
            rest /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if probably_prime(&m) {
            primes.push(m);
            continue;
        }
        let f = pollard_rho(&m);
        stack.push(&m / &f);
        stack.push(f);
    }
    primes.sort();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}

fn probably_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigUint::from(2u32), n);
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigUint) -> BigUint {
    if (n % 2u32).is_zero() {
        return BigUint::from(2u32);
    }
    let mut c = BigUint::one();
    loop {
        let step = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = BigUint::one();
        while d.is_one() {
            x = step(&x);
            y = step(&step(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1u32;
    }
}

/// True iff the characteristic polynomial of `a` splits over its field.
pub fn is_triangularizable_single(a: &super::ExactMatrix) -> Result<bool> {
    Ok(splits_with_roots(&a.char_poly()?)?.splits)
}

/// Roots of `f` over GF(q) by brute force; test oracle only.
#[cfg(test)]
pub(crate) fn brute_force_roots(f: &Polynomial) -> Vec<Scalar> {
    f.field().elements().filter(|r| f.field().is_zero(&f.eval(r))).collect()
}
