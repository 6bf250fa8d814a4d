//! Arithmetic in GF(p^m).
//!
//! Elements are packed into a single `u64`: the polynomial
//! `c_0 + c_1 t + ... + c_{m-1} t^{m-1}` (coefficients in `0..p`) is stored as
//! `c_0 + c_1 p + ... + c_{m-1} p^{m-1}`. The packed value doubles as the
//! power-basis coordinate vector over the prime field, so the embedding of
//! GF(p) is the identity on `0..p`.

use crate::error::{Error, Result};

/// Largest supported field order. Keeps packed elements and products of two
/// residues inside `u128` arithmetic with room to spare.
pub(crate) const MAX_ORDER: u64 = 1 << 62;

/// Fields up to this order get discrete-log tables for multiplication.
const TABLE_LIMIT: u64 = 1 << 16;

const MAX_DIGITS: usize = 64;

#[derive(Debug)]
struct LogTables {
    log: Vec<u32>,
    exp: Vec<u64>,
}

#[derive(Debug)]
pub(crate) struct FiniteField {
    p: u64,
    m: usize,
    q: u64,
    /// Monic modulus, lowest degree first, length `m + 1`.
    modulus: Vec<u64>,
    canonical: bool,
    tables: Option<LogTables>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

impl FiniteField {
    /// GF(p^m) with the canonical modulus: the irreducible monic polynomial
    /// whose non-leading coefficients, packed as above, form the smallest
    /// integer.
    pub(crate) fn canonical(p: u64, m: usize) -> Result<Self> {
        let q = checked_order(p, m)?;
        if m == 1 {
            return Self::build(p, m, q, vec![0, 1], true);
        }
        let count = q;
        for packed in 0..count {
            let mut modulus = unpack(packed, p, m);
            if modulus[0] == 0 {
                continue;
            }
            modulus.push(1);
            if is_irreducible_mod_p(&modulus, p) {
                return Self::build(p, m, q, modulus, true);
            }
        }
        Err(Error::InvalidField(format!(
            "no irreducible polynomial of degree {m} over GF({p})"
        )))
    }

    /// GF(p^m) relative to a caller-supplied monic modulus (lowest degree first).
    pub(crate) fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        if modulus.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree >= 1".into()));
        }
        let m = modulus.len() - 1;
        let q = checked_order(p, m)?;
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField("modulus coefficients must be reduced mod p".into()));
        }
        if modulus[m] != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        if !is_irreducible_mod_p(&modulus, p) {
            return Err(Error::InvalidField(format!(
                "modulus is reducible over GF({p})"
            )));
        }
        let canonical = Self::canonical(p, m)?.modulus == modulus;
        Self::build(p, m, q, modulus, canonical)
    }

    fn build(p: u64, m: usize, q: u64, modulus: Vec<u64>, canonical: bool) -> Result<Self> {
        let mut field = FiniteField {
            p,
            m,
            q,
            modulus,
            canonical,
            tables: None,
        };
        if m > 1 && q <= TABLE_LIMIT {
            field.tables = Some(field.log_tables());
        }
        Ok(field)
    }

    fn log_tables(&self) -> LogTables {
        let order = (self.q - 1) as usize;
        'candidates: for g in 2..self.q {
            let mut exp = Vec::with_capacity(2 * order);
            let mut x = 1u64;
            for k in 0..order {
                if k > 0 && x == 1 {
                    continue 'candidates;
                }
                exp.push(x);
                x = self.mul_slow(x, g);
            }
            let mut log = vec![0u32; self.q as usize];
            for (k, &v) in exp.iter().enumerate() {
                log[v as usize] = k as u32;
            }
            exp.extend_from_within(..);
            return LogTables { log, exp };
        }
        unreachable!("multiplicative group of a finite field is cyclic")
    }

    pub(crate) fn characteristic(&self) -> u64 {
        self.p
    }

    pub(crate) fn degree(&self) -> usize {
        self.m
    }

    pub(crate) fn order(&self) -> u64 {
        self.q
    }

    pub(crate) fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub(crate) fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub(crate) fn digits(&self, a: u64) -> Vec<u64> {
        unpack(a, self.p, self.m)
    }

    pub(crate) fn pack(&self, digits: &[u64]) -> u64 {
        pack(digits, self.p)
    }

    pub(crate) fn reduce_int(&self, v: i128) -> u64 {
        v.rem_euclid(self.p as i128) as u64
    }

    pub(crate) fn add(&self, a: u64, b: u64) -> u64 {
        if self.m == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        if self.p == 2 {
            return a ^ b;
        }
        let p = self.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.m {
            let mut d = a % p + b % p;
            if d >= p {
                d -= p;
            }
            out += d * place;
            a /= p;
            b /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    pub(crate) fn neg(&self, a: u64) -> u64 {
        if self.m == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        if self.p == 2 {
            return a;
        }
        let p = self.p;
        let mut a = a;
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.m {
            let d = a % p;
            if d != 0 {
                out += (p - d) * place;
            }
            a /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    pub(crate) fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub(crate) fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.m == 1 {
            return mul_mod(a, b, self.p);
        }
        if let Some(t) = &self.tables {
            return t.exp[(t.log[a as usize] + t.log[b as usize]) as usize];
        }
        self.mul_slow(a, b)
    }

    fn mul_slow(&self, a: u64, b: u64) -> u64 {
        let (p, m) = (self.p, self.m);
        let da = unpack(a, p, m);
        let db = unpack(b, p, m);
        let mut prod = [0u64; 2 * MAX_DIGITS];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = add_mod(prod[i + j], mul_mod(x, y, p), p);
            }
        }
        for k in (m..2 * m - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..m {
                let sub = mul_mod(c, self.modulus[i], p);
                prod[k - m + i] = sub_mod(prod[k - m + i], sub, p);
            }
        }
        pack(&prod[..m], p)
    }

    pub(crate) fn pow(&self, a: u64, mut e: u128) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub(crate) fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        if let Some(t) = &self.tables {
            let order = self.q as usize - 1;
            let l = t.log[a as usize] as usize;
            return Some(t.exp[(order - l) % order]);
        }
        if self.m == 1 {
            return Some(pow_mod(a, self.p - 2, self.p));
        }
        Some(self.pow(a, (self.q - 2) as u128))
    }

    /// Inverse of the Frobenius map `a -> a^p`.
    pub(crate) fn pth_root(&self, a: u64) -> u64 {
        if self.m == 1 {
            return a;
        }
        self.pow(a, (self.q / self.p) as u128)
    }
}

fn checked_order(p: u64, m: usize) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::InvalidField(format!("{p} is not prime")));
    }
    if m == 0 {
        return Err(Error::InvalidField("extension degree must be >= 1".into()));
    }
    let mut q: u64 = 1;
    for _ in 0..m {
        q = q
            .checked_mul(p)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or_else(|| Error::InvalidField(format!("GF({p}^{m}) is too large")))?;
    }
    Ok(q)
}

fn unpack(mut a: u64, p: u64, m: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        out.push(a % p);
        a /= p;
    }
    out
}

fn pack(digits: &[u64], p: u64) -> u64 {
    digits.iter().rev().fold(0u64, |acc, &d| acc * p + d)
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Dense polynomials over GF(p), lowest degree first, used before a field
// descriptor exists (modulus validation).

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let df = f.len() - 1;
    let inv_lead = pow_mod(f[df], p - 2, p);
    while r.len() > df {
        let k = r.len() - 1;
        let c = mul_mod(r[k], inv_lead, p);
        for i in 0..=df {
            let idx = k - df + i;
            r[idx] = sub_mod(r[idx], mul_mod(c, f[i], p), p);
        }
        trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = add_mod(prod[i + j], mul_mod(x, y, p), p);
        }
    }
    poly_rem(&prod, f, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or style test: `f` (degree m) is irreducible over GF(p) iff
/// `gcd(f, x^{p^i} - x) = 1` for every `1 <= i <= m/2`.
pub(crate) fn is_irreducible_mod_p(f: &[u64], p: u64) -> bool {
    let m = f.len() - 1;
    if m == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let x = poly_rem(&[0, 1], f, p);
    let mut h = x.clone();
    for _ in 0..m / 2 {
        // h <- h^p mod f
        let mut acc = vec![1u64];
        let mut base = h.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, f, p);
            }
            base = poly_mulmod(&base, &base, f, p);
            e >>= 1;
        }
        h = acc;
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = sub_mod(diff[1], 1, p);
        trim(&mut diff);
        let g = poly_gcd(f, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..50).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]);
        assert!(is_prime(4_294_967_291));
        assert!(!is_prime(4_294_967_297));
    }

    #[test]
    fn canonical_moduli() {
        assert_eq!(FiniteField::canonical(2, 2).unwrap().modulus, vec![1, 1, 1]);
        assert_eq!(FiniteField::canonical(3, 2).unwrap().modulus, vec![1, 0, 1]);
        assert_eq!(FiniteField::canonical(2, 3).unwrap().modulus, vec![1, 1, 0, 1]);
    }

    #[test]
    fn reducible_modulus_rejected() {
        // t^2 + 1 = (t + 1)^2 over GF(2)
        assert!(FiniteField::with_modulus(2, vec![1, 0, 1]).is_err());
        // t^2 + 1 has roots 2, 3 over GF(5)
        assert!(FiniteField::with_modulus(5, vec![1, 0, 1]).is_err());
        // t^4 + t^2 + 1 = (t^2 + t + 1)^2 over GF(2): no roots, but reducible
        assert!(FiniteField::with_modulus(2, vec![1, 0, 1, 0, 1]).is_err());
    }

    #[test]
    fn tables_agree_with_schoolbook() {
        let f = FiniteField::canonical(3, 3).unwrap();
        assert!(f.tables.is_some());
        for a in 0..f.q {
            for b in 0..f.q {
                let expect = if a == 0 || b == 0 { 0 } else { f.mul_slow(a, b) };
                assert_eq!(f.mul(a, b), expect);
            }
        }
    }

    #[test]
    fn large_field_without_tables() {
        let f = FiniteField::canonical(65_537, 2).unwrap();
        assert!(f.tables.is_none());
        let a = f.pack(&[12_345, 678]);
        let inv = f.inv(a).unwrap();
        assert_eq!(f.mul(a, inv), 1);
        assert_eq!(f.pth_root(f.pow(a, 65_537)), a);
    }
}
