//! Integer arithmetic modulo p^n and dense polynomials over F_p.

use crate::error::{Error, Result};

/// Arithmetic in Z/p^n with p^n < 2^63.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Zpn {
    pub p: u64,
    pub n: u32,
    pub modulus: u64,
}

impl Zpn {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if p < 2 || !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::Invalid("precision must be at least 1".into()));
        }
        let mut q: u64 = 1;
        for _ in 0..n {
            q = q
                .checked_mul(p)
                .filter(|&v| v < (1u64 << 62))
                .ok_or_else(|| Error::Invalid(format!("{p}^{n} exceeds the 62-bit limit")))?;
        }
        Ok(Zpn { p, n, modulus: q })
    }

    /// Largest n with p^n inside the arithmetic limit.
    pub fn max_precision(p: u64) -> u32 {
        let mut q: u64 = 1;
        let mut n = 0;
        while let Some(v) = q.checked_mul(p).filter(|&v| v < (1u64 << 62)) {
            q = v;
            n += 1;
        }
        n
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.modulus < (1 << 32) {
            (a * b) % self.modulus
        } else {
            ((a as u128 * b as u128) % self.modulus as u128) as u64
        }
    }

    pub fn reduce_i128(&self, a: i128) -> u64 {
        a.rem_euclid(self.modulus as i128) as u64
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// p-adic valuation of a residue; `None` for zero.
    pub fn val(&self, mut a: u64) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let mut v = 0;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        Some(v)
    }

    /// Inverse of a unit via the inverse mod p and Newton lifting.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a % self.p == 0 {
            return None;
        }
        let mut x = inv_mod_p(a % self.p, self.p);
        for _ in 0..7 {
            // x <- x (2 - a x)
            let ax = self.mul(a, x);
            x = self.mul(x, self.sub(2 % self.modulus, ax));
        }
        debug_assert_eq!(self.mul(a, x), 1 % self.modulus);
        Some(x)
    }

    pub fn p_pow(&self, k: u32) -> u64 {
        if k >= self.n {
            0
        } else {
            self.p.pow(k)
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n % d == 0).collect()
}

pub fn inv_mod_p(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    assert_eq!(r0, 1, "{a} not invertible mod {p}");
    s0.rem_euclid(p as i128) as u64
}

/// Dense polynomials over F_p, little-endian coefficient vectors.
pub mod fp_poly {
    use super::inv_mod_p;

    pub type Poly = Vec<u64>;

    pub fn trim(a: &mut Poly) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn deg(a: &[u64]) -> Option<usize> {
        a.iter().rposition(|&c| c != 0)
    }

    pub fn add(a: &[u64], b: &[u64], p: u64) -> Poly {
        let mut r = vec![0; a.len().max(b.len())];
        for (i, c) in r.iter_mut().enumerate() {
            *c = (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p;
        }
        trim(&mut r);
        r
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
        let mut r = vec![0; a.len().max(b.len())];
        for (i, c) in r.iter_mut().enumerate() {
            *c = (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p;
        }
        trim(&mut r);
        r
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut r = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + x * y) % p;
            }
        }
        trim(&mut r);
        r
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Poly, Poly) {
        let db = deg(b).expect("division by zero polynomial");
        let mut r: Poly = a.to_vec();
        trim(&mut r);
        if r.len() <= db {
            return (Vec::new(), r);
        }
        let inv_lead = inv_mod_p(b[db], p);
        let mut q = vec![0u64; r.len() - db];
        for k in (0..q.len()).rev() {
            let c = r[k + db] * inv_lead % p;
            q[k] = c;
            if c != 0 {
                for j in 0..=db {
                    r[k + j] = (r[k + j] + (p - c) * b[j]) % p;
                }
            }
        }
        trim(&mut r);
        trim(&mut q);
        (q, r)
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Poly {
        divrem(a, b, p).1
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Poly {
        rem(&mul(a, b, p), m, p)
    }

    pub fn powmod(a: &[u64], mut e: u128, m: &[u64], p: u64) -> Poly {
        let mut base = rem(a, m, p);
        let mut r: Poly = vec![1];
        r = rem(&r, m, p);
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(&r, &base, m, p);
            }
            e >>= 1;
            if e > 0 {
                base = mulmod(&base, &base, m, p);
            }
        }
        r
    }

    pub fn monic(a: &[u64], p: u64) -> Poly {
        let mut a = a.to_vec();
        trim(&mut a);
        if let Some(&l) = a.last() {
            let il = inv_mod_p(l, p);
            for c in a.iter_mut() {
                *c = *c * il % p;
            }
        }
        a
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        monic(&a, p)
    }

    /// Inverse of `a` modulo `m`, if it exists.
    pub fn invmod(a: &[u64], m: &[u64], p: u64) -> Option<Poly> {
        let (mut r0, mut r1) = (m.to_vec(), rem(a, m, p));
        let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1, p);
            let s2 = sub(&s0, &mul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        if deg(&r0) != Some(0) {
            return None;
        }
        let c = inv_mod_p(r0[0], p);
        Some(rem(&s0.iter().map(|x| x * c % p).collect::<Vec<_>>(), m, p))
    }

    /// x^(p^k) mod m by repeated p-th powers.
    pub fn frob_pow_x(m: &[u64], p: u64, k: usize) -> Poly {
        let mut r = rem(&[0, 1], m, p);
        for _ in 0..k {
            r = powmod(&r, p as u128, m, p);
        }
        r
    }

    /// Rabin irreducibility test for a monic polynomial of degree d.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let d = match deg(f) {
            Some(d) if d >= 1 => d,
            _ => return false,
        };
        if d == 1 {
            return true;
        }
        if f[0] == 0 {
            return false;
        }
        let x: Poly = vec![0, 1];
        let mut pows = Vec::with_capacity(d + 1);
        let mut cur = rem(&x, f, p);
        pows.push(cur.clone());
        for _ in 0..d {
            cur = powmod(&cur, p as u128, f, p);
            pows.push(cur.clone());
        }
        if pows[d] != rem(&x, f, p) {
            return false;
        }
        for q in super::prime_factors(d as u64) {
            let e = d / q as usize;
            let g = gcd(&sub(&pows[e], &x, p), f, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zpn_inverse() {
        let z = Zpn::new(5, 6).unwrap();
        for a in 1..200u64 {
            if a % 5 != 0 {
                assert_eq!(z.mul(a, z.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn rabin_small_cases() {
        assert!(fp_poly::is_irreducible(&[1, 1, 0, 0, 1], 2));
        assert!(!fp_poly::is_irreducible(&[1, 0, 1], 2));
        assert!(fp_poly::is_irreducible(&[2, 2, 1], 3));
        // count monic irreducible quadratics over F_5: (25 - 5) / 2 = 10
        let mut n = 0;
        for a in 0..5 {
            for b in 0..5 {
                if fp_poly::is_irreducible(&[a, b, 1], 5) {
                    n += 1;
                }
            }
        }
        assert_eq!(n, 10);
    }

    #[test]
    fn limits() {
        assert_eq!(Zpn::max_precision(2), 61);
        assert!(Zpn::new(31, 12).is_ok());
        assert!(Zpn::new(4, 2).is_err());
    }
}
