//! Conway polynomial search in the standard ordering: f = x^m + sum (-1)^(m-i) a_i x^i,
//! compared lexicographically on (a_(m-1), ..., a_0).

use crate::modp::{fp_poly, prime_factors};

fn poly_from_digits(digits: &[u64], p: u64) -> Vec<u64> {
    // digits[k] = a_(m-1-k)
    let m = digits.len();
    let mut f = vec![0u64; m + 1];
    f[m] = 1;
    for (k, &a) in digits.iter().enumerate() {
        let i = m - 1 - k;
        f[i] = if (m - i) % 2 == 0 { a } else { (p - a) % p };
    }
    f
}

/// True when x has multiplicative order p^m - 1 modulo f.
pub fn is_primitive(f: &[u64], p: u64) -> bool {
    let m = f.len() - 1;
    let n = (p as u128).pow(m as u32) - 1;
    let x = vec![0u64, 1];
    if fp_poly::powmod(&x, n, f, p) != vec![1] {
        return false;
    }
    prime_factors(n as u64)
        .into_iter()
        .all(|q| fp_poly::powmod(&x, n / q as u128, f, p) != vec![1])
}

/// f_d(x^((p^m-1)/(p^d-1))) == 0 mod f_m.
pub fn is_compatible(f: &[u64], lower: &[u64], p: u64) -> bool {
    let m = f.len() - 1;
    let d = lower.len() - 1;
    let e = ((p as u128).pow(m as u32) - 1) / ((p as u128).pow(d as u32) - 1);
    let y = fp_poly::powmod(&[0, 1], e, f, p);
    let mut acc: Vec<u64> = Vec::new();
    for &c in lower.iter().rev() {
        acc = fp_poly::add(&fp_poly::mulmod(&acc, &y, f, p), &[c], p);
    }
    fp_poly::rem(&acc, f, p).is_empty()
}

/// The Conway polynomial for (p, m) given those for the maximal proper divisors.
pub fn search(p: u64, m: usize, lower: &dyn Fn(usize) -> Vec<u64>) -> Vec<u64> {
    let maximal: Vec<Vec<u64>> = prime_factors(m as u64)
        .into_iter()
        .map(|q| lower(m / q as usize))
        .collect();
    let mut digits = vec![0u64; m];
    loop {
        let f = poly_from_digits(&digits, p);
        if f[0] != 0
            && maximal.iter().all(|g| is_compatible(&f, g, p))
            && fp_poly::is_irreducible(&f, p)
            && is_primitive(&f, p)
        {
            return f;
        }
        let mut k = m;
        loop {
            assert!(k > 0, "Conway polynomial search exhausted for ({p}, {m})");
            k -= 1;
            digits[k] += 1;
            if digits[k] < p {
                break;
            }
            digits[k] = 0;
        }
    }
}
