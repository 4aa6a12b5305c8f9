//! Independent check of W_n(F_p) arithmetic against the ghost-component
//! recursion for the universal Witt sum and product polynomials.

use rand::Rng;

use crate::error::Result;
use crate::fields::make_field;
use crate::modp::Zpn;

use super::{seeded_rng, WittRing};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub p: u64,
    pub n: u32,
    pub trials: usize,
    pub mismatches: usize,
    /// Whether the Z/p^n <-> Witt component bijection was checked exhaustively.
    pub exhaustive: bool,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

/// Witt components (x_0, .., x_{n-1}) of a residue a in Z/p^n, using
/// a = sum tau(x_i) p^i with tau the Teichmuller lift.
pub fn witt_components(ring: &WittRing, a: u64) -> Vec<u64> {
    let z = ring.zpn();
    let mut rest = a;
    let mut out = Vec::with_capacity(z.n as usize);
    for i in 0..z.n {
        let x = (rest / z.p_pow(i)) % z.p;
        out.push(x);
        let t = ring.teichmuller(&ring.field().from_int(x as i64)).coeffs()[0];
        rest = z.sub(rest, z.mul(t, z.p_pow(i)));
    }
    out
}

/// Inverse of `witt_components`.
pub fn from_witt_components(ring: &WittRing, x: &[u64]) -> u64 {
    let z = ring.zpn();
    x.iter().enumerate().fold(0, |acc, (i, &xi)| {
        let t = ring.teichmuller(&ring.field().from_int(xi as i64)).coeffs()[0];
        z.add(acc, z.mul(t, z.p_pow(i as u32)))
    })
}

/// Components of the Witt sum or product computed from ghost components:
/// w_k = sum_{i<=k} p^i x_i^{p^(k-i)}, solved recursively for the result.
/// Everything is computed mod p^(k+1), which suffices because congruent
/// inputs mod p have p^j-th powers congruent mod p^(j+1).
pub fn ghost_combine(p: u64, n: u32, x: &[u64], y: &[u64], product: bool) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(n as usize);
    for k in 0..n {
        let z = Zpn::new(p, k + 1).unwrap();
        let ghost = |v: &[u64]| -> u64 {
            (0..=k).fold(0, |acc, i| {
                let e = p.pow(k - i);
                z.add(acc, z.mul(z.p_pow(i), z.pow(v[i as usize] % z.modulus, e)))
            })
        };
        let target = if product { z.mul(ghost(x), ghost(y)) } else { z.add(ghost(x), ghost(y)) };
        let lower = (0..k).fold(0, |acc, i| {
            let e = p.pow(k - i);
            z.add(acc, z.mul(z.p_pow(i), z.pow(out[i as usize], e)))
        });
        let top = z.sub(target, lower);
        debug_assert_eq!(top % z.p_pow(k).max(1), 0);
        out.push((top / p.pow(k)) % p);
    }
    out
}

/// Compares ring addition and multiplication of W_n(F_p) against the ghost
/// recursion on random pairs, and checks the component bijection exhaustively
/// when p^n <= 256.
pub fn witt_oracle_check(p: u64, n: u32, trials: usize, seed: u64) -> Result<OracleReport> {
    let field = make_field(p, 1)?;
    let ring = WittRing::new(&field, n)?;
    let z = *ring.zpn();
    let mut mismatches = 0;
    let exhaustive = z.modulus <= 256;
    if exhaustive {
        for a in 0..z.modulus {
            if from_witt_components(&ring, &witt_components(&ring, a)) != a {
                mismatches += 1;
            }
        }
    }
    let mut rng = seeded_rng(seed);
    for _ in 0..trials {
        let x: Vec<u64> = (0..n).map(|_| rng.gen_range(0..p)).collect();
        let y: Vec<u64> = (0..n).map(|_| rng.gen_range(0..p)).collect();
        let a = ring.from_int(from_witt_components(&ring, &x) as i64);
        let b = ring.from_int(from_witt_components(&ring, &y) as i64);
        let sum = witt_components(&ring, a.add(&b).coeffs()[0]);
        let prod = witt_components(&ring, a.mul(&b).coeffs()[0]);
        if sum != ghost_combine(p, n, &x, &y, false) {
            mismatches += 1;
        }
        if prod != ghost_combine(p, n, &x, &y, true) {
            mismatches += 1;
        }
    }
    Ok(OracleReport { p, n, trials, mismatches, exhaustive })
}
