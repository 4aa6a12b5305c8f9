//! Totally ramified extensions W_n(F_q)[pi] with pi^r = p. Elements carry an
//! absolute pi-adic precision: the value is known modulo pi^prec.

use std::fmt;

use crate::error::{Error, Result};
use crate::fields::FqElement;

use super::{WittElement, WittEmbedding, WittRing};

#[derive(Clone, PartialEq, Eq)]
pub struct RamifiedRing {
    base: WittRing,
    r: u32,
}

impl fmt::Debug for RamifiedRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[pi^{}=p]", self.base, self.r)
    }
}

impl RamifiedRing {
    pub fn new(base: &WittRing, r: u32) -> Result<Self> {
        if r == 0 {
            return Err(Error::Invalid("ramification index must be positive".into()));
        }
        Ok(RamifiedRing { base: base.clone(), r })
    }
    pub fn base(&self) -> &WittRing {
        &self.base
    }
    pub fn r(&self) -> u32 {
        self.r
    }
    /// Maximal pi-adic precision r * n.
    pub fn max_prec(&self) -> u32 {
        self.r * self.base.n()
    }

    pub fn zero(&self) -> RamifiedElement {
        self.make(vec![self.base.zero(); self.r as usize], self.max_prec())
    }
    pub fn one(&self) -> RamifiedElement {
        self.from_witt(&self.base.one())
    }
    pub fn from_int(&self, a: i64) -> RamifiedElement {
        self.from_witt(&self.base.from_int(a))
    }
    pub fn from_witt(&self, w: &WittElement) -> RamifiedElement {
        let mut d = vec![self.base.zero(); self.r as usize];
        d[0] = w.clone();
        self.make(d, self.max_prec())
    }
    /// The uniformizer pi^k.
    pub fn pi_power(&self, k: u32) -> RamifiedElement {
        let mut d = vec![self.base.zero(); self.r as usize];
        let (q, i) = (k / self.r, k % self.r);
        d[i as usize] = self.base.p_power(q);
        self.make(d, self.max_prec())
    }
    pub fn from_digits(&self, digits: Vec<WittElement>, prec: u32) -> Result<RamifiedElement> {
        if digits.len() != self.r as usize || digits.iter().any(|d| d.ring() != &self.base) {
            return Err(Error::RingMismatch("digits do not match ring".into()));
        }
        Ok(self.make(digits, prec.min(self.max_prec())))
    }

    fn make(&self, mut d: Vec<WittElement>, prec: u32) -> RamifiedElement {
        // digit i is known mod p^ceil((prec - i) / r)
        for (i, di) in d.iter_mut().enumerate() {
            let known = (prec as i64 - i as i64).max(0);
            let k = ((known + self.r as i64 - 1) / self.r as i64) as u32;
            if k < self.base.n() {
                let z = self.base.zpn();
                let pk = z.p_pow(k);
                let c: Vec<u64> = di.coeffs().iter().map(|&a| a % pk).collect();
                *di = self.base.from_coeffs(&c).unwrap();
            }
        }
        RamifiedElement { ring: self.clone(), d, prec }
    }

    /// Same base field, larger ramification r' (a multiple of r).
    pub fn widen(&self, r_new: u32) -> Result<RamifiedRing> {
        if r_new % self.r != 0 {
            return Err(Error::Invalid(format!("{r_new} is not a multiple of {}", self.r)));
        }
        RamifiedRing::new(&self.base, r_new)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct RamifiedElement {
    ring: RamifiedRing,
    d: Vec<WittElement>,
    prec: u32,
}

impl fmt::Debug for RamifiedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + O(pi^{})", self.d, self.prec)
    }
}

impl RamifiedElement {
    pub fn ring(&self) -> &RamifiedRing {
        &self.ring
    }
    pub fn digits(&self) -> &[WittElement] {
        &self.d
    }
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// pi-adic valuation of the known part; `None` if zero at this precision.
    pub fn valuation(&self) -> Option<u32> {
        let r = self.ring.r;
        self.d
            .iter()
            .enumerate()
            .filter_map(|(i, di)| di.valuation().map(|v| v * r + i as u32))
            .filter(|&v| v < self.prec)
            .min()
    }
    /// Valuation, or the precision as a lower bound when indistinguishable from zero.
    pub fn valuation_or_prec(&self) -> u32 {
        self.valuation().unwrap_or(self.prec)
    }
    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }
    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        self.ring.make(self.d.clone(), prec.min(self.prec))
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert!(self.ring == o.ring);
        let d = self.d.iter().zip(&o.d).map(|(a, b)| a.add(b)).collect();
        self.ring.make(d, self.prec.min(o.prec))
    }
    pub fn sub(&self, o: &Self) -> Self {
        debug_assert!(self.ring == o.ring);
        let d = self.d.iter().zip(&o.d).map(|(a, b)| a.sub(b)).collect();
        self.ring.make(d, self.prec.min(o.prec))
    }
    pub fn neg(&self) -> Self {
        let d = self.d.iter().map(|a| a.neg()).collect();
        self.ring.make(d, self.prec)
    }
    pub fn mul(&self, o: &Self) -> Self {
        debug_assert!(self.ring == o.ring);
        let r = self.ring.r as usize;
        let base = &self.ring.base;
        let mut d = vec![base.zero(); r];
        for (i, a) in self.d.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.d.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let t = a.mul(b);
                if i + j >= r {
                    d[i + j - r] = d[i + j - r].add(&t.mul_p_pow(1));
                } else {
                    d[i + j] = d[i + j].add(&t);
                }
            }
        }
        let prec = (self.prec + o.valuation_or_prec()).min(o.prec + self.valuation_or_prec());
        self.ring.make(d, prec.min(self.ring.max_prec()))
    }
    pub fn mul_witt(&self, w: &WittElement) -> Self {
        self.mul(&self.ring.from_witt(w))
    }

    /// Multiplication by pi^k.
    pub fn shift_up(&self, k: u32) -> Self {
        let prec = (self.prec + k).min(self.ring.max_prec());
        let mut out = self.mul(&self.ring.pi_power(k));
        out.prec = prec;
        self.ring.make(out.d, prec)
    }

    /// Exact division by pi^k; the precision drops by k.
    pub fn shift_down(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        if self.valuation_or_prec() < k {
            return Err(Error::NotDivisible);
        }
        let r = self.ring.r;
        let base = &self.ring.base;
        let mut d = vec![base.zero(); r as usize];
        // digit i of the input sits at pi^(i + r*j); move it to pi^(i - k + r*j)
        for (i, di) in self.d.iter().enumerate() {
            if di.is_zero() {
                continue;
            }
            let e = i as i64 - k as i64;
            let (q, rem) = (e.div_euclid(r as i64), e.rem_euclid(r as i64));
            let moved = if q >= 0 { di.mul_p_pow(q as u32) } else { di.shift_down((-q) as u32)? };
            d[rem as usize] = d[rem as usize].add(&moved);
        }
        Ok(self.ring.make(d, self.prec - k))
    }

    /// Inverse of a unit; the precision is preserved.
    pub fn inv(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let u0 = self.d[0].inv()?;
        let mut y = self.ring.from_witt(&u0);
        let two = self.ring.from_int(2);
        let mut good = 1;
        while good < self.ring.max_prec() {
            y = y.mul(&two.sub(&self.mul(&y)));
            good *= 2;
        }
        Some(y.with_prec(self.prec))
    }

    pub fn sigma(&self, k: i64) -> Self {
        let d = self.d.iter().map(|a| a.sigma(k)).collect();
        self.ring.make(d, self.prec)
    }

    /// Residue in F_q.
    pub fn residue(&self) -> FqElement {
        if self.prec == 0 {
            return self.ring.base.field().zero();
        }
        self.d[0].residue()
    }

    /// Equality modulo pi^k (k capped by both precisions).
    pub fn eq_mod(&self, o: &Self, k: u32) -> bool {
        let k = k.min(self.prec).min(o.prec);
        self.sub(o).with_prec(k).is_zero()
    }

    /// Image in a ring with ramification index r * e (pi_old = pi_new^e).
    pub fn widen(&self, target: &RamifiedRing) -> Result<Self> {
        if target.base != self.ring.base || target.r % self.ring.r != 0 {
            return Err(Error::RingMismatch(format!("{:?} -> {:?}", self.ring, target)));
        }
        let e = target.r / self.ring.r;
        let mut acc = target.zero();
        for (i, di) in self.d.iter().enumerate() {
            acc = acc.add(&target.from_witt(di).shift_up(i as u32 * e));
        }
        Ok(acc.with_prec(self.prec * e))
    }

    /// Image under a residue-field extension.
    pub fn embed(&self, emb: &WittEmbedding, target: &RamifiedRing) -> Result<Self> {
        if target.r != self.ring.r || target.base != emb.dst {
            return Err(Error::RingMismatch("embedding target mismatch".into()));
        }
        let d = self.d.iter().map(|a| emb.apply(a)).collect();
        Ok(target.make(d, self.prec))
    }
}
