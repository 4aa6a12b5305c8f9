//! Polynomials in F over W_n(F_q)[pi] with the twist F c = sigma(c) F.

use crate::error::{Error, Result};
use crate::witt::{RamifiedElement, RamifiedRing, WittElement, WittEmbedding, WittRing};

use super::{newton_slopes, Height, Q};

/// `coeffs[i]` is the coefficient of F^(deg - i), written on the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedPoly {
    ring: RamifiedRing,
    coeffs: Vec<RamifiedElement>,
}

impl TwistedPoly {
    /// Any leading coefficient; used for intermediate products.
    pub fn new(ring: &RamifiedRing, coeffs: Vec<RamifiedElement>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("empty polynomial".into()));
        }
        if coeffs.iter().any(|c| c.ring() != ring) {
            return Err(Error::RingMismatch("coefficient outside the polynomial ring".into()));
        }
        Ok(TwistedPoly { ring: ring.clone(), coeffs })
    }

    /// Monic of degree at least one.
    pub fn monic(ring: &RamifiedRing, coeffs: Vec<RamifiedElement>) -> Result<Self> {
        let p = Self::new(ring, coeffs)?;
        if p.degree() == 0 {
            return Err(Error::Invalid("degree must be at least 1".into()));
        }
        if !p.is_monic() {
            return Err(Error::NotMonic(format!("leading coefficient {:?}", p.coeffs[0])));
        }
        Ok(p)
    }

    /// Monic polynomial over W_n from its coefficients a_0 = 1, a_1, .., a_n.
    pub fn from_witt(coeffs: &[WittElement]) -> Result<Self> {
        let base = coeffs.first().ok_or_else(|| Error::Invalid("empty polynomial".into()))?.ring().clone();
        if coeffs.iter().any(|c| c.ring() != &base) {
            return Err(Error::RingMismatch("coefficients over different rings".into()));
        }
        let ring = RamifiedRing::new(&base, 1)?;
        Self::monic(&ring, coeffs.iter().map(|c| ring.from_witt(c)).collect())
    }

    pub fn from_ints(base: &WittRing, coeffs: &[i64]) -> Result<Self> {
        let cs: Vec<WittElement> = coeffs.iter().map(|&c| base.from_int(c)).collect();
        Self::from_witt(&cs)
    }

    pub fn ring(&self) -> &RamifiedRing {
        &self.ring
    }
    pub fn coeffs(&self) -> &[RamifiedElement] {
        &self.coeffs
    }
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
    pub fn is_monic(&self) -> bool {
        let one = self.ring.one();
        let c = &self.coeffs[0];
        c.prec() > 0 && c.eq_mod(&one, self.ring.max_prec())
    }

    /// Coefficients as Witt vectors; requires an unramified ring.
    pub fn unramified_coeffs(&self) -> Result<Vec<WittElement>> {
        if self.ring.r() != 1 {
            return Err(Error::RingMismatch("polynomial has ramified coefficients".into()));
        }
        Ok(self.coeffs.iter().map(|c| c.digits()[0].clone()).collect())
    }

    /// Twisted product: (a F^i)(b F^j) = a sigma^i(b) F^(i+j).
    pub fn mul(&self, o: &Self) -> Self {
        let (n, m) = (self.degree(), o.degree());
        let mut out = vec![self.ring.zero(); n + m + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            let shift = (n - i) as i64;
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(&b.sigma(shift)));
            }
        }
        TwistedPoly { ring: self.ring.clone(), coeffs: out }
    }

    /// P * c for a scalar c on the right.
    pub fn mul_scalar_right(&self, c: &RamifiedElement) -> Self {
        let n = self.degree();
        let coeffs = self.coeffs.iter().enumerate().map(|(i, a)| a.mul(&c.sigma((n - i) as i64))).collect();
        TwistedPoly { ring: self.ring.clone(), coeffs }
    }

    /// c * P for a scalar c on the left.
    pub fn scale_left(&self, c: &RamifiedElement) -> Self {
        TwistedPoly { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(|a| c.mul(a)).collect() }
    }

    /// F - pi^t.
    pub fn linear(ring: &RamifiedRing, t: u32) -> Self {
        TwistedPoly { ring: ring.clone(), coeffs: vec![ring.one(), ring.pi_power(t).neg()] }
    }

    /// Points (i, v_p(a_i)) with v_p = v_pi / r; zero coefficients give lower bounds.
    pub fn newton_points(&self) -> Vec<Height> {
        let r = self.ring.r() as i64;
        self.coeffs
            .iter()
            .map(|c| match c.valuation() {
                Some(v) => Height::Exact(Q::new(v as i64, r)),
                None => Height::AtLeast(Q::new(c.prec() as i64, r)),
            })
            .collect()
    }

    pub fn newton_slopes(&self) -> Result<Vec<Q>> {
        if !self.coeffs[0].is_unit() {
            return Err(Error::NotMonic("leading coefficient is not a unit".into()));
        }
        newton_slopes(&self.newton_points(), self.ring.base().n())
    }

    /// Image over a larger residue field and/or ramification index.
    pub fn transport(&self, emb: Option<&WittEmbedding>, target: &RamifiedRing) -> Result<Self> {
        let mid = RamifiedRing::new(target.base(), self.ring.r())?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let c = match emb {
                    Some(e) => c.embed(e, &mid)?,
                    None if mid == self.ring => c.clone(),
                    None => return Err(Error::RingMismatch("missing residue embedding".into())),
                };
                c.widen(target)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TwistedPoly { ring: target.clone(), coeffs })
    }

    /// Coefficient-wise comparison; `caps[i]` bounds the precision used for
    /// coefficient i. Returns the minimal precision actually compared, or
    /// `None` if some coefficient differs.
    pub fn agrees_with(&self, o: &Self, caps: &[u32]) -> Option<u32> {
        if self.degree() != o.degree() {
            return None;
        }
        let mut worst = u32::MAX;
        for (i, (a, b)) in self.coeffs.iter().zip(&o.coeffs).enumerate() {
            let k = caps.get(i).copied().unwrap_or(u32::MAX).min(a.prec()).min(b.prec());
            if !a.eq_mod(b, k) {
                return None;
            }
            worst = worst.min(k);
        }
        Some(worst)
    }
}
