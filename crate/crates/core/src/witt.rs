//! Truncated Witt vectors W_n(F_q), presented as (Z/p^n)[y]/(g) where g is the
//! minimal polynomial of the Teichmuller lift of the field generator. Frobenius
//! acts by y -> y^p.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fields::{Embedding, FqElement, FqField, Tower};
use crate::modp::Zpn;

pub mod oracle;
pub mod ramified;

pub use oracle::{witt_oracle_check, OracleReport};
pub use ramified::{RamifiedElement, RamifiedRing};

/// Polynomial product modulo a monic polynomial over Z/p^n.
fn mulmod(z: &Zpn, a: &[u64], b: &[u64], f: &[u64]) -> Vec<u64> {
    let m = f.len() - 1;
    if m == 1 {
        return vec![z.mul(a[0], b[0])];
    }
    let mut prod = vec![0u64; 2 * m - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                prod[i + j] = z.add(prod[i + j], z.mul(x, y));
            }
        }
    }
    reduce(z, &mut prod, f);
    prod
}

fn reduce(z: &Zpn, prod: &mut Vec<u64>, f: &[u64]) {
    let m = f.len() - 1;
    for k in (m..prod.len()).rev() {
        let t = prod[k];
        if t != 0 {
            for j in 0..m {
                prod[k - m + j] = z.sub(prod[k - m + j], z.mul(t, f[j]));
            }
        }
    }
    prod.truncate(m);
    prod.resize(m, 0);
}

fn powmod(z: &Zpn, a: &[u64], mut e: u128, f: &[u64]) -> Vec<u64> {
    let m = f.len() - 1;
    let mut r = vec![0u64; m];
    r[0] = 1 % z.modulus;
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(z, &r, &base, f);
        }
        e >>= 1;
        if e > 0 {
            base = mulmod(z, &base, &base, f);
        }
    }
    r
}

/// Matrix (list of columns) times vector over Z/p^n.
fn apply_cols(z: &Zpn, cols: &[Vec<u64>], v: &[u64]) -> Vec<u64> {
    let m = v.len();
    let mut out = vec![0u64; m];
    for (i, &a) in v.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (r, &b) in cols[i].iter().enumerate() {
            if b != 0 {
                out[r] = z.add(out[r], z.mul(a, b));
            }
        }
    }
    out
}

/// Inverse of a unit in (Z/p^n)[x]/(f): invert the residue over F_p, then Newton.
fn unit_inverse(z: &Zpn, a: &[u64], f: &[u64]) -> Option<Vec<u64>> {
    let p = z.p;
    let am: Vec<u64> = a.iter().map(|x| x % p).collect();
    let fm: Vec<u64> = f.iter().map(|x| x % p).collect();
    let r = if f.len() == 2 {
        if am[0] == 0 {
            return None;
        }
        vec![crate::modp::inv_mod_p(am[0], p)]
    } else {
        let mut r = crate::modp::fp_poly::invmod(&am, &fm, p)?;
        r.resize(f.len() - 1, 0);
        r
    };
    let mut x = r;
    let mut prec = 1;
    while prec < z.n {
        // x <- x (2 - a x)
        let ax = mulmod(z, a, &x, f);
        let mut two_minus = ax.iter().map(|&c| z.neg(c)).collect::<Vec<_>>();
        two_minus[0] = z.add(two_minus[0], 2 % z.modulus);
        x = mulmod(z, &x, &two_minus, f);
        prec *= 2;
    }
    Some(x)
}

/// Inverse of a square matrix over Z/p^n whose reduction mod p is invertible.
fn matrix_inverse(z: &Zpn, cols: &[Vec<u64>]) -> Option<Vec<Vec<u64>>> {
    let m = cols.len();
    // row-major copy
    let mut a: Vec<Vec<u64>> = (0..m).map(|r| (0..m).map(|c| cols[c][r]).collect()).collect();
    let mut inv: Vec<Vec<u64>> = (0..m).map(|r| (0..m).map(|c| u64::from(r == c)).collect()).collect();
    for c in 0..m {
        let piv = (c..m).find(|&r| a[r][c] % z.p != 0)?;
        a.swap(c, piv);
        inv.swap(c, piv);
        let iv = z.inv(a[c][c])?;
        for j in 0..m {
            a[c][j] = z.mul(a[c][j], iv);
            inv[c][j] = z.mul(inv[c][j], iv);
        }
        for r in 0..m {
            if r != c && a[r][c] != 0 {
                let f = a[r][c];
                for j in 0..m {
                    a[r][j] = z.sub(a[r][j], z.mul(f, a[c][j]));
                    inv[r][j] = z.sub(inv[r][j], z.mul(f, inv[c][j]));
                }
            }
        }
    }
    Some((0..m).map(|c| (0..m).map(|r| inv[r][c]).collect()).collect())
}

struct WittData {
    field: FqField,
    z: Zpn,
    /// Monic minimal polynomial of the Teichmuller generator, little endian.
    modulus: Vec<u64>,
    /// sigma^k as a matrix on the power basis, columns sigma^k(y^i); index k in 0..m.
    sigma: Vec<OnceLock<Vec<Vec<u64>>>>,
}

/// The ring W_n(F_q).
#[derive(Clone)]
pub struct WittRing(Arc<WittData>);

impl PartialEq for WittRing {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || (self.0.z == o.0.z && self.0.field == o.0.field)
    }
}
impl Eq for WittRing {}

impl fmt::Debug for WittRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W_{}({:?})", self.0.z.n, self.0.field)
    }
}

impl WittRing {
    /// Builds W_n(field). Requires p^n < 2^62.
    pub fn new(field: &FqField, n: u32) -> Result<Self> {
        let z = Zpn::new(field.p(), n)?;
        let m = field.degree();
        let f0: Vec<u64> = field.modulus().to_vec();
        let modulus = if m == 1 {
            // root is the Teichmuller lift of the generator
            let g = field.generator().coeffs()[0];
            let t = teichmuller_zpn(&z, g);
            vec![z.neg(t), 1]
        } else {
            teichmuller_modulus(&z, &f0)?
        };
        Ok(Self::from_parts(field.clone(), z, modulus))
    }

    fn from_parts(field: FqField, z: Zpn, modulus: Vec<u64>) -> Self {
        let m = field.degree();
        WittRing(Arc::new(WittData {
            field,
            z,
            modulus,
            sigma: (0..m).map(|_| OnceLock::new()).collect(),
        }))
    }

    /// The same residue field at lower precision k <= n.
    pub fn truncate(&self, k: u32) -> Result<WittRing> {
        if k == 0 || k > self.n() {
            return Err(Error::Invalid(format!("cannot truncate W_{} to W_{k}", self.n())));
        }
        if k == self.n() {
            return Ok(self.clone());
        }
        let z = Zpn::new(self.p(), k)?;
        let modulus = self.0.modulus.iter().map(|&c| c % z.modulus).collect();
        Ok(Self::from_parts(self.0.field.clone(), z, modulus))
    }

    pub fn p(&self) -> u64 {
        self.0.z.p
    }
    pub fn n(&self) -> u32 {
        self.0.z.n
    }
    pub fn degree(&self) -> usize {
        self.0.field.degree()
    }
    pub fn field(&self) -> &FqField {
        &self.0.field
    }
    pub fn zpn(&self) -> &Zpn {
        &self.0.z
    }
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn zero(&self) -> WittElement {
        WittElement { ring: self.clone(), c: vec![0; self.degree()] }
    }
    pub fn one(&self) -> WittElement {
        self.from_int(1)
    }
    pub fn from_int(&self, a: i64) -> WittElement {
        let mut c = vec![0; self.degree()];
        c[0] = self.0.z.reduce_i128(a as i128);
        WittElement { ring: self.clone(), c }
    }
    /// p^k (zero once k >= n).
    pub fn p_power(&self, k: u32) -> WittElement {
        let mut c = vec![0; self.degree()];
        c[0] = self.0.z.p_pow(k);
        WittElement { ring: self.clone(), c }
    }
    /// Element from power-basis coordinates (reduced mod p^n).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<WittElement> {
        if coeffs.len() > self.degree() {
            return Err(Error::Invalid(format!(
                "{} coordinates for a degree {} ring",
                coeffs.len(),
                self.degree()
            )));
        }
        let mut c = vec![0; self.degree()];
        for (i, &a) in coeffs.iter().enumerate() {
            c[i] = a % self.0.z.modulus;
        }
        Ok(WittElement { ring: self.clone(), c })
    }
    /// The Teichmuller generator y.
    pub fn generator(&self) -> WittElement {
        if self.degree() == 1 {
            return WittElement { ring: self.clone(), c: vec![self.0.z.neg(self.0.modulus[0])] };
        }
        let mut c = vec![0; self.degree()];
        c[1] = 1;
        WittElement { ring: self.clone(), c }
    }

    /// Coordinate-wise lift of a residue (not multiplicative).
    pub fn lift(&self, a: &FqElement) -> WittElement {
        debug_assert!(a.field() == self.field());
        WittElement { ring: self.clone(), c: a.coeffs().to_vec() }
    }

    /// Multiplicative (Teichmuller) lift.
    pub fn teichmuller(&self, a: &FqElement) -> WittElement {
        if a.is_zero() {
            return self.zero();
        }
        // x <- sigma^{-1}(x^p) contracts to the Teichmuller lift, one digit per step
        let mut x = self.lift(a);
        for _ in 0..self.n() {
            x = x.pow(self.p() as u128).sigma(-1);
        }
        x
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> WittElement {
        let q = self.0.z.modulus;
        let c = (0..self.degree()).map(|_| rng.gen_range(0..q)).collect();
        WittElement { ring: self.clone(), c }
    }

    /// Random unit.
    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> WittElement {
        loop {
            let x = self.random(rng);
            if x.is_unit() {
                return x;
            }
        }
    }

    fn sigma_matrix(&self, k: usize) -> &Vec<Vec<u64>> {
        self.0.sigma[k].get_or_init(|| {
            let z = &self.0.z;
            let f = &self.0.modulus;
            let m = self.degree();
            let mut e: u128 = 1;
            for _ in 0..k {
                e *= self.p() as u128;
            }
            let y = self.generator().c;
            let yk = powmod(z, &y, e, f);
            let mut cols = Vec::with_capacity(m);
            let mut cur = self.one().c;
            for _ in 0..m {
                cols.push(cur.clone());
                cur = mulmod(z, &cur, &yk, f);
            }
            cols
        })
    }

    /// Image of a residue-field embedding on Witt vectors.
    pub fn embedding_into(&self, target: &WittRing, field_emb: &Embedding) -> Result<WittEmbedding> {
        if field_emb.src != *self.field() || field_emb.dst != *target.field() {
            return Err(Error::FieldMismatch("embedding does not match rings".into()));
        }
        if target.n() != self.n() {
            return Err(Error::RingMismatch("precisions differ".into()));
        }
        let image = target.teichmuller(&field_emb.apply(&self.field().generator()));
        Ok(WittEmbedding { src: self.clone(), dst: target.clone(), image })
    }
}

impl Tower {
    /// Cached W_n(F_{p^m}) over the tower's field for (p, m).
    pub fn witt_ring(&self, p: u64, m: usize, n: u32) -> Result<WittRing> {
        if let Some(r) = self.witt.lock().unwrap().get(&(p, m, n)) {
            return Ok(r.clone());
        }
        let field = self.field(p, m)?;
        let r = WittRing::new(&field, n)?;
        self.witt.lock().unwrap().insert((p, m, n), r.clone());
        Ok(r)
    }

    /// Ring embedding W_n(src) -> W_n(dst) lifting the field embedding.
    pub fn witt_embedding(&self, src: &WittRing, dst: &WittRing) -> Result<WittEmbedding> {
        let fe = self.embedding(src.field(), dst.field())?;
        src.embedding_into(dst, &fe)
    }
}

/// A ring map W_n(K) -> W_n(K') given by the image of the generator.
#[derive(Clone, Debug)]
pub struct WittEmbedding {
    pub src: WittRing,
    pub dst: WittRing,
    pub image: WittElement,
}

impl WittEmbedding {
    pub fn apply(&self, x: &WittElement) -> WittElement {
        let mut acc = self.dst.zero();
        for &c in x.c.iter().rev() {
            acc = acc.mul(&self.image).add(&self.dst.from_coeffs(&[c]).unwrap());
        }
        acc
    }
}

fn teichmuller_zpn(z: &Zpn, a: u64) -> u64 {
    let mut x = a % z.p;
    for _ in 0..z.n {
        x = z.pow(x, z.p);
    }
    x
}

/// Minimal polynomial over Z/p^n of the Teichmuller lift of a root of f0.
fn teichmuller_modulus(z: &Zpn, f0: &[u64]) -> Result<Vec<u64>> {
    let m = f0.len() - 1;
    let p = z.p;
    // Frobenius lift on R0 = (Z/p^n)[x]/(f0): the root of f0 congruent to x^p.
    let df0: Vec<u64> = (1..=m).map(|i| z.mul(f0[i], i as u64 % z.modulus)).collect();
    let eval = |poly: &[u64], at: &[u64]| -> Vec<u64> {
        let mut acc = vec![0u64; m];
        for &c in poly.iter().rev() {
            acc = mulmod(z, &acc, at, f0);
            acc[0] = z.add(acc[0], c);
        }
        acc
    };
    let mut x = vec![0u64; m];
    x[1] = 1;
    let mut s = powmod(z, &x, p as u128, f0);
    for _ in 0..=(32 - z.n.leading_zeros()) {
        let num = eval(f0, &s);
        let den = unit_inverse(z, &eval(&df0, &s), f0)
            .ok_or_else(|| Error::Internal("derivative not a unit".into()))?;
        let corr = mulmod(z, &num, &den, f0);
        s = s.iter().zip(&corr).map(|(a, b)| z.sub(*a, *b)).collect();
    }
    debug_assert!(eval(f0, &s).iter().all(|&c| c == 0));
    let mut cols = Vec::with_capacity(m);
    let mut cur = vec![0u64; m];
    cur[0] = 1;
    for _ in 0..m {
        cols.push(cur.clone());
        cur = mulmod(z, &cur, &s, f0);
    }
    let inv = matrix_inverse(z, &cols).ok_or_else(|| Error::Internal("Frobenius lift not invertible".into()))?;
    // Teichmuller lift t of x: iterate T <- sigma^{-1}(T^p)
    let mut t = x.clone();
    for _ in 0..z.n {
        t = apply_cols(z, &inv, &powmod(z, &t, p as u128, f0));
    }
    // g = prod_i (X - t^{p^i}) with coefficients in R0, which must be constants
    let mut g: Vec<Vec<u64>> = vec![{
        let mut one = vec![0u64; m];
        one[0] = 1;
        one
    }];
    let mut conj = t.clone();
    for _ in 0..m {
        let mut next = vec![vec![0u64; m]; g.len() + 1];
        for (k, coef) in g.iter().enumerate() {
            // coef * X^(k+1)
            for (a, b) in next[k + 1].iter_mut().zip(coef) {
                *a = z.add(*a, *b);
            }
            let prod = mulmod(z, coef, &conj, f0);
            for (a, b) in next[k].iter_mut().zip(&prod) {
                *a = z.sub(*a, *b);
            }
        }
        g = next;
        conj = powmod(z, &conj, p as u128, f0);
    }
    let mut out = Vec::with_capacity(m + 1);
    for coef in &g {
        if coef[1..].iter().any(|&c| c != 0) {
            return Err(Error::Internal("Teichmuller polynomial not over Z/p^n".into()));
        }
        out.push(coef[0]);
    }
    Ok(out)
}

/// An element of W_n(F_q).
#[derive(Clone, PartialEq, Eq)]
pub struct WittElement {
    ring: WittRing,
    c: Vec<u64>,
}

impl fmt::Debug for WittElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.len() == 1 {
            write!(f, "{}", self.c[0])
        } else {
            write!(f, "{:?}", self.c)
        }
    }
}

impl WittElement {
    pub fn ring(&self) -> &WittRing {
        &self.ring
    }
    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }
    fn z(&self) -> &Zpn {
        &self.ring.0.z
    }
    fn with(&self, c: Vec<u64>) -> Self {
        WittElement { ring: self.ring.clone(), c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }
    pub fn add(&self, o: &Self) -> Self {
        debug_assert!(self.ring == o.ring, "{:?} vs {:?}", self.ring, o.ring);
        let z = self.z();
        self.with(self.c.iter().zip(&o.c).map(|(a, b)| z.add(*a, *b)).collect())
    }
    pub fn sub(&self, o: &Self) -> Self {
        debug_assert!(self.ring == o.ring);
        let z = self.z();
        self.with(self.c.iter().zip(&o.c).map(|(a, b)| z.sub(*a, *b)).collect())
    }
    pub fn neg(&self) -> Self {
        let z = self.z();
        self.with(self.c.iter().map(|a| z.neg(*a)).collect())
    }
    pub fn mul(&self, o: &Self) -> Self {
        debug_assert!(self.ring == o.ring);
        self.with(mulmod(self.z(), &self.c, &o.c, &self.ring.0.modulus))
    }
    pub fn mul_int(&self, k: i64) -> Self {
        let z = self.z();
        let k = z.reduce_i128(k as i128);
        self.with(self.c.iter().map(|a| z.mul(*a, k)).collect())
    }
    /// Multiplication by p^k.
    pub fn mul_p_pow(&self, k: u32) -> Self {
        let z = self.z();
        let pk = z.p_pow(k);
        self.with(self.c.iter().map(|a| z.mul(*a, pk)).collect())
    }
    pub fn pow(&self, mut e: u128) -> Self {
        let mut r = self.ring.one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    /// p-adic valuation; `None` for zero.
    pub fn valuation(&self) -> Option<u32> {
        let z = self.z();
        self.c.iter().filter_map(|&a| z.val(a)).min()
    }
    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    /// Multiplicative inverse of a unit.
    pub fn inv(&self) -> Option<Self> {
        Some(self.with(unit_inverse(self.z(), &self.c, &self.ring.0.modulus)?))
    }

    /// sigma^k (k may be negative).
    pub fn sigma(&self, k: i64) -> Self {
        let m = self.ring.degree() as i64;
        let k = k.rem_euclid(m) as usize;
        if k == 0 {
            return self.clone();
        }
        let cols = self.ring.sigma_matrix(k);
        self.with(apply_cols(self.z(), cols, &self.c))
    }

    /// Reduction mod p.
    pub fn residue(&self) -> FqElement {
        let p = self.ring.p();
        let c: Vec<u64> = self.c.iter().map(|a| a % p).collect();
        self.ring.field().from_coeffs(&c).expect("matching degree")
    }

    /// Division by p^k of an element divisible by p^k, kept in the same ring
    /// (the top k digits of the result are zero and carry no information).
    pub fn shift_down(&self, k: u32) -> Result<Self> {
        let pk = self.z().p_pow(k);
        if k >= self.ring.n() {
            return Ok(self.ring.zero());
        }
        if self.c.iter().any(|&a| a % pk != 0) {
            return Err(Error::NotDivisible);
        }
        Ok(self.with(self.c.iter().map(|a| a / pk).collect()))
    }

    /// Exact division by p, landing in W_{n-1}.
    pub fn exact_div_p(&self) -> Result<WittElement> {
        let lower = self.ring.truncate(self.ring.n() - 1)?;
        let q = self.shift_down(1)?;
        lower.from_coeffs(&q.c)
    }

    /// Reduction into a lower-precision ring over the same field.
    pub fn reduce_to(&self, lower: &WittRing) -> Result<WittElement> {
        if lower.field() != self.ring.field() || lower.n() > self.ring.n() {
            return Err(Error::RingMismatch(format!("{:?} -> {:?}", self.ring, lower)));
        }
        lower.from_coeffs(&self.c)
    }

    /// Lift into a higher precision ring (digits above n are zero).
    pub fn lift_to(&self, upper: &WittRing) -> Result<WittElement> {
        if upper.field() != self.ring.field() || upper.n() < self.ring.n() {
            return Err(Error::RingMismatch(format!("{:?} -> {:?}", self.ring, upper)));
        }
        upper.from_coeffs(&self.c)
    }

    /// True when the element is fixed by sigma.
    pub fn is_sigma_fixed(&self) -> bool {
        self.sigma(1) == *self
    }

    /// The value in Z/p^n of a sigma-fixed element.
    pub fn as_zpn(&self) -> Option<u64> {
        if self.c[1..].iter().all(|&a| a == 0) {
            Some(self.c[0])
        } else {
            None
        }
    }
}

/// Deterministic RNG used by randomized checks.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
