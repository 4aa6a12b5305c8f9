//! Finite fields F_{p^m} in polynomial basis, the pinned Conway table,
//! compatible embeddings, and additive (p-polynomial) equation solving.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::modp::{self, fp_poly, inv_mod_p};

pub mod conway;
pub mod linalg;

/// Where a field's defining polynomial came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldOrigin {
    /// Conway polynomial from the pinned table.
    Conway,
    /// Lexicographically least monic irreducible, built on demand.
    LeastIrreducible,
}

struct FieldData {
    p: u64,
    m: usize,
    modulus: Vec<u64>,
    origin: FieldOrigin,
    frob: OnceLock<Vec<Vec<u64>>>,
}

/// A finite field F_{p^m} presented as F_p[x]/(f).
#[derive(Clone)]
pub struct FqField(Arc<FieldData>);

impl PartialEq for FqField {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.0, &o.0)
            || (self.0.p == o.0.p && self.0.m == o.0.m && self.0.modulus == o.0.modulus)
    }
}
impl Eq for FqField {}

impl fmt::Debug for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.0.p, self.0.m)
    }
}

impl FqField {
    /// Builds a field from an explicit monic irreducible modulus (little-endian).
    pub fn from_modulus(p: u64, modulus: Vec<u64>, origin: FieldOrigin) -> Result<Self> {
        let m = fp_poly::deg(&modulus).unwrap_or(0);
        if m == 0 || modulus[m] != 1 || modulus.len() != m + 1 {
            return Err(Error::UnsupportedField {
                p,
                m,
                reason: "modulus must be monic of positive degree".into(),
            });
        }
        if !modp::is_prime(p) {
            return Err(Error::UnsupportedField { p, m, reason: "p is not prime".into() });
        }
        Ok(FqField(Arc::new(FieldData { p, m, modulus, origin, frob: OnceLock::new() })))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn degree(&self) -> usize {
        self.0.m
    }
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }
    pub fn origin(&self) -> FieldOrigin {
        self.0.origin
    }
    /// Field size as u128 (saturating).
    pub fn order(&self) -> u128 {
        (self.0.p as u128).saturating_pow(self.0.m as u32)
    }

    pub fn zero(&self) -> FqElement {
        FqElement { field: self.clone(), c: vec![0; self.0.m] }
    }
    pub fn one(&self) -> FqElement {
        self.from_int(1)
    }
    pub fn from_int(&self, a: i64) -> FqElement {
        let mut c = vec![0; self.0.m];
        c[0] = a.rem_euclid(self.0.p as i64) as u64;
        FqElement { field: self.clone(), c }
    }
    /// The class of x, a root of the defining polynomial.
    pub fn generator(&self) -> FqElement {
        if self.0.m == 1 {
            let c = (self.0.p - self.0.modulus[0]) % self.0.p;
            return FqElement { field: self.clone(), c: vec![c] };
        }
        let mut c = vec![0; self.0.m];
        c[1] = 1;
        FqElement { field: self.clone(), c }
    }
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FqElement> {
        if coeffs.len() > self.0.m {
            return Err(Error::Invalid(format!(
                "{} coefficients for a degree {} field",
                coeffs.len(),
                self.0.m
            )));
        }
        let mut c = vec![0; self.0.m];
        for (i, &a) in coeffs.iter().enumerate() {
            c[i] = a % self.0.p;
        }
        Ok(FqElement { field: self.clone(), c })
    }
    fn from_poly(&self, poly: &[u64]) -> FqElement {
        let r = fp_poly::rem(poly, &self.0.modulus, self.0.p);
        let mut c = vec![0; self.0.m];
        c[..r.len()].copy_from_slice(&r);
        FqElement { field: self.clone(), c }
    }

    /// Element with coordinate vector given by the base-p digits of `idx`.
    pub fn element_from_index(&self, mut idx: u128) -> FqElement {
        let p = self.0.p as u128;
        let mut c = vec![0; self.0.m];
        for ci in c.iter_mut() {
            *ci = (idx % p) as u64;
            idx /= p;
        }
        FqElement { field: self.clone(), c }
    }

    /// All elements; only sensible for small fields.
    pub fn elements(&self) -> impl Iterator<Item = FqElement> + '_ {
        (0..self.order()).map(move |i| self.element_from_index(i))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FqElement {
        let c = (0..self.0.m).map(|_| rng.gen_range(0..self.0.p)).collect();
        FqElement { field: self.clone(), c }
    }

    /// Matrix of the absolute Frobenius on the polynomial basis (column i = (x^i)^p).
    pub fn frobenius_matrix(&self) -> &Vec<Vec<u64>> {
        self.0.frob.get_or_init(|| {
            let m = self.0.m;
            let xp = self.generator().pow(self.0.p as u128);
            let mut cols = Vec::with_capacity(m);
            let mut cur = self.one();
            for _ in 0..m {
                cols.push(cur.c.clone());
                cur = cur.mul(&xp);
            }
            cols
        })
    }

    fn check(&self, other: &FqField) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::FieldMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// An element of F_{p^m}.
#[derive(Clone, PartialEq, Eq)]
pub struct FqElement {
    field: FqField,
    c: Vec<u64>,
}

impl fmt::Debug for FqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{:?}", self.c, self.field)
    }
}

impl std::hash::Hash for FqElement {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.c.hash(h);
    }
}

impl FqElement {
    pub fn field(&self) -> &FqField {
        &self.field
    }
    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }
    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&x| x == 0)
    }
    /// Base-p index, inverse of `element_from_index`.
    pub fn index(&self) -> u128 {
        let p = self.field.0.p as u128;
        self.c.iter().rev().fold(0u128, |acc, &d| acc * p + d as u128)
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert!(self.field == o.field);
        let p = self.field.0.p;
        let c = self.c.iter().zip(&o.c).map(|(a, b)| (a + b) % p).collect();
        FqElement { field: self.field.clone(), c }
    }
    pub fn sub(&self, o: &Self) -> Self {
        debug_assert!(self.field == o.field);
        let p = self.field.0.p;
        let c = self.c.iter().zip(&o.c).map(|(a, b)| (a + p - b) % p).collect();
        FqElement { field: self.field.clone(), c }
    }
    pub fn neg(&self) -> Self {
        let p = self.field.0.p;
        let c = self.c.iter().map(|a| (p - a) % p).collect();
        FqElement { field: self.field.clone(), c }
    }
    pub fn scale(&self, k: u64) -> Self {
        let p = self.field.0.p;
        let k = k % p;
        let c = self.c.iter().map(|a| a * k % p).collect();
        FqElement { field: self.field.clone(), c }
    }
    pub fn mul(&self, o: &Self) -> Self {
        debug_assert!(self.field == o.field);
        let f = &self.field.0;
        let (p, m) = (f.p, f.m);
        if m == 1 {
            return FqElement { field: self.field.clone(), c: vec![self.c[0] * o.c[0] % p] };
        }
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a * b) % p;
            }
        }
        for k in (m..2 * m - 1).rev() {
            let t = prod[k];
            if t != 0 {
                for j in 0..m {
                    prod[k - m + j] = (prod[k - m + j] + (p - t) * f.modulus[j]) % p;
                }
            }
        }
        prod.truncate(m);
        FqElement { field: self.field.clone(), c: prod }
    }
    pub fn square(&self) -> Self {
        self.mul(self)
    }
    pub fn pow(&self, mut e: u128) -> Self {
        let mut base = self.clone();
        let mut r = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        r
    }
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let f = &self.field.0;
        if f.m == 1 {
            return Some(FqElement { field: self.field.clone(), c: vec![inv_mod_p(self.c[0], f.p)] });
        }
        let inv = fp_poly::invmod(&self.c, &f.modulus, f.p)?;
        Some(self.field.from_poly(&inv))
    }
    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.inv()?))
    }

    /// The k-th power of the absolute Frobenius, x -> x^(p^k); k may be negative.
    pub fn frobenius(&self, k: i64) -> Self {
        let m = self.field.0.m as i64;
        let k = k.rem_euclid(m) as usize;
        let fr = self.field.frobenius_matrix();
        let p = self.field.0.p;
        let mut v = self.c.clone();
        for _ in 0..k {
            let mut w = vec![0u64; v.len()];
            for (i, &a) in v.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (r, &b) in fr[i].iter().enumerate() {
                    w[r] = (w[r] + a * b) % p;
                }
            }
            v = w;
        }
        FqElement { field: self.field.clone(), c: v }
    }

    /// True when the element lies in the subfield F_{p^d}.
    pub fn in_subfield(&self, d: usize) -> bool {
        self.frobenius(d as i64) == *self
    }

    /// Absolute trace to F_p.
    pub fn trace(&self) -> u64 {
        let mut acc = self.clone();
        let mut cur = self.clone();
        for _ in 1..self.field.0.m {
            cur = cur.frobenius(1);
            acc = acc.add(&cur);
        }
        acc.c[0]
    }

    /// Norm to F_p.
    pub fn norm(&self) -> u64 {
        let p = self.field.0.p as u128;
        let e = (self.field.order() - 1) / (p - 1);
        self.pow(e).c[0]
    }

    /// Multiplicative order; `None` for zero.
    pub fn multiplicative_order(&self) -> Option<u128> {
        if self.is_zero() {
            return None;
        }
        let n = self.field.order() - 1;
        let mut ord = n;
        for q in modp::prime_factors(n as u64) {
            while ord % q as u128 == 0 && self.pow(ord / q as u128).is_one() {
                ord /= q as u128;
            }
        }
        Some(ord)
    }
}

/// The pinned table of field polynomials, keyed by (p, m).
#[derive(Clone, Debug)]
pub struct FieldTable {
    pub version: u32,
    entries: BTreeMap<(u64, usize), Vec<u64>>,
}

const DEFAULT_TABLE: &str = include_str!("../data/conway.json");

/// Environment variable naming an alternative table file.
pub const FIELD_TABLE_ENV: &str = "DIEUDONNE_FIELD_TABLE";

impl FieldTable {
    pub fn parse(text: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("field table: {e}")))?;
        let version = v["version"].as_u64().ok_or_else(|| Error::Parse("field table: missing version".into()))?;
        let mut entries = BTreeMap::new();
        for e in v["entries"].as_array().ok_or_else(|| Error::Parse("field table: missing entries".into()))? {
            let p = e["p"].as_u64().ok_or_else(|| Error::Parse("field table: bad p".into()))?;
            let m = e["m"].as_u64().ok_or_else(|| Error::Parse("field table: bad m".into()))? as usize;
            let coeffs: Vec<u64> = serde_json::from_value(e["coeffs"].clone())
                .map_err(|e| Error::Parse(format!("field table: {e}")))?;
            if coeffs.len() != m + 1 || coeffs[m] != 1 {
                return Err(Error::Parse(format!("field table: entry ({p},{m}) is not monic of degree {m}")));
            }
            entries.insert((p, m), coeffs);
        }
        Ok(FieldTable { version: version as u32, entries })
    }

    /// The compiled-in table.
    pub fn builtin() -> &'static FieldTable {
        static T: OnceLock<FieldTable> = OnceLock::new();
        T.get_or_init(|| FieldTable::parse(DEFAULT_TABLE).expect("builtin field table is valid"))
    }

    /// Table named by the environment variable, or the builtin one.
    pub fn from_env() -> Result<FieldTable> {
        match std::env::var(FIELD_TABLE_ENV) {
            Ok(path) if !path.is_empty() => {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Invalid(format!("cannot read field table {path}: {e}")))?;
                FieldTable::parse(&text)
            }
            _ => Ok(FieldTable::builtin().clone()),
        }
    }

    pub fn get(&self, p: u64, m: usize) -> Option<&Vec<u64>> {
        self.entries.get(&(p, m))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(u64, usize), &Vec<u64>)> {
        self.entries.iter()
    }

    pub fn max_degree(&self, p: u64) -> usize {
        self.entries.keys().filter(|k| k.0 == p).map(|k| k.1).max().unwrap_or(0)
    }

    pub fn field(&self, p: u64, m: usize) -> Result<FqField> {
        match self.get(p, m) {
            Some(c) => FqField::from_modulus(p, c.clone(), FieldOrigin::Conway),
            None => Err(Error::UnsupportedField {
                p,
                m,
                reason: "outside the pinned field table".into(),
            }),
        }
    }
}

/// F_{p^m} from the builtin table.
pub fn make_field(p: u64, m: usize) -> Result<FqField> {
    if !modp::is_prime(p) {
        return Err(Error::UnsupportedField { p, m, reason: "p is not prime".into() });
    }
    FieldTable::builtin().field(p, m)
}

/// Bound on field enlargement for the solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtensionPolicy {
    pub max_degree: usize,
}

impl Default for ExtensionPolicy {
    fn default() -> Self {
        ExtensionPolicy { max_degree: 8 }
    }
}

/// Cache of fields (table or on-demand) and derived structures.
pub struct Tower {
    table: FieldTable,
    fields: Mutex<HashMap<(u64, usize), FqField>>,
    embeddings: Mutex<HashMap<(Vec<u64>, Vec<u64>), FqElement>>,
    pub(crate) witt: Mutex<HashMap<(u64, usize, u32), crate::witt::WittRing>>,
}

impl Default for Tower {
    fn default() -> Self {
        Tower::new(FieldTable::builtin().clone())
    }
}

impl Tower {
    pub fn new(table: FieldTable) -> Self {
        Tower {
            table,
            fields: Mutex::new(HashMap::new()),
            embeddings: Mutex::new(HashMap::new()),
            witt: Mutex::new(HashMap::new()),
        }
    }

    pub fn table(&self) -> &FieldTable {
        &self.table
    }

    /// F_{p^m}: the table entry when present, otherwise the least irreducible.
    pub fn field(&self, p: u64, m: usize) -> Result<FqField> {
        if let Some(f) = self.fields.lock().unwrap().get(&(p, m)) {
            return Ok(f.clone());
        }
        let f = match self.table.field(p, m) {
            Ok(f) => f,
            Err(_) => FqField::from_modulus(p, least_irreducible(p, m), FieldOrigin::LeastIrreducible)?,
        };
        self.fields.lock().unwrap().insert((p, m), f.clone());
        Ok(f)
    }

    /// The embedding of `src` into `dst` (requires deg src | deg dst).
    pub fn embedding(&self, src: &FqField, dst: &FqField) -> Result<Embedding> {
        if src.p() != dst.p() || dst.degree() % src.degree() != 0 {
            return Err(Error::FieldMismatch(format!("no embedding {src:?} -> {dst:?}")));
        }
        if src == dst {
            return Ok(Embedding { src: src.clone(), dst: dst.clone(), image: dst.generator() });
        }
        let key = (src.modulus().to_vec(), dst.modulus().to_vec());
        if let Some(img) = self.embeddings.lock().unwrap().get(&key) {
            return Ok(Embedding { src: src.clone(), dst: dst.clone(), image: img.clone() });
        }
        let image = if src.origin() == FieldOrigin::Conway && dst.origin() == FieldOrigin::Conway {
            let e = (dst.order() - 1) / (src.order() - 1);
            dst.generator().pow(e)
        } else {
            least_root(src.modulus(), dst)?
        };
        self.embeddings.lock().unwrap().insert(key, image.clone());
        Ok(Embedding { src: src.clone(), dst: dst.clone(), image })
    }
}

/// A field homomorphism determined by the image of the source generator.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub src: FqField,
    pub dst: FqField,
    pub image: FqElement,
}

impl Embedding {
    pub fn apply(&self, x: &FqElement) -> FqElement {
        debug_assert!(x.field() == &self.src);
        let mut acc = self.dst.zero();
        for &c in x.coeffs().iter().rev() {
            acc = acc.mul(&self.image).add(&self.dst.from_int(c as i64));
        }
        acc
    }
}

/// Embeds `x` into `target` using the builtin table conventions.
pub fn embed(x: &FqElement, target: &FqField) -> Result<FqElement> {
    let tower = Tower::default();
    Ok(tower.embedding(x.field(), target)?.apply(x))
}

/// Frobenius x -> x^(p^k).
pub fn frobenius(x: &FqElement, k: i64) -> FqElement {
    x.frobenius(k)
}

/// Lexicographically least monic irreducible of degree m (coefficients read
/// from x^(m-1) down to x^0).
pub fn least_irreducible(p: u64, m: usize) -> Vec<u64> {
    let mut digits = vec![0u64; m];
    loop {
        let mut f: Vec<u64> = digits.iter().rev().copied().collect();
        f.push(1);
        if f[0] != 0 && fp_poly::is_irreducible(&f, p) {
            return f;
        }
        // increment, most significant digit is x^(m-1)
        let mut k = m;
        loop {
            k -= 1;
            digits[k] += 1;
            if digits[k] < p {
                break;
            }
            digits[k] = 0;
            assert!(k > 0, "no irreducible polynomial found");
        }
    }
}

/// Polynomials over F_q, little endian.
fn fq_poly_trim(a: &mut Vec<FqElement>) {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
}

fn fq_poly_rem(a: &[FqElement], b: &[FqElement]) -> Vec<FqElement> {
    let mut r = a.to_vec();
    fq_poly_trim(&mut r);
    let db = b.len() - 1;
    let il = b[db].inv().expect("nonzero leading coefficient");
    while r.len() > db {
        let k = r.len() - 1 - db;
        let c = r.last().unwrap().mul(&il);
        for j in 0..=db {
            r[k + j] = r[k + j].sub(&c.mul(&b[j]));
        }
        fq_poly_trim(&mut r);
    }
    r
}

fn fq_poly_mulmod(a: &[FqElement], b: &[FqElement], m: &[FqElement], field: &FqField) -> Vec<FqElement> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![field.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] = r[i + j].add(&x.mul(y));
        }
    }
    fq_poly_rem(&r, m)
}

fn fq_poly_powmod(a: &[FqElement], mut e: u128, m: &[FqElement], field: &FqField) -> Vec<FqElement> {
    let mut base = fq_poly_rem(a, m);
    let mut r = fq_poly_rem(&[field.one()], m);
    while e > 0 {
        if e & 1 == 1 {
            r = fq_poly_mulmod(&r, &base, m, field);
        }
        e >>= 1;
        if e > 0 {
            base = fq_poly_mulmod(&base, &base, m, field);
        }
    }
    r
}

fn fq_poly_gcd(a: &[FqElement], b: &[FqElement]) -> Vec<FqElement> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    fq_poly_trim(&mut a);
    fq_poly_trim(&mut b);
    while !b.is_empty() {
        let r = fq_poly_rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(l) = a.last().cloned() {
        let il = l.inv().unwrap();
        for c in a.iter_mut() {
            *c = c.mul(&il);
        }
    }
    a
}

fn fq_poly_div_exact(a: &[FqElement], b: &[FqElement], field: &FqField) -> Vec<FqElement> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let il = b[db].inv().unwrap();
    let mut q = vec![field.zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db].mul(&il);
        for j in 0..=db {
            r[k + j] = r[k + j].sub(&c.mul(&b[j]));
        }
        q[k] = c;
    }
    q
}

/// All roots in `field` of a squarefree product of linear factors (monic).
fn split_linear(g: Vec<FqElement>, field: &FqField, rng: &mut ChaCha8Rng, out: &mut Vec<FqElement>) {
    let d = g.len() - 1;
    if d == 0 {
        return;
    }
    if d == 1 {
        out.push(g[0].neg());
        return;
    }
    let p = field.p();
    loop {
        let a = field.random(rng);
        let h = if p == 2 {
            // trace polynomial sum_{i<m} (a x)^(2^i)
            let lin = vec![field.zero(), a];
            let mut cur = fq_poly_rem(&lin, &g);
            let mut acc = cur.clone();
            for _ in 1..field.degree() {
                cur = fq_poly_mulmod(&cur, &cur, &g, field);
                let len = acc.len().max(cur.len());
                acc.resize(len, field.zero());
                for (i, c) in cur.iter().enumerate() {
                    acc[i] = acc[i].add(c);
                }
                fq_poly_trim(&mut acc);
            }
            acc
        } else {
            let lin = vec![a, field.one()];
            let mut h = fq_poly_powmod(&lin, (field.order() - 1) / 2, &g, field);
            if h.is_empty() {
                h.push(field.zero());
            }
            h[0] = h[0].sub(&field.one());
            fq_poly_trim(&mut h);
            h
        };
        let f = fq_poly_gcd(&g, &h);
        let df = f.len().saturating_sub(1);
        if df > 0 && df < d {
            let rest = fq_poly_div_exact(&g, &f, field);
            split_linear(f, field, rng, out);
            split_linear(rest, field, rng, out);
            return;
        }
    }
}

/// Least root (by base-p index) in `dst` of an F_p polynomial that splits there.
fn least_root(poly: &[u64], dst: &FqField) -> Result<FqElement> {
    let g: Vec<FqElement> = poly.iter().map(|&c| dst.from_int(c as i64)).collect();
    // restrict to the part splitting into distinct linear factors: gcd(g, x^q - x)
    let x = vec![dst.zero(), dst.one()];
    let mut xq = fq_poly_powmod(&x, dst.order(), &g, dst);
    if xq.len() < 2 {
        xq.resize(2, dst.zero());
    }
    xq[1] = xq[1].sub(&dst.one());
    fq_poly_trim(&mut xq);
    let lin = fq_poly_gcd(&g, &xq);
    if lin.len() < 2 {
        return Err(Error::FieldMismatch("polynomial has no root in target field".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut roots = Vec::new();
    split_linear(lin, dst, &mut rng, &mut roots);
    roots.sort_by_key(|r| r.index());
    Ok(roots.swap_remove(0))
}

/// An F_p-linear map x -> sum_i c_i x^(p^(n-i)) on a fixed field, prepared for
/// repeated solves.
pub struct AdditiveOperator {
    field: FqField,
    solver: linalg::FpSolver,
}

impl AdditiveOperator {
    /// `coeffs[i]` multiplies x^(p^(n-i)), n = coeffs.len() - 1.
    pub fn new(coeffs: &[FqElement]) -> Result<Self> {
        let field = coeffs
            .first()
            .ok_or_else(|| Error::Invalid("empty additive polynomial".into()))?
            .field()
            .clone();
        for c in coeffs {
            field.check(c.field())?;
        }
        let m = field.degree();
        let n = coeffs.len() - 1;
        let mut cols = Vec::with_capacity(m);
        for k in 0..m {
            let mut e = field.zero();
            e.c[k] = 1;
            // powers e^(p^j), j = 0..n
            let mut pows = Vec::with_capacity(n + 1);
            pows.push(e.clone());
            for j in 1..=n {
                pows.push(pows[j - 1].frobenius(1));
            }
            let mut img = field.zero();
            for (i, c) in coeffs.iter().enumerate() {
                if !c.is_zero() {
                    img = img.add(&c.mul(&pows[n - i]));
                }
            }
            cols.push(img.c);
        }
        let solver = linalg::FpSolver::new(&linalg::transpose(&cols, m), field.p());
        Ok(AdditiveOperator { field, solver })
    }

    pub fn field(&self) -> &FqField {
        &self.field
    }

    /// Some x with L(x) = rhs, if one exists in this field.
    pub fn solve(&self, rhs: &FqElement) -> Option<FqElement> {
        let x = self.solver.solve(&rhs.c)?;
        Some(FqElement { field: self.field.clone(), c: x })
    }

    /// F_p-basis of the kernel.
    pub fn kernel(&self) -> Vec<FqElement> {
        self.solver
            .kernel()
            .into_iter()
            .map(|c| FqElement { field: self.field.clone(), c })
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.solver.rank()
    }
}

/// Result of an additive solve, recording the field actually used.
#[derive(Clone, Debug)]
pub struct AdditiveSolution {
    pub x: FqElement,
    pub field: FqField,
}

fn candidate_degrees(m: usize, policy: &ExtensionPolicy) -> Vec<usize> {
    (1..).map(|k| k * m).take_while(|&d| d <= policy.max_degree.max(m)).collect()
}

/// Solves sum_i c_i x^(p^(n-i)) = rhs in the smallest extension that has a
/// solution. Coefficients and right-hand side must share a field.
pub fn solve_additive(
    tower: &Tower,
    coeffs: &[FqElement],
    rhs: &FqElement,
    policy: &ExtensionPolicy,
) -> Result<AdditiveSolution> {
    let base = rhs.field().clone();
    for c in coeffs {
        base.check(c.field())?;
    }
    for d in candidate_degrees(base.degree(), policy) {
        let dst = tower.field(base.p(), d)?;
        let emb = tower.embedding(&base, &dst)?;
        let cs: Vec<FqElement> = coeffs.iter().map(|c| emb.apply(c)).collect();
        let op = AdditiveOperator::new(&cs)?;
        if let Some(x) = op.solve(&emb.apply(rhs)) {
            return Ok(AdditiveSolution { x, field: dst });
        }
    }
    Err(Error::ExtensionExhausted { max_degree: policy.max_degree, required: None })
}

/// A nonzero root of the additive polynomial in the smallest extension that has one.
pub fn additive_nonzero_root(
    tower: &Tower,
    coeffs: &[FqElement],
    policy: &ExtensionPolicy,
) -> Result<AdditiveSolution> {
    let base = coeffs
        .first()
        .ok_or_else(|| Error::Invalid("empty additive polynomial".into()))?
        .field()
        .clone();
    if coeffs.iter().all(|c| c.is_zero()) {
        return Ok(AdditiveSolution { x: base.one(), field: base });
    }
    for d in candidate_degrees(base.degree(), policy) {
        let dst = tower.field(base.p(), d)?;
        let emb = tower.embedding(&base, &dst)?;
        let cs: Vec<FqElement> = coeffs.iter().map(|c| emb.apply(c)).collect();
        let op = AdditiveOperator::new(&cs)?;
        if let Some(x) = op.kernel().into_iter().next() {
            return Ok(AdditiveSolution { x, field: dst });
        }
    }
    Err(Error::ExtensionExhausted { max_degree: policy.max_degree, required: None })
}

#[cfg(test)]
mod tests;
