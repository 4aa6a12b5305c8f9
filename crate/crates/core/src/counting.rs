//! Supersingular elliptic curves over F_{p^2}: census by j-invariant, Deuring
//! mass, and two closed formulas for the class number.
//!
//! Supersingularity is decided twice for every curve: by a Hasse-type
//! invariant and by the trace of Frobenius over F_{p^2} (p divides the trace).
//! For p >= 5 one curve per j is used; for p = 2, 3 all curves of a
//! Weierstrass family over F_{p^2} are enumerated and grouped by j.

use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::fields::{FqElement, FqField, Tower};
use crate::modp::is_prime;

type Q = Ratio<i64>;

/// General Weierstrass coefficients [a1, a2, a3, a4, a6].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weierstrass(pub [FqElement; 5]);

impl Weierstrass {
    fn field(&self) -> &FqField {
        self.0[0].field()
    }

    /// (b2, b4, b6, b8).
    fn b_invariants(&self) -> [FqElement; 4] {
        let f = self.field();
        let [a1, a2, a3, a4, a6] = &self.0;
        let c = |k: i64| f.from_int(k);
        let b2 = a1.mul(a1).add(&c(4).mul(a2));
        let b4 = c(2).mul(a4).add(&a1.mul(a3));
        let b6 = a3.mul(a3).add(&c(4).mul(a6));
        let b8 = a1
            .mul(a1)
            .mul(a6)
            .add(&c(4).mul(a2).mul(a6))
            .sub(&a1.mul(a3).mul(a4))
            .add(&a2.mul(a3).mul(a3))
            .sub(&a4.mul(a4));
        [b2, b4, b6, b8]
    }

    pub fn discriminant(&self) -> FqElement {
        let f = self.field();
        let [b2, b4, b6, b8] = self.b_invariants();
        let c = |k: i64| f.from_int(k);
        b2.mul(&b2)
            .mul(&b8)
            .neg()
            .sub(&c(8).mul(&b4).mul(&b4).mul(&b4))
            .sub(&c(27).mul(&b6).mul(&b6))
            .add(&c(9).mul(&b2).mul(&b4).mul(&b6))
    }

    /// j = c4^3 / discriminant; `None` for singular curves.
    pub fn j_invariant(&self) -> Option<FqElement> {
        let f = self.field();
        let [b2, b4, ..] = self.b_invariants();
        let c4 = b2.mul(&b2).sub(&f.from_int(24).mul(&b4));
        c4.mul(&c4).mul(&c4).div(&self.discriminant())
    }

    fn lhs_rhs(&self, x: &FqElement, y: &FqElement) -> bool {
        let [a1, a2, a3, a4, a6] = &self.0;
        let lhs = y.mul(y).add(&a1.mul(x).mul(y)).add(&a3.mul(y));
        let rhs = x.mul(x).mul(x).add(&a2.mul(x).mul(x)).add(&a4.mul(x)).add(a6);
        lhs == rhs
    }

    /// Number of points over the coefficient field, by exhaustion.
    pub fn point_count(&self) -> u128 {
        let elems: Vec<FqElement> = self.field().elements().collect();
        let mut n = 1u128;
        for x in &elems {
            for y in &elems {
                if self.lhs_rhs(x, y) {
                    n += 1;
                }
            }
        }
        n
    }

    /// Coordinate changes (u, r, s, t) over the coefficient field fixing the equation.
    pub fn automorphisms(&self) -> usize {
        let f = self.field();
        let elems: Vec<FqElement> = f.elements().collect();
        let [a1, a2, a3, a4, a6] = &self.0;
        let c = |k: i64| f.from_int(k);
        let mut count = 0;
        for u in elems.iter().filter(|u| !u.is_zero()) {
            let u2 = u.mul(u);
            let (u3, u4) = (u2.mul(u), u2.mul(&u2));
            let u6 = u4.mul(&u2);
            for s in &elems {
                // u a1' = a1 + 2s
                if u.mul(a1) != a1.add(&c(2).mul(s)) {
                    continue;
                }
                for r in &elems {
                    if u2.mul(a2) != a2.sub(&s.mul(a1)).add(&c(3).mul(r)).sub(&s.mul(s)) {
                        continue;
                    }
                    for t in &elems {
                        let ok3 = u3.mul(a3) == a3.add(&r.mul(a1)).add(&c(2).mul(t));
                        let ok4 = u4.mul(a4)
                            == a4
                                .sub(&s.mul(a3))
                                .add(&c(2).mul(r).mul(a2))
                                .sub(&t.add(&r.mul(s)).mul(a1))
                                .add(&c(3).mul(r).mul(r))
                                .sub(&c(2).mul(s).mul(t));
                        let ok6 = u6.mul(a6)
                            == a6
                                .add(&r.mul(a4))
                                .add(&r.mul(r).mul(a2))
                                .add(&r.mul(r).mul(r))
                                .sub(&t.mul(a3))
                                .sub(&t.mul(t))
                                .sub(&r.mul(t).mul(a1));
                        if ok3 && ok4 && ok6 {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }
}

/// The two supersingularity verdicts for one j-invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JVerdict {
    pub j: FqElement,
    pub hasse: bool,
    pub trace: bool,
}

#[derive(Clone, Debug)]
pub struct SupersingularCensus {
    pub p: u64,
    /// Supersingular j-invariants in F_{p^2}, by element index.
    pub j_invariants: Vec<FqElement>,
    /// |Aut| of each listed j over F_{p^2}.
    pub automorphisms: Vec<usize>,
    pub count: usize,
    pub mass: Q,
    /// Every j where the two criteria disagree (empty when they agree).
    pub disagreements: Vec<JVerdict>,
}

/// Coefficient of x^(p-1) in f^((p-1)/2) for y^2 = x^3 + A x + B.
fn hasse_coefficient(a: &FqElement, b: &FqElement, p: u64) -> FqElement {
    let f = a.field();
    let cubic = [b.clone(), a.clone(), f.zero(), f.one()];
    let mut acc = vec![f.one()];
    for _ in 0..(p - 1) / 2 {
        let mut next = vec![f.zero(); acc.len() + 3];
        for (i, x) in acc.iter().enumerate() {
            for (k, c) in cubic.iter().enumerate() {
                next[i + k] = next[i + k].add(&x.mul(c));
            }
        }
        acc = next;
    }
    acc[(p - 1) as usize].clone()
}

/// Short model with the given j (p >= 5).
fn short_model(j: &FqElement) -> (FqElement, FqElement) {
    let f = j.field();
    let j1728 = f.from_int(1728);
    if j.is_zero() {
        (f.zero(), f.one())
    } else if *j == j1728 {
        (f.one(), f.zero())
    } else {
        // j(x^3 + 3k x + 2k) = 1728 k / (k + 1)
        let k = j.div(&j1728.sub(j)).unwrap();
        (f.from_int(3).mul(&k), f.from_int(2).mul(&k))
    }
}

fn census_large(field: &FqField, p: u64) -> (Vec<(FqElement, usize)>, Vec<JVerdict>) {
    let q = field.order();
    let elems: Vec<FqElement> = field.elements().collect();
    let mut square = vec![false; q as usize];
    for x in &elems {
        square[x.mul(x).index() as usize] = true;
    }
    let cubes: Vec<FqElement> = elems.iter().map(|x| x.mul(x).mul(x)).collect();
    let mut found = Vec::new();
    let mut disagreements = Vec::new();
    for j in &elems {
        let (a, b) = short_model(j);
        let hasse = hasse_coefficient(&a, &b, p).is_zero();
        // #E = q + 1 + sum_x chi(f(x))
        let mut sum: i128 = 0;
        for (x, x3) in elems.iter().zip(&cubes) {
            let v = x3.add(&a.mul(x)).add(&b);
            if !v.is_zero() {
                sum += if square[v.index() as usize] { 1 } else { -1 };
            }
        }
        let trace = -sum;
        let by_trace = trace.rem_euclid(p as i128) == 0;
        if hasse != by_trace {
            disagreements.push(JVerdict { j: j.clone(), hasse, trace: by_trace });
        }
        if hasse && by_trace {
            // u^4 A = A and u^6 B = B
            let aut = elems
                .iter()
                .filter(|u| !u.is_zero())
                .filter(|u| u.pow(4).mul(&a) == a && u.pow(6).mul(&b) == b)
                .count();
            found.push((j.clone(), aut));
        }
    }
    (found, disagreements)
}

fn census_small(field: &FqField, p: u64) -> (Vec<(FqElement, usize)>, Vec<JVerdict>) {
    let elems: Vec<FqElement> = field.elements().collect();
    let zero = field.zero();
    let q = field.order();
    // p = 2: all general forms; p = 3: y^2 = x^3 + a2 x^2 + a4 x + a6
    let curves: Vec<Weierstrass> = if p == 2 {
        let mut v = Vec::new();
        for idx in 0..q.pow(5) {
            let c: Vec<FqElement> = (0..5).map(|k| field.element_from_index((idx / q.pow(k)) % q)).collect();
            v.push(Weierstrass([c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone(), c[4].clone()]));
        }
        v
    } else {
        let mut v = Vec::new();
        for a2 in &elems {
            for a4 in &elems {
                for a6 in &elems {
                    v.push(Weierstrass([zero.clone(), a2.clone(), zero.clone(), a4.clone(), a6.clone()]));
                }
            }
        }
        v
    };
    let mut by_j: BTreeMap<u128, (FqElement, Vec<bool>, Vec<bool>, usize)> = BTreeMap::new();
    for e in curves {
        let Some(j) = e.j_invariant() else { continue };
        // Hasse invariant: a1 in characteristic 2, b2 in characteristic 3
        let hasse = if p == 2 { e.0[0].is_zero() } else { e.b_invariants()[0].is_zero() };
        let trace = (q as i128 + 1 - e.point_count() as i128).rem_euclid(p as i128) == 0;
        let entry = by_j.entry(j.index()).or_insert_with(|| (j.clone(), Vec::new(), Vec::new(), 0));
        entry.1.push(hasse);
        entry.2.push(trace);
        if hasse && trace {
            entry.3 = entry.3.max(e.automorphisms());
        }
    }
    let mut found = Vec::new();
    let mut disagreements = Vec::new();
    for (_, (j, hasse, trace, aut)) in by_j {
        let h = hasse.iter().all(|&x| x);
        let t = trace.iter().all(|&x| x);
        let consistent = hasse.iter().all(|&x| x == h) && trace.iter().all(|&x| x == t);
        if !consistent || h != t {
            disagreements.push(JVerdict { j: j.clone(), hasse: h, trace: t });
        }
        if h && t {
            found.push((j, aut));
        }
    }
    (found, disagreements)
}

/// All supersingular j in F_{p^2}, 2 <= p <= 101.
pub fn enumerate_supersingular(tower: &Tower, p: u64) -> Result<SupersingularCensus> {
    if !(2..=101).contains(&p) || !is_prime(p) {
        return Err(Error::OutOfRange(format!("census needs a prime 2 <= p <= 101, got {p}")));
    }
    let field = tower.field(p, 2)?;
    let (found, disagreements) = if p < 5 { census_small(&field, p) } else { census_large(&field, p) };
    let mass = found.iter().map(|(_, a)| Q::new(1, *a as i64)).sum();
    let (j_invariants, automorphisms): (Vec<_>, Vec<_>) = found.into_iter().unzip();
    Ok(SupersingularCensus { p, count: j_invariants.len(), j_invariants, automorphisms, mass, disagreements })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassReport {
    pub mass: Q,
    pub expected: Q,
    pub holds: bool,
}

/// Sum of 1/|Aut| against (p - 1)/24.
pub fn mass_check(census: &SupersingularCensus) -> MassReport {
    let expected = Q::new(census.p as i64 - 1, 24);
    MassReport { mass: census.mass, expected, holds: census.mass == expected }
}

/// Legendre symbol (a/p) for odd p.
pub fn legendre(a: i64, p: u64) -> i64 {
    let zp = crate::modp::Zpn::new(p, 1).expect("prime");
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if zp.pow(r, (p - 1) / 2) == 1 {
        1
    } else {
        -1
    }
}

fn odd_prime(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::EvenPrime);
    }
    if !is_prime(p) {
        return Err(Error::Invalid(format!("{p} is not prime")));
    }
    Ok(())
}

/// (p-1)/2 + (1/3)(1 - (-3/p)) + (1/3)(1 - (-4/p)), evaluated as written.
pub fn eichler_formula_as_printed(p: u64) -> Result<Q> {
    odd_prime(p)?;
    Ok(Q::new(p as i64 - 1, 2) + Q::new(1 - legendre(-3, p), 3) + Q::new(1 - legendre(-4, p), 3))
}

/// (p-1)/12 + (1/4)(1 - (-4/p)) + (1/3)(1 - (-3/p)).
pub fn eichler_formula_classical(p: u64) -> Result<Q> {
    odd_prime(p)?;
    Ok(Q::new(p as i64 - 1, 12) + Q::new(1 - legendre(-4, p), 4) + Q::new(1 - legendre(-3, p), 3))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaComparison {
    pub p: u64,
    pub count: usize,
    pub printed: Option<Q>,
    pub classical: Option<Q>,
    pub printed_matches: bool,
    pub classical_matches: bool,
}

pub fn compare_formulas(census: &SupersingularCensus) -> FormulaComparison {
    let printed = eichler_formula_as_printed(census.p).ok();
    let classical = eichler_formula_classical(census.p).ok();
    let n = Q::from_integer(census.count as i64);
    FormulaComparison {
        p: census.p,
        count: census.count,
        printed,
        classical,
        printed_matches: printed == Some(n),
        classical_matches: classical == Some(n),
    }
}

#[cfg(test)]
mod tests;
