//! Dense matrices over W_n(F_q): Smith normal form over the chain ring,
//! division-free characteristic polynomials, rank of the reduction mod p.

use std::fmt;

use crate::error::{Error, Result};
use crate::fields::FqElement;
use crate::witt::{WittElement, WittEmbedding, WittRing};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    ring: WittRing,
    rows: usize,
    cols: usize,
    data: Vec<WittElement>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} over {:?}", self.rows, self.cols, self.ring)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

/// Smith form U A V = D with U, V invertible.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: Matrix,
    pub d: Matrix,
    pub v: Matrix,
    /// Valuations of the diagonal; `None` where the entry is zero mod p^n.
    pub valuations: Vec<Option<u32>>,
}

impl Matrix {
    pub fn zeros(ring: &WittRing, rows: usize, cols: usize) -> Self {
        Matrix { ring: ring.clone(), rows, cols, data: vec![ring.zero(); rows * cols] }
    }
    pub fn identity(ring: &WittRing, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }
    pub fn scalar(ring: &WittRing, n: usize, s: &WittElement) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, s.clone());
        }
        m
    }
    pub fn from_rows(ring: &WittRing, rows: Vec<Vec<WittElement>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Invalid("ragged matrix".into()));
        }
        let data: Vec<WittElement> = rows.into_iter().flatten().collect();
        if data.iter().any(|e| e.ring() != ring) {
            return Err(Error::RingMismatch("matrix entries over different rings".into()));
        }
        Ok(Matrix { ring: ring.clone(), rows: r, cols: c, data })
    }
    pub fn from_ints(ring: &WittRing, rows: &[Vec<i64>]) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&a| ring.from_int(a)).collect()).collect();
        Self::from_rows(ring, rows).expect("rectangular")
    }

    pub fn ring(&self) -> &WittRing {
        &self.ring
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn get(&self, r: usize, c: usize) -> &WittElement {
        &self.data[r * self.cols + c]
    }
    pub fn set(&mut self, r: usize, c: usize, v: WittElement) {
        self.data[r * self.cols + c] = v;
    }
    pub fn row(&self, r: usize) -> Vec<WittElement> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }
    pub fn col(&self, c: usize) -> Vec<WittElement> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }
    pub fn to_rows(&self) -> Vec<Vec<WittElement>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    fn map(&self, f: impl Fn(&WittElement) -> WittElement) -> Self {
        Matrix { ring: self.ring.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect();
        Matrix { data, ..self.clone() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect();
        Matrix { data, ..self.clone() }
    }
    pub fn neg(&self) -> Self {
        self.map(|a| a.neg())
    }
    pub fn scale(&self, s: &WittElement) -> Self {
        self.map(|a| a.mul(s))
    }
    pub fn mul_p_pow(&self, k: u32) -> Self {
        self.map(|a| a.mul_p_pow(k))
    }
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = Self::zeros(&self.ring, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j).add(&a.mul(b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }
    pub fn mul_vec(&self, v: &[WittElement]) -> Vec<WittElement> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(self.ring.zero(), |acc, j| acc.add(&self.get(i, j).mul(&v[j]))))
            .collect()
    }
    /// Entrywise sigma^k.
    pub fn sigma(&self, k: i64) -> Self {
        self.map(|a| a.sigma(k))
    }
    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }
    pub fn block_diag(&self, o: &Self) -> Self {
        let mut out = Self::zeros(&self.ring, self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                out.set(self.rows + i, self.cols + j, o.get(i, j).clone());
            }
        }
        out
    }
    pub fn hstack(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows);
        let mut out = Self::zeros(&self.ring, self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..o.cols {
                out.set(i, self.cols + j, o.get(i, j).clone());
            }
        }
        out
    }
    pub fn reduce_to(&self, lower: &WittRing) -> Result<Self> {
        let data = self.data.iter().map(|a| a.reduce_to(lower)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { ring: lower.clone(), rows: self.rows, cols: self.cols, data })
    }
    pub fn lift_to(&self, upper: &WittRing) -> Result<Self> {
        let data = self.data.iter().map(|a| a.lift_to(upper)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { ring: upper.clone(), rows: self.rows, cols: self.cols, data })
    }
    pub fn embed(&self, e: &WittEmbedding) -> Self {
        Matrix { ring: e.dst.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| e.apply(a)).collect() }
    }
    /// Minimum valuation of the entries.
    pub fn valuation(&self) -> Option<u32> {
        self.data.iter().filter_map(|a| a.valuation()).min()
    }

    /// Reduction mod p as rows of field elements.
    pub fn residue(&self) -> Vec<Vec<FqElement>> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| self.get(r, c).residue()).collect()).collect()
    }
    /// Rank of the reduction mod p over F_q.
    pub fn residue_rank(&self) -> usize {
        fq_rank(self.residue())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
    /// row_t -= f * row_s
    fn row_op(&mut self, t: usize, s: usize, f: &WittElement) {
        for j in 0..self.cols {
            let v = self.get(t, j).sub(&f.mul(self.get(s, j)));
            self.set(t, j, v);
        }
    }
    /// col_t -= f * col_s
    fn col_op(&mut self, t: usize, s: usize, f: &WittElement) {
        for i in 0..self.rows {
            let v = self.get(i, t).sub(&f.mul(self.get(i, s)));
            self.set(i, t, v);
        }
    }

    /// Smith normal form by minimum-valuation pivoting.
    pub fn snf(&self) -> Snf {
        let mut a = self.clone();
        let mut u = Self::identity(&self.ring, self.rows);
        let mut v = Self::identity(&self.ring, self.cols);
        let k_max = self.rows.min(self.cols);
        let mut vals = Vec::with_capacity(k_max);
        for k in 0..k_max {
            let mut best: Option<(u32, usize, usize)> = None;
            for i in k..a.rows {
                for j in k..a.cols {
                    if let Some(val) = a.get(i, j).valuation() {
                        if best.is_none_or(|b| val < b.0) {
                            best = Some((val, i, j));
                        }
                    }
                }
            }
            let Some((val, pi, pj)) = best else {
                vals.extend(std::iter::repeat_n(None, k_max - k));
                break;
            };
            a.swap_rows(k, pi);
            u.swap_rows(k, pi);
            a.swap_cols(k, pj);
            v.swap_cols(k, pj);
            let unit_inv = a.get(k, k).shift_down(val).expect("valuation").inv().expect("unit part");
            for i in k + 1..a.rows {
                if a.get(i, k).is_zero() {
                    continue;
                }
                let f = a.get(i, k).shift_down(val).expect("min valuation").mul(&unit_inv);
                a.row_op(i, k, &f);
                u.row_op(i, k, &f);
            }
            for j in k + 1..a.cols {
                if a.get(k, j).is_zero() {
                    continue;
                }
                let f = a.get(k, j).shift_down(val).expect("min valuation").mul(&unit_inv);
                a.col_op(j, k, &f);
                v.col_op(j, k, &f);
            }
            vals.push(Some(val));
        }
        Snf { u, d: a, v, valuations: vals }
    }

    /// Inverse of a matrix with unit determinant.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Invalid("inverse of a non-square matrix".into()));
        }
        let s = self.snf();
        let mut dinv = Self::zeros(&self.ring, self.rows, self.cols);
        for i in 0..self.rows {
            if s.valuations[i] != Some(0) {
                return Err(Error::Invalid("matrix is not invertible".into()));
            }
            dinv.set(i, i, s.d.get(i, i).inv().unwrap());
        }
        Ok(s.v.mul(&dinv).mul(&s.u))
    }

    /// Characteristic polynomial det(xI - A) by Berkowitz; coefficients from
    /// the leading 1 down to the constant term.
    pub fn charpoly(&self) -> Vec<WittElement> {
        assert!(self.is_square());
        let n = self.rows;
        let ring = &self.ring;
        let mut c = vec![ring.one()];
        for r in 0..n {
            // leading r x r block M, row R, column S, corner a
            let a = self.get(r, r).clone();
            let mut t = vec![ring.one(), a.neg()];
            // vectors M^k S
            let mut w: Vec<WittElement> = (0..r).map(|i| self.get(i, r).clone()).collect();
            for _ in 0..r {
                let rs = (0..r).fold(ring.zero(), |acc, j| acc.add(&self.get(r, j).mul(&w[j])));
                t.push(rs.neg());
                w = (0..r)
                    .map(|i| (0..r).fold(ring.zero(), |acc, j| acc.add(&self.get(i, j).mul(&w[j]))))
                    .collect();
            }
            // new c = T c with T lower-triangular Toeplitz of size (r+2) x (r+1)
            let mut nc = vec![ring.zero(); r + 2];
            for (i, nci) in nc.iter_mut().enumerate() {
                for (j, cj) in c.iter().enumerate() {
                    if i >= j {
                        *nci = nci.add(&t[i - j].mul(cj));
                    }
                }
            }
            c = nc;
        }
        c
    }

    pub fn det(&self) -> WittElement {
        let c = self.charpoly();
        let last = c.last().unwrap().clone();
        if self.rows % 2 == 0 {
            last
        } else {
            last.neg()
        }
    }
}

/// Rank over F_q by Gaussian elimination.
pub fn fq_rank(mut rows: Vec<Vec<FqElement>>) -> usize {
    let nr = rows.len();
    if nr == 0 {
        return 0;
    }
    let nc = rows[0].len();
    let mut rank = 0;
    for c in 0..nc {
        let Some(piv) = (rank..nr).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(rank, piv);
        let inv = rows[rank][c].inv().unwrap();
        for i in rank + 1..nr {
            if !rows[i][c].is_zero() {
                let f = rows[i][c].mul(&inv);
                for j in c..nc {
                    let v = rows[i][j].sub(&f.mul(&rows[rank][j]));
                    rows[i][j] = v;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::fields::make_field;
    use crate::witt::seeded_rng;

    fn ring(p: u64, m: usize, n: u32) -> WittRing {
        WittRing::new(&make_field(p, m).unwrap(), n).unwrap()
    }

    fn random(r: &WittRing, k: usize, seed: u64) -> Matrix {
        let mut rng = seeded_rng(seed);
        let rows = (0..k).map(|_| (0..k).map(|_| r.random(&mut rng)).collect()).collect();
        Matrix::from_rows(r, rows).unwrap()
    }

    #[test]
    fn snf_of_jordan_block() {
        let r = ring(3, 1, 6);
        let a = Matrix::from_ints(&r, &[vec![3, 1], vec![0, 3]]);
        let s = a.snf();
        assert_eq!(s.valuations, vec![Some(0), Some(2)]);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
    }

    #[test]
    fn charpoly_small() {
        let r = ring(5, 1, 4);
        let a = Matrix::from_ints(&r, &[vec![0, 5], vec![1, 0]]);
        assert_eq!(a.charpoly(), vec![r.one(), r.zero(), r.from_int(-5)]);
        assert_eq!(a.det(), r.from_int(-5));
    }

    proptest! {
        #[test]
        fn snf_transforms_are_consistent(seed in any::<u64>(), k in 1usize..5) {
            let r = ring(2, 2, 6);
            let a = random(&r, k, seed);
            let s = a.snf();
            prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
            prop_assert!(s.u.inverse().is_ok());
            prop_assert!(s.v.inverse().is_ok());
            for i in 0..k {
                for j in 0..k {
                    if i != j {
                        prop_assert!(s.d.get(i, j).is_zero());
                    }
                }
            }
        }

        #[test]
        fn cayley_hamilton(seed in any::<u64>(), k in 1usize..5) {
            let r = ring(3, 2, 4);
            let a = random(&r, k, seed);
            let c = a.charpoly();
            let mut acc = Matrix::zeros(&r, k, k);
            for ci in &c {
                acc = acc.mul(&a).add(&Matrix::scalar(&r, k, ci));
            }
            prop_assert!(acc.is_zero());
        }

        #[test]
        fn det_is_multiplicative(seed in any::<u64>()) {
            let r = ring(5, 1, 3);
            let a = random(&r, 3, seed);
            let b = random(&r, 3, seed.wrapping_add(1));
            prop_assert_eq!(a.mul(&b).det(), a.det().mul(&b.det()));
        }
    }
}
