//! First-order deformations of a Dieudonne module in Norman's presentation.
//!
//! A deformation over R = k[t_1..t_N]/(t)^2 is given by the relations
//!
//!   F e_i = sum_j a_ij (e_j + sum_k d_jk e_k)          (i <= g)
//!   e_i   = V(sum_j a_ij (e_j + sum_k d_jk e_k))       (i > g)
//!
//! with d_jk the Teichmuller lift of a linear form in the t's (nonzero only
//! for j > g, k <= g). Since every product of two t's vanishes, the Witt
//! components of [eps] beyond the first are zero and W(R) splits as
//! W(k) plus a k-linear part:
//!   [eps x] + [eps y] = [eps (x + y)],   w [eps x] = [eps w_0 x].
//! `FirstOrder` stores an element of W(R) in exactly that split form.

use crate::dieudonne::DieudonneModule;
use crate::error::{Error, Result};
use crate::fields::{FqElement, FqField};
use crate::matrix::{fq_rank, Matrix};
use crate::witt::{WittElement, WittRing};

/// A k-linear combination of the coordinates t_1..t_N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    pub coeffs: Vec<FqElement>,
}

impl LinearForm {
    pub fn zero(field: &FqField, vars: usize) -> Self {
        LinearForm { coeffs: vec![field.zero(); vars] }
    }
    /// The coordinate t_index scaled by c.
    pub fn coordinate(field: &FqField, vars: usize, index: usize, c: &FqElement) -> Self {
        let mut f = Self::zero(field, vars);
        f.coeffs[index] = c.clone();
        f
    }
    pub fn vars(&self) -> usize {
        self.coeffs.len()
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    pub fn add(&self, o: &Self) -> Self {
        LinearForm { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect() }
    }
    pub fn scale(&self, c: &FqElement) -> Self {
        LinearForm { coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect() }
    }
}

/// w + [eps], with w in W_n(k) and eps a linear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstOrder {
    pub base: WittElement,
    pub eps: LinearForm,
}

impl FirstOrder {
    pub fn constant(base: WittElement, vars: usize) -> Self {
        let eps = LinearForm::zero(base.ring().field(), vars);
        FirstOrder { base, eps }
    }
    pub fn add(&self, o: &Self) -> Self {
        FirstOrder { base: self.base.add(&o.base), eps: self.eps.add(&o.eps) }
    }
    pub fn mul(&self, o: &Self) -> Self {
        let eps = self.eps.scale(&o.base.residue()).add(&o.eps.scale(&self.base.residue()));
        FirstOrder { base: self.base.mul(&o.base), eps }
    }
}

/// Base presentation: rows 0..g are F-relations, rows g..g+h are V-relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormanDatum {
    g: usize,
    h: usize,
    a: Matrix,
}

impl NormanDatum {
    pub fn new(g: usize, h: usize, a: Matrix) -> Result<Self> {
        if g == 0 || !a.is_square() || a.rows() != g + h {
            return Err(Error::DimensionMismatch(format!(
                "relation matrix is {}x{}, expected {}x{}",
                a.rows(),
                a.cols(),
                g + h,
                g + h
            )));
        }
        if a.residue_rank() != g + h {
            return Err(Error::Invalid("relation matrix is not invertible".into()));
        }
        Ok(NormanDatum { g, h, a })
    }

    /// F e_j = e_(g+j), e_(g+j) = V e_j: the matrix [[0, I], [I, 0]].
    pub fn superspecial(ring: &WittRing, g: usize) -> Self {
        let mut a = Matrix::zeros(ring, 2 * g, 2 * g);
        for j in 0..g {
            a.set(j, g + j, ring.one());
            a.set(g + j, j, ring.one());
        }
        NormanDatum { g, h: g, a }
    }

    pub fn ring(&self) -> &WittRing {
        self.a.ring()
    }
    pub fn g(&self) -> usize {
        self.g
    }
    pub fn h(&self) -> usize {
        self.h
    }
    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    fn is_superspecial_shape(&self) -> bool {
        self.h == self.g && *self == NormanDatum::superspecial(self.ring(), self.g)
    }

    /// The module over W(k): F e_i = sum_j a_ij e_j for i <= g and
    /// F e_i = F V (..) = p sum_j a_ij e_j for i > g.
    pub fn special_fiber(&self) -> Result<DieudonneModule> {
        let n = self.g + self.h;
        let mut f = Matrix::zeros(self.ring(), n, n);
        for i in 0..n {
            for j in 0..n {
                let c = self.a.get(i, j);
                let c = if i < self.g { c.clone() } else { c.mul_p_pow(1) };
                // column i holds the image of e_i
                f.set(j, i, c);
            }
        }
        DieudonneModule::new(f)
    }
}

/// The map d on VM_0/pM_0 -> m (x) M_0/VM_0: rows g+1..g+h, columns 1..g.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationMap {
    pub d_bar: Vec<Vec<LinearForm>>,
}

impl DeformationMap {
    pub fn zero(field: &FqField, g: usize, h: usize, vars: usize) -> Self {
        DeformationMap { d_bar: vec![vec![LinearForm::zero(field, vars); g]; h] }
    }

    /// Over the dual numbers k[t]/(t^2): d_ij = c_ij t.
    pub fn from_residues(field: &FqField, c: &[Vec<FqElement>]) -> Self {
        let d_bar = c.iter().map(|row| row.iter().map(|x| LinearForm::coordinate(field, 1, 0, x)).collect()).collect();
        DeformationMap { d_bar }
    }

    /// Universal first-order map for a superspecial base of dimension g,
    /// with coordinates t_ij numbered i g + j, arranged so that
    /// F e_j = e_(g+j) + sum_i T_ij e_i.
    pub fn universal(field: &FqField, g: usize) -> Self {
        let vars = g * g;
        let one = field.one();
        let d_bar = (0..g)
            .map(|j| (0..g).map(|i| LinearForm::coordinate(field, vars, i * g + j, &one)).collect())
            .collect();
        DeformationMap { d_bar }
    }

    pub fn vars(&self) -> usize {
        self.d_bar.first().and_then(|r| r.first()).map_or(0, |f| f.vars())
    }

    fn check(&self, base: &NormanDatum) -> Result<()> {
        let ok = self.d_bar.len() == base.h
            && self.d_bar.iter().all(|r| r.len() == base.g)
            && self.d_bar.iter().flatten().all(|f| f.vars() == self.vars() && f.coeffs.iter().all(|c| c.field() == base.ring().field()));
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!("deformation map must be {}x{} over the residue field", base.h, base.g)))
        }
    }
}

/// Relation coefficients over W(R): row i expresses F e_i (i <= g) or the
/// argument of V for e_i (i > g) in the generators e_1..e_(g+h).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformedRelations {
    pub g: usize,
    pub h: usize,
    pub rows: Vec<Vec<FirstOrder>>,
}

/// Norman's relations for the deformation d.
pub fn deform(base: &NormanDatum, d: &DeformationMap) -> Result<DeformedRelations> {
    d.check(base)?;
    let (g, h) = (base.g, base.h);
    let vars = d.vars();
    let field = base.ring().field();
    let mut rows = Vec::with_capacity(g + h);
    for i in 0..g + h {
        let mut row: Vec<FirstOrder> = (0..g + h).map(|j| FirstOrder::constant(base.a.get(i, j).clone(), vars)).collect();
        // sum_j a_ij sum_k d_jk e_k, only j > g contributes
        for (k, entry) in row.iter_mut().enumerate().take(g) {
            let mut eps = LinearForm::zero(field, vars);
            for jj in 0..h {
                eps = eps.add(&d.d_bar[jj][k].scale(&base.a.get(i, g + jj).residue()));
            }
            entry.eps = entry.eps.add(&eps);
        }
        rows.push(row);
    }
    Ok(DeformedRelations { g, h, rows })
}

/// Entry (i, j) is the coefficient of e_i in F(e_j) on M_R/VM_R: constant
/// part in k, linear part in the t's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentAction {
    pub constant: Vec<Vec<FqElement>>,
    pub linear: Vec<Vec<LinearForm>>,
}

impl TangentAction {
    pub fn is_zero(&self) -> bool {
        self.constant.iter().flatten().all(|c| c.is_zero()) && self.linear.iter().flatten().all(|f| f.is_zero())
    }

    /// Rank over k of the span of the linear parts; when the constant part
    /// vanishes this is the codimension of the locus where F kills M_R/VM_R.
    pub fn linear_rank(&self) -> usize {
        fq_rank(self.linear.iter().flatten().map(|f| f.coeffs.clone()).collect())
    }

    /// Whether the ideal generated by the entries is (t_1, .., t_N).
    pub fn cuts_out_origin(&self) -> bool {
        let vars = self.linear.first().and_then(|r| r.first()).map_or(0, |f| f.vars());
        self.constant.iter().flatten().all(|c| c.is_zero()) && self.linear_rank() == vars
    }
}

/// F on M_R/VM_R for a superspecial-shaped base. M_R/VM_R has basis
/// e_1..e_g; the coefficient of e_k in F e_j is read off relation row j.
pub fn tangent_frobenius(base: &NormanDatum, d: &DeformationMap) -> Result<TangentAction> {
    if !base.is_superspecial_shape() {
        return Err(Error::NotSuperspecialShape("expected F e_j = e_(g+j), e_(g+j) = V e_j".into()));
    }
    let rel = deform(base, d)?;
    let g = base.g;
    let mut constant = vec![vec![base.ring().field().zero(); g]; g];
    let mut linear = vec![vec![LinearForm::zero(base.ring().field(), d.vars()); g]; g];
    for j in 0..g {
        for k in 0..g {
            constant[k][j] = rel.rows[j][k].base.residue();
            linear[k][j] = rel.rows[j][k].eps.clone();
        }
    }
    Ok(TangentAction { constant, linear })
}

#[cfg(test)]
mod tests;
