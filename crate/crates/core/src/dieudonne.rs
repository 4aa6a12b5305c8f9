//! Dieudonne modules and F-lattices given by Frobenius matrices.
//!
//! Convention: F(e_j) = sum_i A[i][j] e_i, extended sigma-semilinearly, so in
//! coordinates F(c) = A sigma(c). The V-matrix B satisfies A sigma(B) = p.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::fields::{FqField, Tower};
use crate::isocrystal::{slopes_by_matrix, SlopeSequence};
use crate::matrix::Matrix;
use crate::witt::WittRing;

/// A free W_n-module with an injective sigma-linear endomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FLattice {
    a: Matrix,
}

impl FLattice {
    pub fn new(a: Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Invalid("Frobenius matrix must be square".into()));
        }
        let vals = a.snf().valuations;
        if vals.iter().any(|v| v.is_none()) {
            return Err(Error::InsufficientPrecision {
                required: a.ring().n() + 1,
                available: a.ring().n(),
            });
        }
        Ok(FLattice { a })
    }
    pub fn ring(&self) -> &WittRing {
        self.a.ring()
    }
    pub fn rank(&self) -> usize {
        self.a.rows()
    }
    pub fn matrix(&self) -> &Matrix {
        &self.a
    }
    /// Valuations of the elementary divisors of A (the Hodge slopes).
    pub fn hodge_valuations(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.a.snf().valuations.into_iter().map(|x| x.unwrap()).collect();
        v.sort_unstable();
        v
    }
    /// Matrix of F^k acting on coordinates: A sigma(A) ... sigma^(k-1)(A).
    pub fn frobenius_power(&self, k: usize) -> Matrix {
        let mut acc = Matrix::identity(self.ring(), self.rank());
        for i in 0..k {
            acc = acc.mul(&self.a.sigma(i as i64));
        }
        acc
    }
    pub fn as_dieudonne(&self) -> Result<DieudonneModule> {
        DieudonneModule::new(self.a.clone())
    }
}

/// A Dieudonne module: an F-lattice with pM contained in FM.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DieudonneModule {
    a: Matrix,
    /// V-matrix, valid modulo p^(n-1) when some elementary divisor of A is p.
    b: Matrix,
}

/// Elementary-divisor structure of A.
fn check_dieudonne(a: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Invalid("Frobenius matrix must be square".into()));
    }
    if a.ring().n() < 2 {
        return Err(Error::InsufficientPrecision { required: 2, available: a.ring().n() });
    }
    for v in a.snf().valuations {
        match v {
            Some(0) | Some(1) => {}
            Some(k) => return Err(Error::NotDieudonne(format!("elementary divisor p^{k}"))),
            None => {
                return Err(Error::NotDieudonne(format!(
                    "elementary divisor divisible by p^{}",
                    a.ring().n()
                )))
            }
        }
    }
    Ok(())
}

/// V-matrix sigma^{-1}(p A^{-1}) via the Smith form of A.
fn v_matrix(a: &Matrix) -> Result<Matrix> {
    let ring = a.ring();
    let s = a.snf();
    let h = a.rows();
    let all_units = s.valuations.iter().all(|v| *v == Some(0));
    let target = if all_units { ring.clone() } else { ring.truncate(ring.n() - 1)? };
    let mut pd = Matrix::zeros(ring, h, h);
    for i in 0..h {
        let d = s.d.get(i, i);
        let e = match s.valuations[i] {
            Some(0) => d.inv().unwrap().mul_p_pow(1),
            Some(1) => d.shift_down(1)?.inv().ok_or_else(|| Error::Internal("unit part".into()))?,
            _ => return Err(Error::NotDieudonne("V is not integral".into())),
        };
        pd.set(i, i, e);
    }
    let pa_inv = s.v.mul(&pd).mul(&s.u);
    pa_inv.reduce_to(&target).map(|m| m.sigma(-1))
}

impl DieudonneModule {
    pub fn new(a: Matrix) -> Result<Self> {
        check_dieudonne(&a)?;
        let b = v_matrix(&a)?;
        Ok(DieudonneModule { a, b })
    }
    pub fn ring(&self) -> &WittRing {
        self.a.ring()
    }
    pub fn rank(&self) -> usize {
        self.a.rows()
    }
    /// F-matrix.
    pub fn f_matrix(&self) -> &Matrix {
        &self.a
    }
    /// V-matrix (possibly at precision n - 1).
    pub fn v_matrix(&self) -> &Matrix {
        &self.b
    }
    pub fn lattice(&self) -> FLattice {
        FLattice { a: self.a.clone() }
    }

    /// dim_k M/FM.
    pub fn dim_mod_f(&self) -> usize {
        self.a.snf().valuations.iter().filter(|v| **v == Some(1)).count()
    }
    /// dim_k M/VM.
    pub fn dim_mod_v(&self) -> usize {
        let s = self.b.snf();
        s.valuations.iter().filter(|v| **v != Some(0)).count()
    }

    /// Basis change e' = e U; the new F-matrix is U^{-1} A sigma(U).
    pub fn change_basis(&self, u: &Matrix) -> Result<Self> {
        let ui = u.inverse()?;
        DieudonneModule::new(ui.mul(&self.a).mul(&u.sigma(1)))
    }

    pub fn slopes(&self) -> Result<SlopeSequence> {
        slopes_by_matrix(&self.lattice())
    }
}

/// The standard modules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StdKind {
    /// Ordinary rank 2: F e1 = e1, F e2 = p e2.
    M1,
    /// Supersingular rank 2: F e1 = e2, F e2 = p e1.
    M2,
    /// W[F,V]/(F^a - V^b), rank a + b, slope b/(a+b).
    Mab(u32, u32),
    /// The pure module of slope s/r.
    Lambda(Ratio<i64>),
}

/// Either a Dieudonne module or, for slopes above 1, only an F-lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StdModule {
    Dieudonne(DieudonneModule),
    Lattice(FLattice),
}

impl StdModule {
    pub fn lattice(&self) -> FLattice {
        match self {
            StdModule::Dieudonne(m) => m.lattice(),
            StdModule::Lattice(l) => l.clone(),
        }
    }
    pub fn dieudonne(self) -> Option<DieudonneModule> {
        match self {
            StdModule::Dieudonne(m) => Some(m),
            StdModule::Lattice(_) => None,
        }
    }
}

/// Cyclic presentation of slope s/r on e_0..e_{r-1}:
/// F e_i = e_{i+s} for i + s < r, otherwise p^q e_{i+s-qr}.
pub fn pure_slope_matrix(ring: &WittRing, s: u64, r: u64) -> Matrix {
    let r = r as usize;
    let mut a = Matrix::zeros(ring, r, r);
    for i in 0..r {
        let t = i + s as usize;
        let (q, j) = (t / r, t % r);
        a.set(j, i, ring.p_power(q as u32));
    }
    a
}

pub fn std_module(kind: StdKind, ring: &WittRing) -> Result<StdModule> {
    let (s, r) = match kind {
        StdKind::M1 => {
            let a = Matrix::from_ints(ring, &[vec![1, 0], vec![0, ring.p() as i64]]);
            return Ok(StdModule::Dieudonne(DieudonneModule::new(a)?));
        }
        StdKind::M2 => {
            let a = Matrix::from_ints(ring, &[vec![0, ring.p() as i64], vec![1, 0]]);
            return Ok(StdModule::Dieudonne(DieudonneModule::new(a)?));
        }
        StdKind::Mab(a, b) => {
            if (a, b) == (0, 0) || num_integer::gcd(a, b) != 1 {
                return Err(Error::InvalidSlopeData(format!("({a},{b}) needs gcd 1 and not both zero")));
            }
            (b as i64, (a + b) as i64)
        }
        StdKind::Lambda(l) => {
            if *l.numer() < 0 {
                return Err(Error::InvalidSlopeData(format!("negative slope {l}")));
            }
            (*l.numer(), *l.denom())
        }
    };
    let a = pure_slope_matrix(ring, s as u64, r as u64);
    if s <= r {
        Ok(StdModule::Dieudonne(DieudonneModule::new(a)?))
    } else {
        Ok(StdModule::Lattice(FLattice::new(a)?))
    }
}

/// a(M) = dim_k M/(F, V)M.
pub fn a_number(m: &DieudonneModule) -> usize {
    let mut rows = m.a.residue();
    for (row, extra) in rows.iter_mut().zip(m.b.residue()) {
        row.extend(extra);
    }
    m.rank() - crate::matrix::fq_rank(rows)
}

/// The dual module, with F-matrix sigma(B^T).
pub fn dual(m: &DieudonneModule) -> Result<DieudonneModule> {
    DieudonneModule::new(m.b.transpose().sigma(1))
}

pub fn direct_sum(m: &DieudonneModule, n: &DieudonneModule) -> Result<DieudonneModule> {
    if m.ring() != n.ring() {
        return Err(Error::RingMismatch(format!("{:?} vs {:?}", m.ring(), n.ring())));
    }
    DieudonneModule::new(m.a.block_diag(&n.a))
}

/// Scalar extension along the tower embedding into `target`.
pub fn base_change(tower: &Tower, m: &DieudonneModule, target: &FqField) -> Result<DieudonneModule> {
    let src = m.ring();
    if target.p() != src.p() || target.degree() % src.degree() != 0 {
        return Err(Error::NoEmbedding(format!("{:?} -> {:?}", src.field(), target)));
    }
    let dst = tower.witt_ring(target.p(), target.degree(), src.n())?;
    if dst.field() != target {
        return Err(Error::NoEmbedding("target is not the tower field of its degree".into()));
    }
    let e = tower.witt_embedding(src, &dst)?;
    DieudonneModule::new(m.a.embed(&e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rank2Class {
    OrdinaryM1,
    SupersingularM2,
}

/// Rank-2 classification: ordinary iff F(M/pM) and V(M/pM) differ.
pub fn classify_rank2(m: &DieudonneModule) -> Result<Rank2Class> {
    if m.rank() != 2 {
        return Err(Error::NotRankTwo(m.rank()));
    }
    if m.dim_mod_f() != 1 || m.dim_mod_v() != 1 {
        return Err(Error::NotEllipticShape(format!(
            "dim M/FM = {}, dim M/VM = {}",
            m.dim_mod_f(),
            m.dim_mod_v()
        )));
    }
    Ok(if a_number(m) == 0 { Rank2Class::OrdinaryM1 } else { Rank2Class::SupersingularM2 })
}

/// a(M) = h/2 with all slopes 1/2.
pub fn is_superspecial(m: &DieudonneModule) -> Result<bool> {
    let h = m.rank();
    if h % 2 != 0 || a_number(m) != h / 2 {
        return Ok(false);
    }
    let s = m.slopes()?;
    Ok(s.entries.iter().all(|(l, _)| *l == Ratio::new(1, 2)))
}
