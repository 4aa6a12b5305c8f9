//! Slopes of F-isocrystals: Newton polygons of twisted polynomials, the
//! characteristic-polynomial route on Frobenius matrices, the sigma-linear
//! solver, first-slope factorization and the slope decomposition.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;

use crate::dieudonne::FLattice;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::witt::{WittElement, WittRing};

pub mod factor;
pub mod harness;
pub mod solve;
pub mod twisted;

pub use factor::{
    block_factor, decompose, first_slope_factor, BlockFactor, DecomposeOptions, FactorStep, FirstSlopeFactor,
    IsocrystalDecomposition, WitnessBlock,
};
pub use solve::{sigma_linear_solve, SigmaSolution};
pub use twisted::TwistedPoly;

pub type Q = Ratio<i64>;

/// Slope multiset as sorted (slope, count) pairs.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SlopeSequence {
    pub entries: Vec<(Q, usize)>,
}

impl fmt::Debug for SlopeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(l, m)| format!("{l}x{m}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl SlopeSequence {
    pub fn from_multiset(mut slopes: Vec<Q>) -> Self {
        slopes.sort();
        let mut entries: Vec<(Q, usize)> = Vec::new();
        for s in slopes {
            match entries.last_mut() {
                Some((l, m)) if *l == s => *m += 1,
                _ => entries.push((s, 1)),
            }
        }
        SlopeSequence { entries }
    }
    pub fn multiset(&self) -> Vec<Q> {
        self.entries.iter().flat_map(|(l, m)| std::iter::repeat_n(*l, *m)).collect()
    }
    pub fn rank(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }
    /// The slopes 1 - lambda.
    pub fn complement(&self) -> Self {
        Self::from_multiset(self.multiset().into_iter().map(|l| Q::from_integer(1) - l).collect())
    }
    /// (slope, m_lambda) with the count divided by the denominator.
    pub fn isotypic(&self) -> Vec<(Q, usize)> {
        self.entries.iter().map(|(l, m)| (*l, m / *l.denom() as usize)).collect()
    }
}

/// A point of a Newton polygon: exact height, or only a lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Height {
    Exact(Q),
    AtLeast(Q),
}

/// Lower convex hull slopes of (i, h_i), i = 0..len-1. Lower-bound points must
/// lie on or above the hull of the exact points; the first and last points
/// must be exact.
pub fn newton_slopes(points: &[Height], precision: u32) -> Result<Vec<Q>> {
    let n = points.len() - 1;
    let (Height::Exact(_), Height::Exact(_)) = (points[0], points[n]) else {
        return Err(Error::InsufficientPrecision { required: precision + 1, available: precision });
    };
    let exact: Vec<(i64, Q)> = points
        .iter()
        .enumerate()
        .filter_map(|(i, h)| match h {
            Height::Exact(v) => Some((i as i64, *v)),
            _ => None,
        })
        .collect();
    let mut hull: Vec<(i64, Q)> = Vec::new();
    for &pt in &exact {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or above segment a -> pt
            let lhs = (b.1 - a.1) * Q::from_integer(pt.0 - a.0);
            let rhs = (pt.1 - a.1) * Q::from_integer(b.0 - a.0);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let hull_at = |x: i64| -> Q {
        let k = hull.iter().rposition(|h| h.0 <= x).unwrap();
        if hull[k].0 == x || k + 1 == hull.len() {
            return hull[k].1;
        }
        let (a, b) = (hull[k], hull[k + 1]);
        a.1 + (b.1 - a.1) * Q::new(x - a.0, b.0 - a.0)
    };
    for (i, h) in points.iter().enumerate() {
        if let Height::AtLeast(bound) = h {
            if *bound < hull_at(i as i64) {
                return Err(Error::InsufficientPrecision { required: precision + 1, available: precision });
            }
        }
    }
    let mut slopes = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let len = w[1].0 - w[0].0;
        let s = (w[1].1 - w[0].1) / Q::from_integer(len);
        slopes.extend(std::iter::repeat_n(s, len as usize));
    }
    Ok(slopes)
}

/// Newton slopes of a twisted polynomial (points (i, v_p(a_i))).
pub fn slopes_by_newton_polygon(p: &TwistedPoly) -> Result<SlopeSequence> {
    Ok(SlopeSequence::from_multiset(p.newton_slopes()?))
}

/// Slopes of an F-lattice from the characteristic polynomial of the linear map
/// F^m (m = residue degree), whose Newton polygon is m times the slope polygon.
pub fn slopes_by_matrix(m: &FLattice) -> Result<SlopeSequence> {
    let deg = m.ring().degree();
    let phi = m.frobenius_power(deg);
    let cp = phi.charpoly();
    let n = m.ring().n();
    let points: Vec<Height> = cp
        .iter()
        .map(|c| match c.valuation() {
            Some(v) => Height::Exact(Q::from_integer(v as i64)),
            None => Height::AtLeast(Q::from_integer(n as i64)),
        })
        .collect();
    let slopes = newton_slopes(&points, n)?;
    let scale = Q::from_integer(deg as i64);
    Ok(SlopeSequence::from_multiset(slopes.into_iter().map(|s| s / scale).collect()))
}

/// Hodge slopes (elementary divisor valuations of A) and Mazur's inequality:
/// the Hodge polygon lies on or below the Newton polygon with equal endpoints.
pub fn hodge_below_newton(m: &FLattice) -> Result<bool> {
    let hodge = m.hodge_valuations();
    let newton = slopes_by_matrix(m)?.multiset();
    let mut hsum = Q::from_integer(0);
    let mut nsum = Q::from_integer(0);
    for (h, l) in hodge.iter().zip(&newton) {
        hsum += Q::from_integer(*h as i64);
        nsum += *l;
        if hsum > nsum {
            return Ok(false);
        }
    }
    Ok(hsum == nsum)
}

/// Elementary divisor valuations of F^k, divided by k. This is only an
/// approximation of the slopes (it converges as k grows), kept for comparison.
pub fn hodge_of_power(m: &FLattice, k: usize) -> Result<Vec<Q>> {
    let s = m.frobenius_power(k).snf();
    let mut out = Vec::new();
    for v in s.valuations {
        let v = v.ok_or(Error::InsufficientPrecision { required: m.ring().n() + 1, available: m.ring().n() })?;
        out.push(Q::new(v as i64, k as i64));
    }
    out.sort();
    Ok(out)
}

/// Companion lattice of a monic polynomial over W_n: basis 1, F, .., F^{n-1}
/// of W[F]/W[F]P.
pub fn companion_lattice(p: &TwistedPoly) -> Result<FLattice> {
    let coeffs = p.unramified_coeffs()?;
    let ring = coeffs[0].ring().clone();
    let n = coeffs.len() - 1;
    let mut a = Matrix::zeros(&ring, n, n);
    for j in 0..n - 1 {
        a.set(j + 1, j, ring.one());
    }
    for k in 0..n {
        // F^n = -sum_i a_i F^{n-i}; coordinate of F^k is -a_{n-k}
        a.set(k, n - 1, coeffs[n - k].neg());
    }
    FLattice::new(a)
}

/// Invariant of End(N^lambda): -lambda mod 1.
pub fn end_algebra_invariant(s: i64, r: i64) -> Result<Q> {
    if r < 1 {
        return Err(Error::InvalidSlopeData(format!("denominator {r} must be positive")));
    }
    if s.gcd(&r) != 1 {
        return Err(Error::NotReduced { s, r });
    }
    let v = (-s).rem_euclid(r);
    Ok(Q::new(v, r))
}

/// Solutions X of X A = B sigma(X) over W_n for F-lattices with matrices A
/// (rank h) and B (rank h'). Returns the largest c such that some solution is
/// nonzero mod p^(n-c)... precisely: every solution is divisible by p^(n-c),
/// where c is the largest elementary divisor valuation of the linear system;
/// `None` when the system has a free direction (solutions not forced small).
pub fn intertwiner_bound(a: &Matrix, b: &Matrix) -> Result<Option<u32>> {
    let ring = a.ring();
    if ring.degree() != 1 {
        return intertwiner_bound_general(a, b);
    }
    let (h, h2) = (a.rows(), b.rows());
    // unknown X is h2 x h, index (i, j) -> i*h + j
    let nvars = h2 * h;
    let mut sys = Matrix::zeros(ring, nvars, nvars);
    for i in 0..h2 {
        for j in 0..h {
            let row = i * h + j;
            // (X A)_{ij} = sum_k X_ik A_kj
            for k in 0..h {
                let v = sys.get(row, i * h + k).add(a.get(k, j));
                sys.set(row, i * h + k, v);
            }
            // (B X)_{ij} = sum_k B_ik X_kj
            for k in 0..h2 {
                let v = sys.get(row, k * h + j).sub(b.get(i, k));
                sys.set(row, k * h + j, v);
            }
        }
    }
    Ok(max_divisor(&sys))
}

fn max_divisor(sys: &Matrix) -> Option<u32> {
    let s = sys.snf();
    let mut worst = 0;
    for v in s.valuations {
        worst = worst.max(v?);
    }
    Some(worst)
}

/// Same, for residue degree m > 1: coordinates of X over W_n(F_p).
fn intertwiner_bound_general(a: &Matrix, b: &Matrix) -> Result<Option<u32>> {
    let ring = a.ring();
    let m = ring.degree();
    let zring = WittRing::new(&crate::fields::make_field(ring.p(), 1)?, ring.n())?;
    let (h, h2) = (a.rows(), b.rows());
    let nvars = h2 * h * m;
    let mut cols: Vec<Vec<WittElement>> = Vec::with_capacity(nvars);
    let basis: Vec<WittElement> = (0..m)
        .map(|k| {
            let mut c = vec![0u64; m];
            c[k] = 1;
            ring.from_coeffs(&c).unwrap()
        })
        .collect();
    for i in 0..h2 {
        for j in 0..h {
            for e in &basis {
                let mut x = Matrix::zeros(ring, h2, h);
                x.set(i, j, e.clone());
                let img = x.mul(a).sub(&b.mul(&x.sigma(1)));
                let mut col = Vec::with_capacity(nvars);
                for r in 0..h2 {
                    for c in 0..h {
                        for &coef in img.get(r, c).coeffs() {
                            col.push(zring.from_coeffs(&[coef]).unwrap());
                        }
                    }
                }
                cols.push(col);
            }
        }
    }
    let rows: Vec<Vec<WittElement>> = (0..nvars).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    Ok(max_divisor(&Matrix::from_rows(&zring, rows)?))
}

/// lcm of the slope denominators.
pub fn denominator_lcm(slopes: &[Q]) -> i64 {
    slopes.iter().fold(1, |acc, s| acc.lcm(s.denom()))
}

#[cfg(test)]
mod tests;
