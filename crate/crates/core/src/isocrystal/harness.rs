//! Randomized cross-check of the slope algorithms: Newton polygon of a random
//! monic polynomial, characteristic-polynomial slopes of its companion lattice
//! in a twisted random basis, and the slopes found by decomposition.

use rand::Rng;

use crate::error::Result;
use crate::fields::Tower;
use crate::matrix::Matrix;
use crate::witt::{seeded_rng, WittRing};

use super::{
    companion_lattice, decompose, first_slope_factor, hodge_of_power, slopes_by_matrix, slopes_by_newton_polygon,
    DecomposeOptions, TwistedPoly,
};
use crate::dieudonne::FLattice;

/// Monic polynomial of the given degree whose lower coefficients are
/// p^v times a random unit, v uniform in 0..=max_val.
pub fn random_poly<R: Rng + ?Sized>(rng: &mut R, ring: &WittRing, degree: usize, max_val: u32) -> Result<TwistedPoly> {
    let mut coeffs = vec![ring.one()];
    for _ in 0..degree {
        let v = rng.gen_range(0..=max_val);
        coeffs.push(ring.random_unit(rng).mul_p_pow(v));
    }
    TwistedPoly::from_witt(&coeffs)
}

/// Random matrix invertible over W_n.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, ring: &WittRing, h: usize) -> Matrix {
    loop {
        let rows = (0..h).map(|_| (0..h).map(|_| ring.random(rng)).collect()).collect();
        let m = Matrix::from_rows(ring, rows).unwrap();
        if m.residue_rank() == h {
            return m;
        }
    }
}

/// Companion lattice of P in the basis e U: matrix U^{-1} A sigma(U).
pub fn twisted_companion<R: Rng + ?Sized>(rng: &mut R, p: &TwistedPoly) -> Result<FLattice> {
    let c = companion_lattice(p)?;
    let u = random_invertible(rng, c.ring(), c.rank());
    FLattice::new(u.inverse()?.mul(c.matrix()).mul(&u.sigma(1)))
}

#[derive(Clone, Debug, Default)]
pub struct HarnessReport {
    pub trials: usize,
    /// Newton polygon and companion-matrix slopes differ.
    pub matrix_mismatches: usize,
    /// Decomposition slopes differ from the Newton polygon.
    pub decompose_mismatches: usize,
    /// A first-slope factor failed to re-expand.
    pub certificate_failures: usize,
    /// First-slope factors whose re-expansion holds at full ring precision.
    pub full_precision_certificates: usize,
    /// Smallest precision reached by a re-expansion, in units of p.
    pub min_certified: Option<f64>,
    /// Elementary divisors of F^N / N (N = lcm(1..h)) differ from the slopes.
    pub power_snf_mismatches: usize,
    /// Largest residue degree used by a decomposition.
    pub max_field_degree: usize,
    /// Isoclinic blocks that could not be split into linear factors under the cap.
    pub unsplit_blocks: usize,
    pub blocks: usize,
    /// first_slope_factor found no linear factor under the residue degree cap.
    pub factor_unavailable: usize,
    pub errors: Vec<String>,
}

impl HarnessReport {
    pub fn passed(&self) -> bool {
        self.matrix_mismatches == 0 && self.decompose_mismatches == 0 && self.certificate_failures == 0 && self.errors.is_empty()
    }
}

fn lcm_upto(h: usize) -> usize {
    (1..=h).fold(1, num_integer::lcm)
}

/// Runs `trials` random polynomials of degree 1..=max_degree over W_n(F_p).
pub fn slope_cross_check(
    tower: &Tower,
    p: u64,
    n: u32,
    trials: usize,
    max_degree: usize,
    max_val: u32,
    seed: u64,
    opts: &DecomposeOptions,
) -> Result<HarnessReport> {
    let ring = tower.witt_ring(p, 1, n)?;
    let mut rng = seeded_rng(seed ^ p);
    let mut rep = HarnessReport { trials, ..Default::default() };
    for trial in 0..trials {
        let deg = rng.gen_range(1..=max_degree);
        let poly = random_poly(&mut rng, &ring, deg, max_val)?;
        let tag = format!("p={p} trial {trial} deg {deg}");
        let np = match slopes_by_newton_polygon(&poly) {
            Ok(s) => s,
            Err(e) => {
                rep.errors.push(format!("{tag}: newton polygon: {e}"));
                continue;
            }
        };
        match twisted_companion(&mut rng, &poly).and_then(|l| {
            let by_matrix = slopes_by_matrix(&l)?;
            let big_n = lcm_upto(deg);
            let approx = hodge_of_power(&l, big_n).ok();
            Ok((by_matrix, approx))
        }) {
            Ok((m, approx)) => {
                if m != np {
                    rep.matrix_mismatches += 1;
                }
                if approx.as_ref() != Some(&np.multiset()) {
                    rep.power_snf_mismatches += 1;
                }
            }
            Err(e) => rep.errors.push(format!("{tag}: matrix slopes: {e}")),
        }
        match decompose(tower, &poly, opts) {
            Ok(d) => {
                if d.slopes != np {
                    rep.decompose_mismatches += 1;
                }
                rep.max_field_degree = rep.max_field_degree.max(d.field_used.degree());
                rep.blocks += d.witness.len();
                rep.unsplit_blocks += d.witness.iter().filter(|b| b.linear.is_none()).count();
            }
            Err(e) => rep.errors.push(format!("{tag}: decompose: {e}")),
        }
        match first_slope_factor(tower, &poly, &opts.policy) {
            Ok(f) => match f.reexpand() {
                Some(k) => {
                    let full = f.input.ring().max_prec();
                    if k >= full {
                        rep.full_precision_certificates += 1;
                    }
                    let in_p = k as f64 / f.input.ring().r() as f64;
                    rep.min_certified = Some(rep.min_certified.map_or(in_p, |m: f64| m.min(in_p)));
                }
                None => rep.certificate_failures += 1,
            },
            Err(crate::Error::ExtensionExhausted { .. }) => rep.factor_unavailable += 1,
            Err(e) => rep.errors.push(format!("{tag}: first slope factor: {e}")),
        }
    }
    Ok(rep)
}
