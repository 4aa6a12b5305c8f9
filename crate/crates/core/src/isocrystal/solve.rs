//! The equation p^beta sigma^alpha(x) - x = b over W_n(F_q).

use crate::error::{Error, Result};
use crate::fields::{AdditiveOperator, ExtensionPolicy, FqField, Tower};
use crate::witt::{WittElement, WittRing};

#[derive(Clone, Debug)]
pub struct SigmaSolution {
    pub x: WittElement,
    pub field: FqField,
    /// The identity holds modulo p^precision.
    pub precision: u32,
}

fn congruent(a: &WittElement, b: &WittElement, k: u32) -> bool {
    a.sub(b).valuation().is_none_or(|v| v >= k)
}

/// Checks p^beta sigma^alpha(x) - x = b modulo p^k, with b transported into
/// the ring of x. For beta < 0 the term p^beta sigma^alpha(x) is computed by
/// exact division.
pub fn sigma_residual_ok(tower: &Tower, beta: i64, alpha: i64, b: &WittElement, x: &WittElement, k: u32) -> Result<bool> {
    let emb = tower.witt_embedding(b.ring(), x.ring())?;
    let b = emb.apply(b);
    let s = x.sigma(alpha);
    let lhs = if beta >= 0 {
        s.mul_p_pow(beta as u32)
    } else {
        match s.shift_down((-beta) as u32) {
            Ok(v) => v,
            Err(_) => return Ok(false),
        }
    };
    Ok(congruent(&lhs.sub(x), &b, k))
}

/// Solves p^beta sigma^alpha(x) - x = b, enlarging the residue field when the
/// equation has no solution over the field of b.
pub fn sigma_linear_solve(
    tower: &Tower,
    beta: i64,
    alpha: i64,
    b: &WittElement,
    policy: &ExtensionPolicy,
) -> Result<SigmaSolution> {
    let ring = b.ring();
    let n = ring.n();
    let field = ring.field().clone();
    if beta > 0 {
        // x = -(b + p^beta sigma^alpha(b) + p^(2 beta) sigma^(2 alpha)(b) + ..)
        let mut acc = ring.zero();
        let mut k = 0i64;
        while (k * beta) < n as i64 {
            acc = acc.add(&b.sigma(k * alpha).mul_p_pow((k * beta) as u32));
            k += 1;
        }
        return Ok(SigmaSolution { x: acc.neg(), field, precision: n });
    }
    if beta < 0 {
        // x' = p^beta sigma^alpha(x) solves x' - p^gamma sigma^(-alpha)(x') = b
        let gamma = (-beta) as u32;
        if gamma >= n {
            return Err(Error::InsufficientPrecision { required: gamma + 1, available: n });
        }
        let mut xp = ring.zero();
        let mut k = 0u32;
        while k * gamma < n {
            xp = xp.add(&b.sigma(-(k as i64) * alpha).mul_p_pow(k * gamma));
            k += 1;
        }
        let x = xp.sigma(-alpha).mul_p_pow(gamma);
        return Ok(SigmaSolution { x, field, precision: n - gamma });
    }
    if alpha == 0 {
        if b.is_zero() {
            return Ok(SigmaSolution { x: ring.zero(), field, precision: n });
        }
        return Err(Error::Unsolvable("x - x = b with b nonzero".into()));
    }
    // sigma^alpha(x) - x = b with alpha < 0 is sigma^|alpha|(x) - x = -sigma^|alpha|(b)
    let (a, rhs) = if alpha > 0 { (alpha as usize, b.clone()) } else { ((-alpha) as usize, b.sigma(-alpha).neg()) };
    let d = required_degree(&rhs, a, policy)?;
    let target = tower.witt_ring(ring.p(), d, n)?;
    let emb = tower.witt_embedding(ring, &target)?;
    let x = artin_schreier_lift(&target, a, &emb.apply(&rhs))?;
    Ok(SigmaSolution { x, field: target.field().clone(), precision: n })
}

/// Smallest multiple d of the residue degree with
/// sum_{k < d/g} sigma^(k a)(b) = 0, g = gcd(a, d); this is exactly when
/// sigma^a(x) - x = b is solvable over W_n(F_{p^d}).
fn required_degree(b: &WittElement, a: usize, policy: &ExtensionPolicy) -> Result<usize> {
    let m = b.ring().degree();
    let cap = policy.max_degree.max(m);
    // searched past the cap only to report the degree that would be needed
    let limit = cap.max(256);
    let mut d = m;
    while d <= limit {
        let g = num_integer::gcd(a, d);
        let mut sum = b.ring().zero();
        for k in 0..d / g {
            sum = sum.add(&b.sigma((k * a) as i64));
        }
        if sum.is_zero() {
            if d <= cap {
                return Ok(d);
            }
            return Err(Error::ExtensionExhausted { max_degree: cap, required: Some(d) });
        }
        d += m;
    }
    Err(Error::ExtensionExhausted { max_degree: cap, required: None })
}

/// sigma^a(x) - x = b by successive approximation over a ring where it is solvable.
fn artin_schreier_lift(ring: &WittRing, a: usize, b: &WittElement) -> Result<WittElement> {
    let field = ring.field();
    let mut coeffs = vec![field.zero(); a + 1];
    coeffs[0] = field.one();
    coeffs[a] = field.one().neg();
    let op = AdditiveOperator::new(&coeffs)?;
    let mut x = ring.zero();
    for _ in 0..ring.n() {
        let err = b.sub(&x.sigma(a as i64).sub(&x));
        let Some(v) = err.valuation() else { return Ok(x) };
        let rhs = err.shift_down(v)?.residue();
        let delta = op
            .solve(&rhs)
            .ok_or_else(|| Error::Internal("residue equation unsolvable over a splitting field".into()))?;
        x = x.add(&ring.lift(&delta).mul_p_pow(v));
    }
    if x.sigma(a as i64).sub(&x) == *b {
        Ok(x)
    } else {
        Err(Error::Internal("successive approximation did not converge".into()))
    }
}
