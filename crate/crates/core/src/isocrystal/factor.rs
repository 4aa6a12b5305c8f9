//! First-slope factorization P = Q (F - pi^t) u and the slope decomposition
//! obtained by peeling factors until Q is a constant.
//!
//! With lambda = min v(a_i)/i = t/R (pi^R = p) and alpha_i = a_i / pi^(i t),
//! a unit v with sum_i alpha_i sigma^(n-i)(v) = 0 gives u = v^(-1) and Q with
//! coefficients pi^(j t) beta_j. The unit is found modulo pi^J by successive
//! approximation through the additive operator x -> sum_i alpha_i x^(p^(n-i))
//! on the residue field; when that operator has no kernel or a step has no
//! solution, the whole computation restarts over a larger residue field.
//!
//! Those restarts can need residue degrees of order p^k for a segment of k
//! steps, so the decomposition first splits off whole isoclinic blocks, which
//! needs no extension, and only then tries to split blocks into linear factors.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::fields::{AdditiveOperator, ExtensionPolicy, FqField, Tower};
use crate::witt::{RamifiedElement, RamifiedRing};

use super::{denominator_lcm, SlopeSequence, TwistedPoly, Q};

#[derive(Clone, Debug)]
pub struct DecomposeOptions {
    pub policy: ExtensionPolicy,
    /// Also split each isoclinic block into linear factors.
    pub split_blocks: bool,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { policy: ExtensionPolicy::default(), split_blocks: true }
    }
}

/// One peeled factor of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorStep {
    pub slope: Q,
    /// Degree of the polynomial before peeling.
    pub degree: usize,
    /// The unit equation was solved modulo pi^depth.
    pub depth: u32,
    /// pi-adic precision at which the re-expansion matched.
    pub certified_precision: u32,
}

#[derive(Clone, Debug)]
pub struct FirstSlopeFactor {
    /// The input, transported into the working ring.
    pub input: TwistedPoly,
    pub q: TwistedPoly,
    pub s: i64,
    pub r: i64,
    /// Exponent with pi^t = p^(s/r) in the working ring.
    pub t: u32,
    pub u: RamifiedElement,
    pub field: FqField,
    /// u is known modulo pi^depth.
    pub depth: u32,
    /// Smallest pi-adic precision at which a coefficient was compared.
    pub certified_precision: u32,
    /// Newton slopes of Q, certified from the cofactor of the lifted unit.
    pub q_slopes: SlopeSequence,
}

impl FirstSlopeFactor {
    /// Re-expands Q (F - pi^t) u and compares with the input; returns the
    /// precision reached.
    pub fn reexpand(&self) -> Option<u32> {
        let e = self.q.mul(&TwistedPoly::linear(self.q.ring(), self.t)).mul_scalar_right(&self.u);
        e.agrees_with(&self.input, &[])
    }
}

#[derive(Clone, Debug)]
pub struct IsocrystalDecomposition {
    /// (lambda, m_lambda) with sum of r m_lambda equal to the degree.
    pub summands: Vec<(Q, usize)>,
    pub witness: Vec<WitnessBlock>,
    pub field_used: FqField,
    /// Ramification index of the working ring.
    pub ramification: u32,
    pub slopes: SlopeSequence,
}

enum Fail {
    /// No kernel or no refinement in this field.
    Extend,
    Fatal(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Fatal(e)
    }
}

struct Peel {
    fwd: TwistedPoly,
    next: TwistedPoly,
    u: RamifiedElement,
    t: u32,
    slope: Q,
    depth: u32,
    certified: u32,
    next_slopes: Vec<Q>,
    /// Refinement ran out of residue-field solutions before reaching full depth.
    stuck: bool,
}

fn precision_error(ring: &RamifiedRing) -> Error {
    let n = ring.base().n();
    Error::InsufficientPrecision { required: n + 1, available: n }
}

/// sum_i alpha_i sigma^(n-i)(v)
fn evaluate(alpha: &[RamifiedElement], v: &RamifiedElement) -> RamifiedElement {
    let n = alpha.len() - 1;
    let mut acc = v.ring().zero();
    for (i, a) in alpha.iter().enumerate() {
        acc = acc.add(&a.mul(&v.sigma((n - i) as i64)));
    }
    acc
}

fn peel(p: &TwistedPoly) -> std::result::Result<Peel, Fail> {
    let ring = p.ring().clone();
    let big_r = ring.r() as i64;
    let n = p.degree();
    let a = p.coeffs();
    // first slope in pi units, from exact valuations; lower bounds may not undercut it
    let mut lam_pi: Option<Q> = None;
    for (i, c) in a.iter().enumerate().skip(1) {
        if let Some(v) = c.valuation() {
            let q = Q::new(v as i64, i as i64);
            lam_pi = Some(lam_pi.map_or(q, |l| l.min(q)));
        }
    }
    let lam_pi = lam_pi.ok_or_else(|| precision_error(&ring))?;
    for (i, c) in a.iter().enumerate().skip(1) {
        if c.valuation().is_none() && Q::new(c.prec() as i64, i as i64) < lam_pi {
            return Err(precision_error(&ring).into());
        }
    }
    if !lam_pi.is_integer() {
        return Err(Error::Internal("ramification index too small for the first slope".into()).into());
    }
    let t = lam_pi.to_integer() as u32;
    let slope = Q::new(t as i64, big_r);
    let alpha: Vec<RamifiedElement> =
        a.iter().enumerate().map(|(i, c)| c.shift_down(i as u32 * t)).collect::<Result<_>>()?;
    if alpha.iter().any(|c| c.prec() == 0) {
        return Err(precision_error(&ring).into());
    }
    let field = ring.base().field().clone();
    let residues: Vec<_> = alpha.iter().map(|c| c.residue()).collect();
    let op = AdditiveOperator::new(&residues)?;
    let root = op.kernel().into_iter().next().ok_or(Fail::Extend)?;
    debug_assert!(root.field() == &field);
    let lift = |x: &crate::fields::FqElement| ring.from_witt(&ring.base().lift(x));
    let mut v = lift(&root);
    // successive approximation as far as this field allows
    let mut z = evaluate(&alpha, &v);
    let mut depth = z.valuation_or_prec();
    let mut stuck = false;
    while depth < z.prec() {
        let rhs = z.shift_down(depth)?.residue().neg();
        let Some(x) = op.solve(&rhs) else {
            stuck = true;
            break;
        };
        v = v.add(&lift(&x).shift_up(depth));
        z = evaluate(&alpha, &v);
        let next = z.valuation_or_prec();
        if next <= depth {
            return Err(Error::Internal("refinement did not raise the valuation".into()).into());
        }
        depth = next;
    }
    let u = v.inv().ok_or_else(|| Error::Internal("lifted root is not a unit".into()))?;
    let max = ring.max_prec();

    // forward cofactor: beta_0 = sigma^n(v), beta_j = beta_{j-1} + alpha_j sigma^(n-j)(v)
    let mut fwd = Vec::with_capacity(n);
    let mut beta = alpha[0].mul(&v.sigma(n as i64));
    for j in 0..n {
        if j > 0 {
            beta = beta.add(&alpha[j].mul(&v.sigma((n - j) as i64)));
        }
        fwd.push(beta.shift_up(j as u32 * t));
    }
    let fwd = TwistedPoly::new(&ring, fwd)?;
    let mut caps = vec![max; n + 1];
    caps[n] = (n as u32 * t + depth).min(max);
    let expanded = fwd.mul(&TwistedPoly::linear(&ring, t)).mul_scalar_right(&u);
    expanded
        .agrees_with(p, &caps)
        .ok_or_else(|| Error::Internal("first-slope factor does not re-expand to its input".into()))?;
    // returned objects carry what is actually known: u modulo pi^depth and
    // the j-th cofactor coefficient modulo pi^(depth + j t)
    let u = u.with_prec(depth);
    let fwd = TwistedPoly::new(
        &ring,
        fwd.coeffs().iter().enumerate().map(|(j, c)| c.with_prec(depth + j as u32 * t)).collect(),
    )?;
    let certified = fwd
        .mul(&TwistedPoly::linear(&ring, t))
        .mul_scalar_right(&u)
        .agrees_with(p, &[])
        .ok_or_else(|| Error::Internal("first-slope factor does not re-expand at tracked precision".into()))?;

    // backward cofactor: beta_j = -sum_{i>j} alpha_i sigma^(n-i)(v), known to
    // pi^(depth + j t + min_{i>j} v(alpha_i))
    let mut bwd = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = ring.zero();
        let mut mu = u32::MAX;
        for (i, ai) in alpha.iter().enumerate().skip(j + 1) {
            acc = acc.sub(&ai.mul(&v.sigma((n - i) as i64)));
            mu = mu.min(ai.valuation_or_prec());
        }
        let known = depth.saturating_add(j as u32 * t).saturating_add(mu);
        bwd.push(acc.shift_up(j as u32 * t).with_prec(known));
    }
    let lead = bwd[0].inv().ok_or_else(|| Error::Internal("cofactor leading term is not a unit".into()))?;
    let next = TwistedPoly::new(&ring, bwd)?.scale_left(&lead);
    let next_slopes = if n == 1 {
        Vec::new()
    } else {
        match next.newton_slopes() {
            Ok(s) => s,
            Err(e) if e.is_precision() && stuck => return Err(Fail::Extend),
            Err(e) => return Err(e.into()),
        }
    };
    Ok(Peel { fwd, next, u, t, slope, depth, certified, next_slopes, stuck })
}

/// Working ring W_n(F_{p^d})[pi], pi^big_r = p, and P transported into it.
fn transport(tower: &Tower, p: &TwistedPoly, d: usize, big_r: u32) -> Result<TwistedPoly> {
    let src = p.ring().base();
    let base = tower.witt_ring(src.p(), d, src.n())?;
    let emb = tower.witt_embedding(src, &base)?;
    let target = RamifiedRing::new(&base, big_r)?;
    p.transport(Some(&emb), &target)
}

/// Residue degrees to try: multiples of the base degree up to the cap for
/// which the first residual operator has a nonzero root.
fn candidate_degrees(tower: &Tower, p: &TwistedPoly, policy: &ExtensionPolicy) -> Result<Vec<usize>> {
    let base = p.ring().base();
    let m = base.degree();
    let Some(residual) = first_residual(p)? else {
        return Ok((1..).map(|k| k * m).take_while(|&d| d <= policy.max_degree.max(m)).collect());
    };
    let mut out = Vec::new();
    for d in (1..).map(|k| k * m).take_while(|&d| d <= policy.max_degree.max(m)) {
        let dst = tower.field(base.p(), d)?;
        let emb = tower.embedding(base.field(), &dst)?;
        let cs: Vec<_> = residual.iter().map(|c| emb.apply(c)).collect();
        if !AdditiveOperator::new(&cs)?.kernel().is_empty() {
            out.push(d);
        }
    }
    Ok(out)
}

/// Residues of alpha_i = a_i / p^(i lambda) when lambda is integral in the
/// ring (otherwise the screen is skipped).
fn first_residual(p: &TwistedPoly) -> Result<Option<Vec<crate::fields::FqElement>>> {
    let slopes = p.newton_slopes()?;
    let lam = slopes[0] * Q::from_integer(p.ring().r() as i64);
    if !lam.is_integer() {
        return Ok(None);
    }
    let t = lam.to_integer() as u32;
    let mut out = Vec::new();
    for (i, c) in p.coeffs().iter().enumerate() {
        match c.shift_down(i as u32 * t) {
            Ok(a) if a.prec() > 0 => out.push(a.residue()),
            _ => return Ok(None),
        }
    }
    Ok(Some(out))
}

fn check_slopes(p: &TwistedPoly, peeled: Q, rest: &[Q]) -> Result<()> {
    let mut all = rest.to_vec();
    all.push(peeled);
    all.sort();
    let mut expect = p.newton_slopes()?;
    expect.sort();
    if all != expect {
        return Err(Error::Internal(format!("slopes {all:?} after peeling, expected {expect:?}")));
    }
    Ok(())
}

/// Splits off one factor of the smallest slope. Every residue degree under
/// the cap is tried and the deepest lift is kept; larger fields let the
/// successive approximation run further.
pub fn first_slope_factor(tower: &Tower, p: &TwistedPoly, policy: &ExtensionPolicy) -> Result<FirstSlopeFactor> {
    if !p.is_monic() || p.degree() == 0 {
        return Err(Error::NotMonic("first-slope factorization needs a monic polynomial of positive degree".into()));
    }
    let slopes = p.newton_slopes()?;
    let r0 = p.ring().r() as i64;
    let big_r = r0.lcm(slopes[0].denom()) as u32;
    let mut best: Option<(Peel, TwistedPoly, usize)> = None;
    for d in candidate_degrees(tower, p, policy)? {
        let pt = transport(tower, p, d, big_r)?;
        match peel(&pt) {
            Ok(pe) => {
                check_slopes(&pt, pe.slope, &pe.next_slopes)?;
                let done = !pe.stuck;
                if best.as_ref().is_none_or(|(b, _, _)| pe.depth > b.depth) {
                    best = Some((pe, pt, d));
                }
                if done {
                    break;
                }
            }
            Err(Fail::Extend) => continue,
            Err(Fail::Fatal(e)) => return Err(e),
        }
    }
    let (pe, pt, d) = best.ok_or(Error::ExtensionExhausted { max_degree: policy.max_degree, required: None })?;
    Ok(FirstSlopeFactor {
        input: pt,
        q: pe.fwd,
        s: *pe.slope.numer(),
        r: *pe.slope.denom(),
        t: pe.t,
        u: pe.u,
        field: tower.field(p.ring().base().p(), d)?,
        depth: pe.depth,
        certified_precision: pe.certified,
        q_slopes: SlopeSequence::from_multiset(pe.next_slopes),
    })
}

/// Linear peeling of a whole polynomial over one residue field at a time.
fn linear_decompose(tower: &Tower, p: &TwistedPoly, policy: &ExtensionPolicy) -> Result<(Vec<FactorStep>, FqField)> {
    'fields: for d in candidate_degrees(tower, p, policy)? {
        let mut cur = transport(tower, p, d, p.ring().r())?;
        let mut steps = Vec::new();
        while cur.degree() > 0 {
            match peel(&cur) {
                Ok(pe) => {
                    check_slopes(&cur, pe.slope, &pe.next_slopes)?;
                    steps.push(FactorStep {
                        slope: pe.slope,
                        degree: cur.degree(),
                        depth: pe.depth,
                        certified_precision: pe.certified,
                    });
                    cur = pe.next;
                }
                Err(Fail::Extend) => continue 'fields,
                Err(Fail::Fatal(e)) => return Err(e),
            }
        }
        return Ok((steps, tower.field(p.ring().base().p(), d)?));
    }
    Err(Error::ExtensionExhausted { max_degree: policy.max_degree, required: None })
}

/// P = Q R with R monic and isoclinic of the smallest slope of P.
#[derive(Clone, Debug)]
pub struct BlockFactor {
    pub q: TwistedPoly,
    pub block: TwistedPoly,
    pub slope: Q,
    /// pi-adic precision to which Q R and P agree.
    pub certified_precision: u32,
}

/// Splits off the full first-slope part without enlarging the residue field.
///
/// After the substitution F = pi^t G the polynomial is sum_i alpha_i G^(n-i)
/// with the first segment flattened to slope 0. Modulo pi it factors as
/// G^(n-l) times a residual polynomial with nonzero constant term, and that
/// factorization lifts one pi-digit at a time: the linearized equation
/// dQ Rbar + G^(n-l) dR = E is triangular in the coefficients.
pub fn block_factor(p: &TwistedPoly) -> Result<BlockFactor> {
    if !p.is_monic() || p.degree() == 0 {
        return Err(Error::NotMonic("block factorization needs a monic polynomial of positive degree".into()));
    }
    let slopes = p.newton_slopes()?;
    let ring = p.ring().clone();
    let n = p.degree();
    let lam_pi = slopes[0] * Q::from_integer(ring.r() as i64);
    if !lam_pi.is_integer() {
        return Err(Error::Internal("ramification index too small for the first slope".into()));
    }
    let t = lam_pi.to_integer() as u32;
    let len = slopes.iter().filter(|s| **s == slopes[0]).count();
    let a = n - len;
    let alpha: Vec<RamifiedElement> =
        p.coeffs().iter().enumerate().map(|(i, c)| c.shift_down(i as u32 * t)).collect::<Result<_>>()?;
    if alpha[len].valuation() != Some(0) || alpha[len + 1..].iter().any(|c| c.prec() == 0 || c.valuation() == Some(0)) {
        return Err(precision_error(&ring));
    }
    let scaled = TwistedPoly::new(&ring, alpha.clone())?;
    // residual factor: G^a * sum_i rho_i G^(len-i) with rho_i = sigma^(-a)(alpha_i)
    let mut qc = vec![ring.zero(); a + 1];
    qc[0] = ring.one();
    let mut rc: Vec<RamifiedElement> = (0..=len).map(|i| alpha[i].sigma(-(a as i64))).collect();
    let rho: Vec<_> = rc.iter().map(|c| c.residue()).collect();
    let c0 = rho[len].inv().ok_or_else(|| Error::Internal("residual constant term vanishes".into()))?;
    let lift = |x: &crate::fields::FqElement| ring.from_witt(&ring.base().lift(x));
    // coefficient of G^d in a polynomial given highest degree first
    let deg_coeff = |c: &[RamifiedElement], d: usize| c[c.len() - 1 - d].clone();
    let mut reached = 0;
    loop {
        let qq = TwistedPoly::new(&ring, qc.clone())?;
        let rr = TwistedPoly::new(&ring, rc.clone())?;
        let err: Vec<RamifiedElement> =
            scaled.coeffs().iter().zip(qq.mul(&rr).coeffs()).map(|(x, y)| x.sub(y)).collect();
        let v = err.iter().map(|e| e.valuation_or_prec()).min().unwrap();
        let limit = err.iter().map(|e| e.prec()).min().unwrap();
        if v >= limit {
            reached = limit;
            break;
        }
        if v < reached {
            return Err(Error::Internal("block lifting lost precision".into()));
        }
        reached = v;
        let e: Vec<_> = (0..n).map(|d| deg_coeff(&err, d).shift_down(v).map(|x| x.residue())).collect::<Result<_>>()?;
        // dQ = sum_{j<a} x_j G^j from the low coefficients
        let mut x = Vec::with_capacity(a);
        for d in 0..a {
            let mut rhs = e[d].clone();
            for (j, xj) in x.iter().enumerate() {
                let k = d - j;
                if k <= len {
                    rhs = rhs.sub(&crate::fields::FqElement::mul(xj, &rho[len - k].frobenius(j as i64)));
                }
            }
            let pivot = c0.frobenius(d as i64);
            x.push(rhs.mul(&pivot));
        }
        // dR from the top coefficients: sigma^a(y_k) = E_(a+k) - (dQ Rbar)_(a+k)
        let mut y = Vec::with_capacity(len);
        for k in 0..len {
            let d = a + k;
            let mut rhs = e[d].clone();
            for (j, xj) in x.iter().enumerate() {
                if d >= j && d - j <= len {
                    rhs = rhs.sub(&xj.mul(&rho[len - (d - j)].frobenius(j as i64)));
                }
            }
            y.push(rhs.frobenius(-(a as i64)));
        }
        for (j, xj) in x.iter().enumerate() {
            let idx = a - j;
            qc[idx] = qc[idx].add(&lift(xj).shift_up(v));
        }
        for (k, yk) in y.iter().enumerate() {
            let idx = len - k;
            rc[idx] = rc[idx].add(&lift(yk).shift_up(v));
        }
    }
    let qc: Vec<_> = qc.iter().enumerate().map(|(j, c)| c.with_prec(reached).shift_up(j as u32 * t)).collect();
    let rc: Vec<_> = rc.iter().enumerate().map(|(i, c)| c.with_prec(reached).shift_up(i as u32 * t)).collect();
    let q = TwistedPoly::new(&ring, qc)?;
    let block = TwistedPoly::new(&ring, rc)?;
    let certified = q
        .mul(&block)
        .agrees_with(p, &[])
        .ok_or_else(|| Error::Internal("block factor does not re-expand to its input".into()))?;
    Ok(BlockFactor { q, block, slope: slopes[0], certified_precision: certified })
}

/// One isoclinic block of a decomposition, with its splitting into linear
/// first-slope factors when the residue field cap allows it.
#[derive(Clone, Debug)]
pub struct WitnessBlock {
    pub slope: Q,
    pub degree: usize,
    pub certified_precision: u32,
    pub linear: Option<Vec<FactorStep>>,
    pub field_degree: Option<usize>,
    pub unsplit_reason: Option<String>,
}

/// Peels first-slope blocks until the cofactor is constant, then splits each
/// block into linear factors over the smallest tower field that allows it.
pub fn decompose(tower: &Tower, p: &TwistedPoly, opts: &DecomposeOptions) -> Result<IsocrystalDecomposition> {
    if !p.is_monic() || p.degree() == 0 {
        return Err(Error::NotMonic("decomposition needs a monic polynomial of positive degree".into()));
    }
    let slopes = p.newton_slopes()?;
    let big_r = (p.ring().r() as i64).lcm(&denominator_lcm(&slopes)) as u32;
    let target = RamifiedRing::new(p.ring().base(), big_r)?;
    let mut cur = p.transport(None, &target)?;
    let mut witness = Vec::new();
    let mut peeled = Vec::new();
    let mut field_used = p.ring().base().field().clone();
    while cur.degree() > 0 {
        let bf = block_factor(&cur)?;
        let block_slopes = bf.block.newton_slopes()?;
        if block_slopes.iter().any(|s| *s != bf.slope) {
            return Err(Error::Internal(format!("block of slope {} has slopes {block_slopes:?}", bf.slope)));
        }
        let mut wb = WitnessBlock {
            slope: bf.slope,
            degree: bf.block.degree(),
            certified_precision: bf.certified_precision,
            linear: None,
            field_degree: None,
            unsplit_reason: None,
        };
        if opts.split_blocks {
            match linear_decompose(tower, &bf.block, &opts.policy) {
                Ok((steps, field)) => {
                    if field.degree() > field_used.degree() {
                        field_used = field.clone();
                    }
                    wb.field_degree = Some(field.degree());
                    wb.linear = Some(steps);
                }
                Err(e @ (Error::ExtensionExhausted { .. } | Error::InsufficientPrecision { .. })) => {
                    wb.unsplit_reason = Some(e.to_string());
                }
                Err(e) => return Err(e),
            }
        }
        peeled.extend(block_slopes);
        witness.push(wb);
        cur = bf.q;
        if cur.degree() > 0 && !cur.is_monic() {
            return Err(Error::Internal("cofactor is not monic".into()));
        }
    }
    let seq = SlopeSequence::from_multiset(peeled);
    let mut summands = Vec::new();
    for (l, count) in &seq.entries {
        let r = *l.denom() as usize;
        if count % r != 0 {
            return Err(Error::Internal(format!("slope {l} occurs {count} times")));
        }
        summands.push((*l, count / r));
    }
    Ok(IsocrystalDecomposition { summands, witness, field_used, ramification: big_r, slopes: seq })
}
