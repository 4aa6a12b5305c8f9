//! Supersingular abelian surfaces through degree-p quotients of E_0^2.
//!
//! M_0 = M_2 + M_2 has basis (x_1, y_1, x_2, y_2) with F x = y, F y = p x on
//! each summand, so VM_0 = <y_1, y_2, p x_1, p x_2> and M_0/VM_0 has basis
//! (x_1, x_2). The point t = (a : b) of P^1 is identified with the line
//! spanned by a x_1 + b x_2 in M_0/VM_0, and M_t = VM_0 + W x_t with
//! x_t = [a] x_1 + [b] x_2.

use std::collections::HashSet;

use crate::dieudonne::DieudonneModule;
use crate::error::{Error, Result};
use crate::fields::{FqElement, FqField, Tower};
use crate::matrix::Matrix;
use crate::witt::WittRing;

/// A point of P^1 over a tower field, or the symbolic generic point whose
/// field of definition is not contained in F_{p^4}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurfaceParameter {
    Point { a: FqElement, b: FqElement },
    Generic,
}

impl SurfaceParameter {
    pub fn point(a: FqElement, b: FqElement) -> Result<Self> {
        if a.field() != b.field() {
            return Err(Error::FieldMismatch("projective coordinates over different fields".into()));
        }
        if a.is_zero() && b.is_zero() {
            return Err(Error::Invalid("(0 : 0) is not a point of P^1".into()));
        }
        Ok(SurfaceParameter::Point { a, b })
    }

    /// The affine coordinate a/b, `None` at infinity (b = 0).
    pub fn affine(&self) -> Option<Option<FqElement>> {
        match self {
            SurfaceParameter::Point { a, b } => Some(a.div(b)),
            SurfaceParameter::Generic => None,
        }
    }

    /// Degree over F_p of the field of definition, `None` for the generic point.
    pub fn definition_degree(&self) -> Option<usize> {
        let u = self.affine()?;
        let Some(u) = u else { return Some(1) };
        let m = u.field().degree();
        (1..=m).find(|d| m % d == 0 && u.in_subfield(*d))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SurfaceKind {
    Superspecial,
    CaseI,
    CaseII,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurfaceClass {
    pub kind: SurfaceKind,
    pub lambda_size: usize,
}

/// M_0 and the sublattice M_t with VM_0 in M_t in M_0.
#[derive(Clone, Debug)]
pub struct LatticeChainModule {
    pub m0: DieudonneModule,
    pub mt: DieudonneModule,
    /// Columns: the basis of M_t in the basis of M_0.
    pub inclusion: Matrix,
}

impl LatticeChainModule {
    /// Elementary-divisor valuations of the inclusion; {0, 0, 0, 1} means index p.
    pub fn index_valuations(&self) -> Vec<Option<u32>> {
        let mut v = self.inclusion.snf().valuations;
        v.sort();
        v
    }
}

/// M_2 + M_2 over the given ring.
pub fn superspecial_square(ring: &WittRing) -> Result<DieudonneModule> {
    let p = ring.p() as i64;
    DieudonneModule::new(Matrix::from_ints(
        ring,
        &[vec![0, p, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 0, p], vec![0, 0, 1, 0]],
    ))
}

/// The smallest tower field containing both F_{p^4} and the field of t.
fn working_field(tower: &Tower, p: u64, t: &SurfaceParameter) -> Result<(FqElement, FqElement)> {
    let SurfaceParameter::Point { a, b } = t else {
        return Err(Error::Invalid("the generic point has no lattice".into()));
    };
    if a.field().p() != p {
        return Err(Error::FieldMismatch(format!("parameter over characteristic {}, expected {p}", a.field().p())));
    }
    let m = num_integer::lcm(a.field().degree(), 4);
    let target = tower.field(p, m)?;
    let src = tower.field(p, a.field().degree())?;
    if &src != a.field() {
        return Err(Error::UnsupportedField { p, m: a.field().degree(), reason: "parameter is not over a tower field".into() });
    }
    let e = tower.embedding(&src, &target)?;
    Ok((e.apply(a), e.apply(b)))
}

/// The lattice M_t at precision n over W_n(F_{p^m}), m = lcm(4, field of t).
pub fn build_mt(tower: &Tower, p: u64, t: &SurfaceParameter, n: u32) -> Result<LatticeChainModule> {
    let (a, b) = working_field(tower, p, t)?;
    let ring = tower.witt_ring(p, a.field().degree(), n)?;
    // the summands are symmetric, so swap them when a = 0
    let swap = a.is_zero();
    let (a, b) = if swap { (b, a) } else { (a, b) };
    let ta = ring.teichmuller(&a);
    let tb = ring.teichmuller(&b);
    let ta_inv = ta.inv().expect("Teichmuller lift of a nonzero element");
    let z = ring.zero();
    let one = ring.one();
    let pp = ring.p_power(1);
    // basis (x_t, p x_2, y_1, y_2) of M_t, coordinates in (x_1, y_1, x_2, y_2)
    let u = Matrix::from_rows(
        &ring,
        vec![
            vec![ta.clone(), z.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), one.clone(), z.clone()],
            vec![tb.clone(), pp.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone(), one.clone()],
        ],
    )?;
    // F x_t = s(a) y_1 + s(b) y_2, F(p x_2) = p y_2,
    // F y_1 = p x_1 = (p/[a]) x_t - ([b]/[a]) p x_2, F y_2 = p x_2
    let at = Matrix::from_rows(
        &ring,
        vec![
            vec![z.clone(), z.clone(), pp.mul(&ta_inv), z.clone()],
            vec![z.clone(), z.clone(), tb.mul(&ta_inv).neg(), one.clone()],
            vec![ta.sigma(1), z.clone(), z.clone(), z.clone()],
            vec![tb.sigma(1), pp.clone(), z.clone(), z.clone()],
        ],
    )?;
    // after a swap the coordinates refer to (x_2, y_2, x_1, y_1); M_0 has the same matrix
    let m0 = superspecial_square(&ring)?;
    // M_t is F-stable inside M_0: U A_t = A_0 sigma(U)
    if u.mul(&at) != m0.f_matrix().mul(&u.sigma(1)) {
        return Err(Error::Internal("M_t is not F-stable".into()));
    }
    let mt = DieudonneModule::new(at)?;
    Ok(LatticeChainModule { m0, mt, inclusion: u })
}

/// Kind from the field of definition of t over F_p.
pub fn parameter_kind(t: &SurfaceParameter) -> SurfaceKind {
    match t.definition_degree() {
        Some(d) if 2 % d == 0 => SurfaceKind::Superspecial,
        Some(d) if 4 % d == 0 => SurfaceKind::CaseII,
        _ => SurfaceKind::CaseI,
    }
}

pub fn classify_parameter(tower: &Tower, p: u64, t: &SurfaceParameter) -> Result<SurfaceClass> {
    let kind = parameter_kind(t);
    let lambda_size = match kind {
        SurfaceKind::Superspecial => 1,
        k => norm_quotient(tower, p, k)?.quotient_size,
    };
    Ok(SurfaceClass { kind, lambda_size })
}

/// F_p^x modulo the image of Nr o det on the unit group of S.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormQuotient {
    pub p: u64,
    pub kind: SurfaceKind,
    pub units: usize,
    pub image_size: usize,
    pub quotient_size: usize,
}

fn det2(m: &[FqElement; 4]) -> FqElement {
    m[0].mul(&m[3]).sub(&m[1].mul(&m[2]))
}

/// Companion data (s, r) of a monic irreducible x^2 - s x - r over `field`.
fn irreducible_quadratic(field: &FqField) -> (FqElement, FqElement) {
    let elems: Vec<FqElement> = field.elements().collect();
    for s in &elems {
        for r in &elems {
            if !elems.iter().any(|x| x.mul(x).sub(&s.mul(x)).sub(r).is_zero()) {
                return (s.clone(), r.clone());
            }
        }
    }
    unreachable!("every finite field has an irreducible quadratic")
}

/// Enumerates S^x in Mat_2(F_{p^2}): scalars (Case I), a quadratic subfield
/// (Case II) or all of GL_2 (superspecial), and collects Nr(det) = d^(p+1).
pub fn norm_quotient(tower: &Tower, p: u64, kind: SurfaceKind) -> Result<NormQuotient> {
    let f = tower.field(p, 2)?;
    let elems: Vec<FqElement> = f.elements().collect();
    let zero = f.zero();
    let mut image = HashSet::new();
    let mut units = 0usize;
    let mut record = |m: [FqElement; 4]| {
        let d = det2(&m);
        if !d.is_zero() {
            units += 1;
            image.insert(d.pow(p as u128 + 1));
        }
    };
    match kind {
        SurfaceKind::CaseI => {
            for c in &elems {
                record([c.clone(), zero.clone(), zero.clone(), c.clone()]);
            }
        }
        SurfaceKind::CaseII => {
            let (s, r) = irreducible_quadratic(&f);
            // x I + y C with C the companion matrix [[0, r], [1, s]]
            for x in &elems {
                for y in &elems {
                    record([x.clone(), y.mul(&r), y.clone(), x.add(&y.mul(&s))]);
                }
            }
        }
        SurfaceKind::Superspecial => {
            for a in &elems {
                for b in &elems {
                    for c in &elems {
                        for d in &elems {
                            record([a.clone(), b.clone(), c.clone(), d.clone()]);
                        }
                    }
                }
            }
        }
    }
    if image.iter().any(|x| !x.in_subfield(1)) {
        return Err(Error::Internal("norm does not land in F_p".into()));
    }
    let image_size = image.len();
    let quotient_size = (p as usize - 1) / image_size;
    Ok(NormQuotient { p, kind, units, image_size, quotient_size })
}

/// Points of P^1 over `field`: the affine line by element index, then infinity.
fn p1_points(field: &FqField) -> Vec<Option<FqElement>> {
    field.elements().map(Some).chain(std::iter::once(None)).collect()
}

fn point_index(field: &FqField, u: &Option<FqElement>) -> usize {
    match u {
        Some(x) => x.index() as usize,
        None => field.order() as usize,
    }
}

fn moebius(m: &[FqElement; 4], u: &Option<FqElement>) -> Option<FqElement> {
    let [a, b, c, d] = m;
    match u {
        None => a.div(c),
        Some(x) => a.mul(x).add(b).div(&c.mul(x).add(d)),
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Orbit label (smallest point index) of each point of P^1(F_{p^ambient}).
fn orbits_from(field: &FqField, maps: &[[FqElement; 4]]) -> Vec<usize> {
    let pts = p1_points(field);
    let mut uf = UnionFind((0..pts.len()).collect());
    for u in &pts {
        for m in maps {
            uf.union(point_index(field, u), point_index(field, &moebius(m, u)));
        }
    }
    (0..pts.len()).map(|i| uf.find(i)).collect()
}

/// All of GL_2(F_{p^2}) embedded in the ambient field.
fn gl2_maps(tower: &Tower, p: u64, ambient: &FqField) -> Result<Vec<[FqElement; 4]>> {
    let small = tower.field(p, 2)?;
    let e = tower.embedding(&small, ambient)?;
    let elems: Vec<FqElement> = small.elements().map(|x| e.apply(&x)).collect();
    let mut maps = Vec::new();
    for a in &elems {
        for b in &elems {
            for c in &elems {
                for d in &elems {
                    let m = [a.clone(), b.clone(), c.clone(), d.clone()];
                    if !det2(&m).is_zero() {
                        maps.push(m);
                    }
                }
            }
        }
    }
    Ok(maps)
}

/// Translations by an F_p-basis of F_{p^2}, scaling by a primitive element
/// and u -> 1/u; these generate PGL_2(F_{p^2}).
fn gl2_generators(tower: &Tower, p: u64, ambient: &FqField) -> Result<Vec<[FqElement; 4]>> {
    let small = tower.field(p, 2)?;
    let e = tower.embedding(&small, ambient)?;
    let gen = small.elements().find(|x| x.multiplicative_order() == Some(small.order() - 1)).unwrap();
    let (z, o) = (ambient.zero(), ambient.one());
    let mut maps = vec![[e.apply(&gen), z.clone(), z.clone(), o.clone()], [z.clone(), o.clone(), o.clone(), z.clone()]];
    for basis in [small.one(), small.generator()] {
        maps.push([o.clone(), e.apply(&basis), z.clone(), o.clone()]);
    }
    Ok(maps)
}

/// Which orbits of P^1(F_{p^ambient}) meet which classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MobiusReport {
    pub p: u64,
    pub ambient_degree: usize,
    /// Orbit sizes, ascending.
    pub orbit_sizes: Vec<usize>,
    /// Size of the single orbit P^1(F_{p^2}), if it is one orbit.
    pub superspecial_orbit: Option<usize>,
    /// Size of the single orbit F_{p^4} - F_{p^2}, if it is one orbit.
    pub case_two_orbit: Option<usize>,
    /// No orbit mixes points of P^1(F_{p^4}) with points outside it.
    pub rest_separated: bool,
    /// Every orbit is constant under `classify_parameter`.
    pub classification_invariant: bool,
}

fn mobius_report(tower: &Tower, p: u64, ambient: &FqField, maps: &[[FqElement; 4]]) -> Result<MobiusReport> {
    let labels = orbits_from(ambient, maps);
    let pts = p1_points(ambient);
    let mut sizes = std::collections::BTreeMap::new();
    for l in &labels {
        *sizes.entry(*l).or_insert(0usize) += 1;
    }
    let kind_of = |u: &Option<FqElement>| match u {
        None => SurfaceKind::Superspecial,
        Some(x) if x.in_subfield(2) => SurfaceKind::Superspecial,
        Some(x) if x.in_subfield(4) => SurfaceKind::CaseII,
        Some(_) => SurfaceKind::CaseI,
    };
    let single = |k: SurfaceKind| {
        let members: Vec<usize> = (0..pts.len()).filter(|&i| kind_of(&pts[i]) == k).collect();
        let first = labels[*members.first()?];
        (members.iter().all(|&i| labels[i] == first) && sizes[&first] == members.len()).then_some(members.len())
    };
    let mut rest_separated = true;
    let mut classification_invariant = true;
    let mut kinds: std::collections::HashMap<usize, SurfaceKind> = Default::default();
    for (i, u) in pts.iter().enumerate() {
        let k = kind_of(u);
        let t = match u {
            Some(x) => SurfaceParameter::point(x.clone(), ambient.one())?,
            None => SurfaceParameter::point(ambient.one(), ambient.zero())?,
        };
        let class = classify_parameter(tower, p, &t)?;
        if class.kind != k {
            classification_invariant = false;
        }
        match kinds.insert(labels[i], k) {
            Some(prev) if prev != k => {
                if prev == SurfaceKind::CaseI || k == SurfaceKind::CaseI {
                    rest_separated = false;
                }
                classification_invariant = false;
            }
            _ => {}
        }
    }
    let mut orbit_sizes: Vec<usize> = sizes.values().copied().collect();
    orbit_sizes.sort();
    Ok(MobiusReport {
        p,
        ambient_degree: ambient.degree(),
        orbit_sizes,
        superspecial_orbit: single(SurfaceKind::Superspecial),
        case_two_orbit: if ambient.degree() % 4 == 0 { single(SurfaceKind::CaseII) } else { None },
        rest_separated,
        classification_invariant,
    })
}

/// GL_2(F_{p^2}) acting on P^1(F_{p^4}), enumerating the whole group.
pub fn mobius_orbit_check(tower: &Tower, p: u64) -> Result<MobiusReport> {
    if p != 2 && p != 3 {
        return Err(Error::Invalid(format!("exhaustive orbit check supports p = 2, 3, not {p}")));
    }
    let ambient = tower.field(p, 4)?;
    let maps = gl2_maps(tower, p, &ambient)?;
    mobius_report(tower, p, &ambient, &maps)
}

/// Orbits on P^1(F_{p^d}) from a generating set of PGL_2(F_{p^2}); d even.
pub fn mobius_orbits_by_generators(tower: &Tower, p: u64, degree: usize) -> Result<MobiusReport> {
    if degree % 2 != 0 {
        return Err(Error::NoEmbedding(format!("F_{p}^2 does not embed in F_{p}^{degree}")));
    }
    let ambient = tower.field(p, degree)?;
    let maps = gl2_generators(tower, p, &ambient)?;
    mobius_report(tower, p, &ambient, &maps)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YEntry {
    pub t: SurfaceParameter,
    pub class: SurfaceClass,
    pub member: bool,
}

/// The locus where Lambda_X is a singleton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YLocus {
    pub p: u64,
    /// Whether the generic point belongs, i.e. the locus is all of P^1.
    pub whole_line: bool,
    pub description: String,
    /// Exhaustive list over P^1(F_{p^4}) and the generic point, for p = 2, 3.
    pub verification: Option<Vec<YEntry>>,
}

pub fn y_locus(tower: &Tower, p: u64) -> Result<YLocus> {
    let generic = classify_parameter(tower, p, &SurfaceParameter::Generic)?;
    let whole_line = generic.lambda_size == 1;
    let description = if whole_line { "P1".to_string() } else { format!("P1(F_{p}^4)") };
    let verification = if p == 2 || p == 3 {
        let f = tower.field(p, 4)?;
        let mut list = Vec::new();
        for u in p1_points(&f) {
            let t = match u {
                Some(x) => SurfaceParameter::point(x, f.one())?,
                None => SurfaceParameter::point(f.one(), f.zero())?,
            };
            let class = classify_parameter(tower, p, &t)?;
            list.push(YEntry { t, class, member: class.lambda_size == 1 });
        }
        list.push(YEntry { t: SurfaceParameter::Generic, class: generic, member: whole_line });
        Some(list)
    } else {
        None
    };
    Ok(YLocus { p, whole_line, description, verification })
}

/// All points of P^1(F_{p^degree}) as parameters, affine points first.
pub fn p1_parameters(tower: &Tower, p: u64, degree: usize) -> Result<Vec<SurfaceParameter>> {
    let f = tower.field(p, degree)?;
    p1_points(&f)
        .into_iter()
        .map(|u| match u {
            Some(x) => SurfaceParameter::point(x, f.one()),
            None => SurfaceParameter::point(f.one(), f.zero()),
        })
        .collect()
}

#[cfg(test)]
mod tests;
