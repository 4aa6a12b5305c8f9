use num_rational::Ratio;
use proptest::prelude::*;

use super::harness::{random_poly, slope_cross_check, twisted_companion};
use super::*;
use crate::dieudonne::{std_module, StdKind};
use crate::error::Error;
use crate::fields::{ExtensionPolicy, Tower};
use crate::witt::seeded_rng;

fn q(a: i64, b: i64) -> Q {
    Ratio::new(a, b)
}

fn seq(items: &[(Q, usize)]) -> SlopeSequence {
    SlopeSequence { entries: items.to_vec() }
}

fn ring(p: u64, n: u32) -> WittRing {
    Tower::default().witt_ring(p, 1, n).unwrap()
}

#[test]
fn newton_polygon_examples() {
    let w = ring(3, 8);
    let p = w.p() as i64;
    let f2 = TwistedPoly::from_ints(&w, &[1, 0, -p]).unwrap();
    assert_eq!(slopes_by_newton_polygon(&f2).unwrap(), seq(&[(q(1, 2), 2)]));
    let ord = TwistedPoly::from_ints(&w, &[1, -(1 + p), p]).unwrap();
    assert_eq!(slopes_by_newton_polygon(&ord).unwrap(), seq(&[(q(0, 1), 1), (q(1, 1), 1)]));
    let f3 = TwistedPoly::from_ints(&w, &[1, 0, 0, -p]).unwrap();
    assert_eq!(slopes_by_newton_polygon(&f3).unwrap(), seq(&[(q(1, 3), 3)]));
}

#[test]
fn companion_agrees_with_newton_polygon() {
    let w = ring(2, 10);
    let ord = TwistedPoly::from_ints(&w, &[1, -3, 2]).unwrap();
    let l = companion_lattice(&ord).unwrap();
    assert_eq!(slopes_by_matrix(&l).unwrap(), slopes_by_newton_polygon(&ord).unwrap());
}

#[test]
fn zero_constant_term_is_a_precision_error() {
    let w = ring(2, 6);
    let poly = TwistedPoly::from_ints(&w, &[1, 1, 64]).unwrap();
    let e = slopes_by_newton_polygon(&poly).unwrap_err();
    assert!(e.is_precision(), "{e}");
}

#[test]
fn matrix_slopes_of_standard_modules() {
    let w = ring(5, 8);
    let m1 = std_module(StdKind::M1, &w).unwrap().lattice();
    assert_eq!(slopes_by_matrix(&m1).unwrap(), seq(&[(q(0, 1), 1), (q(1, 1), 1)]));
    let m2 = std_module(StdKind::M2, &w).unwrap().lattice();
    assert_eq!(slopes_by_matrix(&m2).unwrap(), seq(&[(q(1, 2), 2)]));
    let m21 = std_module(StdKind::Mab(2, 1), &w).unwrap().lattice();
    assert_eq!(slopes_by_matrix(&m21).unwrap(), seq(&[(q(1, 3), 3)]));
}

#[test]
fn matrix_slopes_over_larger_residue_field() {
    let tower = Tower::default();
    let w = tower.witt_ring(3, 2, 8).unwrap();
    let g = w.generator();
    // F e1 = y e2, F e2 = p e1: slopes 1/2 twice
    let a = crate::matrix::Matrix::from_rows(&w, vec![vec![w.zero(), w.p_power(1)], vec![g, w.zero()]]).unwrap();
    let l = crate::dieudonne::FLattice::new(a).unwrap();
    assert_eq!(slopes_by_matrix(&l).unwrap(), seq(&[(q(1, 2), 2)]));
}

#[test]
fn power_elementary_divisors_are_not_exact() {
    // a Jordan-type lattice: F = p + N with N nilpotent mod p
    let w = ring(3, 12);
    let poly = TwistedPoly::from_ints(&w, &[1, -6, 9]).unwrap();
    let l = companion_lattice(&poly).unwrap();
    assert_eq!(slopes_by_matrix(&l).unwrap(), seq(&[(q(1, 1), 2)]));
    let approx = hodge_of_power(&l, 2).unwrap();
    assert_ne!(approx, vec![q(1, 1), q(1, 1)]);
}

#[test]
fn hodge_lies_below_newton() {
    let w = ring(2, 12);
    let mut rng = seeded_rng(11);
    for _ in 0..20 {
        let poly = random_poly(&mut rng, &w, 3, 3).unwrap();
        let l = twisted_companion(&mut rng, &poly).unwrap();
        assert!(hodge_below_newton(&l).unwrap());
    }
}

#[test]
fn invariants_of_end_algebra() {
    assert_eq!(end_algebra_invariant(0, 1).unwrap(), q(0, 1));
    assert_eq!(end_algebra_invariant(1, 2).unwrap(), q(1, 2));
    assert_eq!(end_algebra_invariant(2, 5).unwrap(), q(3, 5));
    assert_eq!(end_algebra_invariant(2, 4).unwrap_err(), Error::NotReduced { s: 2, r: 4 });
}

#[test]
fn sigma_solver_geometric_series() {
    let tower = Tower::default();
    let w = tower.witt_ring(2, 1, 6).unwrap();
    let b = w.from_int(13);
    let sol = sigma_linear_solve(&tower, 1, 0, &b, &ExtensionPolicy::default()).unwrap();
    // 2x - x = x
    assert_eq!(sol.x, b);
    let zero = sigma_linear_solve(&tower, 0, 1, &w.zero(), &ExtensionPolicy::default()).unwrap();
    assert!(zero.x.is_zero());
}

#[test]
fn sigma_solver_artin_schreier_needs_extension() {
    let tower = Tower::default();
    let w = tower.witt_ring(2, 2, 2).unwrap();
    let c = w.field().one();
    let b = w.teichmuller(&c);
    let sol = sigma_linear_solve(&tower, 0, 1, &b, &ExtensionPolicy::default()).unwrap();
    assert_eq!(sol.field.degree(), 4);
    assert!(solve::sigma_residual_ok(&tower, 0, 1, &b, &sol.x, 2).unwrap());
    // residue equation checked against an exhaustive search over F_16
    let cbar = crate::fields::embed(&c, &sol.field).unwrap();
    let roots: Vec<_> = sol.field.elements().filter(|x| x.pow(2).sub(x) == cbar).collect();
    assert!(roots.contains(&sol.x.residue()));
    // no solution at all over F_4 itself
    let w4 = tower.witt_ring(2, 2, 2).unwrap();
    let found = w4.field().elements().flat_map(|a| w4.field().elements().map(move |b| (a.clone(), b))).any(|(a, b2)| {
        let x = w4.teichmuller(&a).add(&w4.teichmuller(&b2).mul_p_pow(1));
        x.sigma(1).sub(&x) == b
    });
    assert!(!found);
}

#[test]
fn sigma_solver_reports_required_degree() {
    let tower = Tower::default();
    let w = tower.witt_ring(2, 1, 4).unwrap();
    let e = sigma_linear_solve(&tower, 0, 1, &w.one(), &ExtensionPolicy::default()).unwrap_err();
    assert_eq!(e, Error::ExtensionExhausted { max_degree: 8, required: Some(16) });
}

#[test]
fn sigma_solver_negative_beta_loses_precision() {
    let tower = Tower::default();
    let w = tower.witt_ring(3, 2, 5).unwrap();
    let b = w.generator().add(&w.from_int(7));
    let sol = sigma_linear_solve(&tower, -2, 1, &b, &ExtensionPolicy::default()).unwrap();
    assert_eq!(sol.precision, 3);
    assert!(solve::sigma_residual_ok(&tower, -2, 1, &b, &sol.x, sol.precision).unwrap());
}

#[test]
fn first_slope_factor_examples() {
    let tower = Tower::default();
    let w = tower.witt_ring(3, 1, 10).unwrap();
    let policy = ExtensionPolicy::default();
    let f2 = TwistedPoly::from_ints(&w, &[1, 0, -3]).unwrap();
    let f = first_slope_factor(&tower, &f2, &policy).unwrap();
    assert_eq!((f.s, f.r), (1, 2));
    // alpha_2 = -3 / pi^2 is only known modulo pi^(20 - 2), which bounds u
    assert_eq!(f.depth, f.input.ring().max_prec() - 2);
    assert_eq!(f.reexpand(), Some(f.depth));
    assert_eq!(f.q.degree(), 1);

    let lin = TwistedPoly::from_ints(&w, &[1, -3]).unwrap();
    let f = first_slope_factor(&tower, &lin, &policy).unwrap();
    assert_eq!((f.s, f.r, f.q.degree()), (1, 1, 0));
    assert_eq!(f.depth, 9);
    assert!(f.u.eq_mod(&f.u.ring().one(), f.depth));

    let ord = TwistedPoly::from_ints(&w, &[1, -4, 3]).unwrap();
    let f = first_slope_factor(&tower, &ord, &policy).unwrap();
    assert_eq!((f.s, f.r), (0, 1));
    assert!(f.reexpand().is_some());
    assert_eq!(slopes_by_newton_polygon(&f.q).unwrap(), seq(&[(q(1, 1), 1)]));
    assert_eq!(f.q_slopes, seq(&[(q(1, 1), 1)]));
}

#[test]
fn decompose_examples() {
    let tower = Tower::default();
    let w = tower.witt_ring(2, 1, 12).unwrap();
    let opts = DecomposeOptions::default();
    let f4 = TwistedPoly::from_ints(&w, &[1, 0, 0, 0, -4]).unwrap();
    let d = decompose(&tower, &f4, &opts).unwrap();
    assert_eq!(d.summands, vec![(q(1, 2), 2)]);
    assert_eq!(slopes_by_matrix(&companion_lattice(&f4).unwrap()).unwrap(), d.slopes);
    let ord = TwistedPoly::from_ints(&w, &[1, -3, 2]).unwrap();
    let d = decompose(&tower, &ord, &opts).unwrap();
    assert_eq!(d.summands, vec![(q(0, 1), 1), (q(1, 1), 1)]);
    // (F^2 - p)(F - 1) twisted: mixed hull
    let mixed = TwistedPoly::from_ints(&w, &[1, -1, -2, 2]).unwrap();
    let d = decompose(&tower, &mixed, &opts).unwrap();
    assert_eq!(d.slopes, slopes_by_newton_polygon(&mixed).unwrap());
    assert_eq!(d.summands, vec![(q(0, 1), 1), (q(1, 2), 1)]);
}

#[test]
fn block_factor_splits_off_first_slope() {
    let tower = Tower::default();
    let w = tower.witt_ring(3, 1, 12).unwrap();
    // (F - 1)^2 (F - 3) up to twisting: slope 0 twice, then slope 1
    let poly = TwistedPoly::from_ints(&w, &[1, -5, 7, -3]).unwrap();
    let b = block_factor(&poly).unwrap();
    assert_eq!(b.slope, q(0, 1));
    assert_eq!(b.block.degree(), 2);
    assert_eq!(slopes_by_newton_polygon(&b.block).unwrap(), seq(&[(q(0, 1), 2)]));
    assert_eq!(slopes_by_newton_polygon(&b.q).unwrap(), seq(&[(q(1, 1), 1)]));
    assert!(b.q.mul(&b.block).agrees_with(&poly, &[]).is_some());
}

#[test]
fn hom_between_different_slopes_vanishes() {
    let w = ring(2, 8);
    let a = std_module(StdKind::Lambda(q(1, 2)), &w).unwrap().lattice();
    let b = std_module(StdKind::Lambda(q(1, 3)), &w).unwrap().lattice();
    let c = intertwiner_bound(a.matrix(), b.matrix()).unwrap();
    assert!(c.is_some_and(|c| c <= 3), "{c:?}");
    // equal slopes: the identity intertwines, so no bound
    assert_eq!(intertwiner_bound(a.matrix(), a.matrix()).unwrap(), None);
}

#[test]
fn small_cross_check() {
    let tower = Tower::default();
    let rep = slope_cross_check(&tower, 3, 16, 12, 4, 3, 5, &DecomposeOptions::default()).unwrap();
    assert!(rep.passed(), "{rep:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decompose_matches_newton_polygon(seed in any::<u64>(), deg in 1usize..=4) {
        let tower = Tower::default();
        let w = tower.witt_ring(2, 1, 16).unwrap();
        let mut rng = seeded_rng(seed);
        let poly = random_poly(&mut rng, &w, deg, 3).unwrap();
        let d = decompose(&tower, &poly, &DecomposeOptions::default()).unwrap();
        prop_assert_eq!(d.slopes, slopes_by_newton_polygon(&poly).unwrap());
        let total: usize = d.summands.iter().map(|(l, m)| *l.denom() as usize * m).sum();
        prop_assert_eq!(total, deg);
    }

    #[test]
    fn first_slope_factor_reexpands(seed in any::<u64>(), deg in 1usize..=4) {
        let tower = Tower::default();
        let w = tower.witt_ring(3, 1, 12).unwrap();
        let mut rng = seeded_rng(seed);
        let poly = random_poly(&mut rng, &w, deg, 3).unwrap();
        match first_slope_factor(&tower, &poly, &ExtensionPolicy::default()) {
            Ok(f) => {
                prop_assert!(f.reexpand().is_some());
            }
            // residual root lives above the default residue degree cap
            Err(Error::ExtensionExhausted { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn invariant_is_reduced_in_unit_interval(s in -50i64..50, r in 1i64..20) {
        prop_assume!(num_integer::gcd(s, r) == 1);
        let inv = end_algebra_invariant(s, r).unwrap();
        prop_assert!(inv >= q(0, 1) && inv < q(1, 1));
        prop_assert!((inv + q(s, r)).is_integer());
    }
}
