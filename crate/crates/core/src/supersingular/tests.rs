use num_rational::Ratio;

use super::*;
use crate::dieudonne::a_number;
use crate::isocrystal::SlopeSequence;

fn tower() -> Tower {
    Tower::default()
}

#[test]
fn point_at_infinity_and_origin_are_superspecial() {
    let tw = tower();
    let f = tw.field(3, 4).unwrap();
    for t in [
        SurfaceParameter::point(f.one(), f.zero()).unwrap(),
        SurfaceParameter::point(f.zero(), f.one()).unwrap(),
    ] {
        let m = build_mt(&tw, 3, &t, 4).unwrap();
        assert_eq!(a_number(&m.mt), 2);
        assert_eq!(m.index_valuations(), vec![Some(0), Some(0), Some(0), Some(1)]);
    }
}

#[test]
fn generator_of_f16_over_f4_gives_a_number_one() {
    let tw = tower();
    let f = tw.field(2, 4).unwrap();
    let g = f.generator();
    assert!(!g.in_subfield(2));
    let t = SurfaceParameter::point(g, f.one()).unwrap();
    let m = build_mt(&tw, 2, &t, 4).unwrap();
    assert_eq!(a_number(&m.mt), 1);
    assert_eq!(classify_parameter(&tw, 2, &t).unwrap(), SurfaceClass { kind: SurfaceKind::CaseII, lambda_size: 1 });
}

#[test]
fn a_number_detects_superspecial_points() {
    let tw = tower();
    let half = SlopeSequence::from_multiset(vec![Ratio::new(1, 2); 4]);
    for p in [2u64, 3] {
        for t in p1_parameters(&tw, p, 4).unwrap() {
            let m = build_mt(&tw, p, &t, 10).unwrap();
            let a = a_number(&m.mt);
            let superspecial = parameter_kind(&t) == SurfaceKind::Superspecial;
            assert_eq!(a == 2, superspecial, "p={p} t={t:?}");
            assert_eq!(a, if superspecial { 2 } else { 1 });
            assert_eq!(m.index_valuations(), vec![Some(0), Some(0), Some(0), Some(1)]);
            assert_eq!(m.mt.slopes().unwrap(), half);
        }
    }
}

#[test]
fn classification_examples() {
    let tw = tower();
    let f9 = tw.field(3, 2).unwrap();
    let t = SurfaceParameter::point(f9.generator(), f9.one()).unwrap();
    assert_eq!(classify_parameter(&tw, 3, &t).unwrap(), SurfaceClass { kind: SurfaceKind::Superspecial, lambda_size: 1 });
    let f81 = tw.field(3, 4).unwrap();
    let t = SurfaceParameter::point(f81.generator(), f81.one()).unwrap();
    assert_eq!(classify_parameter(&tw, 3, &t).unwrap(), SurfaceClass { kind: SurfaceKind::CaseII, lambda_size: 1 });
    assert_eq!(
        classify_parameter(&tw, 3, &SurfaceParameter::Generic).unwrap(),
        SurfaceClass { kind: SurfaceKind::CaseI, lambda_size: 2 }
    );
    // a concrete point of F_{3^8} - F_{3^4} behaves like the generic point
    let f = tw.field(3, 8).unwrap();
    let t = SurfaceParameter::point(f.generator(), f.one()).unwrap();
    assert_eq!(parameter_kind(&t), SurfaceKind::CaseI);
    let m = build_mt(&tw, 3, &t, 3).unwrap();
    assert_eq!(a_number(&m.mt), 1);
}

#[test]
fn norm_quotients() {
    let tw = tower();
    for p in [2u64, 3, 5] {
        let squares = if p == 2 { 1 } else { 2 };
        assert_eq!(norm_quotient(&tw, p, SurfaceKind::CaseI).unwrap().quotient_size, squares);
        let two = norm_quotient(&tw, p, SurfaceKind::CaseII).unwrap();
        assert_eq!(two.quotient_size, 1);
        assert_eq!(two.units as u64, p.pow(4) - 1);
    }
    let ss = norm_quotient(&tw, 3, SurfaceKind::Superspecial).unwrap();
    assert_eq!(ss.units, (81 - 1) * (81 - 9));
    assert_eq!(ss.quotient_size, 1);
}

#[test]
fn mobius_orbits() {
    let tw = tower();
    let r2 = mobius_orbit_check(&tw, 2).unwrap();
    assert_eq!(r2.orbit_sizes, vec![5, 12]);
    assert_eq!((r2.superspecial_orbit, r2.case_two_orbit), (Some(5), Some(12)));
    assert!(r2.classification_invariant);
    let r3 = mobius_orbit_check(&tw, 3).unwrap();
    assert_eq!(r3.orbit_sizes, vec![10, 72]);
    assert!(r3.classification_invariant && r3.rest_separated);
    assert!(mobius_orbit_check(&tw, 5).is_err());
    // generators reproduce the full group's orbits
    assert_eq!(mobius_orbits_by_generators(&tw, 3, 4).unwrap(), r3);
    let big = mobius_orbits_by_generators(&tw, 2, 8).unwrap();
    assert!(big.rest_separated && big.classification_invariant);
    assert_eq!((big.superspecial_orbit, big.case_two_orbit), (Some(5), Some(12)));
}

#[test]
fn y_locus_rule() {
    let tw = tower();
    let y2 = y_locus(&tw, 2).unwrap();
    assert!(y2.whole_line);
    assert!(y2.verification.unwrap().iter().all(|e| e.member));
    let y3 = y_locus(&tw, 3).unwrap();
    assert_eq!(y3.description, "P1(F_3^4)");
    let list = y3.verification.unwrap();
    assert_eq!(list.len(), 83);
    for e in &list {
        assert_eq!(e.member, e.t != SurfaceParameter::Generic);
    }
    let y5 = y_locus(&tw, 5).unwrap();
    assert!(!y5.whole_line && y5.verification.is_none());
}

#[test]
fn rejects_bad_points() {
    let tw = tower();
    let f = tw.field(3, 4).unwrap();
    assert!(SurfaceParameter::point(f.zero(), f.zero()).is_err());
    assert!(build_mt(&tw, 3, &SurfaceParameter::Generic, 4).is_err());
    let t = SurfaceParameter::point(f.one(), f.one()).unwrap();
    assert!(build_mt(&tw, 2, &t, 4).is_err());
}
