use super::*;

fn census(p: u64) -> SupersingularCensus {
    enumerate_supersingular(&Tower::default(), p).unwrap()
}

fn prime_field_values(c: &SupersingularCensus) -> Vec<u64> {
    c.j_invariants.iter().map(|j| {
        assert!(j.in_subfield(1));
        j.coeffs()[0]
    }).collect()
}

#[test]
fn small_censuses() {
    let c = census(11);
    assert_eq!(c.count, 2);
    assert_eq!(prime_field_values(&c), vec![0, 1]);
    assert_eq!(c.automorphisms, vec![6, 4]);
    let c = census(13);
    assert_eq!(prime_field_values(&c), vec![5]);
    assert_eq!(c.mass, Q::new(1, 2));
    let c = census(2);
    assert_eq!(prime_field_values(&c), vec![0]);
    assert_eq!(c.automorphisms, vec![24]);
    let c = census(3);
    assert_eq!(prime_field_values(&c), vec![0]);
    assert_eq!(c.automorphisms, vec![12]);
}

#[test]
fn censuses_up_to_31() {
    let expected = [(2, 1), (3, 1), (5, 1), (7, 1), (11, 2), (13, 1), (17, 2), (19, 2), (23, 3), (29, 3), (31, 3)];
    for (p, n) in expected {
        let c = census(p);
        assert!(c.disagreements.is_empty(), "p={p}: {:?}", c.disagreements);
        assert_eq!(c.count, n, "p={p}");
        assert!(mass_check(&c).holds, "p={p}");
        let base = (p / 12) as usize;
        assert!((base..=base + 2).contains(&c.count));
        if p > 2 {
            assert!(compare_formulas(&c).classical_matches, "p={p}");
        }
    }
}

#[test]
fn printed_formula_values() {
    assert_eq!(legendre(-3, 11), -1);
    assert_eq!(legendre(-4, 11), -1);
    assert_eq!(eichler_formula_as_printed(11).unwrap(), Q::new(19, 3));
    assert_eq!(eichler_formula_as_printed(7).unwrap(), Q::new(11, 3));
    assert_eq!(eichler_formula_as_printed(5).unwrap(), Q::new(8, 3));
    assert!(!eichler_formula_as_printed(5).unwrap().is_integer());
    assert_eq!(eichler_formula_as_printed(2), Err(Error::EvenPrime));
    assert_eq!(eichler_formula_classical(11).unwrap(), Q::from_integer(2));
    let cmp = compare_formulas(&census(11));
    assert!(!cmp.printed_matches && cmp.classical_matches);
}

#[test]
fn census_rejects_out_of_range() {
    assert!(matches!(enumerate_supersingular(&Tower::default(), 103), Err(Error::OutOfRange(_))));
    assert!(matches!(enumerate_supersingular(&Tower::default(), 9), Err(Error::OutOfRange(_))));
}

#[test]
fn weierstrass_invariants() {
    let f = Tower::default().field(7, 1).unwrap();
    let c = |k: i64| f.from_int(k);
    // y^2 = x^3 + x has j = 1728 = 6 mod 7 and 8 points over F_7
    let e = Weierstrass([c(0), c(0), c(0), c(1), c(0)]);
    assert_eq!(e.j_invariant(), Some(c(1728)));
    assert_eq!(e.point_count(), 8);
    assert_eq!(e.automorphisms(), 2);
    let singular = Weierstrass([c(0), c(0), c(0), c(0), c(0)]);
    assert_eq!(singular.j_invariant(), None);
}
