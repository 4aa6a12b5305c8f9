use proptest::prelude::*;

use super::*;

#[test]
fn table_entries_are_conway() {
    // regenerate the small entries independently and compare
    let table = FieldTable::builtin();
    assert_eq!(table.get(2, 4).unwrap(), &vec![1, 1, 0, 0, 1]);
    assert_eq!(table.get(3, 2).unwrap(), &vec![2, 2, 1]);
    assert_eq!(table.get(2, 8).unwrap(), &vec![1, 0, 1, 1, 1, 0, 0, 0, 1]);
    for p in [2u64, 3, 5] {
        let mut found: std::collections::HashMap<usize, Vec<u64>> = Default::default();
        for m in 1..=4 {
            let f = conway::search(p, m, &|d| found[&d].clone());
            assert_eq!(table.get(p, m).unwrap(), &f, "({p},{m})");
            found.insert(m, f);
        }
    }
    for ((p, _), f) in table.entries() {
        assert!(fp_poly::is_irreducible(f, *p));
        assert!(conway::is_primitive(f, *p));
    }
}

#[test]
fn unsupported_fields() {
    assert!(matches!(make_field(4, 1), Err(Error::UnsupportedField { .. })));
    assert!(matches!(make_field(2, 9), Err(Error::UnsupportedField { .. })));
    assert!(make_field(31, 8).is_ok());
}

#[test]
fn conway_embeddings_commute_with_norms() {
    let tower = Tower::default();
    let f2 = make_field(3, 2).unwrap();
    let f4 = make_field(3, 4).unwrap();
    let e = tower.embedding(&f2, &f4).unwrap();
    // generator of F_9 maps to g^((81-1)/(9-1)) and satisfies the F_9 modulus
    assert_eq!(e.image, f4.generator().pow(10));
    let g = e.image.clone();
    let val = g.square().add(&g.scale(2)).add(&f4.from_int(2));
    assert!(val.is_zero());
}

#[test]
fn on_demand_field_and_embedding() {
    let tower = Tower::default();
    let k = tower.field(2, 12).unwrap();
    assert_eq!(k.origin(), FieldOrigin::LeastIrreducible);
    let f4 = tower.field(2, 4).unwrap();
    let e = tower.embedding(&f4, &k).unwrap();
    let a = f4.generator();
    let b = f4.generator().square().add(&f4.one());
    assert_eq!(e.apply(&a.mul(&b)), e.apply(&a).mul(&e.apply(&b)));
    assert_eq!(e.apply(&a.add(&b)), e.apply(&a).add(&e.apply(&b)));
}

#[test]
fn additive_solver_uses_smallest_extension() {
    let tower = Tower::default();
    let f = make_field(2, 1).unwrap();
    // x^2 + x + 1 = 0 has no root in F_2 but does in F_4
    let coeffs = vec![f.one(), f.one()];
    let sol = solve_additive(&tower, &coeffs, &f.one(), &ExtensionPolicy::default()).unwrap();
    assert_eq!(sol.field.degree(), 2);
    let x = sol.x;
    assert!(x.square().add(&x).add(&sol.field.one()).is_zero());
    // x^4 - x has nonzero roots already in F_2
    let r = additive_nonzero_root(&tower, &[f.one(), f.zero(), f.from_int(-1)], &ExtensionPolicy::default()).unwrap();
    assert_eq!(r.field.degree(), 1);
    // bounded policy
    let tight = ExtensionPolicy { max_degree: 1 };
    assert!(matches!(
        solve_additive(&tower, &coeffs, &f.one(), &tight),
        Err(Error::ExtensionExhausted { .. })
    ));
}

proptest! {
    #[test]
    fn field_axioms(i in 0u128..625, j in 0u128..625) {
        let f = make_field(5, 4).unwrap();
        let (a, b) = (f.element_from_index(i), f.element_from_index(j));
        prop_assert_eq!(a.mul(&b).frobenius(1), a.frobenius(1).mul(&b.frobenius(1)));
        prop_assert_eq!(a.frobenius(4), a.clone());
        prop_assert_eq!(a.frobenius(1), a.pow(5));
        if !a.is_zero() {
            prop_assert!(a.mul(&a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn additive_solutions_verify(seed in any::<u64>()) {
        let tower = Tower::default();
        let f = make_field(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<FqElement> = (0..3).map(|_| f.random(&mut rng)).collect();
        let rhs = f.random(&mut rng);
        if let Ok(sol) = solve_additive(&tower, &coeffs, &rhs, &ExtensionPolicy::default()) {
            let e = tower.embedding(&f, &sol.field).unwrap();
            let x = &sol.x;
            let val = e.apply(&coeffs[0]).mul(&x.pow(9))
                .add(&e.apply(&coeffs[1]).mul(&x.pow(3)))
                .add(&e.apply(&coeffs[2]).mul(x));
            prop_assert_eq!(val, e.apply(&rhs));
        }
    }
}
