use super::*;
use crate::dieudonne::a_number;
use crate::fields::Tower;

fn ring(p: u64, m: usize) -> WittRing {
    Tower::default().witt_ring(p, m, 4).unwrap()
}

#[test]
fn zero_map_returns_base() {
    let w = ring(3, 2);
    let base = NormanDatum::superspecial(&w, 2);
    let rel = deform(&base, &DeformationMap::zero(w.field(), 2, 2, 3)).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(&rel.rows[i][j].base, base.matrix().get(i, j));
            assert!(rel.rows[i][j].eps.is_zero());
        }
    }
    let t = tangent_frobenius(&base, &DeformationMap::zero(w.field(), 2, 2, 1)).unwrap();
    assert!(t.is_zero());
    assert_eq!(a_number(&base.special_fiber().unwrap()), 2);
}

#[test]
fn dual_number_example() {
    // g = h = 1, d = (t): F e_1 = e_2 + T e_1
    let w = ring(5, 1);
    let base = NormanDatum::superspecial(&w, 1);
    let d = DeformationMap::from_residues(w.field(), &[vec![w.field().one()]]);
    let rel = deform(&base, &d).unwrap();
    assert_eq!(rel.rows[0][1].base, w.one());
    assert!(rel.rows[0][1].eps.is_zero());
    assert!(rel.rows[0][0].base.is_zero());
    assert_eq!(rel.rows[0][0].eps.coeffs, vec![w.field().one()]);
    // V-relation untouched
    assert!(rel.rows[1][1].eps.is_zero() && rel.rows[1][0].eps.is_zero());
}

#[test]
fn universal_tangent_is_indeterminate_matrix() {
    let w = ring(2, 1);
    for g in 1..=3 {
        let base = NormanDatum::superspecial(&w, g);
        let t = tangent_frobenius(&base, &DeformationMap::universal(w.field(), g)).unwrap();
        for i in 0..g {
            for j in 0..g {
                assert!(t.constant[i][j].is_zero());
                assert_eq!(t.linear[i][j], LinearForm::coordinate(w.field(), g * g, i * g + j, &w.field().one()));
            }
        }
        assert_eq!(t.linear_rank(), g * g);
        assert!(t.cuts_out_origin());
    }
}

#[test]
fn parametrization_is_injective_at_first_order() {
    // all 2x2 maps over F_2 and all 1x1 maps over F_4
    let w = ring(2, 1);
    let base = NormanDatum::superspecial(&w, 2);
    let f = w.field();
    let mut seen = Vec::new();
    for bits in 0..16u32 {
        let c: Vec<Vec<_>> =
            (0..2).map(|r| (0..2).map(|s| f.from_int(((bits >> (2 * r + s)) & 1) as i64)).collect()).collect();
        let d = DeformationMap::from_residues(f, &c);
        let rel = deform(&base, &d).unwrap();
        assert!(!seen.contains(&rel));
        let t = tangent_frobenius(&base, &d).unwrap();
        assert_eq!(t.is_zero(), bits == 0);
        seen.push(rel);
    }
    let w4 = ring(2, 2);
    let base = NormanDatum::superspecial(&w4, 1);
    let rels: Vec<_> = w4
        .field()
        .elements()
        .map(|x| deform(&base, &DeformationMap::from_residues(w4.field(), &[vec![x]])).unwrap())
        .collect();
    for i in 0..rels.len() {
        for j in 0..i {
            assert_ne!(rels[i], rels[j]);
        }
    }
}

#[test]
fn shape_and_dimension_errors() {
    let w = ring(3, 1);
    let a = Matrix::identity(&w, 2);
    let base = NormanDatum::new(1, 1, a).unwrap();
    let d = DeformationMap::universal(w.field(), 1);
    assert!(matches!(tangent_frobenius(&base, &d), Err(Error::NotSuperspecialShape(_))));
    assert!(deform(&base, &d).is_ok());
    let ss = NormanDatum::superspecial(&w, 2);
    assert!(matches!(deform(&ss, &d), Err(Error::DimensionMismatch(_))));
    assert!(matches!(NormanDatum::new(2, 1, Matrix::identity(&w, 2)), Err(Error::DimensionMismatch(_))));
}

#[test]
fn first_order_arithmetic_matches_split() {
    let w = ring(3, 2);
    let f = w.field();
    let x = FirstOrder { base: w.from_int(4), eps: LinearForm::coordinate(f, 2, 0, &f.from_int(1)) };
    let y = FirstOrder { base: w.from_int(2), eps: LinearForm::coordinate(f, 2, 1, &f.from_int(2)) };
    let xy = x.mul(&y);
    assert_eq!(xy.base, w.from_int(8));
    // 4 = 1 mod 3, so eps = 2 t_0 + 2 t_1
    assert_eq!(xy.eps.coeffs, vec![f.from_int(2), f.from_int(2)]);
    assert_eq!(x.add(&y).base, w.from_int(6));
}
