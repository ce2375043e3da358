use proptest::prelude::*;
use sphct_core::liecore::builtins::{sl, sl2, sl2_sl2};
use sphct_core::liecore::{LieAlgebra, Subspace};
use sphct_core::rational::{add, ivec, q, qr, Q};
use sphct_core::sphstruct::{analyze, analyze_with, nonpositive_cone, ParabolicDatum, SphericalDatum};

fn sl2_p() -> ParabolicDatum {
    let a = Subspace::span(3, &[ivec(&[1, 0, 0])]);
    ParabolicDatum::new(&sl2(), &a, &ivec(&[1, 0, 0])).unwrap()
}

fn structural_invariants(d: &SphericalDatum) {
    let n = d.g.dim();
    // g = h ⊕ lh_perp ⊕ u
    assert_eq!(d.h.dim() + d.lh_perp.dim() + d.u().dim(), n);
    let sum = d.h.sum(&d.lh_perp).unwrap().sum(d.u()).unwrap();
    assert_eq!(sum.dim(), n);
    for e in &d.t_table {
        assert!(d.h.contains(&add(&e.x_minus, &e.t_value())));
    }
    for m in &d.monoid_gens_a {
        assert!(m.restrict(&d.parabolic.a, &d.split.a_h).is_zero());
    }
    // both descriptions of the compression cone agree
    assert_eq!(d.compression_cone, nonpositive_cone(d.split.a_z.dim(), &d.monoid_gens));
    assert!(d.parabolic.verify(&d.g));
}

#[test]
fn second_generic_element_gives_same_roots() {
    let h = Subspace::span(3, &[ivec(&[0, 1, -1])]);
    let d0 = analyze(&sl2(), &h, &sl2_p()).unwrap();
    let d1 = analyze_with(&sl2(), &h, &sl2_p(), 1).unwrap();
    assert_ne!(d0.adapted.x, d1.adapted.x);
    assert_eq!(d0.s, d1.s);
    assert_eq!(d0.compression_cone, d1.compression_cone);

    let g = sl2_sl2();
    let h = Subspace::span(6, &[ivec(&[1, 0, 0, 1, 0, 0]), ivec(&[0, 1, 0, 0, 1, 0]), ivec(&[0, 0, 1, 0, 0, 1])]);
    let a = Subspace::span(6, &[ivec(&[1, 0, 0, 0, 0, 0]), ivec(&[0, 0, 0, 1, 0, 0])]);
    let p = ParabolicDatum::new(&g, &a, &ivec(&[1, 0, 0, -1, 0, 0])).unwrap();
    let d0 = analyze(&g, &h, &p).unwrap();
    let d1 = analyze_with(&g, &h, &p, 1).unwrap();
    assert_eq!(d0.s, d1.s);
    structural_invariants(&d0);
}

#[test]
fn torus_has_no_roots() {
    let g = LieAlgebra::abelian(2);
    let h = Subspace::zero(2);
    let a = Subspace::full(2);
    let p = ParabolicDatum::new(&g, &a, &ivec(&[0, 0])).unwrap();
    let d = analyze(&g, &h, &p).unwrap();
    assert_eq!(d.adapted.x, ivec(&[0, 0]));
    assert!(d.s.is_empty());
    assert_eq!(d.split.a_z.dim(), 2);
    assert_eq!(d.compression_cone.lineality().len(), 2);
    structural_invariants(&d);
}

#[test]
fn sl3_symmetric_subgroup() {
    // h = so(3) = span(E_ij − E_ji) inside sl(3)
    let g = sl(3).unwrap();
    let mut basis = Vec::new();
    for (i, j) in [(2, 5), (3, 6), (4, 7)] {
        let mut v = vec![q(0); 8];
        v[i] = q(1);
        v[j] = q(-1);
        basis.push(v);
    }
    let h = Subspace::span(8, &basis);
    let a = Subspace::span(8, &[ivec(&[1, 0, 0, 0, 0, 0, 0, 0]), ivec(&[0, 1, 0, 0, 0, 0, 0, 0])]);
    let p = ParabolicDatum::new(&g, &a, &ivec(&[3, 1, 0, 0, 0, 0, 0, 0])).unwrap();
    let d = analyze(&g, &h, &p).unwrap();
    structural_invariants(&d);
    // group case for symmetric spaces: S = 2·(simple roots)
    assert_eq!(d.s.len(), 2);
    assert!(d.unimodularity.unimodular());
}

proptest! {
    #[test]
    fn one_dimensional_h_transverse_to_p(num in -20i64..=20, den in 1i64..=7) {
        prop_assume!(num != 0);
        let c: Q = qr(num, den);
        let h = Subspace::span(3, &[vec![q(0), q(1), c.clone()]]);
        let d = analyze(&sl2(), &h, &sl2_p()).unwrap();
        structural_invariants(&d);
        prop_assert_eq!(d.t_table[0].t_value(), vec![q(0), q(1) / &c, q(0)]);
        prop_assert_eq!(d.s.clone(), vec![ivec(&[4])]);
    }
}
