use sphct_core::degen::{degeneration_consistency, h_i_explicit, initial_subspace, subsets, transitivity_check, verify_degenerate_space};
use sphct_core::liecore::builtins::{sl, sl2_sl2};
use sphct_core::liecore::Subspace;
use sphct_core::rational::{ivec, q};
use sphct_core::sphstruct::{analyze, ParabolicDatum, SphericalDatum};

fn diagonal() -> SphericalDatum {
    let g = sl2_sl2();
    let h = Subspace::span(6, &[ivec(&[1, 0, 0, 1, 0, 0]), ivec(&[0, 1, 0, 0, 1, 0]), ivec(&[0, 0, 1, 0, 0, 1])]);
    let a = Subspace::span(6, &[ivec(&[1, 0, 0, 0, 0, 0]), ivec(&[0, 0, 0, 1, 0, 0])]);
    let p = ParabolicDatum::new(&g, &a, &ivec(&[1, 0, 0, -1, 0, 0])).unwrap();
    analyze(&g, &h, &p).unwrap()
}

fn sl3_so3() -> SphericalDatum {
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
    analyze(&g, &h, &p).unwrap()
}

fn all_subsets_consistent(d: &SphericalDatum) {
    for i in subsets(d.s.len()) {
        let dd = h_i_explicit(d, &i).unwrap();
        assert!(dd.verified(), "{i:?}: {:?}", dd.checks);
        let samples = dd.subcones.interior_samples(6, 17);
        assert!(!samples.is_empty());
        for s in degeneration_consistency(d, &dd, &samples).unwrap() {
            assert!(s.matches, "I = {i:?}, X = {:?}", s.x);
        }
        let rep = verify_degenerate_space(d, &dd).unwrap();
        assert!(rep.passed(), "I = {i:?}: {:?}", rep.checks);
        for j in subsets(d.s.len()) {
            if i.iter().all(|k| j.contains(k)) {
                assert!(transitivity_check(d, &i, &j).unwrap());
            }
        }
    }
}

#[test]
fn diagonal_degenerations() {
    let d = diagonal();
    let d0 = h_i_explicit(&d, &[]).unwrap();
    // h_∅ = (l ∩ h) + ū
    let ubar = Subspace::span(6, &[ivec(&[0, 0, 1, 0, 0, 0]), ivec(&[0, 0, 0, 0, 1, 0])]);
    assert_eq!(d0.h_i, d.lh.sum(&ubar).unwrap());
    assert_eq!(h_i_explicit(&d, &[0]).unwrap().h_i, d.h);
    all_subsets_consistent(&d);
}

#[test]
fn sl3_so3_degenerations() {
    let d = sl3_so3();
    assert_eq!(d.s.len(), 2);
    all_subsets_consistent(&d);
}

#[test]
fn limit_is_independent_of_sample() {
    let d = diagonal();
    let x1 = d.az_vector(&ivec(&[-1]));
    let x2 = d.az_vector(&ivec(&[-7]));
    let rd = &d.parabolic.roots;
    assert_eq!(initial_subspace(&d.h, rd, &x1), initial_subspace(&d.h, rd, &x2));
}
