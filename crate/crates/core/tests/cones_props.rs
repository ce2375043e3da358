use num_traits::{Signed, Zero};
use proptest::prelude::*;
use sphct_core::cones::{iv, simplicial_subdivision, Cone, Location};
use sphct_core::rational::{ints_to_q, ivec, Q};

/// Brute-force vertex enumeration: for a full-dimensional pointed 3-dim cone given by
/// generators, the facet normals are the primitive cross products of generator pairs
/// that are nonnegative on all generators.
fn brute_facets(gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let (a, b) = (&gens[i], &gens[j]);
            let mut n = vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
            if n.iter().all(|x| *x == 0) {
                continue;
            }
            let g = n.iter().fold(0i64, |g, x| num_integer::gcd(g, *x));
            n.iter_mut().for_each(|x| *x /= g);
            for sign in [1, -1] {
                let m: Vec<i64> = n.iter().map(|x| sign * x).collect();
                let vals: Vec<i64> = gens.iter().map(|v| v.iter().zip(&m).map(|(p, q)| p * q).sum()).collect();
                let on = vals.iter().filter(|v| **v == 0).count();
                if vals.iter().all(|v| *v >= 0) && on >= 2 && !out.contains(&m) {
                    out.push(m);
                }
            }
        }
    }
    out.sort();
    out
}

fn gens_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    // vectors in the open upper half-space keep the cone pointed
    prop::collection::vec((-4i64..=4, -4i64..=4, 1i64..=4).prop_map(|(a, b, c)| vec![a, b, c]), 3..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn double_dual_is_identity(g in gens_strategy()) {
        let gens: Vec<_> = g.iter().map(|v| iv(v)).collect();
        let c = Cone::from_generators(3, &gens, &[]);
        prop_assert_eq!(c.dual().dual(), c);
    }

    #[test]
    fn facets_match_brute_force(g in gens_strategy()) {
        let gens: Vec<_> = g.iter().map(|v| iv(v)).collect();
        let c = Cone::from_generators(3, &gens, &[]);
        prop_assume!(c.dimension() == 3);
        let mut facets: Vec<Vec<i64>> = c.facets().iter().map(|f| f.iter().map(|x| i64::try_from(x).unwrap()).collect()).collect();
        facets.sort();
        prop_assert_eq!(facets, brute_facets(&g));
    }

    #[test]
    fn locate_agrees_with_halfspaces(g in gens_strategy(), pts in prop::collection::vec(prop::collection::vec(-20i64..=20, 3), 50)) {
        let gens: Vec<_> = g.iter().map(|v| iv(v)).collect();
        let c = Cone::from_generators(3, &gens, &[]);
        for p in pts {
            let x = ivec(&p);
            let vals: Vec<Q> = c.facets().iter().map(|f| ints_to_q(f).iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
            let eqs_ok = c.equations().iter().all(|e| ints_to_q(e).iter().zip(&x).map(|(a, b)| a * b).sum::<Q>().is_zero());
            let expect = if !eqs_ok || vals.iter().any(|v| v.is_negative()) {
                Location::Outside
            } else if vals.iter().any(|v| v.is_zero()) {
                Location::Boundary
            } else {
                Location::Interior
            };
            prop_assert_eq!(c.locate(&x), expect);
        }
    }

    #[test]
    fn subdivision_is_certified(g in gens_strategy()) {
        let gens: Vec<_> = g.iter().map(|v| iv(v)).collect();
        let c = Cone::from_generators(3, &gens, &[]);
        let fan = simplicial_subdivision(&c);
        let cert = fan.certify(2000, 11);
        prop_assert!(cert.passed(), "{:?}", cert);
        // every sampled support point has a chart limit
        for x in [c.generators_q().iter().fold(vec![Q::zero(); 3], |acc, v| acc.iter().zip(v).map(|(a, b)| a + b).collect())] {
            let lim = fan.chart_limit(&x).unwrap();
            prop_assert!(lim.exists);
        }
    }
}

#[test]
fn square_cone_fan_has_two_cones() {
    let gens = [iv(&[1, 1, 1]), iv(&[1, -1, 1]), iv(&[-1, 1, 1]), iv(&[-1, -1, 1])];
    let fan = simplicial_subdivision(&Cone::from_generators(3, &gens, &[]));
    assert_eq!(fan.cones.len(), 2);
    let cert = fan.certify(100_000, 2);
    assert!(cert.passed());
    assert_eq!(cert.sampled, 100_000);
}
