//! Boundary degenerations h_I of a spherical subalgebra.

use crate::cones::{compression_subcones, CompressionSubcones};
use crate::error::{Error, Result};
use crate::liecore::json::vector_to_json;
use crate::liecore::{LieAlgebra, RootDecomposition, Subspace};
use crate::rational::{add, dot, is_zero_vec, sub, QMatrix, Q};
use crate::sphstruct::{adapted_parabolic_at, analyze, nonpositive_cone, strict_witness, Check, SphericalDatum, TEntry};
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

/// Is `x` an ℕ₀-combination of `gens`? `x0` must satisfy g(x0) < 0 for every generator.
pub fn in_monoid(x: &[Q], gens: &[Vec<Q>], x0: &[Q]) -> bool {
    fn rec(x: &[Q], gens: &[Vec<Q>], x0: &[Q]) -> bool {
        if is_zero_vec(x) {
            return true;
        }
        let Some((g, rest)) = gens.split_first() else { return false };
        let hx = -dot(x, x0);
        if !hx.is_positive() {
            return false;
        }
        let hg = -dot(g, x0);
        let mut cur = x.to_vec();
        let mut k = Q::zero();
        while &k * &hg <= hx {
            if rec(&cur, rest, x0) {
                return true;
            }
            cur = sub(&cur, g);
            k += Q::from_integer(1.into());
        }
        false
    }
    rec(x, gens, x0)
}

/// A point where every spherical root is negative (exists since S lies in an open half space).
fn height_point(d: &SphericalDatum) -> Vec<Q> {
    let neg: Vec<Vec<Q>> = d.s.iter().map(|v| v.iter().map(|x| -x).collect()).collect();
    strict_witness(d.split.a_z.dim(), &neg).unwrap_or_else(|| vec![Q::zero(); d.split.a_z.dim()])
}

/// I ⊆ S given by indices into `datum.s`.
#[derive(Clone, Debug)]
pub struct DegenerationDatum {
    pub i: Vec<usize>,
    pub h_i: Subspace,
    pub h_i_hat: Subspace,
    /// a_I as a subspace of g
    pub a_i: Subspace,
    pub ti_table: Vec<TEntry>,
    pub subcones: CompressionSubcones,
    pub checks: Vec<Check>,
}

impl DegenerationDatum {
    pub fn verified(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "I": self.i,
            "h_I": self.h_i.basis().iter().map(|b| vector_to_json(b)).collect::<Vec<_>>(),
            "h_I_hat": self.h_i_hat.basis().iter().map(|b| vector_to_json(b)).collect::<Vec<_>>(),
            "a_I": self.a_i.basis().iter().map(|b| vector_to_json(b)).collect::<Vec<_>>(),
            "checks": self.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed})).collect::<Vec<_>>(),
        })
    }
}

/// T_I: keep X_{α,β} exactly when α + β ∈ ⟨I⟩.
pub fn truncated_t_table(d: &SphericalDatum, i: &[usize]) -> Vec<TEntry> {
    let x0 = height_point(d);
    let gens: Vec<Vec<Q>> = i.iter().map(|&k| d.s[k].clone()).collect();
    let keep = |f: &crate::liecore::LinearFunctional| in_monoid(&d.on_az(f), &gens, &x0);
    d.t_table
        .iter()
        .map(|e| {
            let n = e.x_minus.len();
            TEntry {
                alpha: e.alpha.clone(),
                x_minus: e.x_minus.clone(),
                root_components: e.root_components.iter().filter(|(b, _)| keep(&e.alpha.add(b))).cloned().collect(),
                zero_component: if keep(&e.alpha) { e.zero_component.clone() } else { vec![Q::zero(); n] },
            }
        })
        .collect()
}

/// h_I = (l ∩ h) + span{X_{−α} + T_I(X_{−α})}.
pub fn h_i_explicit(d: &SphericalDatum, i: &[usize]) -> Result<DegenerationDatum> {
    if i.iter().any(|&k| k >= d.s.len()) {
        return Err(Error::Verification("index outside S".into()));
    }
    let mut i: Vec<usize> = i.to_vec();
    i.sort();
    i.dedup();
    let g = &d.g;
    let n = g.dim();
    let ti_table = truncated_t_table(d, &i);
    let mut vecs: Vec<Vec<Q>> = d.lh.basis().to_vec();
    for e in &ti_table {
        vecs.push(add(&e.x_minus, &e.t_value()));
    }
    let h_i = Subspace::span(n, &vecs);
    let subcones = compression_subcones(d.split.a_z.dim(), &d.s, &i);
    let a_i = Subspace::span(n, &subcones.a_i.basis().iter().map(|c| d.az_vector(c)).collect::<Vec<_>>());
    let h_i_hat = h_i.sum(&a_i)?;
    let checks = vec![
        Check { name: "h_I is a subalgebra".into(), passed: g.is_subalgebra(&h_i) },
        Check { name: "dim h_I = dim h".into(), passed: h_i.dim() == d.h.dim() },
        Check { name: "a_I normalizes h_I".into(), passed: g.brackets_into(&a_i, &h_i, &h_i) },
        Check { name: "h_I contains l cap h".into(), passed: h_i.contains_subspace(&d.lh) },
        Check { name: "h_I_hat is a subalgebra".into(), passed: g.is_subalgebra(&h_i_hat) },
    ];
    Ok(DegenerationDatum { i, h_i, h_i_hat, a_i, ti_table, subcones, checks })
}

/// lim_{t→∞} e^{t·grading} V for a grading given by basis vectors with grades.
pub fn initial_subspace_graded(v: &Subspace, basis: &[Vec<Q>], grades: &[Q]) -> Subspace {
    let n = v.ambient();
    // order the graded basis by descending grade
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by(|&a, &b| grades[b].cmp(&grades[a]));
    let mut bm = QMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        for r in 0..n {
            bm[(r, col)] = basis[k][r].clone();
        }
    }
    let inv = bm.inverse().expect("graded basis spans the ambient space");
    let rows: Vec<Vec<Q>> = v.basis().iter().map(|b| inv.mul_vec(b)).collect();
    if rows.is_empty() {
        return Subspace::zero(n);
    }
    let (r, pivots) = QMatrix::from_rows(n, &rows).rref();
    let mut out = Vec::new();
    for (row, &p) in pivots.iter().enumerate() {
        let top = &grades[order[p]];
        let mut w = vec![Q::zero(); n];
        for col in 0..n {
            if &grades[order[col]] == top && !r[(row, col)].is_zero() {
                crate::rational::axpy(&r[(row, col)], &basis[order[col]], &mut w);
            }
        }
        out.push(w);
    }
    Subspace::span(n, &out)
}

/// Initial subspace for the grading of g by α(X), X ∈ a.
pub fn initial_subspace(v: &Subspace, rd: &RootDecomposition, x: &[Q]) -> Subspace {
    let xc = rd.torus.coords(x).expect("X lies in the torus");
    let (basis, weights) = rd.adapted_basis();
    let grades: Vec<Q> = weights.iter().map(|w| w.eval(&xc)).collect();
    initial_subspace_graded(v, &basis, &grades)
}

/// One sample of the limit comparison.
#[derive(Clone, Debug)]
pub struct ConsistencySample {
    pub x: Vec<Q>,
    pub limit: Subspace,
    pub matches: bool,
}

/// Compares the leading-term limit of h along each sample X ∈ a_I^{--} (a_Z
/// coordinates) with h_I.
pub fn degeneration_consistency(d: &SphericalDatum, dd: &DegenerationDatum, samples: &[Vec<Q>]) -> Result<Vec<ConsistencySample>> {
    let mut out = Vec::new();
    for c in samples {
        if !dd.subcones.is_interior(c) {
            return Err(Error::NotInInteriorCone);
        }
        let x = d.az_vector(c);
        let limit = initial_subspace(&d.h, &d.parabolic.roots, &x);
        out.push(ConsistencySample { matches: limit == dd.h_i, x, limit });
    }
    Ok(out)
}

/// Re-analysis of (g, h_I, P).
#[derive(Clone, Debug)]
pub struct DegenerateSpaceReport {
    pub datum: SphericalDatum,
    pub checks: Vec<Check>,
}

impl DegenerateSpaceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn verify_degenerate_space(d: &SphericalDatum, dd: &DegenerationDatum) -> Result<DegenerateSpaceReport> {
    let di = analyze(&d.g, &dd.h_i, &d.parabolic)?;
    let at_x = adapted_parabolic_at(&d.g, &dd.h_i, &d.parabolic, &d.adapted.x);
    let ifs: Vec<Vec<Q>> = dd.i.iter().map(|&k| d.s[k].clone()).collect();
    let same_az = di.split.a_z == d.split.a_z;
    let mut checks = vec![
        Check { name: "P h_I open".into(), passed: crate::sphstruct::check_open_orbit(&d.g, &dd.h_i, &d.parabolic) },
        Check { name: "Q adapted to h_I".into(), passed: at_x.verified() && di.l() == d.l() && di.u() == d.u() },
        Check { name: "a_{Z_I} = a_Z".into(), passed: same_az },
    ];
    let cone_ok = same_az && di.compression_cone == nonpositive_cone(d.split.a_z.dim(), &ifs);
    checks.push(Check { name: "compression cone of Z_I".into(), passed: cone_ok });
    let edge_ok = same_az && {
        let lin = Subspace::span(d.split.a_z.dim(), &di.compression_cone.lineality().iter().map(|l| crate::rational::ints_to_q(l)).collect::<Vec<_>>());
        lin == dd.subcones.a_i
    };
    checks.push(Check { name: "edge of Z_I is a_I".into(), passed: edge_ok });
    Ok(DegenerateSpaceReport { datum: di, checks })
}

/// (h_J)_I = h_I for I ⊆ J, with (h_J)_I taken as the leading-term limit of h_J along
/// a point of a_I^{--}.
pub fn transitivity_check(d: &SphericalDatum, i: &[usize], j: &[usize]) -> Result<bool> {
    if !i.iter().all(|k| j.contains(k)) {
        return Err(Error::Verification("I is not a subset of J".into()));
    }
    let di = h_i_explicit(d, i)?;
    let dj = h_i_explicit(d, j)?;
    let Some(c) = di.subcones.interior_point() else {
        return Err(Error::NotInInteriorCone);
    };
    let lim = initial_subspace(&dj.h_i, &d.parabolic.roots, &d.az_vector(&c));
    Ok(lim == di.h_i)
}

/// β̃_I and β_I as maxima of finitely many functionals on a_Z.
#[derive(Clone, Debug)]
pub struct BetaFunctionals {
    /// S ∖ I
    pub strict: Vec<Vec<Q>>,
    /// the weight set ℱ
    pub f: Vec<Vec<Q>>,
    pub f_complete: bool,
}

impl BetaFunctionals {
    pub fn beta_tilde(&self, x: &[Q]) -> Q {
        self.strict.iter().map(|s| dot(s, x)).max().expect("S \\ I is nonempty")
    }

    pub fn beta(&self, x: &[Q]) -> Q {
        self.strict.iter().chain(&self.f).map(|s| dot(s, x)).max().expect("S \\ I is nonempty")
    }
}

/// `f` is the weight set ℱ on a_Z when known; otherwise ℱ = ∅ and the result is
/// flagged incomplete.
pub fn beta_functionals(d: &SphericalDatum, i: &[usize], f: Option<(Vec<Vec<Q>>, bool)>) -> Result<BetaFunctionals> {
    let strict: Vec<Vec<Q>> = (0..d.s.len()).filter(|k| !i.contains(k)).map(|k| d.s[k].clone()).collect();
    if strict.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    let (f, f_complete) = f.unwrap_or((Vec::new(), false));
    Ok(BetaFunctionals { strict, f, f_complete })
}

/// All subsets of {0, …, n−1} in order of size, then lexicographically.
pub fn subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..1usize << n).map(|m| (0..n).filter(|k| m >> k & 1 == 1).collect()).collect();
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// Largest principal-angle sine between e^{t ad X} h and h_I computed in floating point.
pub fn numeric_limit_distance(g: &LieAlgebra, d: &SphericalDatum, dd: &DegenerationDatum, x: &[Q], t: f64) -> f64 {
    let n = g.dim();
    let rd = &d.parabolic.roots;
    let xc = rd.torus.coords(x).expect("X in a");
    let (basis, weights) = rd.adapted_basis();
    let bm = QMatrix::from_rows(n, &basis).transpose();
    let inv = bm.inverse().expect("adapted basis");
    let grades: Vec<f64> = weights.iter().map(|w| crate::rational::q_to_f64(&w.eval(&xc))).collect();
    let gmax = grades.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let to_f = |v: &[Q]| -> Vec<f64> { v.iter().map(crate::rational::q_to_f64).collect() };
    // moved basis: components scaled by e^{t(grade − gmax)} to keep magnitudes bounded
    let moved: Vec<Vec<f64>> = d
        .h
        .basis()
        .iter()
        .map(|b| {
            let c = to_f(&inv.mul_vec(b));
            let mut w = vec![0.0; n];
            for (k, ck) in c.iter().enumerate() {
                let s = ck * (t * (grades[k] - gmax)).exp();
                for r in 0..n {
                    w[r] += s * crate::rational::q_to_f64(&basis[k][r]);
                }
            }
            w
        })
        .collect();
    let target: Vec<Vec<f64>> = dd.h_i.basis().iter().map(|b| to_f(b)).collect();
    subspace_distance(&moved, &target)
}

fn orthonormalize(vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let p: f64 = w.iter().zip(u).map(|(a, b)| a * b).sum();
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= p * ui;
                }
            }
        }
        let nrm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm > 1e-300 {
            out.push(w.iter().map(|x| x / nrm).collect());
        }
    }
    out
}

/// max over unit vectors of V of the distance to W (V, W of equal dimension).
fn subspace_distance(v: &[Vec<f64>], w: &[Vec<f64>]) -> f64 {
    let v = orthonormalize(v);
    let w = orthonormalize(w);
    let mut worst: f64 = 0.0;
    for x in &v {
        let mut r = x.clone();
        for u in &w {
            let p: f64 = x.iter().zip(u).map(|(a, b)| a * b).sum();
            for (ri, ui) in r.iter_mut().zip(u) {
                *ri -= p * ui;
            }
        }
        worst = worst.max(r.iter().map(|a| a * a).sum::<f64>().sqrt());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liecore::builtins::sl2;
    use crate::rational::{ivec, q};
    use crate::sphstruct::ParabolicDatum;

    fn sl2_datum(h: &[i64]) -> SphericalDatum {
        let a = Subspace::span(3, &[ivec(&[1, 0, 0])]);
        let p = ParabolicDatum::new(&sl2(), &a, &ivec(&[1, 0, 0])).unwrap();
        analyze(&sl2(), &Subspace::span(3, &[ivec(h)]), &p).unwrap()
    }

    #[test]
    fn monoid_membership() {
        let x0 = ivec(&[-1, -1]);
        let gens = vec![ivec(&[2, 0]), ivec(&[0, 3])];
        assert!(in_monoid(&ivec(&[4, 3]), &gens, &x0));
        assert!(!in_monoid(&ivec(&[3, 3]), &gens, &x0));
        assert!(in_monoid(&ivec(&[0, 0]), &[], &x0));
        assert!(!in_monoid(&ivec(&[2, 0]), &[], &x0));
        assert!(!in_monoid(&ivec(&[-2, 0]), &gens, &x0));
    }

    #[test]
    fn sl2_so2_degenerations() {
        let d = sl2_datum(&[0, 1, -1]);
        let d0 = h_i_explicit(&d, &[]).unwrap();
        assert_eq!(d0.h_i, Subspace::span(3, &[ivec(&[0, 0, 1])]));
        assert!(d0.verified());
        assert_eq!(d0.h_i_hat, Subspace::span(3, &[ivec(&[1, 0, 0]), ivec(&[0, 0, 1])]));
        let ds = h_i_explicit(&d, &[0]).unwrap();
        assert_eq!(ds.h_i, d.h);
        let rep = verify_degenerate_space(&d, &d0).unwrap();
        assert!(rep.passed(), "{:?}", rep.checks);
        assert!(rep.datum.s.is_empty());
        let rep = verify_degenerate_space(&d, &ds).unwrap();
        assert!(rep.passed(), "{:?}", rep.checks);
    }

    #[test]
    fn sl2_so11_degeneration() {
        let d = sl2_datum(&[0, 1, 1]);
        assert_eq!(h_i_explicit(&d, &[]).unwrap().h_i, Subspace::span(3, &[ivec(&[0, 0, 1])]));
    }

    #[test]
    fn initial_subspace_examples() {
        let d = sl2_datum(&[0, 1, -1]);
        let rd = &d.parabolic.roots;
        let mh = ivec(&[-1, 0, 0]);
        let v = Subspace::span(3, &[ivec(&[0, 1, -1])]);
        assert_eq!(initial_subspace(&v, rd, &mh), Subspace::span(3, &[ivec(&[0, 0, 1])]));
        let v = Subspace::span(3, &[ivec(&[0, 1, -1]), ivec(&[1, 0, 0])]);
        assert_eq!(initial_subspace(&v, rd, &mh), Subspace::span(3, &[ivec(&[0, 0, 1]), ivec(&[1, 0, 0])]));
        let graded = Subspace::span(3, &[ivec(&[0, 1, 0])]);
        assert_eq!(initial_subspace(&graded, rd, &mh), graded);
    }

    #[test]
    fn consistency_and_interior() {
        let d = sl2_datum(&[0, 1, -1]);
        let d0 = h_i_explicit(&d, &[]).unwrap();
        let rep = degeneration_consistency(&d, &d0, &[ivec(&[-1]), ivec(&[-5])]).unwrap();
        assert!(rep.iter().all(|s| s.matches));
        assert!(matches!(degeneration_consistency(&d, &d0, &[ivec(&[1])]), Err(Error::NotInInteriorCone)));
        assert!(numeric_limit_distance(&d.g, &d, &d0, &ivec(&[-1, 0, 0]), 1000.0) < 1e-8);
    }

    #[test]
    fn beta_values() {
        let d = sl2_datum(&[0, 1, -1]);
        let b = beta_functionals(&d, &[], None).unwrap();
        assert_eq!(b.beta_tilde(&ivec(&[-1])), q(-4));
        assert!(!b.f_complete);
        assert!(matches!(beta_functionals(&d, &[0], None), Err(Error::EmptyIndexSet)));
    }

    #[test]
    fn subsets_order() {
        assert_eq!(subsets(2), vec![vec![], vec![0], vec![1], vec![0, 1]]);
    }
}
