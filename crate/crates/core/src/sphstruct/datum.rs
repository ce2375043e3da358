use super::parabolic::{check_open_orbit, ParabolicDatum};
use crate::cones::Cone;
use crate::error::{Error, Result};
use crate::liecore::{LieAlgebra, LinearFunctional, Subspace};
use crate::rational::{ints_to_q, is_zero_vec, primitive, q, qr, zero_vec, QMatrix, Q};
use num_traits::{Signed, Zero};

/// Sup-norm bound of the generic element search.
pub const GENERIC_SEARCH_CAP: i64 = 32;

/// One named pass/fail condition.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

fn check(name: &str, passed: bool) -> Check {
    Check { name: name.to_string(), passed }
}

/// Q = LU adapted to (g, h, P) at a generic element X.
#[derive(Clone, Debug)]
pub struct AdaptedParabolic {
    pub x: Vec<Q>,
    pub l: Subspace,
    pub u: Subspace,
    /// Σ_u, as functionals on a
    pub sigma_u: Vec<LinearFunctional>,
    pub checks: Vec<Check>,
}

impl AdaptedParabolic {
    pub fn q(&self) -> Subspace {
        self.l.sum(&self.u).expect("same ambient")
    }

    pub fn verified(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Conditions on a candidate X ∈ a: α(X) ≥ 0 on Σ_n, u ⊆ n, l ⊇ m + a, q + h = g,
/// q ∩ h = l ∩ h, and the noncompact part l_n of l inside h.
pub fn adapted_parabolic_at(g: &LieAlgebra, h: &Subspace, p: &ParabolicDatum, x: &[Q]) -> AdaptedParabolic {
    let rd = &p.roots;
    let xc = p.a.coords(x).expect("X lies in a");
    let l = rd.sum_where(|b| b.eval(&xc).is_zero());
    let u = rd.sum_where(|b| b.eval(&xc).is_positive());
    let sigma_u: Vec<LinearFunctional> = rd.roots().into_iter().filter(|b| b.eval(&xc).is_positive()).collect();
    let mut checks = vec![check("dominant on positive roots", p.positive.iter().all(|b| !b.eval(&xc).is_negative()))];
    checks.push(check("u in n", p.n.contains_subspace(&u)));
    let ma = p.m.sum(&p.a).expect("same ambient");
    checks.push(check("l contains m + a", l.contains_subspace(&ma)));
    let qq = l.sum(&u).expect("same ambient");
    checks.push(check("q + h = g", qq.sum(h).expect("same ambient").dim() == g.dim()));
    let lh = l.intersection(h).expect("same ambient");
    checks.push(check("q cap h = l cap h", qq.intersection(h).expect("same ambient") == lh));
    let gens = rd.sum_where(|b| !b.is_zero() && b.eval(&xc).is_zero());
    let ln = g.ideal_generated(&l, &gens);
    checks.push(check("l_n in l cap h", lh.contains_subspace(&ln)));
    AdaptedParabolic { x: x.to_vec(), l, u, sigma_u, checks }
}

/// a ∩ (h + n)^⊥ with respect to κ.
pub fn generic_search_space(g: &LieAlgebra, h: &Subspace, p: &ParabolicDatum) -> Subspace {
    let hn = h.sum(&p.n).expect("same ambient");
    // {X ∈ a : κ(X, v) = 0 for v ∈ h + n}
    let ab = p.a.basis();
    let mut mat = QMatrix::zeros(hn.dim(), ab.len());
    for (i, v) in hn.basis().iter().enumerate() {
        for (j, b) in ab.iter().enumerate() {
            mat[(i, j)] = g.kappa(v, b);
        }
    }
    let vecs: Vec<Vec<Q>> = mat.nullspace().iter().map(|c| p.a.from_coords(c)).collect();
    Subspace::span(g.dim(), &vecs)
}

/// Integer coefficient vectors of sup-norm exactly r in lexicographic order.
fn shell(k: usize, r: i64) -> Vec<Vec<i64>> {
    if k == 0 {
        return if r == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut c = vec![-r; k];
    loop {
        if c.iter().any(|x| x.abs() == r) {
            out.push(c.clone());
        }
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < r {
                c[i] += 1;
                for cj in c.iter_mut().skip(i + 1) {
                    *cj = -r;
                }
                break;
            }
        }
    }
}

/// The `k`-th (0-based) candidate of the deterministic search that passes every check.
pub fn find_generic_element(g: &LieAlgebra, h: &Subspace, p: &ParabolicDatum, k: usize) -> Result<AdaptedParabolic> {
    let v = generic_search_space(g, h, p);
    let basis: Vec<Vec<Q>> = v.basis().iter().map(|b| ints_to_q(&primitive(b))).collect();
    let mut found = 0;
    for r in 0..=GENERIC_SEARCH_CAP {
        for c in shell(basis.len(), r) {
            let mut x = zero_vec(g.dim());
            for (ci, b) in c.iter().zip(&basis) {
                crate::rational::axpy(&q(*ci), b, &mut x);
            }
            let ap = adapted_parabolic_at(g, h, p, &x);
            if ap.verified() {
                if found == k {
                    return Ok(ap);
                }
                found += 1;
            }
        }
    }
    Err(Error::NoGenericElement { cap: GENERIC_SEARCH_CAP })
}

/// First verifying generic element; errors if the open-orbit condition fails.
pub fn construct_adapted_parabolic(g: &LieAlgebra, h: &Subspace, p: &ParabolicDatum) -> Result<AdaptedParabolic> {
    if !check_open_orbit(g, h, p) {
        return Err(Error::AdaptedParabolicUnverified("p + h != g".into()));
    }
    find_generic_element(g, h, p, 0)
}

/// A caller-supplied X; errors if any condition fails.
pub fn construct_adapted_parabolic_at(g: &LieAlgebra, h: &Subspace, p: &ParabolicDatum, x: &[Q]) -> Result<AdaptedParabolic> {
    let ap = adapted_parabolic_at(g, h, p, x);
    match ap.checks.iter().find(|c| !c.passed) {
        Some(c) => Err(Error::AdaptedParabolicUnverified(c.name.clone())),
        None => Ok(ap),
    }
}

/// T(X_{−α}) for one basis vector of g^{−α}.
#[derive(Clone, Debug)]
pub struct TEntry {
    pub alpha: LinearFunctional,
    pub x_minus: Vec<Q>,
    /// (β, X_{α,β}) for β ∈ Σ_u with nonzero component
    pub root_components: Vec<(LinearFunctional, Vec<Q>)>,
    /// X_{α,0} ∈ (l ∩ h)^⊥
    pub zero_component: Vec<Q>,
}

impl TEntry {
    /// T(X_{−α}) = Σ_β X_{α,β}.
    pub fn t_value(&self) -> Vec<Q> {
        let mut out = self.zero_component.clone();
        for (_, v) in &self.root_components {
            out = crate::rational::add(&out, v);
        }
        out
    }
}

/// Splitting a = a_H ⊕ a_Z with a_Z the κ-orthogonal complement of a ∩ h.
#[derive(Clone, Debug)]
pub struct TorusSplit {
    pub a_h: Subspace,
    pub a_z: Subspace,
}

/// The local structure package of a spherical pair.
#[derive(Clone, Debug)]
pub struct SphericalDatum {
    pub g: LieAlgebra,
    pub h: Subspace,
    pub parabolic: ParabolicDatum,
    pub adapted: AdaptedParabolic,
    pub lh: Subspace,
    pub lh_perp: Subspace,
    pub split: TorusSplit,
    pub t_table: Vec<TEntry>,
    /// monoid generators α + β, on a
    pub monoid_gens_a: Vec<LinearFunctional>,
    /// monoid generators as coordinates on the a_Z basis (distinct, sorted)
    pub monoid_gens: Vec<Vec<Q>>,
    /// spherical roots on the a_Z basis
    pub s: Vec<Vec<Q>>,
    /// a_Z^- in a_Z coordinates
    pub compression_cone: Cone,
    pub rho_q: LinearFunctional,
    pub unimodularity: Unimodularity,
}

#[derive(Clone, Debug)]
pub struct Unimodularity {
    pub rho_vanishes_on_ah: bool,
    pub trace_vanishes: bool,
    /// X ∈ a_Z with α(X) > 0 for all α ∈ Σ_u, in ambient coordinates
    pub positive_witness: Option<Vec<Q>>,
}

impl Unimodularity {
    pub fn unimodular(&self) -> bool {
        self.rho_vanishes_on_ah && self.trace_vanishes
    }
}

impl SphericalDatum {
    pub fn l(&self) -> &Subspace {
        &self.adapted.l
    }

    pub fn u(&self) -> &Subspace {
        &self.adapted.u
    }

    pub fn a_z(&self) -> &Subspace {
        &self.split.a_z
    }

    /// A functional on a as coordinates on the a_Z basis.
    pub fn on_az(&self, f: &LinearFunctional) -> Vec<Q> {
        f.restrict(&self.parabolic.a, &self.split.a_z).coords
    }

    pub fn rho_q_z(&self) -> Vec<Q> {
        self.on_az(&self.rho_q)
    }

    /// Ambient vector of a_Z from coordinates.
    pub fn az_vector(&self, c: &[Q]) -> Vec<Q> {
        self.split.a_z.from_coords(c)
    }
}

pub fn torus_split(g: &LieAlgebra, h: &Subspace, a: &Subspace) -> Result<TorusSplit> {
    let a_h = a.intersection(h)?;
    let a_z = a_h.orth_complement_in(a, g.form())?;
    if a_z.dim() + a_h.dim() != a.dim() {
        return Err(Error::DegenerateForm);
    }
    Ok(TorusSplit { a_h, a_z })
}

/// Components of every X_{−α} in g = h ⊕ (l ∩ h)^⊥ ⊕ u, giving T.
pub fn t_map(
    g: &LieAlgebra,
    h: &Subspace,
    p: &ParabolicDatum,
    ap: &AdaptedParabolic,
    lh_perp: &Subspace,
) -> Result<Vec<TEntry>> {
    let n = g.dim();
    let blocks = [h, lh_perp, &ap.u];
    let dims: Vec<usize> = blocks.iter().map(|b| b.dim()).collect();
    if dims.iter().sum::<usize>() != n {
        return Err(Error::DecompositionFailure(format!("dimensions {dims:?} do not sum to {n}")));
    }
    let cols: Vec<Vec<Q>> = blocks.iter().flat_map(|b| b.basis().iter().cloned()).collect();
    let mut mat = QMatrix::zeros(n, n);
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            mat[(i, j)] = c[i].clone();
        }
    }
    let inv = mat.inverse().ok_or_else(|| Error::DecompositionFailure("summands intersect".into()))?;
    let mut out = Vec::new();
    for alpha in &ap.sigma_u {
        let Some(space) = p.roots.space(&alpha.neg()) else { continue };
        for xm in space.basis() {
            let c = inv.mul_vec(xm);
            let part = |from: usize, to: usize| -> Vec<Q> {
                let mut v = zero_vec(n);
                for j in from..to {
                    crate::rational::axpy(&c[j], &cols[j], &mut v);
                }
                v
            };
            let (d0, d1) = (dims[0], dims[0] + dims[1]);
            let lp = part(d0, d1);
            let up = part(d1, n);
            let zero_component: Vec<Q> = lp.iter().map(|x| -x).collect();
            let mut root_components = Vec::new();
            for (beta, v) in p.roots.components(&up) {
                root_components.push((beta, v.iter().map(|x| -x).collect::<Vec<Q>>()));
            }
            let entry = TEntry { alpha: alpha.clone(), x_minus: xm.clone(), root_components, zero_component };
            if !h.contains(&crate::rational::add(xm, &entry.t_value())) {
                return Err(Error::DecompositionFailure("X + T(X) not in h".into()));
            }
            out.push(entry);
        }
    }
    Ok(out)
}

/// Monoid generators α + β over nonzero X_{α,β}.
pub fn monoid_generators(t: &[TEntry]) -> Vec<LinearFunctional> {
    let mut gens: Vec<LinearFunctional> = Vec::new();
    for e in t {
        if !is_zero_vec(&e.zero_component) {
            gens.push(e.alpha.clone());
        }
        for (beta, _) in &e.root_components {
            gens.push(e.alpha.add(beta));
        }
    }
    gens.sort();
    gens.dedup();
    gens
}

/// Is `x` a sum of two nonzero ℕ₀-combinations of `gens` (all positive multiples of one ray)?
fn decomposable_on_ray(x: &Q, gens: &[Q]) -> bool {
    // reachable sums strictly below x
    let mut reach: Vec<Q> = vec![Q::zero()];
    let mut frontier = vec![Q::zero()];
    while let Some(v) = frontier.pop() {
        for gk in gens {
            let w = &v + gk;
            if &w < x && !reach.contains(&w) {
                reach.push(w.clone());
                frontier.push(w);
            }
        }
    }
    reach.iter().any(|a| !a.is_zero() && reach.contains(&(x - a)))
}

/// S from the monoid generators (a_Z coordinates): on each extreme ray of their cone,
/// the least irreducible monoid element.
pub fn spherical_roots(dim: usize, gens: &[Vec<Q>]) -> (Vec<Vec<Q>>, Cone) {
    let nonzero: Vec<Vec<Q>> = gens.iter().filter(|v| !is_zero_vec(v)).cloned().collect();
    let c = Cone::from_generators_q(dim, &nonzero);
    let mut s = Vec::new();
    for ray in c.rays() {
        let rq = ints_to_q(ray);
        let pivot = rq.iter().position(|x| !x.is_zero()).expect("ray is nonzero");
        let on_ray: Vec<Q> = nonzero
            .iter()
            .filter(|v| &primitive(v) == ray)
            .map(|v| &v[pivot] / &rq[pivot])
            .collect();
        let mut cands = on_ray.clone();
        cands.sort();
        if let Some(m) = cands.into_iter().find(|x| !decomposable_on_ray(x, &on_ray)) {
            s.push(crate::rational::scale(&m, &rq));
        }
    }
    s.sort();
    let neg: Vec<Vec<Q>> = s.iter().map(|v| v.iter().map(|x| -x).collect()).collect();
    let cone = Cone::from_inequalities_q(dim, &neg, &[]);
    (s, cone)
}

/// The cone {X : α(X) ≤ 0 for every α in `fs`}.
pub fn nonpositive_cone(dim: usize, fs: &[Vec<Q>]) -> Cone {
    let neg: Vec<Vec<Q>> = fs.iter().filter(|v| !is_zero_vec(v)).map(|v| v.iter().map(|x| -x).collect()).collect();
    Cone::from_inequalities_q(dim, &neg, &[])
}

/// A point X with f(X) > 0 for every f, if one exists.
pub fn strict_witness(dim: usize, fs: &[Vec<Q>]) -> Option<Vec<Q>> {
    if fs.iter().any(|f| is_zero_vec(f)) {
        return None;
    }
    let c = Cone::from_inequalities_q(dim, fs, &[]);
    let mut x = zero_vec(dim);
    for r in c.rays() {
        x = crate::rational::add(&x, &ints_to_q(r));
    }
    fs.iter().all(|f| crate::rational::dot(f, &x).is_positive()).then_some(x)
}

/// ρ_Q = ½ Σ_{α∈Σ_u} dim g^α · α, as a functional on a.
pub fn rho_q(p: &ParabolicDatum, sigma_u: &[LinearFunctional]) -> LinearFunctional {
    let mut r = LinearFunctional::zero(p.a.dim());
    for alpha in sigma_u {
        let d = p.roots.space(alpha).map(|s| s.dim()).unwrap_or(0) as i64;
        r = r.add(&alpha.scale(&qr(d, 2)));
    }
    r
}

/// tr(ad X on g/h) = 0 for every X in a basis of h.
pub fn quotient_trace_vanishes(g: &LieAlgebra, h: &Subspace) -> Result<bool> {
    for b in h.basis() {
        if !g.quotient_trace(h, b)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Full local structure computation with the `k`-th verifying generic element.
pub fn analyze_with(g: &LieAlgebra, h: &Subspace, p: &ParabolicDatum, k: usize) -> Result<SphericalDatum> {
    if !g.is_subalgebra(h) {
        return Err(Error::NotInSubalgebra("h is not closed under the bracket".into()));
    }
    if !check_open_orbit(g, h, p) {
        return Err(Error::AdaptedParabolicUnverified("p + h != g".into()));
    }
    let adapted = find_generic_element(g, h, p, k)?;
    from_adapted(g, h, p, adapted)
}

pub fn analyze(g: &LieAlgebra, h: &Subspace, p: &ParabolicDatum) -> Result<SphericalDatum> {
    analyze_with(g, h, p, 0)
}

/// Remaining structure once Q = LU is fixed.
pub fn from_adapted(g: &LieAlgebra, h: &Subspace, p: &ParabolicDatum, adapted: AdaptedParabolic) -> Result<SphericalDatum> {
    let lh = adapted.l.intersection(h)?;
    let lh_perp = lh.orth_complement_in(&adapted.l, g.form())?;
    let split = torus_split(g, h, &p.a)?;
    let t_table = t_map(g, h, p, &adapted, &lh_perp)?;
    let monoid_gens_a = monoid_generators(&t_table);
    for m in &monoid_gens_a {
        let r = m.restrict(&p.a, &split.a_h);
        if !r.is_zero() {
            return Err(Error::MonoidElementNotOnAH(format!("{:?}", m.coords)));
        }
    }
    let dz = split.a_z.dim();
    let mut monoid_gens: Vec<Vec<Q>> = monoid_gens_a.iter().map(|m| m.restrict(&p.a, &split.a_z).coords).collect();
    monoid_gens.sort();
    monoid_gens.dedup();
    let (s, compression_cone) = spherical_roots(dz, &monoid_gens);
    let rho = rho_q(p, &adapted.sigma_u);
    let sig_z: Vec<Vec<Q>> = adapted.sigma_u.iter().map(|a| a.restrict(&p.a, &split.a_z).coords).collect();
    let unimodularity = Unimodularity {
        rho_vanishes_on_ah: rho.restrict(&p.a, &split.a_h).is_zero(),
        trace_vanishes: quotient_trace_vanishes(g, h)?,
        positive_witness: strict_witness(dz, &sig_z).map(|c| split.a_z.from_coords(&c)),
    };
    Ok(SphericalDatum {
        g: g.clone(),
        h: h.clone(),
        parabolic: p.clone(),
        adapted,
        lh,
        lh_perp,
        split,
        t_table,
        monoid_gens_a,
        monoid_gens,
        s,
        compression_cone,
        rho_q: rho,
        unimodularity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liecore::builtins::{sl2, sl2_sl2};
    use crate::rational::ivec;

    fn sl2_p() -> ParabolicDatum {
        let a = Subspace::span(3, &[ivec(&[1, 0, 0])]);
        ParabolicDatum::new(&sl2(), &a, &ivec(&[1, 0, 0])).unwrap()
    }

    #[test]
    fn shells_are_lex_and_exact() {
        assert_eq!(shell(1, 0), vec![vec![0]]);
        assert_eq!(shell(1, 1), vec![vec![-1], vec![1]]);
        assert_eq!(shell(2, 1).len(), 8);
        assert_eq!(shell(2, 1)[0], vec![-1, -1]);
        assert_eq!(shell(3, 2).len(), 125 - 27);
    }

    #[test]
    fn sl2_so2() {
        let g = sl2();
        let h = Subspace::span(3, &[ivec(&[0, 1, -1])]);
        let d = analyze(&g, &h, &sl2_p()).unwrap();
        assert_eq!(d.adapted.x, ivec(&[1, 0, 0]));
        assert_eq!(*d.l(), Subspace::span(3, &[ivec(&[1, 0, 0])]));
        assert_eq!(*d.u(), Subspace::span(3, &[ivec(&[0, 1, 0])]));
        assert_eq!(d.t_table.len(), 1);
        assert_eq!(d.t_table[0].t_value(), ivec(&[0, -1, 0]));
        assert!(is_zero_vec(&d.t_table[0].zero_component));
        assert_eq!(d.monoid_gens, vec![ivec(&[4])]);
        assert_eq!(d.s, vec![ivec(&[4])]);
        assert_eq!(d.compression_cone.rays(), &[crate::cones::iv(&[-1])]);
        assert_eq!(d.rho_q.coords, ivec(&[1]));
        assert!(d.unimodularity.unimodular());
        assert!(d.unimodularity.positive_witness.is_some());
    }

    #[test]
    fn sl2_so11() {
        let g = sl2();
        let h = Subspace::span(3, &[ivec(&[0, 1, 1])]);
        let d = analyze(&g, &h, &sl2_p()).unwrap();
        assert_eq!(d.t_table[0].t_value(), ivec(&[0, 1, 0]));
        assert_eq!(d.s, vec![ivec(&[4])]);
    }

    #[test]
    fn h_equals_g() {
        let g = sl2();
        let d = analyze(&g, &Subspace::full(3), &sl2_p()).unwrap();
        assert_eq!(d.adapted.x, ivec(&[0, 0, 0]));
        assert_eq!(d.l().dim(), 3);
        assert!(d.u().is_zero());
        assert!(d.s.is_empty());
        assert!(d.rho_q.is_zero());
        assert!(d.unimodularity.unimodular());
        assert_eq!(d.split.a_z.dim(), 0);
    }

    #[test]
    fn open_orbit_failure() {
        let g = sl2();
        let h = Subspace::span(3, &[ivec(&[1, 0, 0])]);
        assert!(matches!(analyze(&g, &h, &sl2_p()), Err(Error::AdaptedParabolicUnverified(_))));
    }

    #[test]
    fn t_vanishes_when_h_contains_opposite() {
        // h = span(F): X_{−α} ∈ h so T ≡ 0
        let g = sl2();
        let h = Subspace::span(3, &[ivec(&[0, 0, 1])]);
        let d = analyze(&g, &h, &sl2_p()).unwrap();
        assert!(d.t_table.iter().all(|e| is_zero_vec(&e.t_value())));
        assert!(d.monoid_gens.is_empty());
        assert!(d.s.is_empty());
        assert_eq!(d.compression_cone.dimension(), 1);
        assert_eq!(d.compression_cone.lineality().len(), 1);
    }

    #[test]
    fn diagonal_pair() {
        let g = sl2_sl2();
        let h = Subspace::span(6, &[ivec(&[1, 0, 0, 1, 0, 0]), ivec(&[0, 1, 0, 0, 1, 0]), ivec(&[0, 0, 1, 0, 0, 1])]);
        let a = Subspace::span(6, &[ivec(&[1, 0, 0, 0, 0, 0]), ivec(&[0, 0, 0, 1, 0, 0])]);
        let p = ParabolicDatum::new(&g, &a, &ivec(&[1, 0, 0, -1, 0, 0])).unwrap();
        let d = analyze(&g, &h, &p).unwrap();
        assert_eq!(d.adapted.x, ivec(&[1, 0, 0, -1, 0, 0]));
        assert_eq!(*d.u(), Subspace::span(6, &[ivec(&[0, 1, 0, 0, 0, 0]), ivec(&[0, 0, 0, 0, 0, 1])]));
        assert_eq!(d.split.a_z, Subspace::span(6, &[ivec(&[1, 0, 0, -1, 0, 0])]));
        assert_eq!(d.s, vec![ivec(&[4])]);
        assert_eq!(d.rho_q_z(), ivec(&[2]));
        assert!(d.unimodularity.unimodular());
    }

    #[test]
    fn borel_is_not_unimodular() {
        let g = sl2();
        let b = Subspace::span(3, &[ivec(&[1, 0, 0]), ivec(&[0, 1, 0])]);
        assert!(!quotient_trace_vanishes(&g, &b).unwrap());
        let e = Subspace::span(3, &[ivec(&[0, 1, 0])]);
        assert!(quotient_trace_vanishes(&g, &e).unwrap());
    }

    #[test]
    fn ray_irreducibility() {
        assert!(decomposable_on_ray(&q(4), &[q(2), q(4)]));
        assert!(!decomposable_on_ray(&q(2), &[q(2), q(4)]));
        assert!(!decomposable_on_ray(&q(3), &[q(2), q(3)]));
            let (s, cone) = spherical_roots(1, &[ivec(&[2]), ivec(&[3]), ivec(&[4])]);
        assert_eq!(s, vec![ivec(&[2])]);
        assert_eq!(cone, nonpositive_cone(1, &[ivec(&[2]), ivec(&[3]), ivec(&[4])]));
    }
}
