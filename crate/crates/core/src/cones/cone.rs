use crate::error::{Error, Result};
use crate::liecore::Subspace;
use crate::rational::{ints_to_q, primitive, QMatrix, Q};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

pub type IVec = Vec<BigInt>;

pub fn idot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

fn qdot(a: &[BigInt], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + Q::from_integer(x.clone()) * y)
}

fn combine(ca: &BigInt, a: &[BigInt], cb: &BigInt, b: &[BigInt]) -> IVec {
    let v: Vec<Q> = a.iter().zip(b).map(|(x, y)| Q::from_integer(ca * x + cb * y)).collect();
    primitive(&v)
}

/// Primitive vector with the first nonzero entry positive (for sign-ambiguous directions).
pub fn normalize_sign(v: IVec) -> IVec {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => v.into_iter().map(|y| -y).collect(),
        _ => v,
    }
}

/// Canonical integer basis of a subspace: echelon rows scaled to primitive vectors.
pub fn canonical_basis(dim: usize, vs: &[IVec]) -> Vec<IVec> {
    let qs: Vec<Vec<Q>> = vs.iter().map(|v| ints_to_q(v)).collect();
    Subspace::span(dim, &qs).basis().iter().map(|b| normalize_sign(primitive(b))).collect()
}

fn orthogonal_projection(r: &[BigInt], lin: &[IVec]) -> IVec {
    if lin.is_empty() {
        return r.to_vec();
    }
    // r − Lᵀ (L Lᵀ)⁻¹ L r
    let k = lin.len();
    let mut g = QMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = Q::from_integer(idot(&lin[i], &lin[j]));
        }
    }
    let rhs: Vec<Q> = lin.iter().map(|l| Q::from_integer(idot(l, r))).collect();
    let c = g.solve(&rhs).expect("lineality basis is independent");
    let mut out = ints_to_q(r);
    for (ci, l) in c.iter().zip(lin) {
        for (o, li) in out.iter_mut().zip(l) {
            *o -= ci * Q::from_integer(li.clone());
        }
    }
    primitive(&out)
}

/// Result of a point-in-cone query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Interior,
    Boundary,
    Outside,
}

/// A rational polyhedral cone with synchronized generator and halfspace descriptions.
///
/// `rays` are the extreme rays of the cone modulo its lineality space (projected
/// orthogonally to it), `facets` are irredundant inequalities `f·x ≥ 0` within the
/// linear span, and `equations` span the implicit equalities `e·x = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cone {
    dim: usize,
    rays: Vec<IVec>,
    lineality: Vec<IVec>,
    facets: Vec<IVec>,
    equations: Vec<IVec>,
}

/// Double description: extreme rays and lineality of {x : A x ≥ 0, B x = 0}.
fn double_description(dim: usize, ineqs: &[IVec], eqs: &[IVec]) -> (Vec<IVec>, Vec<IVec>) {
    let eq_q: Vec<Vec<Q>> = eqs.iter().map(|e| ints_to_q(e)).collect();
    let mut lin: Vec<IVec> = if eq_q.is_empty() {
        (0..dim).map(|i| (0..dim).map(|j| BigInt::from((i == j) as i64)).collect()).collect()
    } else {
        QMatrix::from_rows(dim, &eq_q).nullspace().iter().map(|v| primitive(v)).collect()
    };
    // rays with the indices of processed inequalities that vanish on them
    let mut rays: Vec<(IVec, Vec<usize>)> = Vec::new();
    for (idx, a) in ineqs.iter().enumerate() {
        if let Some(p) = lin.iter().position(|l| !idot(a, l).is_zero()) {
            let mut l0 = lin.remove(p);
            let mut al0 = idot(a, &l0);
            if al0.is_negative() {
                l0 = l0.into_iter().map(|x| -x).collect();
                al0 = -al0;
            }
            lin = lin
                .iter()
                .map(|l| {
                    let al = idot(a, l);
                    if al.is_zero() {
                        l.clone()
                    } else {
                        combine(&al0, l, &-al, &l0)
                    }
                })
                .collect();
            for (r, z) in rays.iter_mut() {
                let ar = idot(a, r);
                if !ar.is_zero() {
                    *r = combine(&al0, r, &-ar, &l0);
                }
                z.push(idx);
            }
            // l0 is tight on every earlier constraint
            rays.push((l0, (0..idx).collect()));
        } else {
            let vals: Vec<BigInt> = rays.iter().map(|(r, _)| idot(a, r)).collect();
            let mut next: Vec<(IVec, Vec<usize>)> = Vec::new();
            for (k, (r, z)) in rays.iter().enumerate() {
                if !vals[k].is_negative() {
                    let mut z = z.clone();
                    if vals[k].is_zero() {
                        z.push(idx);
                    }
                    next.push((r.clone(), z));
                }
            }
            for (pi, (p, zp)) in rays.iter().enumerate() {
                if !vals[pi].is_positive() {
                    continue;
                }
                for (ni, (nv, zn)) in rays.iter().enumerate() {
                    if !vals[ni].is_negative() {
                        continue;
                    }
                    let common: Vec<usize> = zp.iter().filter(|i| zn.contains(i)).copied().collect();
                    let adjacent = rays.iter().enumerate().all(|(k, (_, zk))| {
                        k == pi || k == ni || !common.iter().all(|i| zk.contains(i))
                    });
                    if adjacent {
                        let v = combine(&vals[pi], nv, &-vals[ni].clone(), p);
                        let mut z = common;
                        z.push(idx);
                        next.push((v, z));
                    }
                }
            }
            rays = next;
        }
    }
    let lin = canonical_basis(dim, &lin);
    let mut out: Vec<IVec> = rays.into_iter().map(|(r, _)| orthogonal_projection(&r, &lin)).collect();
    out.retain(|r| r.iter().any(|x| !x.is_zero()));
    out.sort();
    out.dedup();
    (out, lin)
}

impl Cone {
    /// {x : f·x ≥ 0 for f in ineqs, e·x = 0 for e in eqs}.
    pub fn from_inequalities(dim: usize, ineqs: &[IVec], eqs: &[IVec]) -> Cone {
        let (rays, lineality) = double_description(dim, ineqs, eqs);
        Self::from_vrep(dim, rays, lineality)
    }

    /// Conic hull of the generators (plus the linear span of `lineality`).
    pub fn from_generators(dim: usize, gens: &[IVec], lineality: &[IVec]) -> Cone {
        // facets are the extreme rays of the dual cone
        let (drays, dlin) = double_description(dim, gens, lineality);
        let (rays, lin) = double_description(dim, &drays, &dlin);
        Cone { dim, rays, lineality: lin, facets: drays, equations: dlin }
    }

    fn from_vrep(dim: usize, rays: Vec<IVec>, lineality: Vec<IVec>) -> Cone {
        let (facets, equations) = double_description(dim, &rays, &lineality);
        Cone { dim, rays, lineality, facets, equations }
    }

    pub fn from_generators_q(dim: usize, gens: &[Vec<Q>]) -> Cone {
        let g: Vec<IVec> = gens.iter().map(|v| primitive(v)).filter(|v| v.iter().any(|x| !x.is_zero())).collect();
        Self::from_generators(dim, &g, &[])
    }

    pub fn from_inequalities_q(dim: usize, ineqs: &[Vec<Q>], eqs: &[Vec<Q>]) -> Cone {
        let a: Vec<IVec> = ineqs.iter().map(|v| primitive(v)).collect();
        let b: Vec<IVec> = eqs.iter().map(|v| primitive(v)).collect();
        Self::from_inequalities(dim, &a, &b)
    }

    pub fn full(dim: usize) -> Cone {
        Self::from_inequalities(dim, &[], &[])
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[IVec] {
        &self.rays
    }

    pub fn lineality(&self) -> &[IVec] {
        &self.lineality
    }

    pub fn facets(&self) -> &[IVec] {
        &self.facets
    }

    pub fn equations(&self) -> &[IVec] {
        &self.equations
    }

    /// Dimension of the linear span.
    pub fn dimension(&self) -> usize {
        self.dim - self.equations.len()
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn is_simplicial(&self) -> bool {
        self.is_pointed() && self.rays.len() == self.dimension()
    }

    /// Generators as rational vectors: rays, then ± lineality basis.
    pub fn generators_q(&self) -> Vec<Vec<Q>> {
        let mut out: Vec<Vec<Q>> = self.rays.iter().map(|r| ints_to_q(r)).collect();
        for l in &self.lineality {
            out.push(ints_to_q(l));
            out.push(ints_to_q(l).into_iter().map(|x| -x).collect());
        }
        out
    }

    pub fn dual(&self) -> Cone {
        Cone::from_inequalities(self.dim, &self.rays, &self.lineality)
    }

    pub fn extreme_rays(&self) -> Vec<Vec<Q>> {
        self.rays.iter().map(|r| ints_to_q(r)).collect()
    }

    pub fn intersection(&self, other: &Cone) -> Cone {
        let f: Vec<IVec> = self.facets.iter().chain(&other.facets).cloned().collect();
        let e: Vec<IVec> = self.equations.iter().chain(&other.equations).cloned().collect();
        Cone::from_inequalities(self.dim, &f, &e)
    }

    /// Face cut out by a functional that is nonnegative on the cone.
    pub fn face(&self, functional: &[Q]) -> Result<Cone> {
        let f = primitive(functional);
        if self.rays.iter().any(|r| idot(&f, r).is_negative()) || self.lineality.iter().any(|l| !idot(&f, l).is_zero()) {
            return Err(Error::NotSupporting);
        }
        let mut e = self.equations.clone();
        e.push(f);
        Ok(Cone::from_inequalities(self.dim, &self.facets, &e))
    }

    pub fn locate(&self, x: &[Q]) -> Location {
        if self.equations.iter().any(|e| !qdot(e, x).is_zero()) {
            return Location::Outside;
        }
        let mut boundary = false;
        for f in &self.facets {
            let v = qdot(f, x);
            if v.is_negative() {
                return Location::Outside;
            }
            if v.is_zero() {
                boundary = true;
            }
        }
        if boundary {
            Location::Boundary
        } else {
            Location::Interior
        }
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.locate(x) != Location::Outside
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.generators_q().iter().all(|g| self.contains(g))
    }

    /// The linear span as a subspace.
    pub fn span(&self) -> Subspace {
        Subspace::span(self.dim, &self.generators_q())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let s = |v: &[IVec]| -> Vec<Vec<String>> { v.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect() };
        serde_json::json!({
            "ambient_dim": self.dim,
            "rays": s(&self.rays),
            "lineality": s(&self.lineality),
            "facets": s(&self.facets),
            "equations": s(&self.equations),
        })
    }
}

pub fn iv(v: &[i64]) -> IVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ivec;

    #[test]
    fn orthant_is_self_dual() {
        let c = Cone::from_inequalities(3, &[iv(&[1, 0, 0]), iv(&[0, 1, 0]), iv(&[0, 0, 1])], &[]);
        assert_eq!(c.rays().len(), 3);
        assert_eq!(c.dual(), c);
    }

    #[test]
    fn halfline() {
        let c = Cone::from_inequalities(1, &[iv(&[-4])], &[]);
        assert_eq!(c.rays(), &[iv(&[-1])]);
        assert!(c.is_simplicial());
    }

    #[test]
    fn square_cone() {
        let gens = [iv(&[1, 1, 1]), iv(&[1, -1, 1]), iv(&[-1, 1, 1]), iv(&[-1, -1, 1])];
        let c = Cone::from_generators(3, &gens, &[]);
        assert_eq!(c.rays().len(), 4);
        assert_eq!(c.facets().len(), 4);
        assert!(!c.is_simplicial());
        assert_eq!(c.locate(&ivec(&[0, 0, 1])), Location::Interior);
        assert_eq!(c.locate(&ivec(&[1, 0, 1])), Location::Boundary);
        assert_eq!(c.locate(&ivec(&[2, 0, 1])), Location::Outside);
    }

    #[test]
    fn redundant_generators_dropped() {
        let c = Cone::from_generators(2, &[iv(&[1, 0]), iv(&[0, 1]), iv(&[1, 1]), iv(&[2, 3])], &[]);
        assert_eq!(c.rays(), &[iv(&[0, 1]), iv(&[1, 0])]);
    }

    #[test]
    fn halfplane_has_lineality() {
        let c = Cone::from_inequalities(2, &[iv(&[1, 0])], &[]);
        assert_eq!(c.lineality(), &[iv(&[0, 1])]);
        assert_eq!(c.rays(), &[iv(&[1, 0])]);
        assert_eq!(Cone::full(2).lineality().len(), 2);
        assert!(Cone::full(2).facets().is_empty());
    }

    #[test]
    fn lower_dimensional() {
        let c = Cone::from_generators(3, &[iv(&[1, 0, 0]), iv(&[0, 1, 0])], &[]);
        assert_eq!(c.dimension(), 2);
        assert_eq!(c.equations(), &[iv(&[0, 0, 1])]);
        assert!(c.is_simplicial());
    }

    #[test]
    fn faces() {
        let c = Cone::from_inequalities(2, &[iv(&[1, 0]), iv(&[0, 1])], &[]);
        let f = c.face(&ivec(&[1, 0])).unwrap();
        assert_eq!(f.rays(), &[iv(&[0, 1])]);
        assert!(matches!(c.face(&ivec(&[1, -1])), Err(Error::NotSupporting)));
    }
}
