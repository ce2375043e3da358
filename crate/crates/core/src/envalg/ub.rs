use super::pbw::{mono_degree, Mono, Pbw, Poly};
use crate::degen::{h_i_explicit, DegenerationDatum};
use crate::error::{Error, Result};
use crate::liecore::Subspace;
use crate::rational::{dot, is_zero_vec, QMatrix, Q};
use crate::sphstruct::{Check, SphericalDatum};
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

pub const DEFAULT_DEGREE_CAP: usize = 4;

/// U(b)/U(b)b_H for b = a + m + u, realised inside U(g) with PBW letters
/// (u, a_Z, m ⊖ m_H | b_H, rest of h_I): elements are normal forms that only use
/// the first block.
pub struct BAlgebra<'a> {
    pub datum: &'a SphericalDatum,
    pub cap: usize,
    /// letters of b outside b_H
    pub letters: Vec<Vec<Q>>,
    /// a_Z-weight of each letter, as values on the a_Z basis
    pub weights: Vec<Vec<Q>>,
    pub b_h: Subspace,
    /// one rebased copy of U(g) per index set, ordered by I
    envelopes: BTreeMap<Vec<usize>, (DegenerationDatum, Pbw)>,
}

impl<'a> BAlgebra<'a> {
    pub fn new(d: &'a SphericalDatum, cap: usize) -> Result<Self> {
        let n = d.g.dim();
        let p = &d.parabolic;
        let m_h = p.m.intersection(&d.h)?;
        let b_h = d.split.a_h.sum(&m_h)?;
        let mut letters = Vec::new();
        let mut weights = Vec::new();
        for alpha in &d.adapted.sigma_u {
            for v in p.roots.space(alpha).expect("root of u").basis() {
                letters.push(v.clone());
                weights.push(d.on_az(alpha));
            }
        }
        let dz = d.split.a_z.dim();
        for v in d.split.a_z.basis() {
            letters.push(v.clone());
            weights.push(vec![Q::zero(); dz]);
        }
        for v in m_h.complement_in(&p.m)?.basis() {
            letters.push(v.clone());
            weights.push(vec![Q::zero(); dz]);
        }
        let b = Subspace::span(n, &letters).sum(&b_h)?;
        if b.dim() != letters.len() + b_h.dim() {
            return Err(Error::Verification("b_H is not complementary to the chosen letters".into()));
        }
        let mut out = BAlgebra { datum: d, cap, letters, weights, b_h, envelopes: BTreeMap::new() };
        let s = out.s_all();
        out.prepare(&s)?;
        Ok(out)
    }

    pub fn k(&self) -> usize {
        self.letters.len()
    }

    pub fn s_all(&self) -> Vec<usize> {
        (0..self.datum.s.len()).collect()
    }

    /// Ensures the envelope for I exists.
    pub fn prepare(&mut self, i: &[usize]) -> Result<()> {
        let key = i.to_vec();
        if self.envelopes.contains_key(&key) {
            return Ok(());
        }
        let d = self.datum;
        let dd = h_i_explicit(d, i)?;
        let b = Subspace::span(d.g.dim(), &self.letters).sum(&self.b_h)?;
        if b.intersection(&dd.h_i)? != self.b_h {
            return Err(Error::Verification("b cap h_I differs from b_H".into()));
        }
        let mut basis = self.letters.clone();
        basis.extend(self.b_h.basis().iter().cloned());
        let rest = self.b_h.complement_in(&dd.h_i)?;
        basis.extend(rest.basis().iter().cloned());
        let pbw = Pbw::new(&d.g, &basis, self.cap + 2)?;
        self.envelopes.insert(key, (dd, pbw));
        Ok(())
    }

    fn env(&self, i: &[usize]) -> &(DegenerationDatum, Pbw) {
        self.envelopes.get(i).expect("prepare() was called for this index set")
    }

    pub fn pbw(&self, i: &[usize]) -> &Pbw {
        &self.env(i).1
    }

    pub fn degeneration(&self, i: &[usize]) -> &DegenerationDatum {
        &self.env(i).0
    }

    fn in_b_block(&self, m: &Mono) -> bool {
        m[self.k()..].iter().all(|&e| e == 0)
    }

    /// Normal form modulo U(g)h_I, which is also the class modulo U(b)b_H for elements of U(b).
    pub fn reduce(&self, p: &Poly) -> Poly {
        p.filter(|m| self.in_b_block(m))
    }

    pub fn one(&self) -> Poly {
        Poly::constant(self.datum.g.dim(), Q::from_integer(1.into()))
    }

    pub fn letter(&self, j: usize) -> Poly {
        let n = self.datum.g.dim();
        let mut m = vec![0u16; n];
        m[j] = 1;
        let mut p = Poly::zero();
        p.add_term(m, Q::from_integer(1.into()));
        p
    }

    /// Degree-one class of an ambient vector of b.
    pub fn linear(&self, v: &[Q]) -> Result<Poly> {
        let s = self.s_all();
        let pbw = self.pbw(&s);
        let lin = pbw.linear(v);
        let b = Subspace::span(v.len(), &self.letters).sum(&self.b_h)?;
        if !b.contains(v) {
            return Err(Error::NotInSubalgebra("vector is not in b".into()));
        }
        Ok(self.reduce(&lin))
    }

    /// Product in U(b)/U(b)b_H.
    pub fn mul(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        let d = a.degree() + b.degree();
        if !a.is_zero() && !b.is_zero() && d > self.cap {
            return Err(Error::CapExceeded { degree: d, cap: self.cap });
        }
        let s = self.s_all();
        Ok(self.reduce(&self.pbw(&s).mul(a, b)?))
    }

    /// a_Z-weight of a normal-form monomial.
    pub fn weight(&self, m: &Mono) -> Vec<Q> {
        let dz = self.datum.split.a_z.dim();
        let mut w = vec![Q::zero(); dz];
        for (j, &e) in m[..self.k()].iter().enumerate() {
            if e > 0 {
                w = crate::rational::add(&w, &crate::rational::scale(&Q::from_integer(e.into()), &self.weights[j]));
            }
        }
        w
    }

    /// Components by a_Z-weight.
    pub fn weight_components(&self, p: &Poly) -> BTreeMap<Vec<Q>, Poly> {
        let mut out: BTreeMap<Vec<Q>, Poly> = BTreeMap::new();
        for (m, c) in &p.terms {
            out.entry(self.weight(m)).or_default().add_term(m.clone(), c.clone());
        }
        out
    }

    /// Images of X·u modulo U(g)h_I over a basis X of h_I.
    fn membership_defect(&self, u: &Poly, i: &[usize]) -> Result<Vec<Poly>> {
        if u.degree() > self.cap {
            return Err(Error::CapExceeded { degree: u.degree(), cap: self.cap });
        }
        let (dd, pbw) = self.env(i);
        let mut out = Vec::new();
        for x in dd.h_i.basis() {
            out.push(self.reduce(&pbw.mul(&pbw.linear(x), u)?));
        }
        Ok(out)
    }

    /// u ∈ U_I(b): X u ∈ U(g)h_I for every X ∈ h_I.
    pub fn membership_u_i(&mut self, u: &Poly, i: &[usize]) -> Result<bool> {
        self.prepare(i)?;
        if !u.terms.keys().all(|m| self.in_b_block(m)) {
            return Err(Error::NotInSubalgebra("element uses letters outside b".into()));
        }
        Ok(self.membership_defect(u, i)?.iter().all(Poly::is_zero))
    }

    /// Normal-form monomials in the b letters of degree ≤ d.
    pub fn monomials(&self, d: usize) -> Vec<Mono> {
        let n = self.datum.g.dim();
        let k = self.k();
        let mut out = vec![vec![0u16; n]];
        let mut frontier = out.clone();
        for _ in 0..d {
            let mut next = Vec::new();
            for m in &frontier {
                let last = m[..k].iter().rposition(|&e| e > 0).unwrap_or(0);
                for j in last..k {
                    let mut mm = m.clone();
                    mm[j] += 1;
                    next.push(mm);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// A basis of U_I(b)_{≤d} modulo U(b)b_H, as a nullspace computation.
    pub fn u_i_basis(&mut self, i: &[usize], d: usize) -> Result<Vec<Poly>> {
        if d > self.cap {
            return Err(Error::CapExceeded { degree: d, cap: self.cap });
        }
        self.prepare(i)?;
        let monos = self.monomials(d);
        let n = self.datum.g.dim();
        let mut rows: BTreeMap<(usize, Mono), usize> = BTreeMap::new();
        let mut columns: Vec<Vec<Poly>> = Vec::new();
        for m in &monos {
            let mut p = Poly::zero();
            p.add_term(m.clone(), Q::from_integer(1.into()));
            let defect = self.membership_defect(&p, i)?;
            for (x, dp) in defect.iter().enumerate() {
                for mm in dp.terms.keys() {
                    let len = rows.len();
                    rows.entry((x, mm.clone())).or_insert(len);
                }
            }
            columns.push(defect);
        }
        let mut mat = QMatrix::zeros(rows.len().max(1), monos.len());
        for (col, defect) in columns.iter().enumerate() {
            for (x, dp) in defect.iter().enumerate() {
                for (mm, c) in &dp.terms {
                    mat[(rows[&(x, mm.clone())], col)] = c.clone();
                }
            }
        }
        let ns = if rows.is_empty() { (0..monos.len()).map(|j| crate::rational::unit_vec(monos.len(), j)).collect() } else { mat.nullspace() };
        let _ = n;
        Ok(ns
            .iter()
            .map(|v| {
                let mut p = Poly::zero();
                for (c, m) in v.iter().zip(&monos) {
                    p.add_term(m.clone(), c.clone());
                }
                p
            })
            .collect())
    }

    /// Image of the Casimir element in U(b)/U(b)b_H modulo U(g)h_I.
    pub fn casimir_image(&mut self, i: &[usize]) -> Result<Poly> {
        self.prepare(i)?;
        let pbw = self.pbw(i);
        Ok(self.reduce(&pbw.casimir(&self.datum.g)?))
    }

    /// Generators of the cone a_I^- = a_I ∩ a_Z^- (a_Z coordinates, lineality in both signs).
    fn a_i_minus_generators(&self, i: &[usize]) -> Vec<Vec<Q>> {
        self.degeneration(i).subcones.a_i_cone.generators_q()
    }

    /// μ_I(u_S) as the 0-weight part for a_I, with the accompanying checks.
    pub fn mu_i(&mut self, u_s: &Poly, i: &[usize], x: &[Q]) -> Result<MuResult> {
        let s = self.s_all();
        if !self.membership_u_i(u_s, &s)? {
            return Err(Error::NotInSubalgebra("u is not in U_S(b)".into()));
        }
        self.prepare(i)?;
        let dd = self.degeneration(i);
        if !dd.subcones.is_interior(x) {
            return Err(Error::NotInInteriorCone);
        }
        let a_i = dd.subcones.a_i.clone();
        let on_ai = |w: &Vec<Q>| -> bool { a_i.basis().iter().all(|b| dot(w, b).is_zero()) };
        let comps = self.weight_components(u_s);
        let gens_i = self.a_i_minus_generators(i);
        // W_max = {0}: 0 occurs and every weight is ≤ 0 on a_I^-
        let has_zero = comps.keys().any(|w| on_ai(w)) || u_s.is_zero();
        let dominated = comps.keys().all(|w| gens_i.iter().all(|g| !dot(w, g).is_positive()));
        if !(has_zero && dominated) {
            return Err(Error::MaxWeightNotZero(format!("{} weight classes", comps.len())));
        }
        let mut u_i = Poly::zero();
        for (w, c) in &comps {
            if on_ai(w) {
                u_i = u_i.add(c);
            }
        }
        let in_u_i = self.membership_u_i(&u_i, i)?;
        let cz = self.datum.compression_cone.generators_q();
        let a_ok = comps.keys().all(|w| cz.iter().all(|g| !dot(w, g).is_positive()));
        let diff = u_i.sub(u_s);
        let b_ok = self
            .weight_components(&diff)
            .keys()
            .all(|w| dot(w, x).is_negative() && gens_i.iter().all(|g| !dot(w, g).is_positive()));
        let checks = vec![
            Check { name: "mu_I(u) in U_I(b)".into(), passed: in_u_i },
            Check { name: "weights of u non-positive on a_Z^-".into(), passed: a_ok },
            Check { name: "weights of mu_I(u) - u negative on a_I^--".into(), passed: b_ok },
        ];
        Ok(MuResult { u_i, checks })
    }

    /// [X, u] ∈ U(b)b_H for X ∈ a_S and u in U_S(b)_{≤cap}.
    pub fn a_s_centrality(&mut self) -> Result<Check> {
        let s = self.s_all();
        let basis = self.u_i_basis(&s, self.cap)?;
        let edge: Vec<Vec<Q>> = self.datum.compression_cone.lineality().iter().map(|l| self.datum.az_vector(&crate::rational::ints_to_q(l))).collect();
        let pbw = self.pbw(&s);
        let mut ok = true;
        for x in &edge {
            let xl = pbw.linear(x);
            for u in &basis {
                let c = pbw.commutator(&xl, u)?;
                if !self.reduce(&c).is_zero() {
                    ok = false;
                }
            }
        }
        Ok(Check { name: format!("a_S central ({} generators, {} elements)", edge.len(), basis.len()), passed: ok })
    }

    /// μ_I restricted to S(a_S) is the inclusion, on monomials up to the cap.
    pub fn square_symmetric(&mut self, i: &[usize]) -> Result<Check> {
        let s = self.s_all();
        self.prepare(&s)?;
        self.prepare(i)?;
        let edge: Vec<Vec<Q>> = self.datum.compression_cone.lineality().iter().map(|l| self.datum.az_vector(&crate::rational::ints_to_q(l))).collect();
        let x = self.degeneration(i).subcones.interior_point().ok_or(Error::NotInInteriorCone)?;
        let mut elems = vec![self.one()];
        let mut frontier = elems.clone();
        for _ in 0..self.cap {
            let mut next = Vec::new();
            for p in &frontier {
                for e in &edge {
                    next.push(self.mul(p, &self.linear(e)?)?);
                }
            }
            elems.extend(next.iter().cloned());
            frontier = next;
        }
        let mut ok = true;
        for p in &elems {
            if self.mu_i(p, i, &x)?.u_i != *p {
                ok = false;
            }
        }
        Ok(Check { name: format!("S(a_S) square for I={i:?}"), passed: ok })
    }

    /// μ_I of the Casimir image for Z equals the Casimir image for Z_I.
    pub fn square_casimir(&mut self, i: &[usize]) -> Result<(Check, Poly, Poly)> {
        let s = self.s_all();
        let z_s = self.casimir_image(&s)?;
        let z_i = self.casimir_image(i)?;
        let x = self.degeneration(i).subcones.interior_point().ok_or(Error::NotInInteriorCone)?;
        let mu = self.mu_i(&z_s, i, &x)?;
        Ok((Check { name: format!("Casimir square for I={i:?}"), passed: mu.u_i == z_i && mu.checks.iter().all(|c| c.passed) }, z_s, z_i))
    }

    /// a_Z-weights of u − μ_I(u) over a basis of U_S(b)_{≤d}, dropping weights dominated
    /// on a_I^- by another one; `stable` records whether degree d − 1 gives the same set.
    pub fn correction_weights(&mut self, i: &[usize], d: usize) -> Result<(Vec<Vec<Q>>, bool)> {
        let collect = |me: &mut Self, deg: usize| -> Result<Vec<Vec<Q>>> {
            let s = me.s_all();
            let basis = me.u_i_basis(&s, deg)?;
            me.prepare(i)?;
            let x = me.degeneration(i).subcones.interior_point().ok_or(Error::NotInInteriorCone)?;
            let mut ws: Vec<Vec<Q>> = Vec::new();
            for u in &basis {
                let mu = me.mu_i(u, i, &x)?;
                for w in me.weight_components(&u.sub(&mu.u_i)).into_keys() {
                    if !is_zero_vec(&w) && !ws.contains(&w) {
                        ws.push(w);
                    }
                }
            }
            ws.sort();
            Ok(ws)
        };
        self.prepare(i)?;
        let gens = self.a_i_minus_generators(i);
        // w is redundant for β when some other w' dominates it on a_I^-
        let prune = |ws: Vec<Vec<Q>>| -> Vec<Vec<Q>> {
            ws.iter()
                .filter(|w| {
                    !ws.iter().any(|v| v != *w && gens.iter().all(|g| !dot(&crate::rational::sub(w, v), g).is_positive()))
                })
                .cloned()
                .collect()
        };
        let top = prune(collect(self, d)?);
        let stable = d > 0 && prune(collect(self, d - 1)?) == top;
        Ok((top, stable))
    }

    /// μ_I on U_S(b)_{≤d}: rank of the images (injectivity) and multiplicativity on pairs.
    pub fn morphism_checks(&mut self, i: &[usize], d: usize) -> Result<Vec<Check>> {
        let s = self.s_all();
        let basis = self.u_i_basis(&s, d)?;
        self.prepare(i)?;
        let x = self.degeneration(i).subcones.interior_point().ok_or(Error::NotInInteriorCone)?;
        let mut images = Vec::new();
        for u in &basis {
            images.push(self.mu_i(u, i, &x)?.u_i);
        }
        let mut index: BTreeMap<Mono, usize> = BTreeMap::new();
        for p in &images {
            for m in p.terms.keys() {
                let len = index.len();
                index.entry(m.clone()).or_insert(len);
            }
        }
        let rows: Vec<Vec<Q>> = images
            .iter()
            .map(|p| {
                let mut r = vec![Q::zero(); index.len()];
                for (m, c) in &p.terms {
                    r[index[m]] = c.clone();
                }
                r
            })
            .collect();
        let rank = if index.is_empty() { 0 } else { QMatrix::from_rows(index.len(), &rows).rank() };
        let mut mult = true;
        for a in 0..basis.len() {
            for b in 0..basis.len() {
                if basis[a].degree() + basis[b].degree() > d {
                    continue;
                }
                let prod = self.mul(&basis[a], &basis[b])?;
                let lhs = self.mu_i(&prod, i, &x)?.u_i;
                let rhs = self.mul(&images[a], &images[b])?;
                if lhs != rhs {
                    mult = false;
                }
            }
        }
        Ok(vec![
            Check { name: format!("mu_I injective on U_S(b)<={d} (dim {})", basis.len()), passed: rank == basis.len() },
            Check { name: format!("mu_I multiplicative on U_S(b)<={d}"), passed: mult },
        ])
    }

    pub fn format(&self, p: &Poly) -> String {
        let s = self.s_all();
        match self.envelopes.get(&s) {
            Some((_, pbw)) => p.format(&pbw.names),
            None => format!("{p:?}"),
        }
    }

    /// Degree of the highest monomial actually used.
    pub fn max_degree(p: &Poly) -> usize {
        p.terms.keys().map(mono_degree).max().unwrap_or(0)
    }
}

/// Output of μ_I.
#[derive(Clone, Debug)]
pub struct MuResult {
    pub u_i: Poly,
    pub checks: Vec<Check>,
}
