use crate::error::{Error, Result};
use crate::liecore::LieAlgebra;
use crate::rational::{qstr, QMatrix, Q};
use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::cell::RefCell;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};

pub type Mono = Vec<u16>;

/// An element of U(g) in PBW normal form: exponent vector → coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    pub terms: BTreeMap<Mono, Q>,
}

pub fn mono_degree(m: &Mono) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(n: usize, c: Q) -> Self {
        let mut p = Poly::zero();
        p.add_term(vec![0; n], c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(mono_degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(other, &Q::one());
        out
    }

    /// self += c · other
    pub fn add_scaled(&mut self, other: &Poly, c: &Q) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Q::one()))
    }

    /// Keeps the terms accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(&Mono) -> bool) -> Poly {
        Poly { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.terms.iter().map(|(m, c)| json!([m, qstr(c)])).collect())
    }

    /// Human-readable form over the given letter names.
    pub fn format(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mut word = Vec::new();
            for (i, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => word.push(names[i].clone()),
                    _ => word.push(format!("{}^{}", names[i], e)),
                }
            }
            if word.is_empty() {
                parts.push(qstr(c));
            } else {
                parts.push(format!("{}*{}", qstr(c), word.join("*")));
            }
        }
        parts.join(" + ")
    }
}

/// U(g) over an ordered basis of g, with products straightened to PBW order.
pub struct Pbw {
    n: usize,
    basis: Vec<Vec<Q>>,
    /// ambient coordinates → coordinates in `basis`
    to_new: QMatrix,
    /// [x_k, x_j] in new coordinates (sparse)
    brackets: Vec<Vec<Vec<(usize, Q)>>>,
    pub cap: usize,
    pub names: Vec<String>,
    memo: RefCell<HashMap<(Mono, usize), Poly>>,
}

impl Pbw {
    /// `basis` lists ambient vectors of g in PBW order.
    pub fn new(g: &LieAlgebra, basis: &[Vec<Q>], cap: usize) -> Result<Self> {
        let n = g.dim();
        if basis.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: basis.len() });
        }
        let bt = QMatrix::from_rows(n, basis).transpose();
        let to_new = bt.inverse().ok_or_else(|| Error::InvalidAlgebra("PBW letters are not a basis".into()))?;
        let mut brackets = vec![vec![Vec::new(); n]; n];
        for k in 0..n {
            for j in 0..n {
                let c = to_new.mul_vec(&g.bracket(&basis[k], &basis[j]));
                brackets[k][j] = c.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
            }
        }
        let names = basis.iter().map(|b| g.format_vector(b)).collect();
        Ok(Pbw { n, basis: basis.to_vec(), to_new, brackets, cap, names, memo: RefCell::new(HashMap::new()) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    pub fn one(&self) -> Poly {
        Poly::constant(self.n, Q::one())
    }

    pub fn letter(&self, i: usize) -> Poly {
        let mut m = vec![0u16; self.n];
        m[i] = 1;
        let mut p = Poly::zero();
        p.add_term(m, Q::one());
        p
    }

    pub fn coords(&self, v: &[Q]) -> Vec<Q> {
        self.to_new.mul_vec(v)
    }

    /// Degree-one element for an ambient vector.
    pub fn linear(&self, v: &[Q]) -> Poly {
        let mut p = Poly::zero();
        for (i, c) in self.coords(v).into_iter().enumerate() {
            let mut m = vec![0u16; self.n];
            m[i] = 1;
            p.add_term(m, c);
        }
        p
    }

    /// m · x_j in normal form.
    fn right_mul_letter(&self, m: &Mono, j: usize) -> Poly {
        let key = (m.clone(), j);
        if let Some(p) = self.memo.borrow().get(&key) {
            return p.clone();
        }
        let last = m.iter().rposition(|&e| e > 0);
        let out = match last {
            Some(k) if k > j => {
                // m = m' x_k, m x_j = (m' x_j) x_k + m' [x_k, x_j]
                let mut mp = m.clone();
                mp[k] -= 1;
                let mut out = Poly::zero();
                let a = self.right_mul_letter(&mp, j);
                for (ma, ca) in &a.terms {
                    out.add_scaled(&self.right_mul_letter(ma, k), ca);
                }
                for (l, c) in &self.brackets[k][j] {
                    out.add_scaled(&self.right_mul_letter(&mp, *l), c);
                }
                out
            }
            _ => {
                let mut mm = m.clone();
                mm[j] += 1;
                let mut p = Poly::zero();
                p.add_term(mm, Q::one());
                p
            }
        };
        self.memo.borrow_mut().insert(key, out.clone());
        out
    }

    fn mul_unchecked(&self, a: &Poly, b: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (mb, cb) in &b.terms {
            let mut cur = a.scale(cb);
            for (j, &e) in mb.iter().enumerate() {
                for _ in 0..e {
                    let mut next = Poly::zero();
                    for (m, c) in &cur.terms {
                        next.add_scaled(&self.right_mul_letter(m, j), c);
                    }
                    cur = next;
                }
            }
            out.add_scaled(&cur, &Q::one());
        }
        out
    }

    /// Product; errors if the degree would exceed the cap.
    pub fn mul(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        let d = a.degree() + b.degree();
        if !a.is_zero() && !b.is_zero() && d > self.cap {
            return Err(Error::CapExceeded { degree: d, cap: self.cap });
        }
        Ok(self.mul_unchecked(a, b))
    }

    pub fn commutator(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        Ok(self.mul(a, b)?.sub(&self.mul(b, a)?))
    }

    pub fn pow(&self, a: &Poly, k: usize) -> Result<Poly> {
        let mut out = self.one();
        for _ in 0..k {
            out = self.mul(&out, a)?;
        }
        Ok(out)
    }

    /// Re-expresses an element of `src` (same Lie algebra) in this algebra's normal form.
    pub fn convert(&self, src: &Pbw, p: &Poly) -> Result<Poly> {
        let lin: Vec<Poly> = src.basis.iter().map(|b| self.linear(b)).collect();
        let mut out = Poly::zero();
        for (m, c) in &p.terms {
            let mut cur = self.one();
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    cur = self.mul(&cur, &lin[i])?;
                }
            }
            out = out.add(&cur.scale(c));
        }
        Ok(out)
    }

    /// Σ (κ⁻¹)_{ij} e_i e_j over the standard basis of g.
    pub fn casimir(&self, g: &LieAlgebra) -> Result<Poly> {
        let kinv = g.form().inverse().ok_or(Error::DegenerateForm)?;
        let n = self.n;
        let lin: Vec<Poly> = (0..n).map(|i| self.linear(&crate::rational::unit_vec(n, i))).collect();
        let mut out = Poly::zero();
        for i in 0..n {
            for j in 0..n {
                if !kinv[(i, j)].is_zero() {
                    out = out.add(&self.mul(&lin[i], &lin[j])?.scale(&kinv[(i, j)]));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liecore::builtins::sl2;
    use crate::rational::{ivec, q, qr};

    fn mono(v: &[u16]) -> Mono {
        v.to_vec()
    }

    #[test]
    fn straightening_in_sl2() {
        let g = sl2();
        // order H, E, F
        let a = Pbw::new(&g, &[ivec(&[1, 0, 0]), ivec(&[0, 1, 0]), ivec(&[0, 0, 1])], 4).unwrap();
        let (h, e) = (a.letter(0), a.letter(1));
        let eh = a.mul(&e, &h).unwrap();
        let mut expect = Poly::zero();
        expect.add_term(mono(&[1, 1, 0]), q(1));
        expect.add_term(mono(&[0, 1, 0]), q(-2));
        assert_eq!(eh, expect);
        assert_eq!(a.mul(&e, &a.one()).unwrap(), e);
    }

    #[test]
    fn casimir_is_central() {
        let g = sl2();
        let a = Pbw::new(&g, &[ivec(&[0, 1, 0]), ivec(&[1, 0, 0]), ivec(&[0, 0, 1])], 4).unwrap();
        let c = a.casimir(&g).unwrap();
        for i in 0..3 {
            assert!(a.commutator(&c, &a.letter(i)).unwrap().is_zero());
        }
        // ½H² + 2EF − H in the order (E, H, F)
        let mut expect = Poly::zero();
        expect.add_term(mono(&[0, 2, 0]), qr(1, 2));
        expect.add_term(mono(&[1, 0, 1]), q(2));
        expect.add_term(mono(&[0, 1, 0]), q(-1));
        assert_eq!(c, expect);
    }

    #[test]
    fn cap_is_enforced() {
        let g = sl2();
        let a = Pbw::new(&g, &[ivec(&[1, 0, 0]), ivec(&[0, 1, 0]), ivec(&[0, 0, 1])], 2).unwrap();
        let x = a.letter(1);
        let x2 = a.mul(&x, &x).unwrap();
        assert!(matches!(a.mul(&x2, &x), Err(Error::CapExceeded { degree: 3, cap: 2 })));
    }

    #[test]
    fn associativity_sample() {
        let g = sl2();
        let a = Pbw::new(&g, &[ivec(&[0, 0, 1]), ivec(&[1, 0, 0]), ivec(&[0, 1, 0])], 6).unwrap();
        let x = a.linear(&ivec(&[1, 2, -1]));
        let y = a.linear(&ivec(&[0, 1, 3]));
        let z = a.mul(&a.letter(2), &a.letter(1)).unwrap();
        let l = a.mul(&a.mul(&x, &y).unwrap(), &z).unwrap();
        let r = a.mul(&x, &a.mul(&y, &z).unwrap()).unwrap();
        assert_eq!(l, r);
    }
}
