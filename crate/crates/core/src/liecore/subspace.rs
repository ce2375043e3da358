use crate::error::{Error, Result};
use crate::rational::{dot, is_zero_vec, zero_vec, QMatrix, Q};
use num_traits::Zero;

/// A subspace of ℚⁿ stored by its reduced row-echelon basis.
///
/// The representation is canonical, so `==` is subspace equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Q>>,
}

impl Subspace {
    pub fn span(ambient: usize, vectors: &[Vec<Q>]) -> Self {
        let vs: Vec<Vec<Q>> = vectors.iter().filter(|v| !is_zero_vec(v)).cloned().collect();
        if vs.is_empty() {
            return Self::zero(ambient);
        }
        let (r, pivots) = QMatrix::from_rows(ambient, &vs).rref();
        let basis = (0..pivots.len()).map(|i| r.row_vec(i)).collect();
        Subspace { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let rows: Vec<Vec<Q>> = (0..ambient).map(|i| crate::rational::unit_vec(ambient, i)).collect();
        Subspace { ambient, basis: rows }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    fn check(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: other.ambient });
        }
        Ok(())
    }

    /// Coordinates of `v` in the echelon basis, or `None` if `v` is not in the subspace.
    pub fn coords(&self, v: &[Q]) -> Option<Vec<Q>> {
        if v.len() != self.ambient {
            return None;
        }
        // pivot entries of an rref basis are the coordinates
        let mut rest = v.to_vec();
        let mut c = Vec::with_capacity(self.dim());
        for b in &self.basis {
            let p = b.iter().position(|x| !x.is_zero()).expect("nonzero basis row");
            let coef = rest[p].clone();
            if !coef.is_zero() {
                for (r, bi) in rest.iter_mut().zip(b) {
                    if !bi.is_zero() {
                        *r -= &coef * bi;
                    }
                }
            }
            c.push(coef);
        }
        if is_zero_vec(&rest) {
            Some(c)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.coords(v).is_some()
    }

    pub fn from_coords(&self, c: &[Q]) -> Vec<Q> {
        let mut v = zero_vec(self.ambient);
        for (ci, b) in c.iter().zip(&self.basis) {
            crate::rational::axpy(ci, b, &mut v);
        }
        v
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        let all: Vec<Vec<Q>> = self.basis.iter().chain(&other.basis).cloned().collect();
        Ok(Subspace::span(self.ambient, &all))
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.ambient));
        }
        // Σ a_i v_i − Σ b_j w_j = 0
        let k = self.dim();
        let m = other.dim();
        let mut mat = QMatrix::zeros(self.ambient, k + m);
        for (i, v) in self.basis.iter().enumerate() {
            for r in 0..self.ambient {
                mat[(r, i)] = v[r].clone();
            }
        }
        for (j, w) in other.basis.iter().enumerate() {
            for r in 0..self.ambient {
                mat[(r, k + j)] = -w[r].clone();
            }
        }
        let vecs: Vec<Vec<Q>> = mat.nullspace().iter().map(|c| self.from_coords(&c[..k])).collect();
        Ok(Subspace::span(self.ambient, &vecs))
    }

    /// {w ∈ W : B(w, v) = 0 for all v ∈ self ∩ W}, with B given by its Gram matrix.
    pub fn orth_complement_in(&self, w: &Subspace, form: &QMatrix) -> Result<Subspace> {
        self.check(w)?;
        let vw = self.intersection(w)?;
        if vw.is_zero() {
            return Ok(w.clone());
        }
        let mut mat = QMatrix::zeros(vw.dim(), w.dim());
        for (k, v) in vw.basis.iter().enumerate() {
            let fv = form.mul_vec(v);
            for (j, wj) in w.basis.iter().enumerate() {
                mat[(k, j)] = dot(wj, &fv);
            }
        }
        let vecs: Vec<Vec<Q>> = mat.nullspace().iter().map(|c| w.from_coords(c)).collect();
        Ok(Subspace::span(self.ambient, &vecs))
    }

    /// Some complement of `self` inside `w` spanned by standard-basis-derived vectors.
    pub fn complement_in(&self, w: &Subspace) -> Result<Subspace> {
        self.check(w)?;
        let mut acc = self.intersection(w)?;
        let mut extra = Vec::new();
        for b in &w.basis {
            if !acc.contains(b) {
                extra.push(b.clone());
                acc = acc.sum(&Subspace::span(self.ambient, &[b.clone()]))?;
            }
        }
        Ok(Subspace::span(self.ambient, &extra))
    }

    /// Basis rows as a matrix.
    pub fn matrix(&self) -> QMatrix {
        QMatrix::from_rows(self.ambient, &self.basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ivec;

    #[test]
    fn canonical_equality() {
        let a = Subspace::span(3, &[ivec(&[1, 1, 0]), ivec(&[0, 1, 1])]);
        let b = Subspace::span(3, &[ivec(&[1, 2, 1]), ivec(&[1, 0, -1])]);
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn sum_and_intersection() {
        let e = Subspace::span(3, &[ivec(&[0, 1, 0])]);
        let f = Subspace::span(3, &[ivec(&[0, 0, 1])]);
        let h = Subspace::span(3, &[ivec(&[1, 0, 0])]);
        assert!(e.sum(&f).unwrap().intersection(&h).unwrap().is_zero());
        let p = Subspace::span(3, &[ivec(&[1, 1, 0]), ivec(&[0, 0, 1])]);
        let r = Subspace::span(3, &[ivec(&[1, 1, 5]), ivec(&[1, 0, 0])]);
        assert_eq!(p.intersection(&r).unwrap(), Subspace::span(3, &[ivec(&[1, 1, 5])]));
    }

    #[test]
    fn orth_complement_of_zero() {
        let w = Subspace::span(3, &[ivec(&[1, 0, 0])]);
        let form = QMatrix::identity(3);
        assert_eq!(Subspace::zero(3).orth_complement_in(&w, &form).unwrap(), w);
        let v = Subspace::span(3, &[ivec(&[1, 1, 0])]);
        let c = v.orth_complement_in(&Subspace::full(3), &form).unwrap();
        assert_eq!(c, Subspace::span(3, &[ivec(&[1, -1, 0]), ivec(&[0, 0, 1])]));
    }

    #[test]
    fn coords_roundtrip() {
        let a = Subspace::span(3, &[ivec(&[2, 1, 0]), ivec(&[0, 3, 1])]);
        let v = ivec(&[2, 4, 1]);
        let c = a.coords(&v).unwrap();
        assert_eq!(a.from_coords(&c), v);
        assert!(a.coords(&ivec(&[0, 0, 1])).is_none());
    }
}
