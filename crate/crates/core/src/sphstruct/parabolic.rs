use crate::error::{Error, Result};
use crate::liecore::{root_decomposition, LieAlgebra, LinearFunctional, RootDecomposition, Subspace};
use crate::rational::Q;
use num_traits::{Signed, Zero};

/// A minimal parabolic p = m ⊕ a ⊕ n fixed by a split torus a and a regular chamber element.
#[derive(Clone, Debug)]
pub struct ParabolicDatum {
    pub a: Subspace,
    pub m: Subspace,
    pub n: Subspace,
    pub chamber: Vec<Q>,
    /// Σ_n, as functionals on a
    pub positive: Vec<LinearFunctional>,
    pub roots: RootDecomposition,
}

impl ParabolicDatum {
    /// Σ_n = {α : α(chamber) > 0}; the chamber element must lie in a and be regular.
    pub fn new(g: &LieAlgebra, a: &Subspace, chamber: &[Q]) -> Result<Self> {
        let roots = root_decomposition(g, a)?;
        let c = a
            .coords(chamber)
            .ok_or_else(|| Error::InvalidAlgebra("chamber element is not in a".into()))?;
        let mut positive = Vec::new();
        for alpha in roots.roots() {
            let v = alpha.eval(&c);
            if v.is_zero() {
                return Err(Error::InvalidAlgebra("chamber element is singular".into()));
            }
            if v.is_positive() {
                positive.push(alpha);
            }
        }
        let n = roots.sum_where(|b| positive.contains(b));
        let m = a.orth_complement_in(roots.zero_space(), g.form())?;
        Ok(ParabolicDatum { a: a.clone(), m, n, chamber: chamber.to_vec(), positive, roots })
    }

    pub fn p(&self) -> Subspace {
        let ma = self.m.sum(&self.a).expect("same ambient");
        ma.sum(&self.n).expect("same ambient")
    }

    /// Structural checks: p a subalgebra, a abelian, [p, n] ⊆ n, p = m ⊕ a ⊕ n.
    pub fn verify(&self, g: &LieAlgebra) -> bool {
        let p = self.p();
        p.dim() == self.m.dim() + self.a.dim() + self.n.dim()
            && g.is_subalgebra(&p)
            && g.bracket_span(&self.a, &self.a).is_zero()
            && g.brackets_into(&p, &self.n, &self.n)
    }

    /// Values of a functional on a at an ambient vector of a.
    pub fn eval(&self, alpha: &LinearFunctional, x: &[Q]) -> Q {
        alpha.eval_in(&self.a, x).expect("vector lies in a")
    }
}

/// p + h = g.
pub fn check_open_orbit(g: &LieAlgebra, h: &Subspace, p: &ParabolicDatum) -> bool {
    p.p().sum(h).map(|s| s.dim() == g.dim()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liecore::builtins::{sl, sl2};
    use crate::rational::ivec;

    #[test]
    fn sl2_borel() {
        let g = sl2();
        let a = Subspace::span(3, &[ivec(&[1, 0, 0])]);
        let p = ParabolicDatum::new(&g, &a, &ivec(&[1, 0, 0])).unwrap();
        assert_eq!(p.n, Subspace::span(3, &[ivec(&[0, 1, 0])]));
        assert!(p.m.is_zero());
        assert!(p.verify(&g));
        let so2 = Subspace::span(3, &[ivec(&[0, 1, -1])]);
        assert!(check_open_orbit(&g, &so2, &p));
        assert!(check_open_orbit(&g, &Subspace::full(3), &p));
        assert!(!check_open_orbit(&g, &a, &p));
    }

    #[test]
    fn sl3_minimal_parabolic() {
        let g = sl(3).unwrap();
        let a = Subspace::span(8, &[ivec(&[1, 0, 0, 0, 0, 0, 0, 0]), ivec(&[0, 1, 0, 0, 0, 0, 0, 0])]);
        let p = ParabolicDatum::new(&g, &a, &ivec(&[3, 1, 0, 0, 0, 0, 0, 0])).unwrap();
        assert_eq!(p.positive.len(), 3);
        assert_eq!(p.n.dim(), 3);
        assert!(p.verify(&g));
    }

    #[test]
    fn singular_chamber_rejected() {
        let g = sl2();
        let a = Subspace::span(3, &[ivec(&[1, 0, 0])]);
        assert!(ParabolicDatum::new(&g, &a, &ivec(&[0, 0, 0])).is_err());
    }
}
