use super::pbw::{Pbw, Poly};
use crate::error::{Error, Result};
use crate::liecore::LieAlgebra;
use crate::sphstruct::ParabolicDatum;
use num_traits::Zero;

/// Which nilradical is stripped off by the projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HcOrder {
    /// order (n, a, m, n̄), dropping U(g)n̄
    Standard,
    /// order (n̄, a, m, n), dropping U(g)n
    Opposite,
}

/// U(g) in a PBW order adapted to p = m + a + n, with the projection to U(a)U(m).
pub struct HcProjection {
    pub pbw: Pbw,
    pub order: HcOrder,
    head: usize,
    tail: usize,
}

impl HcProjection {
    pub fn new(g: &LieAlgebra, p: &ParabolicDatum, order: HcOrder, cap: usize) -> Result<Self> {
        let rd = &p.roots;
        let chamber = p.a.coords(&p.chamber).expect("chamber lies in a");
        let sign = |positive: bool| {
            let c = chamber.clone();
            rd.sum_where(move |al| !al.is_zero() && (al.eval(&c) > Zero::zero()) == positive)
        };
        let (first, last) = match order {
            HcOrder::Standard => (sign(true), sign(false)),
            HcOrder::Opposite => (sign(false), sign(true)),
        };
        let mut basis: Vec<_> = first.basis().to_vec();
        basis.extend(p.a.basis().iter().cloned());
        basis.extend(p.m.basis().iter().cloned());
        let tail = last.dim();
        basis.extend(last.basis().iter().cloned());
        let pbw = Pbw::new(g, &basis, cap)?;
        Ok(HcProjection { pbw, order, head: first.dim(), tail })
    }

    pub fn casimir(&self, g: &LieAlgebra) -> Result<Poly> {
        self.pbw.casimir(g)
    }

    /// Projection of z to U(a)U(m). Elements of Z(g) land there exactly; anything
    /// still carrying a nilradical letter after the reduction is reported.
    pub fn gamma0(&self, z: &Poly) -> Result<Poly> {
        let n = self.pbw.dim();
        let kept = z.filter(|m| m[n - self.tail..].iter().all(|&e| e == 0));
        if kept.terms.keys().any(|m| m[..self.head].iter().any(|&e| e > 0)) {
            return Err(Error::Verification("projection has components outside U(a)U(m)".into()));
        }
        Ok(kept)
    }

    /// [z, x] = 0 for every basis letter x.
    pub fn is_central(&self, z: &Poly) -> Result<bool> {
        for i in 0..self.pbw.dim() {
            if !self.pbw.commutator(z, &self.pbw.letter(i))?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liecore::builtins::sl2;
    use crate::liecore::Subspace;
    use crate::rational::{ivec, q, qr};

    fn projection(order: HcOrder, cap: usize) -> (LieAlgebra, HcProjection) {
        let g = sl2();
        let a = Subspace::span(3, &[ivec(&[1, 0, 0])]);
        let p = ParabolicDatum::new(&g, &a, &ivec(&[1, 0, 0])).unwrap();
        let hc = HcProjection::new(&g, &p, order, cap).unwrap();
        (g, hc)
    }

    #[test]
    fn sl2_casimir_projections() {
        let (g, hc) = projection(HcOrder::Standard, 4);
        let z = hc.casimir(&g).unwrap();
        assert!(hc.is_central(&z).unwrap());
        // letters E, H, F
        let mut expect = Poly::zero();
        expect.add_term(vec![0, 2, 0], qr(1, 2));
        expect.add_term(vec![0, 1, 0], q(-1));
        assert_eq!(hc.gamma0(&z).unwrap(), expect);
        assert_eq!(hc.gamma0(&hc.pbw.one()).unwrap(), hc.pbw.one());

        let (g, op) = projection(HcOrder::Opposite, 4);
        let z = op.casimir(&g).unwrap();
        let mut expect = Poly::zero();
        expect.add_term(vec![0, 2, 0], qr(1, 2));
        expect.add_term(vec![0, 1, 0], q(1));
        assert_eq!(op.gamma0(&z).unwrap(), expect);
    }

    #[test]
    fn gamma0_is_multiplicative_on_casimir_powers() {
        let (g, hc) = projection(HcOrder::Standard, 4);
        let z = hc.casimir(&g).unwrap();
        let z2 = hc.pbw.mul(&z, &z).unwrap();
        let g1 = hc.gamma0(&z).unwrap();
        assert_eq!(hc.gamma0(&z2).unwrap(), hc.pbw.mul(&g1, &g1).unwrap());
    }

    #[test]
    fn non_central_elements_are_flagged() {
        let (_, hc) = projection(HcOrder::Standard, 4);
        // E alone survives the n̄ filter but is not in U(a)
        assert!(hc.gamma0(&hc.pbw.letter(0)).is_err());
    }
}
