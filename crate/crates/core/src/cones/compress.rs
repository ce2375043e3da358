use super::cone::{Cone, Location};
use crate::liecore::Subspace;
use crate::rational::{dot, Q};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The face a_I of the compression cone attached to a subset I of the spherical roots.
#[derive(Clone, Debug)]
pub struct CompressionSubcones {
    /// {X : α(X) = 0 for α in I}
    pub a_i: Subspace,
    /// a_I ∩ a_Z^-
    pub a_i_cone: Cone,
    /// functionals that must be strictly negative on a_I^{--}
    pub strict: Vec<Vec<Q>>,
    /// a_S = a_Z^- ∩ (−a_Z^-)
    pub edge: Subspace,
}

impl CompressionSubcones {
    /// Membership in a_I^{--}.
    pub fn is_interior(&self, x: &[Q]) -> bool {
        self.a_i.contains(x) && self.strict.iter().all(|s| dot(s, x).is_negative())
    }

    pub fn locate(&self, x: &[Q]) -> Location {
        if !self.a_i_cone.contains(x) {
            Location::Outside
        } else if self.is_interior(x) {
            Location::Interior
        } else {
            Location::Boundary
        }
    }

    /// A deterministic element of a_I^{--}: the sum of the cone generators, which
    /// lies in the relative interior.
    pub fn interior_point(&self) -> Option<Vec<Q>> {
        let n = self.a_i.ambient();
        let mut x = vec![Q::zero(); n];
        for g in self.a_i_cone.generators_q() {
            for (xi, gi) in x.iter_mut().zip(&g) {
                *xi += gi;
            }
        }
        self.is_interior(&x).then_some(x)
    }

    /// Random integer points of a_I^{--} (positive combinations of all generators).
    pub fn interior_samples(&self, count: usize, seed: u64) -> Vec<Vec<Q>> {
        let gens = self.a_i_cone.generators_q();
        let n = self.a_i.ambient();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        let mut tries = 0;
        while out.len() < count && tries < 20 * count + 20 {
            tries += 1;
            let mut x = vec![Q::zero(); n];
            for g in &gens {
                let c = Q::from_integer(rng.random_range(1..100i64).into());
                for (xi, gi) in x.iter_mut().zip(g) {
                    *xi += &c * gi;
                }
            }
            if self.is_interior(&x) {
                out.push(x);
            }
        }
        out
    }
}

/// a_I, a_I ∩ a_Z^- with its interior predicate, and the edge of a_Z^-, for spherical
/// roots `s` (functionals on a_Z in coordinates) and the index set `i`.
pub fn compression_subcones(dim: usize, s: &[Vec<Q>], i: &[usize]) -> CompressionSubcones {
    let eq_i: Vec<Vec<Q>> = i.iter().map(|&k| s[k].clone()).collect();
    let a_i = Subspace::span(dim, &crate::rational::QMatrix::from_rows(dim, &eq_i).nullspace());
    let edge = Subspace::span(dim, &crate::rational::QMatrix::from_rows(dim, s).nullspace());
    let strict: Vec<Vec<Q>> = (0..s.len()).filter(|k| !i.contains(k)).map(|k| s[k].clone()).collect();
    let neg: Vec<Vec<Q>> = strict.iter().map(|f| f.iter().map(|x| -x).collect()).collect();
    let a_i_cone = Cone::from_inequalities_q(dim, &neg, &eq_i);
    CompressionSubcones { a_i, a_i_cone, strict, edge }
}
