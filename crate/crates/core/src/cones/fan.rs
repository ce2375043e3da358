use super::cone::{idot, Cone, IVec};
use crate::error::{Error, Result};
use crate::rational::{ints_to_q, primitive, QMatrix, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A simplicial fan with a shared ray table.
#[derive(Clone, Debug, PartialEq)]
pub struct Fan {
    pub dim: usize,
    pub rays: Vec<IVec>,
    pub cones: Vec<Vec<usize>>,
    pub smooth: Vec<bool>,
    pub support: Cone,
}

/// Pulling triangulation of the pointed cone spanned by `rays` (sorted, extreme).
fn pulling(dim: usize, rays: &[IVec]) -> Vec<Vec<IVec>> {
    let rank = QMatrix::from_rows(dim, &rays.iter().map(|r| ints_to_q(r)).collect::<Vec<_>>()).rank();
    if rays.len() == rank {
        return vec![rays.to_vec()];
    }
    let c = Cone::from_generators(dim, rays, &[]);
    let v = &rays[0];
    let mut out = Vec::new();
    for f in c.facets() {
        if idot(f, v).is_zero() {
            continue;
        }
        let face: Vec<IVec> = rays.iter().filter(|r| idot(f, r).is_zero()).cloned().collect();
        for mut s in pulling(dim, &face) {
            s.insert(0, v.clone());
            out.push(s);
        }
    }
    out
}

/// gcd of the k×k minors of a k×n integer matrix (k ≤ n).
fn minor_gcd(rows: &[IVec], dim: usize) -> BigInt {
    let k = rows.len();
    if k == 0 {
        return BigInt::one();
    }
    let mut g = BigInt::zero();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let m = QMatrix::from_rows(k, &rows.iter().map(|r| idx.iter().map(|&j| Q::from_integer(r[j].clone())).collect()).collect::<Vec<_>>());
        g = g.gcd(&m.det().to_integer());
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return g;
            }
            i -= 1;
            if idx[i] < dim - k + i {
                break;
            }
            if i == 0 && idx[0] >= dim - k {
                return g;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Deterministic simplicial subdivision of `support`: pulling triangulation of the
/// pointed part at its extreme rays in lexicographic order, times the orthants of
/// the lineality space.
pub fn simplicial_subdivision(support: &Cone) -> Fan {
    let dim = support.ambient_dim();
    let pointed = pulling(dim, support.rays());
    let lin = support.lineality();
    let mut cones_v: Vec<Vec<IVec>> = Vec::new();
    for s in &pointed {
        for mask in 0..(1usize << lin.len()) {
            let mut gens = s.clone();
            for (i, l) in lin.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    gens.push(l.iter().map(|x| -x).collect());
                } else {
                    gens.push(l.clone());
                }
            }
            cones_v.push(gens);
        }
    }
    let mut rays: Vec<IVec> = Vec::new();
    let mut cones = Vec::new();
    let mut smooth = Vec::new();
    for gens in &cones_v {
        let mut ids = Vec::new();
        for g in gens {
            let id = match rays.iter().position(|r| r == g) {
                Some(i) => i,
                None => {
                    rays.push(g.clone());
                    rays.len() - 1
                }
            };
            ids.push(id);
        }
        smooth.push(minor_gcd(gens, dim).is_one());
        cones.push(ids);
    }
    Fan { dim, rays, cones, smooth, support: support.clone() }
}

/// Outcome of the fan certification.
#[derive(Clone, Debug, Default)]
pub struct FanCertificate {
    pub simplicial: bool,
    pub faces_ok: bool,
    pub facets_ok: bool,
    pub sampled: usize,
    pub uncovered: usize,
}

impl FanCertificate {
    pub fn passed(&self) -> bool {
        self.simplicial && self.faces_ok && self.facets_ok && self.uncovered == 0
    }
}

impl Fan {
    pub fn cone(&self, i: usize) -> Cone {
        let g: Vec<IVec> = self.cones[i].iter().map(|&r| self.rays[r].clone()).collect();
        Cone::from_generators(self.dim, &g, &[])
    }

    fn generators(&self, i: usize) -> Vec<IVec> {
        self.cones[i].iter().map(|&r| self.rays[r].clone()).collect()
    }

    /// Checks simpliciality, the pairwise face property, the facet-pairing criterion
    /// for the union, and Monte Carlo coverage of the support.
    pub fn certify(&self, samples: usize, seed: u64) -> FanCertificate {
        let cones: Vec<Cone> = (0..self.cones.len()).map(|i| self.cone(i)).collect();
        let sdim = self.support.dimension();
        let mut cert = FanCertificate {
            simplicial: cones.iter().enumerate().all(|(i, c)| c.is_simplicial() && c.rays().len() == self.cones[i].len()),
            faces_ok: true,
            facets_ok: true,
            ..Default::default()
        };
        for i in 0..cones.len() {
            for j in i + 1..cones.len() {
                let common: Vec<IVec> = self.cones[i]
                    .iter()
                    .filter(|r| self.cones[j].contains(r))
                    .map(|&r| self.rays[r].clone())
                    .collect();
                let expect = Cone::from_generators(self.dim, &common, &[]);
                if cones[i].intersection(&cones[j]) != expect {
                    cert.faces_ok = false;
                }
            }
        }
        // every facet of a top-dimensional cone lies on the support boundary or is
        // shared by exactly two cones lying on opposite sides
        for (i, c) in cones.iter().enumerate() {
            if c.dimension() != sdim || !self.support.contains_cone(c) {
                cert.facets_ok = false;
                continue;
            }
            let gens = self.generators(i);
            for omit in 0..gens.len() {
                let facet: Vec<usize> = self.cones[i].iter().enumerate().filter(|(k, _)| *k != omit).map(|(_, &r)| r).collect();
                let fgens: Vec<IVec> = facet.iter().map(|&r| self.rays[r].clone()).collect();
                let on_boundary = self.support.facets().iter().any(|f| fgens.iter().all(|g| idot(f, g).is_zero()));
                if on_boundary {
                    continue;
                }
                let sharing: Vec<usize> = (0..cones.len())
                    .filter(|&j| facet.iter().all(|r| self.cones[j].contains(r)))
                    .collect();
                if sharing.len() != 2 {
                    cert.facets_ok = false;
                    continue;
                }
                let other = if sharing[0] == i { sharing[1] } else { sharing[0] };
                let apex_i = &gens[omit];
                let apex_j = self.cones[other].iter().find(|r| !facet.contains(r)).map(|&r| self.rays[r].clone());
                let Some(apex_j) = apex_j else {
                    cert.facets_ok = false;
                    continue;
                };
                let normal = facet_normal(self.dim, &fgens, &self.support);
                let (si, sj) = (idot(&normal, apex_i), idot(&normal, &apex_j));
                if !(si.is_positive() && sj.is_negative() || si.is_negative() && sj.is_positive()) {
                    cert.facets_ok = false;
                }
            }
        }
        let (sampled, uncovered) = self.sample_coverage(&cones, samples, seed);
        cert.sampled = sampled;
        cert.uncovered = uncovered;
        cert
    }

    /// Random points of the support, each tested for membership in some cone.
    fn sample_coverage(&self, cones: &[Cone], samples: usize, seed: u64) -> (usize, usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gens: Vec<Vec<i64>> = self.support.rays().iter().map(to_i64).collect();
        let lin: Vec<Vec<i64>> = self.support.lineality().iter().map(to_i64).collect();
        if gens.is_empty() && lin.is_empty() {
            gens.push(vec![0; self.dim]);
        }
        let facets: Vec<(Vec<Vec<i64>>, Vec<Vec<i64>>)> = cones
            .iter()
            .map(|c| (c.facets().iter().map(to_i64).collect(), c.equations().iter().map(to_i64).collect()))
            .collect();
        let mut uncovered = 0;
        for _ in 0..samples {
            let mut x = vec![0i64; self.dim];
            for g in &gens {
                let c: i64 = rng.random_range(0..1000);
                for (xi, gi) in x.iter_mut().zip(g) {
                    *xi += c * gi;
                }
            }
            for l in &lin {
                let c: i64 = rng.random_range(-1000..=1000);
                for (xi, li) in x.iter_mut().zip(l) {
                    *xi += c * li;
                }
            }
            let dot = |f: &Vec<i64>| -> i128 { f.iter().zip(&x).map(|(a, b)| *a as i128 * *b as i128).sum() };
            let hit = facets.iter().any(|(fs, es)| es.iter().all(|e| dot(e) == 0) && fs.iter().all(|f| dot(f) >= 0));
            if !hit {
                uncovered += 1;
            }
        }
        (samples, uncovered)
    }

    /// Chart functionals ψ_j of cone i: the cone is {x : ψ_j(x) ≤ 0 for all j} within its span.
    pub fn chart(&self, i: usize) -> Vec<Vec<Q>> {
        let gens: Vec<Vec<Q>> = self.generators(i).iter().map(|g| ints_to_q(g)).collect();
        let k = gens.len();
        if k == 0 {
            return Vec::new();
        }
        // dual basis inside the span: W = (V Vᵀ)⁻¹ V
        let v = QMatrix::from_rows(self.dim, &gens);
        let gram = v.mul(&v.transpose());
        let w = gram.inverse().expect("simplicial generators are independent").mul(&v);
        (0..k).map(|j| ints_to_q(&primitive(&w.row_vec(j))).into_iter().map(|x| -x).collect()).collect()
    }

    pub fn find_cone(&self, x: &[Q]) -> Option<usize> {
        (0..self.cones.len()).find(|&i| self.cone(i).contains(x))
    }

    /// toric_limit in the chart of the first fan cone containing x.
    pub fn chart_limit(&self, x: &[Q]) -> Result<ToricLimit> {
        let i = self.find_cone(x).ok_or(Error::ChartMismatch)?;
        Ok(toric_limit(x, &self.chart(i)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "ambient_dim": self.dim,
            "rays": self.rays.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "cones": self.cones,
            "smooth": self.smooth,
        })
    }
}

fn to_i64(v: &IVec) -> Vec<i64> {
    v.iter().map(|x| i64::try_from(x).expect("small integer entries")).collect()
}

/// Normal of the hyperplane spanned by the facet generators inside the support span.
fn facet_normal(dim: usize, fgens: &[IVec], support: &Cone) -> IVec {
    let mut rows: Vec<Vec<Q>> = fgens.iter().map(|g| ints_to_q(g)).collect();
    rows.extend(support.equations().iter().map(|e| ints_to_q(e)));
    let ns = QMatrix::from_rows(dim, &rows).nullspace();
    // the orthogonal complement of (facet + support equations) is one-dimensional
    primitive(&ns[0])
}

/// Behaviour of the chart coordinates e^{s·ψ_j(X)} as s → ∞.
#[derive(Clone, Debug, PartialEq)]
pub struct ToricLimit {
    pub exists: bool,
    pub limit_pattern: Vec<usize>,
    pub rate: Option<Q>,
}

/// Limit of exp(sX) in the chart given by `psi`: exists iff every ψ_j(X) ≤ 0; the
/// coordinates with ψ_j(X) < 0 tend to 0 at rate min |ψ_j(X)|.
pub fn toric_limit(x: &[Q], psi: &[Vec<Q>]) -> ToricLimit {
    let vals: Vec<Q> = psi.iter().map(|p| crate::rational::dot(p, x)).collect();
    let exists = vals.iter().all(|v| !v.is_positive());
    let limit_pattern: Vec<usize> = (0..vals.len()).filter(|&j| vals[j].is_negative()).collect();
    let rate = limit_pattern.iter().map(|&j| vals[j].abs()).min();
    ToricLimit { exists, limit_pattern, rate }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::cone::iv;
    use crate::rational::{ivec, q};

    #[test]
    fn simplicial_support_is_single_cone() {
        let c = Cone::from_generators(2, &[iv(&[1, 0]), iv(&[1, 2])], &[]);
        let f = simplicial_subdivision(&c);
        assert_eq!(f.cones.len(), 1);
        assert_eq!(f.smooth, vec![false]);
        assert!(f.certify(1000, 1).passed());
    }

    #[test]
    fn full_space_gives_orthants() {
        for n in 1..=3 {
            let f = simplicial_subdivision(&Cone::full(n));
            assert_eq!(f.cones.len(), 1 << n);
            assert!(f.smooth.iter().all(|&s| s));
            assert!(f.certify(2000, 7).passed());
        }
    }

    #[test]
    fn square_cone_splits_in_two() {
        let gens = [iv(&[1, 1, 1]), iv(&[1, -1, 1]), iv(&[-1, 1, 1]), iv(&[-1, -1, 1])];
        let f = simplicial_subdivision(&Cone::from_generators(3, &gens, &[]));
        assert_eq!(f.cones.len(), 2);
        assert!(f.certify(5000, 3).passed());
    }

    #[test]
    fn bad_fan_is_rejected() {
        let support = Cone::full(2);
        let mut f = simplicial_subdivision(&support);
        f.cones.pop();
        f.smooth.pop();
        let cert = f.certify(2000, 5);
        assert!(!cert.facets_ok);
        assert!(cert.uncovered > 0);
    }

    #[test]
    fn toric_rates() {
        // dψ = 2α with α(H) = 2, X = −H
        let t = toric_limit(&ivec(&[-1]), &[ivec(&[4])]);
        assert!(t.exists);
        assert_eq!(t.limit_pattern, vec![0]);
        assert_eq!(t.rate, Some(q(4)));
        assert!(!toric_limit(&ivec(&[1]), &[ivec(&[4])]).exists);
        let t = toric_limit(&ivec(&[0, -2]), &[ivec(&[-1, 0]), ivec(&[0, 1])]);
        assert!(t.exists);
        assert_eq!(t.limit_pattern, vec![1]);
        assert_eq!(t.rate, Some(q(2)));
    }

    #[test]
    fn chart_of_negative_halfline() {
        let c = Cone::from_inequalities(1, &[iv(&[-1])], &[]);
        let f = simplicial_subdivision(&c);
        let lim = f.chart_limit(&ivec(&[-3])).unwrap();
        assert!(lim.exists);
        assert_eq!(lim.rate, Some(q(3)));
        assert!(matches!(f.chart_limit(&ivec(&[1])), Err(Error::ChartMismatch)));
    }
}
