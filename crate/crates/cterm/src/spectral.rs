use crate::error::{CtermError, Result};
use crate::linalg::{c, eigenvalues, op_norm, CMat, C};
use crate::system::TransportSystem;
use serde_json::{json, Value};

/// Relative tolerance for merging simple and double eigenvalues; larger clusters get
/// `merge_radius`.
pub const CLUSTER_TOL: f64 = 1e-6;
pub const CHECK_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub value: C,
    pub mult: usize,
}

/// Resolution of a defective eigenvalue: a size-m block splits by about DEFECT_RES^{1/m}.
pub const DEFECT_RES: f64 = 1e-12;

/// Merge radius for a cluster of multiplicity m, relative to 1 + ‖A‖.
pub fn merge_radius(m: usize) -> f64 {
    CLUSTER_TOL.max(DEFECT_RES.powf(1.0 / m as f64))
}

/// Single-linkage clustering with a defect-aware radius. Each eigenvalue gets the largest
/// local multiplicity m with at least m eigenvalues inside `tol · merge_radius(m)/CLUSTER_TOL`;
/// two eigenvalues are linked when closer than the radius of the smaller of their
/// multiplicities.
pub fn cluster_eigenvalues(ev: &[C], tol: f64) -> Vec<Cluster> {
    let n = ev.len();
    let radius = |m: usize| tol * merge_radius(m) / CLUSTER_TOL;
    let dist = |i: usize, j: usize| (ev[i] - ev[j]).norm();
    let local: Vec<usize> = (0..n)
        .map(|i| (1..=n).rev().find(|&m| (0..n).filter(|&j| dist(i, j) <= radius(m)).count() >= m).unwrap_or(1))
        .collect();
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if dist(i, j) <= radius(local[i].min(local[j]).max(2)) {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, Vec<C>)> = Vec::new();
    for i in 0..n {
        let r = root(&mut label, i);
        match groups.iter_mut().find(|(k, _)| *k == r) {
            Some((_, g)) => g.push(ev[i]),
            None => groups.push((r, vec![ev[i]])),
        }
    }
    let groups: Vec<Vec<C>> = groups.into_iter().map(|(_, g)| g).collect();
    let mut out: Vec<Cluster> = groups
        .into_iter()
        .map(|g| Cluster { value: g.iter().sum::<C>() / c(g.len() as f64), mult: g.len() })
        .collect();
    out.sort_by(|a, b| a.value.re.partial_cmp(&b.value.re).unwrap().then(a.value.im.partial_cmp(&b.value.im).unwrap()));
    out
}

/// Spectral projectors of `a` onto the generalized eigenspaces of the given clusters.
/// The range of Π_{μ≠λ}(A − μ)^{m_μ} is the generalized eigenspace for λ.
pub fn cluster_projectors(a: &CMat, clusters: &[Cluster]) -> Result<Vec<CMat>> {
    let n = a.nrows();
    if clusters.len() <= 1 {
        return Ok(vec![CMat::identity(n, n)]);
    }
    let mut blocks = Vec::new();
    for (i, cl) in clusters.iter().enumerate() {
        let mut prod = CMat::identity(n, n);
        for (j, other) in clusters.iter().enumerate() {
            if i == j {
                continue;
            }
            let f = a - CMat::identity(n, n) * other.value;
            let s = op_norm(&f).max(f64::MIN_POSITIVE);
            let f = f / c(s);
            for _ in 0..other.mult {
                prod = &f * &prod;
                let s = op_norm(&prod).max(f64::MIN_POSITIVE);
                prod /= c(s);
            }
        }
        // range of prod through a fixed sketch, orthonormalised
        let sketch = CMat::from_fn(n, cl.mult, |r, k| c(((r * 7 + k * 13 + 3) % 17) as f64 / 17.0 - 0.45 + if r == k { 1.0 } else { 0.0 }));
        let q = (prod * sketch).qr().q();
        for k in 0..cl.mult {
            blocks.push((i, q.column(k).into_owned()));
        }
    }
    let b = CMat::from_columns(&blocks.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>());
    let binv = b.clone().try_inverse().ok_or_else(|| CtermError::IllConditioned("generalized eigenvectors are dependent".into()))?;
    let mut out = Vec::new();
    for i in 0..clusters.len() {
        let mut e = CMat::zeros(n, n);
        for (col, (owner, _)) in blocks.iter().enumerate() {
            if *owner == i {
                e += b.column(col) * binv.row(col);
            }
        }
        out.push(e);
    }
    Ok(out)
}

pub fn spectral_decomposition(a: &CMat) -> Result<Vec<(Cluster, CMat)>> {
    let ev = eigenvalues(a);
    let tol = CLUSTER_TOL * (1.0 + op_norm(a));
    let cl = cluster_eigenvalues(&ev, tol);
    let ps = cluster_projectors(a, &cl)?;
    Ok(cl.into_iter().zip(ps).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Class {
    Plus,
    Zero,
    Minus,
}

impl Class {
    pub fn name(&self) -> &'static str {
        match self {
            Class::Plus => "Q+",
            Class::Zero => "Q0",
            Class::Minus => "Q-",
        }
    }
}

/// A joint generalized eigenvalue λ of Γ with its projector.
#[derive(Clone, Debug)]
pub struct Exponent {
    /// λ on the a_I basis
    pub values: Vec<C>,
    pub class: Class,
    pub projector: CMat,
    /// (Γ_i − λ_i)E_λ, nilpotent
    pub nilpotent: Vec<CMat>,
    pub rank: usize,
}

impl Exponent {
    pub fn at(&self, x: &[f64]) -> C {
        self.values.iter().zip(x).map(|(v, xi)| v * xi).sum()
    }

    pub fn nilpotent_at(&self, x: &[f64]) -> CMat {
        let n = self.projector.nrows();
        let mut out = CMat::zeros(n, n);
        for (m, &xi) in self.nilpotent.iter().zip(x) {
            out += m * c(xi);
        }
        out
    }

    /// E_λ e^{sΓ(X)} = e^{sλ(X)} Σ_k s^k N(X)^k E_λ / k!
    pub fn propagate(&self, x: &[f64], s: f64) -> CMat {
        let n = self.projector.nrows();
        let nx = self.nilpotent_at(x);
        let mut term = self.projector.clone();
        let mut sum = term.clone();
        for k in 1..n.max(1) {
            term = &nx * &term * c(s / k as f64);
            sum += &term;
        }
        sum * (self.at(x) * s).exp()
    }
}

#[derive(Clone, Debug)]
pub struct SpectralChecks {
    pub partition_of_unity: f64,
    pub orthogonality: f64,
    pub commutation: f64,
}

impl SpectralChecks {
    pub fn passed(&self) -> bool {
        self.partition_of_unity <= CHECK_TOL && self.orthogonality <= CHECK_TOL && self.commutation <= CHECK_TOL
    }
}

#[derive(Clone, Debug)]
pub struct SpectralDatum {
    pub exponents: Vec<Exponent>,
    /// largest 2^{-k} ≤ ½ with Re λ ≤ ρ_Q + δβ_I on the sample set for λ ∈ Q⁻
    pub delta: Option<f64>,
    pub checks: SpectralChecks,
}

impl SpectralDatum {
    pub fn of_class(&self, class: Class) -> impl Iterator<Item = &Exponent> {
        self.exponents.iter().filter(move |e| e.class == class)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "exponents": self.exponents.iter().map(|e| json!({
                "values": e.values.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
                "class": e.class.name(),
                "rank": e.rank,
                "projector_norm": op_norm(&e.projector),
            })).collect::<Vec<_>>(),
            "delta": self.delta,
            "checks": {
                "partition_of_unity": self.checks.partition_of_unity,
                "orthogonality": self.checks.orthogonality,
                "commutation": self.checks.commutation,
                "passed": self.checks.passed(),
            }
        })
    }
}

fn classify(sys: &TransportSystem, values: &[C]) -> Class {
    let scale = 1.0 + values.iter().map(|v| v.norm()).fold(0.0, f64::max) + crate::linalg::norm(&sys.rho_q);
    let tol = 1e-8 * scale;
    let mut zero = true;
    for g in &sys.cone.generators {
        let d: f64 = values.iter().zip(g).map(|(v, x)| v.re * x).sum::<f64>() - sys.rho_at(g);
        if d > tol {
            return Class::Plus;
        }
        if d.abs() > tol {
            zero = false;
        }
    }
    if zero {
        Class::Zero
    } else {
        Class::Minus
    }
}

/// Joint generalized eigenvalues of Γ(X_1), …, Γ(X_r), projectors as products of the
/// single-matrix spectral projectors, and the Q⁺/Q⁰/Q⁻ classification.
pub fn joint_spectrum(sys: &TransportSystem) -> Result<SpectralDatum> {
    let n = sys.dim;
    let mut families: Vec<Vec<CMat>> = Vec::new();
    for g in &sys.gamma {
        families.push(spectral_decomposition(g)?.into_iter().map(|(_, p)| p).collect());
    }
    let mut products: Vec<CMat> = vec![CMat::identity(n, n)];
    for fam in &families {
        let mut next = Vec::new();
        for p in &products {
            for e in fam {
                let q = p * e;
                if q.trace().norm() > 0.5 {
                    next.push(q);
                }
            }
        }
        products = next;
    }
    let mut exponents = Vec::new();
    for p in products {
        let tr = p.trace();
        let rank = tr.re.round() as usize;
        let values: Vec<C> = sys.gamma.iter().map(|g| (g * &p).trace() / tr).collect();
        let nilpotent = sys.gamma.iter().zip(&values).map(|(g, v)| (g - CMat::identity(n, n) * *v) * &p).collect();
        let class = classify(sys, &values);
        exponents.push(Exponent { values, class, projector: p, nilpotent, rank });
    }
    exponents.sort_by(|a, b| {
        let key = |e: &Exponent| e.values.iter().flat_map(|z| [z.re, z.im]).collect::<Vec<_>>();
        key(a).partial_cmp(&key(b)).unwrap()
    });
    let scale = 1.0 + sys.gamma.iter().map(op_norm).fold(0.0, f64::max);
    for (i, a) in exponents.iter().enumerate() {
        for b in &exponents[i + 1..] {
            let d: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            if d <= 10.0 * CLUSTER_TOL * scale && a.class != b.class {
                return Err(CtermError::ClusterAmbiguity(format!("{:?}", a.values), format!("{:?}", b.values)));
            }
        }
    }
    let checks = projector_checks(sys, &exponents);
    let delta = select_delta(sys, &exponents);
    Ok(SpectralDatum { exponents, delta, checks })
}

fn projector_checks(sys: &TransportSystem, ex: &[Exponent]) -> SpectralChecks {
    let n = sys.dim;
    let mut sum = CMat::zeros(n, n);
    let mut orth: f64 = 0.0;
    let mut comm: f64 = 0.0;
    for (i, a) in ex.iter().enumerate() {
        sum += &a.projector;
        let na = op_norm(&a.projector);
        for (j, b) in ex.iter().enumerate() {
            if i != j {
                orth = orth.max(op_norm(&(&a.projector * &b.projector)) / (na * op_norm(&b.projector)));
            }
        }
        for g in &sys.gamma {
            let ng = op_norm(g);
            if ng > 0.0 {
                comm = comm.max(op_norm(&(&a.projector * g - g * &a.projector)) / (na * ng));
            }
        }
    }
    let pou = op_norm(&(sum - CMat::identity(n, n)));
    SpectralChecks { partition_of_unity: pou, orthogonality: orth, commutation: comm }
}

fn select_delta(sys: &TransportSystem, ex: &[Exponent]) -> Option<f64> {
    let minus: Vec<&Exponent> = ex.iter().filter(|e| e.class == Class::Minus).collect();
    let mut delta = 0.5;
    for _ in 0..40 {
        let ok = minus.iter().all(|e| {
            sys.cone.samples().all(|x| {
                let lhs = e.at(x).re;
                let rhs = sys.rho_at(x) + delta * sys.beta_at(x);
                lhs <= rhs + 1e-9 * (1.0 + lhs.abs())
            })
        });
        if ok {
            return Some(delta);
        }
        delta /= 2.0;
    }
    None
}

/// ‖P_k‖ against C(ν, N)(1+‖A‖)^N for the projector onto the generalized eigenspaces
/// with real part at most the k-th distinct real part, along the rest.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorBound {
    pub norm: f64,
    pub bound: f64,
    pub pass: bool,
}

/// C(ν, N) = (4/π)·3^{N−1}·(2/ν)^N, from the Riesz integral over a rectangle through
/// the gap and ‖(z−A)^{-1}‖ ≤ ‖z−A‖^{N−1}/|det(z−A)|.
pub fn projector_constant(nu: f64, n: usize) -> f64 {
    4.0 / std::f64::consts::PI * 3f64.powi(n as i32 - 1) * (2.0 / nu).powi(n as i32)
}

/// Distinct real-part levels of the spectrum, from the cluster centres.
pub fn real_levels(a: &CMat) -> Vec<f64> {
    let tol = CLUSTER_TOL * (1.0 + op_norm(a));
    let mut re: Vec<f64> = cluster_eigenvalues(&eigenvalues(a), tol).iter().map(|cl| cl.value.re).collect();
    re.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut levels: Vec<f64> = Vec::new();
    for r in re {
        if levels.last().map(|l| (r - l).abs() > tol).unwrap_or(true) {
            levels.push(r);
        }
    }
    levels
}

pub fn projector_bound_check(a: &CMat, k: usize, nu: f64) -> Result<ProjectorBound> {
    let levels = real_levels(a);
    if k == 0 || k >= levels.len() {
        return Err(CtermError::Invalid(format!("cut {k} outside 1..{}", levels.len())));
    }
    let gap = levels[k] - levels[k - 1];
    if gap < nu - 1e-9 {
        return Err(CtermError::GapViolated { gap, required: nu });
    }
    let cut = 0.5 * (levels[k] + levels[k - 1]);
    let mut p = CMat::zeros(a.nrows(), a.ncols());
    for (cl, e) in spectral_decomposition(a)? {
        if cl.value.re < cut {
            p += e;
        }
    }
    let norm = op_norm(&p);
    let n = a.nrows();
    let bound = projector_constant(nu, n) * (1.0 + op_norm(a)).powi(n as i32);
    Ok(ProjectorBound { norm, bound, pass: norm <= bound })
}

/// ‖E_λ(X)‖ ≤ c(1+‖X‖)^N with N = dim and c = ‖E_λ‖·max(1, Σ_i‖N_i‖)^N, over the samples.
pub fn elambda_growth_check(e: &Exponent, samples: &[Vec<f64>]) -> (f64, bool) {
    let n = e.projector.nrows() as i32;
    let m: f64 = e.nilpotent.iter().map(op_norm).sum();
    let cst = op_norm(&e.projector) * m.max(1.0).powi(n);
    let mut worst: f64 = 0.0;
    for x in samples {
        let lhs = op_norm(&e.propagate(x, 1.0)) * (-e.at(x).re).exp();
        let rhs = cst * (1.0 + crate::linalg::norm(x)).powi(n);
        worst = worst.max(lhs / rhs);
    }
    (cst, worst <= 1.0 + 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cvec, from_real};
    use crate::system::{ones, ConeData};
    use nalgebra::DMatrix;

    fn ray_system(gamma: Vec<CMat>, rho: f64) -> TransportSystem {
        let n = gamma[0].nrows();
        let cone = ConeData::from_generators(vec![vec![-1.0]], &[]);
        TransportSystem::homogeneous(gamma, vec![rho], vec![vec![1.0]], cone, ones(n)).unwrap()
    }

    #[test]
    fn defective_triple_is_one_cluster() {
        let mut t = DMatrix::<f64>::zeros(4, 4);
        for i in 0..3 {
            t[(i, i)] = 2.0;
        }
        t[(0, 1)] = 1.5;
        t[(1, 2)] = -0.7;
        t[(3, 3)] = 3.0;
        let sm = DMatrix::from_fn(4, 4, |i, j| if i == j { 2.0 } else { 0.3 * (i as f64 - j as f64 + 0.5) });
        let a = from_real(&(&sm * t * sm.clone().try_inverse().unwrap()));
        assert_eq!(real_levels(&a).len(), 2);
        let d = spectral_decomposition(&a).unwrap();
        assert_eq!(d.iter().map(|(c, _)| c.mult).collect::<Vec<_>>(), vec![3, 1]);
        assert!((d[0].0.value - c(2.0)).norm() < 1e-9);
        let b = projector_bound_check(&a, 1, 1.0).unwrap();
        assert!(b.pass && (b.norm - op_norm(&d[0].1)).abs() < 1e-9);
    }

    #[test]
    fn resolvable_pair_stays_split() {
        let cl = cluster_eigenvalues(&[c(1.0), c(1.0 + 1e-3), c(5.0)], 1e-6 * 6.0);
        assert_eq!(cl.len(), 3);
    }

    #[test]
    fn scalar_gamma_is_q0() {
        let rho = 1.5;
        let sys = ray_system(vec![CMat::identity(3, 3) * c(rho)], rho);
        let sp = joint_spectrum(&sys).unwrap();
        assert_eq!(sp.exponents.len(), 1);
        assert_eq!(sp.exponents[0].class, Class::Zero);
        assert!((op_norm(&(&sp.exponents[0].projector - CMat::identity(3, 3)))) < 1e-12);
    }

    #[test]
    fn split_diagonal_is_plus_and_minus() {
        // on X = −1: ρ(X)+1 and ρ(X)−1
        let rho = 2.0;
        let g = from_real(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![rho - 1.0, rho + 1.0])));
        let sp = joint_spectrum(&ray_system(vec![g], rho)).unwrap();
        let classes: Vec<Class> = sp.exponents.iter().map(|e| e.class).collect();
        assert_eq!(classes, vec![Class::Plus, Class::Minus]);
        assert!(sp.checks.passed());
        assert_eq!(sp.delta, Some(0.5));
    }

    #[test]
    fn jordan_block_is_one_exponent() {
        let g = CMat::from_row_slice(3, 3, &[c(1.0), c(1.0), c(0.0), c(0.0), c(1.0), c(1.0), c(0.0), c(0.0), c(1.0)]);
        let dec = spectral_decomposition(&g).unwrap();
        assert_eq!(dec.len(), 1);
        assert_eq!(dec[0].0.mult, 3);
    }

    #[test]
    fn commuting_pair_from_polynomials() {
        // A with spectrum {1, 2, −1}; p(A) = A², q(A) = A + 3
        let s = from_real(&DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0]));
        let d = from_real(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, -1.0])));
        let a = &s * d * s.clone().try_inverse().unwrap();
        let p = &a * &a;
        let q = &a + CMat::identity(3, 3) * c(3.0);
        let cone = ConeData::from_generators(vec![vec![-1.0, 0.0], vec![0.0, -1.0]], &[]);
        let sys = TransportSystem::homogeneous(vec![p, q], vec![0.0, 0.0], vec![vec![1.0, 0.0]], cone, cvec(&[1.0, 0.0, 0.0])).unwrap();
        let sp = joint_spectrum(&sys).unwrap();
        let mut got: Vec<(f64, f64)> = sp.exponents.iter().map(|e| (e.values[0].re, e.values[1].re)).collect();
        got.sort_by(|x, y| (x.0.round(), x.1.round()).partial_cmp(&(y.0.round(), y.1.round())).unwrap());
        let want = [(1.0, 2.0), (1.0, 4.0), (4.0, 5.0)];
        for (g, w) in got.iter().zip(want) {
            assert!((g.0 - w.0).abs() < 1e-9 && (g.1 - w.1).abs() < 1e-9, "{got:?}");
        }
        assert!(sp.checks.passed(), "{:?}", sp.checks);
    }

    #[test]
    fn normal_matrix_projector_has_norm_one() {
        let a = from_real(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, 1.0, 3.0])));
        let r = projector_bound_check(&a, 1, 1.0).unwrap();
        assert!((r.norm - 1.0).abs() < 1e-12 && r.pass);
    }

    #[test]
    fn jordan_like_projector_grows_with_m() {
        for m in [1.0, 10.0, 100.0, 1000.0] {
            let a = from_real(&DMatrix::from_row_slice(2, 2, &[0.0, m, 0.0, 1.0]));
            let r = projector_bound_check(&a, 1, 1.0).unwrap();
            // P = [[1, −m], [0, 0]]
            assert!((r.norm - (1.0 + m * m).sqrt()).abs() < 1e-8 * (1.0 + m));
            assert!(r.pass);
        }
        let a = from_real(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.5]));
        assert!(matches!(projector_bound_check(&a, 1, 1.0), Err(CtermError::GapViolated { .. })));
    }
}
