//! Randomly generated and hand-staged transport systems with closed-form solutions.

use crate::error::Result;
use crate::linalg::{c, combination, op_norm, CMat, CVec, C};
use crate::spectral::Class;
use crate::system::{ones, ConeData, Envelope, TransportSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn dotc(f: &[C], x: &[f64]) -> C {
    f.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// One Jordan block of the synthetic Γ: λ(X)·I + ℓ(X)·J on a block of size 1 or 2.
#[derive(Clone, Debug)]
pub struct Block {
    pub start: usize,
    pub size: usize,
    pub lambda: Vec<C>,
    pub ell: Vec<f64>,
    pub class: Class,
}

/// Γ(X) = S·diag_b(λ_b(X) + ℓ_b(X)J)·S⁻¹ with an exact solution
/// Φ(y) = e^{Γ(y)}c + S w e^{μ(y)}, hence Ψ_X(y) = (μ(X) − Γ(X)) S w e^{μ(y)}.
#[derive(Clone)]
pub struct RandomSystem {
    pub system: TransportSystem,
    pub s: CMat,
    pub s_inv: CMat,
    pub blocks: Vec<Block>,
    pub c0: CVec,
    pub w: CVec,
    pub mu: Vec<C>,
}

impl RandomSystem {
    /// Draws a system of the given rank and dimension; a_Z = a_I = ℝ^rank, cone = negative orthant.
    pub fn generate(rng: &mut ChaCha8Rng, rank: usize, dim: usize) -> Result<Self> {
        let rho: Vec<f64> = (0..rank).map(|_| rng.random_range(-2.0..0.0)).collect();
        let mut blocks: Vec<Block> = Vec::new();
        let mut start = 0;
        let mut used_nu: Vec<f64> = Vec::new();
        while start < dim {
            let size = if dim - start >= 2 && rng.random_bool(0.4) { 2 } else { 1 };
            let class = match rng.random_range(0..3) {
                0 => Class::Plus,
                1 => Class::Zero,
                _ => Class::Minus,
            };
            let offset: Vec<f64> = match class {
                Class::Zero => vec![0.0; rank],
                Class::Minus => vec![rng.random_range(1..3) as f64; rank],
                Class::Plus => {
                    let j = rng.random_range(0..rank);
                    (0..rank).map(|i| if i == j { -(rng.random_range(1..3) as f64) } else { 0.0 }).collect()
                }
            };
            // keep imaginary parts apart so distinct blocks never cluster
            let mut nu;
            loop {
                nu = rng.random_range(-3.0..3.0);
                if used_nu.iter().all(|u: &f64| (u - nu).abs() > 0.3) {
                    break;
                }
            }
            used_nu.push(nu);
            let dir: Vec<f64> = (0..rank).map(|_| rng.random_range(0.5..1.5)).collect();
            let lambda = (0..rank).map(|i| C::new(rho[i] + offset[i], nu * dir[i])).collect();
            let ell = if size == 2 { (0..rank).map(|_| rng.random_range(-1.0..1.0)).collect() } else { vec![0.0; rank] };
            blocks.push(Block { start, size, lambda, ell, class });
            start += size;
        }
        let mut s = CMat::from_fn(dim, dim, |_, _| c(rng.random_range(-1.0..1.0)));
        s += CMat::identity(dim, dim) * c(2.5);
        let s_inv = s.clone().try_inverse().expect("diagonally dominated");
        let gamma: Vec<CMat> = (0..rank)
            .map(|i| {
                let mut t = CMat::zeros(dim, dim);
                for b in &blocks {
                    for k in 0..b.size {
                        t[(b.start + k, b.start + k)] = b.lambda[i];
                    }
                    if b.size == 2 {
                        t[(b.start, b.start + 1)] = c(b.ell[i]);
                    }
                }
                &s * t * &s_inv
            })
            .collect();
        let generators: Vec<Vec<f64>> = (0..rank).map(|j| (0..rank).map(|i| if i == j { -1.0 } else { 0.0 }).collect()).collect();
        let cone = ConeData::from_generators(generators, &[vec![1.0, 2.0], vec![2.0, 1.0]]);
        let beta = vec![vec![1.0; rank]];
        let sys = TransportSystem::homogeneous(gamma, rho.clone(), beta, cone, ones(dim))?;
        let c0 = CVec::from_fn(dim, |_, _| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let w = CVec::from_fn(dim, |_, _| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let mu: Vec<C> = (0..rank).map(|i| C::new(rho[i] + 1.5, rng.random_range(-2.0..2.0))).collect();
        let sw = &s * &w;
        let psi_gamma = sys.gamma.clone();
        let psi_mu = mu.clone();
        let psi = Arc::new(move |a: &[f64], x: &[f64]| {
            let g = combination(&psi_gamma, x);
            let n = g.nrows();
            (CMat::identity(n, n) * dotc(&psi_mu, x) - g) * &sw * dotc(&psi_mu, a).exp()
        });
        // valid for ‖a_Z‖ ≤ 1 and X among the cone samples
        let re_mu: Vec<f64> = mu.iter().map(|z| z.re).collect();
        let mut constant: f64 = 0.0;
        for x in sys.cone.samples() {
            let g = sys.gamma_at(x);
            constant = constant.max(op_norm(&(CMat::identity(dim, dim) * dotc(&mu, x) - g)) * (&s * &w).norm());
        }
        constant *= crate::linalg::norm(&re_mu).exp();
        let envelope = Envelope { exponents: vec![re_mu], constant, power: 0 };
        let system = sys.with_psi(psi, envelope, "synthetic exponential forcing");
        Ok(RandomSystem { system, s, s_inv, blocks, c0, w, mu })
    }

    /// Seeded shortcut for `generate`.
    pub fn seeded(seed: u64, rank: usize, dim: usize) -> Result<Self> {
        Self::generate(&mut ChaCha8Rng::seed_from_u64(seed), rank, dim)
    }

    /// S⁻¹e^{Γ(y)}S in block form, restricted to the blocks accepted by `keep`.
    fn block_exp(&self, y: &[f64], keep: impl Fn(&Block) -> bool) -> CMat {
        let n = self.system.dim;
        let mut t = CMat::zeros(n, n);
        for b in self.blocks.iter().filter(|b| keep(b)) {
            let e = dotc(&b.lambda, y).exp();
            for k in 0..b.size {
                t[(b.start + k, b.start + k)] = e;
            }
            if b.size == 2 {
                let l: f64 = b.ell.iter().zip(y).map(|(p, q)| p * q).sum();
                t[(b.start, b.start + 1)] = e * l;
            }
        }
        t
    }

    /// Φ(y) in closed form.
    pub fn exact(&self, y: &[f64]) -> CVec {
        &self.s * self.block_exp(y, |_| true) * &self.s_inv * &self.c0 + &self.s * &self.w * dotc(&self.mu, y).exp()
    }

    /// f_I(y) = Σ_{λ∈Q⁰} ⟨E_λ e^{Γ(y)}c, 1⟩.
    pub fn constant_term_truth(&self, y: &[f64]) -> C {
        let v = &self.s * self.block_exp(y, |b| b.class == Class::Zero) * &self.s_inv * &self.c0;
        self.system.pairing(&v)
    }

    pub fn has_q0(&self) -> bool {
        self.blocks.iter().any(|b| b.class == Class::Zero)
    }
}

/// Two spherical roots e_1, e_2 on a_Z = ℝ². Components: four pure terms
/// c_n e^{(ρ+iν_n+n)·y}, n ∈ {0,1}², and two forced ones
/// c e^{λ·y} + d e^{(λ+α)·y} with α = e_1 + e_2 and α = e_1.
#[derive(Clone, Debug)]
pub struct StagedSystem {
    pub rho: [f64; 2],
    pub exponents: Vec<[C; 2]>,
    pub coeffs: Vec<C>,
    /// (component, α, d)
    pub forced: Vec<(usize, [f64; 2], C)>,
}

impl StagedSystem {
    pub fn new(rho: [f64; 2], nu: [[f64; 2]; 6], coeffs: Vec<C>, d: [C; 2]) -> Self {
        let shifts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.0, 0.0], [0.0, 0.0]];
        let exponents = (0..6).map(|k| [C::new(rho[0] + shifts[k][0], nu[k][0]), C::new(rho[1] + shifts[k][1], nu[k][1])]).collect();
        StagedSystem { rho, exponents, coeffs, forced: vec![(4, [1.0, 1.0], d[0]), (5, [1.0, 0.0], d[1])] }
    }

    pub fn standard() -> Self {
        let c = |a: f64, b: f64| C::new(a, b);
        StagedSystem::new(
            [-1.0, -0.5],
            [[0.7, 0.3], [1.1, -0.4], [-0.6, 0.9], [0.2, 1.3], [-1.2, -0.8], [1.6, 0.5]],
            vec![c(1.0, 0.5), c(-0.7, 0.2), c(0.4, -1.1), c(0.9, 0.3), c(0.6, 0.6), c(-0.5, 0.8)],
            [c(0.8, -0.3), c(-0.4, 0.7)],
        )
    }

    /// The a_I basis in a_Z coordinates for I ⊆ {0, 1}; `None` for I = S.
    pub fn a_i_basis(i: &[usize]) -> Option<Vec<Vec<f64>>> {
        let mut basis = Vec::new();
        for k in 0..2 {
            if !i.contains(&k) {
                let mut e = vec![0.0; 2];
                e[k] = 1.0;
                basis.push(e);
            }
        }
        if basis.is_empty() {
            None
        } else {
            Some(basis)
        }
    }

    /// Φ(y) componentwise.
    pub fn exact(&self, y: &[f64]) -> CVec {
        let mut v = CVec::from_fn(6, |k, _| self.coeffs[k] * dotc(&self.exponents[k], y).exp());
        for &(k, alpha, d) in &self.forced {
            let shifted = [self.exponents[k][0] + alpha[0], self.exponents[k][1] + alpha[1]];
            v[k] += d * dotc(&shifted, y).exp();
        }
        v
    }

    /// Closed-form f_I: the components and forced parts whose shift vanishes on a_I.
    pub fn constant_term_truth(&self, i: &[usize], y: &[f64]) -> C {
        let basis = match Self::a_i_basis(i) {
            Some(b) => b,
            None => return self.exact(y).iter().sum(),
        };
        let vanishes = |shift: [f64; 2]| basis.iter().all(|b| shift[0] * b[0] + shift[1] * b[1] == 0.0);
        let shifts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.0, 0.0], [0.0, 0.0]];
        let mut total = C::new(0.0, 0.0);
        for k in 0..6 {
            if vanishes(shifts[k]) {
                total += self.coeffs[k] * dotc(&self.exponents[k], y).exp();
            }
        }
        for &(k, alpha, d) in &self.forced {
            if vanishes(shifts[k]) && vanishes(alpha) {
                let shifted = [self.exponents[k][0] + alpha[0], self.exponents[k][1] + alpha[1]];
                total += d * dotc(&shifted, y).exp();
            }
        }
        total
    }

    /// The transport system along a_I (I ≠ S) of f, or of f_J when `stage = Some(J)`:
    /// forced parts that f_J has already dropped lose their forcing.
    pub fn system(&self, i: &[usize], stage: Option<&[usize]>) -> Result<TransportSystem> {
        let basis = Self::a_i_basis(i).ok_or_else(|| crate::error::CtermError::Invalid("a_S = 0 has no transport".into()))?;
        let r = basis.len();
        let gamma: Vec<CMat> = basis.iter().map(|b| CMat::from_diagonal(&CVec::from_fn(6, |k, _| dotc(&self.exponents[k], b)))).collect();
        let rho_q: Vec<f64> = basis.iter().map(|b| self.rho[0] * b[0] + self.rho[1] * b[1]).collect();
        let beta: Vec<Vec<f64>> = (0..2).filter(|k| !i.contains(k)).map(|k| basis.iter().map(|b| b[k]).collect()).collect();
        let generators: Vec<Vec<f64>> = (0..r).map(|j| (0..r).map(|l| if l == j { -1.0 } else { 0.0 }).collect()).collect();
        let cone = ConeData::from_generators(generators, &[vec![1.0, 2.0], vec![2.0, 1.0]]);
        let mut sys = TransportSystem::homogeneous(gamma, rho_q, beta, cone, ones(6))?;
        sys.a_i_basis = basis.clone();
        let survives = |a: &[f64; 2]| match stage.map(Self::a_i_basis) {
            Some(Some(bj)) => bj.iter().all(|b| a[0] * b[0] + a[1] * b[1] == 0.0),
            _ => true,
        };
        // forced components whose shift is invisible along a_I contribute nothing
        let active: Vec<(usize, [f64; 2], C)> =
            self.forced.iter().copied().filter(|(_, a, _)| survives(a) && basis.iter().any(|b| a[0] * b[0] + a[1] * b[1] != 0.0)).collect();
        if active.is_empty() {
            return Ok(sys);
        }
        let xmax = sys.cone.samples().map(|x| crate::linalg::norm(x)).fold(0.0, f64::max);
        let mut exponents = Vec::new();
        let mut constant = 0.0;
        for (k, alpha, d) in &active {
            let shifted = [self.exponents[*k][0].re + alpha[0], self.exponents[*k][1].re + alpha[1]];
            exponents.push(basis.iter().map(|b| shifted[0] * b[0] + shifted[1] * b[1]).collect());
            constant += d.norm() * crate::linalg::norm(alpha) * xmax * crate::linalg::norm(&shifted).exp();
        }
        let ex = self.exponents.clone();
        let psi_basis = basis;
        let psi = Arc::new(move |a: &[f64], x: &[f64]| {
            let xz: Vec<f64> = (0..2).map(|m| psi_basis.iter().zip(x).map(|(b, xi)| b[m] * xi).sum()).collect();
            let mut v = CVec::zeros(6);
            for (k, alpha, d) in &active {
                let shifted = [ex[*k][0] + alpha[0], ex[*k][1] + alpha[1]];
                v[*k] = d * (alpha[0] * xz[0] + alpha[1] * xz[1]) * dotc(&shifted, a).exp();
            }
            v
        });
        Ok(sys.with_psi(psi, Envelope { exponents, constant, power: 0 }, "staged forcing"))
    }
}

/// A random commuting pair A_1 = S T_1 S⁻¹, A_2 = S T_2 S⁻¹ whose blocks have distinct
/// integer real parts in A_1 and random imaginary parts.
pub fn random_commuting_pair(rng: &mut ChaCha8Rng, dim: usize) -> (CMat, CMat) {
    let mut levels: Vec<i32> = (-6..=6).collect();
    for i in (1..levels.len()).rev() {
        levels.swap(i, rng.random_range(0..=i));
    }
    let mut t1 = CMat::zeros(dim, dim);
    let mut t2 = CMat::zeros(dim, dim);
    let mut start = 0;
    let mut b = 0;
    while start < dim {
        let size = rng.random_range(1..=(dim - start).min(3));
        let l1 = C::new(levels[b] as f64, rng.random_range(-3.0..3.0));
        let l2 = C::new(rng.random_range(-4..=4) as f64, rng.random_range(-3.0..3.0));
        let k = rng.random_range(-1.0..1.0);
        for i in 0..size {
            t1[(start + i, start + i)] = l1;
            t2[(start + i, start + i)] = l2;
            if i + 1 < size {
                let n = rng.random_range(-2.0..2.0);
                t1[(start + i, start + i + 1)] = c(n);
                t2[(start + i, start + i + 1)] = c(k * n);
            }
        }
        start += size;
        b += 1;
    }
    let s = CMat::from_fn(dim, dim, |_, _| c(rng.random_range(-1.0..1.0))) + CMat::identity(dim, dim) * c(2.0);
    let s_inv = s.clone().try_inverse().expect("diagonally dominated");
    (&s * t1 * &s_inv, &s * t2 * &s_inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::joint_spectrum;
    use crate::transport::{constant_term, solve_transport};

    #[test]
    fn random_system_is_consistent() {
        let rs = RandomSystem::seeded(3, 2, 4).unwrap();
        assert!(rs.system.commutator_defect() < 1e-10);
        let y = [0.2, -0.1];
        let x = [-1.0, -0.5];
        let sol = solve_transport(&rs.system, &rs.exact(&y), &y, &x, 0.8).unwrap();
        let exact = rs.exact(&[y[0] + 0.8 * x[0], y[1] + 0.8 * x[1]]);
        assert!((&sol.value - &exact).norm() <= 1e-8 * exact.norm());
    }

    #[test]
    fn random_classes_are_recovered() {
        for seed in 0..10 {
            let rs = RandomSystem::seeded(seed, 1 + (seed as usize % 2), 1 + (seed as usize % 6)).unwrap();
            let sp = joint_spectrum(&rs.system).unwrap();
            let want = rs.blocks.iter().filter(|b| b.class == Class::Zero).count();
            assert_eq!(sp.of_class(Class::Zero).count(), want, "seed {seed}");
            let a = [0.1, 0.0];
            let y = &a[..rs.system.rank()];
            let got = constant_term(&rs.system, &sp, &rs.exact(y), y).unwrap();
            let truth = rs.constant_term_truth(y);
            assert!((got - truth).norm() <= 1e-8 * (1.0 + truth.norm()), "seed {seed}: {got} vs {truth}");
        }
    }

    #[test]
    fn staged_truth_for_s_is_f() {
        let st = StagedSystem::standard();
        let y = [0.3, -0.2];
        assert!((st.constant_term_truth(&[0, 1], &y) - st.exact(&y).iter().sum::<C>()).norm() < 1e-14);
    }

    #[test]
    fn commuting_pair_commutes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (a, b) = random_commuting_pair(&mut rng, 6);
        assert!(op_norm(&(&a * &b - &b * &a)) < 1e-10 * op_norm(&a) * op_norm(&b));
    }
}
