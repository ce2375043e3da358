use crate::error::{CtermError, Result};
use crate::exppoly::{ExpPolynomial, ExpTerm};
use crate::linalg::{c, expm, op_norm, CMat, CVec, C};
use crate::quad::integrate;
use crate::spectral::{Class, Exponent, SpectralDatum};
use crate::system::TransportSystem;

pub const RESIDUAL_TOL: f64 = 1e-6;
pub const TAIL_TOL: f64 = 1e-10;
pub const DIRECTION_TOL: f64 = 1e-6;
pub const UNITARY_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct TransportSolution {
    pub value: CVec,
    /// relative defect of the finite-difference derivative against ΓΦ + Ψ
    pub residual: f64,
}

fn duhamel(sys: &TransportSystem, phi0: &CVec, a_z: &[f64], x: &[f64], t: f64, tol: f64) -> Result<CVec> {
    let g = sys.gamma_at(x);
    let hom = expm(&(&g * c(t))) * phi0;
    if sys.psi.is_none() || t == 0.0 {
        return Ok(hom);
    }
    let f = |s: f64| expm(&(&g * c(t - s))) * sys.psi_at(&sys.moved(a_z, x, s), x);
    let panels = (t.abs().ceil() as usize).clamp(1, 64);
    Ok(hom + integrate(&f, 0.0, t, tol, panels)?)
}

/// Φ(a_Z exp(tX)) = e^{tΓ(X)}Φ(a_Z) + ∫_0^t e^{(t−s)Γ(X)} Ψ_X(a_Z exp(sX)) ds, with a
/// finite-difference check of the differential equation at t.
pub fn solve_transport(sys: &TransportSystem, phi0: &CVec, a_z: &[f64], x: &[f64], t: f64) -> Result<TransportSolution> {
    let scale = 1.0 + phi0.norm();
    let tol = 1e-12 * scale;
    let value = duhamel(sys, phi0, a_z, x, t, tol)?;
    let h = 1e-3 * (1.0 + t.abs());
    let plus = duhamel(sys, phi0, a_z, x, t + h, tol)?;
    let minus = duhamel(sys, phi0, a_z, x, t - h, tol)?;
    let plus2 = duhamel(sys, phi0, a_z, x, t + 2.0 * h, tol)?;
    let minus2 = duhamel(sys, phi0, a_z, x, t - 2.0 * h, tol)?;
    // fourth-order central difference
    let deriv = (&minus2 - &plus2 + (&plus - &minus) * c(8.0)) / c(12.0 * h);
    let rhs = sys.gamma_at(x) * &value + sys.psi_at(&sys.moved(a_z, x, t), x);
    let residual = (&deriv - &rhs).norm() / (1.0 + rhs.norm().max(value.norm()));
    if residual > RESIDUAL_TOL {
        return Err(CtermError::QuadratureFailure { tol: RESIDUAL_TOL, estimate: residual });
    }
    Ok(TransportSolution { value, residual })
}

/// Tail length T with ∫_T^∞ K(1+s)^M e^{−rs} ds < TAIL_TOL.
fn tail_length(k: f64, m: i32, r: f64) -> Result<f64> {
    if r <= 0.0 || !r.is_finite() {
        return Err(CtermError::TailBoundUnreachable { rate: r });
    }
    if k == 0.0 {
        return Ok(0.0);
    }
    let mut t: f64 = 1.0;
    for _ in 0..200 {
        let margin = r - m.max(0) as f64 / (1.0 + t);
        if margin > 0.0 {
            let bound = k * (1.0 + t).powi(m) * (-r * t).exp() / margin;
            if bound < TAIL_TOL {
                return Ok(t);
            }
        }
        t *= 1.25;
    }
    Err(CtermError::TailBoundUnreachable { rate: r })
}

/// E_λΦ(a_Z) + ∫_0^∞ E_λ e^{−sΓ(X)} Ψ_X(a_Z exp(sX)) ds, truncated where the envelope
/// bound on the tail falls below TAIL_TOL. Requires Re λ(X) > envelope rate at X.
pub fn phi_lambda_infty_at(sys: &TransportSystem, e: &Exponent, phi0: &CVec, a_z: &[f64], x: &[f64]) -> Result<CVec> {
    let base = &e.projector * phi0;
    if sys.psi.is_none() {
        return Ok(base);
    }
    let n = sys.dim as i32;
    let r = e.at(x).re - sys.envelope.rate(x);
    // ‖E_λ e^{−sΓ}‖ ≤ e^{−s Re λ} Σ_k s^k ‖N^k E_λ‖/k! ≤ c_E (1+s)^{n−1} e^{−s Re λ}
    let nx = e.nilpotent_at(x);
    let mut term = e.projector.clone();
    let mut c_e = op_norm(&term);
    for k in 1..n.max(1) {
        term = &nx * &term / c(k as f64);
        c_e += op_norm(&term);
    }
    let t_max = tail_length(c_e * sys.envelope.constant, n - 1 + sys.envelope.power, r)?;
    let f = |s: f64| e.propagate(x, -s) * sys.psi_at(&sys.moved(a_z, x, s), x);
    let panels = (t_max.ceil() as usize).clamp(1, 400);
    let integral = integrate(&f, 0.0, t_max, TAIL_TOL, panels)?;
    Ok(base + integral)
}

/// Φ_{λ,∞}(a_Z): the limit for λ ∈ Q⁰ (checked against a second interior direction), 0 otherwise.
pub fn phi_lambda_infty(sys: &TransportSystem, e: &Exponent, phi0: &CVec, a_z: &[f64]) -> Result<CVec> {
    if e.class != Class::Zero {
        return Ok(CVec::zeros(sys.dim));
    }
    let dirs: Vec<&Vec<f64>> = sys.cone.interior.iter().take(2).collect();
    let first = phi_lambda_infty_at(sys, e, phi0, a_z, dirs.first().ok_or_else(|| CtermError::Invalid("no interior direction".into()))?)?;
    if let Some(x2) = dirs.get(1) {
        let second = phi_lambda_infty_at(sys, e, phi0, a_z, x2)?;
        let d = (&first - &second).norm() / (1.0 + first.norm());
        if d > DIRECTION_TOL {
            return Err(CtermError::DirectionDependence(d));
        }
    }
    Ok(first)
}

/// f_I(a_Z) = Σ_{λ∈Q⁰} ⟨Φ_{λ,∞}(a_Z), 1⟩.
pub fn constant_term(sys: &TransportSystem, sp: &SpectralDatum, phi0: &CVec, a_z: &[f64]) -> Result<C> {
    let mut total = C::new(0.0, 0.0);
    for e in sp.of_class(Class::Zero) {
        total += sys.pairing(&phi_lambda_infty(sys, e, phi0, a_z)?);
    }
    Ok(total)
}

/// t ↦ f_I(a_Z exp(tX)) = Σ_{λ∈Q⁰} ⟨e^{tΓ(X)}Φ_{λ,∞}(a_Z), 1⟩ in closed form from the
/// nilpotent parts; each exponent is checked to lie on ρ_Q(X) + iℝ.
pub fn constant_term_ray(sys: &TransportSystem, sp: &SpectralDatum, phi0: &CVec, a_z: &[f64], x: &[f64]) -> Result<ExpPolynomial> {
    let rho = sys.rho_at(x);
    let mut terms = Vec::new();
    for e in sp.of_class(Class::Zero) {
        let mu = e.at(x);
        let offset = (mu.re - rho).abs();
        if offset > UNITARY_TOL * (1.0 + rho.abs()) {
            return Err(CtermError::NonUnitaryCharacter { re: mu.re, im: mu.im, offset });
        }
        let v = phi_lambda_infty(sys, e, phi0, a_z)?;
        let nx = e.nilpotent_at(x);
        let mut poly = Vec::new();
        let mut w = v.clone();
        for k in 0..sys.dim.max(1) {
            poly.push(sys.pairing(&w));
            w = &nx * &w / c((k + 1) as f64);
        }
        while poly.len() > 1 && poly.last().map(|p| p.norm() == 0.0).unwrap_or(false) {
            poly.pop();
        }
        terms.push(ExpTerm { exponent: mu, poly });
    }
    Ok(ExpPolynomial::new(terms))
}

/// Assembles an explicit constant term from already-computed limits (used when the
/// limit vectors come from a different system, as in transitivity).
pub fn ray_from_limits(sys: &TransportSystem, sp: &SpectralDatum, limits: &[(usize, CVec)], x: &[f64]) -> ExpPolynomial {
    let mut terms = Vec::new();
    for (idx, v) in limits {
        let e = &sp.exponents[*idx];
        let nx = e.nilpotent_at(x);
        let mut poly = Vec::new();
        let mut w = v.clone();
        for k in 0..sys.dim.max(1) {
            poly.push(sys.pairing(&w));
            w = &nx * &w / c((k + 1) as f64);
        }
        terms.push(ExpTerm { exponent: e.at(x), poly });
    }
    ExpPolynomial::new(terms)
}

/// Identity matrix shortcut.
pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cvec;
    use crate::spectral::joint_spectrum;
    use crate::system::{ones, ConeData, Envelope};
    use std::sync::Arc;

    fn scalar(gamma: f64, rho: f64) -> TransportSystem {
        let cone = ConeData::from_generators(vec![vec![1.0]], &[vec![2.0]]);
        TransportSystem::homogeneous(vec![CMat::from_element(1, 1, c(gamma))], vec![rho], vec![vec![-1.0]], cone, ones(1)).unwrap()
    }

    #[test]
    fn homogeneous_is_exponential() {
        let sys = scalar(-0.7, -0.7);
        let sol = solve_transport(&sys, &cvec(&[2.0]), &[0.0], &[1.0], 1.5).unwrap();
        assert!((sol.value[0] - c(2.0 * (-1.05f64).exp())).norm() < 1e-12);
    }

    #[test]
    fn constant_forcing_is_linear() {
        let sys = scalar(0.0, 0.0).with_psi(
            Arc::new(|_a: &[f64], x: &[f64]| cvec(&[3.0 * x[0]])),
            Envelope { exponents: vec![vec![0.0]], constant: 3.0, power: 0 },
            "constant",
        );
        let sol = solve_transport(&sys, &cvec(&[1.0]), &[0.0], &[1.0], 2.0).unwrap();
        assert!((sol.value[0] - c(7.0)).norm() < 1e-10);
    }

    #[test]
    fn scalar_closed_form() {
        let (g, mu) = (-0.5, -2.0);
        let sys = scalar(g, g).with_psi(
            Arc::new(move |a: &[f64], x: &[f64]| cvec(&[x[0] * (mu * a[0]).exp()])),
            Envelope { exponents: vec![vec![mu]], constant: 1.0, power: 0 },
            "exponential",
        );
        let t = 3.0;
        let sol = solve_transport(&sys, &cvec(&[1.5]), &[0.0], &[1.0], t).unwrap();
        let exact = 1.5 * (g * t).exp() + ((mu * t).exp() - (g * t).exp()) / (mu - g);
        assert!((sol.value[0].re - exact).abs() < 1e-10 * exact.abs());
        assert!(sol.residual < 1e-6);
    }

    #[test]
    fn limit_matches_closed_form_integral() {
        // Γ = ρ = −1 on X = 1, Ψ = e^{(ρ+β)s}, β = −2
        let (rho, beta) = (-1.0, -2.0);
        let sys = scalar(rho, rho).with_psi(
            Arc::new(move |a: &[f64], x: &[f64]| cvec(&[x[0] * ((rho + beta) * a[0]).exp()])),
            Envelope { exponents: vec![vec![rho + beta]], constant: 1.0, power: 0 },
            "exponential",
        );
        let sp = joint_spectrum(&sys).unwrap();
        let e = &sp.exponents[0];
        assert_eq!(e.class, Class::Zero);
        let v = phi_lambda_infty(&sys, e, &cvec(&[0.25]), &[0.0]).unwrap();
        // 0.25 + ∫_0^∞ e^{−ρs} e^{(ρ+β)s} ds = 0.25 − 1/β
        assert!((v[0].re - (0.25 - 1.0 / beta)).abs() < 1e-8);
    }

    #[test]
    fn q_plus_limit_vanishes_for_tempered_data() {
        // γ = 0.5 > ρ = 0 on X = 1; the tempered solution has Φ(0) = −∫ e^{−γs}Ψ(s) ds
        let (g, mu) = (0.5, -1.0);
        let sys = scalar(g, 0.0).with_psi(
            Arc::new(move |a: &[f64], x: &[f64]| cvec(&[x[0] * (mu * a[0]).exp()])),
            Envelope { exponents: vec![vec![mu]], constant: 1.0, power: 0 },
            "exponential",
        );
        let sp = joint_spectrum(&sys).unwrap();
        assert_eq!(sp.exponents[0].class, Class::Plus);
        let phi0 = cvec(&[-1.0 / (g - mu)]);
        let raw = phi_lambda_infty_at(&sys, &sp.exponents[0], &phi0, &[0.0], &[1.0]).unwrap();
        assert!(raw[0].norm() < 1e-9);
        assert_eq!(phi_lambda_infty(&sys, &sp.exponents[0], &phi0, &[0.0]).unwrap()[0], c(0.0));
    }

    #[test]
    fn constant_term_of_pure_rho_system() {
        let rho = -1.0;
        let sys = scalar(rho, rho);
        let sp = joint_spectrum(&sys).unwrap();
        let ray = constant_term_ray(&sys, &sp, &cvec(&[2.0]), &[0.0], &[1.0]).unwrap();
        assert!((ray.eval(1.3) - c(2.0 * (rho * 1.3f64).exp())).norm() < 1e-12);
        assert!((constant_term(&sys, &sp, &cvec(&[2.0]), &[0.0]).unwrap() - c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn all_minus_gives_zero() {
        let sys = scalar(-3.0, -1.0);
        let sp = joint_spectrum(&sys).unwrap();
        assert_eq!(sp.exponents[0].class, Class::Minus);
        assert_eq!(constant_term(&sys, &sp, &cvec(&[5.0]), &[0.0]).unwrap(), c(0.0));
    }
}
