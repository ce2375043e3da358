//! The radial system of the hyperbolic plane as a transport system on a_Z = ℝH.
//!
//! With Φ = (φ, φ') and X = ξH, R_XΦ = ξ·A(x)Φ where
//! A(x) = [[0, 1], [−(1+ν²), −2coth 2x]] = Γ₀ + [[0, 0], [0, r(x)]], r(x) = 4e^{4x}/(1−e^{4x}).
//! The compression direction is ξ < 0, where r decays like e^{4x}.

use crate::oracle::{c_function, remainder_exponent, spherical};
use num_complex::Complex64 as C;
use serde_json::{json, Value};
use sphct_cterm::exppoly::{expfit, ExpPolynomial};
use sphct_cterm::linalg::{CMat, CVec};
use sphct_cterm::rate::{approximation_rate_with_floor, integrality_check, RateFit};
use sphct_cterm::spectral::{joint_spectrum, Class, SpectralDatum};
use sphct_cterm::system::{ConeData, Envelope, TransportSystem};
use sphct_cterm::transport::{constant_term_ray, solve_transport};
use sphct_cterm::{CtermError, Result};
use std::sync::Arc;

/// ρ_Q on the a_Z coordinate of H.
pub const RHO: f64 = 1.0;
/// The spherical root on the a_Z coordinate.
pub const ROOT: f64 = 4.0;
/// Relative accuracy of the oracle-driven constant term, used as the rate-fit noise floor.
pub const RATE_FLOOR: f64 = 1e-8;

fn remainder(x: f64) -> f64 {
    let e = (4.0 * x).exp();
    4.0 * e / (1.0 - e)
}

/// The transport system for φ_ν around the base point x0 < 0; the Ψ envelope is valid
/// for x ≤ x0 and the sampled directions.
pub fn hyperbolic_system(nu: f64, x0: f64) -> Result<TransportSystem> {
    if x0 >= 0.0 {
        return Err(CtermError::Invalid("base point must lie in the compression cone".into()));
    }
    let g = CMat::from_row_slice(2, 2, &[C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(-(1.0 + nu * nu), 0.0), C::new(2.0, 0.0)]);
    let cone = ConeData::from_generators(vec![vec![-1.0]], &[vec![2.0]]);
    let one = CVec::from_vec(vec![C::new(1.0, 0.0), C::new(0.0, 0.0)]);
    let sys = TransportSystem::homogeneous(vec![g], vec![RHO], vec![vec![ROOT]], cone, one)?;
    // sup_{x ≤ x0} |φ'(x)|e^{−x}, sampled, with a safety factor
    let mut m: f64 = 0.0;
    for k in 0..=400 {
        let x = x0 - 0.1 * k as f64;
        m = m.max(spherical(nu, x)?.1.abs() * (-x).exp());
    }
    let xi_max = sys.cone.samples().map(|x| x[0].abs()).fold(0.0, f64::max);
    let constant = 2.0 * xi_max * 4.0 * m / (1.0 - (4.0 * x0).exp()) * (5.0 * x0).exp();
    let psi = Arc::new(move |a: &[f64], x: &[f64]| {
        let d = spherical(nu, a[0]).map(|p| p.1).unwrap_or(f64::NAN);
        CVec::from_vec(vec![C::new(0.0, 0.0), C::new(x[0] * remainder(a[0]) * d, 0.0)])
    });
    Ok(sys.with_psi(psi, Envelope { exponents: vec![vec![RHO + ROOT]], constant, power: 0 }, "radial remainder of the spherical function"))
}

/// Everything computed for one spectral parameter.
#[derive(Clone, Debug)]
pub struct HyperbolicAnalysis {
    pub nu: f64,
    pub x0: f64,
    pub spectral: SpectralDatum,
    /// Q⁰ exponents evaluated on X = −H
    pub exponents: Vec<C>,
    pub frequency_error: f64,
    pub unitary: bool,
    pub transport_error: f64,
    pub constant_term: ExpPolynomial,
    pub c_function_error: f64,
    pub rate: RateFit,
    pub predicted_epsilon: f64,
    pub delta_bound: f64,
    pub integrality: bool,
    pub tail_fit: ExpPolynomial,
    pub tail_fit_residual: f64,
    pub samples: Vec<(f64, f64, C)>,
}

impl HyperbolicAnalysis {
    pub fn to_json(&self) -> Value {
        json!({
            "nu": self.nu,
            "base_point": self.x0,
            "spectral": self.spectral.to_json(),
            "q0_exponents": self.exponents.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
            "frequency_error": self.frequency_error,
            "transport_error": self.transport_error,
            "constant_term": self.constant_term.to_json(),
            "c_function_error": self.c_function_error,
            "rate": self.rate.to_json(),
            "predicted_epsilon": self.predicted_epsilon,
            "delta_beta_bound": self.delta_bound,
            "integrality": self.integrality,
            "tail_fit": self.tail_fit.to_json(),
            "tail_fit_residual": self.tail_fit_residual,
        })
    }

    /// t, φ(x0 − t), f_I(x0 − t)
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,f,f_I_re,f_I_im\n");
        for (t, f, fi) in &self.samples {
            out.push_str(&format!("{t:e},{f:e},{:e},{:e}\n", fi.re, fi.im));
        }
        out
    }
}

fn prepared(nu: f64, x0: f64) -> Result<(TransportSystem, SpectralDatum, CVec)> {
    let sys = hyperbolic_system(nu, x0)?;
    let sp = joint_spectrum(&sys)?;
    let (p0, d0) = spherical(nu, x0)?;
    Ok((sys, sp, CVec::from_vec(vec![C::new(p0, 0.0), C::new(d0, 0.0)])))
}

/// f_I of φ_ν along X = −H from x0, as t ↦ f_I(x0 − t).
pub fn spherical_constant_term(nu: f64, x0: f64) -> Result<ExpPolynomial> {
    let (sys, sp, phi0) = prepared(nu, x0)?;
    constant_term_ray(&sys, &sp, &phi0, &[x0], &[-1.0])
}

/// Constant term of φ_ν along X = −H from base point x0, with the rate fit against the
/// oracle samples on t ∈ [0, t_max].
pub fn analyze_hyperbolic(nu: f64, x0: f64, t_max: f64, step: f64) -> Result<HyperbolicAnalysis> {
    let (sys, sp, phi0) = prepared(nu, x0)?;
    let x = [-1.0];
    let moved = solve_transport(&sys, &phi0, &[x0], &x, 1.0)?;
    let transport_error = (moved.value[0] - spherical(nu, x0 - 1.0)?.0).norm();
    let ray = constant_term_ray(&sys, &sp, &phi0, &[x0], &x)?;
    let exponents: Vec<C> = sp.of_class(Class::Zero).map(|e| e.at(&x)).collect();
    let mut freqs: Vec<f64> = exponents.iter().map(|z| z.im).collect();
    freqs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let frequency_error = if freqs.len() == 2 { (freqs[0] + nu).abs().max((freqs[1] - nu).abs()) } else { f64::INFINITY };
    let unitary = exponents.iter().all(|z| (z.re + RHO).abs() <= 1e-8 * (1.0 + RHO));
    let n = (t_max / step).round() as usize;
    let mut samples = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = k as f64 * step;
        samples.push((t, spherical(nu, x0 - t)?.0, ray.eval(t)));
    }
    // classical asymptotics: c(ν)e^{(−1+iν)|x|} + c(−ν)e^{(−1−iν)|x|}
    let mut c_function_error: f64 = 0.0;
    for (t, _, fi) in &samples {
        let ax = t - x0;
        let classical = c_function(nu) * (C::new(-1.0, nu) * ax).exp() + c_function(-nu) * (C::new(-1.0, -nu) * ax).exp();
        c_function_error = c_function_error.max((fi - classical).norm() * ax.exp());
    }
    let ts: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let fs: Vec<C> = samples.iter().map(|s| C::new(s.1, 0.0)).collect();
    let rate = approximation_rate_with_floor(&ts, &fs, &ray, -RHO, RATE_FLOOR)?;
    let predicted_epsilon = remainder_exponent(nu);
    let delta = sp.delta.unwrap_or(0.5);
    let delta_bound = delta * ROOT;
    let lattice = integrality_check(&sp, &[RHO], &[vec![ROOT]], 1e-6)?;
    // independent cross-check: exponential fit far out, where the remainder is negligible
    let tail_t0 = 6.0;
    let tail: Vec<C> = (0..=120).map(|k| spherical(nu, x0 - tail_t0 - 0.05 * k as f64).map(|p| C::new(p.0, 0.0))).collect::<Result<_>>()?;
    let fit = expfit(tail_t0, 0.05, &tail, 4)?;
    Ok(HyperbolicAnalysis {
        nu,
        x0,
        spectral: sp,
        exponents,
        frequency_error,
        unitary,
        transport_error,
        constant_term: ray,
        c_function_error,
        rate,
        predicted_epsilon,
        delta_bound,
        integrality: lattice.pass,
        tail_fit: fit.poly,
        tail_fit_residual: fit.residual,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_term_of_spherical_function() {
        for nu in [0.5, 1.0, 2.0] {
            let t0 = std::time::Instant::now();
            let a = analyze_hyperbolic(nu, -1.0, 6.0, 0.05).unwrap();
            eprintln!("{nu} {:?} {}", t0.elapsed(), a.rate.to_json());
            assert!(a.frequency_error < 1e-3);
            assert!(a.unitary);
            assert!(a.c_function_error < 1e-8);
            assert!((a.rate.epsilon - 4.0).abs() < 0.4);
            assert!(a.rate.pass());
        }
    }
}
