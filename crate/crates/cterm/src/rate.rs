use crate::error::{CtermError, Result};
use crate::exppoly::ExpPolynomial;
use crate::linalg::C;
use crate::spectral::SpectralDatum;
use serde_json::{json, Value};

/// Relative level below which a difference is treated as numerically zero.
pub const ZERO_TOL: f64 = 1e-13;
/// Relative level below which samples of the difference are dropped from the regression.
pub const NOISE_FLOOR: f64 = 1e-11;
pub const R2_MIN: f64 = 0.99;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateMethod {
    /// log-linear regression of the running supremum
    Envelope,
    /// the frequencies of f_I divided out before fitting the decay
    Demodulated,
    Exact,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    /// +∞ when the difference vanishes
    pub epsilon: f64,
    pub c: f64,
    pub n_fit: f64,
    pub r_squared: f64,
    pub points: usize,
    pub method: RateMethod,
}

impl RateFit {
    pub fn pass(&self) -> bool {
        self.epsilon > 0.0 && self.r_squared >= R2_MIN
    }

    pub fn to_json(&self) -> Value {
        let eps = if self.epsilon.is_finite() { json!(self.epsilon) } else { json!("inf") };
        let method = match self.method {
            RateMethod::Envelope => "envelope",
            RateMethod::Demodulated => "demodulated",
            RateMethod::Exact => "exact",
        };
        json!({"epsilon": eps, "C": self.c, "N": self.n_fit, "r_squared": self.r_squared, "points": self.points, "method": method, "pass": self.pass()})
    }
}

/// Ordinary least squares y ≈ Σ_j β_j x_j; returns coefficients and R².
pub fn regress(cols: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, f64) {
    let n = y.len();
    let k = cols.len();
    let a = nalgebra::DMatrix::from_fn(n, k, |i, j| cols[j][i]);
    let b = nalgebra::DVector::from_column_slice(y);
    let beta = a.clone().svd(true, true).solve(&b, 1e-14).map(|v| v.iter().copied().collect()).unwrap_or_else(|_| vec![0.0; k]);
    let fit = &a * nalgebra::DVector::from_vec(beta.clone());
    let mean = y.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = y.iter().zip(fit.iter()).map(|(v, f)| (v - f).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (beta, r2)
}

/// Fits |d(t)| ≤ C e^{−εt}(1+t)^N to d = e^{−tρ_Q(X)}(f − f_I) along a ray.
/// The regression runs on the running supremum sup_{s≥t}|d(s)| so that oscillating
/// differences fit cleanly; samples under the noise floor are dropped.
pub fn approximation_rate(t: &[f64], f: &[C], f_i: &ExpPolynomial, rho: f64) -> Result<RateFit> {
    approximation_rate_with_floor(t, f, f_i, rho, NOISE_FLOOR)
}

/// As `approximation_rate` with an explicit relative noise floor, for samples whose own
/// accuracy is known to be worse than NOISE_FLOOR.
pub fn approximation_rate_with_floor(t: &[f64], f: &[C], f_i: &ExpPolynomial, rho: f64, floor: f64) -> Result<RateFit> {
    if t.len() != f.len() || t.len() < 4 {
        return Err(CtermError::Invalid("need at least four matching samples".into()));
    }
    let d: Vec<f64> = t.iter().zip(f).map(|(&ti, fi)| ((fi - f_i.eval(ti)) * (-ti * rho).exp()).norm()).collect();
    let scale = t.iter().zip(f).map(|(&ti, fi)| (fi * (-ti * rho).exp()).norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let peak = d.iter().cloned().fold(0.0, f64::max);
    if peak <= ZERO_TOL * scale {
        return Ok(RateFit { epsilon: f64::INFINITY, c: 0.0, n_fit: 0.0, r_squared: 1.0, points: t.len(), method: RateMethod::Exact });
    }
    let mut env = d.clone();
    for i in (0..env.len().saturating_sub(1)).rev() {
        env[i] = env[i].max(env[i + 1]);
    }
    let floor = floor * scale;
    let keep: Vec<usize> = (0..t.len()).filter(|&i| env[i] > floor).collect();
    if keep.len() < 4 {
        return Err(CtermError::NoDecay(0.0));
    }
    let ts: Vec<f64> = keep.iter().map(|&i| t[i]).collect();
    let ys: Vec<f64> = keep.iter().map(|&i| env[i].ln()).collect();
    let ones = vec![1.0; ts.len()];
    let (b2, r2) = regress(&[ones.clone(), ts.clone()], &ys);
    let epsilon = -b2[1];
    // a flat envelope means the difference does not decay at all
    if epsilon <= 1e-6 || d[d.len() - 1] >= d[0] {
        return Err(CtermError::NoDecay(epsilon));
    }
    let logs: Vec<f64> = ts.iter().map(|v| (1.0 + v.abs()).ln()).collect();
    let (b3, _) = regress(&[ones, ts.clone(), logs], &ys);
    let (mut epsilon, mut r2, mut method) = (epsilon, r2, RateMethod::Envelope);
    // an oscillating remainder shorter than its period leaves a stair-stepped envelope;
    // its frequencies are those of f_I, so divide them out and fit the decay alone
    let freqs: Vec<f64> = f_i.terms.iter().map(|term| term.exponent.im).collect();
    if r2 < R2_MIN && freqs.iter().any(|v| v.abs() > 1e-12) {
        let strong: Vec<usize> = keep.iter().copied().filter(|&i| env[i] > 100.0 * floor).collect();
        if strong.len() >= 2 * freqs.len() + 2 {
            let ts: Vec<f64> = strong.iter().map(|&i| t[i]).collect();
            let g: Vec<C> = strong.iter().map(|&i| (f[i] - f_i.eval(t[i])) * (-t[i] * rho).exp()).collect();
            let (e2, q2) = demodulated_rate(&ts, &g, &freqs, 4.0 * epsilon.max(1.0) + 1.0);
            if q2 > r2 && e2 > 0.0 {
                epsilon = e2;
                r2 = q2;
                method = RateMethod::Demodulated;
            }
        }
    }
    // smallest C making the bound hold at every kept sample
    let c = keep.iter().map(|&i| d[i] * (epsilon * t[i]).exp()).fold(0.0, f64::max);
    Ok(RateFit { epsilon, c, n_fit: b3[2], r_squared: r2, points: keep.len(), method })
}

/// Fits g(t) ≈ e^{−εt} Σ_j a_j e^{iν_j t} by a scan over ε with the amplitudes solved
/// by least squares at each ε; returns ε and R² of the scaled model e^{εt}g ≈ Σ a_j e^{iν_j t}.
pub fn demodulated_rate(t: &[f64], g: &[C], freqs: &[f64], eps_max: f64) -> (f64, f64) {
    let t0 = t[0];
    let score = |eps: f64| -> f64 {
        let y: Vec<C> = t.iter().zip(g).map(|(&ti, gi)| gi * (eps * (ti - t0)).exp()).collect();
        let a = nalgebra::DMatrix::from_fn(t.len(), freqs.len(), |i, j| C::new(0.0, freqs[j] * (t[i] - t0)).exp());
        let b = nalgebra::DVector::from_column_slice(&y);
        let coef = match a.clone().svd(true, true).solve(&b, 1e-14) {
            Ok(c) => c,
            Err(_) => return 0.0,
        };
        let res = (&a * coef - &b).norm_squared();
        let mean = y.iter().sum::<C>() / C::new(y.len() as f64, 0.0);
        let tot: f64 = y.iter().map(|v| (v - mean).norm_sqr()).sum();
        if tot > 0.0 {
            1.0 - res / tot
        } else {
            0.0
        }
    };
    let n = 400;
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 1..=n {
        let e = eps_max * k as f64 / n as f64;
        let s = score(e);
        if s > best.1 {
            best = (e, s);
        }
    }
    // golden-section refinement around the best grid point
    let h = eps_max / n as f64;
    let (mut lo, mut hi) = ((best.0 - h).max(0.0), best.0 + h);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if score(m1) > score(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let e = 0.5 * (lo + hi);
    let s = score(e);
    if s >= best.1 {
        (e, s)
    } else {
        best
    }
}

#[derive(Clone, Debug)]
pub struct TransitivityReport {
    pub max_diff: f64,
    pub scale: f64,
    pub tol: f64,
    pub rays: usize,
}

impl TransitivityReport {
    pub fn pass(&self) -> bool {
        self.max_diff <= self.tol * self.scale
    }

    pub fn to_json(&self) -> Value {
        json!({"max_diff": self.max_diff, "scale": self.scale, "tol": self.tol, "rays": self.rays, "pass": self.pass()})
    }
}

/// Compares f_I with (f_J)_I on the given ray samples.
pub fn transitivity_check(direct: &[Vec<C>], iterated: &[Vec<C>], tol: f64) -> TransitivityReport {
    let mut max_diff: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for (a, b) in direct.iter().zip(iterated) {
        for (x, y) in a.iter().zip(b) {
            max_diff = max_diff.max((x - y).norm());
            scale = scale.max(x.norm());
        }
    }
    TransitivityReport { max_diff, scale, tol, rays: direct.len() }
}

/// True iff every supplied constant term (one sample set per I ⊊ S) is below tol·scale.
pub fn discrete_series_test(constant_terms: &[Vec<C>], scale: f64, tol: f64) -> bool {
    constant_terms.iter().flatten().all(|v| v.norm() <= tol * scale.max(f64::MIN_POSITIVE))
}

#[derive(Clone, Debug)]
pub struct IntegralityReport {
    pub distances: Vec<f64>,
    pub pass: bool,
}

impl IntegralityReport {
    pub fn to_json(&self) -> Value {
        json!({"distances": self.distances, "pass": self.pass})
    }
}

/// Distance of Re λ − ρ_Q to the lattice spanned by the rows of `lattice` (a basis of
/// a_I^*, in a_I coordinates), measured in lattice coordinates.
pub fn integrality_check(sp: &SpectralDatum, rho_q: &[f64], lattice: &[Vec<f64>], tol: f64) -> Result<IntegralityReport> {
    let r = rho_q.len();
    if lattice.len() != r || lattice.iter().any(|b| b.len() != r) {
        return Err(CtermError::Invalid("lattice must be a basis of the dual".into()));
    }
    // coordinates c with Σ c_k b_k = v solve Bᵀc = v
    let bt = nalgebra::DMatrix::from_fn(r, r, |i, k| lattice[k][i]);
    let lu = bt.lu();
    let mut distances = Vec::new();
    for e in &sp.exponents {
        let v = nalgebra::DVector::from_fn(r, |i, _| e.values[i].re - rho_q[i]);
        let coords = lu.solve(&v).ok_or_else(|| CtermError::Invalid("singular lattice basis".into()))?;
        distances.push(coords.iter().map(|x| (x - x.round()).abs()).fold(0.0, f64::max));
    }
    let pass = distances.iter().all(|d| *d <= tol);
    Ok(IntegralityReport { distances, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exppoly::ExpTerm;
    use crate::linalg::{c, CMat};
    use crate::spectral::joint_spectrum;
    use crate::system::{ones, ConeData, TransportSystem};

    fn grid(n: usize, h: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * h).collect()
    }

    fn pure(rho: f64, nu: f64) -> ExpPolynomial {
        ExpPolynomial::new(vec![ExpTerm { exponent: C::new(rho, nu), poly: vec![c(1.0)] }])
    }

    #[test]
    fn exact_match_is_infinite_rate() {
        let fi = pure(-1.0, 0.7);
        let t = grid(40, 0.25);
        let f: Vec<C> = t.iter().map(|&x| fi.eval(x)).collect();
        assert!(approximation_rate(&t, &f, &fi, -1.0).unwrap().epsilon.is_infinite());
    }

    #[test]
    fn synthetic_remainder_rate() {
        let rho = -1.0;
        let fi = pure(rho, 0.7);
        let t = grid(60, 0.2);
        let f: Vec<C> = t.iter().map(|&x| fi.eval(x) + c(((rho - 2.0) * x).exp())).collect();
        let fit = approximation_rate(&t, &f, &fi, rho).unwrap();
        assert!((fit.epsilon - 2.0).abs() < 0.02, "{fit:?}");
        assert!(fit.pass());
    }

    #[test]
    fn oscillating_remainder_is_demodulated() {
        // real f: the remainder 2e^{−4t}cos(0.5t + 1) has a zero inside the window
        let rho = -1.0;
        let fi = ExpPolynomial::new(vec![
            ExpTerm { exponent: C::new(rho, 0.5), poly: vec![C::new(0.3, 0.1)] },
            ExpTerm { exponent: C::new(rho, -0.5), poly: vec![C::new(0.3, -0.1)] },
        ]);
        let t = grid(100, 0.05);
        let f: Vec<C> = t.iter().map(|&x| fi.eval(x) + c(2.0 * ((rho - 4.0) * x).exp() * (0.5 * x + 1.0).cos())).collect();
        let fit = approximation_rate(&t, &f, &fi, rho).unwrap();
        assert_eq!(fit.method, RateMethod::Demodulated);
        assert!((fit.epsilon - 4.0).abs() < 1e-6, "{fit:?}");
        assert!(fit.pass());
    }

    #[test]
    fn growth_is_no_decay() {
        let fi = pure(0.0, 0.0);
        let t = grid(30, 0.2);
        let f: Vec<C> = t.iter().map(|&x| c(1.0 + (0.3 * x).exp())).collect();
        assert!(matches!(approximation_rate(&t, &f, &fi, 0.0), Err(CtermError::NoDecay(_))));
    }

    #[test]
    fn integrality_detects_half_shift() {
        let cone = ConeData::from_generators(vec![vec![-1.0]], &[]);
        let g = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(3.0), C::new(-2.0, 4.0)]));
        let sys = TransportSystem::homogeneous(vec![g.clone()], vec![1.0], vec![vec![1.0]], cone.clone(), ones(3)).unwrap();
        let sp = joint_spectrum(&sys).unwrap();
        assert!(integrality_check(&sp, &[1.0], &[vec![1.0]], 1e-6).unwrap().pass);
        let sys2 = TransportSystem::homogeneous(vec![g + CMat::identity(3, 3) * c(0.5)], vec![1.0], vec![vec![1.0]], cone, ones(3)).unwrap();
        let sp2 = joint_spectrum(&sys2).unwrap();
        assert!(!integrality_check(&sp2, &[1.0], &[vec![1.0]], 1e-6).unwrap().pass);
    }

    #[test]
    fn discrete_series_on_zero() {
        assert!(discrete_series_test(&[vec![c(0.0); 5]], 1.0, 1e-6));
        assert!(!discrete_series_test(&[vec![c(0.0), c(0.1)]], 1.0, 1e-6));
    }

    #[test]
    fn transitivity_identity() {
        let v = vec![vec![c(1.0), C::new(0.5, 2.0)]];
        assert!(transitivity_check(&v, &v, 1e-8).pass());
    }
}
