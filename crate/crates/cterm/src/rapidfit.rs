use crate::error::{CtermError, Result};
use crate::linalg::norm;
use crate::rate::regress;
use rayon::prelude::*;
use serde_json::{json, Value};

pub const MIN_POINTS: usize = 8;
pub const R2_MIN: f64 = 0.99;
const C_SLACK: f64 = 1.05;
const EPS_SLACK: f64 = 0.95;
/// Distances below this (relative to the limit) count as exact convergence.
const EXACT_TOL: f64 = 1e-14;
pub const RATE_STABILITY: f64 = 0.2;

/// Points x_s of a normed space on an increasing grid, with a candidate limit.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFamily {
    pub name: String,
    pub grid: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub limit: Vec<f64>,
}

impl DecayFamily {
    pub fn new(name: &str, grid: Vec<f64>, points: Vec<Vec<f64>>, limit: Vec<f64>) -> Result<Self> {
        if grid.len() != points.len() || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CtermError::Invalid(format!("{name}: grid must be increasing and match the points")));
        }
        if points.iter().flatten().chain(&limit).any(|v| !v.is_finite()) || points.iter().any(|p| p.len() != limit.len()) {
            return Err(CtermError::Invalid(format!("{name}: non-finite or ragged points")));
        }
        Ok(DecayFamily { name: name.into(), grid, points, limit })
    }

    /// Applies a linear map to every point and to the limit.
    pub fn mapped(&self, m: &nalgebra::DMatrix<f64>) -> Self {
        let f = |v: &Vec<f64>| (m * nalgebra::DVector::from_column_slice(v)).iter().copied().collect::<Vec<f64>>();
        DecayFamily { name: self.name.clone(), grid: self.grid.clone(), points: self.points.iter().map(f).collect(), limit: f(&self.limit) }
    }

    pub fn distances(&self) -> Vec<f64> {
        self.points.iter().map(|p| norm(&p.iter().zip(&self.limit).map(|(a, b)| a - b).collect::<Vec<_>>())).collect()
    }

    /// CSV rows: s, coordinates…
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s");
        for j in 0..self.limit.len() {
            out.push_str(&format!(",x{j}"));
        }
        out.push('\n');
        for (s, p) in self.grid.iter().zip(&self.points) {
            out.push_str(&format!("{s:e}"));
            for v in p {
                out.push_str(&format!(",{v:e}"));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RapidFit {
    /// +∞ when the family equals its limit
    pub epsilon: f64,
    pub c: f64,
    pub r_squared: f64,
    pub is_rapid: bool,
}

impl RapidFit {
    pub fn to_json(&self) -> Value {
        let eps = if self.epsilon.is_finite() { json!(self.epsilon) } else { json!("inf") };
        json!({"epsilon": eps, "C": self.c, "r_squared": self.r_squared, "is_rapid": self.is_rapid})
    }
}

/// Least squares on log‖x_s − l‖ against s over the tail half, then the pointwise
/// bound ‖x_s − l‖ ≤ 1.05·C e^{−0.95·ε s} from the start of the window on. The slopes
/// of the two halves of the window must also agree to within RATE_STABILITY, which
/// separates exponential from polynomial decay on short windows.
pub fn fit_rate(family: &DecayFamily) -> Result<RapidFit> {
    fit_rate_window(family, 0.5)
}

/// As `fit_rate`, fitting on the last `window` fraction of the grid.
pub fn fit_rate_window(family: &DecayFamily, window: f64) -> Result<RapidFit> {
    let n = family.grid.len();
    if n < MIN_POINTS {
        return Err(CtermError::Invalid(format!("{}: need at least {MIN_POINTS} points", family.name)));
    }
    let d = family.distances();
    let scale = 1.0 + norm(&family.limit);
    if d.iter().all(|v| *v <= EXACT_TOL * scale) {
        return Ok(RapidFit { epsilon: f64::INFINITY, c: 0.0, r_squared: 1.0, is_rapid: true });
    }
    let start = ((1.0 - window.clamp(0.1, 1.0)) * n as f64).floor() as usize;
    let tail: Vec<usize> = (start..n).filter(|&i| d[i] > EXACT_TOL * scale).collect();
    if tail.len() < 2 {
        // converged exactly within the tail
        let c = d.iter().cloned().fold(0.0, f64::max);
        return Ok(RapidFit { epsilon: f64::INFINITY, c, r_squared: 1.0, is_rapid: true });
    }
    if d[tail[tail.len() - 1]] >= d[tail[0]] {
        return Err(CtermError::LimitMismatch);
    }
    let slope = |idx: &[usize]| {
        let s: Vec<f64> = idx.iter().map(|&i| family.grid[i]).collect();
        let y: Vec<f64> = idx.iter().map(|&i| d[i].ln()).collect();
        regress(&[vec![1.0; s.len()], s], &y)
    };
    let (b, r2) = slope(&tail);
    let epsilon = -b[1];
    let c = b[0].exp();
    let s0 = family.grid[tail[0]];
    let bound_holds = family.grid.iter().zip(&d).filter(|(s, _)| **s >= s0).all(|(&si, &di)| di <= C_SLACK * c * (-EPS_SLACK * epsilon * si).exp());
    let stable = if tail.len() >= 6 {
        let h = tail.len() / 2;
        let (e1, e2) = (-slope(&tail[..h]).0[1], -slope(&tail[h..]).0[1]);
        (e1 - e2).abs() <= RATE_STABILITY * e1.abs().max(e2.abs())
    } else {
        true
    };
    Ok(RapidFit { epsilon, c, r_squared: r2, is_rapid: epsilon > 0.0 && r2 >= R2_MIN && bound_holds && stable })
}

/// One point of the factorization a_s b_s^{-1}, u_s, m_s of w_I exp(sX)·z_0 (as
/// coordinates of matrices, flattened).
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitPoint {
    pub ab_inv: Vec<f64>,
    pub u: Vec<f64>,
    pub m: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct OrbitReport {
    pub families: Vec<(DecayFamily, RapidFit)>,
}

impl OrbitReport {
    pub fn pass(&self) -> bool {
        self.families.iter().all(|(_, f)| f.is_rapid && f.epsilon > 0.0)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "families": self.families.iter().map(|(fam, fit)| json!({"name": fam.name, "fit": fit.to_json()})).collect::<Vec<_>>(),
            "pass": self.pass(),
        })
    }
}

/// Runs the example's factorization on the grid and certifies the three families against
/// their limits (identity, m_{w_I}, identity).
pub fn orbit_asymptotics<F>(factor: F, grid: &[f64], limits: &OrbitPoint) -> Result<OrbitReport>
where
    F: Fn(f64) -> Result<OrbitPoint> + Sync,
{
    let pts: Vec<OrbitPoint> = grid.par_iter().map(|&s| factor(s)).collect::<Result<_>>()?;
    let ab = DecayFamily::new("a_s b_s^-1", grid.to_vec(), pts.iter().map(|p| p.ab_inv.clone()).collect(), limits.ab_inv.clone())?;
    let u = DecayFamily::new("u_s", grid.to_vec(), pts.iter().map(|p| p.u.clone()).collect(), limits.u.clone())?;
    let m = DecayFamily::new("m_s", grid.to_vec(), pts.iter().map(|p| p.m.clone()).collect(), limits.m.clone())?;
    let families = [ab, u, m].into_par_iter().map(|f| fit_rate(&f).map(|r| (f, r))).collect::<Result<Vec<_>>>()?;
    Ok(OrbitReport { families })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, s0: f64, h: f64) -> Vec<f64> {
        (0..n).map(|i| s0 + i as f64 * h).collect()
    }

    fn family(g: &[f64], f: impl Fn(f64) -> f64) -> DecayFamily {
        let l = vec![1.0, -2.0];
        let pts = g.iter().map(|&s| vec![1.0 + f(s), -2.0 + 0.5 * f(s)]).collect();
        DecayFamily::new("x", g.to_vec(), pts, l).unwrap()
    }

    #[test]
    fn exponential_is_rapid() {
        let g = grid(30, 0.0, 0.25);
        let r = fit_rate(&family(&g, |s| (-2.0 * s).exp())).unwrap();
        assert!(r.is_rapid);
        assert!((r.epsilon - 2.0).abs() < 0.02);
    }

    #[test]
    fn harmonic_is_not_rapid() {
        let g = grid(40, 1.0, 1.0);
        let r = fit_rate(&family(&g, |s| 1.0 / s)).unwrap();
        assert!(!r.is_rapid);
    }

    #[test]
    fn growing_is_mismatch() {
        let g = grid(10, 0.0, 1.0);
        assert!(matches!(fit_rate(&family(&g, |s| s)), Err(CtermError::LimitMismatch)));
    }

    #[test]
    fn constant_family() {
        let g = grid(10, 0.0, 1.0);
        let r = fit_rate(&family(&g, |_| 0.0)).unwrap();
        assert!(r.is_rapid && r.epsilon.is_infinite());
    }

    #[test]
    fn synthetic_unipotent_perturbation() {
        // u_s = exp(e^{−s}E) = [[1, e^{−s}], [0, 1]]
        let g = grid(20, 0.0, 0.5);
        let id = vec![1.0, 0.0, 0.0, 1.0];
        let rep = orbit_asymptotics(
            |s| Ok(OrbitPoint { ab_inv: id.clone(), u: vec![1.0, (-s).exp(), 0.0, 1.0], m: id.clone() }),
            &g,
            &OrbitPoint { ab_inv: id.clone(), u: id.clone(), m: id.clone() },
        )
        .unwrap();
        assert!(rep.pass());
        assert!((rep.families[1].1.epsilon - 1.0).abs() < 0.01);
    }
}
