//! Closed-form open-orbit factorizations for the rank-one examples.
//!
//! For SL(2,ℝ) with H = exp ℝ(E+F), P = MAN upper triangular, w_I = exp(cF) and
//! a_s = exp(−sH), the point w_I a_s·z_0 factors as u_s b_s·z_0 with
//! u_s = n(x_s) ∈ N, b_s ∈ A: solving w_I a_s h(−u) upper triangular forces
//! tanh u = c·e^{−2s}, and then b_s = diag(e^{−s}cosh u, e^{s}/cosh u),
//! x_s = −e^{−2s} sinh u cosh u. M = {±1} contributes m_s = 1.

use sphct_cterm::rapidfit::{orbit_asymptotics, OrbitPoint, OrbitReport};
use sphct_cterm::{CtermError, Result};

/// Which closed-form chart an example carries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OrbitChart {
    /// w_I = 1: every family is constant
    Trivial,
    /// SL(2,ℝ)/SO(1,1) with w_I = exp(cF)
    So11 { c: f64 },
}

const ID: [f64; 4] = [1.0, 0.0, 0.0, 1.0];

fn mat(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]]
}

/// The factorization at parameter s, with a reconstruction check of the product.
pub fn factor(chart: OrbitChart, s: f64) -> Result<OrbitPoint> {
    match chart {
        OrbitChart::Trivial => Ok(OrbitPoint { ab_inv: ID.to_vec(), u: ID.to_vec(), m: ID.to_vec() }),
        OrbitChart::So11 { c } => {
            let th = c * (-2.0 * s).exp();
            if !(th.abs() < 1.0) {
                return Err(CtermError::FactorizationFailure(th));
            }
            let u = th.atanh();
            let (ch, sh) = (u.cosh(), u.sinh());
            let b = [(-s).exp() * ch, 0.0, 0.0, s.exp() / ch];
            let x = -(-2.0 * s).exp() * sh * ch;
            let n = [1.0, x, 0.0, 1.0];
            // n·b·h(u) must reproduce w_I a_s
            let h = [ch, sh, sh, ch];
            let lhs = mat(mat(n, b), h);
            let want = [(-s).exp(), 0.0, c * (-s).exp(), s.exp()];
            let err = lhs.iter().zip(&want).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            if err > 1e-9 * (1.0 + s.exp()) {
                return Err(CtermError::FactorizationFailure(err));
            }
            let a = [(-s).exp(), 0.0, 0.0, s.exp()];
            let ab_inv = [a[0] / b[0], 0.0, 0.0, a[3] / b[3]];
            Ok(OrbitPoint { ab_inv: ab_inv.to_vec(), u: n.to_vec(), m: ID.to_vec() })
        }
    }
}

/// Rapid-convergence certificate of (a_s b_s^{-1}, u_s, m_s) on the grid.
pub fn certify(chart: OrbitChart, grid: &[f64]) -> Result<OrbitReport> {
    let limits = OrbitPoint { ab_inv: ID.to_vec(), u: ID.to_vec(), m: ID.to_vec() };
    orbit_asymptotics(|s| factor(chart, s), grid, &limits)
}

/// The default certification grid: s ∈ [0.25, 4].
pub fn default_grid() -> Vec<f64> {
    (1..=16).map(|k| 0.25 * k as f64).collect()
}
