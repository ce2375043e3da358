use crate::error::{CtermError, Result};
use crate::linalg::{CVec, C};

const MAX_DEPTH: usize = 50;

fn err_norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

struct Simpson<'a, F: Fn(f64) -> CVec> {
    f: &'a F,
    evals: usize,
    max_evals: usize,
}

impl<F: Fn(f64) -> CVec> Simpson<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn step(&mut self, a: f64, b: f64, fa: &CVec, fm: &CVec, fb: &CVec, whole: &CVec, tol: f64, depth: usize) -> Result<CVec> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        self.evals += 2;
        let h = (b - a) / 12.0;
        let left = (fa + &flm * C::from(4.0) + fm) * C::from(h);
        let right = (fm + &frm * C::from(4.0) + fb) * C::from(h);
        let both = &left + &right;
        let delta = &both - whole;
        if err_norm(&delta) <= 15.0 * tol || b - a < 1e-12 * (1.0 + a.abs()) {
            // Richardson: the two-panel rule is fourth order
            return Ok(both + delta / C::from(15.0));
        }
        if depth >= MAX_DEPTH || self.evals > self.max_evals {
            return Err(CtermError::QuadratureFailure { tol, estimate: err_norm(&delta) / 15.0 });
        }
        let l = self.step(a, m, fa, &flm, fm, &left, tol / 2.0, depth + 1)?;
        let r = self.step(m, b, fm, &frm, fb, &right, tol / 2.0, depth + 1)?;
        Ok(l + r)
    }
}

/// ∫_a^b f with adaptive Simpson and Richardson extrapolation; `tol` is absolute.
/// The interval is split into `panels` pieces first so that oscillation is resolved.
pub fn integrate<F: Fn(f64) -> CVec>(f: &F, a: f64, b: f64, tol: f64, panels: usize) -> Result<CVec> {
    let panels = panels.max(1);
    let mut s = Simpson { f, evals: 0, max_evals: 2_000_000 };
    let w = (b - a) / panels as f64;
    let mut total: Option<CVec> = None;
    let mut fa = f(a);
    for k in 0..panels {
        let (x0, x1) = (a + w * k as f64, if k + 1 == panels { b } else { a + w * (k + 1) as f64 });
        let xm = 0.5 * (x0 + x1);
        let fm = f(xm);
        let fb = f(x1);
        let whole = (&fa + &fm * C::from(4.0) + &fb) * C::from((x1 - x0) / 6.0);
        let part = s.step(x0, x1, &fa, &fm, &fb, &whole, tol / panels as f64, 0)?;
        total = Some(match total {
            Some(t) => t + part,
            None => part,
        });
        fa = fb;
    }
    Ok(total.unwrap_or_else(|| f(a) * C::from(0.0)))
}
