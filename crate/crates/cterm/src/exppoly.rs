use crate::error::{CtermError, Result};
use crate::linalg::{c, thin_svd, CMat, CVec, C};
use serde_json::{json, Value};

#[derive(Clone, Debug, PartialEq)]
pub struct ExpTerm {
    pub exponent: C,
    /// coefficients of 1, t, t², …
    pub poly: Vec<C>,
}

/// t ↦ Σ p_j(t) e^{μ_j t}
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExpPolynomial {
    pub terms: Vec<ExpTerm>,
}

impl ExpPolynomial {
    pub fn new(mut terms: Vec<ExpTerm>) -> Self {
        terms.retain(|t| t.poly.iter().any(|p| p.norm() > 0.0));
        terms.sort_by(|a, b| a.exponent.re.partial_cmp(&b.exponent.re).unwrap().then(a.exponent.im.partial_cmp(&b.exponent.im).unwrap()));
        ExpPolynomial { terms }
    }

    pub fn eval(&self, t: f64) -> C {
        self.terms
            .iter()
            .map(|term| {
                let p: C = term.poly.iter().rev().fold(C::new(0.0, 0.0), |acc, a| acc * t + a);
                p * (term.exponent * t).exp()
            })
            .sum()
    }

    pub fn order(&self) -> usize {
        self.terms.iter().map(|t| t.poly.len()).sum()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|t| json!({"exponent": [t.exponent.re, t.exponent.im], "poly": t.poly.iter().map(|p| json!([p.re, p.im])).collect::<Vec<_>>()}))
                .collect(),
        )
    }
}

/// Result of `expfit`.
#[derive(Clone, Debug)]
pub struct ExpFit {
    pub poly: ExpPolynomial,
    pub residual: f64,
    pub singular_values: Vec<f64>,
}

pub const FIT_SV_TOL: f64 = 1e-8;
pub const FIT_RESIDUAL_TOL: f64 = 1e-6;
/// Absolute floor for singular values, per unit Hankel entry: data at this level is treated as noise.
pub const FIT_NOISE_FLOOR: f64 = 1e-10;
/// Roots of the pencil closer than this (relative) are merged into one term with a polynomial factor.
pub const MERGE_TOL: f64 = 1e-4;

/// Matrix-pencil recovery of an exponential polynomial from uniform samples y_k = f(t0 + kh).
pub fn expfit(t0: f64, h: f64, y: &[C], max_order: usize) -> Result<ExpFit> {
    let n = y.len();
    if n < 4 {
        return Err(CtermError::Invalid("need at least 4 samples".into()));
    }
    // rows ≥ columns
    let l = ((n - 1) / 2).max(1);
    let rows = n - l;
    let hank = CMat::from_fn(rows, l + 1, |i, j| y[i + j]);
    let (_, singular_values, v) = thin_svd(&hank);
    let smax = singular_values.first().cloned().unwrap_or(0.0);
    let floor = FIT_NOISE_FLOOR * ((rows * (l + 1)) as f64).sqrt();
    let m = singular_values.iter().filter(|&&s| s > FIT_SV_TOL * smax && s > floor).count();
    if m == 0 {
        return Ok(ExpFit { poly: ExpPolynomial::default(), residual: 0.0, singular_values });
    }
    if m > max_order {
        return Err(CtermError::OrderOverflow { found: m, max: max_order });
    }
    // H = U Σ V*; the signal subspace of the shift structure is spanned by conj(V)
    let vm = CMat::from_fn(l + 1, m, |r, k| v[(r, k)].conj());
    let v1 = vm.rows(0, l).into_owned();
    let v2 = vm.rows(1, l).into_owned();
    let pinv = v1.clone().pseudo_inverse(1e-14).map_err(|e| CtermError::IllConditioned(e.to_string()))?;
    let pencil = pinv * v2;
    let roots = crate::linalg::eigenvalues(&pencil);
    let mut exps: Vec<C> = roots.iter().map(|z| z.ln() / c(h)).collect();
    exps.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    // merge confluent roots
    let mut groups: Vec<(C, usize)> = Vec::new();
    for e in exps {
        let scale = 1.0 + e.norm();
        match groups.iter_mut().find(|(g, _)| (*g - e).norm() <= MERGE_TOL * scale) {
            Some((g, k)) => {
                *g = (*g * c(*k as f64) + e) / c(*k as f64 + 1.0);
                *k += 1;
            }
            None => groups.push((e, 1)),
        }
    }
    let poly = least_squares(t0, h, y, &groups)?;
    let ynorm = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let rnorm = y.iter().enumerate().map(|(k, v)| (v - poly.eval(t0 + k as f64 * h)).norm_sqr()).sum::<f64>().sqrt();
    let residual = if ynorm > 0.0 { rnorm / ynorm } else { 0.0 };
    if residual > FIT_RESIDUAL_TOL {
        return Err(CtermError::IllConditioned(format!("relative residual {residual:e}")));
    }
    Ok(ExpFit { poly, residual, singular_values })
}

/// Coefficients of t^j e^{μ t} by least squares, with t measured from 0.
pub fn least_squares(t0: f64, h: f64, y: &[C], groups: &[(C, usize)]) -> Result<ExpPolynomial> {
    let cols: Vec<(usize, usize)> = groups.iter().enumerate().flat_map(|(g, (_, k))| (0..*k).map(move |j| (g, j))).collect();
    let a = CMat::from_fn(y.len(), cols.len(), |r, col| {
        let (g, j) = cols[col];
        let t = t0 + r as f64 * h;
        (groups[g].0 * t).exp() * t.powi(j as i32)
    });
    let b = CVec::from_column_slice(y);
    let svd = a.svd(true, true);
    let x = svd.solve(&b, 1e-14).map_err(|e| CtermError::IllConditioned(e.to_string()))?;
    let mut terms: Vec<ExpTerm> = groups.iter().map(|(e, k)| ExpTerm { exponent: *e, poly: vec![C::new(0.0, 0.0); *k] }).collect();
    for (col, (g, j)) in cols.iter().enumerate() {
        terms[*g].poly[*j] = x[col];
    }
    Ok(ExpPolynomial::new(terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(f: impl Fn(f64) -> C, n: usize, h: f64) -> Vec<C> {
        (0..n).map(|k| f(k as f64 * h)).collect()
    }

    #[test]
    fn single_real_exponential() {
        let y = samples(|t| c(3.0 * (0.5 * t).exp()), 40, 0.1);
        let fit = expfit(0.0, 0.1, &y, 4).unwrap();
        assert_eq!(fit.poly.terms.len(), 1);
        let t = &fit.poly.terms[0];
        assert!((t.exponent - c(0.5)).norm() < 1e-9);
        assert!((t.poly[0] - c(3.0)).norm() < 1e-8);
    }

    #[test]
    fn polynomial_factor() {
        let y = samples(|t| c(1.0 + 2.0 * t) * C::new(0.0, t).exp(), 80, 0.1);
        let fit = expfit(0.0, 0.1, &y, 4).unwrap();
        assert_eq!(fit.poly.terms.len(), 1, "{:?}", fit.poly);
        let t = &fit.poly.terms[0];
        assert!((t.exponent - C::new(0.0, 1.0)).norm() < 1e-6);
        assert_eq!(t.poly.len(), 2);
        assert!((t.poly[1] - c(2.0)).norm() < 1e-4);
    }

    #[test]
    fn noise_is_order_zero() {
        let y: Vec<C> = (0..64).map(|k| c(1e-12 * ((k * 37 % 11) as f64 - 5.0) / 5.0)).collect();
        let fit = expfit(0.0, 0.1, &y, 4).unwrap();
        assert_eq!(fit.poly.order(), 0);
    }

    #[test]
    fn order_overflow() {
        let y = samples(|t| (1..=5).map(|k| c((-(k as f64) * t).exp())).sum(), 60, 0.1);
        assert!(matches!(expfit(0.0, 0.1, &y, 3), Err(CtermError::OrderOverflow { .. })));
    }
}
