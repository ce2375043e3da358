use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C = Complex64;
pub type CMat = DMatrix<C>;
pub type CVec = DVector<C>;

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn from_real(m: &DMatrix<f64>) -> CMat {
    m.map(c)
}

pub fn cvec(v: &[f64]) -> CVec {
    CVec::from_iterator(v.len(), v.iter().map(|&x| c(x)))
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Thin SVD (U, σ, V) with σ sorted decreasingly, so that M = U diag(σ) V*.
/// Wide inputs go through the adjoint: singular vectors of wide matrices are unreliable
/// in the underlying routine.
pub fn thin_svd(m: &CMat) -> (CMat, Vec<f64>, CMat) {
    if m.nrows() < m.ncols() {
        let (u, s, v) = thin_svd(&m.adjoint());
        return (v, s, u);
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested");
    let v = svd.v_t.expect("requested").adjoint();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap());
    let s = order.iter().map(|&k| svd.singular_values[k]).collect();
    let u = CMat::from_columns(&order.iter().map(|&k| u.column(k).into_owned()).collect::<Vec<_>>());
    let v = CMat::from_columns(&order.iter().map(|&k| v.column(k).into_owned()).collect::<Vec<_>>());
    (u, s, v)
}

/// Matrix exponential (scaling and squaring with a Padé approximant).
pub fn expm(m: &CMat) -> CMat {
    m.clone().exp()
}

/// Eigenvalues through the complex Schur form.
pub fn eigenvalues(m: &CMat) -> Vec<C> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let t = m.clone().schur().unpack().1;
    (0..n).map(|i| t[(i, i)]).collect()
}

/// Σ x_i M_i.
pub fn combination(ms: &[CMat], x: &[f64]) -> CMat {
    let n = ms.first().map(|m| m.nrows()).unwrap_or(0);
    let mut out = CMat::zeros(n, n);
    for (m, &xi) in ms.iter().zip(x) {
        out += m * c(xi);
    }
    out
}

/// Bilinear pairing Σ a_i b_i.
pub fn pair(a: &CVec, b: &CVec) -> C {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_nilpotent() {
        let mut n = CMat::zeros(2, 2);
        n[(0, 1)] = c(3.0);
        let e = expm(&n);
        assert!((e[(0, 1)] - c(3.0)).norm() < 1e-14);
        assert!((e[(0, 0)] - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn wide_svd_vectors() {
        let m = CMat::from_fn(3, 6, |i, j| c(((i + 1) * (j + 2)) as f64));
        let (u, s, v) = thin_svd(&m);
        let r = &m * v.column(0) - u.column(0) * c(s[0]);
        assert!(r.norm() < 1e-10 * s[0]);
    }

    #[test]
    fn schur_eigenvalues() {
        let m = CMat::from_row_slice(2, 2, &[c(0.0), c(-1.0), c(1.0), c(0.0)]);
        let mut ev = eigenvalues(&m);
        ev.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((ev[0] - C::new(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - C::new(0.0, 1.0)).norm() < 1e-12);
        assert!((op_norm(&m) - 1.0).abs() < 1e-12);
    }
}
