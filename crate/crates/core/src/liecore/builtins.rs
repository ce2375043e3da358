use super::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::rational::{q, QMatrix};

fn unit(n: usize, i: usize, j: usize) -> QMatrix {
    let mut m = QMatrix::zeros(n, n);
    m[(i, j)] = q(1);
    m
}

/// sl(n, ℝ) for 2 ≤ n ≤ 4 with basis H_i = E_ii − E_{i+1,i+1}, then E_ij (i<j), then E_ij (i>j).
/// The trace form and θ(X) = −Xᵀ are attached. For n = 2 the labels are H, E, F.
pub fn sl(n: usize) -> Result<LieAlgebra> {
    if !(2..=4).contains(&n) {
        return Err(Error::InvalidAlgebra(format!("sl({n}) is only built in for 2 <= n <= 4")));
    }
    let mut mats = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n - 1 {
        mats.push(unit(n, i, i).sub(&unit(n, i + 1, i + 1)));
        labels.push(format!("H{}", i + 1));
    }
    for i in 0..n {
        for j in i + 1..n {
            mats.push(unit(n, i, j));
            labels.push(format!("E{}{}", i + 1, j + 1));
        }
    }
    for i in 0..n {
        for j in 0..i {
            mats.push(unit(n, i, j));
            labels.push(format!("E{}{}", i + 1, j + 1));
        }
    }
    if n == 2 {
        labels = vec!["H".into(), "E".into(), "F".into()];
    }
    LieAlgebra::from_matrix_basis(labels, &mats)
}

pub fn sl2() -> LieAlgebra {
    sl(2).expect("sl2 is valid")
}

/// sl(2) ⊕ sl(2) with basis H1, E1, F1, H2, E2, F2.
pub fn sl2_sl2() -> LieAlgebra {
    sl2().direct_sum(&sl2(), ("1", "2")).expect("direct sum is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ivec, Q};
    use num_traits::Zero;

    #[test]
    fn sl2_brackets() {
        let g = sl2();
        let (h, e, f) = (ivec(&[1, 0, 0]), ivec(&[0, 1, 0]), ivec(&[0, 0, 1]));
        assert_eq!(g.bracket(&h, &e), ivec(&[0, 2, 0]));
        assert_eq!(g.bracket(&e, &f), h);
        assert_eq!(g.bracket(&h, &f), ivec(&[0, 0, -2]));
        assert_eq!(g.kappa(&h, &h), q(2));
        assert_eq!(g.kappa(&e, &f), q(1));
        assert_eq!(g.theta_apply(&e), ivec(&[0, 0, -1]));
    }

    #[test]
    fn sl_n_dimensions() {
        for n in 2..=4 {
            let g = sl(n).unwrap();
            assert_eq!(g.dim(), n * n - 1);
            assert!(g.form().det() != Q::zero());
        }
        assert!(sl(5).is_err());
    }

    #[test]
    fn scalar_product_is_positive_definite_on_sl2() {
        let g = sl2();
        let s = g.scalar_product_matrix().unwrap();
        assert_eq!(s, QMatrix::from_i64(&[&[2, 0, 0], &[0, 1, 0], &[0, 0, 1]]));
    }
}
