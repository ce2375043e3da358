use super::subspace::Subspace;
use crate::error::{Error, Result};
use crate::rational::{dot, is_zero_vec, zero_vec, QMatrix, Q};
use num_traits::{One, Zero};

/// Finite-dimensional Lie algebra over ℚ given by structure constants
/// `[e_i, e_j] = Σ_k c[i][j][k] e_k`, with an invariant form κ and an optional
/// involution θ (row `i` of `theta` is θ(e_i)).
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    labels: Vec<String>,
    brackets: Vec<Vec<Vec<(usize, Q)>>>,
    form: QMatrix,
    theta: Option<QMatrix>,
}

impl LieAlgebra {
    /// Builds and validates: antisymmetry, Jacobi, κ symmetric and ad-invariant,
    /// θ an involutive automorphism preserving κ.
    pub fn new(
        labels: Vec<String>,
        c: Vec<Vec<Vec<Q>>>,
        form: QMatrix,
        theta: Option<QMatrix>,
    ) -> Result<Self> {
        let n = labels.len();
        if c.len() != n || c.iter().any(|r| r.len() != n || r.iter().any(|v| v.len() != n)) {
            return Err(Error::InvalidAlgebra("structure constant tensor has wrong shape".into()));
        }
        if form.rows != n || form.cols != n {
            return Err(Error::DimensionMismatch { expected: n, found: form.rows });
        }
        let brackets = c
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(k, x)| (k, x.clone())).collect())
                    .collect()
            })
            .collect();
        let g = LieAlgebra { labels, brackets, form, theta };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let a = self.basis_bracket(i, j);
                let b = self.basis_bracket(j, i);
                if !is_zero_vec(&crate::rational::add(&a, &b)) {
                    return Err(Error::InvalidAlgebra(format!("antisymmetry fails at ({i},{j})")));
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let ei = crate::rational::unit_vec(n, i);
                    let ej = crate::rational::unit_vec(n, j);
                    let ek = crate::rational::unit_vec(n, k);
                    let s1 = self.bracket(&ei, &self.bracket(&ej, &ek));
                    let s2 = self.bracket(&ej, &self.bracket(&ek, &ei));
                    let s3 = self.bracket(&ek, &self.bracket(&ei, &ej));
                    let s = crate::rational::add(&crate::rational::add(&s1, &s2), &s3);
                    if !is_zero_vec(&s) {
                        return Err(Error::InvalidAlgebra(format!("Jacobi fails at ({i},{j},{k})")));
                    }
                }
            }
        }
        if self.form != self.form.transpose() {
            return Err(Error::InvalidAlgebra("form is not symmetric".into()));
        }
        for x in 0..n {
            for y in 0..n {
                let xy = self.basis_bracket(x, y);
                for z in 0..n {
                    let xz = self.basis_bracket(x, z);
                    let a = self.kappa(&xy, &crate::rational::unit_vec(n, z));
                    let b = self.kappa(&crate::rational::unit_vec(n, y), &xz);
                    if !(a + b).is_zero() {
                        return Err(Error::InvalidAlgebra(format!("form not ad-invariant at ({x},{y},{z})")));
                    }
                }
            }
        }
        if let Some(t) = &self.theta {
            if t.rows != n || t.cols != n {
                return Err(Error::DimensionMismatch { expected: n, found: t.rows });
            }
            let tm = t.transpose();
            if tm.mul(&tm) != QMatrix::identity(n) {
                return Err(Error::InvalidAlgebra("theta is not an involution".into()));
            }
            if t.mul(&self.form).mul(&tm) != self.form {
                return Err(Error::InvalidAlgebra("theta does not preserve the form".into()));
            }
            for i in 0..n {
                for j in 0..n {
                    let lhs = self.theta_apply(&self.basis_bracket(i, j));
                    let rhs = self.bracket(&t.row_vec(i), &t.row_vec(j));
                    if lhs != rhs {
                        return Err(Error::InvalidAlgebra(format!("theta is not an automorphism at ({i},{j})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn form(&self) -> &QMatrix {
        &self.form
    }

    pub fn theta(&self) -> Option<&QMatrix> {
        self.theta.as_ref()
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Q {
        self.brackets[i][j].iter().find(|(kk, _)| *kk == k).map(|(_, v)| v.clone()).unwrap_or_else(Q::zero)
    }

    pub fn basis_bracket(&self, i: usize, j: usize) -> Vec<Q> {
        let mut v = zero_vec(self.dim());
        for (k, c) in &self.brackets[i][j] {
            v[*k] = c.clone();
        }
        v
    }

    /// Sparse [e_i, e_j].
    pub fn basis_bracket_sparse(&self, i: usize, j: usize) -> &[(usize, Q)] {
        &self.brackets[i][j]
    }

    pub fn bracket(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let n = self.dim();
        assert!(x.len() == n && y.len() == n, "bracket: dimension mismatch");
        let mut out = zero_vec(n);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                for (k, s) in &self.brackets[i][j] {
                    out[*k] += &c * s;
                }
            }
        }
        out
    }

    pub fn try_bracket(&self, x: &[Q], y: &[Q]) -> Result<Vec<Q>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: y.len() });
        }
        Ok(self.bracket(x, y))
    }

    /// Matrix of ad(x) acting on column coordinate vectors.
    pub fn ad(&self, x: &[Q]) -> QMatrix {
        let n = self.dim();
        let mut m = QMatrix::zeros(n, n);
        for j in 0..n {
            let col = self.bracket(x, &crate::rational::unit_vec(n, j));
            for k in 0..n {
                m[(k, j)] = col[k].clone();
            }
        }
        m
    }

    pub fn kappa(&self, x: &[Q], y: &[Q]) -> Q {
        dot(x, &self.form.mul_vec(y))
    }

    pub fn theta_apply(&self, x: &[Q]) -> Vec<Q> {
        match &self.theta {
            Some(t) => t.transpose().mul_vec(x),
            None => x.to_vec(),
        }
    }

    /// Gram matrix of (x, y) = −κ(x, θy).
    pub fn scalar_product_matrix(&self) -> Result<QMatrix> {
        let t = self.theta.as_ref().ok_or(Error::MissingInvolution)?;
        // (e_i, e_j) = −κ(e_i, θ e_j) = −Σ_k θ[j][k] κ[i][k]
        let m = self.form.mul(&t.transpose());
        let n = self.dim();
        let mut out = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = -m[(i, j)].clone();
            }
        }
        Ok(out)
    }

    pub fn is_subalgebra(&self, v: &Subspace) -> bool {
        let b = v.basis();
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                if !v.contains(&self.bracket(&b[i], &b[j])) {
                    return false;
                }
            }
        }
        true
    }

    /// [x, V] ⊆ W for every x in X.
    pub fn brackets_into(&self, x: &Subspace, v: &Subspace, w: &Subspace) -> bool {
        x.basis().iter().all(|a| v.basis().iter().all(|b| w.contains(&self.bracket(a, b))))
    }

    /// span{[x, y] : x ∈ X, y ∈ Y}.
    pub fn bracket_span(&self, x: &Subspace, y: &Subspace) -> Subspace {
        let mut vs = Vec::new();
        for a in x.basis() {
            for b in y.basis() {
                vs.push(self.bracket(a, b));
            }
        }
        Subspace::span(self.dim(), &vs)
    }

    /// Ideal of the subalgebra `l` generated by `gens`.
    pub fn ideal_generated(&self, l: &Subspace, gens: &Subspace) -> Subspace {
        let mut cur = gens.clone();
        loop {
            let next = cur.sum(&self.bracket_span(l, &cur)).expect("same ambient");
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// Trace of ad(x) on the quotient g/h for x ∈ h (h a subalgebra).
    pub fn quotient_trace(&self, h: &Subspace, x: &[Q]) -> Result<Q> {
        let full = self.ad(x).trace();
        let mut sub = Q::zero();
        for (i, b) in h.basis().iter().enumerate() {
            let c = h
                .coords(&self.bracket(x, b))
                .ok_or_else(|| Error::NotInSubalgebra("h is not a subalgebra".into()))?;
            sub += &c[i];
        }
        Ok(full - sub)
    }

    /// Structure constants, form and θ expressed in a new basis (rows of `basis`).
    pub fn rebase(&self, basis: &QMatrix, labels: Vec<String>) -> Result<LieAlgebra> {
        let n = self.dim();
        if basis.rows != n || basis.cols != n {
            return Err(Error::DimensionMismatch { expected: n, found: basis.rows });
        }
        // coordinates of v in the new basis: solve Bᵀ c = v
        let bt = basis.transpose();
        let bt_inv = bt.inverse().ok_or_else(|| Error::InvalidAlgebra("new basis is singular".into()))?;
        let rows = basis.to_rows();
        let mut c = vec![vec![zero_vec(n); n]; n];
        for i in 0..n {
            for j in 0..n {
                c[i][j] = bt_inv.mul_vec(&self.bracket(&rows[i], &rows[j]));
            }
        }
        let mut form = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                form[(i, j)] = self.kappa(&rows[i], &rows[j]);
            }
        }
        let theta = match &self.theta {
            Some(_) => {
                let imgs: Vec<Vec<Q>> = rows.iter().map(|r| bt_inv.mul_vec(&self.theta_apply(r))).collect();
                Some(QMatrix::from_rows(n, &imgs))
            }
            None => None,
        };
        LieAlgebra::new(labels, c, form, theta)
    }

    /// Builds an algebra from a basis of matrices closed under commutators, with
    /// the trace form and θ(X) = −Xᵀ.
    pub fn from_matrix_basis(labels: Vec<String>, mats: &[QMatrix]) -> Result<LieAlgebra> {
        let n = mats.len();
        let size = mats[0].rows;
        let flat = |m: &QMatrix| -> Vec<Q> { m.to_rows().concat() };
        let cols: Vec<Vec<Q>> = mats.iter().map(flat).collect();
        // A c = vec(M), A columns are the flattened basis matrices
        let a = QMatrix::from_rows(n, &(0..size * size).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect::<Vec<_>>());
        let express = |m: &QMatrix| -> Result<Vec<Q>> {
            a.solve(&flat(m)).ok_or_else(|| Error::InvalidAlgebra("matrix basis not closed".into()))
        };
        let mut c = vec![vec![zero_vec(n); n]; n];
        for i in 0..n {
            for j in 0..n {
                let comm = mats[i].mul(&mats[j]).sub(&mats[j].mul(&mats[i]));
                c[i][j] = express(&comm)?;
            }
        }
        let mut form = QMatrix::zeros(n, n);
        let mut theta_rows = Vec::with_capacity(n);
        for i in 0..n {
            for j in 0..n {
                form[(i, j)] = mats[i].mul(&mats[j]).trace();
            }
            let t = mats[i].transpose();
            let neg = QMatrix::zeros(size, size).sub(&t);
            theta_rows.push(express(&neg)?);
        }
        LieAlgebra::new(labels, c, form, Some(QMatrix::from_rows(n, &theta_rows)))
    }

    pub fn abelian(n: usize) -> LieAlgebra {
        let labels = (1..=n).map(|i| format!("T{i}")).collect();
        let c = vec![vec![zero_vec(n); n]; n];
        let mut theta = QMatrix::zeros(n, n);
        for i in 0..n {
            theta[(i, i)] = -Q::one();
        }
        LieAlgebra::new(labels, c, QMatrix::identity(n), Some(theta)).expect("abelian algebra is valid")
    }

    pub fn direct_sum(&self, other: &LieAlgebra, suffixes: (&str, &str)) -> Result<LieAlgebra> {
        let (n1, n2) = (self.dim(), other.dim());
        let n = n1 + n2;
        let mut labels: Vec<String> = self.labels.iter().map(|l| format!("{l}{}", suffixes.0)).collect();
        labels.extend(other.labels.iter().map(|l| format!("{l}{}", suffixes.1)));
        let mut c = vec![vec![zero_vec(n); n]; n];
        for i in 0..n1 {
            for j in 0..n1 {
                for (k, v) in &self.brackets[i][j] {
                    c[i][j][*k] = v.clone();
                }
            }
        }
        for i in 0..n2 {
            for j in 0..n2 {
                for (k, v) in &other.brackets[i][j] {
                    c[n1 + i][n1 + j][n1 + k] = v.clone();
                }
            }
        }
        let mut form = QMatrix::zeros(n, n);
        for i in 0..n1 {
            for j in 0..n1 {
                form[(i, j)] = self.form[(i, j)].clone();
            }
        }
        for i in 0..n2 {
            for j in 0..n2 {
                form[(n1 + i, n1 + j)] = other.form[(i, j)].clone();
            }
        }
        let theta = match (&self.theta, &other.theta) {
            (Some(a), Some(b)) => {
                let mut t = QMatrix::zeros(n, n);
                for i in 0..n1 {
                    for j in 0..n1 {
                        t[(i, j)] = a[(i, j)].clone();
                    }
                }
                for i in 0..n2 {
                    for j in 0..n2 {
                        t[(n1 + i, n1 + j)] = b[(i, j)].clone();
                    }
                }
                Some(t)
            }
            _ => None,
        };
        LieAlgebra::new(labels, c, form, theta)
    }

    /// Vector with the given label set to 1.
    pub fn element(&self, terms: &[(&str, i64)]) -> Vec<Q> {
        let mut v = zero_vec(self.dim());
        for (name, c) in terms {
            let i = self.labels.iter().position(|l| l == name).unwrap_or_else(|| panic!("unknown label {name}"));
            v[i] += crate::rational::q(*c);
        }
        v
    }

    pub fn format_vector(&self, v: &[Q]) -> String {
        let mut parts = Vec::new();
        for (x, l) in v.iter().zip(&self.labels) {
            if x.is_zero() {
                continue;
            }
            if x == &Q::one() {
                parts.push(l.clone());
            } else if x == &-Q::one() {
                parts.push(format!("-{l}"));
            } else {
                parts.push(format!("{}{}", crate::rational::qstr(x), l));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }
}
