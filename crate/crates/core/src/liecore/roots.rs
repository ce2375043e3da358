use super::algebra::LieAlgebra;
use super::subspace::Subspace;
use crate::error::{Error, Result};
use crate::rational::{dot, integer_roots, zero_vec, QMatrix, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// A linear functional on a torus subspace, stored by its values on that
/// subspace's echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearFunctional {
    pub coords: Vec<Q>,
}

impl LinearFunctional {
    pub fn new(coords: Vec<Q>) -> Self {
        LinearFunctional { coords }
    }

    pub fn zero(n: usize) -> Self {
        LinearFunctional { coords: zero_vec(n) }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }

    /// Value on a vector given in torus coordinates.
    pub fn eval(&self, x: &[Q]) -> Q {
        dot(&self.coords, x)
    }

    /// Value on an ambient vector lying in `torus`.
    pub fn eval_in(&self, torus: &Subspace, x: &[Q]) -> Option<Q> {
        torus.coords(x).map(|c| self.eval(&c))
    }

    pub fn add(&self, other: &Self) -> Self {
        LinearFunctional { coords: crate::rational::add(&self.coords, &other.coords) }
    }

    pub fn scale(&self, c: &Q) -> Self {
        LinearFunctional { coords: crate::rational::scale(c, &self.coords) }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    /// Restriction from `torus` to a subspace `sub ⊆ torus`, as values on `sub`'s basis.
    pub fn restrict(&self, torus: &Subspace, sub: &Subspace) -> LinearFunctional {
        LinearFunctional {
            coords: sub.basis().iter().map(|b| self.eval_in(torus, b).expect("sub lies in torus")).collect(),
        }
    }
}

/// Simultaneous eigenspace decomposition of g under ad(a).
#[derive(Clone, Debug)]
pub struct RootDecomposition {
    pub torus: Subspace,
    pub spaces: BTreeMap<LinearFunctional, Subspace>,
}

impl RootDecomposition {
    pub fn zero_space(&self) -> &Subspace {
        &self.spaces[&LinearFunctional::zero(self.torus.dim())]
    }

    /// Nonzero roots.
    pub fn roots(&self) -> Vec<LinearFunctional> {
        self.spaces.keys().filter(|k| !k.is_zero()).cloned().collect()
    }

    pub fn space(&self, alpha: &LinearFunctional) -> Option<&Subspace> {
        self.spaces.get(alpha)
    }

    /// Sum of the root spaces selected by `pred`.
    pub fn sum_where(&self, pred: impl Fn(&LinearFunctional) -> bool) -> Subspace {
        let n = self.torus.ambient();
        let mut vs = Vec::new();
        for (k, s) in &self.spaces {
            if pred(k) {
                vs.extend(s.basis().iter().cloned());
            }
        }
        Subspace::span(n, &vs)
    }

    /// Weight components of an ambient vector.
    pub fn components(&self, v: &[Q]) -> BTreeMap<LinearFunctional, Vec<Q>> {
        let (basis, weights) = self.adapted_basis();
        let m = QMatrix::from_rows(basis.len(), &(0..v.len()).map(|r| basis.iter().map(|b| b[r].clone()).collect()).collect::<Vec<_>>());
        let c = m.solve(v).expect("root spaces span g");
        let mut out: BTreeMap<LinearFunctional, Vec<Q>> = BTreeMap::new();
        for ((ci, b), w) in c.iter().zip(&basis).zip(&weights) {
            if ci.is_zero() {
                continue;
            }
            let e = out.entry(w.clone()).or_insert_with(|| zero_vec(v.len()));
            crate::rational::axpy(ci, b, e);
        }
        out.retain(|_, x| !crate::rational::is_zero_vec(x));
        out
    }

    /// Concatenated root-space bases with their weights.
    pub fn adapted_basis(&self) -> (Vec<Vec<Q>>, Vec<LinearFunctional>) {
        let mut basis = Vec::new();
        let mut weights = Vec::new();
        for (k, s) in &self.spaces {
            for b in s.basis() {
                basis.push(b.clone());
                weights.push(k.clone());
            }
        }
        (basis, weights)
    }
}

/// Eigenvalues of a rational matrix that are rational; errors if the matrix is
/// not diagonalizable over ℚ.
fn rational_eigenspaces(m: &QMatrix) -> Result<Vec<(Q, Vec<Vec<Q>>)>> {
    let n = m.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let d = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .fold(BigInt::one(), |acc, (i, j)| acc.lcm(m[(i, j)].denom()));
    let dq = Q::from_integer(d.clone());
    let mut dm = m.clone();
    for i in 0..n {
        for j in 0..n {
            dm[(i, j)] = &m[(i, j)] * &dq;
        }
    }
    let cp: Vec<BigInt> = dm.charpoly().iter().map(|c| c.to_integer()).collect();
    // Gershgorin bound on integer eigenvalues of dm
    let bound = (0..n)
        .map(|i| (0..n).fold(Q::zero(), |acc, j| acc + dm[(i, j)].abs()))
        .max()
        .unwrap()
        .ceil()
        .to_integer();
    if bound > BigInt::from(1_000_000) {
        return Err(Error::NonSemisimpleAction("eigenvalue search range too large".into()));
    }
    let mut out = Vec::new();
    let mut total = 0;
    for k in integer_roots(&cp, &bound) {
        let lam = Q::new(k, d.clone());
        let mut shifted = m.clone();
        for i in 0..n {
            shifted[(i, i)] -= &lam;
        }
        let ker = shifted.nullspace();
        total += ker.len();
        out.push((lam, ker));
    }
    if total != n {
        return Err(Error::NonSemisimpleAction(format!("eigenspaces span {total} of {n} dimensions")));
    }
    Ok(out)
}

/// Root space decomposition of g with respect to an abelian subspace a.
pub fn root_decomposition(g: &LieAlgebra, a: &Subspace) -> Result<RootDecomposition> {
    let n = g.dim();
    if a.ambient() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.ambient() });
    }
    let ab = a.basis();
    for i in 0..ab.len() {
        for j in i + 1..ab.len() {
            if !crate::rational::is_zero_vec(&g.bracket(&ab[i], &ab[j])) {
                return Err(Error::NonSemisimpleAction("torus is not abelian".into()));
            }
        }
    }
    // pieces: (partial weight, subspace)
    let mut pieces: Vec<(Vec<Q>, Subspace)> = vec![(Vec::new(), Subspace::full(n))];
    for x in ab {
        let mut next = Vec::new();
        for (w, v) in pieces {
            let vb = v.basis();
            let k = vb.len();
            let mut m = QMatrix::zeros(k, k);
            for (j, b) in vb.iter().enumerate() {
                let img = g.bracket(x, b);
                let c = v.coords(&img).ok_or_else(|| {
                    Error::NonSemisimpleAction("joint eigenspace not invariant".into())
                })?;
                for i in 0..k {
                    m[(i, j)] = c[i].clone();
                }
            }
            for (lam, ker) in rational_eigenspaces(&m)? {
                let vecs: Vec<Vec<Q>> = ker.iter().map(|c| v.from_coords(c)).collect();
                let mut w2 = w.clone();
                w2.push(lam);
                next.push((w2, Subspace::span(n, &vecs)));
            }
        }
        pieces = next;
    }
    let mut spaces = BTreeMap::new();
    for (w, s) in pieces {
        spaces.insert(LinearFunctional::new(w), s);
    }
    let zero = LinearFunctional::zero(a.dim());
    spaces.entry(zero.clone()).or_insert_with(|| Subspace::zero(n));
    let rd = RootDecomposition { torus: a.clone(), spaces };
    // checks: direct sum, a in the 0-space, [g^α, g^β] ⊆ g^{α+β}
    let total: usize = rd.spaces.values().map(|s| s.dim()).sum();
    if total != n {
        return Err(Error::NonSemisimpleAction("root spaces do not sum to g".into()));
    }
    if !rd.zero_space().contains_subspace(a) {
        return Err(Error::NonSemisimpleAction("torus not in its own centralizer".into()));
    }
    for (al, sa) in &rd.spaces {
        for (be, sb) in &rd.spaces {
            let target = rd.spaces.get(&al.add(be)).cloned().unwrap_or_else(|| Subspace::zero(n));
            if !g.brackets_into(sa, sb, &target) {
                return Err(Error::NonSemisimpleAction("[g^a, g^b] not in g^(a+b)".into()));
            }
        }
    }
    Ok(rd)
}
