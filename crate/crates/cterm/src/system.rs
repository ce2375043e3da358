use crate::error::{CtermError, Result};
use crate::linalg::{combination, cvec, dot, op_norm, pair, CMat, CVec, C};
use serde_json::{json, Value};
use std::sync::Arc;

/// Ψ_{f,X}(a_Z): arguments are a_Z coordinates and X in a_I coordinates.
pub type PsiFn = Arc<dyn Fn(&[f64], &[f64]) -> CVec + Send + Sync>;

/// ‖Ψ_X(a_Z exp(sX))‖ ≤ constant · (1+s)^power · e^{s·max_k e_k(X)} on the region of interest.
#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    pub exponents: Vec<Vec<f64>>,
    pub constant: f64,
    pub power: i32,
}

impl Envelope {
    pub fn rate(&self, x: &[f64]) -> f64 {
        self.exponents.iter().map(|e| dot(e, x)).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The cone a_I^- in a_I coordinates: generators (rays, then ± lineality) and interior samples.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeData {
    pub generators: Vec<Vec<f64>>,
    pub interior: Vec<Vec<f64>>,
}

impl ConeData {
    /// Sum of the generators plus the given positive combinations.
    pub fn from_generators(generators: Vec<Vec<f64>>, weights: &[Vec<f64>]) -> Self {
        let r = generators.first().map(|g| g.len()).unwrap_or(0);
        let mut interior = Vec::new();
        let mut push = |w: &dyn Fn(usize) -> f64| {
            let mut x = vec![0.0; r];
            for (k, g) in generators.iter().enumerate() {
                for (xi, gi) in x.iter_mut().zip(g) {
                    *xi += w(k) * gi;
                }
            }
            interior.push(x);
        };
        push(&|_| 1.0);
        for ws in weights {
            push(&|k| ws[k % ws.len()]);
        }
        ConeData { generators, interior }
    }

    pub fn samples(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.generators.iter().chain(&self.interior)
    }
}

/// R_X Φ = Γ(X)Φ + Ψ_X along a_I, on U* = C^dim.
#[derive(Clone)]
pub struct TransportSystem {
    pub dim: usize,
    /// Γ on the a_I basis
    pub gamma: Vec<CMat>,
    /// a_I basis in a_Z coordinates
    pub a_i_basis: Vec<Vec<f64>>,
    pub psi: Option<PsiFn>,
    pub envelope: Envelope,
    /// ρ_Q on a_I coordinates
    pub rho_q: Vec<f64>,
    /// β_I = max of these functionals on a_I coordinates
    pub beta: Vec<Vec<f64>>,
    pub cone: ConeData,
    /// the functional ⟨·, 1⟩
    pub one: CVec,
    /// where Ψ came from
    pub provenance: String,
}

impl std::fmt::Debug for TransportSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TransportSystem(dim={}, rank={}, {})", self.dim, self.gamma.len(), self.provenance)
    }
}

impl TransportSystem {
    /// A system with Ψ = 0.
    pub fn homogeneous(gamma: Vec<CMat>, rho_q: Vec<f64>, beta: Vec<Vec<f64>>, cone: ConeData, one: CVec) -> Result<Self> {
        let r = gamma.len();
        let a_i_basis = (0..r).map(|i| (0..r).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let dim = one.len();
        let s = TransportSystem {
            dim,
            gamma,
            a_i_basis,
            psi: None,
            envelope: Envelope { exponents: vec![vec![f64::NEG_INFINITY; r]], constant: 0.0, power: 0 },
            rho_q,
            beta,
            cone,
            one,
            provenance: "homogeneous".into(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_psi(mut self, psi: PsiFn, envelope: Envelope, provenance: &str) -> Self {
        self.psi = Some(psi);
        self.envelope = envelope;
        self.provenance = provenance.into();
        self
    }

    pub fn rank(&self) -> usize {
        self.gamma.len()
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.rank();
        for g in &self.gamma {
            if g.nrows() != self.dim || g.ncols() != self.dim {
                return Err(CtermError::DimensionMismatch { expected: self.dim, found: g.nrows() });
            }
        }
        if self.rho_q.len() != r || self.a_i_basis.len() != r {
            return Err(CtermError::DimensionMismatch { expected: r, found: self.rho_q.len() });
        }
        let worst = self.commutator_defect();
        if worst > 1e-10 {
            return Err(CtermError::Invalid(format!("Γ(X_i) do not commute (relative defect {worst:e})")));
        }
        Ok(())
    }

    /// max ‖Γ_iΓ_j − Γ_jΓ_i‖ / (‖Γ_i‖‖Γ_j‖)
    pub fn commutator_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rank() {
            for j in i + 1..self.rank() {
                let (a, b) = (&self.gamma[i], &self.gamma[j]);
                let scale = op_norm(a) * op_norm(b);
                if scale > 0.0 {
                    worst = worst.max(op_norm(&(a * b - b * a)) / scale);
                }
            }
        }
        worst
    }

    pub fn gamma_at(&self, x: &[f64]) -> CMat {
        combination(&self.gamma, x)
    }

    pub fn rho_at(&self, x: &[f64]) -> f64 {
        dot(&self.rho_q, x)
    }

    pub fn beta_at(&self, x: &[f64]) -> f64 {
        self.beta.iter().map(|b| dot(b, x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// a_Z exp(sX) in a_Z coordinates.
    pub fn moved(&self, a_z: &[f64], x: &[f64], s: f64) -> Vec<f64> {
        let mut out = a_z.to_vec();
        for (xi, b) in x.iter().zip(&self.a_i_basis) {
            for (o, bi) in out.iter_mut().zip(b) {
                *o += s * xi * bi;
            }
        }
        out
    }

    pub fn psi_at(&self, a_z: &[f64], x: &[f64]) -> CVec {
        match &self.psi {
            Some(p) => p(a_z, x),
            None => CVec::zeros(self.dim),
        }
    }

    pub fn pairing(&self, v: &CVec) -> C {
        pair(&self.one, v)
    }

    /// Matrices row-major as decimal strings; Ψ is not serialised.
    pub fn to_json(&self) -> Value {
        let mat = |m: &CMat| -> Value {
            Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| json!([format!("{:e}", m[(i, j)].re), format!("{:e}", m[(i, j)].im)])).collect())).collect())
        };
        json!({
            "dim": self.dim,
            "gamma": self.gamma.iter().map(mat).collect::<Vec<_>>(),
            "a_i_basis": self.a_i_basis,
            "rho_q": self.rho_q,
            "beta": self.beta,
            "envelope": {"exponents": self.envelope.exponents, "constant": self.envelope.constant, "power": self.envelope.power},
            "cone": {"generators": self.cone.generators, "interior": self.cone.interior},
            "one": self.one.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
            "psi": if self.psi.is_some() { Value::String(self.provenance.clone()) } else { Value::Null },
        })
    }

    /// Reads the form written by `to_json` (Ψ = 0).
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| CtermError::Invalid(format!("transport system JSON: {what}"));
        let num = |v: &Value| -> Result<f64> {
            match v {
                Value::String(s) => s.parse::<f64>().map_err(|_| bad("number")),
                Value::Number(n) => n.as_f64().ok_or_else(|| bad("number")),
                _ => Err(bad("number")),
            }
        };
        let vecf = |v: &Value| -> Result<Vec<f64>> { v.as_array().ok_or_else(|| bad("array"))?.iter().map(num).collect() };
        let vecs = |v: &Value| -> Result<Vec<Vec<f64>>> { v.as_array().ok_or_else(|| bad("array"))?.iter().map(vecf).collect() };
        let cnum = |v: &Value| -> Result<C> {
            match v.as_array() {
                Some(p) if p.len() == 2 => Ok(C::new(num(&p[0])?, num(&p[1])?)),
                _ => Ok(C::new(num(v)?, 0.0)),
            }
        };
        let dim = v["dim"].as_u64().ok_or_else(|| bad("dim"))? as usize;
        let mut gamma = Vec::new();
        for g in v["gamma"].as_array().ok_or_else(|| bad("gamma"))? {
            let rows = g.as_array().ok_or_else(|| bad("gamma rows"))?;
            let mut m = CMat::zeros(dim, dim);
            for (i, row) in rows.iter().enumerate().take(dim) {
                for (j, e) in row.as_array().ok_or_else(|| bad("gamma row"))?.iter().enumerate().take(dim) {
                    m[(i, j)] = cnum(e)?;
                }
            }
            gamma.push(m);
        }
        let one: Vec<C> = v["one"].as_array().ok_or_else(|| bad("one"))?.iter().map(cnum).collect::<Result<_>>()?;
        let cone = ConeData { generators: vecs(&v["cone"]["generators"])?, interior: vecs(&v["cone"]["interior"])? };
        let mut s = TransportSystem::homogeneous(gamma, vecf(&v["rho_q"])?, vecs(&v["beta"])?, cone, CVec::from_vec(one))?;
        if v.get("a_i_basis").is_some() {
            s.a_i_basis = vecs(&v["a_i_basis"])?;
        }
        Ok(s)
    }
}

/// Ones vector in the given dimension.
pub fn ones(n: usize) -> CVec {
    cvec(&vec![1.0; n])
}
