//! Built-in spherical pairs with hand-derived reference data, and custom JSON input.

use crate::error::{PipelineError, Result};
use crate::orbit::OrbitChart;
use serde_json::Value;
use sphct_core::cones::{iv, Cone};
use sphct_core::envalg::Poly;
use sphct_core::liecore::builtins::{sl, sl2, sl2_sl2};
use sphct_core::liecore::json::{algebra_from_json, vector_from_json};
use sphct_core::liecore::{LieAlgebra, Subspace};
use sphct_core::rational::{ivec, q, qr, Q};
use sphct_core::sphstruct::{analyze, ParabolicDatum, SphericalDatum};

/// Expected structure, derived by hand.
#[derive(Clone, Debug)]
pub struct Reference {
    /// spherical roots on the a_Z basis
    pub s: Vec<Vec<Q>>,
    pub rho_q: Vec<Q>,
    pub cone_rays: Vec<Vec<i64>>,
    pub cone_lineality: Vec<Vec<i64>>,
    /// (I, spanning set of h_I) for every I ⊆ S
    pub h_i: Vec<(Vec<usize>, Vec<Vec<Q>>)>,
    /// γ₀ of the Casimir as Σ coeff·Π (a-vector)^k
    pub gamma0: Vec<(Q, Vec<(Vec<Q>, u16)>)>,
}

impl Reference {
    pub fn cone(&self, dim: usize) -> Cone {
        let rays: Vec<_> = self.cone_rays.iter().map(|r| iv(r)).collect();
        let lin: Vec<_> = self.cone_lineality.iter().map(|r| iv(r)).collect();
        Cone::from_generators(dim, &rays, &lin)
    }

    /// The expected γ₀ in the letters of `basis`.
    pub fn gamma0_poly(&self, basis: &[Vec<Q>]) -> Option<Poly> {
        let mut p = Poly::zero();
        for (c, factors) in &self.gamma0 {
            let mut m = vec![0u16; basis.len()];
            for (v, k) in factors {
                m[basis.iter().position(|b| b == v)?] += k;
            }
            p.add_term(m, c.clone());
        }
        Some(p)
    }
}

#[derive(Clone, Debug)]
pub struct Example {
    pub name: String,
    pub g: LieAlgebra,
    pub h: Subspace,
    pub a: Subspace,
    pub chamber: Vec<Q>,
    pub orbit: Option<OrbitChart>,
    /// the spherical function of the hyperbolic plane is available
    pub oracle: bool,
    /// rational lattice for the integrality check, on a_Z coordinates
    pub lattice: Option<Vec<Vec<f64>>>,
    pub reference: Option<Reference>,
}

pub const BUILTINS: [&str; 4] = ["sl2_so2", "sl2_so11", "sl2xsl2_diag", "torus"];

impl Example {
    pub fn parabolic(&self) -> Result<ParabolicDatum> {
        Ok(ParabolicDatum::new(&self.g, &self.a, &self.chamber)?)
    }

    pub fn analyze(&self) -> Result<SphericalDatum> {
        Ok(analyze(&self.g, &self.h, &self.parabolic()?)?)
    }

    pub fn builtin(name: &str) -> Option<Example> {
        Some(match name {
            "sl2_so2" => sl2_example(name, ivec(&[0, 1, -1]), Some(OrbitChart::Trivial), true),
            "sl2_so11" => sl2_example(name, ivec(&[0, 1, 1]), Some(OrbitChart::So11 { c: 0.8 }), false),
            "sl2xsl2_diag" => diagonal(),
            "torus" => torus(),
            _ => return None,
        })
    }

    /// `{"name", "algebra": "sl2" | "sl2_sl2" | "sl<n>" | "abelian:<n>" | {...}, "h", "a", "chamber"}`
    pub fn from_json(v: &Value) -> Result<Example> {
        let usage = |m: &str| PipelineError::Usage(format!("example input: {m}"));
        let g = match &v["algebra"] {
            Value::String(s) => named_algebra(s).ok_or_else(|| usage(&format!("unknown algebra {s}")))?,
            Value::Object(_) => algebra_from_json(&v["algebra"])?,
            _ => return Err(usage("missing algebra")),
        };
        let n = g.dim();
        let vectors = |key: &str| -> Result<Vec<Vec<Q>>> {
            match &v[key] {
                Value::Array(rows) => rows.iter().map(|r| Ok(vector_from_json(r)?)).collect(),
                Value::Null => Ok(Vec::new()),
                _ => Err(usage(&format!("{key} must be a list of vectors"))),
            }
        };
        let h = vectors("h")?;
        let a = vectors("a")?;
        if h.iter().chain(&a).any(|x| x.len() != n) {
            return Err(usage("vector length differs from dim g"));
        }
        let chamber = match &v["chamber"] {
            Value::Null => return Err(usage("missing chamber")),
            c => vector_from_json(c)?,
        };
        Ok(Example {
            name: v["name"].as_str().unwrap_or("custom").to_string(),
            h: Subspace::span(n, &h),
            a: Subspace::span(n, &a),
            g,
            chamber,
            orbit: None,
            oracle: false,
            lattice: None,
            reference: None,
        })
    }
}

fn named_algebra(s: &str) -> Option<LieAlgebra> {
    match s {
        "sl2" => Some(sl2()),
        "sl2_sl2" => Some(sl2_sl2()),
        _ => {
            if let Some(n) = s.strip_prefix("abelian:") {
                return n.parse().ok().map(LieAlgebra::abelian);
            }
            s.strip_prefix("sl").and_then(|n| n.parse().ok()).and_then(|n| sl(n).ok())
        }
    }
}

// basis H, E, F; a = ℝH, chamber H, a_Z coordinate on H
fn sl2_example(name: &str, h: Vec<Q>, orbit: Option<OrbitChart>, oracle: bool) -> Example {
    let hh = ivec(&[1, 0, 0]);
    let reference = Reference {
        s: vec![vec![q(4)]],
        rho_q: vec![q(1)],
        cone_rays: vec![vec![-1]],
        cone_lineality: vec![],
        h_i: vec![(vec![], vec![ivec(&[0, 0, 1])]), (vec![0], vec![h.clone()])],
        gamma0: vec![(qr(1, 2), vec![(hh.clone(), 2)]), (q(-1), vec![(hh.clone(), 1)])],
    };
    Example {
        name: name.into(),
        g: sl2(),
        h: Subspace::span(3, &[h]),
        a: Subspace::span(3, &[hh.clone()]),
        chamber: hh,
        orbit,
        oracle,
        lattice: Some(vec![vec![4.0]]),
        reference: Some(reference),
    }
}

// basis H1, E1, F1, H2, E2, F2; h the diagonal, chamber H1 − H2 (so F2 is positive)
fn diagonal() -> Example {
    let h = vec![ivec(&[1, 0, 0, 1, 0, 0]), ivec(&[0, 1, 0, 0, 1, 0]), ivec(&[0, 0, 1, 0, 0, 1])];
    let (h1, h2) = (ivec(&[1, 0, 0, 0, 0, 0]), ivec(&[0, 0, 0, 1, 0, 0]));
    let reference = Reference {
        s: vec![vec![q(4)]],
        rho_q: vec![q(2)],
        cone_rays: vec![vec![-1]],
        cone_lineality: vec![],
        h_i: vec![
            (vec![], vec![ivec(&[1, 0, 0, 1, 0, 0]), ivec(&[0, 0, 1, 0, 0, 0]), ivec(&[0, 0, 0, 0, 1, 0])]),
            (vec![0], h.clone()),
        ],
        gamma0: vec![
            (qr(1, 2), vec![(h1.clone(), 2)]),
            (q(-1), vec![(h1.clone(), 1)]),
            (qr(1, 2), vec![(h2.clone(), 2)]),
            (q(1), vec![(h2.clone(), 1)]),
        ],
    };
    Example {
        name: "sl2xsl2_diag".into(),
        g: sl2_sl2(),
        h: Subspace::span(6, &h),
        a: Subspace::span(6, &[h1, h2]),
        chamber: ivec(&[1, 0, 0, -1, 0, 0]),
        orbit: Some(OrbitChart::Trivial),
        oracle: false,
        lattice: Some(vec![vec![4.0]]),
        reference: Some(reference),
    }
}

// Z = A = ℝ², no roots at all
fn torus() -> Example {
    let (x1, x2) = (ivec(&[1, 0]), ivec(&[0, 1]));
    let reference = Reference {
        s: vec![],
        rho_q: vec![q(0), q(0)],
        cone_rays: vec![],
        cone_lineality: vec![vec![1, 0], vec![0, 1]],
        h_i: vec![(vec![], vec![])],
        gamma0: vec![(q(1), vec![(x1.clone(), 2)]), (q(1), vec![(x2.clone(), 2)])],
    };
    Example {
        name: "torus".into(),
        g: LieAlgebra::abelian(2),
        h: Subspace::zero(2),
        a: Subspace::full(2),
        chamber: ivec(&[1, 2]),
        orbit: Some(OrbitChart::Trivial),
        oracle: false,
        lattice: Some(vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
        reference: Some(reference),
    }
}
