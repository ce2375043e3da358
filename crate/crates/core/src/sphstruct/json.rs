use super::datum::SphericalDatum;
use crate::liecore::json::vector_to_json;
use crate::liecore::Subspace;
use serde_json::{json, Value};

fn subspace_json(s: &Subspace) -> Value {
    Value::Array(s.basis().iter().map(|b| vector_to_json(b)).collect())
}

impl SphericalDatum {
    pub fn to_json(&self) -> Value {
        let t: Vec<Value> = self
            .t_table
            .iter()
            .map(|e| {
                json!({
                    "alpha": vector_to_json(&e.alpha.coords),
                    "x_minus": vector_to_json(&e.x_minus),
                    "zero_component": vector_to_json(&e.zero_component),
                    "components": e.root_components.iter().map(|(b, v)| json!({
                        "beta": vector_to_json(&b.coords),
                        "value": vector_to_json(v),
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "h": subspace_json(&self.h),
            "a": subspace_json(&self.parabolic.a),
            "m": subspace_json(&self.parabolic.m),
            "n": subspace_json(&self.parabolic.n),
            "generic_element": vector_to_json(&self.adapted.x),
            "l": subspace_json(self.l()),
            "u": subspace_json(self.u()),
            "lh": subspace_json(&self.lh),
            "lh_perp": subspace_json(&self.lh_perp),
            "a_h": subspace_json(&self.split.a_h),
            "a_z": subspace_json(&self.split.a_z),
            "sigma_u": self.adapted.sigma_u.iter().map(|a| vector_to_json(&a.coords)).collect::<Vec<_>>(),
            "t_table": t,
            "monoid_generators": self.monoid_gens.iter().map(|v| vector_to_json(v)).collect::<Vec<_>>(),
            "spherical_roots": self.s.iter().map(|v| vector_to_json(v)).collect::<Vec<_>>(),
            "compression_cone": self.compression_cone.to_json(),
            "rho_q": vector_to_json(&self.rho_q_z()),
            "unimodular": self.unimodularity.unimodular(),
            "rho_q_vanishes_on_a_h": self.unimodularity.rho_vanishes_on_ah,
            "quotient_trace_vanishes": self.unimodularity.trace_vanishes,
            "positive_witness": self.unimodularity.positive_witness.as_ref().map(|w| vector_to_json(w)),
            "checks": self.adapted.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed})).collect::<Vec<_>>(),
        })
    }
}
