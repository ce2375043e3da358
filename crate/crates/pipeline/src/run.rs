//! Stage orchestration for one example.

use crate::error::{PipelineError, Result};
use crate::examples::Example;
use crate::hyperbolic::analyze_hyperbolic;
use crate::oracle::{eigen_residual, spherical};
use crate::orbit::{certify, default_grid};
use crate::report::{num, CheckRecord, RunReport, StageReport};
use crate::suites;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sphct_core::cones::{simplicial_subdivision, Cone};
use sphct_core::degen::{degeneration_consistency, h_i_explicit, subsets, transitivity_check, verify_degenerate_space};
use sphct_core::envalg::{BAlgebra, HcOrder, HcProjection, Poly};
use sphct_core::liecore::json::vector_to_json;
use sphct_core::liecore::Subspace;
use sphct_core::rational::q;
use sphct_core::sphstruct::SphericalDatum;
use sphct_cterm::rate::discrete_series_test;
use std::time::Instant;

pub const STAGES: [&str; 7] = ["analyze", "degenerate", "fan", "envalg", "cterm", "orbit", "synthetic"];

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub seed: u64,
    /// vanishing threshold of the discrete-series test, relative to the sup of f
    pub tol: f64,
    pub degree_cap: usize,
    pub fan_samples: usize,
    pub degen_samples: usize,
    pub mu_pairs: usize,
    pub nus: Vec<f64>,
    pub base_point: f64,
    pub t_max: f64,
    pub step: f64,
    pub transport_systems: usize,
    pub ensemble: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            tol: 1e-6,
            degree_cap: 4,
            fan_samples: 100_000,
            degen_samples: 5,
            mu_pairs: 6,
            nus: vec![0.5, 1.0, 2.0],
            base_point: -1.0,
            t_max: 6.0,
            step: 0.05,
            transport_systems: 100,
            ensemble: 1000,
        }
    }
}

impl Config {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || PipelineError::Usage(format!("bad value for {key}: {value}"));
        fn p<T: std::str::FromStr>(v: &str, bad: impl Fn() -> PipelineError) -> Result<T> {
            v.trim().parse().map_err(|_| bad())
        }
        match key.trim() {
            "seed" => self.seed = p(value, bad)?,
            "tol" => self.tol = p(value, bad)?,
            "degree_cap" | "degree-cap" => self.degree_cap = p(value, bad)?,
            "fan_samples" => self.fan_samples = p(value, bad)?,
            "degen_samples" => self.degen_samples = p(value, bad)?,
            "mu_pairs" => self.mu_pairs = p(value, bad)?,
            "nus" => self.nus = value.split(',').map(|s| p(s, bad)).collect::<Result<_>>()?,
            "base_point" => self.base_point = p(value, bad)?,
            "t_max" => self.t_max = p(value, bad)?,
            "step" => self.step = p(value, bad)?,
            "transport_systems" => self.transport_systems = p(value, bad)?,
            "ensemble" => self.ensemble = p(value, bad)?,
            other => return Err(PipelineError::Usage(format!("unknown config key {other}"))),
        }
        Ok(())
    }

    /// `key = value` lines; `#` starts a comment. Returns the keys that are not
    /// configuration values (such as `stages` or `example`) for the caller.
    pub fn parse(&mut self, text: &str) -> Result<Vec<(String, String)>> {
        let mut rest = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| PipelineError::Usage(format!("config line {}: expected key = value", n + 1)))?;
            let v = v.trim().trim_matches('"');
            match k.trim() {
                "stages" | "example" | "input" | "out" => rest.push((k.trim().to_string(), v.to_string())),
                k => self.set(k, v)?,
            }
        }
        Ok(rest)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed, "tol": self.tol, "degree_cap": self.degree_cap,
            "fan_samples": self.fan_samples, "degen_samples": self.degen_samples, "mu_pairs": self.mu_pairs,
            "nus": self.nus, "base_point": self.base_point, "t_max": self.t_max, "step": self.step,
            "transport_systems": self.transport_systems, "ensemble": self.ensemble,
        })
    }
}

/// `a,b,c` or `all`, checked against the known stages and returned in pipeline order.
pub fn parse_stages(s: &str) -> Result<Vec<String>> {
    if s.trim() == "all" {
        return Ok(STAGES.iter().map(|s| s.to_string()).collect());
    }
    let asked: Vec<&str> = s.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if let Some(bad) = asked.iter().find(|a| !STAGES.contains(a)) {
        return Err(PipelineError::Usage(format!("unknown stage {bad}; known: {}", STAGES.join(","))));
    }
    Ok(STAGES.iter().filter(|s| asked.contains(s)).map(|s| s.to_string()).collect())
}

fn subspace_json(v: &Subspace) -> Value {
    Value::Array(v.basis().iter().map(|b| vector_to_json(b)).collect())
}

fn vectors_json(v: &[Vec<sphct_core::rational::Q>]) -> Value {
    Value::Array(v.iter().map(|b| vector_to_json(b)).collect())
}

/// Runs the requested stages in order. Every stage after `analyze` needs the spherical
/// datum, which is computed once.
pub fn run(ex: &Example, stages: &[String], cfg: &Config) -> RunReport {
    let t0 = Instant::now();
    let datum = ex.analyze();
    let analyze_secs = t0.elapsed().as_secs_f64();
    let mut out = Vec::new();
    for stage in stages {
        let start = Instant::now();
        let mut rep = StageReport::new(stage);
        let res = match (stage.as_str(), &datum) {
            ("synthetic", _) => synthetic_stage(&mut rep, cfg),
            ("cterm", _) => cterm_stage(&mut rep, ex, cfg),
            ("orbit", _) => orbit_stage(&mut rep, ex),
            (_, Err(e)) => Err(PipelineError::Usage(format!("analysis failed: {e}"))),
            ("analyze", Ok(d)) => analyze_stage(&mut rep, ex, d),
            ("degenerate", Ok(d)) => degenerate_stage(&mut rep, d, cfg),
            ("fan", Ok(d)) => fan_stage(&mut rep, d, cfg),
            ("envalg", Ok(d)) => envalg_stage(&mut rep, ex, d, cfg),
            (other, _) => Err(PipelineError::Usage(format!("unknown stage {other}"))),
        };
        if let Err(e) = res {
            rep.error = Some(e.in_stage(stage).to_string());
        }
        rep.seconds = start.elapsed().as_secs_f64() + if stage == "analyze" { analyze_secs } else { 0.0 };
        out.push(rep);
    }
    RunReport { example: ex.name.clone(), config: cfg.to_json(), stages: out }
}

fn analyze_stage(rep: &mut StageReport, ex: &Example, d: &SphericalDatum) -> Result<()> {
    for c in &d.adapted.checks {
        rep.push(CheckRecord::holds(&c.name, "construct_adapted_parabolic", c.passed));
    }
    rep.data["datum"] = d.to_json();
    rep.data["spherical_roots"] = vectors_json(&d.s);
    rep.data["rho_q"] = vector_to_json(&d.rho_q_z());
    rep.data["compression_cone"] = d.compression_cone.to_json();
    rep.data["unimodular"] = json!(d.unimodularity.unimodular());
    let Some(r) = &ex.reference else { return Ok(()) };
    rep.push(CheckRecord::equal("spherical roots", "analyze", vectors_json(&d.s), vectors_json(&r.s)));
    rep.push(CheckRecord::equal("rho_Q on a_Z", "analyze", vector_to_json(&d.rho_q_z()), vector_to_json(&r.rho_q)));
    rep.push(CheckRecord::equal("compression cone", "analyze", d.compression_cone.to_json(), r.cone(d.split.a_z.dim()).to_json()));
    for (i, span) in &r.h_i {
        let dd = h_i_explicit(d, i)?;
        let want = Subspace::span(ex.g.dim(), span);
        let mut c = CheckRecord::equal(&format!("h_I for I = {i:?}"), "h_i_explicit", subspace_json(&dd.h_i), subspace_json(&want));
        c.pass = dd.h_i == want;
        rep.push(c);
    }
    Ok(())
}

fn degenerate_stage(rep: &mut StageReport, d: &SphericalDatum, cfg: &Config) -> Result<()> {
    let all = subsets(d.s.len());
    let mut rows = Vec::new();
    for i in &all {
        let dd = h_i_explicit(d, i)?;
        for c in &dd.checks {
            rep.push(CheckRecord::holds(&format!("I = {i:?}: {}", c.name), "h_i_explicit", c.passed));
        }
        let mut samples = dd.subcones.interior_samples(4 * cfg.degen_samples, cfg.seed);
        samples.dedup();
        let mut distinct: Vec<_> = Vec::new();
        for s in samples {
            if !distinct.contains(&s) {
                distinct.push(s);
            }
        }
        distinct.truncate(cfg.degen_samples.max(1));
        let needed = if dd.subcones.a_i.dim() == 0 { 1 } else { cfg.degen_samples };
        let cons = degeneration_consistency(d, &dd, &distinct)?;
        let matched = cons.iter().filter(|c| c.matches).count();
        rep.push(CheckRecord::ge(&format!("I = {i:?}: interior directions"), "interior_samples", distinct.len() as f64, needed as f64));
        rep.push(CheckRecord::ge(&format!("I = {i:?}: initial_subspace = h_I"), "degeneration_consistency", matched as f64, distinct.len() as f64));
        let vd = verify_degenerate_space(d, &dd)?;
        for c in &vd.checks {
            rep.push(CheckRecord::holds(&format!("I = {i:?}: {}", c.name), "verify_degenerate_space", c.passed));
        }
        let mut row = dd.to_json();
        row["directions"] = vectors_json(&distinct);
        rows.push(row);
    }
    for i in &all {
        for j in &all {
            if i != j && i.iter().all(|k| j.contains(k)) {
                rep.push(CheckRecord::holds(&format!("(h_J)_I = h_I for I = {i:?}, J = {j:?}"), "transitivity_check", transitivity_check(d, i, j)?));
            }
        }
    }
    rep.data["degenerations"] = json!(rows);
    Ok(())
}

fn fan_stage(rep: &mut StageReport, d: &SphericalDatum, cfg: &Config) -> Result<()> {
    certify_fan(rep, "a_Z^-", &d.compression_cone, cfg)
}

fn certify_fan(rep: &mut StageReport, label: &str, support: &Cone, cfg: &Config) -> Result<()> {
    let fan = simplicial_subdivision(support);
    let cert = fan.certify(cfg.fan_samples, cfg.seed);
    rep.push(CheckRecord::holds(&format!("{label}: cones simplicial"), "certify", cert.simplicial));
    rep.push(CheckRecord::holds(&format!("{label}: closed under faces"), "certify", cert.faces_ok));
    rep.push(CheckRecord::holds(&format!("{label}: cones meet in faces"), "certify", cert.facets_ok));
    rep.push(CheckRecord::le(&format!("{label}: sampled points outside all cones"), "certify", cert.uncovered as f64, 0.0));
    rep.push(CheckRecord::ge(&format!("{label}: sampled points"), "certify", cert.sampled as f64, cfg.fan_samples as f64));
    rep.data[format!("{label}_fan")] = fan.to_json();
    let rates = suites::toric_rates(&fan, cfg.seed, 8)?;
    suites::record_toric_rates(rep, label, &rates);
    Ok(())
}

fn envalg_stage(rep: &mut StageReport, ex: &Example, d: &SphericalDatum, cfg: &Config) -> Result<()> {
    let mut b = BAlgebra::new(d, cfg.degree_cap)?;
    let c = b.a_s_centrality()?;
    rep.push(CheckRecord::holds(&c.name, "a_s_centrality", c.passed));
    let all = subsets(d.s.len());
    let mut images = Vec::new();
    for i in &all {
        let (c, z_s, z_i) = b.square_casimir(i)?;
        rep.push(CheckRecord::holds(&format!("I = {i:?}: {}", c.name), "square_casimir", c.passed));
        let c = b.square_symmetric(i)?;
        rep.push(CheckRecord::holds(&format!("I = {i:?}: {}", c.name), "square_symmetric", c.passed));
        for c in b.morphism_checks(i, 2)? {
            rep.push(CheckRecord::holds(&format!("I = {i:?}: {}", c.name), "morphism_checks", c.passed));
        }
        images.push(json!({"I": i, "z_S": b.format(&z_s), "z_I": b.format(&z_i)}));
    }
    let hc = HcProjection::new(&ex.g, &ex.parabolic()?, HcOrder::Standard, cfg.degree_cap)?;
    let z = hc.casimir(&ex.g)?;
    rep.push(CheckRecord::holds("Casimir is central", "is_central", hc.is_central(&z)?));
    let g0 = hc.gamma0(&z)?;
    let names: Vec<String> = hc.pbw.basis().iter().map(|v| ex.g.format_vector(v)).collect();
    if let Some(r) = &ex.reference {
        let want = r.gamma0_poly(hc.pbw.basis()).ok_or_else(|| PipelineError::Usage("reference letters missing from the PBW basis".into()))?;
        let mut c = CheckRecord::equal("gamma_0(Casimir) = hand value", "gamma0", json!(g0.format(&names)), json!(want.format(&names)));
        c.pass = g0 == want;
        rep.push(c);
    }
    // μ_I multiplicativity on random pairs of U_S(b) elements of degree ≤ 2
    let s_all = b.s_all();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x4D55);
    let mut mu_rows = Vec::new();
    for i in all.iter().filter(|i| i.len() < d.s.len()) {
        let Some(x) = h_i_explicit(d, i)?.subcones.interior_point() else { continue };
        let basis = b.u_i_basis(&s_all, 2.min(cfg.degree_cap / 2))?;
        let (mut ok, mut tried) = (true, 0);
        for _ in 0..cfg.mu_pairs {
            let mut comb = || {
                let mut p = Poly::zero();
                for u in &basis {
                    p = p.add(&u.scale(&q(rng.random_range(-3..=3))));
                }
                p
            };
            let (u, v) = (comb(), comb());
            let uv = b.mul(&u, &v)?;
            let lhs = b.mu_i(&uv, i, &x)?.u_i;
            let mu = b.mu_i(&u, i, &x)?.u_i;
            let mv = b.mu_i(&v, i, &x)?.u_i;
            ok &= lhs == b.mul(&mu, &mv)?;
            tried += 1;
        }
        rep.push(CheckRecord::holds(&format!("I = {i:?}: mu_I(uv) = mu_I(u) mu_I(v) on {tried} pairs"), "mu_i", ok));
        mu_rows.push(json!({"I": i, "x": vector_to_json(&x), "pairs": tried, "basis": basis.len()}));
    }
    rep.data["casimir_images"] = json!(images);
    rep.data["gamma0"] = json!(g0.format(&names));
    rep.data["mu_samples"] = json!(mu_rows);
    rep.data["degree_cap"] = json!(cfg.degree_cap);
    Ok(())
}

fn cterm_stage(rep: &mut StageReport, ex: &Example, cfg: &Config) -> Result<()> {
    if !ex.oracle {
        rep.skipped = Some("no eigenfunction oracle for this example".into());
        return Ok(());
    }
    let mut runs = Vec::new();
    for &nu in &cfg.nus {
        let mut res: f64 = 0.0;
        for k in 0..8 {
            res = res.max(eigen_residual(nu, cfg.base_point - 0.5 * k as f64)?);
        }
        rep.push(CheckRecord::le(&format!("nu = {nu}: oracle eigen-equation residual"), "spherical", res, 1e-8));
        let a = analyze_hyperbolic(nu, cfg.base_point, cfg.t_max, cfg.step)?;
        let tag = |s: &str| format!("nu = {nu}: {s}");
        rep.push(CheckRecord::equal(&tag("unitary exponents"), "constant_term_ray", json!(a.exponents.len()), json!(2)));
        rep.push(CheckRecord::le(&tag("frequency error"), "constant_term_ray", a.frequency_error, 1e-3));
        rep.push(CheckRecord::holds(&tag("Re exponents on rho_Q"), "constant_term_ray", a.unitary));
        rep.push(CheckRecord::holds(&tag("spectral projector checks"), "joint_spectrum", a.spectral.checks.passed()));
        rep.push(CheckRecord::le(&tag("transport vs oracle at t = 1"), "solve_transport", a.transport_error, 1e-8));
        rep.push(CheckRecord::le(&tag("f_I vs c-function asymptotics (scaled)"), "constant_term_ray", a.c_function_error, 1e-8));
        rep.push(CheckRecord::holds(&tag("rate fit passes"), "approximation_rate", a.rate.pass()));
        let rel = (a.rate.epsilon - a.predicted_epsilon).abs() / a.predicted_epsilon;
        rep.push(CheckRecord::le(&tag("rate vs remainder exponent (relative)"), "approximation_rate", rel, 0.1));
        rep.push(CheckRecord::holds(&tag("Re exponents on the lattice"), "integrality_check", a.integrality));
        let fi: Vec<C> = a.samples.iter().map(|s| s.2).collect();
        let scale = a.samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max).max(spherical(nu, cfg.base_point)?.0.abs());
        rep.push(CheckRecord::holds(&tag("not in the discrete series"), "discrete_series_test", !discrete_series_test(&[fi], scale, cfg.tol)));
        let mut row = a.to_json();
        row["relative_rate_error"] = num(rel);
        runs.push(row);
        rep.csv.push((format!("cterm_nu{nu}.csv"), a.to_csv()));
    }
    rep.data["runs"] = json!(runs);
    Ok(())
}

fn orbit_stage(rep: &mut StageReport, ex: &Example) -> Result<()> {
    let Some(chart) = ex.orbit else {
        rep.skipped = Some("no closed-form orbit chart".into());
        return Ok(());
    };
    let r = certify(chart, &default_grid())?;
    for (fam, fit) in &r.families {
        rep.push(CheckRecord::holds(&format!("{} converges rapidly", fam.name), "fit_rate", fit.is_rapid));
        rep.push(CheckRecord::gt(&format!("{} rate", fam.name), "fit_rate", fit.epsilon, 0.0));
        rep.csv.push((format!("orbit_{}.csv", fam.name.replace(' ', "_")), fam.to_csv()));
    }
    rep.data["chart"] = json!(format!("{chart:?}"));
    rep.data["families"] = r.to_json();
    Ok(())
}

fn synthetic_stage(rep: &mut StageReport, cfg: &Config) -> Result<()> {
    suites::transport_suite(rep, cfg.seed, cfg.transport_systems);
    suites::staged_transitivity(rep)?;
    suites::projector_ensemble(rep, cfg.seed, cfg.ensemble);
    suites::vanishing_suite(rep, 1.0, cfg.base_point, cfg.tol)?;
    for n in [2, 3] {
        certify_fan(rep, &format!("R{n}"), &Cone::full(n), cfg)?;
    }
    Ok(())
}
