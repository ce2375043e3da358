//! Example-independent numerical suites: random transport systems, the staged two-root
//! system, the projector ensemble, the vanishing criterion and toric chart rates.

use crate::error::Result;
use crate::hyperbolic::spherical_constant_term;
use crate::oracle::spherical;
use crate::report::{num, CheckRecord, StageReport};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use sphct_core::cones::Fan;
use sphct_core::rational::{q_to_f64, Q};
use sphct_cterm::linalg::{op_norm, CVec};
use sphct_cterm::rapidfit::{fit_rate, DecayFamily};
use sphct_cterm::rate::{discrete_series_test, transitivity_check};
use sphct_cterm::spectral::{joint_spectrum, projector_bound_check, projector_constant, real_levels, Class};
use sphct_cterm::synthetic::{random_commuting_pair, RandomSystem, StagedSystem};
use sphct_cterm::system::{ones, ConeData, TransportSystem};
use sphct_cterm::transport::{constant_term, constant_term_ray, phi_lambda_infty, ray_from_limits, solve_transport};

pub const TRANSPORT_TOL: f64 = 1e-8;
pub const STAGED_TOL: f64 = 1e-8;
pub const VANISHING_TOL: f64 = 1e-6;
pub const TORIC_TOL: f64 = 0.01;

fn seed_for(seed: u64, k: u64) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(k)
}

/// solve_transport and constant_term against the closed forms of random systems.
pub fn transport_suite(report: &mut StageReport, seed: u64, count: usize) {
    let mut worst_transport: f64 = 0.0;
    let mut worst_cterm: f64 = 0.0;
    let mut failures = Vec::new();
    let mut with_q0 = 0;
    let mut csv = String::from("system,rank,dim,transport_error,constant_term_error,has_q0\n");
    for k in 0..count {
        let rank = 1 + k % 2;
        let dim = 1 + (k / 2) % 6;
        let run = || -> Result<(f64, f64, bool)> {
            let rs = RandomSystem::seeded(seed_for(seed, k as u64), rank, dim)?;
            let y = &[0.2, -0.1][..rank];
            let x = &[-1.0, -0.5][..rank];
            let t = 0.8;
            let phi0 = rs.exact(y);
            let sol = solve_transport(&rs.system, &phi0, y, x, t)?;
            let moved: Vec<f64> = y.iter().zip(x).map(|(a, b)| a + t * b).collect();
            let exact = rs.exact(&moved);
            let te = (&sol.value - &exact).norm() / exact.norm();
            let sp = joint_spectrum(&rs.system)?;
            let ct = constant_term(&rs.system, &sp, &phi0, y)?;
            let truth = rs.constant_term_truth(y);
            // relative to the size of the data the constant term is built from
            let ce = (ct - truth).norm() / phi0.norm().max(truth.norm());
            Ok((te, ce, rs.has_q0()))
        };
        match run() {
            Ok((te, ce, q0)) => {
                worst_transport = worst_transport.max(te);
                worst_cterm = worst_cterm.max(ce);
                with_q0 += q0 as usize;
                csv.push_str(&format!("{k},{rank},{dim},{te:e},{ce:e},{q0}\n"));
            }
            Err(e) => failures.push(format!("system {k}: {e}")),
        }
    }
    report.push(CheckRecord::ge("random systems solved", "solve_transport", (count - failures.len()) as f64, count as f64));
    report.push(CheckRecord::le("transport vs closed form (relative)", "solve_transport", worst_transport, TRANSPORT_TOL));
    report.push(CheckRecord::le("constant term vs staged truth (relative)", "constant_term", worst_cterm, TRANSPORT_TOL));
    report.data["transport_suite"] = json!({"systems": count, "with_q0": with_q0, "worst_transport": num(worst_transport), "worst_constant_term": num(worst_cterm), "failures": failures});
    report.csv.push(("transport_suite.csv".into(), csv));
}

/// f_I computed directly and through f_J on the staged two-root system, for I = ∅.
pub fn staged_transitivity(report: &mut StageReport) -> Result<()> {
    let st = StagedSystem::standard();
    let a = [0.15, -0.25];
    let x = [-1.0, -0.6];
    let t: Vec<f64> = (0..12).map(|i| 0.3 * i as f64).collect();
    let phi = st.exact(&a);
    let full = st.system(&[], None)?;
    let sp = joint_spectrum(&full)?;
    let direct_ray = constant_term_ray(&full, &sp, &phi, &a, &x)?;
    let direct: Vec<C> = t.iter().map(|&s| direct_ray.eval(s)).collect();
    let truth: Vec<C> = t.iter().map(|&s| st.constant_term_truth(&[], &[a[0] + s * x[0], a[1] + s * x[1]])).collect();
    let err = |v: &[C]| v.iter().zip(&truth).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    report.push(CheckRecord::le("f_I vs closed form", "constant_term_ray", err(&direct), STAGED_TOL));
    let mut rows = Vec::new();
    for j in [vec![], vec![0usize], vec![1]] {
        let sys_j = st.system(&j, None)?;
        let sp_j = joint_spectrum(&sys_j)?;
        let mut phi_j = CVec::zeros(6);
        for e in sp_j.of_class(Class::Zero) {
            phi_j += phi_lambda_infty(&sys_j, e, &phi, &a)?;
        }
        let hom = st.system(&[], Some(&j))?;
        let sp_hom = joint_spectrum(&hom)?;
        let mut limits = Vec::new();
        for (k, e) in sp_hom.exponents.iter().enumerate().filter(|(_, e)| e.class == Class::Zero) {
            limits.push((k, phi_lambda_infty(&hom, e, &phi_j, &a)?));
        }
        let iterated_ray = ray_from_limits(&hom, &sp_hom, &limits, &x);
        let iterated: Vec<C> = t.iter().map(|&s| iterated_ray.eval(s)).collect();
        let tr = transitivity_check(&[direct.clone()], &[iterated.clone()], STAGED_TOL);
        report.push(CheckRecord::le(&format!("(f_J)_I = f_I, J = {j:?}"), "transitivity_check", tr.max_diff / tr.scale, STAGED_TOL));
        report.push(CheckRecord::le(&format!("(f_J)_I vs closed form, J = {j:?}"), "constant_term_ray", err(&iterated), STAGED_TOL));
        rows.push(json!({"J": j, "report": tr.to_json()}));
    }
    report.data["staged_transitivity"] = json!(rows);
    Ok(())
}

/// Spectral projectors of random commuting families with integer real spectral parts
/// against C(1, N)(1+‖A‖)^N, N = dim.
pub fn projector_ensemble(report: &mut StageReport, seed: u64, count: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed_for(seed, 0x5EED));
    let (mut cuts, mut cut_fail, mut joint, mut joint_fail) = (0usize, 0usize, 0usize, 0usize);
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for k in 0..count {
        let dim = rng.random_range(2..=8);
        let (a1, a2) = random_commuting_pair(&mut rng, dim);
        let levels = real_levels(&a1);
        for cut in 1..levels.len() {
            cuts += 1;
            match projector_bound_check(&a1, cut, 1.0) {
                Ok(b) => {
                    worst = worst.max(b.norm / b.bound);
                    cut_fail += !b.pass as usize;
                }
                Err(e) => {
                    cut_fail += 1;
                    errors.push(format!("family {k} cut {cut}: {e}"));
                }
            }
        }
        // joint projectors are differences of two cut projectors
        let bound = 2.0 * projector_constant(1.0, dim) * (1.0 + op_norm(&a1)).powi(dim as i32);
        let cone = ConeData::from_generators(vec![vec![-1.0, 0.0], vec![0.0, -1.0]], &[]);
        let sys = TransportSystem::homogeneous(vec![a1, a2], vec![0.5, 0.5], vec![vec![1.0, 1.0]], cone, ones(dim));
        match sys.and_then(|s| joint_spectrum(&s)) {
            Ok(sp) => {
                for e in &sp.exponents {
                    joint += 1;
                    let n = op_norm(&e.projector);
                    worst = worst.max(n / bound);
                    joint_fail += (n > bound) as usize;
                }
            }
            Err(e) => {
                joint_fail += 1;
                errors.push(format!("family {k}: {e}"));
            }
        }
    }
    report.push(CheckRecord::le("cut projectors over the bound", "projector_bound_check", cut_fail as f64, 0.0));
    report.push(CheckRecord::le("joint projectors over the bound", "joint_spectrum", joint_fail as f64, 0.0));
    report.data["projector_ensemble"] = json!({
        "families": count, "cuts": cuts, "joint_projectors": joint, "gap": 1.0,
        "worst_ratio": num(worst), "errors": errors,
    });
}

/// A two-root eigenfunction whose exponents all sit at least one unit below ρ along
/// every root direction.
pub fn decaying_staged() -> StagedSystem {
    let mut st = StagedSystem::standard();
    let shifts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 1.0], [1.0, 2.0]];
    for (k, e) in st.exponents.iter_mut().enumerate() {
        e[0] = C::new(st.rho[0] + 1.0 + shifts[k][0], e[0].im);
        e[1] = C::new(st.rho[1] + 1.0 + shifts[k][1], e[1].im);
    }
    st.forced.clear();
    st
}

/// f_I samples for every I ⊊ S of a staged system, and sup |f| on the same rays.
pub fn staged_constant_terms(st: &StagedSystem) -> Result<(Vec<Vec<C>>, f64)> {
    let a = [0.15, -0.25];
    let t: Vec<f64> = (0..16).map(|i| 0.3 * i as f64).collect();
    let phi = st.exact(&a);
    let mut out = Vec::new();
    let mut scale: f64 = 0.0;
    for i in [vec![], vec![0usize], vec![1]] {
        let sys = st.system(&i, None)?;
        let sp = joint_spectrum(&sys)?;
        let x = if i.is_empty() { vec![-1.0, -0.6] } else { vec![-1.0] };
        let ray = constant_term_ray(&sys, &sp, &phi, &a, &x)?;
        out.push(t.iter().map(|&s| ray.eval(s)).collect());
        for &s in &t {
            let y = sys.moved(&a, &x, s);
            scale = scale.max(sys.pairing(&st.exact(&y)).norm());
        }
    }
    Ok((out, scale))
}

/// The vanishing criterion on a decaying eigenfunction, with the staged system, the
/// zero function and the spherical function as controls that must not vanish (or must).
pub fn vanishing_suite(report: &mut StageReport, nu: f64, x0: f64, tol: f64) -> Result<()> {
    let (cts, scale) = staged_constant_terms(&decaying_staged())?;
    let worst = cts.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    report.push(CheckRecord::holds("decaying eigenfunction is detected", "discrete_series_test", discrete_series_test(&cts, scale, tol)));
    report.push(CheckRecord::le("decaying eigenfunction: sup |f_I| / scale", "constant_term_ray", worst / scale, tol));
    let (cts_s, scale_s) = staged_constant_terms(&StagedSystem::standard())?;
    report.push(CheckRecord::holds("staged system is not detected", "discrete_series_test", !discrete_series_test(&cts_s, scale_s, tol)));
    let zero = vec![vec![C::new(0.0, 0.0); 8]];
    report.push(CheckRecord::holds("zero function is detected", "discrete_series_test", discrete_series_test(&zero, 1.0, tol)));
    let ray = spherical_constant_term(nu, x0)?;
    let ts: Vec<f64> = (0..=24).map(|k| 0.25 * k as f64).collect();
    let fi: Vec<C> = ts.iter().map(|&t| ray.eval(t)).collect();
    let mut sc: f64 = 0.0;
    for &t in &ts {
        sc = sc.max(spherical(nu, x0 - t)?.0.abs());
    }
    report.push(CheckRecord::holds(&format!("spherical function (nu = {nu}) is not detected"), "discrete_series_test", !discrete_series_test(&[fi], sc, tol)));
    report.data["vanishing"] = json!({"decaying_sup_ratio": num(worst / scale), "spherical_nu": nu});
    Ok(())
}

/// Rate of exp(sX) in the fan chart against fit_rate on the chart coordinates e^{s·ψ_j(X)}.
#[derive(Clone, Debug)]
pub struct ToricRate {
    pub x: Vec<Q>,
    pub rate: f64,
    pub fitted: f64,
}

impl ToricRate {
    pub fn relative_error(&self) -> f64 {
        (self.fitted - self.rate).abs() / self.rate
    }
}

pub fn toric_rates(fan: &Fan, seed: u64, count: usize) -> Result<Vec<ToricRate>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed_for(seed, 0x70));
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < count && tries < 200 * count {
        tries += 1;
        let x: Vec<Q> = (0..fan.dim).map(|_| Q::from_integer(rng.random_range(-5i64..=5).into())).collect();
        if !fan.support.contains(&x) || out.iter().any(|r: &ToricRate| r.x == x) {
            continue;
        }
        let lim = fan.chart_limit(&x)?;
        let Some(rate) = lim.rate.as_ref().map(q_to_f64) else { continue };
        let cone = fan.find_cone(&x).expect("chart_limit found a cone");
        let vals: Vec<f64> = fan.chart(cone).iter().map(|p| q_to_f64(&sphct_core::rational::dot(p, &x))).collect();
        let grid: Vec<f64> = (0..16).map(|k| k as f64 * 12.0 / (15.0 * rate)).collect();
        let points: Vec<Vec<f64>> = grid.iter().map(|s| vals.iter().map(|v| (s * v).exp()).collect()).collect();
        let limit: Vec<f64> = vals.iter().map(|&v| if v < 0.0 { 0.0 } else { 1.0 }).collect();
        let fit = fit_rate(&DecayFamily::new("toric", grid, points, limit)?)?;
        out.push(ToricRate { x, rate, fitted: fit.epsilon });
    }
    Ok(out)
}

/// Adds the toric-rate comparison to a stage.
pub fn record_toric_rates(report: &mut StageReport, label: &str, rates: &[ToricRate]) {
    let worst = rates.iter().map(ToricRate::relative_error).fold(0.0, f64::max);
    report.push(CheckRecord::le(&format!("{label}: toric rate vs fitted rate (relative)"), "toric_limit/fit_rate", worst, TORIC_TOL));
    report.data[format!("{label}_toric_rates")] = json!(rates
        .iter()
        .map(|r| json!({"x": r.x.iter().map(|c| c.to_string()).collect::<Vec<_>>(), "rate": r.rate, "fitted": num(r.fitted)}))
        .collect::<Vec<_>>());
}
