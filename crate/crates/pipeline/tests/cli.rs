use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn sphct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphct")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("sphct-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("report on stdout")
}

fn stage<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["stages"].as_array().unwrap().iter().find(|s| s["stage"] == name).expect("stage present")
}

#[test]
fn report_is_byte_identical_across_runs() {
    let dir = scratch("determinism");
    let mut files = Vec::new();
    for k in 0..2 {
        let out = dir.join(k.to_string());
        let o = sphct(&["report", "--example", "sl2_so2", "--stages", "analyze,degenerate,fan,envalg,cterm", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let mut names: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        files.push(names.iter().map(|n| (n.clone(), std::fs::read(out.join(n)).unwrap())).collect::<Vec<_>>());
    }
    assert!(files[0].iter().any(|(n, _)| n == "report.json"));
    assert_eq!(files[0], files[1]);
}

#[test]
fn whole_algebra_as_subgroup_has_no_roots() {
    let dir = scratch("custom");
    let input = dir.join("whole.json");
    std::fs::write(
        &input,
        r#"{"name": "whole", "algebra": "sl2", "h": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "a": [[1, 0, 0]], "chamber": [1, 0, 0]}"#,
    )
    .unwrap();
    let o = sphct(&["degenerate", "--input", input.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    assert_eq!(r["example"], "whole");
    assert_eq!(stage(&r, "analyze")["data"]["spherical_roots"], serde_json::json!([]));
    assert_eq!(stage(&r, "degenerate")["pass"], true);
}

#[test]
fn compact_pair_has_a_single_cone_fan() {
    let o = sphct(&["fan", "--example", "sl2_so2"]);
    assert!(o.status.success());
    let r = stdout_json(&o);
    let fan = &stage(&r, "fan")["data"]["a_Z^-_fan"];
    assert_eq!(fan["rays"], serde_json::json!([["-1"]]));
    assert_eq!(fan["cones"].as_array().unwrap().len(), 1);
}

#[test]
fn exit_codes() {
    assert_eq!(sphct(&["analyze", "--example", "torus"]).status.code(), Some(0));
    assert_eq!(sphct(&["analyze", "--example", "nonesuch"]).status.code(), Some(2));
    assert_eq!(sphct(&["verify", "--stages", "bogus"]).status.code(), Some(2));
    let dir = scratch("bad-input");
    let input = dir.join("bad.json");
    std::fs::write(&input, r#"{"algebra": "sl2", "h": [[1, 0]], "chamber": [1, 0, 0]}"#).unwrap();
    assert_eq!(sphct(&["analyze", "--input", input.to_str().unwrap()]).status.code(), Some(2));
    // a huge vanishing threshold declares the spherical function square integrable
    let o = sphct(&["verify", "--example", "sl2_so2", "--stages", "cterm", "--tol", "1e9"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_file_sets_stages_and_example() {
    let dir = scratch("config");
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, "# analysis only\nexample = sl2xsl2_diag\nstages = analyze\nseed = 7\n").unwrap();
    let o = sphct(&["verify", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    assert_eq!(r["example"], "sl2xsl2_diag");
    assert_eq!(r["stages"].as_array().unwrap().len(), 1);
    assert_eq!(r["config"]["seed"], 7);

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(sphct(&["verify", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
