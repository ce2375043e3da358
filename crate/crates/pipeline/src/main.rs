use clap::{Args, Parser, Subcommand};
use sphct::error::{PipelineError, Result};
use sphct::examples::{Example, BUILTINS};
use sphct::report::RunReport;
use sphct::run::{parse_stages, run, Config};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Structure, degenerations and constant terms of real spherical pairs.
#[derive(Parser)]
#[command(name = "sphct", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spherical roots, ρ_Q and the compression cone
    Analyze(Opts),
    /// Boundary degenerations h_I and their consistency checks
    Degenerate(Opts),
    /// Simplicial fan of the compression cone
    Fan(Opts),
    /// Constant term of the built-in eigenfunction
    Cterm(Opts),
    /// Run stages (all by default) and exit nonzero on any failed check
    Verify(Opts),
    /// Run stages (all by default) and write report.json and CSV files
    Report(Opts),
}

#[derive(Args, Clone)]
struct Opts {
    /// example description in JSON
    #[arg(long, conflicts_with = "example")]
    input: Option<PathBuf>,
    /// built-in example, or `all`
    #[arg(long)]
    example: Option<String>,
    /// comma-separated stages, or `all`
    #[arg(long)]
    stages: Option<String>,
    /// output directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    degree_cap: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// key = value configuration file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

fn load(opts: &Opts, default_stages: &str, default_out: Option<&str>) -> Result<(Vec<Example>, Vec<String>, Config, Option<PathBuf>)> {
    let mut cfg = Config::default();
    let mut from_file = Vec::new();
    if let Some(p) = &opts.config {
        from_file = cfg.parse(&std::fs::read_to_string(p)?)?;
    }
    let file = |k: &str| from_file.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone());
    if let Some(t) = opts.tol {
        cfg.tol = t;
    }
    if let Some(d) = opts.degree_cap {
        cfg.degree_cap = d;
    }
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    let stages = parse_stages(&opts.stages.clone().or_else(|| file("stages")).unwrap_or_else(|| default_stages.into()))?;
    let input = opts.input.clone().or_else(|| file("input").map(PathBuf::from));
    let examples = if let Some(p) = input {
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p)?)?;
        vec![Example::from_json(&v)?]
    } else {
        let name = opts.example.clone().or_else(|| file("example")).unwrap_or_else(|| "sl2_so2".into());
        if name == "all" {
            BUILTINS.iter().map(|n| Example::builtin(n).expect("registered")).collect()
        } else {
            vec![Example::builtin(&name).ok_or_else(|| PipelineError::Usage(format!("unknown example {name}; built-ins: {}", BUILTINS.join(", "))))?]
        }
    };
    let out = opts.out.clone().or_else(|| file("out").map(PathBuf::from)).or_else(|| default_out.map(PathBuf::from));
    Ok((examples, stages, cfg, out))
}

fn execute(opts: &Opts, default_stages: &str, default_out: Option<&str>) -> Result<bool> {
    let (examples, stages, cfg, out) = load(opts, default_stages, default_out)?;
    let reports: Vec<RunReport> = std::thread::scope(|s| {
        let handles: Vec<_> = examples.iter().map(|ex| s.spawn(|| run(ex, &stages, &cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("stage thread panicked")).collect()
    });
    let many = reports.len() > 1;
    for r in &reports {
        eprintln!("== {}", r.example);
        eprint!("{}", r.summary());
        if let Some(dir) = &out {
            let dir: PathBuf = if many { dir.join(&r.example) } else { dir.clone() };
            r.write(Path::new(&dir))?;
            eprintln!("wrote {}", dir.join("report.json").display());
        } else {
            println!("{}", serde_json::to_string_pretty(&r.to_json())?);
        }
    }
    Ok(reports.iter().all(RunReport::pass))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Analyze(o) => execute(o, "analyze", None),
        Command::Degenerate(o) => execute(o, "analyze,degenerate", None),
        Command::Fan(o) => execute(o, "fan", None),
        Command::Cterm(o) => execute(o, "cterm", None),
        Command::Verify(o) => execute(o, "all", None),
        Command::Report(o) => execute(o, "all", Some("out")),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
