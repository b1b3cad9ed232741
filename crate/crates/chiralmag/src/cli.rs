//! Command-line frontend: flat key/value configuration with flag overrides,
//! run manifests, and the analysis / simulation commands.
//!
//! Every run writes a manifest echoing all resolved parameters (defaults and
//! the seed included). A manifest is itself a valid configuration file, so
//! re-running with `--config <manifest>` reproduces the outputs bit-exactly.

use crate::branch::compute_nu2;
use crate::error::{Error, Result};
use crate::field::ModelParams;
use crate::flow::{run, SolverConfig, Termination};
use crate::io;
use crate::lattice::LatticeSpec;
use crate::linear::{bifurcation_point, build_mode, resonance_report, RootSign, Symmetry};
use crate::stability::{admissible_region, stability_verdict, Verdict};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "chiralmag",
    version,
    about = "Bifurcation analysis and gradient-flow simulation for planar chiral magnets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Bifurcation points, amplitudes, resonance status and branch coefficients
    Bifurcate(AnalysisArgs),
    /// Build the kernel modes and write field dumps and images
    Modes(AnalysisArgs),
    /// Spectral stability verdict for a lattice and symmetry class
    Stability(AnalysisArgs),
    /// Run the gradient flow from a random initial field
    Simulate(SimulateArgs),
    /// Run simulations over lists of kappa and beta values
    Sweep(SimulateArgs),
    /// Classify the pattern stored in a checkpoint
    Classify(ClassifyArgs),
    /// Rasterize stability verdicts over a (kappa, beta) grid
    #[command(name = "phase-diagram")]
    PhaseDiagram(AnalysisArgs),
}

#[derive(Args, Clone, Default)]
pub struct AnalysisArgs {
    /// Flat `key = value` configuration file; flags override file values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// DMI strength kappa > 0
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Easy-plane anisotropy beta >= 0
    #[arg(long)]
    pub beta: Option<f64>,
    /// Quartic Landau coefficient alpha > 0
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Named lattice shape: square | hexagonal
    #[arg(long)]
    pub lattice: Option<String>,
    /// Lattice shape modulus |tau| >= 1
    #[arg(long)]
    pub tau_abs: Option<f64>,
    /// Lattice shape angle in degrees
    #[arg(long)]
    pub theta_deg: Option<f64>,
    /// Symmetry class: sigma1 | sigma2 | sigma3
    #[arg(long)]
    pub symmetry: Option<String>,
    /// Grid size (odd)
    #[arg(long)]
    pub n: Option<usize>,
    /// Offset in lambda = lambda0 + delta * nu2
    #[arg(long)]
    pub delta: Option<f64>,
    /// Grid bounds for phase-diagram scans
    #[arg(long)]
    pub kappa_min: Option<f64>,
    #[arg(long)]
    pub kappa_max: Option<f64>,
    #[arg(long)]
    pub kappa_steps: Option<usize>,
    #[arg(long)]
    pub beta_min: Option<f64>,
    #[arg(long)]
    pub beta_max: Option<f64>,
    #[arg(long)]
    pub beta_steps: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: AnalysisArgs,
    /// Quadratic Landau coefficient: a number, or auto[:delta]
    #[arg(long)]
    pub lambda: Option<String>,
    /// Time increment
    #[arg(long)]
    pub dt: Option<f64>,
    /// Fixed-point stopping tolerance (sup norm)
    #[arg(long)]
    pub fp_tol: Option<f64>,
    /// Energy-slope termination tolerance
    #[arg(long)]
    pub grad_tol: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub fp_max_iters: Option<usize>,
    /// RNG seed for the initial field
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest modulus of the random initial field
    #[arg(long)]
    pub init_modulus_max: Option<f64>,
    /// Comma-separated kappa values (sweep)
    #[arg(long)]
    pub kappa_list: Option<String>,
    /// Comma-separated beta values (sweep)
    #[arg(long)]
    pub beta_list: Option<String>,
}

#[derive(Args, Clone)]
pub struct ClassifyArgs {
    /// Checkpoint file to classify
    pub checkpoint: PathBuf,
    #[command(flatten)]
    pub common: AnalysisArgs,
}

/// Resolved key/value settings: defaults, overlaid by the config file,
/// overlaid by command-line flags. The final map is the manifest.
#[derive(Debug, Clone, Default)]
struct Settings {
    map: BTreeMap<String, String>,
}

impl Settings {
    fn load(config: &Option<PathBuf>) -> Result<Self> {
        let mut s = Settings::default();
        if let Some(path) = config {
            let text = fs::read_to_string(path)?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    Error::Parse(format!(
                        "{}:{}: expected `key = value`",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                s.map.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(s)
    }

    fn flag(&mut self, key: &str, value: Option<impl Display>) {
        if let Some(v) = value {
            self.map.insert(key.to_string(), v.to_string());
        }
    }

    fn ensure(&mut self, key: &str, value: impl Display) {
        self.map.entry(key.to_string()).or_insert_with(|| value.to_string());
    }

    fn set(&mut self, key: &str, value: impl Display) {
        self.map.insert(key.to_string(), value.to_string());
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Parse(format!("missing required parameter `{key}`")))
    }

    fn f64(&self, key: &str) -> Result<f64> {
        self.required(key)?
            .parse()
            .map_err(|_| Error::Parse(format!("`{key}` is not a number")))
    }

    fn usize(&self, key: &str) -> Result<usize> {
        self.required(key)?
            .parse()
            .map_err(|_| Error::Parse(format!("`{key}` is not an integer")))
    }

    fn u64(&self, key: &str) -> Result<u64> {
        self.required(key)?
            .parse()
            .map_err(|_| Error::Parse(format!("`{key}` is not an integer")))
    }
}

fn overlay_analysis(s: &mut Settings, a: &AnalysisArgs) {
    s.flag("kappa", a.kappa);
    s.flag("beta", a.beta);
    s.flag("alpha", a.alpha);
    s.flag("lattice", a.lattice.clone());
    s.flag("tau_abs", a.tau_abs);
    s.flag("theta_deg", a.theta_deg);
    s.flag("symmetry", a.symmetry.clone());
    s.flag("n", a.n);
    s.flag("delta", a.delta);
    s.flag("kappa_min", a.kappa_min);
    s.flag("kappa_max", a.kappa_max);
    s.flag("kappa_steps", a.kappa_steps);
    s.flag("beta_min", a.beta_min);
    s.flag("beta_max", a.beta_max);
    s.flag("beta_steps", a.beta_steps);
    s.flag("out", a.out.as_ref().map(|p| p.display()));
}

fn overlay_simulate(s: &mut Settings, a: &SimulateArgs) {
    overlay_analysis(s, &a.common);
    s.flag("lambda", a.lambda.clone());
    s.flag("dt", a.dt);
    s.flag("fp_tol", a.fp_tol);
    s.flag("grad_tol", a.grad_tol);
    s.flag("max_steps", a.max_steps);
    s.flag("fp_max_iters", a.fp_max_iters);
    s.flag("seed", a.seed);
    s.flag("init_modulus_max", a.init_modulus_max);
    s.flag("kappa_list", a.kappa_list.clone());
    s.flag("beta_list", a.beta_list.clone());
}

/// Fills in tau_abs/theta_deg from a named lattice and defaults, so the
/// manifest always carries the numeric shape.
fn resolve_lattice(s: &mut Settings) -> Result<LatticeSpec> {
    if let Some(name) = s.get("lattice").map(|v| v.to_string()) {
        let (tau, theta) = match name.as_str() {
            "square" => (1.0, 90.0),
            "hexagonal" | "hex" => (1.0, 60.0),
            other => {
                return Err(Error::Parse(format!(
                    "unknown lattice `{other}` (expected square or hexagonal)"
                )))
            }
        };
        s.ensure("tau_abs", tau);
        s.ensure("theta_deg", theta);
    }
    s.ensure("tau_abs", 1.0);
    s.ensure("theta_deg", 90.0);
    let spec = LatticeSpec::new(s.f64("tau_abs")?, s.f64("theta_deg")?.to_radians())?;
    Ok(spec)
}

fn resolve_symmetry(s: &mut Settings, spec: &LatticeSpec) -> Result<Symmetry> {
    let tag = spec.classify().tag;
    let sym = match s.get("symmetry") {
        None => {
            let sym = Symmetry::richest_for(tag);
            s.set("symmetry", symmetry_key(sym));
            sym
        }
        Some(name) => match name {
            "sigma1" | "helical" => Symmetry::Sigma1Helical,
            "sigma2" | "vortex" => Symmetry::Sigma2Vortex,
            "sigma3" | "skyrmion" => Symmetry::Sigma3Skyrmion,
            other => {
                return Err(Error::Parse(format!(
                    "unknown symmetry `{other}` (expected sigma1, sigma2 or sigma3)"
                )))
            }
        },
    };
    Ok(sym)
}

fn symmetry_key(sym: Symmetry) -> &'static str {
    match sym {
        Symmetry::Sigma1Helical => "sigma1",
        Symmetry::Sigma2Vortex => "sigma2",
        Symmetry::Sigma3Skyrmion => "sigma3",
    }
}

fn resolve_model(s: &mut Settings, lambda: f64) -> Result<ModelParams> {
    s.ensure("beta", 0.0);
    s.ensure("alpha", 1.0);
    ModelParams::new(s.f64("kappa")?, lambda, s.f64("alpha")?, s.f64("beta")?)
}

/// Resolves `lambda`: an explicit number, or `auto[:delta]` meaning
/// `lambda0 + delta * nu2` with the chosen symmetry's branch curvature.
fn resolve_lambda(s: &mut Settings, spec: &LatticeSpec, sym: Symmetry) -> Result<f64> {
    s.ensure("delta", 0.01);
    s.ensure("lambda", "auto");
    let raw = s.required("lambda")?.to_string();
    let lambda = if let Some(rest) = raw.strip_prefix("auto") {
        let delta = match rest.strip_prefix(':') {
            Some(d) => d
                .parse()
                .map_err(|_| Error::Parse(format!("bad delta in `lambda = {raw}`")))?,
            None if rest.is_empty() => s.f64("delta")?,
            _ => return Err(Error::Parse(format!("bad lambda spec `{raw}`"))),
        };
        s.set("delta", delta);
        let p0 = resolve_model(s, 0.0)?;
        let bp = bifurcation_point(&p0, RootSign::Plus);
        // nu2 is a pure quadrature of the kernel mode; a small grid is exact.
        let mode = build_mode(&bp, spec, sym, 27)?;
        let nu2 = compute_nu2(&mode, &p0);
        s.set("nu2", nu2);
        bp.lambda0 + delta * nu2
    } else {
        raw.parse()
            .map_err(|_| Error::Parse(format!("`lambda = {raw}` is not a number or auto[:delta]")))?
    };
    s.set("lambda", lambda);
    Ok(lambda)
}

fn resolve_solver(s: &mut Settings) -> Result<SolverConfig> {
    let d = SolverConfig::default();
    s.ensure("n", d.n);
    s.ensure("dt", d.dt);
    s.ensure("fp_tol", d.fp_tol);
    s.ensure("grad_tol", d.grad_tol);
    s.ensure("max_steps", d.max_steps);
    s.ensure("fp_max_iters", d.fp_max_iters);
    s.ensure("seed", d.seed);
    s.ensure("init_modulus_max", d.init_modulus_max);
    let cfg = SolverConfig {
        n: s.usize("n")?,
        dt: s.f64("dt")?,
        fp_tol: s.f64("fp_tol")?,
        grad_tol: s.f64("grad_tol")?,
        max_steps: s.usize("max_steps")?,
        fp_max_iters: s.usize("fp_max_iters")?,
        seed: s.u64("seed")?,
        init_modulus_max: s.f64("init_modulus_max")?,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(s: &mut Settings) -> Result<PathBuf> {
    s.ensure("out", "chiralmag-out");
    let dir = PathBuf::from(s.required("out")?);
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_manifest(
    dir: &Path,
    command: &str,
    s: &Settings,
    results: &[(&str, String)],
) -> Result<()> {
    let mut text = String::from("# chiralmag run manifest\n");
    text.push_str(&format!("command = {command}\n"));
    for (k, v) in &s.map {
        text.push_str(&format!("{k} = {v}\n"));
    }
    for (k, v) in results {
        text.push_str(&format!("# result: {k} = {v}\n"));
    }
    fs::write(dir.join("manifest.txt"), text)?;
    Ok(())
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn cmd_bifurcate(args: &AnalysisArgs) -> Result<()> {
    let mut s = Settings::load(&args.config)?;
    overlay_analysis(&mut s, args);
    let spec = resolve_lattice(&mut s)?;
    s.ensure("n", 81);
    s.ensure("delta", 0.01);
    let n = s.usize("n")?;
    let delta = s.f64("delta")?;
    let p = resolve_model(&mut s, 0.0)?;
    let dir = out_dir(&mut s)?;

    let class = spec.classify();
    let plus = bifurcation_point(&p, RootSign::Plus);
    let minus = bifurcation_point(&p, RootSign::Minus);
    let report = resonance_report(&plus, &p, &spec);

    println!("lattice: {} (holohedry {})", class.tag, class.holohedry);
    println!("kernel dimension: {}", class.kernel_dim());
    println!("lambda0_plus  = {}", plus.lambda0);
    println!("lambda0_minus = {}", minus.lambda0);
    println!("amplitude_A_plus = {}", plus.amplitude_a);
    println!(
        "resonant = {} (margin {:.3e}{})",
        report.resonant,
        report.margin,
        if report.near_resonant { ", near-resonant" } else { "" }
    );
    if let Some(deg) = report.constant_mode {
        println!("note: constant-mode degeneracy: {deg:?}");
    }
    if plus.lambda0 <= 0.0 {
        println!("warning: lambda0 (plus root) is not positive; bifurcation branches there are unstable");
    }
    if report.near_resonant {
        println!("warning: parameters sit within {:.0e} of a resonance", crate::linear::NEAR_RESONANCE_BAND);
    }

    let mut csv = String::from(
        "kappa,beta,alpha,tau_abs,theta_deg,root,symmetry,lambda0,amplitude_a,kernel_dim,resonant,nu2,delta,lambda_delta\n",
    );
    let base = format!(
        "{},{},{},{},{}",
        fmt17(p.kappa),
        fmt17(p.beta),
        fmt17(p.alpha),
        fmt17(spec.tau_abs()),
        fmt17(spec.theta().to_degrees()),
    );
    for sym in [
        Symmetry::Sigma1Helical,
        Symmetry::Sigma2Vortex,
        Symmetry::Sigma3Skyrmion,
    ] {
        if !sym.compatible_with(class.tag) {
            continue;
        }
        let mode = build_mode(&plus, &spec, sym, n)?;
        let nu2 = compute_nu2(&mode, &p);
        let lambda_delta = plus.lambda0 + delta * nu2;
        println!(
            "{}: nu2 = {nu2}, lambda({delta}) = {lambda_delta}",
            symmetry_key(sym)
        );
        csv.push_str(&format!(
            "{base},plus,{},{},{},{},{},{},{},{}\n",
            symmetry_key(sym),
            fmt17(plus.lambda0),
            fmt17(plus.amplitude_a),
            class.kernel_dim(),
            report.resonant,
            fmt17(nu2),
            fmt17(delta),
            fmt17(lambda_delta),
        ));
    }
    csv.push_str(&format!(
        "{base},minus,,{},{},{},,,,\n",
        fmt17(minus.lambda0),
        fmt17(minus.amplitude_a),
        class.kernel_dim(),
    ));
    fs::write(dir.join("bifurcate.csv"), csv)?;
    write_manifest(
        &dir,
        "bifurcate",
        &s,
        &[("lambda0_plus", plus.lambda0.to_string())],
    )?;
    Ok(())
}

fn cmd_modes(args: &AnalysisArgs) -> Result<()> {
    let mut s = Settings::load(&args.config)?;
    overlay_analysis(&mut s, args);
    let spec = resolve_lattice(&mut s)?;
    s.ensure("n", 81);
    let n = s.usize("n")?;
    let p = resolve_model(&mut s, 0.0)?;
    let dir = out_dir(&mut s)?;
    let class = spec.classify();
    let plus = bifurcation_point(&p, RootSign::Plus);

    let selected: Vec<Symmetry> = match s.get("symmetry") {
        Some(_) => vec![resolve_symmetry(&mut s, &spec)?],
        None => [
            Symmetry::Sigma1Helical,
            Symmetry::Sigma2Vortex,
            Symmetry::Sigma3Skyrmion,
        ]
        .into_iter()
        .filter(|sym| sym.compatible_with(class.tag))
        .collect(),
    };

    let mut csv = String::from("symmetry,n,mean_square,min_modulus,wave_vectors\n");
    for sym in selected {
        let mode = build_mode(&plus, &spec, sym, n)?;
        let key = symmetry_key(sym);
        io::write_field_csv(&dir.join(format!("mode_{key}.csv")), &mode.field, &spec)?;
        io::write_field_ppm(&dir.join(format!("mode_{key}.ppm")), &mode.field)?;
        let min_modulus = mode
            .field
            .values()
            .iter()
            .map(|m| (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt())
            .fold(f64::INFINITY, f64::min);
        let ks: Vec<String> = mode
            .wave_vectors
            .iter()
            .map(|w| format!("({} {})", w.k[0], w.k[1]))
            .collect();
        println!(
            "{key}: <|phi|^2> = {}, min |phi| = {min_modulus}, waves {}",
            mode.field.mean_square(),
            ks.join(" ")
        );
        csv.push_str(&format!(
            "{key},{n},{},{},{}\n",
            fmt17(mode.field.mean_square()),
            fmt17(min_modulus),
            ks.join(" ")
        ));
    }
    fs::write(dir.join("modes.csv"), csv)?;
    write_manifest(&dir, "modes", &s, &[])?;
    Ok(())
}

fn cmd_stability(args: &AnalysisArgs) -> Result<()> {
    let mut s = Settings::load(&args.config)?;
    overlay_analysis(&mut s, args);
    let spec = resolve_lattice(&mut s)?;
    let sym = resolve_symmetry(&mut s, &spec)?;
    let p = resolve_model(&mut s, 0.0)?;
    let dir = out_dir(&mut s)?;

    let report = stability_verdict(&p, &spec, sym)?;
    println!("symmetry: {sym}");
    println!("lambda0 = {} (positive: {})", report.lambda0, report.lambda0_positive);
    println!("gap condition: {}", report.gap_condition);
    println!("mu_min nonnegative: {}", report.mu_min_nonneg);
    println!("threshold beta = {}", report.threshold_beta);
    println!("c_tilde = {}", report.c_tilde);
    println!("hex witness = {}", report.hex_witness);
    println!("worst mode: {}", report.worst_mode);
    println!("verdict: {}", report.verdict);

    let mut csv = String::from(
        "kappa,beta,alpha,tau_abs,theta_deg,symmetry,lambda0,lambda0_positive,gap_condition,mu_min_nonneg,threshold_beta,c_tilde,hex_witness,verdict,worst_mode\n",
    );
    csv.push_str(&format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        fmt17(p.kappa),
        fmt17(p.beta),
        fmt17(p.alpha),
        fmt17(spec.tau_abs()),
        fmt17(spec.theta().to_degrees()),
        symmetry_key(sym),
        fmt17(report.lambda0),
        report.lambda0_positive,
        report.gap_condition,
        report.mu_min_nonneg,
        fmt17(report.threshold_beta),
        fmt17(report.c_tilde),
        fmt17(report.hex_witness),
        report.verdict,
        report.worst_mode,
    ));
    fs::write(dir.join("stability.csv"), csv)?;
    write_manifest(&dir, "stability", &s, &[("verdict", report.verdict.to_string())])?;
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let mut s = Settings::load(&args.common.config)?;
    overlay_simulate(&mut s, args);
    let spec = resolve_lattice(&mut s)?;
    let sym = resolve_symmetry(&mut s, &spec)?;
    let lambda = resolve_lambda(&mut s, &spec, sym)?;
    let p = resolve_model(&mut s, lambda)?;
    let cfg = resolve_solver(&mut s)?;
    let dir = out_dir(&mut s)?;

    let result = run(&p, &spec, &cfg, None)?;
    io::write_energy_trace(&dir.join("energy_trace.csv"), &result.energy_trace)?;
    io::write_field_csv(&dir.join("final_field.csv"), &result.final_field, &spec)?;
    io::write_field_ppm(&dir.join("final_field.ppm"), &result.final_field)?;
    io::write_checkpoint(&dir.join("final_field.cmgf"), &result.final_field, &p)?;

    let final_energy = result.energy_trace.last().map(|e| e.energy).unwrap_or(0.0);
    println!("lambda = {lambda}");
    println!("steps = {} ({})", result.steps_taken, result.termination);
    println!("final energy = {final_energy}");
    println!("classification = {}", result.classification);
    for (wv, amp) in &result.dominant_modes {
        println!("  mode k=({},{}) |v|={:.6} amplitude={:.6e}", wv.k[0], wv.k[1], wv.norm, amp);
    }
    write_manifest(
        &dir,
        "simulate",
        &s,
        &[
            ("classification", result.classification.to_string()),
            ("termination", result.termination.to_string()),
            ("steps", result.steps_taken.to_string()),
            ("final_energy", final_energy.to_string()),
        ],
    )?;
    if result.termination == Termination::FixedPointFailure {
        return Err(Error::FixedPointFailure {
            max_iters: cfg.fp_max_iters,
        });
    }
    Ok(())
}

fn parse_list(raw: &str, key: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number `{tok}` in `{key}`")))
        })
        .collect()
}

fn cmd_sweep(args: &SimulateArgs) -> Result<()> {
    let mut s = Settings::load(&args.common.config)?;
    overlay_simulate(&mut s, args);
    let spec = resolve_lattice(&mut s)?;
    let sym = resolve_symmetry(&mut s, &spec)?;
    s.ensure("lambda", "auto");
    s.ensure("delta", 0.01);
    let lambda_rule = s.required("lambda")?.to_string();
    let kappas = parse_list(s.required("kappa_list")?, "kappa_list")?;
    let betas = parse_list(s.required("beta_list")?, "beta_list")?;
    let cfg = resolve_solver(&mut s)?;
    s.ensure("alpha", 1.0);
    let alpha = s.f64("alpha")?;
    let delta = s.f64("delta")?;
    let dir = out_dir(&mut s)?;

    let points: Vec<(f64, f64)> = kappas
        .iter()
        .flat_map(|&k| betas.iter().map(move |&b| (k, b)))
        .collect();

    let rows: Vec<String> = points
        .par_iter()
        .map(|&(kappa, beta)| {
            let row = sweep_point(kappa, beta, alpha, delta, &lambda_rule, &spec, sym, &cfg);
            match row {
                Ok(r) => r,
                Err(e) => format!(
                    "{},{},,,,,,,,\"error: {}\"",
                    fmt17(kappa),
                    fmt17(beta),
                    e
                ),
            }
        })
        .collect();

    let mut csv =
        String::from("kappa,beta,lambda0,nu2,lambda,steps,termination,classification,energy,status\n");
    for r in &rows {
        csv.push_str(r);
        csv.push('\n');
    }
    fs::write(dir.join("sweep.csv"), csv)?;
    println!("sweep: {} points -> {}", points.len(), dir.join("sweep.csv").display());
    write_manifest(&dir, "sweep", &s, &[("points", points.len().to_string())])?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sweep_point(
    kappa: f64,
    beta: f64,
    alpha: f64,
    delta: f64,
    lambda_rule: &str,
    spec: &LatticeSpec,
    sym: Symmetry,
    cfg: &SolverConfig,
) -> Result<String> {
    let p0 = ModelParams::new(kappa, 0.0, alpha, beta)?;
    let bp = bifurcation_point(&p0, RootSign::Plus);
    let mode = build_mode(&bp, spec, sym, 27)?;
    let nu2 = compute_nu2(&mode, &p0);
    let lambda = if lambda_rule.starts_with("auto") {
        let d = lambda_rule.strip_prefix("auto:").map_or(Ok(delta), |v| {
            v.parse()
                .map_err(|_| Error::Parse(format!("bad delta `{v}`")))
        })?;
        bp.lambda0 + d * nu2
    } else {
        lambda_rule
            .parse()
            .map_err(|_| Error::Parse(format!("bad lambda `{lambda_rule}`")))?
    };
    let p = p0.with_lambda(lambda);
    let result = run(&p, spec, cfg, None)?;
    let energy = result.energy_trace.last().map(|e| e.energy).unwrap_or(0.0);
    Ok(format!(
        "{},{},{},{},{},{},{},{},{},ok",
        fmt17(kappa),
        fmt17(beta),
        fmt17(bp.lambda0),
        fmt17(nu2),
        fmt17(lambda),
        result.steps_taken,
        result.termination,
        result.classification,
        fmt17(energy),
    ))
}

fn cmd_classify(args: &ClassifyArgs) -> Result<()> {
    let mut s = Settings::load(&args.common.config)?;
    overlay_analysis(&mut s, &args.common);
    s.set("checkpoint", args.checkpoint.display());
    let spec = resolve_lattice(&mut s)?;
    let dir = out_dir(&mut s)?;

    let (field, p) = io::read_checkpoint(&args.checkpoint)?;
    let (pattern, modes) = crate::flow::classify_pattern(&field, &spec);
    println!("n = {}, kappa = {}, lambda = {}, alpha = {}, beta = {}", field.n(), p.kappa, p.lambda, p.alpha, p.beta);
    println!("classification = {pattern}");
    for (wv, amp) in &modes {
        println!("  mode k=({},{}) |v|={:.6} amplitude={:.6e}", wv.k[0], wv.k[1], wv.norm, amp);
    }

    let mut csv = String::from("checkpoint,n,kappa,lambda,alpha,beta,classification,dominant_pairs\n");
    csv.push_str(&format!(
        "{},{},{},{},{},{},{pattern},{}\n",
        args.checkpoint.display(),
        field.n(),
        fmt17(p.kappa),
        fmt17(p.lambda),
        fmt17(p.alpha),
        fmt17(p.beta),
        modes.len(),
    ));
    fs::write(dir.join("classify.csv"), csv)?;
    write_manifest(&dir, "classify", &s, &[("classification", pattern.to_string())])?;
    Ok(())
}

fn cmd_phase_diagram(args: &AnalysisArgs) -> Result<()> {
    let mut s = Settings::load(&args.config)?;
    overlay_analysis(&mut s, args);
    s.ensure("kappa_min", 0.2);
    s.ensure("kappa_max", 2.0);
    s.ensure("kappa_steps", 37);
    s.ensure("beta_min", 0.0);
    s.ensure("beta_max", 8.0);
    s.ensure("beta_steps", 41);
    s.ensure("alpha", 1.0);
    let (k0, k1, nk) = (s.f64("kappa_min")?, s.f64("kappa_max")?, s.usize("kappa_steps")?);
    let (b0, b1, nb) = (s.f64("beta_min")?, s.f64("beta_max")?, s.usize("beta_steps")?);
    let alpha = s.f64("alpha")?;
    if nk < 2 || nb < 2 {
        return Err(Error::Parse("grid needs at least 2 steps per axis".into()));
    }
    let dir = out_dir(&mut s)?;

    // The diagram concerns the vortex-antivortex branch on the square lattice.
    let spec = LatticeSpec::square();
    let points: Vec<(f64, f64)> = (0..nk)
        .flat_map(|i| {
            let kappa = k0 + (k1 - k0) * i as f64 / (nk - 1) as f64;
            (0..nb).map(move |j| (kappa, b0 + (b1 - b0) * j as f64 / (nb - 1) as f64))
        })
        .collect();
    let rows: Vec<String> = points
        .par_iter()
        .map(|&(kappa, beta)| {
            let p = ModelParams::new(kappa, 0.0, alpha, beta).expect("grid params valid");
            let report = stability_verdict(&p, &spec, Symmetry::Sigma2Vortex)
                .expect("sigma2 is valid on the square lattice");
            debug_assert_eq!(
                report.verdict == Verdict::Stable,
                admissible_region(kappa, beta),
                "verdict and admissible region disagree at ({kappa}, {beta})"
            );
            format!(
                "{},{},{},{},{}",
                fmt17(kappa),
                fmt17(beta),
                fmt17(report.lambda0),
                fmt17(report.c_tilde),
                report.verdict
            )
        })
        .collect();

    let mut csv = String::from("kappa,beta,lambda0,c_tilde,verdict\n");
    for r in &rows {
        csv.push_str(r);
        csv.push('\n');
    }
    fs::write(dir.join("phase_diagram.csv"), csv)?;
    println!(
        "phase diagram: {} points -> {}",
        points.len(),
        dir.join("phase_diagram.csv").display()
    );
    write_manifest(&dir, "phase-diagram", &s, &[("points", points.len().to_string())])?;
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Bifurcate(a) => cmd_bifurcate(a),
        Command::Modes(a) => cmd_modes(a),
        Command::Stability(a) => cmd_stability(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Classify(a) => cmd_classify(a),
        Command::PhaseDiagram(a) => cmd_phase_diagram(a),
    }
}

/// Entry point for the `chiralmag` binary. Exit codes: 0 success, 2 usage or
/// validation error, 3 solver failure.
pub fn main() -> ExitCode {
    if let Ok(v) = std::env::var("CHIRALMAG_THREADS") {
        if let Ok(threads) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::FixedPointFailure { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
