//! Command implementations. Each command turns a resolved [`RunConfig`]
//! into a JSON summary plus named files; [`execute`] prints or stores them.

use std::fs;
use std::path::Path;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use realshadow_core::entropy::{metric_entropy, plane_metric_entropy, topological_entropy, EntropyEstimate, Method};
use realshadow_core::measure::{
    brolin_sample, default_test_functions, invariance_discrepancy, pushforward_shadow, shadow_invariance_discrepancy,
    DEFAULT_BURN_IN,
};
use realshadow_core::mirrors::{estimate_n, find_mirrors, green_level_diagnostic, mirror_breaks, mirror_sweep, MirrorSet};
use realshadow_core::orbits::{default_escape_radius, iterate, shadow};
use realshadow_core::potential::{external_ray, green, Boettcher, GREEN_BUDGET};
use realshadow_core::{Complex, Error, ExceptionalKind, Polynomial, DEFAULT_TOL};

use crate::config::{sha256_hex, FileEntry, RunConfig, RunManifest, StoredConfig};
use crate::csv;
use crate::error::CliError;
use crate::format::to_json;
use crate::parse::{parse_point, parse_polynomial, parse_viewport};
use crate::raster;

const DEFAULT_EPS: [f64; 5] = [1.0, 0.5, 0.25, 0.125, 0.0625];
const DEFAULT_SEED: u64 = 1;
const N_SAMPLE_SIZE: usize = 200;
const N_DEPTH_CAP: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "realshadow", version, about = "Real-part shadows of complex polynomial dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub flags: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Exceptional / non-exceptional verdict with residuals.
    Classify,
    /// Forward orbit of --z as CSV.
    Orbit,
    /// Shadow vector of --z with --depth N.
    Shadow,
    /// Green function, Böttcher coordinate and ray angle at --z.
    Green,
    /// External ray of angle --theta.
    Ray,
    /// Brolin measure sample; with --depth also its shadows.
    Sample,
    /// Mirrors of --z, or a sweep from --z to --to.
    Mirrors,
    /// Depth at which mirrors stabilize.
    EstimateN,
    /// Entropy estimate (--metric, --top or --plane).
    Entropy,
    /// PGM/PPM raster of --field green, escape or mirrors.
    Render,
    /// Full run: classification, sample, shadows, both entropies, invariance.
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Orbit => "orbit",
            Command::Shadow => "shadow",
            Command::Green => "green",
            Command::Ray => "ray",
            Command::Sample => "sample",
            Command::Mirrors => "mirrors",
            Command::EstimateN => "estimate-n",
            Command::Entropy => "entropy",
            Command::Render => "render",
            Command::Report => "report",
        }
    }
}

/// What a command produced: a summary and the files it would store.
/// `primary` names the file printed instead of the summary when there is
/// no output directory.
pub struct Output {
    pub summary: Value,
    pub files: Vec<(String, Vec<u8>)>,
    pub primary: Option<usize>,
    pub binary: bool,
}

impl Output {
    fn summary(summary: Value) -> Self {
        Output { summary, files: Vec::new(), primary: None, binary: false }
    }

    fn file(mut self, name: &str, bytes: Vec<u8>) -> Self {
        self.files.push((name.to_string(), bytes));
        self
    }

    fn with_primary(mut self) -> Self {
        self.primary = Some(self.files.len() - 1);
        self
    }
}

fn c2(z: Complex) -> Value {
    json!([z.re, z.im])
}

fn table(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut out = Vec::new();
    f(&mut out).expect("writing to memory cannot fail");
    out
}

fn usage(msg: &str) -> CliError {
    CliError::Usage(msg.to_string())
}

/// Resolved view of the flags with command defaults.
struct Params<'a>(&'a RunConfig);

impl Params<'_> {
    fn poly(&self) -> Result<Polynomial, CliError> {
        let text = self.0.poly.as_deref().ok_or_else(|| usage("missing --poly"))?;
        Ok(parse_polynomial(text)?)
    }

    fn point(&self) -> Result<Complex, CliError> {
        Ok(parse_point(self.0.z.as_deref().ok_or_else(|| usage("missing --z"))?)?)
    }

    fn seed(&self) -> u64 {
        self.0.seed.unwrap_or(DEFAULT_SEED)
    }

    fn tol(&self) -> Result<f64, CliError> {
        match self.0.tol {
            Some(t) if !(t >= 0.0 && t.is_finite()) => Err(usage("--tol must be a finite non-negative number")),
            t => Ok(t.unwrap_or(DEFAULT_TOL)),
        }
    }

    fn burn_in(&self) -> usize {
        self.0.burn_in.unwrap_or(DEFAULT_BURN_IN)
    }

    fn eps(&self) -> Vec<f64> {
        self.0.eps.clone().unwrap_or_else(|| DEFAULT_EPS.to_vec())
    }

    /// `--depth`, or `max(estimate_n, 2)`.
    fn shadow_depth(&self, p: &Polynomial) -> Result<usize, CliError> {
        match self.0.depth {
            Some(d) => Ok(d),
            None => Ok(estimate_n(p, N_SAMPLE_SIZE, N_DEPTH_CAP, self.tol()?, self.seed())?.n.max(2)),
        }
    }
}

fn classify(f: &RunConfig) -> Result<Output, CliError> {
    let p = Params(f).poly()?;
    let tol = Params(f).tol()?;
    let k = p.classify(tol)?;
    let kind = match k.kind {
        ExceptionalKind::NonExceptional => "NonExceptional",
        ExceptionalKind::StronglyExceptional => "StronglyExceptional",
        ExceptionalKind::WeaklyExceptional => "WeaklyExceptional",
    };
    let witnesses: Vec<Value> = k.witnesses.iter().map(|w| json!({ "degree": w.degree, "residual": w.residual })).collect();
    let v = json!({
        "kind": kind,
        "tol": tol,
        "leading_residual": k.leading_residual,
        "line": k.line.map(|x| x + 0.0),
        "witnesses": witnesses,
    });
    Ok(Output::summary(v.clone()).file("classification.json", to_json(&v)))
}

fn orbit(f: &RunConfig) -> Result<Output, CliError> {
    let p = Params(f).poly()?;
    let radius = f.radius.unwrap_or_else(|| default_escape_radius(&p));
    let o = iterate(&p, Params(f).point()?, f.n_max.unwrap_or(100), radius)?;
    let v = json!({ "steps": o.points.len() - 1, "escaped": o.escaped, "escape_index": o.escape_index, "radius": radius });
    Ok(Output::summary(v).file("orbit.csv", table(|w| csv::write_orbit(w, &o))).with_primary())
}

fn shadow_cmd(f: &RunConfig) -> Result<Output, CliError> {
    let p = Params(f).poly()?;
    let s = shadow(&p, Params(f).point()?, f.depth.unwrap_or(3))?;
    let v = json!({ "witness": c2(s.witness), "xs": s.xs });
    Ok(Output::summary(v).file("shadow.csv", table(|w| csv::write_shadow(w, &s))).with_primary())
}

fn green_cmd(f: &RunConfig) -> Result<Output, CliError> {
    let p = Params(f).poly()?;
    let z = Params(f).point()?;
    let g = green(&p, z, f.n_max.unwrap_or(GREEN_BUDGET))?;
    let b = Boettcher::new(&p)?;
    let (phi, angle) = if b.contains(z) { (Some(c2(b.phi(z)?)), Some(b.ray_angle(z)?)) } else { (None, None) };
    let v = json!({
        "z": c2(z),
        "g": g.g,
        "iterations_used": g.iterations_used,
        "converged": g.converged,
        "boettcher": phi,
        "ray_angle": angle,
        "domain_level": b.level(),
    });
    Ok(Output::summary(v.clone()).file("green.json", to_json(&v)))
}

fn ray(f: &RunConfig) -> Result<Output, CliError> {
    let p = Params(f).poly()?;
    let theta = f.theta.ok_or_else(|| usage("missing --theta"))?;
    let pts = external_ray(&p, theta, f.g_from.unwrap_or(2.0), f.g_to.unwrap_or(0.01), f.steps.unwrap_or(100))?;
    let v = json!({ "theta": theta, "points": pts.len() });
    Ok(Output::summary(v).file("ray.csv", table(|w| csv::write_ray(w, &pts))).with_primary())
}

fn sample(f: &RunConfig) -> Result<Output, CliError> {
    let ps = Params(f);
    let p = ps.poly()?;
    let count = f.count.unwrap_or(10_000);
    let s = brolin_sample(&p, count, ps.burn_in(), ps.seed())?;
    let side = json!({
        "polynomial": p.coeffs().iter().map(|&a| c2(a)).collect::<Vec<_>>(),
        "polynomial_hash": format!("{:016x}", s.polynomial_hash),
        "seed": s.seed,
        "burn_in": s.burn_in,
        "count": s.len(),
        "depth": f.depth,
    });
    let mut out = Output::summary(side.clone()).file("sample.csv", table(|w| csv::write_sample(w, &s.points))).with_primary();
    if let Some(depth) = f.depth {
        let sh = pushforward_shadow(&p, &s, depth)?;
        out = out.file("shadow_sample.csv", table(|w| csv::write_shadow_sample(w, &sh)));
    }
    Ok(out.file("sample.json", to_json(&side)))
}

fn mirror_json(p: &Polynomial, m: &MirrorSet, n_max: usize) -> Result<Value, CliError> {
    let breaks = m
        .mirrors
        .iter()
        .map(|&w| Ok(mirror_breaks(p, m.base, w, n_max, m.tol)?.break_index))
        .collect::<Result<Vec<_>, Error>>()?;
    let diag = match green_level_diagnostic(p, m) {
        Ok(v) => Some(v),
        Err(Error::NotEscaping) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(json!({
        "base": c2(m.base),
        "mirrors": m.mirrors.iter().map(|&w| c2(w)).collect::<Vec<_>>(),
        "depth_verified": m.depth_verified,
        "tol": m.tol,
        "break_indices": breaks,
        "green_diagnostic": diag,
    }))
}

fn mirrors(f: &RunConfig) -> Result<Output, CliError> {
    let ps = Params(f);
    let p = ps.poly()?;
    let z = ps.point()?;
    let (depth, tol) = (f.depth.unwrap_or(10), ps.tol()?);
    let n_max = f.n_max.unwrap_or(20);
    let Some(to) = f.to.as_deref() else {
        let v = mirror_json(&p, &find_mirrors(&p, z, depth, tol)?, n_max)?;
        return Ok(Output::summary(v.clone()).file("mirrors.json", to_json(&v)));
    };
    let to = parse_point(to)?;
    let samples = f.samples.unwrap_or(64);
    if samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let results = mirror_sweep(&p, z, to, samples, depth, tol);
    let bases: Vec<Complex> = (0..samples)
        .map(|k| z + (to - z) * if samples > 1 { k as f64 / (samples - 1) as f64 } else { 0.0 })
        .collect();
    let rows: Vec<(Complex, Result<MirrorSet, Error>)> = bases.into_iter().zip(results).collect();
    let found: usize = rows.iter().filter_map(|(_, r)| r.as_ref().ok()).map(|m| m.mirrors.len()).sum();
    let failed = rows.iter().filter(|(_, r)| r.is_err()).count();
    let v = json!({ "from": c2(z), "to": c2(to), "samples": samples, "depth": depth, "mirrors_found": found, "failed_bases": failed });
    Ok(Output::summary(v).file("mirror_curve.csv", table(|w| csv::write_mirror_curve(w, &rows))).with_primary())
}

fn estimate_n_cmd(f: &RunConfig) -> Result<Output, CliError> {
    let ps = Params(f);
    let p = ps.poly()?;
    let (count, cap) = (f.count.unwrap_or(N_SAMPLE_SIZE), f.depth.unwrap_or(N_DEPTH_CAP));
    let e = estimate_n(&p, count, cap, ps.tol()?, ps.seed())?;
    let v = json!({ "n": e.n, "not_stabilized": e.not_stabilized, "skipped": e.skipped, "sample_size": count, "depth_cap": cap });
    Ok(Output::summary(v.clone()).file("estimate_n.json", to_json(&v)))
}

fn entropy_json(e: &EntropyEstimate, params: Value) -> Value {
    json!({
        "method": match e.method { Method::Separated => "separated", Method::BowenBall => "bowen-ball" },
        "value": e.value,
        "fit_slope": e.fit_slope,
        "fit_residual": e.fit_residual,
        "window": e.window,
        "chosen_eps": e.chosen_eps,
        "degenerate": e.degenerate,
        "excluded": e.excluded,
        "parameters": params,
        "table": e.table.iter().map(|r| json!({ "n": r.n, "eps": r.eps, "statistic": r.statistic })).collect::<Vec<_>>(),
    })
}

#[derive(Clone, Copy)]
enum Estimator {
    Metric,
    Top,
    Plane,
}

fn estimator(f: &RunConfig) -> Result<Estimator, CliError> {
    match (f.metric, f.top, f.plane) {
        (_, false, false) => Ok(Estimator::Metric),
        (false, true, false) => Ok(Estimator::Top),
        (false, false, true) => Ok(Estimator::Plane),
        _ => Err(usage("choose one of --metric, --top, --plane")),
    }
}

fn run_entropy(f: &RunConfig, p: &Polynomial, which: Estimator, count: usize) -> Result<(Value, Vec<u8>), CliError> {
    let ps = Params(f);
    let (eps, n_max, seed) = (ps.eps(), f.n_max.unwrap_or(12), ps.seed());
    let bases = f.bases.unwrap_or(200).min(count);
    let s = brolin_sample(p, count, ps.burn_in(), seed)?;
    let depth = ps.shadow_depth(p)?;
    let params = json!({
        "count": count, "burn_in": ps.burn_in(), "seed": seed, "depth": depth,
        "eps": eps, "n_max": n_max, "bases": bases,
    });
    let e = match which {
        Estimator::Metric => metric_entropy(p, &pushforward_shadow(p, &s, depth)?, &eps, n_max, bases, seed)?,
        Estimator::Top => topological_entropy(p, &pushforward_shadow(p, &s, depth)?, &eps, n_max)?,
        Estimator::Plane => plane_metric_entropy(p, &s, &eps, n_max, bases, seed)?,
    };
    Ok((entropy_json(&e, params), table(|w| csv::write_entropy_table(w, &e.table))))
}

fn entropy(f: &RunConfig) -> Result<Output, CliError> {
    let p = Params(f).poly()?;
    let which = estimator(f)?;
    let default_count = if matches!(which, Estimator::Top) { 10_000 } else { 100_000 };
    let (report, rows) = run_entropy(f, &p, which, f.count.unwrap_or(default_count))?;
    Ok(Output::summary(report.clone()).file("entropy.json", to_json(&report)).file("entropy.csv", rows))
}

fn render(f: &RunConfig) -> Result<Output, CliError> {
    let p = Params(f).poly()?;
    let vp = parse_viewport(f.viewport.as_deref().unwrap_or("-2,2,-2,2,400,400"))?;
    let budget = f.n_max.unwrap_or(500);
    let field = f.field.as_deref().unwrap_or("green");
    let (name, bytes) = match field {
        "green" => {
            let g_max = f.g_max.unwrap_or(2.0);
            if !(g_max > 0.0) {
                return Err(usage("--g-max must be positive"));
            }
            ("green.pgm", table(|w| raster::green_field(&p, &vp, budget, g_max).write_pgm(w)))
        }
        "escape" => ("escape.pgm", table(|w| raster::escape_raster(&p, &vp, budget).write_pgm(w))),
        "mirrors" => {
            let ps = Params(f);
            let from = match f.z.as_deref() {
                Some(s) => parse_point(s)?,
                None => Complex::new(vp.x0 + 0.25 * (vp.x1 - vp.x0), vp.y0 + 0.75 * (vp.y1 - vp.y0)),
            };
            let to = match f.to.as_deref() {
                Some(s) => parse_point(s)?,
                None => Complex::new(vp.x0 + 0.75 * (vp.x1 - vp.x0), from.im),
            };
            let sets: Vec<MirrorSet> = mirror_sweep(&p, from, to, f.samples.unwrap_or(64), f.depth.unwrap_or(10), ps.tol()?)
                .into_iter()
                .filter_map(Result::ok)
                .collect();
            ("mirrors.ppm", table(|w| raster::mirror_overlay(&p, &vp, budget, &sets).write_ppm(w)))
        }
        _ => return Err(usage("--field must be green, escape or mirrors")),
    };
    let v = json!({ "field": field, "width": vp.width, "height": vp.height, "file": name });
    let mut out = Output::summary(v).file(name, bytes).with_primary();
    out.binary = true;
    Ok(out)
}

fn report(f: &RunConfig) -> Result<Output, CliError> {
    let ps = Params(f);
    let p = ps.poly()?;
    let verdict = classify(f)?.summary;
    let n = estimate_n(&p, N_SAMPLE_SIZE, N_DEPTH_CAP, ps.tol()?, ps.seed())?;
    let depth = ps.shadow_depth(&p)?;
    let count = f.count.unwrap_or(100_000);
    let s = brolin_sample(&p, count, ps.burn_in(), ps.seed())?;
    let sh = pushforward_shadow(&p, &s, depth)?;
    let fns = default_test_functions(&s.points);
    let invariance = json!({
        "plane": invariance_discrepancy(&p, &s.points, &fns)?,
        "shadow": shadow_invariance_discrepancy(&p, &sh)?,
    });
    let (metric, metric_rows) = run_entropy(f, &p, Estimator::Metric, count)?;
    let (top, top_rows) = run_entropy(f, &p, Estimator::Top, count.min(10_000))?;
    let log_d = (p.degree() as f64).ln();
    let summary = json!({
        "classification": verdict,
        "estimate_n": { "n": n.n, "not_stabilized": n.not_stabilized, "skipped": n.skipped },
        "depth": depth,
        "count": count,
        "log_d": log_d,
        "metric_entropy": metric["value"],
        "topological_entropy": top["value"],
        "invariance_discrepancy": invariance,
    });
    Ok(Output::summary(summary.clone())
        .file("classification.json", to_json(&verdict))
        .file("sample.csv", table(|w| csv::write_sample(w, &s.points)))
        .file("shadow_sample.csv", table(|w| csv::write_shadow_sample(w, &sh)))
        .file("entropy_metric.json", to_json(&metric))
        .file("entropy_metric.csv", metric_rows)
        .file("entropy_top.json", to_json(&top))
        .file("entropy_top.csv", top_rows)
        .file("report.json", to_json(&summary)))
}

/// Runs `command` with `flags` (already merged with any config file).
pub fn run(command: Command, flags: &RunConfig) -> Result<Output, CliError> {
    match command {
        Command::Classify => classify(flags),
        Command::Orbit => orbit(flags),
        Command::Shadow => shadow_cmd(flags),
        Command::Green => green_cmd(flags),
        Command::Ray => ray(flags),
        Command::Sample => sample(flags),
        Command::Mirrors => mirrors(flags),
        Command::EstimateN => estimate_n_cmd(flags),
        Command::Entropy => entropy(flags),
        Command::Render => render(flags),
        Command::Report => report(flags),
    }
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<FileEntry, CliError> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| CliError::io(path.display(), e))?;
    Ok(FileEntry { path: name.to_string(), bytes: bytes.len() as u64, sha256: sha256_hex(bytes) })
}

/// Merges the config file, runs the command, and either stores its files
/// (with `config.json` and `manifest.json`) under `--out` or returns the
/// bytes to print.
pub fn execute(cli: Cli) -> Result<Vec<u8>, CliError> {
    let started = Instant::now();
    let mut inputs = Vec::new();
    let flags = match &cli.flags.config {
        Some(path) => {
            inputs.push(path.display().to_string());
            cli.flags.clone().over(RunConfig::load(path)?)
        }
        None => cli.flags.clone(),
    };
    let command = cli.command;
    if command == Command::Report && flags.out.is_none() {
        return Err(usage("report needs --out"));
    }
    let output = run(command, &flags)?;
    let Some(dir) = flags.out.clone() else {
        if output.binary {
            return Err(usage("render needs --out"));
        }
        return Ok(match output.primary {
            Some(k) => output.files[k].1.clone(),
            None => to_json(&output.summary),
        });
    };
    fs::create_dir_all(&dir).map_err(|e| CliError::io(dir.display(), e))?;
    let stored = StoredConfig { command: command.name().to_string(), flags: RunConfig { config: None, ..flags } };
    let config_bytes = to_json(&stored);
    let mut files = vec![write_file(&dir, "config.json", &config_bytes)?];
    for (name, bytes) in &output.files {
        files.push(write_file(&dir, name, bytes)?);
    }
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.name().to_string(),
        config_digest: sha256_hex(&config_bytes),
        inputs,
        files,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    write_file(&dir, "manifest.json", &to_json(&manifest))?;
    Ok(to_json(&output.summary))
}
