//! The five subcommands. Each reads a [`RunConfig`], writes its files under
//! the output directory and returns a one-line summary.

use std::path::{Path, PathBuf};

use opdiff_core::asymptotics::{
    arcsine_distance, ellipse_points, interlacing_check, nth_root_diagnostic, ratio_diagnostic,
    zero_accumulation_report,
};
use opdiff_core::family::COEFF_CAP;
use opdiff_core::flow::{build_flow, Grid};
use opdiff_core::theta::{primitive, recurrence_residual, structure_identity_check, theta_coeffs};
use opdiff_core::{Complex64, QFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{AppError, AppResult};
use crate::output::{self, pair, pairs, Diag};

/// Points sampled on the ellipse through `ζ_n`.
const ELLIPSE_POINTS: usize = 256;
/// Random evaluation points per degree in the consistency check.
const EVAL_SAMPLES: usize = 8;

pub struct Outcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
}

pub fn family(cfg: &RunConfig) -> AppResult<QFamily> {
    let measure = cfg.measure.validate()?;
    let mut f = QFamily::build(measure, cfg.zeta_seq(), cfg.n_max)?;
    if let Some(fault) = cfg.fault {
        f.corrupt_b(fault.n, fault.k, fault.delta);
    }
    Ok(f)
}

/// Highest degree with a monomial coefficient table.
fn coeff_limit(f: &QFamily) -> usize {
    f.n_max().min(COEFF_CAP)
}

fn prepare(cfg: &RunConfig) -> AppResult<(QFamily, PathBuf)> {
    let f = family(cfg)?;
    output::ensure_dir(&cfg.output_dir)?;
    Ok((f, cfg.output_dir.clone()))
}

fn file(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn measure_json(cfg: &RunConfig) -> Value {
    serde_json::to_value(&cfg.measure).expect("measure serializes")
}

pub fn build(cfg: &RunConfig) -> AppResult<Outcome> {
    let (f, dir) = prepare(cfg)?;
    let cap = coeff_limit(&f);
    let mut records = Vec::with_capacity(f.n_max());
    for n in 1..=f.n_max() {
        let at = |e| AppError::at(n, e);
        let zeta = f.zeta(n).map_err(at)?;
        let b = f.connection_coeffs(n).map_err(at)?.to_vec();
        let (qhat, q, ode) = if n <= cap {
            let qh = f.qhat(n).map_err(at)?;
            let q = f.q(n).map_err(at)?;
            let ode = if n > f.m() { Some(f.ode_residual(n).map_err(at)?) } else { None };
            (json!(qh.coeffs()), json!(pairs(q.coeffs())), ode)
        } else {
            (Value::Null, Value::Null, None)
        };
        let orth = if n > f.m() { Some(f.orthogonality_residual(n).map_err(at)?.0) } else { None };
        records.push(json!({
            "n": n,
            "lambda": f.lambda(n),
            "zeta": pair(zeta),
            "b": b,
            "qhat_coeffs": qhat,
            "q_coeffs": q,
            "residuals": {"ode": ode, "orth": orth},
        }));
    }
    let doc = json!({
        "measure": measure_json(cfg),
        "n_max": f.n_max(),
        "coefficient_cap": cap,
        "zeta_warnings": f.zeta_warnings(),
        "records": records,
    });
    let path = output::write_json(&file(&dir, "records.json"), &doc)?;
    Ok(Outcome { summary: format!("built {} records", f.n_max()), files: vec![path] })
}

/// Accumulates rows for one named check.
struct Check {
    name: &'static str,
    tol: f64,
    rows: Vec<Diag>,
    failures: usize,
    note: Option<String>,
}

impl Check {
    fn new(name: &'static str, tol: f64) -> Self {
        Check { name, tol, rows: Vec::new(), failures: 0, note: None }
    }

    /// Records `value` against `target` and counts a failure unless `ok`.
    fn push(&mut self, n: usize, quantity: &str, value: f64, target: f64, ok: bool) {
        self.rows.push(Diag::new(n, quantity, value, target));
        if !ok {
            self.failures += 1;
        }
    }

    /// Passes when `value ≤ tol`.
    fn small(&mut self, n: usize, value: f64) {
        let ok = value <= self.tol;
        self.push(n, self.name, value, 0.0, ok);
    }

    fn worst(&self) -> f64 {
        self.rows.iter().map(|r| r.abs_error).fold(0.0, f64::max)
    }
}

fn ode_check(f: &QFamily, tol: f64) -> AppResult<Check> {
    let mut c = Check::new("ode", tol);
    for n in f.m() + 1..=coeff_limit(f) {
        c.small(n, f.ode_residual(n).map_err(|e| AppError::at(n, e))?);
    }
    Ok(c)
}

fn orthogonality_check(f: &QFamily, tol: f64) -> AppResult<Check> {
    let mut c = Check::new("orthogonality", tol);
    for n in f.m() + 1..=f.n_max() {
        c.small(n, f.orthogonality_residual(n).map_err(|e| AppError::at(n, e))?.0);
    }
    Ok(c)
}

fn tail_check(f: &QFamily, tol: f64) -> AppResult<Check> {
    let mut c = Check::new("b_tail", tol);
    for n in 1..=f.n_max() {
        c.small(n, f.b_tail(n).map_err(|e| AppError::at(n, e))?);
    }
    Ok(c)
}

/// `|⟨L_n, 1⟩_{α,β}| / √(τ_0 l_n)` vanishes for `n > m` and not at `n = m`.
fn existence_check(f: &QFamily, tol: f64) -> AppResult<Check> {
    let mut c = Check::new("existence_flip", tol);
    for n in f.m().max(1)..=f.n_max() {
        let (_, v) = f.existence_check(n).map_err(|e| AppError::at(n, e))?;
        let r = v.abs() / (f.tau(0) * f.l_norm(n)).sqrt();
        if n == f.m() {
            c.push(n, "existence_at_m", r, 0.0, r > tol);
        } else {
            c.push(n, "existence", r, 0.0, r <= tol);
        }
    }
    Ok(c)
}

fn recurrence_check(f: &QFamily, tol: f64) -> AppResult<Check> {
    let mut c = Check::new("recurrence", tol);
    let r = primitive(f);
    for n in 2 * f.m() + 2..=coeff_limit(f) {
        let at = |e| AppError::at(n, e);
        let t = theta_coeffs(f, n, &r).map_err(at)?;
        c.small(n, recurrence_residual(f, &t).map_err(at)?);
    }
    Ok(c)
}

fn structure_check(f: &QFamily, tol: f64) -> AppResult<Check> {
    let mut c = Check::new("structure_window", tol);
    for n in f.m() + 2..=f.n_max() {
        c.small(n, structure_identity_check(f, n).map_err(|e| AppError::at(n, e))?.window_residual);
    }
    Ok(c)
}

fn interlacing_rows(f: &QFamily, tol: f64) -> Check {
    let mut c = Check::new("interlacing", tol);
    if f.m() != 1 {
        c.note = Some("skipped: only m = 1 is covered".into());
        return c;
    }
    for n in 2..=coeff_limit(f) {
        match interlacing_check(f, n) {
            Ok(r) => {
                let ok = r.max_imag <= tol && r.inside && r.interlaced;
                c.push(n, "interlacing_imag", r.max_imag, 0.0, ok);
            }
            Err(e) => {
                c.push(n, "interlacing_imag", f64::NAN, 0.0, false);
                c.note.get_or_insert_with(|| format!("n = {n}: {e}"));
            }
        }
    }
    c
}

/// `|Q_n(ζ_n)|` relative to `|Q̂_n(ζ_n)|`, from values.
fn zeta_check(f: &QFamily, tol: f64) -> AppResult<Check> {
    let mut c = Check::new("zeta_root", tol);
    for n in 1..=f.n_max() {
        let at = |e| AppError::at(n, e);
        let z = f.zeta(n).map_err(at)?;
        let q = f.q_eval(n, z).map_err(at)?;
        let h = f.qhat_eval(n, z).map_err(at)?;
        let scale = h.v[0].norm().max(f64::MIN_POSITIVE);
        c.small(n, q.v[0].norm() / scale * (q.ln_scale - h.ln_scale).exp());
    }
    Ok(c)
}

/// Coefficient evaluation against recurrence values at seeded random points in
/// `[-2, 2]²`, relative to `Σ |c_k| |z|^k`.
fn evaluation_check(f: &QFamily, tol: f64, seed: u64) -> AppResult<Check> {
    let mut c = Check::new("evaluation", tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 1..=coeff_limit(f) {
        let at = |e| AppError::at(n, e);
        let q = f.q(n).map_err(at)?;
        let mut worst = 0.0f64;
        for _ in 0..EVAL_SAMPLES {
            let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let s = f.q_eval(n, z).map_err(at)?;
            let value = s.value();
            let scale: f64 = q.coeffs().iter().rev().fold(0.0, |acc, a| acc * z.norm() + a.norm());
            worst = worst.max((q.evaluate(z) - value).norm() / scale);
        }
        c.small(n, worst);
    }
    Ok(c)
}

pub fn verify(cfg: &RunConfig) -> AppResult<Outcome> {
    let (f, dir) = prepare(cfg)?;
    let t = &cfg.tolerances;
    let checks = vec![
        ode_check(&f, t.ode)?,
        orthogonality_check(&f, t.orthogonality)?,
        tail_check(&f, t.b_tail)?,
        existence_check(&f, t.existence)?,
        recurrence_check(&f, t.recurrence)?,
        structure_check(&f, t.structure_window)?,
        interlacing_rows(&f, t.interlacing_imag),
        zeta_check(&f, t.zeta_root)?,
        evaluation_check(&f, t.evaluation, cfg.seed)?,
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| c.failures > 0).map(|c| c.name).collect();
    let summary: Vec<Value> = checks
        .iter()
        .map(|c| {
            json!({
                "check": c.name,
                "tolerance": c.tol,
                "rows": c.rows.len(),
                "failures": c.failures,
                "worst": c.worst(),
                "pass": c.failures == 0,
                "note": c.note,
            })
        })
        .collect();
    let doc = json!({
        "measure": measure_json(cfg),
        "n_max": f.n_max(),
        "seed": cfg.seed,
        "pass": failed.is_empty(),
        "checks": summary,
    });
    let rows: Vec<Diag> = checks.into_iter().flat_map(|c| c.rows).collect();
    let files = vec![
        output::write_json(&file(&dir, "verify.json"), &doc)?,
        output::write_diagnostics(&file(&dir, "verify.csv"), &rows)?,
    ];
    if failed.is_empty() {
        Ok(Outcome { summary: "all checks passed".into(), files })
    } else {
        Err(AppError::CheckFailed(format!("failed checks: {}", failed.join(", "))))
    }
}

fn check_degrees(f: &QFamily, ns: &[usize]) -> AppResult<()> {
    match ns.iter().find(|&&n| n == 0 || n > f.n_max()) {
        Some(n) => Err(AppError::Usage(format!("degree {n} is outside 1..={}", f.n_max()))),
        None => Ok(()),
    }
}

fn z_tag(z: Complex64) -> String {
    format!("{}{:+}i", output::num(z.re), z.im)
}

pub fn asymptotics(cfg: &RunConfig, points: &[Complex64], ns: &[usize]) -> AppResult<Outcome> {
    let (f, dir) = prepare(cfg)?;
    check_degrees(&f, ns)?;
    let mut rows = Vec::new();
    let mut per_point = Vec::new();
    for &z in points {
        let tag = z_tag(z);
        let ratios = ratio_diagnostic(&f, ns, z)?;
        let roots = nth_root_diagnostic(&f, ns, z)?;
        let mut ratio_json = Vec::new();
        for r in &ratios {
            let name = r.kind.name();
            for (part, v, t) in [("re", r.value.re, r.target.re), ("im", r.value.im, r.target.im)] {
                rows.push(Diag::new(r.n, format!("{name}.{part}@{tag}"), v, t));
            }
            for (part, v, t) in [("re", r.value.re, r.monic_target.re), ("im", r.value.im, r.monic_target.im)] {
                rows.push(Diag::new(r.n, format!("{name}_monic.{part}@{tag}"), v, t));
            }
            ratio_json.push(json!({
                "n": r.n,
                "kind": name,
                "value": pair(r.value),
                "target": pair(r.target),
                "error": r.error,
                "monic_target": pair(r.monic_target),
                "monic_error": r.monic_error,
                "region_mismatch": r.region_mismatch,
            }));
        }
        let mut root_json = Vec::new();
        for r in &roots {
            rows.push(Diag::new(r.n, format!("nth_root@{tag}"), r.value, r.target));
            root_json.push(json!({"n": r.n, "value": r.value, "target": r.target, "error": r.error}));
        }
        per_point.push(json!({"z": pair(z), "ratios": ratio_json, "nth_root": root_json}));
    }
    let doc = json!({"measure": measure_json(cfg), "n": ns, "points": per_point});
    let files = vec![
        output::write_json(&file(&dir, "asymptotics.json"), &doc)?,
        output::write_diagnostics(&file(&dir, "asymptotics.csv"), &rows)?,
    ];
    Ok(Outcome { summary: format!("{} diagnostic rows", rows.len()), files })
}

pub fn zeros(cfg: &RunConfig, n: usize) -> AppResult<Outcome> {
    let (f, dir) = prepare(cfg)?;
    check_degrees(&f, &[n])?;
    let r = zero_accumulation_report(&f, n, cfg.band).map_err(|e| AppError::at(n, e))?;
    let ellipse = ellipse_points(r.geometry.zeta, ELLIPSE_POINTS)?;
    let classes: Vec<&str> = r.classes.iter().map(|c| c.name()).collect();
    let doc = json!({
        "measure": measure_json(cfg),
        "n": n,
        "zeta": pair(r.geometry.zeta),
        "eta": r.geometry.eta,
        "delta": r.geometry.delta,
        "big_delta": r.geometry.big_delta,
        "band": r.band,
        "near_interval": r.near_interval,
        "near_ellipse": r.near_ellipse,
        "stray": r.stray,
        "max_abs": r.max_abs,
        "bound": r.bound,
        "min_gap": r.min_gap,
        "max_distance": r.max_distance,
        "root_residual": r.root_residual,
        "arcsine_distance": arcsine_distance(&r.zeros),
    });
    let files = vec![
        output::write_json(&file(&dir, "zeros.json"), &doc)?,
        output::write_zeros(&file(&dir, "zeros.csv"), &r.zeros, &classes)?,
        output::write_table(&file(&dir, "ellipse.csv"), &["re", "im"], ellipse.iter().map(|p| vec![Some(p.re), Some(p.im)]))?,
    ];
    Ok(Outcome {
        summary: format!("n = {n}: {} near ellipse, {} near interval, {} stray", r.near_ellipse, r.near_interval, r.stray),
        files,
    })
}

pub fn flow(cfg: &RunConfig, n: usize, exploratory: bool) -> AppResult<Outcome> {
    let (f, dir) = prepare(cfg)?;
    check_degrees(&f, &[n])?;
    let fl = build_flow(&f, n, exploratory).map_err(|e| AppError::at(n, e))?;
    let grid: Grid = cfg.grid.into();
    let samples = fl.sample_field(&f, &grid).map_err(|e| AppError::at(n, e))?;
    let far = fl.far_field_strength(&f, 1e6, 16).map_err(|e| AppError::at(n, e))?;
    let interlacing = fl.interlacing.as_ref().map(|r| {
        json!({
            "asserted": r.asserted,
            "holds": r.holds(),
            "max_imag": r.max_imag,
            "min_separation": r.min_separation,
        })
    });
    let stagnation_speed: Vec<Value> = fl
        .stagnation
        .iter()
        .map(|&x| fl.velocity(&f, x).ok().map_or(Value::Null, |v| json!(v.norm())))
        .collect();
    let doc = json!({
        "measure": measure_json(cfg),
        "n": n,
        "exploratory": fl.exploratory,
        "lambda": fl.lambda,
        "strength_plus_one": fl.a,
        "strength_minus_one": fl.b,
        "total_strength": fl.total_strength(),
        "far_field_strength": pair(far),
        "sources": pairs(&fl.sources),
        "source_residual": fl.source_residual,
        "stagnation": pairs(&fl.stagnation),
        "stagnation_speed": stagnation_speed,
        "extra_stagnation": pairs(&fl.extra_stagnation),
        "interlacing": interlacing,
        "grid": cfg.grid,
        "null_samples": samples.iter().filter(|s| s.v.is_none()).count(),
    });
    let files = vec![
        output::write_json(&file(&dir, "flow.json"), &doc)?,
        output::write_field(&file(&dir, "field.csv"), &samples)?,
    ];
    Ok(Outcome { summary: format!("n = {n}: {} sources, {} grid points", fl.sources.len(), samples.len()), files })
}
