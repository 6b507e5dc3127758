//! Run configuration and the JSON form of a measure.

use std::path::{Path, PathBuf};

use opdiff_core::flow::Grid;
use opdiff_core::{Complex64, JacobiParams, Measure, MeasureSpec, ZetaSeq};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

/// `{alpha, beta, m, rho_lead, rho_roots: [[re, im], …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureJson {
    pub alpha: f64,
    pub beta: f64,
    pub m: usize,
    pub rho_lead: f64,
    #[serde(default)]
    pub rho_roots: Vec<[f64; 2]>,
}

impl MeasureJson {
    pub fn to_spec(&self) -> AppResult<MeasureSpec> {
        if self.m != self.rho_roots.len() {
            return Err(AppError::Usage(format!(
                "measure.m = {} but {} roots of rho are given",
                self.m,
                self.rho_roots.len()
            )));
        }
        let params = JacobiParams::new(self.alpha, self.beta)?;
        let roots = self.rho_roots.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        Ok(MeasureSpec::new(params, self.rho_lead, roots))
    }

    pub fn validate(&self) -> AppResult<Measure> {
        Ok(self.to_spec()?.validate()?)
    }
}

/// `ζ_n` as one point, an explicit list (`ζ_1, ζ_2, …`) or a JSON file holding
/// such a list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ZetaJson {
    Constant([f64; 2]),
    List(Vec<[f64; 2]>),
    File { file: PathBuf },
}

impl Default for ZetaJson {
    fn default() -> Self {
        ZetaJson::Constant([3.5, 0.0])
    }
}

fn to_c(p: &[f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// Checks thresholds; every field can be overridden from the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub ode: f64,
    pub orthogonality: f64,
    pub b_tail: f64,
    pub existence: f64,
    pub zeta_root: f64,
    pub recurrence: f64,
    pub structure_window: f64,
    pub interlacing_imag: f64,
    pub evaluation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode: 1e-8,
            orthogonality: 1e-8,
            b_tail: 1e-9,
            existence: 1e-9,
            zeta_root: 1e-10,
            recurrence: 1e-7,
            structure_window: 1e-8,
            interlacing_imag: 1e-9,
            evaluation: 1e-10,
        }
    }
}

impl Tolerances {
    fn check(&self) -> AppResult<()> {
        let all = [
            ("ode", self.ode),
            ("orthogonality", self.orthogonality),
            ("b_tail", self.b_tail),
            ("existence", self.existence),
            ("zeta_root", self.zeta_root),
            ("recurrence", self.recurrence),
            ("structure_window", self.structure_window),
            ("interlacing_imag", self.interlacing_imag),
            ("evaluation", self.evaluation),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(AppError::Usage(format!("tolerance {name} must be positive (got {v})")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridJson {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Default for GridJson {
    fn default() -> Self {
        GridJson { re_min: -1.5, re_max: 1.5, im_min: -1.0, im_max: 1.0, nx: 50, ny: 50 }
    }
}

impl From<GridJson> for Grid {
    fn from(g: GridJson) -> Grid {
        Grid { re_min: g.re_min, re_max: g.re_max, im_min: g.im_min, im_max: g.im_max, nx: g.nx, ny: g.ny }
    }
}

/// Perturbs one connection coefficient after construction. Used to check that
/// verification notices a damaged family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultJson {
    pub n: usize,
    pub k: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub measure: MeasureJson,
    #[serde(default)]
    pub zeta: ZetaJson,
    pub n_max: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Evaluation points for `asymptotics`.
    #[serde(default)]
    pub z_list: Option<Vec<[f64; 2]>>,
    /// Degrees for `asymptotics`; defaults to doublings from 25 up to `n_max`.
    #[serde(default)]
    pub n_list: Option<Vec<usize>>,
    /// Zero classification band for `zeros`.
    #[serde(default = "default_band")]
    pub band: f64,
    #[serde(default)]
    pub grid: GridJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<FaultJson>,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_band() -> f64 {
    0.15
}

impl RunConfig {
    /// Reads and checks a config file. Relative paths inside it resolve
    /// against the file's directory.
    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| AppError::Read { path: path.to_path_buf(), source })?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| AppError::Usage(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let ZetaJson::File { file } = &cfg.zeta {
            let file = base.join(file);
            let text = std::fs::read_to_string(&file).map_err(|source| AppError::Read { path: file.clone(), source })?;
            let list: Vec<[f64; 2]> = serde_json::from_str(&text)
                .map_err(|e| AppError::Usage(format!("invalid zeta file {}: {e}", file.display())))?;
            cfg.zeta = ZetaJson::List(list);
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> AppResult<()> {
        let m = self.measure.m;
        if self.n_max < m + 1 {
            return Err(AppError::Usage(format!("n_max = {} must be at least m + 1 = {}", self.n_max, m + 1)));
        }
        self.tolerances.check()?;
        match &self.zeta {
            ZetaJson::List(l) if l.len() < self.n_max => {
                return Err(AppError::Usage(format!("zeta list has {} entries, n_max = {}", l.len(), self.n_max)));
            }
            ZetaJson::File { .. } => return Err(AppError::Usage("zeta file was not resolved".into())),
            _ => {}
        }
        if self.band.is_nan() || self.band <= 0.0 {
            return Err(AppError::Usage("band must be positive".into()));
        }
        Ok(())
    }

    pub fn zeta_seq(&self) -> ZetaSeq {
        match &self.zeta {
            ZetaJson::Constant(p) => ZetaSeq::Constant(to_c(p)),
            ZetaJson::List(l) => ZetaSeq::List(l.iter().map(to_c).collect()),
            ZetaJson::File { .. } => unreachable!("resolved in load"),
        }
    }

    pub fn z_points(&self) -> Vec<Complex64> {
        self.z_list.as_ref().map_or_else(|| vec![Complex64::new(5.0, 0.0)], |l| l.iter().map(to_c).collect())
    }

    pub fn degrees(&self) -> Vec<usize> {
        if let Some(l) = &self.n_list {
            return l.clone();
        }
        let mut out = Vec::new();
        let mut n = 25;
        while n <= self.n_max {
            out.push(n);
            n *= 2;
        }
        if out.is_empty() {
            out.push(self.n_max);
        }
        out
    }
}
