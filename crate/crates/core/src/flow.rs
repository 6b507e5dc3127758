//! Potential flow generated by unit sources at the critical points of `Q_n`
//! and sources of strengths `a = α + 1`, `b = β + 1` at `+1` and `−1`.
//!
//! The complex potential is
//!
//! ```text
//! Υ(z) = a log(z − 1) + b log(z + 1) + Σ log(z − w_i)
//! ```
//!
//! and its derivative, the conjugate velocity, equals
//!
//! ```text
//! 𝒱(z) = ℒ[Q_n](z) / ((1 − z²) Q_n'(z)) = λ_n L_n(z) / ((1 − z²) Q_n'(z)),
//! ```
//!
//! so the stagnation points are the zeros of `L_n`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::asymptotics::{interlacing_check, InterlacingReport};
use crate::family::QFamily;
use crate::jacobi::{apply_l, apply_l_at};
use crate::{Error, Result};

/// Distance below which [`FlowField::velocity`] reports a pole.
pub const POLE_GUARD: f64 = 1e-12;

/// Distance below which grid points are emitted without a value.
pub const GRID_GUARD: f64 = 1e-9;

/// Sources, stagnation points and strengths for one `n`.
#[derive(Debug, Clone)]
pub struct FlowField {
    pub n: usize,
    /// Strength of the source at `+1`.
    pub a: f64,
    /// Strength of the source at `−1`.
    pub b: f64,
    pub lambda: f64,
    /// Critical points of `Q_n`.
    pub sources: Vec<Complex64>,
    pub source_residual: f64,
    /// Zeros of `L_n`.
    pub stagnation: Vec<Complex64>,
    /// Zeros of `ℒ[Q_n]` that are not zeros of `L_n`. Empty whenever the
    /// ODE holds; kept as a report.
    pub extra_stagnation: Vec<Complex64>,
    pub interlacing: Option<InterlacingReport>,
    pub exploratory: bool,
}

/// Builds the flow for `n ≥ 2`. Only `m = 1` is covered by theory; other
/// `m` need `exploratory`.
pub fn build_flow(fam: &QFamily, n: usize, exploratory: bool) -> Result<FlowField> {
    if n < 2 {
        return Err(Error::NotApplicable("flow needs n >= 2"));
    }
    if fam.m() != 1 && !exploratory {
        return Err(Error::NotApplicable("flow model is stated for m = 1; use exploratory mode"));
    }
    let params = fam.measure().params();
    let src = fam.dq_roots(n)?;
    let stag = fam.l_roots(n)?;
    let extra = match fam.qhat(n) {
        Ok(q) => {
            let num = apply_l(&q, params);
            let rs = num.roots(1e-8)?;
            rs.roots
                .into_iter()
                .filter(|z| stag.roots.iter().all(|s| (z - s).norm() > 1e-6 * (1.0 + s.norm())))
                .collect()
        }
        Err(_) => Vec::new(),
    };
    let interlacing = match interlacing_check(fam, n) {
        Ok(r) => Some(r),
        Err(Error::NotApplicable(_)) if exploratory => None,
        Err(e) => return Err(e),
    };
    Ok(FlowField {
        n,
        a: params.alpha() + 1.0,
        b: params.beta() + 1.0,
        lambda: fam.lambda(n),
        source_residual: src.residual,
        sources: src.roots,
        stagnation: stag.roots,
        extra_stagnation: extra,
        interlacing,
        exploratory,
    })
}

impl FlowField {
    fn guard(&self, z: Complex64, radius: f64) -> Option<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        [one, -one].into_iter().chain(self.sources.iter().copied()).find(|p| (z - p).norm() <= radius)
    }

    /// `(λ_n L_n / ((1 − z²) Q_n'), ℒ[Q_n] / ((1 − z²) Q_n'))` at `z`.
    pub fn velocity_forms(&self, fam: &QFamily, z: Complex64) -> Result<(Complex64, Complex64)> {
        if let Some(p) = self.guard(z, POLE_GUARD) {
            return Err(Error::PoleAt { re: p.re, im: p.im });
        }
        let q = fam.qhat_eval(self.n, z)?;
        let l = fam.l_eval(self.n, z)?;
        let den = (Complex64::new(1.0, 0.0) - z * z) * q.v[1];
        let lam = l.v[0] * self.lambda / den * libm::exp(l.ln_scale - q.ln_scale);
        let op = apply_l_at(fam.measure().params(), z, q.v[1], q.v[2]) / den;
        Ok((lam, op))
    }

    /// `𝒱(z)` from the `λ_n L_n` form.
    pub fn velocity(&self, fam: &QFamily, z: Complex64) -> Result<Complex64> {
        Ok(self.velocity_forms(fam, z)?.0)
    }

    /// `𝒱` directly from the source layout,
    /// `a/(z − 1) + b/(z + 1) + Σ 1/(z − w_i)`.
    pub fn velocity_from_sources(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        (z - one).inv() * self.a + (z + one).inv() * self.b + self.sources.iter().map(|w| (z - w).inv()).sum::<Complex64>()
    }

    /// Total source strength `n − 1 + a + b`, the limit of `z 𝒱(z)`.
    pub fn total_strength(&self) -> f64 {
        (self.n - 1) as f64 + self.a + self.b
    }

    /// Far-field coefficient `lim z 𝒱(z)` as the mean of `z 𝒱(z)` over
    /// `points` equispaced points of `|z| = radius`. For a radius beyond all
    /// sources the mean differs from the limit by `O((max|w|/radius)^points)`.
    pub fn far_field_strength(&self, fam: &QFamily, radius: f64, points: usize) -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..points {
            let z = Complex64::from_polar(radius, core::f64::consts::TAU * (j as f64 + 0.5) / points as f64);
            s += z * self.velocity(fam, z)?;
        }
        Ok(s / points as f64)
    }

    /// Samples `𝒱` on a grid, row-major (imaginary part outer, real part
    /// inner). Points within [`GRID_GUARD`] of a pole carry `None`.
    pub fn sample_field(&self, fam: &QFamily, grid: &Grid) -> Result<Vec<FieldSample>> {
        let mut out = Vec::with_capacity(grid.len());
        for z in grid.points() {
            let v = if self.guard(z, GRID_GUARD).is_some() { None } else { Some(self.velocity(fam, z)?) };
            out.push(FieldSample { z, v });
        }
        Ok(out)
    }
}

/// Rectangle `[re_min, re_max] × [im_min, im_max]` sampled at `nx × ny`
/// equispaced points (endpoints included; a single point sits at the low corner).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        let step = |lo: f64, hi: f64, k: usize, count: usize| {
            if count <= 1 {
                lo
            } else {
                lo + (hi - lo) * k as f64 / (count - 1) as f64
            }
        };
        (0..self.ny).flat_map(move |j| {
            (0..self.nx).map(move |i| {
                Complex64::new(step(self.re_min, self.re_max, i, self.nx), step(self.im_min, self.im_max, j, self.ny))
            })
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub z: Complex64,
    pub v: Option<Complex64>,
}
