//! The map `φ(z) = z + √(z² − 1)`, ellipse geometry, the Szegő factor of ρ
//! and convergence diagnostics for `Q̂_n`, `Q_n` and their zeros.

use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::family::{QFamily, Scaled};
use crate::measure::Measure;
use crate::quadrature::gauss_chebyshev;
use crate::{Error, Result};

/// Points closer than this to `[-1, 1]` are refused by the ratio diagnostics.
pub const CUT_GUARD: f64 = 1e-6;

/// `√(z − 1)·√(z + 1)` with principal roots: the branch of `√(z² − 1)` that
/// behaves like `z` at infinity and is cut along `[-1, 1]`.
pub fn sqrt_z2m1(z: Complex64) -> Complex64 {
    (z - 1.0).sqrt() * (z + 1.0).sqrt()
}

/// `φ(z) = z + √(z² − 1)` with `|φ| > 1` off `[-1, 1]`. On `(−1, 1)` the limit
/// from the upper half-plane `e^{i arccos z}` is returned.
pub fn phi(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re.abs() < 1.0 {
        return Complex64::new(z.re, libm::sqrt(1.0 - z.re * z.re));
    }
    z + sqrt_z2m1(z)
}

/// `inf_{x ∈ [-1,1]} |z − x|`.
pub fn dist_to_interval(z: Complex64) -> f64 {
    let x = z.re.clamp(-1.0, 1.0);
    libm::hypot(z.re - x, z.im)
}

/// Ellipse data attached to a point ζ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub zeta: Complex64,
    /// `η_ζ = ln |φ(ζ)|`.
    pub eta: f64,
    /// Distance from ζ to `[-1, 1]`.
    pub delta: f64,
    /// Largest distance from ζ to a point of `[-1, 1]`.
    pub big_delta: f64,
}

pub fn geometry(zeta: Complex64) -> Geometry {
    Geometry {
        zeta,
        eta: libm::log(phi(zeta).norm()).max(0.0),
        delta: dist_to_interval(zeta),
        big_delta: (zeta - 1.0).norm().max((zeta + 1.0).norm()),
    }
}

/// `count` points `cosh(η_ζ + iθ_j)`, `θ_j = 2πj / count`, on the ellipse
/// with foci `±1` through ζ.
pub fn ellipse_points(zeta: Complex64, count: usize) -> Result<Vec<Complex64>> {
    let g = geometry(zeta);
    if g.eta <= 1e-13 {
        return Err(Error::OnInterval { re: zeta.re, im: zeta.im });
    }
    Ok((0..count)
        .map(|j| Complex64::new(g.eta, 2.0 * PI * j as f64 / count as f64).cosh())
        .collect())
}

/// `Φ(ρ, z) = Π (z − ν_i) / (φ(z) − φ(ν_i))`.
pub fn szego_phi(measure: &Measure, z: Complex64) -> Result<Complex64> {
    if dist_to_interval(z) <= 1e-13 {
        return Err(Error::BranchCut { re: z.re, im: z.im });
    }
    let pz = phi(z);
    Ok(measure
        .rho_roots()
        .iter()
        .map(|&nu| (z - nu) / (pz - phi(nu)))
        .product())
}

/// `φ_m = 2^m exp((1/2π) ∫ log ρ(t) / √(1 − t²) dt)` by Gauss–Chebyshev
/// rules doubled until two successive values agree to `1e-12`.
pub fn phi_m_constant(measure: &Measure) -> Result<f64> {
    let rho = measure.rho();
    let integral = |n: usize| {
        let (nodes, w) = gauss_chebyshev(n);
        w * nodes.iter().map(|&t| libm::log(rho.eval_real(t))).sum::<f64>()
    };
    let mut n = 16;
    let mut prev = integral(n);
    while n < 1 << 20 {
        n *= 2;
        let cur = integral(n);
        if (cur - prev).abs() <= 1e-12 * (1.0 + cur.abs()) {
            return Ok(libm::exp(measure.m() as f64 * LN_2 + cur / (2.0 * PI)));
        }
        prev = cur;
    }
    Err(Error::NonConvergence { what: "Gauss-Chebyshev log-integral", residual: f64::NAN, iterations: n })
}

/// `φ_m` together with the two candidate limits of `Q̂_n / P_n`.
#[derive(Debug, Clone)]
pub struct SzegoData {
    measure: Measure,
    phi_m: f64,
}

impl SzegoData {
    pub fn new(measure: &Measure) -> Result<Self> {
        Ok(SzegoData { phi_m: phi_m_constant(measure)?, measure: measure.clone() })
    }

    pub fn phi_m(&self) -> f64 {
        self.phi_m
    }

    pub fn phi(&self, z: Complex64) -> Result<Complex64> {
        szego_phi(&self.measure, z)
    }

    /// `φ_m² Φ(ρ, z)`.
    pub fn stated_limit(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.phi(z)? * (self.phi_m * self.phi_m))
    }

    /// `2^m Φ(ρ, z) = Π (1 − 1/(φ(z) φ(ν_i)))`, the limit of the ratio of two
    /// monic families. Differs from [`Self::stated_limit`] by the constant
    /// `|r| Π |φ(ν_i)|`.
    pub fn monic_limit(&self, z: Complex64) -> Result<Complex64> {
        if dist_to_interval(z) <= 1e-13 {
            return Err(Error::BranchCut { re: z.re, im: z.im });
        }
        let pz = phi(z);
        let one = Complex64::new(1.0, 0.0);
        Ok(self.measure.rho_roots().iter().map(|&nu| one - (pz * phi(nu)).inv()).product())
    }
}

/// Which ratio a [`RatioRow`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioKind {
    /// `Q̂_n(z) / P_n(z)` off the cut.
    Qhat,
    /// `Q_n(z) / P_n(z)` outside the ellipse through ζ.
    QExterior,
    /// `Q_n(z) / P_n(ζ_n)` inside the ellipse through ζ.
    QInterior,
}

impl RatioKind {
    pub fn name(self) -> &'static str {
        match self {
            RatioKind::Qhat => "qhat_over_p",
            RatioKind::QExterior => "q_over_p",
            RatioKind::QInterior => "q_over_p_zeta",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RatioRow {
    pub n: usize,
    pub kind: RatioKind,
    pub value: Complex64,
    /// `±φ_m² Φ(ρ, ·)`.
    pub target: Complex64,
    pub error: f64,
    /// `±2^m Φ(ρ, ·)`.
    pub monic_target: Complex64,
    pub monic_error: f64,
    /// `z` lies outside the region where this ratio has a limit.
    pub region_mismatch: bool,
}

fn ratio(num: Scaled, den: Scaled) -> Complex64 {
    num.v[0] / den.v[0] * libm::exp(num.ln_scale - den.ln_scale)
}

/// The three ratios at `z` for each `n` of `n_list`, with their distances to
/// both candidate limits.
pub fn ratio_diagnostic(fam: &QFamily, n_list: &[usize], z: Complex64) -> Result<Vec<RatioRow>> {
    if dist_to_interval(z) <= CUT_GUARD {
        return Err(Error::BranchCut { re: z.re, im: z.im });
    }
    let sz = SzegoData::new(fam.measure())?;
    let hat_target = sz.stated_limit(z)?;
    let hat_monic = sz.monic_limit(z)?;
    let lz = libm::log(phi(z).norm());
    let mut rows = Vec::new();
    for &n in n_list {
        let zeta = fam.zeta(n)?;
        let g = geometry(zeta);
        let p = fam.p_eval(n, z)?;
        let qhat = fam.qhat_eval(n, z)?;
        let q = fam.q_eval(n, z)?;
        let v = ratio(qhat, p);
        rows.push(RatioRow {
            n,
            kind: RatioKind::Qhat,
            value: v,
            target: hat_target,
            error: (v - hat_target).norm(),
            monic_target: hat_monic,
            monic_error: (v - hat_monic).norm(),
            region_mismatch: false,
        });
        let v = ratio(q, p);
        rows.push(RatioRow {
            n,
            kind: RatioKind::QExterior,
            value: v,
            target: hat_target,
            error: (v - hat_target).norm(),
            monic_target: hat_monic,
            monic_error: (v - hat_monic).norm(),
            region_mismatch: lz.is_nan() || lz <= g.eta,
        });
        let (t, tm) = if dist_to_interval(zeta) > 1e-13 {
            (-sz.stated_limit(zeta)?, -sz.monic_limit(zeta)?)
        } else {
            (Complex64::new(f64::NAN, 0.0), Complex64::new(f64::NAN, 0.0))
        };
        let v = ratio(q, fam.p_eval(n, zeta)?);
        rows.push(RatioRow {
            n,
            kind: RatioKind::QInterior,
            value: v,
            target: t,
            error: (v - t).norm(),
            monic_target: tm,
            monic_error: (v - tm).norm(),
            region_mismatch: lz.is_nan() || lz >= g.eta,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy)]
pub struct NthRootRow {
    pub n: usize,
    pub value: f64,
    pub target: f64,
    pub error: f64,
}

/// `| |Q̂_n(z)|^{1/n} − |φ(z)|/2 |` from log-magnitudes.
pub fn nth_root_diagnostic(fam: &QFamily, n_list: &[usize], z: Complex64) -> Result<Vec<NthRootRow>> {
    if dist_to_interval(z) <= 1e-13 {
        return Err(Error::BranchCut { re: z.re, im: z.im });
    }
    let target = phi(z).norm() / 2.0;
    n_list
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::NotApplicable("n-th root needs n >= 1"));
            }
            let value = libm::exp(fam.qhat_eval(n, z)?.ln_abs() / n as f64);
            Ok(NthRootRow { n, value, target, error: (value - target).abs() })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroClass {
    NearInterval,
    NearEllipse,
    Stray,
}

impl ZeroClass {
    pub fn name(self) -> &'static str {
        match self {
            ZeroClass::NearInterval => "interval",
            ZeroClass::NearEllipse => "ellipse",
            ZeroClass::Stray => "stray",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ZeroReport {
    pub n: usize,
    pub band: f64,
    pub geometry: Geometry,
    pub zeros: Vec<Complex64>,
    pub classes: Vec<ZeroClass>,
    pub near_interval: usize,
    pub near_ellipse: usize,
    pub stray: usize,
    pub max_abs: f64,
    /// `Δ(ζ) + 1`.
    pub bound: f64,
    pub min_gap: f64,
    /// Largest distance of a zero to `[-1,1] ∪ ℰ(ζ)`, measured as
    /// `min(dist(z, [-1,1]), |ln|φ(z)| − η_ζ|)`.
    pub max_distance: f64,
    pub root_residual: f64,
}

/// Zeros of `Q_n` classified against `[-1, 1]` and the ellipse through `ζ_n`.
pub fn zero_accumulation_report(fam: &QFamily, n: usize, band: f64) -> Result<ZeroReport> {
    let zeta = fam.zeta(n)?;
    let geometry = geometry(zeta);
    let rs = fam.q_roots(n)?;
    let mut classes = Vec::with_capacity(rs.roots.len());
    let mut max_distance: f64 = 0.0;
    for &z in &rs.roots {
        let di = dist_to_interval(z);
        let de = (libm::log(phi(z).norm()) - geometry.eta).abs();
        max_distance = max_distance.max(di.min(de));
        classes.push(if di <= band {
            ZeroClass::NearInterval
        } else if de <= band {
            ZeroClass::NearEllipse
        } else {
            ZeroClass::Stray
        });
    }
    let count = |c: ZeroClass| classes.iter().filter(|&&k| k == c).count();
    Ok(ZeroReport {
        n,
        band,
        geometry,
        near_interval: count(ZeroClass::NearInterval),
        near_ellipse: count(ZeroClass::NearEllipse),
        stray: count(ZeroClass::Stray),
        max_abs: rs.roots.iter().map(|z| z.norm()).fold(0.0, f64::max),
        bound: geometry.big_delta + 1.0,
        min_gap: rs.min_gap(),
        max_distance,
        root_residual: rs.residual,
        zeros: rs.roots,
        classes,
    })
}

/// Arcsine distribution function `1 − arccos(x)/π` on `[-1, 1]`.
pub fn arcsine_cdf(x: f64) -> f64 {
    1.0 - libm::acos(x.clamp(-1.0, 1.0)) / PI
}

/// Kolmogorov distance between the empirical distribution of the real parts
/// of the zeros lying in `[-1, 1]` and the arcsine law. `1` when no zero
/// qualifies.
pub fn arcsine_distance(zeros: &[Complex64]) -> f64 {
    let mut xs: Vec<f64> = zeros.iter().map(|z| z.re).filter(|x| (-1.0..=1.0).contains(x)).collect();
    if xs.is_empty() {
        return 1.0;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = arcsine_cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct InterlacingReport {
    pub n: usize,
    /// Only `m = 1` is covered by a theorem; other `m` are reported, not asserted.
    pub asserted: bool,
    pub critical_points: Vec<Complex64>,
    pub zeros_l: Vec<Complex64>,
    pub max_imag: f64,
    pub inside: bool,
    pub interlaced: bool,
    /// Smallest distance between a critical point and a zero of `L_n`.
    pub min_separation: f64,
}

impl InterlacingReport {
    pub fn holds(&self) -> bool {
        self.max_imag <= 1e-9 && self.inside && self.interlaced
    }
}

/// Checks `x_1 < w_1 < x_2 < … < w_{n−1} < x_n` for the zeros `x_k` of `L_n`
/// and the critical points `w_k` of `Q_n`, with all `w_k` in `(−1, 1)`.
pub fn interlacing_check(fam: &QFamily, n: usize) -> Result<InterlacingReport> {
    if n < 2 {
        return Err(Error::NotApplicable("interlacing needs n >= 2"));
    }
    let asserted = fam.measure().m() == 1;
    let crit = fam.dq_roots(n)?.roots;
    let zl = fam.l_roots(n)?.roots;
    let max_imag = crit.iter().chain(&zl).map(|z| z.im.abs()).fold(0.0, f64::max);
    if asserted && max_imag > 1e-9 {
        return Err(Error::NotApplicable("critical points of Q_n are not real"));
    }
    let mut w: Vec<f64> = crit.iter().map(|z| z.re).collect();
    let mut x: Vec<f64> = zl.iter().map(|z| z.re).collect();
    w.sort_by(f64::total_cmp);
    x.sort_by(f64::total_cmp);
    let inside = w.iter().all(|&t| t > -1.0 && t < 1.0);
    let interlaced = w.iter().enumerate().all(|(i, &t)| x[i] < t && t < x[i + 1]);
    let min_separation = w
        .iter()
        .enumerate()
        .map(|(i, &t)| (t - x[i]).min(x[i + 1] - t))
        .fold(f64::INFINITY, f64::min);
    Ok(InterlacingReport { n, asserted, critical_points: crit, zeros_l: zl, max_imag, inside, interlaced, min_separation })
}
