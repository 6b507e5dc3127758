//! Aberth–Ehrlich simultaneous root finding.
//!
//! The iteration only needs `p(z)` and `p'(z)`, so it runs unchanged on
//! coefficient-form polynomials (Horner) and on polynomials that are only
//! available through a recurrence.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::poly::{Polynomial, Scalar};
use crate::{Error, Result};

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;
const EPS: f64 = f64::EPSILON;

/// Point evaluation: value, derivative and the magnitude scale of the
/// rounding error committed while computing the value.
#[derive(Debug, Clone, Copy)]
pub struct PointEval {
    pub value: Complex64,
    pub derivative: Complex64,
    pub scale: f64,
}

/// Anything whose zeros can be located with [`aberth`].
pub trait RootTarget {
    fn degree(&self) -> usize;
    fn eval(&self, z: Complex64) -> PointEval;
    /// Radius of the circle carrying the initial guesses.
    fn initial_radius(&self) -> f64;
    /// Dimensionless residual reported in [`RootSet::residual`].
    fn residual(&self, _z: Complex64, e: &PointEval) -> f64 {
        e.value.norm() / e.scale.max(f64::MIN_POSITIVE)
    }
    /// Below this derivative magnitude a root is treated as multiple and not polished.
    fn derivative_guard(&self, _z: Complex64, e: &PointEval) -> f64 {
        1e-10 * e.scale
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub tol: f64,
    pub max_sweeps: usize,
    /// Overrides [`RootTarget::initial_radius`].
    pub radius: Option<f64>,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { tol: 1e-6, max_sweeps: 500, radius: None }
    }
}

impl RootOptions {
    pub fn with_tol(tol: f64) -> Self {
        RootOptions { tol, ..Default::default() }
    }
}

#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// Largest normalized residual over the roots.
    pub residual: f64,
    /// Roots whose derivative fell under the multiplicity guard; kept unpolished.
    pub multiple: Vec<bool>,
    pub sweeps: usize,
}

impl RootSet {
    /// Real parts sorted ascending.
    pub fn sorted_real_parts(&self) -> Vec<f64> {
        let mut xs: Vec<f64> = self.roots.iter().map(|z| z.re).collect();
        xs.sort_by(f64::total_cmp);
        xs
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.roots.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Smallest distance between two roots, `+∞` with fewer than two roots.
    pub fn min_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for (i, a) in self.roots.iter().enumerate() {
            for b in &self.roots[i + 1..] {
                gap = gap.min((a - b).norm());
            }
        }
        gap
    }
}

/// `a / b` without forming `|b|²`, which overflows for `|b| > 1e154`.
fn quotient(a: Complex64, b: Complex64) -> Complex64 {
    let s = b.norm();
    (a / s) * (b.conj() / s)
}

/// Simultaneous Aberth–Ehrlich iteration followed by Newton polishing.
pub fn aberth<T: RootTarget + ?Sized>(target: &T, opts: RootOptions) -> Result<RootSet> {
    let n = target.degree();
    if n == 0 {
        return Err(Error::Degenerate("root finding needs degree >= 1"));
    }
    let radius = opts.radius.unwrap_or_else(|| target.initial_radius());
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 0.4 + GOLDEN_ANGLE * k as f64))
        .collect();
    let mut done = vec![false; n];
    let mut last = vec![f64::INFINITY; n];
    let mut sweeps = 0;

    while sweeps < opts.max_sweeps && done.iter().any(|d| !d) {
        sweeps += 1;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let e = target.eval(z[k]);
            if e.value.norm() <= 4.0 * EPS * e.scale {
                done[k] = true;
                continue;
            }
            let newton = if e.derivative.norm() > 0.0 {
                quotient(e.value, e.derivative)
            } else {
                // nudge off a critical point
                Complex64::from_polar(1e-3 * (1.0 + z[k].norm()), PI * k as f64 / n as f64)
            };
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d.norm() > 0.0 {
                        d.inv()
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() > 0.0 { newton / denom } else { newton };
            z[k] -= step;
            let size = step.norm();
            // converged, or stalled at the rounding floor of the evaluation
            if size <= 4.0 * EPS * (1.0 + z[k].norm()) || (size >= last[k] && last[k] <= 1e-10 * (1.0 + z[k].norm())) {
                done[k] = true;
            }
            last[k] = size;
        }
    }

    let mut multiple = vec![false; n];
    for k in 0..n {
        let e = target.eval(z[k]);
        if e.derivative.norm() < target.derivative_guard(z[k], &e) {
            multiple[k] = true;
            continue;
        }
        let mut best = (target.residual(z[k], &e), z[k]);
        let mut cur = z[k];
        let mut ce = e;
        for _ in 0..3 {
            if ce.derivative.norm() == 0.0 {
                break;
            }
            cur -= quotient(ce.value, ce.derivative);
            ce = target.eval(cur);
            let r = target.residual(cur, &ce);
            if r < best.0 {
                best = (r, cur);
            }
        }
        z[k] = best.1;
    }

    // NaN must survive the fold so that a diverged iterate is reported
    let residual = z
        .iter()
        .map(|&r| target.residual(r, &target.eval(r)))
        .fold(0.0, |acc: f64, r| if r.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(r) });
    if residual.is_nan() || residual > opts.tol {
        return Err(Error::NonConvergence { what: "Aberth root finder", residual, iterations: sweeps });
    }
    Ok(RootSet { roots: z, residual, multiple, sweeps })
}

impl<T: Scalar> RootTarget for Polynomial<T> {
    fn degree(&self) -> usize {
        Polynomial::degree(self).unwrap_or(0)
    }

    fn eval(&self, z: Complex64) -> PointEval {
        let [value, derivative, _] = self.evaluate_d2(z);
        let (_, scale) = self.evaluate_with_scale(z);
        PointEval { value, derivative, scale }
    }

    fn initial_radius(&self) -> f64 {
        let lead = self.leading().abs();
        let c = self.coeffs();
        1.0 + c[..c.len() - 1].iter().map(|a| a.abs() / lead).fold(0.0, f64::max)
    }

    fn residual(&self, _z: Complex64, e: &PointEval) -> f64 {
        e.value.norm() / self.max_abs_coeff()
    }

    fn derivative_guard(&self, _z: Complex64, _e: &PointEval) -> f64 {
        1e-7 * self.max_abs_coeff()
    }
}

impl<T: Scalar> Polynomial<T> {
    /// All complex zeros, residual measured as `|p(root)| / max|coeff|`.
    pub fn roots(&self, tol: f64) -> Result<RootSet> {
        self.roots_with(RootOptions::with_tol(tol))
    }

    pub fn roots_with(&self, opts: RootOptions) -> Result<RootSet> {
        let deg = self.degree().ok_or(Error::Degenerate("zero polynomial"))?;
        if deg == 0 {
            return Err(Error::Degenerate("root finding needs degree >= 1"));
        }
        if self.leading().abs() < 1e-290 {
            return Err(Error::Degenerate("leading coefficient underflows"));
        }
        aberth(self, opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_re(rs: &RootSet) -> Vec<f64> {
        rs.sorted_real_parts()
    }

    #[test]
    fn quadratic_and_cubic() {
        let rs = Polynomial::new(vec![-1.0, 0.0, 1.0]).roots(1e-12).unwrap();
        let xs = sorted_re(&rs);
        assert!((xs[0] + 1.0).abs() < 1e-14 && (xs[1] - 1.0).abs() < 1e-14);
        assert!(rs.max_abs_imag() < 1e-14);

        let rs = Polynomial::new(vec![0.0, -1.0, 0.0, 1.0]).roots(1e-12).unwrap();
        let xs = sorted_re(&rs);
        for (x, want) in xs.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((x - want).abs() < 1e-14);
        }
    }

    #[test]
    fn monic_legendre_two() {
        let rs = Polynomial::new(vec![-1.0 / 3.0, 0.0, 1.0]).roots(1e-12).unwrap();
        let xs = sorted_re(&rs);
        let r = 1.0 / libm::sqrt(3.0);
        assert!((xs[0] + r).abs() < 1e-14 && (xs[1] - r).abs() < 1e-14);
        assert!((r - 0.57735).abs() < 1e-5);
    }

    #[test]
    fn degree_zero_is_rejected() {
        assert!(Polynomial::new(vec![3.0]).roots(1e-8).is_err());
        assert!(Polynomial::<f64>::zero().roots(1e-8).is_err());
    }

    #[test]
    fn double_root_is_flagged() {
        let p = Polynomial::from_roots(&[0.5, 0.5, -2.0]);
        let rs = p.roots(1e-8).unwrap();
        assert!(rs.multiple.iter().any(|&m| m));
        let near = rs.roots.iter().filter(|z| (*z - Complex64::new(0.5, 0.0)).norm() < 1e-6).count();
        assert_eq!(near, 2);
    }

    #[test]
    fn large_start_radius_does_not_overflow() {
        // Cauchy radius ~2e6 puts |p'|² beyond f64 range on the first sweep
        let roots: Vec<Complex64> = (0..25)
            .map(|k| Complex64::from_polar(1.0 + 2.0 * (k % 3) as f64 / 2.0, 0.7 * k as f64))
            .collect();
        let p = Polynomial::from_roots(&roots);
        assert!(p.initial_radius() > 1e5);
        let rs = p.roots(1e-6).unwrap();
        assert!(rs.roots.iter().all(|z| z.norm() < 4.0));
    }

    #[test]
    fn complex_coefficients() {
        let roots = [Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.25), Complex64::new(0.0, -1.0)];
        let p = Polynomial::from_roots(&roots);
        let rs = p.roots(1e-10).unwrap();
        for r in roots {
            assert!(rs.roots.iter().any(|z| (z - r).norm() < 1e-12));
        }
    }
}
