//! Monic Jacobi polynomials `P_n^{(α,β)}`, their norms and eigenvalues, the
//! operator ℒ and three-term recurrence machinery shared with measure-derived
//! bases.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::poly::{Polynomial, Scalar};
use crate::{Error, Result};

const LN2: f64 = core::f64::consts::LN_2;

/// Parameters of `dμ_{α,β}(x) = (1 − x)^α (1 + x)^β dx`, with `α, β > −1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    alpha: f64,
    beta: f64,
}

impl JacobiParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParams { alpha, beta });
        }
        Ok(JacobiParams { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Eigenvalue of ℒ on degree-`n` polynomials: `−n(1 + n + α + β)`.
pub fn lambda_n(n: usize, params: JacobiParams) -> f64 {
    let n = n as f64;
    -n * (1.0 + n + params.alpha + params.beta)
}

/// `ln τ_n`, where `τ_n = ‖P_n^{(α,β)}‖²` for the monic polynomial.
pub fn ln_tau_n(n: usize, params: JacobiParams) -> f64 {
    let (a, b) = (params.alpha, params.beta);
    let lg = libm::lgamma;
    if n == 0 {
        return (a + b + 1.0) * LN2 + lg(a + 1.0) + lg(b + 1.0) - lg(a + b + 2.0);
    }
    let n = n as f64;
    let s = 2.0 * n + a + b;
    lg(n + a + 1.0) + lg(n + b + 1.0) + lg(n + 1.0) + lg(n + a + b + 1.0) + (s + 1.0) * LN2
        - lg(s + 2.0)
        - lg(s + 1.0)
}

/// `τ_n`, or [`Error::Overflow`] carrying `ln τ_n` when it is not representable.
pub fn tau_n(n: usize, params: JacobiParams) -> Result<f64> {
    let ln = ln_tau_n(n, params);
    let v = libm::exp(ln);
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Overflow { ln_value: ln })
    }
}

/// Which measure an [`OrthoBasis`] is orthogonal for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisKind {
    Jacobi(JacobiParams),
    MeasureDerived,
}

/// Monic orthogonal family given by `p_{n+1} = (x − a_n) p_n − b_n p_{n−1}`.
///
/// Holds `a_n, b_n` and the squared norms for `n = 0..=max_degree`; values of
/// `p_{max_degree+1}` are reachable too. `b_0` is unused and stored as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoBasis {
    a: Vec<f64>,
    b: Vec<f64>,
    norms: Vec<f64>,
    kind: BasisKind,
}

/// Values and first two derivatives of `p_start..=p_n` at one point, all
/// multiplied by the common factor `exp(−ln_scale)`.
#[derive(Debug, Clone)]
pub struct ScaledWindow {
    pub ln_scale: f64,
    start: usize,
    vals: Vec<[Complex64; 3]>,
}

impl ScaledWindow {
    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.start + self.vals.len() - 1
    }

    /// `[p_j, p_j', p_j'']·exp(−ln_scale)`.
    pub fn get(&self, j: usize) -> [Complex64; 3] {
        self.vals[j - self.start]
    }

    /// Unscaled value `p_j(z)`; may overflow for very high degree.
    pub fn value(&self, j: usize) -> Complex64 {
        self.get(j)[0] * libm::exp(self.ln_scale)
    }
}

impl OrthoBasis {
    pub fn from_parts(a: Vec<f64>, b: Vec<f64>, norms: Vec<f64>, kind: BasisKind) -> Self {
        debug_assert!(a.len() == b.len() && a.len() == norms.len() && !a.is_empty());
        OrthoBasis { a, b, norms, kind }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Highest degree whose norm is stored.
    pub fn max_degree(&self) -> usize {
        self.a.len() - 1
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn norm(&self, n: usize) -> f64 {
        self.norms[n]
    }

    fn check(&self, n: usize) -> Result<()> {
        // p_{max+1} is reachable from the stored coefficients
        if n > self.max_degree() + 1 {
            return Err(Error::OutOfRange { index: n, limit: self.max_degree() + 1 });
        }
        Ok(())
    }

    /// `p_n(z)` by the recurrence.
    pub fn eval(&self, n: usize, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_window(n, 0, z)?.value(n))
    }

    /// `p_j, p_j', p_j''` for `j = n − width ..= n`, with overflow-safe rescaling.
    pub fn eval_window(&self, n: usize, width: usize, z: Complex64) -> Result<ScaledWindow> {
        self.check(n)?;
        let start = n.saturating_sub(width);
        let zero = Complex64::new(0.0, 0.0);
        let mut vals: Vec<[Complex64; 3]> = Vec::with_capacity(n - start + 1);
        let mut ln_scale = 0.0;
        let mut prev = [zero; 3];
        let mut cur = [Complex64::new(1.0, 0.0), zero, zero];
        if start == 0 {
            vals.push(cur);
        }
        for k in 0..n {
            let t = z - self.a[k];
            let bk = self.b[k];
            let next = [
                t * cur[0] - prev[0] * bk,
                cur[0] + t * cur[1] - prev[1] * bk,
                cur[1] * 2.0 + t * cur[2] - prev[2] * bk,
            ];
            prev = cur;
            cur = next;
            if k + 1 >= start {
                vals.push(cur);
            }
            let mag = cur.iter().chain(prev.iter()).map(|c| c.norm()).fold(0.0, f64::max);
            if mag > 1e150 || (mag < 1e-150 && mag > 0.0) {
                let s = 1.0 / mag;
                ln_scale += libm::log(mag);
                for c in cur.iter_mut().chain(prev.iter_mut()) {
                    *c *= s;
                }
                for v in vals.iter_mut() {
                    for c in v.iter_mut() {
                        *c *= s;
                    }
                }
            }
        }
        Ok(ScaledWindow { ln_scale, start, vals })
    }

    /// `(p̃_{n−1}(x), p̃_n(x), p̃_n'(x))` for the orthonormal family `p̃_k = p_k / √norm_k`.
    pub fn eval_orthonormal(&self, n: usize, x: f64) -> (f64, f64, f64) {
        let mut prev = (0.0, 0.0);
        let mut cur = (1.0 / libm::sqrt(self.norms[0]), 0.0);
        for k in 0..n {
            let s_next = libm::sqrt(self.b_next(k));
            let s_k = if k == 0 { 0.0 } else { libm::sqrt(self.b[k]) };
            let t = x - self.a[k];
            let next = ((t * cur.0 - s_k * prev.0) / s_next, (cur.0 + t * cur.1 - s_k * prev.1) / s_next);
            prev = cur;
            cur = next;
        }
        (prev.0, cur.0, cur.1)
    }

    /// Orthonormal values `p̃_0(x)..=p̃_n(x)`.
    pub fn orthonormal_values(&self, n: usize, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut prev = 0.0;
        let mut cur = 1.0 / libm::sqrt(self.norms[0]);
        out.push(cur);
        for k in 0..n {
            let s_next = libm::sqrt(self.b_next(k));
            let s_k = if k == 0 { 0.0 } else { libm::sqrt(self.b[k]) };
            let next = ((x - self.a[k]) * cur - s_k * prev) / s_next;
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }

    fn b_next(&self, k: usize) -> f64 {
        self.b[k + 1]
    }

    /// Monic coefficients of `p_0..=p_n`. Reliable for moderate `n` only
    /// (coefficient magnitudes grow like `4^n`).
    pub fn coefficient_table(&self, n: usize) -> Result<Vec<Polynomial>> {
        self.check(n)?;
        let mut out: Vec<Polynomial> = Vec::with_capacity(n + 1);
        out.push(Polynomial::one());
        let x = Polynomial::new(vec![0.0, 1.0]);
        for k in 0..n {
            let shifted = &(&x - &Polynomial::constant(self.a[k])) * &out[k];
            let next = if k == 0 { shifted } else { &shifted - &out[k - 1].scale(self.b[k]) };
            out.push(next);
        }
        Ok(out)
    }

    pub fn coefficients(&self, n: usize) -> Result<Polynomial> {
        Ok(self.coefficient_table(n)?.pop().unwrap())
    }
}

/// Recurrence coefficients `a_n` of the monic Jacobi polynomials.
pub fn jacobi_a(n: usize, params: JacobiParams) -> f64 {
    let (a, b) = (params.alpha, params.beta);
    if n == 0 {
        return (b - a) / (a + b + 2.0);
    }
    let s = 2.0 * n as f64 + a + b;
    (b * b - a * a) / (s * (s + 2.0))
}

/// Recurrence coefficients `b_n`, `n ≥ 1`, of the monic Jacobi polynomials.
pub fn jacobi_b(n: usize, params: JacobiParams) -> f64 {
    let (a, b) = (params.alpha, params.beta);
    if n == 0 {
        return 0.0;
    }
    if n == 1 {
        // the (α + β + 1) factor cancels
        let s = a + b + 2.0;
        return 4.0 * (1.0 + a) * (1.0 + b) / (s * s * (s + 1.0));
    }
    let nf = n as f64;
    let s = 2.0 * nf + a + b;
    4.0 * nf * (nf + a) * (nf + b) * (nf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
}

/// Monic Jacobi basis holding degrees `0..=max_degree`.
pub fn jacobi_recurrence(params: JacobiParams, max_degree: usize) -> OrthoBasis {
    let len = max_degree + 1;
    let a: Vec<f64> = (0..len).map(|n| jacobi_a(n, params)).collect();
    let b: Vec<f64> = (0..len).map(|n| jacobi_b(n, params)).collect();
    let mut norms = Vec::with_capacity(len);
    norms.push(libm::exp(ln_tau_n(0, params)));
    for n in 1..len {
        let prev = norms[n - 1];
        norms.push(prev * b[n]);
    }
    OrthoBasis::from_parts(a, b, norms, BasisKind::Jacobi(params))
}

/// `P_n^{(α,β)}(z)` (monic) by the recurrence.
pub fn eval_p(n: usize, params: JacobiParams, z: Complex64) -> Complex64 {
    jacobi_recurrence(params, n).eval(n, z).expect("degree within built range")
}

/// ℒ[f] in coefficient space.
pub fn apply_l<T: Scalar>(f: &Polynomial<T>, params: JacobiParams) -> Polynomial<T> {
    let (a, b) = (params.alpha, params.beta);
    let one_minus_x2 = Polynomial::new(vec![T::one(), T::zero(), T::from_f64(-1.0)]);
    let drift = Polynomial::new(vec![T::from_f64(b - a), T::from_f64(-(a + b + 2.0))]);
    let d1 = f.derivative();
    let d2 = d1.derivative();
    &(&one_minus_x2 * &d2) + &(&drift * &d1)
}

/// ℒ[f](z) from `f'(z)` and `f''(z)`.
pub fn apply_l_at(params: JacobiParams, z: Complex64, d1: Complex64, d2: Complex64) -> Complex64 {
    let (a, b) = (params.alpha, params.beta);
    (Complex64::new(1.0, 0.0) - z * z) * d2 + (Complex64::new(b - a, 0.0) - z * (a + b + 2.0)) * d1
}

/// Coefficients of `(1 − x²) P_n' = c₁ P_{n+1} + c₀ P_n + c₋₁ P_{n−1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureCoeffs {
    pub up: f64,
    pub diag: f64,
    pub down: f64,
}

impl StructureCoeffs {
    /// `c_{n,s}` for `s ∈ {1, 0, −1}`; zero otherwise.
    pub fn get(&self, s: i64) -> f64 {
        match s {
            1 => self.up,
            0 => self.diag,
            -1 => self.down,
            _ => 0.0,
        }
    }
}

pub fn structure_coeffs(n: usize, params: JacobiParams) -> Result<StructureCoeffs> {
    if n == 0 {
        // (1 − x²)·0 = 0
        return Ok(StructureCoeffs { up: 0.0, diag: 0.0, down: 0.0 });
    }
    let (a, b) = (params.alpha, params.beta);
    let nf = n as f64;
    let s = 2.0 * nf + a + b;
    if [0.0, 1.0, -1.0].iter().any(|v| libm::fabs(s - v) < 1e-12) {
        return Err(Error::DegenerateDenominator { n });
    }
    Ok(StructureCoeffs {
        up: -nf,
        diag: 2.0 * nf * (a - b) * (nf + a + b + 1.0) / (s * (s + 2.0)),
        down: 4.0 * nf * (nf + a) * (nf + b) * (nf + a + b) * (nf + a + b + 1.0) / (s * s * (s * s - 1.0)),
    })
}

/// Limit of `2^n P_n(z) / φ(z)^n` off the cut:
/// `((φ−1)/(2(z−1)))^α ((φ+1)/(2(z+1)))^β √(φ'/2)`.
pub fn strong_asymptotic_rhs(z: Complex64, params: JacobiParams) -> Result<Complex64> {
    if crate::asymptotics::dist_to_interval(z) <= 1e-13 {
        return Err(Error::BranchCut { re: z.re, im: z.im });
    }
    let phi = crate::asymptotics::phi(z);
    let root = crate::asymptotics::sqrt_z2m1(z);
    let dphi = phi / root;
    let one = Complex64::new(1.0, 0.0);
    let left = ((phi - one) / ((z - one) * 2.0)).powf(params.alpha);
    let right = ((phi + one) / ((z + one) * 2.0)).powf(params.beta);
    Ok(left * right * (dphi / 2.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jp(a: f64, b: f64) -> JacobiParams {
        JacobiParams::new(a, b).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn params_domain() {
        assert!(JacobiParams::new(-1.0, 0.0).is_err());
        assert!(JacobiParams::new(0.0, -1.5).is_err());
        assert!(JacobiParams::new(f64::NAN, 0.0).is_err());
        assert!(JacobiParams::new(-0.99, 3.0).is_ok());
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_n(0, jp(0.3, 0.1)), 0.0);
        assert_eq!(lambda_n(1, jp(0.0, 0.0)), -2.0);
        assert_eq!(lambda_n(2, jp(1.0, 1.0)), -10.0);
    }

    #[test]
    fn tau_examples() {
        let p = jp(0.0, 0.0);
        assert!(rel(tau_n(0, p).unwrap(), 2.0) < 1e-14);
        assert!(rel(tau_n(1, p).unwrap(), 2.0 / 3.0) < 1e-14);
        assert!(rel(tau_n(2, p).unwrap(), 8.0 / 45.0) < 1e-14);
    }

    #[test]
    fn tau_reports_underflow_as_log() {
        match tau_n(700, jp(0.0, 0.0)) {
            Err(Error::Overflow { ln_value }) => assert!(ln_value < -700.0),
            other => panic!("expected overflow report, got {other:?}"),
        }
    }

    #[test]
    fn recurrence_examples() {
        let leg = jacobi_recurrence(jp(0.0, 0.0), 10);
        assert!(leg.a().iter().all(|&a| a == 0.0));
        assert!(rel(leg.b()[1], 1.0 / 3.0) < 1e-15);

        let cheb = jacobi_recurrence(jp(-0.5, -0.5), 10);
        assert!(rel(cheb.b()[1], 0.5) < 1e-15);
        for n in 2..=10 {
            assert!(rel(cheb.b()[n], 0.25) < 1e-14);
        }
    }

    #[test]
    fn norms_match_tau() {
        for (a, b) in [(-0.5, -0.5), (0.0, 0.0), (0.5, -0.25), (2.5, 1.0), (-0.9, 3.0)] {
            let p = jp(a, b);
            let basis = jacobi_recurrence(p, 40);
            for n in 0..=40 {
                assert!(rel(basis.norm(n), tau_n(n, p).unwrap()) < 1e-10, "n={n} a={a} b={b}");
            }
            for n in 1..=40 {
                assert!(rel(basis.norm(n), basis.norm(n - 1) * basis.b()[n]) < 1e-15);
            }
        }
    }

    #[test]
    fn eval_examples() {
        let p = jp(0.3, -0.4);
        let basis = jacobi_recurrence(p, 5);
        let z = Complex64::new(0.7, 0.2);
        assert_eq!(basis.eval(0, z).unwrap(), Complex64::new(1.0, 0.0));
        assert!((basis.eval(1, z).unwrap() - (z - basis.a()[0])).norm() < 1e-15);
        let leg = jacobi_recurrence(jp(0.0, 0.0), 2);
        assert!((leg.eval(2, Complex64::new(1.0, 0.0)).unwrap().re - 2.0 / 3.0).abs() < 1e-15);
        assert!((eval_p(2, jp(0.0, 0.0), Complex64::new(1.0, 0.0)).re - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn eval_matches_coefficients() {
        for (a, b) in [(0.0, 0.0), (0.5, -0.25), (2.5, 2.5)] {
            let basis = jacobi_recurrence(jp(a, b), 30);
            let table = basis.coefficient_table(30).unwrap();
            for z in [Complex64::new(0.3, 0.1), Complex64::new(1.5, -0.4), Complex64::new(-0.9, 0.0)] {
                for (n, poly) in table.iter().enumerate() {
                    let v = basis.eval(n, z).unwrap();
                    let (h, scale) = poly.evaluate_with_scale(z);
                    // relative to the Horner rounding scale: coefficient form cancels heavily inside the interval
                    assert!((v - h).norm() <= 1e-11 * scale.max(v.norm()), "n={n} z={z}");
                }
            }
        }
    }

    #[test]
    fn window_derivatives() {
        let p = jp(0.5, 1.0);
        let basis = jacobi_recurrence(p, 12);
        let z = Complex64::new(1.3, 0.6);
        let w = basis.eval_window(12, 3, z).unwrap();
        for j in 9..=12 {
            let c = basis.coefficients(j).unwrap();
            let [v, d, d2] = c.evaluate_d2(z);
            let got = w.get(j);
            let s = libm::exp(w.ln_scale);
            assert!((got[0] * s - v).norm() < 1e-12 * v.norm());
            assert!((got[1] * s - d).norm() < 1e-12 * d.norm());
            assert!((got[2] * s - d2).norm() < 1e-12 * d2.norm());
        }
    }

    #[test]
    fn window_rescales_for_high_degree() {
        let basis = jacobi_recurrence(jp(0.0, 0.0), 400);
        let z = Complex64::new(40.0, 0.0);
        let w = basis.eval_window(400, 1, z).unwrap();
        assert!(w.ln_scale > 0.0);
        // p_400 / p_399 ≈ φ(z)/2 at large z
        let ratio = w.get(400)[0] / w.get(399)[0];
        let phi_half = (40.0 + libm::sqrt(40.0 * 40.0 - 1.0)) / 2.0;
        assert!((ratio.re - phi_half).abs() < 1e-3);
    }

    #[test]
    fn operator_on_simple_inputs() {
        let p = jp(0.0, 0.0);
        assert!(apply_l(&Polynomial::constant(4.0), p).is_zero());
        assert_eq!(apply_l(&Polynomial::new(vec![0.0, 1.0]), p), Polynomial::new(vec![0.0, -2.0]));
    }

    #[test]
    fn eigen_relation() {
        let vals = [-0.5, 0.0, 0.5, 1.0, 2.5];
        for &a in &vals {
            for &b in &vals {
                let p = jp(a, b);
                let basis = jacobi_recurrence(p, 30);
                let table = basis.coefficient_table(30).unwrap();
                for (n, pn) in table.iter().enumerate() {
                    let lhs = apply_l(pn, p);
                    let rhs = pn.scale(lambda_n(n, p));
                    assert!(lhs.max_rel_diff(&rhs) <= 1e-9, "n={n} a={a} b={b}");
                    if n >= 1 {
                        assert_eq!(lhs.degree(), Some(n));
                    }
                }
            }
        }
    }

    #[test]
    fn structure_relation() {
        assert_eq!(structure_coeffs(3, jp(0.2, 0.7)).unwrap().up, -3.0);
        assert_eq!(structure_coeffs(4, jp(1.5, 1.5)).unwrap().diag, 0.0);
        let c = structure_coeffs(1, jp(0.0, 0.0)).unwrap();
        assert!((c.down - 2.0 / 3.0).abs() < 1e-15);
        for (a, b) in [(0.0, 0.0), (0.5, -0.25), (2.5, 1.0), (-0.5, 0.5)] {
            let p = jp(a, b);
            let basis = jacobi_recurrence(p, 25);
            let t = basis.coefficient_table(25).unwrap();
            let one_minus_x2 = Polynomial::new(vec![1.0, 0.0, -1.0]);
            for n in 1..25 {
                let c = structure_coeffs(n, p).unwrap();
                let lhs = &one_minus_x2 * &t[n].derivative();
                let rhs = &(&t[n + 1].scale(c.up) + &t[n].scale(c.diag)) + &t[n - 1].scale(c.down);
                assert!(lhs.max_rel_diff(&rhs) < 1e-11, "n={n}");
            }
        }
    }

    #[test]
    fn structure_degenerate_denominator() {
        // 2 + α + β = 1
        assert_eq!(structure_coeffs(1, jp(-0.5, -0.5)), Err(Error::DegenerateDenominator { n: 1 }));
        assert!(structure_coeffs(2, jp(-0.5, -0.5)).is_ok());
    }

    #[test]
    fn strong_asymptotics_legendre() {
        let p = jp(0.0, 0.0);
        let z = Complex64::new(10.0, 0.0);
        let n = 200;
        let w = jacobi_recurrence(p, n).eval_window(n, 0, z).unwrap();
        let phi = crate::asymptotics::phi(z);
        // 2^n P_n / φ^n in logs
        let ln_ratio = w.get(n)[0].ln() + w.ln_scale + (n as f64) * (LN2 - phi.ln());
        let lhs = ln_ratio.exp();
        let rhs = strong_asymptotic_rhs(z, p).unwrap();
        assert!((lhs - rhs).norm() / rhs.norm() <= 1e-3);
        let dphi = phi / crate::asymptotics::sqrt_z2m1(z);
        assert!((rhs - (dphi / 2.0).sqrt()).norm() < 1e-15);
    }

    #[test]
    fn strong_asymptotics_general_params() {
        let p = jp(0.5, -0.25);
        let n = 300;
        let basis = jacobi_recurrence(p, n);
        for z in [Complex64::new(2.0, 1.0), Complex64::new(-1.5, -0.3)] {
            let w = basis.eval_window(n, 0, z).unwrap();
            let phi = crate::asymptotics::phi(z);
            let lhs = (w.get(n)[0].ln() + w.ln_scale + (n as f64) * (LN2 - phi.ln())).exp();
            let rhs = strong_asymptotic_rhs(z, p).unwrap();
            assert!((lhs - rhs).norm() / rhs.norm() < 1e-3, "z={z}");
            let rc = strong_asymptotic_rhs(z.conj(), p).unwrap();
            assert!((rc - rhs.conj()).norm() < 1e-14);
        }
        assert!(strong_asymptotic_rhs(Complex64::new(0.3, 0.0), p).is_err());
    }
}
