//! The families `Q̂_n` and `Q_n` attached to a measure μ.
//!
//! `L_n = Σ_{k=0}^{m} b_{n,n−k} P_{n−k}` expands the monic μ-orthogonal
//! polynomial in the monic Jacobi basis. With `λ_n` the eigenvalues of ℒ,
//!
//! ```text
//! Q̂_n = λ_n Σ_{k=0}^{m} (b_{n,n−k} / λ_{n−k}) P_{n−k}      (n > m)
//! Q_n = Q̂_n − Q̂_n(ζ_n)
//! ```
//!
//! solves `ℒ[Q_n] = λ_n L_n`. For `1 ≤ n ≤ m` the same sum runs over all
//! `k ≤ n` with `λ_0` replaced by `1`.
//!
//! Connection coefficients come from an exact Gauss–Jacobi rule. Values at
//! any degree are computed from the recurrences with a running scale, so
//! nothing here depends on monomial coefficients beyond [`COEFF_CAP`].

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::asymptotics::{dist_to_interval, phi};
use crate::jacobi::{apply_l, apply_l_at, jacobi_recurrence, lambda_n, OrthoBasis, ScaledWindow};
use crate::measure::{stieltjes, Measure, MuInnerProduct};
use crate::poly::Polynomial;
use crate::quadrature::gauss_jacobi;
use crate::roots::{aberth, PointEval, RootOptions, RootSet, RootTarget};
use crate::{Error, Result};

/// Highest degree for which monomial coefficients are formed.
pub const COEFF_CAP: usize = 40;

/// Distance from `[-1, 1]` below which `ζ_n` is reported.
pub const ZETA_WARN: f64 = 1e-8;

/// Residual tolerance for roots found in value space.
pub const ROOT_TOL: f64 = 1e-10;

/// The sequence `ζ_1, ζ_2, …` of prescribed zeros.
#[derive(Debug, Clone, PartialEq)]
pub enum ZetaSeq {
    Constant(Complex64),
    /// `list[i]` is `ζ_{i+1}`.
    List(Vec<Complex64>),
}

impl ZetaSeq {
    pub fn get(&self, n: usize) -> Result<Complex64> {
        match self {
            _ if n == 0 => Err(Error::NotApplicable("zeta is indexed from 1")),
            ZetaSeq::Constant(z) => Ok(*z),
            ZetaSeq::List(v) => v.get(n - 1).copied().ok_or(Error::OutOfRange { index: n, limit: v.len() }),
        }
    }
}

/// Value and two derivatives multiplied by `exp(−ln_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub ln_scale: f64,
    pub v: [Complex64; 3],
}

impl Scaled {
    fn factor(&self) -> f64 {
        libm::exp(self.ln_scale)
    }

    pub fn value(&self) -> Complex64 {
        self.v[0] * self.factor()
    }

    pub fn derivative(&self) -> Complex64 {
        self.v[1] * self.factor()
    }

    pub fn second(&self) -> Complex64 {
        self.v[2] * self.factor()
    }

    /// `ln |value|`, finite even when the value itself is not representable.
    pub fn ln_abs(&self) -> f64 {
        libm::log(self.v[0].norm()) + self.ln_scale
    }
}

/// `Q̂_n` and `Q_n` for all `n ≤ n_max`, plus everything needed to check them.
#[derive(Debug, Clone)]
pub struct QFamily {
    measure: Measure,
    zeta: ZetaSeq,
    n_max: usize,
    top: usize,
    ip: MuInnerProduct,
    jacobi: OrthoBasis,
    lbasis: OrthoBasis,
    /// `conn[n][j] = ⟨L̃_n, P̃_j⟩_{α,β}` for orthonormal `L̃, P̃`, `j ≤ n`.
    conn: Vec<Vec<f64>>,
    /// `b[n][k] = b_{n,n−k}`, `k = 0..=min(m, n)`.
    b: Vec<Vec<f64>>,
    lambdas: Vec<f64>,
    p_coeffs: Vec<Polynomial>,
    l_coeffs: Vec<Polynomial>,
    zeta_warnings: Vec<usize>,
}

impl QFamily {
    /// Builds the family up to `n_max`. Bases and connection coefficients
    /// reach `n_max + m + 1` so that recurrence and expansion checks at
    /// `n_max` have their full index window.
    pub fn build(measure: Measure, zeta: ZetaSeq, n_max: usize) -> Result<Self> {
        let ip = MuInnerProduct::new(measure.clone())?;
        Self::build_with(ip, zeta, n_max)
    }

    pub fn build_with(ip: MuInnerProduct, zeta: ZetaSeq, n_max: usize) -> Result<Self> {
        let measure = ip.measure().clone();
        let m = measure.m();
        let params = measure.params();
        let top = n_max + m + 1;
        let jacobi = jacobi_recurrence(params, top + 1);
        let lbasis = stieltjes(&ip, top + 1)?;
        for n in 0..=top {
            let (l, t) = (lbasis.norm(n), jacobi.norm(n));
            if !(l.is_normal() && t.is_normal()) {
                return Err(Error::Overflow { ln_value: libm::log(l.min(t)) });
            }
        }

        let rule = gauss_jacobi(top + 2, params)?;
        let mut conn: Vec<Vec<f64>> = (0..=top).map(|n| vec![0.0; n + 1]).collect();
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let pv = jacobi.orthonormal_values(top, x);
            let lv = lbasis.orthonormal_values(top, x);
            for n in 0..=top {
                let wl = w * lv[n];
                for (j, c) in conn[n].iter_mut().enumerate() {
                    *c += wl * pv[j];
                }
            }
        }

        let mut b = Vec::with_capacity(top + 1);
        for (n, row) in conn.iter().enumerate() {
            let mut bn = vec![1.0];
            for k in 1..=m.min(n) {
                let j = n - k;
                bn.push(row[j] * libm::sqrt(lbasis.norm(n) / jacobi.norm(j)));
            }
            b.push(bn);
        }
        let lambdas = (0..=top + 1).map(|n| lambda_n(n, params)).collect();

        let cap = top.min(COEFF_CAP + m + 1);
        let p_coeffs = jacobi.coefficient_table(cap)?;
        let l_coeffs = lbasis.coefficient_table(cap)?;

        let mut zeta_warnings = Vec::new();
        for n in 1..=n_max {
            if dist_to_interval(zeta.get(n)?) <= ZETA_WARN {
                zeta_warnings.push(n);
            }
        }

        Ok(QFamily { measure, zeta, n_max, top, ip, jacobi, lbasis, conn, b, lambdas, p_coeffs, l_coeffs, zeta_warnings })
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn m(&self) -> usize {
        self.measure.m()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Highest degree with connection coefficients (`n_max + m + 1`).
    pub fn top(&self) -> usize {
        self.top
    }

    pub fn inner_product(&self) -> &MuInnerProduct {
        &self.ip
    }

    pub fn jacobi_basis(&self) -> &OrthoBasis {
        &self.jacobi
    }

    pub fn l_basis(&self) -> &OrthoBasis {
        &self.lbasis
    }

    pub fn zeta_seq(&self) -> &ZetaSeq {
        &self.zeta
    }

    pub fn zeta(&self, n: usize) -> Result<Complex64> {
        self.zeta.get(n)
    }

    /// Indices `n` whose `ζ_n` lies within [`ZETA_WARN`] of `[-1, 1]`.
    pub fn zeta_warnings(&self) -> &[usize] {
        &self.zeta_warnings
    }

    pub fn lambda(&self, n: usize) -> f64 {
        lambda_n(n, self.measure.params())
    }

    /// `τ_n` from the stored Jacobi norms.
    pub fn tau(&self, n: usize) -> f64 {
        self.jacobi.norm(n)
    }

    /// `l_n = ∫ L_n² dμ`.
    pub fn l_norm(&self, n: usize) -> f64 {
        self.lbasis.norm(n)
    }

    fn check_n(&self, n: usize, limit: usize) -> Result<()> {
        if n > limit {
            return Err(Error::OutOfRange { index: n, limit });
        }
        Ok(())
    }

    /// `b_{n,n−k}` for `k = 0..=min(m, n)`; `b_{n,n} = 1`.
    pub fn connection_coeffs(&self, n: usize) -> Result<&[f64]> {
        self.check_n(n, self.top)?;
        Ok(&self.b[n])
    }

    /// `b_{n,j}` for any `j ≤ n`, including the tail `j < n − m` that
    /// vanishes in exact arithmetic.
    pub fn b_full(&self, n: usize, j: usize) -> Result<f64> {
        self.check_n(n, self.top)?;
        self.check_n(j, n)?;
        if j == n {
            return Ok(1.0);
        }
        Ok(self.conn[n][j] * libm::sqrt(self.lbasis.norm(n) / self.jacobi.norm(j)))
    }

    /// Normalized connection coefficient `b_{n,j} √(τ_j / l_n)`, the cosine-like
    /// size used by the tail check.
    pub fn b_normalized(&self, n: usize, j: usize) -> Result<f64> {
        self.check_n(n, self.top)?;
        self.check_n(j, n)?;
        Ok(self.conn[n][j])
    }

    /// `max_{j < n−m} |b_{n,j}| √(τ_j / l_n)`.
    pub fn b_tail(&self, n: usize) -> Result<f64> {
        self.check_n(n, self.top)?;
        let stop = n.saturating_sub(self.m());
        Ok(self.conn[n][..stop].iter().map(|c| c.abs()).fold(0.0, f64::max))
    }

    /// `|b_{n,n} − 1|` as computed by quadrature before it is pinned to one.
    pub fn monic_defect(&self, n: usize) -> Result<f64> {
        self.check_n(n, self.top)?;
        Ok((self.conn[n][n] * libm::sqrt(self.lbasis.norm(n) / self.jacobi.norm(n)) - 1.0).abs())
    }

    /// `(⟨L_n, 1⟩_{α,β} vanishes, ⟨L_n, 1⟩_{α,β})`, judged against
    /// `1e-9 √(τ_0 l_n)`.
    pub fn existence_check(&self, n: usize) -> Result<(bool, f64)> {
        if n == 0 {
            return Err(Error::NotApplicable("existence check needs n >= 1"));
        }
        self.check_n(n, self.top)?;
        let scale = libm::sqrt(self.jacobi.norm(0) * self.lbasis.norm(n));
        let value = self.conn[n][0] * scale;
        Ok((value.abs() <= 1e-9 * scale, value))
    }

    /// Weights `w_k` with `Q̂_n = Σ_k w_k P_{n−k}`.
    fn weights(&self, n: usize) -> Vec<f64> {
        let ln = self.lambdas[n];
        self.b[n]
            .iter()
            .enumerate()
            .map(|(k, &b)| {
                let lk = if n == k { 1.0 } else { self.lambdas[n - k] };
                ln * b / lk
            })
            .collect()
    }

    /// `a_{n,n−k} = (λ_n / λ_{n−k}) b_{n,n−k}`, the coefficients of `Q̂_n` in
    /// the Jacobi basis.
    pub fn qhat_jacobi_coeffs(&self, n: usize) -> Result<Vec<f64>> {
        self.check_n(n, self.top)?;
        if n == 0 {
            return Ok(vec![1.0]);
        }
        Ok(self.weights(n))
    }

    fn combine(&self, n: usize, w: &ScaledWindow) -> Scaled {
        let zero = Complex64::new(0.0, 0.0);
        let mut v = [zero; 3];
        if n == 0 {
            v = w.get(0);
        } else {
            for (k, wk) in self.weights(n).into_iter().enumerate() {
                let t = w.get(n - k);
                for i in 0..3 {
                    v[i] += t[i] * wk;
                }
            }
        }
        Scaled { ln_scale: w.ln_scale, v }
    }

    /// `P_n, P_n', P_n''` at `z`.
    pub fn p_eval(&self, n: usize, z: Complex64) -> Result<Scaled> {
        let w = self.jacobi.eval_window(n, 0, z)?;
        Ok(Scaled { ln_scale: w.ln_scale, v: w.get(n) })
    }

    /// `L_n, L_n', L_n''` at `z`.
    pub fn l_eval(&self, n: usize, z: Complex64) -> Result<Scaled> {
        let w = self.lbasis.eval_window(n, 0, z)?;
        Ok(Scaled { ln_scale: w.ln_scale, v: w.get(n) })
    }

    /// `Q̂_n` (for `n ≤ m` the sum with `λ_0 = 1`) and two derivatives at `z`.
    pub fn qhat_eval(&self, n: usize, z: Complex64) -> Result<Scaled> {
        self.check_n(n, self.top)?;
        let w = self.jacobi.eval_window(n, self.m().min(n), z)?;
        Ok(self.combine(n, &w))
    }

    /// `Q_n` and two derivatives at `z`.
    pub fn q_eval(&self, n: usize, z: Complex64) -> Result<Scaled> {
        let hz = self.qhat_eval(n, z)?;
        if n == 0 {
            return Ok(hz);
        }
        let hs = self.qhat_eval(n, self.zeta(n)?)?;
        let mut v = hz.v;
        let ln_scale = if hz.ln_scale >= hs.ln_scale {
            v[0] -= hs.v[0] * libm::exp(hs.ln_scale - hz.ln_scale);
            hz.ln_scale
        } else {
            let s = libm::exp(hz.ln_scale - hs.ln_scale);
            for c in v.iter_mut() {
                *c *= s;
            }
            v[0] -= hs.v[0];
            hs.ln_scale
        };
        Ok(Scaled { ln_scale, v })
    }

    /// `Q̂_n(ζ_n)`.
    pub fn qhat_at_zeta(&self, n: usize) -> Result<Complex64> {
        Ok(self.qhat_eval(n, self.zeta(n)?)?.value())
    }

    fn check_coeff(&self, n: usize) -> Result<()> {
        if n >= self.p_coeffs.len() {
            return Err(Error::NotApplicable("coefficient form is only formed up to the coefficient cap"));
        }
        Ok(())
    }

    /// Monic Jacobi coefficients `P_n`.
    pub fn p_poly(&self, n: usize) -> Result<&Polynomial> {
        self.check_coeff(n)?;
        Ok(&self.p_coeffs[n])
    }

    /// Monic coefficients of `L_n`.
    pub fn l_poly(&self, n: usize) -> Result<&Polynomial> {
        self.check_coeff(n)?;
        Ok(&self.l_coeffs[n])
    }

    /// Coefficients of `Q̂_n`.
    pub fn qhat(&self, n: usize) -> Result<Polynomial> {
        self.check_coeff(n)?;
        if n == 0 {
            return Ok(Polynomial::one());
        }
        Ok(self
            .weights(n)
            .into_iter()
            .enumerate()
            .fold(Polynomial::zero(), |acc, (k, w)| &acc + &self.p_coeffs[n - k].scale(w)))
    }

    /// Coefficients of `Q_n`, complex when `ζ_n` is.
    pub fn q(&self, n: usize) -> Result<Polynomial<Complex64>> {
        let h = self.qhat(n)?.to_complex();
        if n == 0 {
            return Ok(h);
        }
        Ok(&h - &Polynomial::constant(self.qhat_at_zeta(n)?))
    }

    /// `max|coeff(ℒ[Q_n] − λ_n L_n)| / max|coeff(λ_n L_n)|`. Not expected to
    /// be small for `n ≤ m`.
    pub fn ode_residual(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        let lhs = apply_l(&self.qhat(n)?, self.measure.params());
        let rhs = self.l_poly(n)?.scale(self.lambdas[n]);
        let scale = rhs.max_abs_coeff();
        Ok((&lhs - &rhs).max_abs_coeff() / scale)
    }

    /// `max_{k<n} |∫ ℒ[Q_n] x^k dμ| / (‖ℒ[Q_n]‖_μ ‖x^k‖_μ)`, with ℒ[Q_n]
    /// evaluated from recurrence values. The second component is the
    /// normalized `k = n` value, which stays of order one.
    pub fn orthogonality_residual(&self, n: usize) -> Result<(f64, f64)> {
        if n == 0 {
            return Err(Error::NotApplicable("orthogonality needs n >= 1"));
        }
        let params = self.measure.params();
        let rule = self.ip.converged_rule(2 * n + 2)?;
        let lq: Vec<f64> = rule
            .nodes
            .iter()
            .map(|&x| {
                let s = self.qhat_eval(n, Complex64::new(x, 0.0))?;
                Ok(apply_l_at(params, Complex64::new(x, 0.0), s.derivative(), s.second()).re)
            })
            .collect::<Result<_>>()?;
        let norm_l = libm::sqrt(rule.weights.iter().zip(&lq).map(|(w, v)| w * v * v).sum());
        let mut worst = 0.0f64;
        let mut top = 0.0;
        for k in 0..=n {
            let (mut s, mut nk) = (0.0, 0.0);
            for ((&x, &w), &v) in rule.nodes.iter().zip(&rule.weights).zip(&lq) {
                let xk = libm::pow(x, k as f64);
                s += w * v * xk;
                nk += w * xk * xk;
            }
            let r = s.abs() / (norm_l * libm::sqrt(nk));
            if k < n {
                worst = worst.max(r);
            } else {
                top = r;
            }
        }
        Ok((worst, top))
    }

    /// `max|coeff(ρ P_n − τ_n Σ_k (b_{n+k,n}/l_{n+k}) L_{n+k})|` relative to
    /// `max|coeff(ρ P_n)|`.
    pub fn rho_expansion_check(&self, n: usize) -> Result<f64> {
        let m = self.m();
        self.check_coeff(n + m)?;
        let lhs = self.measure.rho() * self.p_poly(n)?;
        let mut rhs = Polynomial::zero();
        for k in 0..=m {
            // τ_n b_{n+k,n} / l_{n+k} in orthonormal form
            let c = self.conn[n + k][n] * libm::sqrt(self.jacobi.norm(n) / self.lbasis.norm(n + k));
            rhs = &rhs + &self.l_coeffs[n + k].scale(c);
        }
        Ok((&lhs - &rhs).max_abs_coeff() / lhs.max_abs_coeff())
    }

    fn roots_of(&self, n: usize, which: Which) -> Result<RootSet> {
        let target = FamilyTarget { fam: self, n, which };
        if target.degree() == 0 {
            return Err(Error::Degenerate("root finding needs degree >= 1"));
        }
        aberth(&target, RootOptions::with_tol(ROOT_TOL))
    }

    /// Zeros of `Q_n`.
    pub fn q_roots(&self, n: usize) -> Result<RootSet> {
        self.roots_of(n, Which::Q)
    }

    /// Zeros of `Q̂_n`.
    pub fn qhat_roots(&self, n: usize) -> Result<RootSet> {
        self.roots_of(n, Which::Qhat)
    }

    /// Critical points of `Q_n` (zeros of `Q̂_n'`).
    pub fn dq_roots(&self, n: usize) -> Result<RootSet> {
        self.roots_of(n, Which::DQ)
    }

    /// Zeros of `L_n`.
    pub fn l_roots(&self, n: usize) -> Result<RootSet> {
        self.roots_of(n, Which::L)
    }

    /// Replaces `b_{n,n−k}` by `b_{n,n−k} + delta`. Fault injection for
    /// testing the verification layer.
    #[doc(hidden)]
    pub fn corrupt_b(&mut self, n: usize, k: usize, delta: f64) {
        self.b[n][k] += delta;
    }
}

#[derive(Debug, Clone, Copy)]
enum Which {
    Q,
    Qhat,
    DQ,
    L,
}

struct FamilyTarget<'a> {
    fam: &'a QFamily,
    n: usize,
    which: Which,
}

impl RootTarget for FamilyTarget<'_> {
    fn degree(&self) -> usize {
        match self.which {
            Which::DQ => self.n.saturating_sub(1),
            _ => self.n,
        }
    }

    /// Mantissas only: the common scale cancels in `p / p'` and in the residual.
    fn eval(&self, z: Complex64) -> PointEval {
        let s = match self.which {
            Which::Q => self.fam.q_eval(self.n, z),
            Which::Qhat | Which::DQ => self.fam.qhat_eval(self.n, z),
            Which::L => self.fam.l_eval(self.n, z),
        }
        .expect("degree checked when the family was built");
        let (value, derivative) = match self.which {
            Which::DQ => (s.v[1], s.v[2]),
            _ => (s.v[0], s.v[1]),
        };
        PointEval { value, derivative, scale: derivative.norm() * (1.0 + z.norm()) }
    }

    fn initial_radius(&self) -> f64 {
        match self.which {
            Which::Q => {
                let r = self.fam.zeta(self.n).map(|z| phi(z).norm()).unwrap_or(1.0);
                (r + 1.0 / r) / 2.0 + 0.1
            }
            _ => 1.1,
        }
    }

    fn derivative_guard(&self, _z: Complex64, _e: &PointEval) -> f64 {
        0.0
    }
}
