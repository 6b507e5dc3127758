//! The finite recurrence `R Q_n' = Σ_{k=−m−1}^{m+1} θ_{R,n,n−k} Q_{n−k}'`
//! for a primitive `R` of ρ, valid for `n > 2m + 1`.
//!
//! The coefficients are assembled from three pieces:
//!
//! ```text
//! θ_{R,n,n−k} = (λ_n e_{R,n,n−k} + d_{n,n−k}) / λ_{n−k}
//! e_{R,n,n−k} = (1/l_{n−k}) ∫ R L_{n−k} L_n dμ
//! d_{n,n−k}   = (1/l_{n−k}) Σ_{j=max(−1,k)}^{min(m+1,m+k)} τ_{n−j} c̃_{n,n−j} b_{n−k,n−j}
//! c̃_{n,n−k}   = λ_n Σ_{j=max(0,k−1)}^{min(m,k+1)} b_{n,n−j} c_{n−j,j−k} / λ_{n−j}
//! ```
//!
//! where `c_{p,s}` are the coefficients of `(1 − x²) P_p' = Σ_s c_{p,s} P_{p+s}`.
//! `d_{n,n−k}` is the `L_{n−k}` coefficient of `(1 − x²) ρ Q_n'`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::family::QFamily;
use crate::jacobi::structure_coeffs;
use crate::poly::Polynomial;
use crate::{Error, Result};

/// θ and its intermediates for one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaTable {
    pub n: usize,
    pub m: usize,
    pub r: Polynomial,
    /// `θ_{R,n,n−k}` at index `k + m + 1`, `k = −(m+1)..=m+1`.
    pub theta: Vec<f64>,
    /// `e_{R,n,n−k}`, same indexing.
    pub e: Vec<f64>,
    /// `d_{n,n−k}`, same indexing.
    pub d: Vec<f64>,
    /// `c̃_{n,n−k}` at index `k + 1`, `k = −1..=m+1`.
    pub c_tilde: Vec<f64>,
}

impl ThetaTable {
    fn idx(&self, k: i64) -> Option<usize> {
        let w = self.m as i64 + 1;
        (k.abs() <= w).then(|| (k + w) as usize)
    }

    /// `θ_{R,n,n−k}`, zero outside the window.
    pub fn theta_at(&self, k: i64) -> f64 {
        self.idx(k).map_or(0.0, |i| self.theta[i])
    }

    pub fn d_at(&self, k: i64) -> f64 {
        self.idx(k).map_or(0.0, |i| self.d[i])
    }

    pub fn e_at(&self, k: i64) -> f64 {
        self.idx(k).map_or(0.0, |i| self.e[i])
    }

    /// Window offsets `−(m+1)..=m+1`.
    pub fn offsets(&self) -> impl Iterator<Item = i64> {
        let w = self.m as i64 + 1;
        -w..=w
    }
}

/// The primitive of ρ vanishing at zero.
pub fn primitive(fam: &QFamily) -> Polynomial {
    fam.measure().rho().antiderivative(0.0)
}

fn at(n: usize, k: i64) -> usize {
    (n as i64 - k) as usize
}

/// `c̃_{n,n−k}`: the `P_{n−k}` coefficient of `(1 − x²) Q̂_n'`.
fn c_tilde(fam: &QFamily, n: usize, k: i64) -> Result<f64> {
    let m = fam.m() as i64;
    let b = fam.connection_coeffs(n)?;
    let params = fam.measure().params();
    let mut s = 0.0;
    for j in (k - 1).max(0)..=m.min(k + 1).min(n as i64) {
        let p = at(n, j);
        if p == 0 {
            // (1 − x²) P_0' = 0
            continue;
        }
        let c = structure_coeffs(p, params)?.get(j - k);
        s += b[j as usize] * c / fam.lambda(p);
    }
    Ok(fam.lambda(n) * s)
}

/// `d_{N,N−K}` by the summation formula for arbitrary integer `K`; empty sums
/// give zero.
pub fn d_formula(fam: &QFamily, big_n: usize, big_k: i64) -> Result<f64> {
    let m = fam.m() as i64;
    let lo = big_k.max(-1);
    let hi = (m + 1).min(m + big_k).min(big_n as i64);
    if lo > hi || big_k > big_n as i64 {
        return Ok(0.0);
    }
    let row = at(big_n, big_k);
    let mut s = 0.0;
    for j in lo..=hi {
        let col = at(big_n, j);
        s += fam.tau(col) * c_tilde(fam, big_n, j)? * fam.b_full(row, col)?;
    }
    Ok(s / fam.l_norm(row))
}

/// θ table for `n > 2m + 1` and a primitive `R` of ρ.
pub fn theta_coeffs(fam: &QFamily, n: usize, r: &Polynomial) -> Result<ThetaTable> {
    let m = fam.m();
    if n <= 2 * m + 1 {
        return Err(Error::NotApplicable("theta coefficients need n > 2m + 1"));
    }
    let mismatch = r.derivative().max_rel_diff(fam.measure().rho());
    if mismatch > 1e-12 {
        return Err(Error::PrimitiveMismatch { residual: mismatch });
    }
    let w = m as i64 + 1;
    if n + m + 1 > fam.top() {
        return Err(Error::OutOfRange { index: n + m + 1, limit: fam.top() });
    }

    let basis = fam.l_basis();
    let rule = fam.inner_product().converged_rule(2 * n + 3 * m + 3)?;
    let mut e = Vec::with_capacity(2 * m + 3);
    let lv: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| basis.orthonormal_values(n + m + 1, x)).collect();
    for k in -w..=w {
        let j = at(n, k);
        let s: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .zip(&lv)
            .map(|((&x, &wt), v)| wt * r.eval_real(x) * v[j] * v[n])
            .sum();
        e.push(s * libm::sqrt(fam.l_norm(n) / fam.l_norm(j)));
    }

    let c_t = (-1..=w).map(|k| c_tilde(fam, n, k)).collect::<Result<Vec<_>>>()?;
    let d = (-w..=w).map(|k| d_formula(fam, n, k)).collect::<Result<Vec<_>>>()?;
    let ln = fam.lambda(n);
    let theta = (-w..=w)
        .enumerate()
        .map(|(i, k)| (ln * e[i] + d[i]) / fam.lambda(at(n, k)))
        .collect();
    Ok(ThetaTable { n, m, r: r.clone(), theta, e, d, c_tilde: c_t })
}

/// `max|coeff(R Q_n' − Σ θ_{R,n,n−k} Q̂_{n−k}')| / max|coeff(R Q_n')|`.
pub fn recurrence_residual(fam: &QFamily, table: &ThetaTable) -> Result<f64> {
    let n = table.n;
    let lhs = &table.r * &fam.qhat(n)?.derivative();
    let mut rhs = Polynomial::zero();
    for k in table.offsets() {
        let j = at(n, k);
        rhs = &rhs + &fam.qhat(j)?.derivative().scale(table.theta_at(k));
    }
    Ok((&lhs - &rhs).max_abs_coeff() / lhs.max_abs_coeff())
}

/// Projection of `(1 − x²) ρ Q_n'` on the `L` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub n: usize,
    /// `D_k = ⟨(1 − x²) ρ Q_n', L_{n−k}⟩_μ / l_{n−k}` for `k` in the window.
    pub projected: Vec<f64>,
    /// Largest orthonormal coefficient outside the window relative to the
    /// μ-norm of the projected function.
    pub window_residual: f64,
    /// `max_k |D_k − d_{n,n−k}| / max_k |D_k|`.
    pub mismatch_d_n_nk: f64,
    /// `max_k |D_k − d_{n−k,k}| / max_k |D_k|`, the other index reading.
    pub mismatch_d_nk_k: f64,
}

/// Expands `(1 − x²) ρ Q_n'` in `L_0..L_{n+m+1}` by μ-inner products.
pub fn structure_identity_check(fam: &QFamily, n: usize) -> Result<StructureReport> {
    let m = fam.m();
    if n <= m + 1 {
        return Err(Error::NotApplicable("structure identity needs n > m + 1"));
    }
    let hi = n + m + 1;
    if hi > fam.top() {
        return Err(Error::OutOfRange { index: hi, limit: fam.top() });
    }
    let rho = fam.measure().rho();
    let basis = fam.l_basis();
    let rule = fam.inner_product().converged_rule(2 * hi)?;
    let mut coef = alloc::vec![0.0; hi + 1];
    let mut norm2 = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let dq = fam.qhat_eval(n, Complex64::new(x, 0.0))?.derivative().re;
        let f = (1.0 - x * x) * rho.eval_real(x) * dq;
        norm2 += w * f * f;
        for (c, v) in coef.iter_mut().zip(basis.orthonormal_values(hi, x)) {
            *c += w * f * v;
        }
    }
    let norm = libm::sqrt(norm2);
    let w = m as i64 + 1;
    let mut window_residual = 0.0f64;
    for (j, c) in coef.iter().enumerate() {
        let k = n as i64 - j as i64;
        if k.abs() > w {
            window_residual = window_residual.max(c.abs() / norm);
        }
    }
    let projected: Vec<f64> = (-w..=w)
        .map(|k| {
            let j = at(n, k);
            coef[j] / libm::sqrt(fam.l_norm(j))
        })
        .collect();
    let scale = projected.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut mis_a = 0.0f64;
    let mut mis_b = 0.0f64;
    for (i, k) in (-w..=w).enumerate() {
        let da = d_formula(fam, n, k)?;
        let db = d_formula(fam, at(n, k), n as i64 - 2 * k)?;
        mis_a = mis_a.max((projected[i] - da).abs() / scale);
        mis_b = mis_b.max((projected[i] - db).abs() / scale);
    }
    Ok(StructureReport { n, projected, window_residual, mismatch_d_n_nk: mis_a, mismatch_d_nk_k: mis_b })
}
