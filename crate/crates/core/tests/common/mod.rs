//! Reference measures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use opdiff_core::theta::ThetaTable;
use opdiff_core::{Complex64, JacobiParams, MeasureSpec, Polynomial, QFamily, ZetaSeq};

pub const ZETA: f64 = 3.5;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub struct Named {
    pub name: &'static str,
    pub alpha: f64,
    pub beta: f64,
    pub lead: f64,
    pub roots: Vec<f64>,
}

impl Named {
    pub fn m(&self) -> usize {
        self.roots.len()
    }

    pub fn spec(&self) -> MeasureSpec {
        let roots = self.roots.iter().map(|&r| c(r, 0.0)).collect();
        MeasureSpec::new(JacobiParams::new(self.alpha, self.beta).unwrap(), self.lead, roots)
    }

    pub fn family(&self, n_max: usize) -> QFamily {
        QFamily::build(self.spec().validate().unwrap(), ZetaSeq::Constant(c(ZETA, 0.0)), n_max).unwrap()
    }
}

pub fn m0() -> Named {
    Named { name: "M0", alpha: 0.0, beta: 0.0, lead: 1.0, roots: vec![] }
}

pub fn m1() -> Named {
    Named { name: "M1", alpha: 0.0, beta: 0.0, lead: -1.0, roots: vec![2.0] }
}

pub fn m1b() -> Named {
    Named { name: "M1b", alpha: 0.5, beta: -0.25, lead: -1.0, roots: vec![2.0] }
}

pub fn m2() -> Named {
    Named { name: "M2", alpha: 0.0, beta: 0.0, lead: -1.0, roots: vec![2.0, -2.0] }
}

pub fn m3() -> Named {
    Named { name: "M3", alpha: 0.0, beta: 0.0, lead: 1.0, roots: vec![2.0, 2.0, -2.0] }
}

pub fn all_measures() -> Vec<Named> {
    vec![m0(), m1(), m1b(), m2(), m3()]
}

/// `∫ x^k (1−x)^α (1+x)^β dx` for `k ≤ kmax`, from the Beta-function mass and
/// `M_{k+1} (α+β+2+k) = k M_{k−1} + (β−α) M_k`.
pub fn jacobi_moments(alpha: f64, beta: f64, kmax: usize) -> Vec<f64> {
    let mass = libm::exp(
        (alpha + beta + 1.0) * core::f64::consts::LN_2 + libm::lgamma(alpha + 1.0) + libm::lgamma(beta + 1.0)
            - libm::lgamma(alpha + beta + 2.0),
    );
    let mut m = vec![mass];
    for k in 0..kmax {
        let prev = if k == 0 { 0.0 } else { m[k - 1] };
        m.push((k as f64 * prev + (beta - alpha) * m[k]) / (alpha + beta + 2.0 + k as f64));
    }
    m
}

/// Monic Legendre coefficients from the explicit sum
/// `x^{n−2k}` ↦ `(−1)^k C(n,k) C(2n−2k,n) / C(2n,n)`.
pub fn monic_legendre(n: usize) -> Vec<f64> {
    let ln_binom = |a: usize, b: usize| {
        libm::lgamma(a as f64 + 1.0) - libm::lgamma(b as f64 + 1.0) - libm::lgamma((a - b) as f64 + 1.0)
    };
    let mut out = vec![0.0; n + 1];
    for k in 0..=n / 2 {
        let mag = libm::exp(ln_binom(n, k) + ln_binom(2 * n - 2 * k, n) - ln_binom(2 * n, n));
        out[n - 2 * k] = if k % 2 == 0 { mag } else { -mag };
    }
    out
}

/// Monic orthogonal polynomials (ascending coefficients) for the moment
/// sequence `mom`, by Gram–Schmidt on monomials with exact Hankel arithmetic.
pub fn gram_schmidt(mom: &[f64], nmax: usize) -> Vec<Vec<f64>> {
    let ip = |a: &[f64], b: &[f64]| {
        let mut s = 0.0;
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                s += x * y * mom[i + j];
            }
        }
        s
    };
    let mut out: Vec<Vec<f64>> = Vec::new();
    for n in 0..=nmax {
        let mut v = vec![0.0; n + 1];
        v[n] = 1.0;
        for p in &out {
            let coef = ip(&v, p) / ip(p, p);
            for (i, x) in p.iter().enumerate() {
                v[i] -= coef * x;
            }
        }
        out.push(v);
    }
    out
}

/// Monomial moments of `dx / (2 − x)` on `[-1, 1]`:
/// `I_0 = ln 3`, `I_k = 2 I_{k−1} − ∫ x^{k−1} dx`.
pub fn m1_moments(kmax: usize) -> Vec<f64> {
    let leb = jacobi_moments(0.0, 0.0, kmax);
    let mut i = vec![libm::log(3.0)];
    for k in 1..=kmax {
        i.push(2.0 * i[k - 1] - leb[k - 1]);
    }
    i
}

/// Solves `ℒ[y] = rhs` in monomial coefficients. `ℒ[x^j] = λ_j x^j + (β−α) j x^{j−1}
/// + j(j−1) x^{j−2}` is upper triangular with `λ_0 = 0`; the free constant is
/// fixed by `∫ y dμ_{α,β} = 0`.
pub fn solve_l(rhs: &[f64], alpha: f64, beta: f64) -> Vec<f64> {
    let n = rhs.len() - 1;
    let lam = |j: usize| -(j as f64) * (j as f64 + 1.0 + alpha + beta);
    let mut y = vec![0.0; n + 1];
    for j in (1..=n).rev() {
        // coefficient of x^j in ℒ[y] gets λ_j y_j + (β−α)(j+1) y_{j+1} + (j+2)(j+1) y_{j+2}
        let mut s = rhs[j];
        if j < n {
            s -= (beta - alpha) * (j as f64 + 1.0) * y[j + 1];
        }
        if j + 1 < n {
            s -= (j as f64 + 2.0) * (j as f64 + 1.0) * y[j + 2];
        }
        y[j] = s / lam(j);
    }
    let mom = jacobi_moments(alpha, beta, n);
    y[0] = -(1..=n).map(|j| y[j] * mom[j]).sum::<f64>() / mom[0];
    y
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).map(|x| x.abs()).fold(0.0, f64::max);
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
        / scale
}

/// Least-squares `θ` with `R Q̂_n' ≈ Σ_k θ_k Q̂_{n−k}'` over the window, fitted
/// on Chebyshev points of `[-1, 1]` with column equilibration.
pub fn theta_fit(fam: &QFamily, table: &ThetaTable) -> Vec<f64> {
    let n = table.n;
    let ks: Vec<i64> = table.offsets().collect();
    let derivs: Vec<Polynomial> = ks.iter().map(|&k| fam.qhat((n as i64 - k) as usize).unwrap().derivative()).collect();
    let lhs = &table.r * &fam.qhat(n).unwrap().derivative();
    let pts = 8 * (n + ks.len());
    let xs: Vec<f64> = (0..pts)
        .map(|i| libm::cos(core::f64::consts::PI * (i as f64 + 0.5) / pts as f64))
        .collect();
    let mut a = DMatrix::<f64>::zeros(pts, ks.len());
    let mut b = DVector::<f64>::zeros(pts);
    for (i, &x) in xs.iter().enumerate() {
        for (j, d) in derivs.iter().enumerate() {
            a[(i, j)] = d.eval_real(x);
        }
        b[i] = lhs.eval_real(x);
    }
    let scales: Vec<f64> = (0..ks.len()).map(|j| a.column(j).norm()).collect();
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let sol = a.svd(true, true).solve(&b, 1e-14).unwrap();
    sol.iter().zip(&scales).map(|(v, s)| v / s).collect()
}

/// Counts steps where `seq` increases by more than `slack` (relative).
pub fn increases(seq: &[f64], slack: f64) -> usize {
    seq.windows(2).filter(|w| w[1] > w[0] * (1.0 + slack)).count()
}
