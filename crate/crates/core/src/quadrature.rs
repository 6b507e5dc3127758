//! Gauss–Jacobi and Gauss–Chebyshev rules.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::jacobi::{jacobi_recurrence, JacobiParams, OrthoBasis};
use crate::{Error, Result};

/// `N`-point Gauss rule for `dμ_{α,β}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub params: JacobiParams,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i f(x_i)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss–Jacobi nodes and weights.
///
/// Nodes are eigenvalues of the Jacobi matrix (implicit QL), polished by
/// Newton steps on recurrence values. Weights are Christoffel numbers
/// `1 / Σ_{k<N} p̃_k(x)²` of the orthonormal family, equal to the monic
/// formula `τ_{N−1} / (P_{N−1}(x) P_N'(x))` but free of the `4^{−N}`
/// underflow of monic values and of cancellation near the endpoints.
pub fn gauss_jacobi(n: usize, params: JacobiParams) -> Result<Quadrature> {
    if n == 0 {
        return Err(Error::Degenerate("quadrature needs at least one node"));
    }
    let basis = jacobi_recurrence(params, n);
    gauss_from_basis(&basis, n).map(|(nodes, weights)| Quadrature { nodes, weights, params })
}

/// Gauss rule of any monic basis whose zeros lie in `(−1, 1)`.
pub(crate) fn gauss_from_basis(basis: &OrthoBasis, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut nodes: Vec<f64> = basis.a()[..n].to_vec();
    let mut off: Vec<f64> = (0..n).map(|k| if k + 1 < n { libm::sqrt(basis.b()[k + 1]) } else { 0.0 }).collect();
    tridiagonal_eigenvalues(&mut nodes, &mut off)?;
    nodes.sort_by(f64::total_cmp);
    for i in 0..n {
        let gap = neighbour_gap(&nodes, i);
        let mut x = nodes[i];
        let mut last = f64::INFINITY;
        for _ in 0..4 {
            let (_, p, dp) = basis.eval_orthonormal(n, x);
            if dp == 0.0 {
                break;
            }
            let dx = p / dp;
            if !(dx.abs() < last && dx.abs() < 0.5 * gap) {
                break;
            }
            x -= dx;
            last = dx.abs();
            if last <= f64::EPSILON {
                break;
            }
        }
        nodes[i] = x;
    }
    for w in nodes.windows(2) {
        if w[1].is_nan() || w[1] <= w[0] {
            return Err(Error::NonConvergence { what: "Gauss nodes collided", residual: w[1] - w[0], iterations: 0 });
        }
    }
    if !(nodes[0] > -1.0 && nodes[n - 1] < 1.0) {
        return Err(Error::NonConvergence { what: "Gauss node outside (-1,1)", residual: nodes[0].min(-nodes[n - 1]), iterations: 0 });
    }
    let weights = nodes
        .iter()
        .map(|&x| 1.0 / basis.orthonormal_values(n - 1, x).iter().map(|v| v * v).sum::<f64>())
        .collect();
    Ok((nodes, weights))
}

fn neighbour_gap(xs: &[f64], i: usize) -> f64 {
    let left = if i > 0 { xs[i] - xs[i - 1] } else { f64::INFINITY };
    let right = if i + 1 < xs.len() { xs[i + 1] - xs[i] } else { f64::INFINITY };
    left.min(right).min(1.0)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e[0..n−1]` (`e[n−1]` ignored), by implicit QL with
/// Wilkinson shifts. Results overwrite `d`, unsorted.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n > 0 {
        e[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence { what: "tridiagonal QL", residual: e[l].abs(), iterations: iter });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + libm::copysign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// `N`-point Gauss–Chebyshev rule for `dx / √(1 − x²)`: equal weights `π/N`.
pub fn gauss_chebyshev(n: usize) -> (Vec<f64>, f64) {
    let nodes = (1..=n)
        .map(|i| libm::cos((2.0 * i as f64 - 1.0) * PI / (2.0 * n as f64)))
        .collect();
    (nodes, PI / n as f64)
}
