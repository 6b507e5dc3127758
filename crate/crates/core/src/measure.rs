//! Measures `dμ = ρ⁻¹ dμ_{α,β}` with `ρ` a polynomial positive on `[-1, 1]`,
//! their inner products and monic orthogonal polynomials `L_n`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::asymptotics::dist_to_interval;
use crate::jacobi::{BasisKind, JacobiParams, OrthoBasis};
use crate::poly::Polynomial;
use crate::quadrature::gauss_jacobi;
use crate::{Error, Result};

const GRID: usize = 4000;
pub const DEFAULT_NODE_BUDGET: usize = 1 << 14;
pub const DEFAULT_TOL: f64 = 1e-13;

/// Unchecked description `ρ(x) = r Π (x − ν_i)` plus the background Jacobi weight.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    pub params: JacobiParams,
    pub rho_lead: f64,
    pub rho_roots: Vec<Complex64>,
}

impl MeasureSpec {
    pub fn new(params: JacobiParams, rho_lead: f64, rho_roots: Vec<Complex64>) -> Self {
        MeasureSpec { params, rho_lead, rho_roots }
    }

    /// `ρ = r`, i.e. a constant multiple of the Jacobi measure.
    pub fn jacobi(params: JacobiParams, r: f64) -> Self {
        Self::new(params, r, Vec::new())
    }

    pub fn m(&self) -> usize {
        self.rho_roots.len()
    }

    /// Checks conjugate closure and strict positivity of `ρ` on `[-1, 1]`.
    pub fn validate(self) -> Result<Measure> {
        if !(self.rho_lead.is_finite() && self.rho_lead != 0.0) {
            return Err(Error::NonPositiveRho { at: 0.0, value: self.rho_lead });
        }
        let mut used = vec![false; self.rho_roots.len()];
        for i in 0..self.rho_roots.len() {
            if used[i] {
                continue;
            }
            let nu = self.rho_roots[i];
            let tol = 1e-12 * (1.0 + nu.norm());
            if nu.im.abs() <= tol {
                used[i] = true;
                continue;
            }
            let partner = (0..self.rho_roots.len())
                .find(|&j| j != i && !used[j] && (self.rho_roots[j] - nu.conj()).norm() <= tol);
            match partner {
                Some(j) => {
                    used[i] = true;
                    used[j] = true;
                }
                None => return Err(Error::ConjugationBroken { root_re: nu.re, root_im: nu.im }),
            }
        }
        let rho = rho_polynomial(self.rho_lead, &self.rho_roots);
        for nu in &self.rho_roots {
            if dist_to_interval(*nu) <= 1e-12 {
                let at = nu.re.clamp(-1.0, 1.0);
                return Err(Error::NonPositiveRho { at, value: rho.eval_real(at) });
            }
        }
        let probes = (0..=GRID)
            .map(|i| -1.0 + 2.0 * i as f64 / GRID as f64)
            .chain(self.rho_roots.iter().map(|nu| nu.re.clamp(-1.0, 1.0)));
        for x in probes {
            let v = rho.eval_real(x);
            if v.is_nan() || v <= 0.0 {
                return Err(Error::NonPositiveRho { at: x, value: v });
            }
        }
        Ok(Measure { spec: self, rho })
    }
}

fn rho_polynomial(lead: f64, roots: &[Complex64]) -> Polynomial {
    let c = Polynomial::from_roots(roots).scale(Complex64::new(lead, 0.0));
    Polynomial::new(c.coeffs().iter().map(|z| z.re).collect())
}

/// A validated member of the class: `ρ > 0` on `[-1, 1]`, roots conjugate-closed.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    spec: MeasureSpec,
    rho: Polynomial,
}

impl Measure {
    pub fn spec(&self) -> &MeasureSpec {
        &self.spec
    }

    pub fn params(&self) -> JacobiParams {
        self.spec.params
    }

    pub fn m(&self) -> usize {
        self.spec.m()
    }

    pub fn rho(&self) -> &Polynomial {
        &self.rho
    }

    pub fn rho_lead(&self) -> f64 {
        self.spec.rho_lead
    }

    pub fn rho_roots(&self) -> &[Complex64] {
        &self.spec.rho_roots
    }

    /// Gauss–Jacobi nodes with weights divided by `ρ`.
    pub fn discretize(&self, nodes: usize) -> Result<DiscreteMeasure> {
        let q = gauss_jacobi(nodes, self.params())?;
        let weights = q.nodes.iter().zip(&q.weights).map(|(&x, &w)| w / self.rho.eval_real(x)).collect();
        Ok(DiscreteMeasure { nodes: q.nodes, weights })
    }
}

/// Finitely supported approximation of μ.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(Σ w f, Σ w |f|)`.
    pub fn sum_with_scale<F: FnMut(f64) -> f64>(&self, mut f: F) -> (f64, f64) {
        self.nodes.iter().zip(&self.weights).fold((0.0, 0.0), |(s, a), (&x, &w)| {
            let v = w * f(x);
            (s + v, a + v.abs())
        })
    }
}

/// μ-inner products by Gauss–Jacobi quadrature with node doubling.
///
/// Rules up to `cache_nodes` are built once at construction and reused;
/// larger rules are built on demand.
#[derive(Debug, Clone)]
pub struct MuInnerProduct {
    measure: Measure,
    node_budget: usize,
    tol: f64,
    ladder: Vec<DiscreteMeasure>,
}

const FIRST_RULE: usize = 32;

impl MuInnerProduct {
    pub fn new(measure: Measure) -> Result<Self> {
        Self::with_options(measure, DEFAULT_NODE_BUDGET, DEFAULT_TOL, 512)
    }

    pub fn with_options(measure: Measure, node_budget: usize, tol: f64, cache_nodes: usize) -> Result<Self> {
        let mut ladder = Vec::new();
        let mut n = FIRST_RULE;
        while n <= cache_nodes.min(node_budget) {
            ladder.push(measure.discretize(n)?);
            n *= 2;
        }
        Ok(MuInnerProduct { measure, node_budget, tol, ladder })
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn node_budget(&self) -> usize {
        self.node_budget
    }

    fn rule(&self, nodes: usize) -> Result<alloc::borrow::Cow<'_, DiscreteMeasure>> {
        let level = (nodes / FIRST_RULE).trailing_zeros() as usize;
        match self.ladder.get(level) {
            Some(r) if r.len() == nodes => Ok(alloc::borrow::Cow::Borrowed(r)),
            _ => Ok(alloc::borrow::Cow::Owned(self.measure.discretize(nodes)?)),
        }
    }

    /// First rule size that integrates polynomials of degree `degree` times the
    /// smooth factor `ρ⁻¹` with margin to spare.
    fn start_nodes(&self, degree: usize) -> usize {
        let mut n = FIRST_RULE;
        while n < degree / 2 + 16 {
            n *= 2;
        }
        n
    }

    /// `∫ f dμ` for an integrand that is a polynomial of degree at most
    /// `degree` (values supplied by `f`), doubling nodes until two successive
    /// rules agree to `tol` relative to `∫ |f| dμ`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, degree: usize, mut f: F) -> Result<f64> {
        let mut n = self.start_nodes(degree);
        let (mut prev, _) = self.rule(n)?.sum_with_scale(&mut f);
        let mut change = f64::INFINITY;
        while 2 * n <= self.node_budget {
            n *= 2;
            let (cur, scale) = self.rule(n)?.sum_with_scale(&mut f);
            change = (cur - prev).abs();
            if change <= self.tol * scale {
                return Ok(cur);
            }
            prev = cur;
        }
        Err(Error::BudgetExceeded { nodes: n, change })
    }

    /// `⟨f, g⟩_μ`.
    pub fn inner(&self, f: &Polynomial, g: &Polynomial) -> Result<f64> {
        let deg = f.degree().unwrap_or(0) + g.degree().unwrap_or(0);
        self.integrate(deg, |x| f.eval_real(x) * g.eval_real(x))
    }

    /// A rule large enough for `integrate(degree, ..)` to have converged; used
    /// when many integrals share one discretization.
    pub fn converged_rule(&self, degree: usize) -> Result<DiscreteMeasure> {
        let probe = |x: f64| libm::cos(degree as f64 * libm::acos(x)) + 1.0;
        let mut n = self.start_nodes(degree);
        let (mut prev, _) = self.rule(n)?.sum_with_scale(probe);
        while 2 * n <= self.node_budget {
            let (cur, scale) = self.rule(2 * n)?.sum_with_scale(probe);
            if (cur - prev).abs() <= self.tol * scale {
                return Ok(self.rule(2 * n)?.into_owned());
            }
            prev = cur;
            n *= 2;
        }
        Err(Error::BudgetExceeded { nodes: n, change: f64::NAN })
    }
}

/// Monic orthogonal polynomials `L_0..=L_{max_degree}` of μ by the
/// discretized Stieltjes procedure (run in orthonormal form), repeated on
/// doubled rules until the recurrence coefficients settle.
pub fn stieltjes(ip: &MuInnerProduct, max_degree: usize) -> Result<OrthoBasis> {
    let mut n = ip.start_nodes(2 * max_degree + 2);
    let mut prev = stieltjes_discrete(&*ip.rule(n)?, max_degree);
    let settle = (10.0 * ip.tol).max(1e-13);
    let mut change = f64::INFINITY;
    while 2 * n <= ip.node_budget {
        n *= 2;
        let cur = stieltjes_discrete(&*ip.rule(n)?, max_degree);
        change = max_coefficient_change(&prev, &cur);
        if change <= settle {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::BudgetExceeded { nodes: n, change })
}

fn max_coefficient_change(a: &OrthoBasis, b: &OrthoBasis) -> f64 {
    let da = a.a().iter().zip(b.a()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let db = a.b().iter().zip(b.b()).skip(1).map(|(x, y)| (x - y).abs() / y.abs()).fold(0.0, f64::max);
    let dn = (a.norm(0) - b.norm(0)).abs() / b.norm(0);
    da.max(db).max(dn)
}

/// Stieltjes recursion on a discrete measure.
pub fn stieltjes_discrete(dm: &DiscreteMeasure, max_degree: usize) -> OrthoBasis {
    let len = max_degree + 1;
    let mut a = Vec::with_capacity(len);
    let mut b = Vec::with_capacity(len);
    let mut norms = Vec::with_capacity(len);
    let mass: f64 = dm.weights.iter().sum();
    let mut u: Vec<f64> = vec![1.0 / libm::sqrt(mass); dm.len()];
    let mut u_prev: Vec<f64> = vec![0.0; dm.len()];
    b.push(0.0);
    norms.push(mass);
    for k in 0..len {
        let ak: f64 = dm.nodes.iter().zip(&dm.weights).zip(&u).map(|((x, w), v)| w * x * v * v).sum();
        a.push(ak);
        if k + 1 == len {
            break;
        }
        let sb = if k == 0 { 0.0 } else { libm::sqrt(b[k]) };
        let mut next: Vec<f64> =
            dm.nodes.iter().zip(&u).zip(&u_prev).map(|((x, v), vp)| (x - ak) * v - sb * vp).collect();
        let bk: f64 = next.iter().zip(&dm.weights).map(|(v, w)| w * v * v).sum();
        let s = 1.0 / libm::sqrt(bk);
        for v in next.iter_mut() {
            *v *= s;
        }
        b.push(bk);
        norms.push(norms[k] * bk);
        u_prev = core::mem::replace(&mut u, next);
    }
    OrthoBasis::from_parts(a, b, norms, BasisKind::MeasureDerived)
}

/// `l_n = ∫ L_n² dμ`.
pub fn l_norm(n: usize, basis: &OrthoBasis) -> Result<f64> {
    basis
        .norms()
        .get(n)
        .copied()
        .ok_or(Error::OutOfRange { index: n, limit: basis.max_degree() })
}
