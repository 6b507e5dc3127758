use core::fmt;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Jacobi parameters outside `α, β > −1`.
    InvalidParams { alpha: f64, beta: f64 },
    /// `ρ ≤ 0` somewhere on `[-1, 1]`.
    NonPositiveRho { at: f64, value: f64 },
    /// The roots of `ρ` are not closed under conjugation.
    ConjugationBroken { root_re: f64, root_im: f64 },
    /// Iterative root finding did not reach the requested residual.
    NonConvergence { what: &'static str, residual: f64, iterations: usize },
    /// Quadrature node doubling hit the node budget.
    BudgetExceeded { nodes: usize, change: f64 },
    /// A quantity was requested on or too close to the cut `[-1, 1]`.
    BranchCut { re: f64, im: f64 },
    /// `2n + α + β ∈ {0, ±1}` in a structure-relation coefficient.
    DegenerateDenominator { n: usize },
    /// A primitive `R` with `R' ≠ ρ`.
    PrimitiveMismatch { residual: f64 },
    /// `τ_n` over- or underflows `f64`; the logarithm is carried instead.
    Overflow { ln_value: f64 },
    /// A requested degree or index lies outside what was built.
    OutOfRange { index: usize, limit: usize },
    /// Operation defined only for a narrower set of inputs.
    NotApplicable(&'static str),
    /// Ellipse geometry requested for a point of `[-1, 1]`.
    OnInterval { re: f64, im: f64 },
    /// A velocity requested at a source or endpoint singularity.
    PoleAt { re: f64, im: f64 },
    /// Degree zero or vanishing leading coefficient passed to a root finder.
    Degenerate(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams { alpha, beta } => {
                write!(f, "Jacobi parameters must satisfy alpha, beta > -1 (got {alpha}, {beta})")
            }
            Error::NonPositiveRho { at, value } => {
                write!(f, "rho is not positive on [-1,1]: rho({at}) = {value}")
            }
            Error::ConjugationBroken { root_re, root_im } => {
                write!(f, "rho roots are not conjugate-closed: {root_re}{root_im:+}i has no partner")
            }
            Error::NonConvergence { what, residual, iterations } => {
                write!(f, "{what} did not converge after {iterations} iterations (residual {residual:e})")
            }
            Error::BudgetExceeded { nodes, change } => {
                write!(f, "quadrature node budget {nodes} exhausted (last change {change:e})")
            }
            Error::BranchCut { re, im } => write!(f, "point {re}{im:+}i lies on the cut [-1,1]"),
            Error::DegenerateDenominator { n } => {
                write!(f, "structure coefficient denominator vanishes at n = {n}")
            }
            Error::PrimitiveMismatch { residual } => {
                write!(f, "R is not a primitive of rho (residual {residual:e})")
            }
            Error::Overflow { ln_value } => write!(f, "value exp({ln_value}) is not representable"),
            Error::OutOfRange { index, limit } => write!(f, "index {index} outside built range 0..={limit}"),
            Error::NotApplicable(why) => write!(f, "not applicable: {why}"),
            Error::OnInterval { re, im } => write!(f, "{re}{im:+}i lies on [-1,1]; no ellipse through it"),
            Error::PoleAt { re, im } => write!(f, "pole at {re}{im:+}i"),
            Error::Degenerate(why) => write!(f, "degenerate input: {why}"),
        }
    }
}

impl core::error::Error for Error {}
