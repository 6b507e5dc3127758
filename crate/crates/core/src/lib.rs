//! Monic polynomials orthogonal with respect to the pair (ℒ, μ), where ℒ is the
//! Jacobi differential operator
//!
//! ```text
//! ℒ[f] = (1 − x²) f'' + (β − α − (α + β + 2) x) f'
//! ```
//!
//! and `dμ = ρ⁻¹ dμ_{α,β}` for a polynomial `ρ` of degree `m` that is positive on
//! `[-1, 1]`. The crate builds the families `Q̂_n` and `Q_n`, the recurrence for
//! `Q_n'`, verification residuals, asymptotic diagnostics and the source /
//! stagnation-point flow model.
//!
//! The crate is `no_std` and only needs `alloc`. IO, configuration and file
//! formats live in the `opdiff` companion crate.
//!
//! ```
//! use opdiff_core::{JacobiParams, MeasureSpec, QFamily, ZetaSeq};
//! use num_complex::Complex64;
//!
//! // ρ(x) = 2 − x, Lebesgue background
//! let mu = MeasureSpec::new(JacobiParams::new(0.0, 0.0).unwrap(), -1.0, vec![Complex64::new(2.0, 0.0)])
//!     .validate()
//!     .unwrap();
//! let fam = QFamily::build(mu, ZetaSeq::Constant(Complex64::new(3.5, 0.0)), 12).unwrap();
//! assert!(fam.ode_residual(6).unwrap() < 1e-8);
//! ```
#![no_std]

extern crate alloc;

mod error;

pub mod asymptotics;
pub mod family;
pub mod flow;
pub mod jacobi;
pub mod measure;
pub mod poly;
pub mod quadrature;
pub mod roots;
pub mod theta;

pub use error::Error;
pub use family::{QFamily, ZetaSeq};
pub use jacobi::{JacobiParams, OrthoBasis};
pub use measure::{Measure, MeasureSpec, MuInnerProduct};
pub use poly::Polynomial;
pub use quadrature::Quadrature;
pub use roots::RootSet;

pub use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;
