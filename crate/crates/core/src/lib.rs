//! Numerical free extreme value theory.
//!
//! The crate evaluates the classical and free extremal laws, computes
//! finite-n free order-statistic distributions through numerical free
//! additive convolution, evaluates the closed-form limit laws for free
//! order statistics, and verifies the underlying limit theorems and
//! operator inequalities on random matrices.
//!
//! Modules:
//! - [`measures`]: spectral measures, distribution functions, extremal laws,
//!   the free Poisson family, Lévy distance, eigenvalue functions.
//! - [`freeconv`]: moment/free-cumulant transforms and free additive
//!   convolution by analytic subordination.
//! - [`extremes`]: norming constants, finite-n free order statistics and
//!   their limit laws.
//! - [`matrixlab`]: random-matrix experiments checking the limit theorems
//!   and the deterministic operator inequalities at finite dimension.

pub mod error;
pub mod extremes;
pub mod freeconv;
pub mod matrixlab;
pub mod measures;
pub mod quad;

pub use error::{Error, Result};
pub use extremes::{
    classical_order_limit, finite_free_order_cdf, free_max_cdf, limit_free_order_cdf,
    norming_constants, order_thresholds, BaseDistribution, BaseFamily, NormalizationSchedule,
    OrderQuery, Thresholds,
};
pub use freeconv::{
    cumulants_to_moments, free_binomial, free_binomial_cdf, free_convolve,
    free_convolve_with_grid, mixed_moment, moments_from_measure, moments_to_cumulants,
    support_edges, CauchyGrid, FreeCumulantSeq, MomentSeq,
};
pub use measures::{
    eigenvalue_function, free_poisson, free_poisson_cdf, levy_distance, Cdf, EvtLaw, FreeEvtLaw,
    LawFamily, SizedPoissonFamily, SpectralMeasure,
};
