//! Measures, distribution functions, the extremal laws, and the free
//! Poisson family.

pub mod cdf;
pub mod laws;
pub mod levy;
pub mod poisson;
pub mod spectral;

pub use cdf::Cdf;
pub use laws::{EvtLaw, FreeEvtLaw, LawFamily};
pub use levy::{eigenvalue_function, levy_distance};
pub use poisson::{
    free_poisson, free_poisson_cauchy, free_poisson_cdf, free_poisson_edges, free_poisson_pdf,
    SizedPoissonFamily,
};
pub use spectral::{CauchyFn, ContPart, ContSpec, MomentRoute, PdfFn, SpectralMeasure};
