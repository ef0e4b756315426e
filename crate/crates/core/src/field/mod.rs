//! Grid-sampled maps and the functionals evaluated on them.

pub mod certificate;
pub mod energy;
pub mod grid;
pub mod io;
pub mod perturb;
mod stencil;

pub use certificate::{
    discretization_budget, minimality_certificate, minimality_certificate_with, CertificateOptions, CertificateReport,
    CompetitorOutcome, Functional, TrialOutcome, Weight,
};
pub use energy::{
    dirichlet_energy, distortion_at, distortion_at_with, free_lagrangian, jacobian_integral, phi_distortion_energy,
    phi_distortion_energy_with, singular_value_distortion, DistortionNorm, FreeLagrangianKind, FreeLagrangianSpec,
    FreeLagrangianValue, PhiEnergy,
};
pub use grid::{Admissibility, GridMap, NodeClass, PolarGridMap, RectGridMap, BOUNDARY_TOL, DEGENERATE_TOL};
pub use perturb::{perturb_map, DEFAULT_AMPLITUDE, MAX_HALVINGS};
