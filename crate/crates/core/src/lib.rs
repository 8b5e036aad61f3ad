//! Planar n-body systems with dihedral-invariant quadratic couplings.
//!
//! The crate computes normal-mode spectra, evolves motions exactly through
//! Fourier normal coordinates and numerically with velocity Verlet, decides
//! periodicity, cyclic equivariance and single-trace choreography, designs
//! couplings for prescribed frequency ratios, and sweeps coupling space.
//!
//! Particle indices are 0-based in the API and 1-based in reports and files.

pub mod closed_form;
pub mod dynamics;
pub mod model;
pub mod modes;
pub mod resonance;
pub mod scan;
pub mod scenario;
pub mod state;
pub mod traces;

pub use model::{Branch, Convention, Couplings, Exact, ModelError, Spectrum, SystemSpec};
pub use resonance::{classify, Category, Classification, Tolerances};
pub use scenario::Scenario;
pub use state::{PhaseState, Vec2};
