//! Exact reference model: the composite master equation on a truncated
//! two-mode Fock space tensored with the three-level atom.

pub mod density;
pub mod gap;
pub mod liouvillian;
pub mod observables;
pub mod space;
pub mod sparse;
pub mod steady;

pub use density::DensityMatrix;
pub use gap::{approximation_gap, GapReport};
pub use liouvillian::{build_liouvillian, evolve, evolve_sampled, Liouvillian};
pub use observables::{ehrenfest_residuals, extract_moments, EhrenfestReport};
pub use space::{Level, TruncatedSpace};
pub use steady::{steady_state, steady_state_from};
