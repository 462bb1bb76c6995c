pub mod atom;
pub mod cli;
pub mod error;
pub mod fock;
pub mod moments;
pub mod params;
pub mod quadrature;
pub mod rk4;

pub use error::{Error, Result};
pub use params::SystemParams;
