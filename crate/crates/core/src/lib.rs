//! Ground states of the quantum Rabi model from a polaron/antipolaron
//! variational ansatz, with an exact-diagonalisation benchmark, Wigner
//! functions, negativities and spin/photon observables.

pub mod batch;
pub mod error;
pub mod exact_diag;
pub mod gaussian;
pub mod model;
pub mod observables;
pub mod optimize;
pub mod quadrature;
pub mod variational;
pub mod wigner;

pub use error::{Error, Result};
pub use exact_diag::{solve_ground, EDResult};
pub use model::ModelParams;
pub use variational::{minimize_ground, Ansatz, GroundStateSolution, MinimizeOptions, VariationalParams};
