//! Numerical laboratory for the half-wave maps equation u_t = u ∧ D¹u on
//! periodic tori: spectral operators, norms, Leibniz-rule commutators,
//! time integration and the associated wave problem.

pub mod commutator;
pub mod dump;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod grid;
pub mod harness;
pub mod norms;
pub mod random;
pub mod spectral;
pub mod wave;

pub use error::{Error, Result};
pub use field::{ScalarField, SphereField, VectorField3};
pub use grid::TorusGrid;
