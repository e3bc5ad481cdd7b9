//! Numerical and exact-algebraic toolkit for period functions of Maass
//! wave forms twisted by finite-dimensional representations of the
//! modular group.

pub mod error;
pub mod group_algebra;
pub mod l_functions;
pub mod lewis_transform;
pub mod maass_forms;
pub mod modular_group;
pub mod quadrature;
pub mod representations;
pub mod scalar;
pub mod special_functions;
pub mod transfer_operator;
pub mod zeta_asymptotics;

pub use error::{Error, ErrorClass, Result};
pub use num_complex::Complex64;
