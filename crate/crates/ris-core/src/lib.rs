//! Rate-independent bulk damage in finite-strain, second-gradient
//! hyperelasticity: a staggered time-stepping solver plus a certificate
//! suite that checks every provable property of the discrete solutions
//! (stability, semi-stability, energy inequality, Gronwall bound,
//! injectivity, determinant lower bound, vanishing regularization).

pub mod cli;
pub mod constitutive;
pub mod error;
pub mod field_io;
pub mod grid;
pub mod kinematics;
pub mod optim;
pub mod rothe;
pub mod tensor;
pub mod verify;

pub use error::{Result, RisError};
