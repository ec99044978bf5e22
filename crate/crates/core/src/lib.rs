//! Geometric progression states on Cuntz algebras: word arithmetic, the
//! geometric progression embeddings, closed-form evaluation, classification
//! and the equivalence decision, with an independent moment oracle.
//!
//! Everything numeric is generic over [`scalar::Real`]; the aliases below fix
//! `f64`, which is what the command-line front end uses.

pub mod cli;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod format;
pub mod linalg;
pub mod matrix;
pub mod oracle;
pub mod params;
pub mod scalar;
pub mod special;
pub mod word;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
pub type FiniteParam = params::FiniteGpParam<f64>;
pub type CuntzVector = params::CuntzParam<f64>;
pub type L2Param = params::L2GpParam<f64>;
pub type State = params::GpState<f64>;
pub type Polynomial = word::NcPolynomial<C64>;
pub type Unitary = matrix::SquareMatrix<C64>;
