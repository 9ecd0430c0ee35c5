//! Character expansions of determinant kernels on the compact classical
//! groups U(n), O(2n), and Sp(n).

pub mod blowup;
pub mod calibration;
pub mod characters;
pub mod coefficients;
pub mod error;
pub mod identities;
pub mod kernels;
pub mod linalg;
pub mod mobius;
pub mod quadrature;
pub mod signatures;
pub mod special;

pub use error::{Error, Result};
