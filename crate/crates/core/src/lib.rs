//! Six-vertex model with one reflecting end and domain-wall boundaries.
//!
//! The partition function is computed two independent ways: directly from
//! products of double-row operators ([`oracle`]) and as a residue sum over
//! permutations ([`integral`]). The remaining modules check the functional
//! equation it satisfies, its polynomial structure and the differential
//! equations derived from it.
//!
//! Everything is generic over the real scalar ([`Real`]); the aliases below
//! fix it to `f64` (reference precision) or `f32`.

pub mod algebra;
pub mod error;
pub mod functional;
pub mod integral;
pub mod interp;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod pde;
pub mod poly;
pub mod relations;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod suite;

pub use algebra::{BlockSet, DoubleRow, ModelParams, Row, SINGULARITY_GUARD};
pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
pub use oracle::SpectralPoint;
pub use poly::PolyRep;
pub use report::{CheckRow, VerificationReport};
pub use scalar::Real;

use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMatrix = Matrix<f64>;
pub type CVector = Vector<f64>;
pub type Params = ModelParams<f64>;
pub type Point = SpectralPoint<f64>;
pub type Poly = PolyRep<f64>;

pub type C32 = Complex<f32>;
pub type CMatrix32 = Matrix<f32>;
pub type CVector32 = Vector<f32>;
pub type Params32 = ModelParams<f32>;
