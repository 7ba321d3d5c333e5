//! Newton's method on Grassmann and Lagrange-Grassmann manifolds, with points
//! represented as symmetric projection matrices.

pub mod cli;
pub mod costs;
pub mod error;
pub mod grassmann;
pub mod lagrange;
pub mod linalg;
pub mod newton;
pub mod random;
pub mod scalar;
pub mod solvers;
pub mod tolerances;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use scalar::Real;
pub use tolerances::Tolerances;

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type Projector64 = grassmann::Projector<f64>;
pub type Projector32 = grassmann::Projector<f32>;
pub type OrthoFrame64 = grassmann::OrthoFrame<f64>;
pub type OrthoFrame32 = grassmann::OrthoFrame<f32>;
pub type LagProjector64 = lagrange::LagProjector<f64>;
pub type LagProjector32 = lagrange::LagProjector<f32>;
pub type SymplecticFrame64 = lagrange::SymplecticFrame<f64>;
pub type SymplecticFrame32 = lagrange::SymplecticFrame<f32>;
