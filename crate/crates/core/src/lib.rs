//! Numerical laboratory for nonlocal elliptic operators of fractional
//! order: stable-kernel (star) and rough ellipticity classes, their Pucci
//! extremal operators, explicit sub/supersolution barriers, monotone
//! finite-difference Dirichlet solvers with policy iteration, and the
//! boundary-behavior measurement tools (quotient by the distance power,
//! dyadic oscillation decay, Holder-exponent regression).

pub mod analysis;
pub mod barriers;
pub mod error;
pub mod experiments;
pub mod extension;
pub mod flatten;
pub mod frac1d;
pub mod function;
pub mod geometry;
pub mod operators;
pub mod quad;
pub mod solver;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use function::{Evaluable, FarFieldModel, GridFunction, PowerProfile};
pub use geometry::{Domain, DomainKind, Grid, Point};
pub use operators::{EllipticityBounds, ExtremalSign, IsaacsOperator, KernelClass, KernelSpec};
pub use quad::QuadResult;
pub use spectral::{SphereRule, SpectralMeasure};
