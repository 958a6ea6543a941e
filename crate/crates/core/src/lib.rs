//! Exact symbolic engine for the de Rham and elasticity complexes.
//!
//! The crate builds, derives and machine-verifies null-homotopy (Poincaré)
//! and Koszul operators:
//!
//! - [`polycore`] — arbitrary-precision rationals, multivariate polynomials,
//!   and the exact radial Beta transform behind every weighted line integral;
//! - [`tensorfields`] — scalar/vector/matrix polynomial fields with validated
//!   symmetry tags and the pointwise operator algebra;
//! - [`diffcalc`] — grad/curl/div/def/inc/air with one fixed convention set;
//! - [`derham`] — E-valued differential forms, `d`, contraction, the Poincaré
//!   operator, and the vector/matrix proxies;
//! - [`bgg`] — the algebraic connecting operators, block complexes, homotopy
//!   transfer through commuting projections, the mechanical derivation of the
//!   elasticity Poincaré operators, and sign reconciliation against the
//!   closed forms;
//! - [`elasticity`] — the closed-form Poincaré and Koszul operators for the
//!   elasticity complex in 2D and 3D, plus rigid-motion utilities;
//! - [`pathintegral`] — numeric Cesàro–Volterra displacement recovery along
//!   arbitrary polyline paths, with path-independence and loop-defect
//!   diagnostics.

pub mod bgg;
pub mod derham;
pub mod diffcalc;
pub mod elasticity;
pub mod pathintegral;
pub mod polycore;
pub mod probe;
pub mod tensorfields;

pub use polycore::{Poly, Rat};
pub use tensorfields::TensorField;
