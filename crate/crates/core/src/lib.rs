//! Isometric immersions of hyperbolic disks (curvature −1) into R³.
//!
//! Four families are constructed: pseudosphere patches, hyperboloids of
//! revolution, small-slopes periodic saddles and periodic Amsler surfaces.
//! For each the bending energy of a geodesic disk is computed by quadrature
//! in geodesic polar coordinates. The `minimax` module bounds the curvature
//! any smooth immersion of a disk must reach, by optimizing over discrete
//! sine-Gordon solutions.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // !(x > 0.0) deliberately rejects NaN

pub mod amsler;
pub mod bfgs;
pub mod chebyshev;
pub mod elliptic;
pub mod error;
pub mod geodesic;
pub mod hyperboloid;
pub mod mesh;
pub mod minimax;
pub mod ode;
pub mod pendulum;
pub mod pseudosphere;
pub mod quadrature;
pub mod small_slopes;

pub use error::{Error, Result};
