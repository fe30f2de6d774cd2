//! Numerical laboratory for the unfolding of a Bykov heteroclinic attractor.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds the saddle-focus data, the perturbation pair `(Φ₁, Φ₂)`,
//!   the local and transition maps and the composed first return map.
//! * [`circle`] holds the singular-limit circle-map family `h_a` together with
//!   critical sets, Misiurewicz and Collet-Eckmann certificates, rotation
//!   intervals, transition matrices and the superstable-orbit search.
//! * [`audit`] runs the rank-one hypothesis suite (H1)–(H7).
//! * [`orbit`] iterates the return map and estimates Lyapunov exponents,
//!   time averages, correlations and regime labels over parameter grids.
//! * [`io`] loads configs and writes CSV, JSON and SVG outputs; [`commands`]
//!   glues those to the CLI.

pub mod audit;
pub mod circle;
pub mod commands;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod orbit;
pub mod verdict;

pub use error::{Error, Result};
pub use linalg::Mat2;
pub use verdict::{Outcome, Verdict, Witness};
pub use model::{
    CylinderPoint, DerivedConstants, ModelParams, Perturbation, ReturnMap, SaddleFocus,
};
