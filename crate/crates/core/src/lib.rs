//! Exact operator calculus for the quantum Kepler problem on the superspace
//! `R^{D|2n}` and its `osp(2, D+1|2n)` dynamical supersymmetry.
//!
//! The crate is organised bottom-up:
//!
//! * [`scalar`] and [`supercore`]: Gaussian rationals, Grassmann words, super-polynomials, the metric.
//! * [`superweyl`]: normal-ordered differential operators localized at the radial element `R`.
//! * [`superfunctions`]: the function class `Σ P·R^k·e^{-cR}` on which operators act.
//! * [`dynsym`]: the generators `J_{KL}` and the verification of their bracket table.
//! * [`spectrum`]: bound-state levels, energies, degeneracies and eigenfunctions.
//! * [`symtensor`]: symmetric superalgebra `S(V)`, harmonic decomposition and branching.
//! * [`linalg`]: fraction-free exact rank computations shared by the above.

pub mod dynsym;
pub mod error;
pub mod linalg;
pub mod scalar;
pub mod spectrum;
pub mod supercore;
pub mod superfunctions;
pub mod superweyl;
pub mod symtensor;

pub use error::{Result, SuperError};
pub use scalar::GaussianRational;
