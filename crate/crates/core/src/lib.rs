//! Incompatibility classification for pairs of orthonormal bases.
//!
//! Two orthonormal bases `A`, `B` of `C^d` are described by their transition
//! matrix `U_jk = <a_j|b_k>`. This crate computes
//!
//! * the rank-deficiency profile `R_t(U)`, the deficiency index `tau` and the
//!   incompatibility order `chi = d - tau` ([`deficiency`]),
//! * the minimal support uncertainty `n_AB^min` with an explicit minimizing
//!   state, by an independent subset search ([`support`]),
//! * closed forms and bounds for the discrete Fourier transform ([`dft`]).
//!
//! ```
//! use incompat::{deficiency::deficiency_profile, matrix::identity};
//!
//! let profile = deficiency_profile(&identity(6)?)?;
//! assert_eq!(profile.r_values, vec![3, 2, 2, 1, 1, 0]);
//! assert_eq!((profile.tau, profile.chi), (4, 2));
//! # Ok::<(), incompat::Error>(())
//! ```

pub mod deficiency;
pub mod dft;
pub mod error;
pub mod matrix;
pub mod rank;
pub mod subsets;
pub mod support;

pub use error::{Error, Result};
