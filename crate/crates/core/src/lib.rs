//! Bounds, degree thresholds and numerical checks around Sendov's conjecture.
//!
//! The crate is organised bottom-up:
//!
//! * [`polycore`]: complex polynomials and the Bombieri inner product;
//! * [`rootsolver`]: simultaneous root finding and minimal enclosing disks;
//! * [`geometry`]: executable forms of the geometric theorems (Sendov
//!   condition, zero localization, Walsh coalescence, bisector, exclusion disks);
//! * [`bounds`]: the scalar bound functions and threshold constants;
//! * [`threshold`]: the fixed-point / optimisation pipeline producing `N(a)`;
//! * [`propverify`]: seeded randomized suites exercising every inequality.

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod polycore;
pub mod propverify;
pub mod rootsolver;
pub mod threshold;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use polycore::Polynomial;
pub use rootsolver::{Disk, RootSet};
