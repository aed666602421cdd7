//! Conformal Willmore tori in `R^4` built from Weierstrass elliptic data.
//!
//! The crate constructs doubly periodic meromorphic pairs `(f, h)`, inverts
//! them into compact conformal Willmore immersions of arbitrary conformal
//! class, and verifies their geometric invariants numerically: conformality,
//! minimality of the uninverted pair, Willmore energy quantization `4 k pi`,
//! the `8 pi` branched double cover, and the perturbation family driving the
//! conformally constrained energy toward `8 pi`.

pub mod analysis;
pub mod cli;
pub mod elliptic;
pub mod error;
pub mod geometry;
pub mod immersion;
pub mod lattice;
pub mod meromorphic;
pub mod mesh;
pub mod modulus;
pub mod perturbation;
pub mod report;
pub mod wirtinger;

pub use error::{Error, Result};
pub use lattice::{canonicalize, ConformalClass, Lattice, TorusMap};

/// Complex scalar used throughout.
pub type C = num_complex::Complex64;
