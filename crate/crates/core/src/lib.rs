//! Exact cohomology models of polarized abelian varieties with the action
//! of `SL₂` on cycle classes: correspondences, the Fourier transform,
//! Künneth idempotents, sl₂-triples and Lefschetz-type decompositions.

pub mod abvar;
pub mod action;
pub mod corr;
pub mod error;
pub mod exactla;
pub mod extalg;
pub mod format;
pub mod lefschetz;
pub mod random;
pub mod report;
pub mod sl2rep;

pub use error::{Error, Result};
pub use exactla::Rational;
