//! Coverings of frequency space, chain metrics, word metrics on shearlet
//! dilation groups, and a decision procedure for coorbit equivalence of
//! shearlet dilation groups.

pub mod coarse;
pub mod covering;
pub mod equivalence;
pub mod error;
pub mod files;
pub mod geometry;
pub mod linalg;
pub mod scalar;
pub mod shearlet;

pub use error::{Error, Result};
