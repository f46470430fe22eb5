//! Exact arithmetic in the ring generated by the real cube root of two, the
//! continued fraction of `σ = ∛2 − 1`, and the lattice-basis machinery that
//! recognizes its convergents from short integer coefficient vectors.

pub mod basis;
pub mod cf;
pub mod criteria;
pub mod error;
pub mod kuzmin;
pub mod real;
pub mod ring;
pub mod selfcheck;
pub mod spectral;

pub use basis::{IntMat3, IntVec3};
pub use cf::{Convergent, Expansion};
pub use error::{Error, Result};
pub use real::{Precision, Real};
pub use ring::{QRingElem, RhoCoords, RingElem};
