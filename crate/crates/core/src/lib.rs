//! Weight sequences in the log domain: conjugates, duals, associated weights,
//! growth predicates, Gevrey-class extension bounds and the diagonal-operator
//! laboratory.
//!
//! The sequence core is generic over the scalar (`f32`/`f64`); everything
//! downstream of it works in `f64`.

pub mod error;
pub mod numeric;
pub mod seqcore;
pub mod transforms;
pub mod weights;
pub mod analysis;
pub mod extension;
pub mod operator_lab;
pub mod verify;

pub use error::{Error, Result};
pub use numeric::Real;
pub use seqcore::{FamilySpec, Generator, Quotients, SequenceFile, WeightSeq};

/// Double-precision weight sequence.
pub type WeightSequence = WeightSeq<f64>;
/// Single-precision weight sequence.
pub type WeightSequenceF32 = WeightSeq<f32>;
/// Quotients `ln μ_p` of a double-precision sequence.
pub type QuotientView = Quotients<f64>;
