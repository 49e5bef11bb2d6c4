#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebraic;
pub mod csk;
pub mod error;
pub mod extended;
pub mod freeconv;
pub mod laws;
pub mod measure;
pub mod quadrature;
pub mod reciprocity;
pub mod report;
mod roots;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use extended::ExtendedReal;
pub use measure::{Atom, DensityPart, RealMeasure};
pub use transforms::{CauchyTransform, TransformEvaluator};
