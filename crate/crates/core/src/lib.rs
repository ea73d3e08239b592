//! Multimodal problem generator benchmark: multistart next-ascent
//! hillclimbing, niching evolutionary algorithms, population sizing by
//! bisection, and closed-form runtime predictions.

pub mod bitstring;
pub mod error;
pub mod harness;
pub mod hillclimb;
pub mod instance;
pub mod niching;
pub mod record;
pub mod sizing;
pub mod theory;

pub use bitstring::BitString;
pub use error::{Error, Result};
pub use instance::{EvalCounter, Goal, HeightMode, InstanceRef, ProblemInstance};
pub use record::RunRecord;
