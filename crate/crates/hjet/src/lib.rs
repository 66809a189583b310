//! Exact symbolic toolkit for curves tangent to bracket-generating
//! distributions: adapted frames, jet-tangency solving, regularity
//! matrices, formal inverses of the linearized tangency operator, and
//! subframe schedules certifying generic invertibility.

pub mod error;
pub mod exactalg;
pub mod geometry;
pub mod invop;
pub mod jets;
pub mod regmat;
pub mod samples;
pub mod commands;
pub mod problem;
pub mod report;
pub mod schedule;

pub use error::{HjetError, Result};
