//! Bounded verification of correctness and completeness for definite logic
//! programs, including programs pruned by clause selection or by cut.

pub mod level;
pub mod load;
pub mod parser;
pub mod spec;
pub mod term;
pub mod universe;
pub mod engine;
pub mod verify;
pub mod diagnose;
pub mod cli;
