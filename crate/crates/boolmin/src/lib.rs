//! File formats, benchmark harness and command-line front end for
//! [`boolmin_core`].

#![warn(missing_docs)]

pub mod abe;
pub mod bench;
pub mod cli;
pub mod io;
pub mod report;

pub use boolmin_core as core;
