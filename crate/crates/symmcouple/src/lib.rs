//! File formats, spec parsers, a parallel trial runner and the command line
//! for [`symmcouple_core`].

pub mod cli;
pub mod csv_io;
pub mod dsl;
pub mod report;
pub mod runner;

pub use runner::Parallel;
