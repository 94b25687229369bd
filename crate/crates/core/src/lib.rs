//! Numerical core for symmetric function spaces on `[0, 1]`.
//!
//! Everything here is pure computation over immutable values: exact calculus
//! for step functions, quasi-concave and Orlicz function registries, weights
//! and their dyadic level sets, norm engines, K-functionals, decomposability
//! certifiers and the explicit constructions built on top of them.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the DSL and the
//! command line live in the `symmcouple` crate.

#![no_std]

extern crate alloc;

mod bundle;
pub mod constructs;
pub mod decomp;
pub mod error;
pub mod kfunc;
pub(crate) mod math;
pub mod numeric;
pub mod orlicz;
pub mod phi;
pub mod report;
pub mod runner;
pub mod spaces;
pub mod step;
pub mod weights;

pub use decomp::FamilySpec;
pub use error::{Error, Result};
pub use orlicz::OrliczFunction;
pub use phi::{PhiFunction, Schedule};
pub use report::{EquivalenceReport, Witness};
pub use runner::{Sequential, TrialRunner};
pub use spaces::SpaceSpec;
pub use step::{Partition, StepFunction};
pub use weights::Weight;
