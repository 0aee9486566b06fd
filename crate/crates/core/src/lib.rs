//! Toolkit for prepare-and-measure scenarios in which the receiver has no input.
//!
//! The crate covers both sides of the question "does entanglement help?":
//!
//! - [`classical`]: the polytope of behaviors reachable with shared randomness
//!   and a one-bit message, with exact bounds, facet certification and a
//!   double-description facet enumerator.
//! - [`quantum`]: entanglement-assisted protocols with classical or qubit
//!   messages, noise models and a registry of closed-form protocols.
//! - [`seesaw`]: alternating optimization of protocols at fixed dimension.
//! - [`infobound`]: the information-restricted variant of the facet family.
//!
//! [`scenario`] holds the shared vocabulary (scenarios, behaviors,
//! inequalities) and [`matrix`] the dense complex linear algebra underneath.

pub mod classical;
pub mod error;
pub mod infobound;
pub mod matrix;
pub mod quantum;
pub mod reference;
pub mod scenario;
pub mod seesaw;

pub use error::{Error, Result};
pub use scenario::{Behavior, Inequality, Scenario};
