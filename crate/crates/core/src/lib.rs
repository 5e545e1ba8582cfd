//! Rewriting engine and numeric verifier for classical-quantum spider diagrams.
//!
//! Diagrams are open graphs of spiders, boxes and structural wiring
//! ([`diagram`]). They can be normalised with the spider fusion laws
//! ([`rewrite`]), evaluated as dense complex tensors in the matrix model
//! ([`tensor`]), written and read in a small text language ([`dsl`]), and fed
//! to the analysers for classical-quantum processes ([`cq`]), entanglement
//! ([`entanglement`]), phase groups ([`phases`]) and protocols
//! ([`protocols`]).

pub mod cli;
pub mod cq;
pub mod diagram;
pub mod dsl;
pub mod entanglement;
pub mod linalg;
pub mod phases;
pub mod protocols;
pub mod random;
pub mod rewrite;
pub mod tensor;

pub use num_complex::Complex64 as C64;

pub use diagram::{Diagram, DiagramBuilder, DiagramError, Endpoint, Generator, NodeId, WireKind, WireType};
pub use phases::PhaseVector;
pub use tensor::{EqualityMode, NumericTolerance, Tensor};

/// Default absolute tolerance for numeric comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;
