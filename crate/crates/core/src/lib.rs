//! Exact computer algebra for the k-fermion algebra Σ_q at q = exp(2πi/k).
//!
//! - [`scalar`]: the cyclotomic field Q(ζ_{4k}) and formal radicals √[n]_q
//! - [`fock`]: the Fock-space matrix representation and its relation checks
//! - [`grassmann`]: generalized Grassmann variables, q-derivatives, Berezin integrals
//! - [`coherent`]: k-fermionic coherent states, overlaps and the resolution of identity
//! - [`limits`]: floating-point checks of the Q → q degeneration
//! - [`expr`]: parser and normal-ordering rewriter for operator words

pub mod coherent;
pub mod expr;
pub mod fock;
pub mod grassmann;
pub mod limits;
pub mod matrix;
pub mod report;
pub mod scalar;

pub use fock::{Generator, OpMatrix};
pub use report::{RelationCheck, Report};
pub use scalar::{Cyclotomic, RadicalScalar};
