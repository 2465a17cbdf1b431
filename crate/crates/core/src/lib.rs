//! Exact simulation of post-selected multi-photon linear-optical
//! interferometers.
//!
//! States live in the occupation-number basis ([`fock`]), circuits are flat
//! lists of beam splitters, phase shifters and mirrors ([`circuit`]), and the
//! [`engine`] evolves states either through permanents of the composed mode
//! transfer matrix or element by element. [`experiments`] wires up the
//! heralded Mach-Zehnder apparatus and extracts fringes; [`dsl`] reads and
//! writes the `.icd` circuit format.

pub mod circuit;
pub mod dsl;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod permanent;

pub use circuit::{check_unitary, Bindings, Circuit, Element, ModeUnitary, PhaseExpr};
pub use engine::{
    condition, evolve_elementwise, evolve_full, pattern_probability, transition_amplitude,
    ConditionalResult, Constraint, DetectionPattern,
};
pub use error::{Error, Result};
pub use fock::{FockBasis, FockVector, StateVector};
pub use permanent::{permanent, permanent_naive, permanent_ryser, SquareMatrix};
