//! Ergodic averages on operator systems at desk scale.
//!
//! The crate evaluates Følner averages over boxes in Z^q, van der Corput
//! inequalities, weak and higher-order mixing statistics, return-time sets
//! of compact systems and the Koopman eigenvector splitting, on two
//! backends: matrix algebras with unitary-conjugation actions and the spin
//! lattice with its shift action.

pub mod compactness;
pub mod descriptor;
pub mod error;
pub mod invariants;
pub mod lattice;
pub mod mixing;
pub mod operator;
pub mod random;
pub mod reduce;
pub mod spectral;
pub mod systems;
pub mod vdc;

pub use error::{Error, Result};
pub use lattice::{box_window, FolnerWindow, GroupElement, HomSet, Homomorphism, WindowSchedule};
pub use num_complex::Complex64;
pub use operator::{ComplexMatrix, State};
pub use systems::{DynamicalSystem, FiniteSystem, LocalObservable, Observable, QuasiLocalSystem, SystemHandle};

/// Schema tag written into every JSON report.
pub const SCHEMA: &str = "ergodix/1";
