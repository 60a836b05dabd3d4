//! Simulation, verification and adversary analysis for the single-qubit
//! gate-teleportation relation problem and its 3D-local fault-tolerant
//! realization.

pub mod adversary_toolkit;
pub mod exact;
pub mod geometry;
pub mod gf2;
pub mod noise_model;
pub mod nonlocal_games;
pub mod pauli_clifford;
pub mod seeds;
pub mod stabilizer_sim;
pub mod stats;
pub mod surface_code;
pub mod telep_relation;

/// Exact 2×2 operator with `i64` Gaussian-integer entries.
pub type ExactUnitary2 = exact::Unitary2<i64>;
/// Wide-integer variant for long products.
pub type ExactUnitary2Wide = exact::Unitary2<i128>;
/// Site coordinates in `f64`.
pub type Layout3D = geometry::Layout3D<f64>;
pub type LocalityReport = geometry::LocalityReport<f64>;

pub use exact::Dyadic;
pub use pauli_clifford::{CliffordClass, EncodingMap, GroupTable, PauliClass, SignedPauli};
