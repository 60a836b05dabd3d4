//! Classical adversaries: bounded fan-in circuits, light cones and
//! non-signaling pairs, random and block restrictions with the
//! switching-lemma parameters, and the empirical ceiling experiment.

pub mod ceiling;
pub mod dag;
pub mod restriction;

pub use ceiling::{nc0_ceiling_experiment, pair_witness, CeilingReport, PairWitness, WITNESS_CONTEXTS};
pub use dag::{
    find_nonsignaling_blocks, find_nonsignaling_pair, light_cones, light_cones_structural, table_support, CircuitDag,
    ConeMode, DagGate, LightCones, MAX_FAN_IN, SEMANTIC_CONE_LIMIT,
};
pub use restriction::{
    block_restriction_process, sample_rp, switching_params, BitRestriction, BlockRestriction, ExhaustiveOracle,
    OracleAnswer, OracleMode, ProcessDiagnostics, StubOracle, SwitchingParams, TSetOracle, BLOCK_BITS,
    EXHAUSTIVE_ACTIVE_LIMIT,
};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AdversaryError {
    #[error("invalid circuit: {0}")]
    InvalidDag(String),
    #[error("expected {expected} entries, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("block {0} is partially fixed")]
    PartialBlock(usize),
}
