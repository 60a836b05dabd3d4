//! Surface-code patches, the 3D wedge cluster state, decoders and the
//! fault-tolerant extended circuit.

pub mod bell;
pub mod decoder;
pub mod patch;
pub mod readout;
pub mod uext;
pub mod wedge;

pub use bell::{single_shot_bell_prep, BellPrep, BellPrepShot};
pub use decoder::{DecoderChoice, DecoderKind, DecodingGraph, Edge, ExhaustiveDecoder};
pub use patch::{CheckKind, CodeError, LogicalGate, SurfaceCodePatch};
pub use readout::{decode_readout, Readout};
pub use uext::{
    build_uext, end_to_end_success, template_bits, threshold_scan, Postprocessed, ScanRow, ShotRecord, SuccessEstimate, Uext,
    UextError,
};
pub use wedge::{Site, SiteRole, WedgeLayout};
