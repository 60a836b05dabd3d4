//! Transversal readout of a patch: decode one check family, then take the
//! parity over the matching logical support.

use super::decoder::{DecoderChoice, DecoderKind, DecodingGraph, ExhaustiveDecoder};
use super::patch::{CheckKind, SurfaceCodePatch};
use crate::gf2::BitVec;

/// Decoder for bit strings read out against the checks of `kind`. A `Z`
/// readout corrects flips with the Z-checks and reports the parity over
/// `supp(Z̄)`; an `X` readout uses the X-checks and `supp(X̄)`.
#[derive(Clone, Debug)]
pub struct Readout {
    pub kind: CheckKind,
    pub graph: DecodingGraph,
    pub logical: BitVec,
    decoder: DecoderKind,
    exhaustive: Option<ExhaustiveDecoder>,
}

/// Largest patch the exhaustive table is built for; larger patches fall
/// back to matching.
pub const EXHAUSTIVE_MAX_QUBITS: usize = 24;

impl Readout {
    pub fn new(patch: &SurfaceCodePatch, kind: CheckKind, choice: DecoderChoice) -> Self {
        let supports: Vec<Vec<usize>> = patch.checks(kind).iter().map(|(_, s)| s.clone()).collect();
        let graph = DecodingGraph::from_checks(patch.m, &supports);
        let logical = BitVec::from_indices(
            patch.m,
            match kind {
                CheckKind::Z => patch.logical_z.iter().copied(),
                CheckKind::X => patch.logical_x.iter().copied(),
            },
        );
        let exhaustive = (choice.kind == DecoderKind::Exhaustive && patch.m <= EXHAUSTIVE_MAX_QUBITS)
            .then(|| ExhaustiveDecoder::new(&graph, &logical, choice.q));
        let decoder = if choice.kind == DecoderKind::Exhaustive { DecoderKind::Matching } else { choice.kind };
        Self { kind, graph, logical, decoder, exhaustive }
    }

    /// Bits to flip so that `bits` passes every check.
    pub fn correction(&self, bits: &BitVec) -> BitVec {
        let syn = self.graph.syndrome(bits);
        if syn.is_zero() {
            return BitVec::zeros(bits.len);
        }
        match &self.exhaustive {
            Some(t) => t.decode(&syn),
            None => self.graph.decode(self.decoder, &syn),
        }
    }

    /// `Dec(x̃)`: the logical bit after correction.
    pub fn decode(&self, bits: &BitVec) -> bool {
        let mut fixed = bits.clone();
        fixed.xor_with(&self.correction(bits));
        fixed.dot(&self.logical)
    }
}

/// Z-basis readout of a patch: corrects with the Z-checks, then takes the
/// parity over `supp(Z̄)`.
pub fn decode_readout(patch: &SurfaceCodePatch, bits: &BitVec, choice: DecoderChoice) -> bool {
    Readout::new(patch, CheckKind::Z, choice).decode(bits)
}
