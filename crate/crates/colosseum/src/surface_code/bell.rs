//! Single-shot logical Bell-pair preparation on a wedge under noise.
//!
//! The residual `Rep(E)` is the face Pauli left after applying `Rec(s)`, read
//! off a Pauli frame against the reference run: with `s = s_ref ⊕ flips` and
//! face frame `F`, the state is `F·Rec(s_ref)|Φ̄⟩`, so the residual is
//! `Rec(s)·Rec(s_ref)·F` up to phase.

use rand::Rng;

use super::decoder::DecoderChoice;
use super::patch::CheckKind;
use super::readout::Readout;
use super::wedge::WedgeLayout;
use crate::gf2::BitVec;
use crate::noise_model::NoiseModel;
use crate::stabilizer_sim::{LayeredCircuit, PauliFrame};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellPrepShot {
    /// Bulk record.
    pub s: BitVec,
    /// `Rec(s)` on the `2m` face qubits.
    pub rec: PauliFrame,
    /// `Rep(E)` on the `2m` face qubits, up to phase.
    pub residual: PauliFrame,
    /// Whether the residual acts nontrivially on `|Φ̄⟩` after a 2D decode of
    /// each face.
    pub logical_failure: bool,
}

/// A wedge with its measurement circuit and face decoders.
#[derive(Clone, Debug)]
pub struct BellPrep<'a> {
    pub wedge: &'a WedgeLayout,
    pub choice: DecoderChoice,
    circuit: LayeredCircuit,
    rec_ref: PauliFrame,
    read_z: Readout,
    read_x: Readout,
}

impl<'a> BellPrep<'a> {
    pub fn new(wedge: &'a WedgeLayout, choice: DecoderChoice) -> Self {
        Self {
            wedge,
            choice,
            circuit: wedge.measurement_circuit(),
            rec_ref: wedge.rec_exact(&wedge.s_ref),
            read_z: Readout::new(&wedge.patch, CheckKind::Z, choice),
            read_x: Readout::new(&wedge.patch, CheckKind::X, choice),
        }
    }

    /// Logical content of a face residual: `(X̄, Z̄)` components on each
    /// face after decoding. Returns `[(x_L, z_L), (x_R, z_R)]`.
    pub fn logical_content(&self, residual: &PauliFrame) -> [(bool, bool); 2] {
        let m = self.wedge.m;
        let part = |mask: &BitVec, off: usize| BitVec::from_indices(m, (0..m).filter(|&q| mask.get(off + q)));
        [0, m].map(|off| {
            // X errors are seen by Z-checks and flip the Z̄ parity.
            let x = self.read_z.decode(&part(&residual.x_mask, off));
            let z = self.read_x.decode(&part(&residual.z_mask, off));
            (x, z)
        })
    }

    /// Nontrivial on `|Φ̄⟩` iff it anticommutes with `X̄X̄` or `Z̄Z̄` after
    /// decoding.
    pub fn is_logical_failure(&self, residual: &PauliFrame) -> bool {
        let [l, r] = self.logical_content(residual);
        l != r
    }

    /// 64 independent shots.
    pub fn run_batch<R: Rng + ?Sized>(&self, noise: &NoiseModel, rng: &mut R) -> Vec<BellPrepShot> {
        let w = self.wedge;
        let face = 2 * w.m;
        let (flips, frame) = self.circuit.frame_batch(&[], noise, rng);
        (0..64)
            .map(|l| {
                let mut s = w.s_ref.clone();
                for (v, word) in flips.iter().enumerate() {
                    if word >> l & 1 == 1 {
                        s.flip(v);
                    }
                }
                let mut f = PauliFrame::identity(face);
                for q in 0..face {
                    f.x_mask.set(q, frame.x[q] >> l & 1 == 1);
                    f.z_mask.set(q, frame.z[q] >> l & 1 == 1);
                }
                let rec = w.rec(&s, self.choice.kind);
                let mut residual = rec.clone();
                residual.compose(&self.rec_ref);
                residual.compose(&f);
                let logical_failure = self.is_logical_failure(&residual);
                BellPrepShot { s, rec, residual, logical_failure }
            })
            .collect()
    }

    /// Logical failures over `shots` runs (rounded up to a multiple of 64).
    pub fn failure_count<R: Rng + ?Sized>(&self, noise: &NoiseModel, shots: u64, rng: &mut R) -> (u64, u64) {
        let batches = shots.div_ceil(64);
        let mut fails = 0;
        for _ in 0..batches {
            fails += self.run_batch(noise, rng).iter().filter(|s| s.logical_failure).count() as u64;
        }
        (fails, batches * 64)
    }
}

/// One shot of single-shot Bell preparation.
pub fn single_shot_bell_prep<R: Rng + ?Sized>(
    wedge: &WedgeLayout,
    noise: &NoiseModel,
    choice: DecoderChoice,
    rng: &mut R,
) -> BellPrepShot {
    BellPrep::new(wedge, choice).run_batch(noise, rng).swap_remove(0)
}
