//! Layered Clifford circuits with classical controls, executed either on a
//! tableau or as a reference run plus Pauli frames.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::frame::{FrameBatch, PauliFrame};
use super::pauli::PauliString;
use super::tableau::Tableau;
use crate::gf2::BitVec;
use crate::noise_model::NoiseModel;
use crate::pauli_clifford::{table, CliffordClass, Letter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Clifford(usize, CliffordClass),
    Cnot(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
    /// `H⊗H` followed by `CZ`, counted as one two-qubit gate.
    HCz(usize, usize),
    MeasureZ(usize),
    MeasureX(usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q)
            | Gate::S(q)
            | Gate::Sdg(q)
            | Gate::X(q)
            | Gate::Y(q)
            | Gate::Z(q)
            | Gate::Clifford(q, _)
            | Gate::MeasureZ(q)
            | Gate::MeasureX(q) => vec![q],
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::Swap(a, b) | Gate::HCz(a, b) => vec![a, b],
        }
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Gate::MeasureZ(_) | Gate::MeasureX(_))
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits().len() == 2
    }

    /// Applies a unitary gate to a tableau. Measurements are ignored here.
    pub fn apply_tableau(&self, t: &mut Tableau) {
        match *self {
            Gate::H(q) => t.h(q),
            Gate::S(q) => t.s(q),
            Gate::Sdg(q) => t.s_dag(q),
            Gate::X(q) => t.x(q),
            Gate::Y(q) => t.y(q),
            Gate::Z(q) => t.z(q),
            Gate::Clifford(q, c) => t.clifford(q, c),
            Gate::Cnot(a, b) => t.cnot(a, b),
            Gate::Cz(a, b) => t.cz(a, b),
            Gate::Swap(a, b) => t.swap(a, b),
            Gate::HCz(a, b) => {
                t.h(a);
                t.h(b);
                t.cz(a, b);
            }
            Gate::MeasureZ(_) | Gate::MeasureX(_) => {}
        }
    }

    /// Exact conjugation `P ↦ G P G†`. Measurements leave `P` unchanged.
    pub fn conjugate(&self, p: &mut PauliString) {
        match *self {
            Gate::H(q) => p.h(q),
            Gate::S(q) => p.s(q),
            Gate::Sdg(q) => p.s_dag(q),
            Gate::X(q) => p.by_pauli(q, true, false),
            Gate::Y(q) => p.by_pauli(q, true, true),
            Gate::Z(q) => p.by_pauli(q, false, true),
            Gate::Clifford(q, c) => {
                for &l in &table().gate_words[c.index()] {
                    match l {
                        Letter::H => p.h(q),
                        Letter::S => p.s(q),
                        Letter::Sdg => p.s_dag(q),
                        Letter::X => p.by_pauli(q, true, false),
                        Letter::Y => p.by_pauli(q, true, true),
                        Letter::Z => p.by_pauli(q, false, true),
                    }
                }
            }
            Gate::Cnot(a, b) => p.cnot(a, b),
            Gate::Cz(a, b) => p.cz(a, b),
            Gate::Swap(a, b) => p.swap(a, b),
            Gate::HCz(a, b) => {
                p.h(a);
                p.h(b);
                p.cz(a, b);
            }
            Gate::MeasureZ(_) | Gate::MeasureX(_) => {}
        }
    }

    pub fn apply_frame(&self, f: &mut PauliFrame) {
        match *self {
            Gate::H(q) => f.h(q),
            Gate::S(q) | Gate::Sdg(q) => f.s(q),
            Gate::Clifford(q, c) => f.clifford(q, c),
            Gate::Cnot(a, b) => f.cnot(a, b),
            Gate::Cz(a, b) => f.cz(a, b),
            Gate::Swap(a, b) => f.swap(a, b),
            Gate::HCz(a, b) => {
                f.h(a);
                f.h(b);
                f.cz(a, b);
            }
            _ => {}
        }
    }

    pub fn apply_batch(&self, b: &mut FrameBatch, m: u64) {
        match *self {
            Gate::H(q) => b.h(q, m),
            Gate::S(q) | Gate::Sdg(q) => b.s(q, m),
            Gate::Clifford(q, c) => b.clifford(q, c, m),
            Gate::Cnot(a, c) => b.cnot(a, c, m),
            Gate::Cz(a, c) => b.cz(a, c, m),
            Gate::Swap(a, c) => b.swap(a, c, m),
            Gate::HCz(a, c) => {
                b.h(a, m);
                b.h(c, m);
                b.cz(a, c, m);
            }
            _ => {}
        }
    }
}

/// A gate, optionally conditioned on a classical control bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Op {
    pub gate: Gate,
    pub control: Option<usize>,
}

impl From<Gate> for Op {
    fn from(gate: Gate) -> Self {
        Self { gate, control: None }
    }
}

impl Op {
    pub fn controlled(gate: Gate, bit: usize) -> Self {
        Self { gate, control: Some(bit) }
    }

    fn active(&self, controls: &BitVec) -> bool {
        self.control.is_none_or(|c| controls.get(c))
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("layer {layer}: qubit {qubit} is used twice")]
    Overlap { layer: usize, qubit: usize },
    #[error("layer {layer}: qubit {qubit} out of range")]
    QubitRange { layer: usize, qubit: usize },
    #[error("layer {layer}: control bit {bit} out of range")]
    ControlRange { layer: usize, bit: usize },
    #[error("gate on the same qubit twice: {0}")]
    Degenerate(usize),
}

/// Gate layers `C_1..C_D` over `n_qubits`, with `n_controls` classical inputs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayeredCircuit {
    pub n_qubits: usize,
    pub n_controls: usize,
    pub layers: Vec<Vec<Op>>,
}

/// Measurement outcomes in the order the measurements appear.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub qubits: Vec<usize>,
    pub bits: BitVec,
}

impl Record {
    /// Outcome of the (last) measurement of qubit `q`.
    pub fn bit_of(&self, q: usize) -> Option<bool> {
        self.qubits.iter().rposition(|&x| x == q).map(|i| self.bits.get(i))
    }
}

impl LayeredCircuit {
    pub fn new(n_qubits: usize, n_controls: usize) -> Self {
        Self { n_qubits, n_controls, layers: Vec::new() }
    }

    /// Appends a layer after checking disjointness.
    pub fn push_layer(&mut self, ops: Vec<Op>) -> Result<(), CircuitError> {
        self.check_layer(self.layers.len(), &ops)?;
        self.layers.push(ops);
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Depth ignoring layers made only of measurements.
    pub fn unitary_depth(&self) -> usize {
        self.layers.iter().filter(|l| l.iter().any(|o| !o.gate.is_measurement())).count()
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    fn check_layer(&self, layer: usize, ops: &[Op]) -> Result<(), CircuitError> {
        let mut used = BitVec::zeros(self.n_qubits);
        for op in ops {
            if let Some(bit) = op.control {
                if bit >= self.n_controls {
                    return Err(CircuitError::ControlRange { layer, bit });
                }
            }
            let qs = op.gate.qubits();
            if qs.len() == 2 && qs[0] == qs[1] {
                return Err(CircuitError::Degenerate(qs[0]));
            }
            for q in qs {
                if q >= self.n_qubits {
                    return Err(CircuitError::QubitRange { layer, qubit: q });
                }
                if used.get(q) {
                    return Err(CircuitError::Overlap { layer, qubit: q });
                }
                used.set(q, true);
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        for (i, l) in self.layers.iter().enumerate() {
            self.check_layer(i, l)?;
        }
        Ok(())
    }

    /// Qubits measured, in record order.
    pub fn measured_qubits(&self) -> Vec<usize> {
        self.layers
            .iter()
            .flatten()
            .filter(|o| o.gate.is_measurement())
            .flat_map(|o| o.gate.qubits())
            .collect()
    }

    /// Every two-qubit interaction `(a, b)` with `a < b`.
    pub fn two_qubit_pairs(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self
            .layers
            .iter()
            .flatten()
            .filter(|o| o.gate.is_two_qubit())
            .map(|o| {
                let q = o.gate.qubits();
                (q[0].min(q[1]), q[0].max(q[1]))
            })
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Heisenberg image `U P U†` through the unitary part of the circuit.
    pub fn conjugate(&self, controls: &BitVec, p: &PauliString) -> PauliString {
        let mut out = p.clone();
        for op in self.layers.iter().flatten() {
            if op.active(controls) {
                op.gate.conjugate(&mut out);
            }
        }
        out
    }

    /// Noiseless tableau execution from `|0…0⟩`. Random outcomes take `forced`
    /// when given, otherwise a coin from `rng`.
    pub fn run_tableau<R: Rng + ?Sized>(
        &self,
        controls: &BitVec,
        forced: Option<bool>,
        rng: &mut R,
    ) -> (Tableau, Record) {
        let mut t = Tableau::new(self.n_qubits);
        let mut rec = Record { qubits: self.measured_qubits(), bits: BitVec::zeros(0) };
        rec.bits = BitVec::zeros(rec.qubits.len());
        let mut k = 0;
        for op in self.layers.iter().flatten() {
            if !op.active(controls) {
                if op.gate.is_measurement() {
                    k += 1;
                }
                continue;
            }
            match op.gate {
                Gate::MeasureZ(q) => {
                    rec.bits.set(k, t.measure_z_with(q, forced, rng).bit);
                    k += 1;
                }
                Gate::MeasureX(q) => {
                    t.h(q);
                    rec.bits.set(k, t.measure_z_with(q, forced, rng).bit);
                    t.h(q);
                    k += 1;
                }
                g => g.apply_tableau(&mut t),
            }
        }
        (t, rec)
    }

    /// One noisy run: `E_0` before the first layer, `E_j` after layer `j`.
    /// The reference tableau fixes random outcomes to 0; a Pauli frame with
    /// random Z gauge on the input and after each measurement supplies the
    /// randomness, and noise is folded into the same frame.
    pub fn noisy_run<R: Rng + ?Sized>(&self, controls: &BitVec, noise: &NoiseModel, rng: &mut R) -> Record {
        let (_, mut rec) = self.run_tableau(controls, Some(false), rng);
        let mut f = PauliFrame::identity(self.n_qubits);
        for q in 0..self.n_qubits {
            f.z_mask.set(q, rng.gen());
        }
        if noise.applies_to_layer(0) {
            f.compose(&noise.sample(self.n_qubits, rng));
        }
        let mut k = 0;
        for (j, layer) in self.layers.iter().enumerate() {
            for op in layer {
                if !op.active(controls) {
                    if op.gate.is_measurement() {
                        k += 1;
                    }
                    continue;
                }
                match op.gate {
                    Gate::MeasureZ(q) => {
                        if f.x_mask.get(q) {
                            rec.bits.flip(k);
                        }
                        f.z_mask.set(q, rng.gen());
                        k += 1;
                    }
                    Gate::MeasureX(q) => {
                        if f.z_mask.get(q) {
                            rec.bits.flip(k);
                        }
                        f.x_mask.set(q, rng.gen());
                        k += 1;
                    }
                    g => g.apply_frame(&mut f),
                }
            }
            if noise.applies_to_layer(j + 1) {
                f.compose(&noise.sample(self.n_qubits, rng));
            }
        }
        rec
    }

    /// Propagates `E` injected after layer `layer` (0 means before the first
    /// layer) to the end of the circuit, returning the record flips it causes
    /// and the frame left at the end.
    pub fn propagate(&self, controls: &BitVec, e: &PauliFrame, layer: usize) -> (BitVec, PauliFrame) {
        let mut f = PauliFrame::identity(self.n_qubits);
        let n_meas = self.measured_qubits().len();
        let mut flips = BitVec::zeros(n_meas);
        if layer == 0 {
            f.compose(e);
        }
        let mut k = 0;
        for (j, ops) in self.layers.iter().enumerate() {
            for op in ops {
                if !op.active(controls) {
                    if op.gate.is_measurement() {
                        k += 1;
                    }
                    continue;
                }
                match op.gate {
                    Gate::MeasureZ(q) => {
                        flips.set(k, f.x_mask.get(q));
                        f.x_mask.set(q, false);
                        f.z_mask.set(q, false);
                        k += 1;
                    }
                    Gate::MeasureX(q) => {
                        flips.set(k, f.z_mask.get(q));
                        f.x_mask.set(q, false);
                        f.z_mask.set(q, false);
                        k += 1;
                    }
                    g => g.apply_frame(&mut f),
                }
            }
            if j + 1 == layer {
                f.compose(e);
            }
        }
        (flips, f)
    }

    /// 64 noisy runs sharing `controls`, one per lane. Returns one record
    /// word per measurement (bit `l` is lane `l`).
    pub fn noisy_run_batch<R: Rng + ?Sized>(
        &self,
        controls: &BitVec,
        noise: &NoiseModel,
        rng: &mut R,
    ) -> Vec<u64> {
        let (_, rec) = self.run_tableau(controls, Some(false), rng);
        let lanes: Vec<u64> = (0..self.n_controls).map(|c| if controls.get(c) { u64::MAX } else { 0 }).collect();
        let (mut out, _) = self.frame_batch(&lanes, noise, rng);
        for (k, w) in out.iter_mut().enumerate() {
            if rec.bits.get(k) {
                *w = !*w;
            }
        }
        out
    }

    /// Frame half of a batched run: record flips relative to the reference
    /// (one word per measurement) and the frame left at the end. Control bit
    /// `c` is on in the lanes of `lane_controls[c]`. Includes the random
    /// gauge on the input and after each measurement.
    pub fn frame_batch<R: Rng + ?Sized>(
        &self,
        lane_controls: &[u64],
        noise: &NoiseModel,
        rng: &mut R,
    ) -> (Vec<u64>, FrameBatch) {
        assert!(lane_controls.len() >= self.n_controls, "missing control lanes");
        let all: Vec<usize> = (0..self.n_qubits).collect();
        let mut b = FrameBatch::new(self.n_qubits);
        for q in 0..self.n_qubits {
            b.z[q] = rng.gen();
        }
        if noise.applies_to_layer(0) {
            noise.sample_batch(&all, &mut b, rng);
        }
        let mut out = Vec::with_capacity(self.measured_qubits().len());
        for (j, layer) in self.layers.iter().enumerate() {
            for op in layer {
                let mask = op.control.map_or(u64::MAX, |c| lane_controls[c]);
                match op.gate {
                    Gate::MeasureZ(q) => {
                        out.push(b.x[q] & mask);
                        b.z[q] ^= rng.gen::<u64>() & mask;
                    }
                    Gate::MeasureX(q) => {
                        out.push(b.z[q] & mask);
                        b.x[q] ^= rng.gen::<u64>() & mask;
                    }
                    g => g.apply_batch(&mut b, mask),
                }
            }
            if noise.applies_to_layer(j + 1) {
                noise.sample_batch(&all, &mut b, rng);
            }
        }
        (out, b)
    }
}
