//! The extended circuit `U^ext`: `n` wedges glued in a ring, a classically
//! controlled logical Clifford on each right face, and transversal Bell
//! measurements between neighbouring faces.
//!
//! Logical qubit `2j` is face `L` of wedge `j` and `2j+1` is face `R`, so the
//! wedge Bell pairs are the logical pairs `(2j, 2j+1)` of the teleportation
//! ring. `C_j` acts on `R_j` through the template `H^{c₁} S^{c₂} H^{c₃} X^{c₄}
//! Z^{c₅}` (gates in circuit order), with the five template bits computed
//! from `b_j`. The Bell measurement of `(R_j, L_{j+1})` is a transversal
//! CNOT, transversal H on `R_j` and Z readout of both faces, so `R_j` is
//! decoded against the X-checks and `L_{j+1}` against the Z-checks.
//!
//! Qubit `q` of wedge `j` is `j·|W| + q`. The record is every bulk outcome
//! (wedge-major), then every face outcome (wedge-major, `L` before `R`).

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::decoder::DecoderChoice;
use super::patch::{CheckKind, CodeError, LogicalGate};
use super::readout::Readout;
use super::wedge::WedgeLayout;
use crate::geometry::{colosseum_layout_for, GeometryError, Layout3D};
use crate::gf2::BitVec;
use crate::noise_model::NoiseModel;
use crate::pauli_clifford::{CliffordClass, PauliClass};
use crate::seeds::cell_rng;
use crate::stabilizer_sim::{Gate, LayeredCircuit, Op, PauliFrame};
use crate::stats::wilson95;
use crate::telep_relation::{sample_ideal, verify, CliffordTuple, PauliTuple};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum UextError {
    #[error("the ring needs n >= 2, got {0}")]
    RingTooSmall(usize),
    #[error("desk-scale guard: n <= {max_n} and d <= {max_d} (got n={n}, d={d})")]
    TooLarge { n: usize, d: usize, max_n: usize, max_d: usize },
    #[error("record arity: {0}")]
    Arity(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Largest ring and distance accepted by [`end_to_end_success`].
pub const MAX_N: usize = 16;
pub const MAX_D: usize = 5;

const TEMPLATE: [LogicalGate; 5] = [LogicalGate::H, LogicalGate::S, LogicalGate::H, LogicalGate::X, LogicalGate::Z];

/// Template bits for `c`: the first 5-bit pattern, in binary order, whose
/// gate product lies in the class of `c`.
pub fn template_bits(c: CliffordClass) -> [bool; 5] {
    let class = |g: LogicalGate| {
        let name = match g {
            LogicalGate::H => "H",
            LogicalGate::S => "S",
            LogicalGate::X => "X",
            LogicalGate::Z => "Z",
        };
        CliffordClass::from_name(name).expect("named gate")
    };
    (0u8..32)
        .map(|k| std::array::from_fn(|i| k >> i & 1 == 1))
        .find(|bits: &[bool; 5]| {
            let prod = TEMPLATE
                .iter()
                .zip(bits)
                .filter(|(_, &on)| on)
                .fold(CliffordClass::IDENTITY, |acc, (&g, _)| class(g).compose(acc));
            prod == c
        })
        .expect("the template reaches every class")
}

/// Measurement outcomes of one run together with its input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotRecord {
    /// Bulk outcomes per wedge, `m_aux` bits each.
    pub s: Vec<BitVec>,
    /// Face outcomes per wedge, `2m` bits each (`L` then `R`).
    pub y: Vec<BitVec>,
    pub b: CliffordTuple,
}

/// Post-processing output with the propagated recovery retained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Postprocessed {
    pub z: PauliTuple,
    /// X part of the propagated recovery on the measured faces.
    pub f: BitVec,
    /// Z part of the propagated recovery.
    pub h: BitVec,
}

/// `U^ext` together with its geometry and decoders.
#[derive(Clone, Debug)]
pub struct Uext {
    pub n: usize,
    pub wedge: WedgeLayout,
    pub choice: DecoderChoice,
    /// The full circuit on `n·|W|` qubits with `5n` controls.
    pub circuit: LayeredCircuit,
    /// The part after the wedges restricted to the `2mn` face qubits, with
    /// face qubit `q` of wedge `j` at `2mj + q`. No measurements.
    pub logical_part: LayeredCircuit,
    pub layout: Layout3D<f64>,
    read_z: Readout,
    read_x: Readout,
    rec_ref: PauliFrame,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuccessEstimate {
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

impl SuccessEstimate {
    pub fn new(successes: u64, trials: u64) -> Self {
        let (wilson_lo, wilson_hi) = wilson95(successes, trials);
        let rate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        Self { trials, successes, rate, wilson_lo, wilson_hi }
    }
}

/// One threshold-scan cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub d: usize,
    pub p: f64,
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub seed: u64,
}

/// Builds `U^ext` with the default decoder.
pub fn build_uext(n: usize, d: usize) -> Result<Uext, UextError> {
    Uext::new(n, WedgeLayout::new(d)?, DecoderChoice::default())
}

impl Uext {
    pub fn new(n: usize, wedge: WedgeLayout, choice: DecoderChoice) -> Result<Self, UextError> {
        if n < 2 {
            return Err(UextError::RingTooSmall(n));
        }
        let per = wedge.n_qubits();
        let m = wedge.m;
        let mut circuit = LayeredCircuit::new(n * per, 5 * n);
        for layer in &wedge.measurement_circuit().layers {
            let ops = (0..n).flat_map(|j| layer.iter().map(move |op| shift(op, j * per))).collect();
            circuit.push_layer(ops).expect("wedges are disjoint");
        }
        let face = |j: usize| j * per;
        let logical_part = Self::post_wedge(n, &wedge, |j| j * 2 * m);
        for layer in &Self::post_wedge(n, &wedge, face).layers {
            circuit.push_layer(layer.clone()).expect("faces are disjoint");
        }
        let mut meas = Vec::with_capacity(2 * m * n);
        for j in 0..n {
            meas.extend((0..2 * m).map(|q| Op::from(Gate::MeasureZ(face(j) + q))));
        }
        circuit.push_layer(meas).expect("faces are disjoint");
        let delta_r = (n as f64 / (4.0 * std::f64::consts::PI)).min(1.0);
        let layout = colosseum_layout_for(&wedge, n, 1.0, delta_r)?;
        let read_z = Readout::new(&wedge.patch, CheckKind::Z, choice);
        let read_x = Readout::new(&wedge.patch, CheckKind::X, choice);
        let rec_ref = wedge.rec_exact(&wedge.s_ref);
        Ok(Self { n, wedge, choice, circuit, logical_part, layout, read_z, read_x, rec_ref })
    }

    /// Controlled template on every `R_j`, then the transversal Bell
    /// measurement basis change. `base(j)` is the first face qubit of
    /// wedge `j`.
    fn post_wedge(n: usize, w: &WedgeLayout, base: impl Fn(usize) -> usize) -> LayeredCircuit {
        let m = w.m;
        let nq = (0..n).map(|j| base(j) + 2 * m).max().unwrap_or(0);
        let mut c = LayeredCircuit::new(nq, 5 * n);
        for (k, &g) in TEMPLATE.iter().enumerate() {
            let per_wedge: Vec<Vec<Vec<Gate>>> = (0..n).map(|j| w.patch.logical_layers(g, base(j) + m)).collect();
            for depth in 0..per_wedge[0].len() {
                let ops = (0..n)
                    .flat_map(|j| per_wedge[j][depth].iter().map(move |&gate| Op::controlled(gate, 5 * j + k)))
                    .collect();
                c.push_layer(ops).expect("template layer");
            }
        }
        let cnots = (0..n).flat_map(|j| (0..m).map(move |q| (j, q)));
        c.push_layer(cnots.map(|(j, q)| Op::from(Gate::Cnot(base(j) + m + q, base((j + 1) % n) + q))).collect())
            .expect("ring CNOTs");
        c.push_layer((0..n).flat_map(|j| (0..m).map(move |q| (j, q))).map(|(j, q)| Op::from(Gate::H(base(j) + m + q))).collect())
            .expect("transversal H");
        c
    }

    pub fn d(&self) -> usize {
        self.wedge.d
    }

    /// Total qubits `n·(2m + m_aux)`.
    pub fn n_qubits(&self) -> usize {
        self.circuit.n_qubits
    }

    /// Control bits for input `b`: the template bits of each `b_j`.
    pub fn controls(&self, b: &CliffordTuple) -> BitVec {
        let mut c = BitVec::zeros(5 * self.n);
        for (j, &cj) in b.0.iter().enumerate() {
            for (k, on) in template_bits(cj).into_iter().enumerate() {
                c.set(5 * j + k, on);
            }
        }
        c
    }

    /// Splits a full record into per-wedge `s` and `y`.
    pub fn split_record(&self, bits: &BitVec, b: CliffordTuple) -> ShotRecord {
        let (n, ma, m2) = (self.n, self.wedge.m_aux, 2 * self.wedge.m);
        let block = |off: usize, len: usize| BitVec::from_indices(len, (0..len).filter(|&i| bits.get(off + i)));
        ShotRecord {
            s: (0..n).map(|j| block(j * ma, ma)).collect(),
            y: (0..n).map(|j| block(n * ma + j * m2, m2)).collect(),
            b,
        }
    }

    /// `⊗_j Rec(s^j)` on the face register of `logical_part`.
    fn recovery(&self, s: &[BitVec]) -> PauliFrame {
        let m2 = 2 * self.wedge.m;
        let mut f = PauliFrame::identity(self.n * m2);
        for (j, sj) in s.iter().enumerate() {
            let r = self.wedge.rec(sj, self.choice.kind);
            for q in r.x_mask.ones() {
                f.x_mask.set(j * m2 + q, true);
            }
            for q in r.z_mask.ones() {
                f.z_mask.set(j * m2 + q, true);
            }
        }
        f
    }

    fn check_arity(&self, rec: &ShotRecord) -> Result<(), UextError> {
        let ok = rec.s.len() == self.n
            && rec.y.len() == self.n
            && rec.b.len() == self.n
            && rec.s.iter().all(|s| s.len == self.wedge.m_aux)
            && rec.y.iter().all(|y| y.len == 2 * self.wedge.m);
        if ok {
            Ok(())
        } else {
            Err(UextError::Arity(format!("expected n={} blocks of {} and {} bits", self.n, self.wedge.m_aux, 2 * self.wedge.m)))
        }
    }

    /// `z_j`: conjugate `⊗ Rec(s^j)` through the controlled logical circuit,
    /// XOR its X part into `y`, decode `R_j` (first bit) and `L_{j+1}`
    /// (second bit).
    pub fn postprocess(&self, rec: &ShotRecord) -> Result<Postprocessed, UextError> {
        self.check_arity(rec)?;
        let m = self.wedge.m;
        let controls = self.controls(&rec.b);
        let (_, end) = self.logical_part.propagate(&controls, &self.recovery(&rec.s), 0);
        let block = |j: usize, off: usize| {
            let base = 2 * m * j + off;
            BitVec::from_indices(m, (0..m).filter(|&q| rec.y[j].get(off + q) ^ end.x_mask.get(base + q)))
        };
        let z = (0..self.n)
            .map(|j| {
                let s1 = self.read_x.decode(&block(j, m));
                let s2 = self.read_z.decode(&block((j + 1) % self.n, 0));
                PauliClass::new(s1, s2)
            })
            .collect();
        Ok(Postprocessed { z: PauliTuple(z), f: end.x_mask, h: end.z_mask })
    }

    /// One run on the full tableau, noiseless or with `noise` through the
    /// frame method.
    pub fn run_full<R: Rng + ?Sized>(&self, b: &CliffordTuple, noise: Option<&NoiseModel>, rng: &mut R) -> ShotRecord {
        let controls = self.controls(b);
        let bits = match noise {
            None => self.circuit.run_tableau(&controls, None, rng).1.bits,
            Some(nm) => self.circuit.noisy_run(&controls, nm, rng).bits,
        };
        self.split_record(&bits, b.clone())
    }

    /// 64 runs with uniform inputs through the frame method. The noiseless
    /// part is not simulated: given the reference bulk record the faces
    /// hold `Rec(s_ref)` applied to `|Φ̄⟩^{⊗n}`, so a noiseless face record
    /// is the codeword image of an ideal logical outcome, shifted by the X
    /// part of `Rec(s_ref)` propagated to the readout. The frame supplies
    /// the gauge and noise flips on top.
    pub fn sample_batch<R: Rng + ?Sized>(&self, noise: &NoiseModel, rng: &mut R) -> Vec<ShotRecord> {
        let (n, m, ma) = (self.n, self.wedge.m, self.wedge.m_aux);
        let inputs: Vec<CliffordTuple> = (0..64).map(|_| CliffordTuple::random(n, rng)).collect();
        let controls: Vec<BitVec> = inputs.iter().map(|b| self.controls(b)).collect();
        let lanes: Vec<u64> = (0..5 * n)
            .map(|c| controls.iter().enumerate().fold(0u64, |w, (l, ctl)| w | (ctl.get(c) as u64) << l))
            .collect();
        let (flips, _) = self.circuit.frame_batch(&lanes, noise, rng);
        let mut ref_face = PauliFrame::identity(2 * m * n);
        for j in 0..n {
            for q in self.rec_ref.x_mask.ones() {
                ref_face.x_mask.set(2 * m * j + q, true);
            }
            for q in self.rec_ref.z_mask.ones() {
                ref_face.z_mask.set(2 * m * j + q, true);
            }
        }
        let lx = BitVec::from_indices(m, self.wedge.patch.logical_x.iter().copied());
        let lz = BitVec::from_indices(m, self.wedge.patch.logical_z.iter().copied());
        inputs
            .into_iter()
            .zip(&controls)
            .enumerate()
            .map(|(l, (b, ctl))| {
                let flip = |k: usize| flips[k] >> l & 1 == 1;
                let s = (0..n)
                    .map(|j| {
                        let mut sj = self.wedge.s_ref.clone();
                        for v in 0..ma {
                            if flip(j * ma + v) {
                                sj.flip(v);
                            }
                        }
                        sj
                    })
                    .collect();
                let ideal = sample_ideal(&b, rng);
                let (_, shift) = self.logical_part.propagate(ctl, &ref_face, 0);
                let y = (0..n)
                    .map(|j| {
                        let mut yj = BitVec::zeros(2 * m);
                        // R_j carries s1 of P_j in the X basis, L_j carries
                        // s2 of P_{j-1} in the Z basis.
                        if ideal.0[(j + n - 1) % n].s2 {
                            for q in lx.ones() {
                                yj.flip(q);
                            }
                        }
                        if ideal.0[j].s1 {
                            for q in lz.ones() {
                                yj.flip(m + q);
                            }
                        }
                        for q in 0..2 * m {
                            if shift.x_mask.get(2 * m * j + q) ^ flip(n * ma + 2 * m * j + q) {
                                yj.flip(q);
                            }
                        }
                        yj
                    })
                    .collect();
                ShotRecord { s, y, b }
            })
            .collect()
    }

    /// Whether `(b, z)` is in the relation for a processed record.
    pub fn succeeds(&self, rec: &ShotRecord) -> bool {
        let z = self.postprocess(rec).expect("record from this circuit").z;
        verify(&rec.b, &z).map(|o| o.valid).unwrap_or(false)
    }
}

fn shift(op: &Op, by: usize) -> Op {
    let g = match op.gate {
        Gate::H(q) => Gate::H(q + by),
        Gate::S(q) => Gate::S(q + by),
        Gate::Sdg(q) => Gate::Sdg(q + by),
        Gate::X(q) => Gate::X(q + by),
        Gate::Y(q) => Gate::Y(q + by),
        Gate::Z(q) => Gate::Z(q + by),
        Gate::Clifford(q, c) => Gate::Clifford(q + by, c),
        Gate::Cnot(a, b) => Gate::Cnot(a + by, b + by),
        Gate::Cz(a, b) => Gate::Cz(a + by, b + by),
        Gate::Swap(a, b) => Gate::Swap(a + by, b + by),
        Gate::HCz(a, b) => Gate::HCz(a + by, b + by),
        Gate::MeasureZ(q) => Gate::MeasureZ(q + by),
        Gate::MeasureX(q) => Gate::MeasureX(q + by),
    };
    Op { gate: g, control: op.control }
}

/// Monte-Carlo estimate of `Pr[(b, z) ∈ R]` over uniform `b` under iid
/// noise of strength `p`.
pub fn end_to_end_success<R: Rng + ?Sized>(uext: &Uext, p: f64, trials: u64, rng: &mut R) -> Result<SuccessEstimate, UextError> {
    if uext.n > MAX_N || uext.d() > MAX_D {
        return Err(UextError::TooLarge { n: uext.n, d: uext.d(), max_n: MAX_N, max_d: MAX_D });
    }
    let noise = NoiseModel::iid(p);
    let mut successes = 0;
    let mut done = 0;
    while done < trials {
        for rec in uext.sample_batch(&noise, rng) {
            if done == trials {
                break;
            }
            successes += uext.succeeds(&rec) as u64;
            done += 1;
        }
    }
    Ok(SuccessEstimate::new(successes, trials))
}

/// Success rates over a `(d, p)` grid. Each cell runs in parallel with its
/// own stream derived from `seed` and the cell index.
pub fn threshold_scan(n: usize, ds: &[usize], ps: &[f64], trials: u64, seed: u64) -> Result<Vec<ScanRow>, UextError> {
    let circuits: Vec<Uext> = ds.iter().map(|&d| build_uext(n, d)).collect::<Result<_, _>>()?;
    let cells: Vec<(usize, usize)> = (0..ds.len()).flat_map(|i| (0..ps.len()).map(move |k| (i, k))).collect();
    cells
        .par_iter()
        .enumerate()
        .map(|(cell, &(i, k))| {
            let mut rng = cell_rng(seed, cell as u64);
            let est = end_to_end_success(&circuits[i], ps[k], trials, &mut rng)?;
            Ok(ScanRow {
                n,
                d: ds[i],
                p: ps[k],
                trials: est.trials,
                successes: est.successes,
                rate: est.rate,
                wilson_lo: est.wilson_lo,
                wilson_hi: est.wilson_hi,
                seed,
            })
        })
        .collect()
}
