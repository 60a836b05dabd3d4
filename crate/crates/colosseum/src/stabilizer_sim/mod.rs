//! Stabilizer simulation: bit-packed tableau, Pauli frames, layered circuits,
//! the teleportation ring and the game-G circuit.

pub mod circuit;
pub mod frame;
pub mod pauli;
pub mod tableau;

use rand::Rng;

pub use circuit::{CircuitError, Gate, LayeredCircuit, Op, Record};
pub use frame::{FrameBatch, PauliFrame};
pub use pauli::PauliString;
pub use tableau::{Measurement, Tableau};

use crate::gf2::BitVec;
use crate::noise_model::NoiseModel;
use crate::nonlocal_games::{constants_uv, GameInput};
use crate::pauli_clifford::PauliClass;
use crate::telep_relation::{CliffordTuple, PauliTuple};

/// Bell measurement of `(q1, q2)`: CNOT `q1→q2`, H on `q1`, then Z on both.
/// `s1` is the bit of `q1`, `s2` that of `q2`; the label is `X^{s2} Z^{s1}`.
pub fn bell_measure<R: Rng + ?Sized>(t: &mut Tableau, q1: usize, q2: usize, rng: &mut R) -> PauliClass {
    t.cnot(q1, q2);
    t.h(q1);
    let s1 = t.measure_z(q1, rng).bit;
    let s2 = t.measure_z(q2, rng).bit;
    PauliClass::new(s1, s2)
}

/// Prepares `|Φ⟩ = (|00⟩+|11⟩)/√2` on `(a, b)` from `|00⟩`.
pub fn prepare_bell(t: &mut Tableau, a: usize, b: usize) {
    t.h(a);
    t.cnot(a, b);
}

/// The 2n-qubit ring: Bell pairs `(2j, 2j+1)`, `C_j` on qubit `2j+1`, then
/// Bell measurements on `(2j+1, 2j+2 mod 2n)` giving `P_j`.
pub fn telep_circuit(c: &CliffordTuple) -> LayeredCircuit {
    let n = c.len();
    let nq = 2 * n;
    let mut circ = LayeredCircuit::new(nq, 0);
    let layer = |f: &dyn Fn(usize) -> Gate| (0..n).map(|j| Op::from(f(j))).collect::<Vec<_>>();
    circ.push_layer(layer(&|j| Gate::H(2 * j))).expect("disjoint");
    circ.push_layer(layer(&|j| Gate::Cnot(2 * j, 2 * j + 1))).expect("disjoint");
    circ.push_layer(layer(&|j| Gate::Clifford(2 * j + 1, c.0[j]))).expect("disjoint");
    circ.push_layer(layer(&|j| Gate::Cnot(2 * j + 1, (2 * j + 2) % nq))).expect("disjoint");
    circ.push_layer(layer(&|j| Gate::H(2 * j + 1))).expect("disjoint");
    circ.push_layer((0..nq).map(|q| Op::from(Gate::MeasureZ(q))).collect()).expect("disjoint");
    circ
}

/// Reads `P_j` off a record of [`telep_circuit`].
pub fn telep_outcomes(n: usize, rec: &Record) -> PauliTuple {
    let nq = 2 * n;
    PauliTuple(
        (0..n)
            .map(|j| {
                let s1 = rec.bit_of(2 * j + 1).expect("measured");
                let s2 = rec.bit_of((2 * j + 2) % nq).expect("measured");
                PauliClass::new(s1, s2)
            })
            .collect(),
    )
}

/// Runs the teleportation ring once. Without noise this is a direct tableau
/// run; with noise it goes through [`LayeredCircuit::noisy_run`].
pub fn run_telep_circuit<R: Rng + ?Sized>(
    c: &CliffordTuple,
    noise: Option<&NoiseModel>,
    rng: &mut R,
) -> PauliTuple {
    assert!(!c.is_empty(), "the ring needs n >= 1");
    let circ = telep_circuit(c);
    let none = BitVec::zeros(0);
    let rec = match noise {
        None => circ.run_tableau(&none, None, rng).1,
        Some(m) => circ.noisy_run(&none, m, rng),
    };
    telep_outcomes(c.len(), &rec)
}

/// The game-G circuit on `Φ_{A1B1} ⊗ Φ_{A2B2}` with qubits `A1=0, B1=1, A2=2,
/// B2=3`. Alice applies `U_α` to `A1` and Bell-measures `(A1, A2)`; Bob
/// applies `V_β` to `B2` and Bell-measures `(B1, B2)`.
pub fn game_circuit(input: GameInput) -> LayeredCircuit {
    let (u, v) = constants_uv();
    let mut c = LayeredCircuit::new(4, 0);
    c.push_layer(vec![Gate::H(0).into(), Gate::H(2).into()]).expect("disjoint");
    c.push_layer(vec![Gate::Cnot(0, 1).into(), Gate::Cnot(2, 3).into()]).expect("disjoint");
    c.push_layer(vec![
        Gate::Clifford(0, u[input.alpha as usize - 1]).into(),
        Gate::Clifford(3, v[input.beta as usize - 1]).into(),
    ])
    .expect("disjoint");
    c.push_layer(vec![Gate::Cnot(0, 2).into(), Gate::Cnot(1, 3).into()]).expect("disjoint");
    c.push_layer(vec![Gate::H(0).into(), Gate::H(1).into()]).expect("disjoint");
    c.push_layer((0..4).map(|q| Op::from(Gate::MeasureZ(q))).collect()).expect("disjoint");
    c
}

/// `(Alice's P, Bob's Q)` from a game-circuit record.
pub fn game_outcomes(rec: &Record) -> (PauliClass, PauliClass) {
    let b = |q| rec.bit_of(q).expect("measured");
    (PauliClass::new(b(0), b(2)), PauliClass::new(b(1), b(3)))
}

/// Exact outcome distribution of the game circuit, indexed
/// `[code of P][code of Q]`, in units of 1/16.
pub fn game_circuit_distribution(input: GameInput) -> [[u32; 4]; 4] {
    let c = game_circuit(input);
    let mut t = Tableau::new(4);
    for op in c.layers.iter().flatten() {
        if !op.gate.is_measurement() {
            op.gate.apply_tableau(&mut t);
        }
    }
    let mut out = [[0u32; 4]; 4];
    for (bits, log2) in t.outcome_distribution(&[0, 1, 2, 3]) {
        let p = PauliClass::new(bits.get(0), bits.get(2));
        let q = PauliClass::new(bits.get(1), bits.get(3));
        out[p.code() as usize][q.code() as usize] += 1 << (4 - log2);
    }
    out
}
