mod common;

use std::collections::BTreeMap;

use colosseum::gf2::BitVec;
use colosseum::noise_model::{LayerPlan, NoiseModel};
use colosseum::nonlocal_games::{game_distribution, outcome_wins, GameInput};
use colosseum::pauli_clifford::{CliffordClass, PauliClass};
use colosseum::stabilizer_sim::{
    bell_measure, game_circuit, game_circuit_distribution, game_outcomes, prepare_bell, run_telep_circuit,
    telep_circuit, telep_outcomes, Gate, LayeredCircuit, Op, PauliFrame, Record, Tableau,
};
use colosseum::stats::{chi_square, tv_distance};
use colosseum::telep_relation::{full_distribution, verify, CliffordTuple, PauliTuple};
use common::dense::Dense;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_gate<R: Rng>(n: usize, rng: &mut R) -> Gate {
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    match rng.gen_range(0..11) {
        0 => Gate::H(a),
        1 => Gate::S(a),
        2 => Gate::Sdg(a),
        3 => Gate::X(a),
        4 => Gate::Y(a),
        5 => Gate::Z(a),
        6 => Gate::Clifford(a, CliffordClass(rng.gen_range(0..24))),
        7 => Gate::Cnot(a, b),
        8 => Gate::Cz(a, b),
        9 => Gate::Swap(a, b),
        _ => Gate::HCz(a, b),
    }
}

/// Random unitary layers followed by a Z measurement of every qubit.
fn random_circuit<R: Rng>(n: usize, gates: usize, rng: &mut R) -> LayeredCircuit {
    let mut c = LayeredCircuit::new(n, 0);
    let mut layer: Vec<Op> = Vec::new();
    let mut used = vec![false; n];
    for _ in 0..gates {
        let g = random_gate(n, rng);
        if g.qubits().iter().any(|&q| used[q]) {
            c.push_layer(std::mem::take(&mut layer)).unwrap();
            used.iter_mut().for_each(|u| *u = false);
        }
        for q in g.qubits() {
            used[q] = true;
        }
        layer.push(g.into());
    }
    if !layer.is_empty() {
        c.push_layer(layer).unwrap();
    }
    c.push_layer((0..n).map(|q| Gate::MeasureZ(q).into()).collect()).unwrap();
    c
}

fn dense_apply(d: &mut Dense, g: Gate) {
    match g {
        Gate::H(q) => d.h(q),
        Gate::S(q) => d.s(q),
        Gate::Sdg(q) => d.sdg(q),
        Gate::X(q) => d.x(q),
        Gate::Y(q) => d.y(q),
        Gate::Z(q) => d.z(q),
        Gate::Clifford(q, c) => d.clifford(q, c),
        Gate::Cnot(a, b) => d.cnot(a, b),
        Gate::Cz(a, b) => d.cz(a, b),
        Gate::Swap(a, b) => {
            d.cnot(a, b);
            d.cnot(b, a);
            d.cnot(a, b);
        }
        Gate::HCz(a, b) => {
            d.h(a);
            d.h(b);
            d.cz(a, b);
        }
        Gate::MeasureZ(_) | Gate::MeasureX(_) => {}
    }
}

fn unitary_tableau(c: &LayeredCircuit) -> Tableau {
    let mut t = Tableau::new(c.n_qubits);
    for op in c.layers.iter().flatten() {
        op.gate.apply_tableau(&mut t);
        assert!(t.check_invariants());
    }
    t
}

fn exact_tableau_marginal(t: &Tableau, qubits: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; 1 << qubits.len()];
    for (bits, log2) in t.outcome_distribution(qubits) {
        let k = (0..qubits.len()).fold(0, |acc, j| acc | ((bits.get(j) as usize) << j));
        out[k] += 0.5f64.powi(log2 as i32);
    }
    out
}

#[test]
fn bell_measure_on_phi_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let mut t = Tableau::new(2);
        prepare_bell(&mut t, 0, 1);
        assert_eq!(bell_measure(&mut t, 0, 1, &mut rng), PauliClass::I);
    }
}

#[test]
fn bell_measure_labels_match_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for p in PauliClass::ALL {
        let mut d = Dense::new(2);
        d.h(0);
        d.cnot(0, 1);
        if p.has_x() {
            d.x(1);
        }
        if p.has_z() {
            d.z(1);
        }
        d.cnot(0, 1);
        d.h(0);
        let probs = d.marginal(&[0, 1]);
        let (s1, s2) = (p.has_z(), p.has_x());
        let k = s1 as usize | (s2 as usize) << 1;
        assert!((probs[k] - 1.0).abs() < 1e-12, "{p}: {probs:?}");

        let mut t = Tableau::new(2);
        prepare_bell(&mut t, 0, 1);
        if p.has_x() {
            t.x(1);
        }
        if p.has_z() {
            t.z(1);
        }
        assert_eq!(bell_measure(&mut t, 0, 1, &mut rng), p);
    }
}

#[test]
fn random_circuits_agree_with_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..1000 {
        let n = rng.gen_range(2..=6);
        let c = random_circuit(n, rng.gen_range(1..40), &mut rng);
        let mut d = Dense::new(n);
        for op in c.layers.iter().flatten() {
            dense_apply(&mut d, op.gate);
        }
        let qubits: Vec<usize> = (0..n).collect();
        let want = d.marginal(&qubits);
        let got = exact_tableau_marginal(&unitary_tableau(&c), &qubits);
        for (a, b) in want.iter().zip(&got) {
            assert!((a - b).abs() < 1e-9, "trial {trial}: {want:?} vs {got:?}");
        }
    }
}

#[test]
fn sampled_measurements_pass_chi_square() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let none = BitVec::zeros(0);
    let mut passes = 0;
    for _ in 0..20 {
        let n = 4;
        let c = random_circuit(n, 30, &mut rng);
        let mut d = Dense::new(n);
        for op in c.layers.iter().flatten() {
            dense_apply(&mut d, op.gate);
        }
        let probs = d.marginal(&[0, 1, 2, 3]);
        let mut counts = vec![0u64; 16];
        for _ in 0..4000 {
            let rec = c.run_tableau(&none, None, &mut rng).1;
            let k = (0..n).fold(0, |acc, q| acc | (rec.bits.get(q) as usize) << q);
            counts[k] += 1;
        }
        let support: Vec<usize> = (0..16).filter(|&k| probs[k] > 1e-12).collect();
        assert!((0..16).all(|k| probs[k] > 1e-12 || counts[k] == 0));
        if support.len() > 1 {
            let obs: Vec<u64> = support.iter().map(|&k| counts[k]).collect();
            let exp: Vec<f64> = support.iter().map(|&k| probs[k]).collect();
            if chi_square(&obs, &exp).1 > 0.001 {
                passes += 1;
            }
        } else {
            passes += 1;
        }
    }
    assert!(passes >= 19, "{passes}/20");
}

fn empirical(c: &CliffordTuple, samples: usize, mut draw: impl FnMut() -> PauliTuple) -> f64 {
    let exact = full_distribution(c).unwrap();
    let mut counts: BTreeMap<PauliTuple, u64> = BTreeMap::new();
    for _ in 0..samples {
        *counts.entry(draw()).or_default() += 1;
    }
    let keys: Vec<_> = exact.keys().cloned().collect();
    let want: Vec<f64> = keys.iter().map(|k| exact[k].to_f64()).collect();
    let got: Vec<f64> = keys.iter().map(|k| *counts.get(k).unwrap_or(&0) as f64 / samples as f64).collect();
    assert_eq!(counts.keys().filter(|k| exact[*k].is_zero()).count(), 0, "sample outside support");
    tv_distance(&want, &got)
}

#[test]
fn telep_ring_matches_full_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = CliffordClass::h();
    let c = CliffordTuple(vec![h, h]);
    let tv = empirical(&c, 1_000_000, || run_telep_circuit(&c, None, &mut rng));
    assert!(tv < 0.01, "tv = {tv}");
    for n in [2, 3] {
        let c = CliffordTuple::random(n, &mut rng);
        let tv = empirical(&c, 200_000, || run_telep_circuit(&c, None, &mut rng));
        assert!(tv < 0.01, "n={n}, tv = {tv}");
    }
}

#[test]
fn noiseless_ring_always_satisfies_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in [2, 5, 16, 64] {
        for _ in 0..200 {
            let c = CliffordTuple::random(n, &mut rng);
            let p = run_telep_circuit(&c, None, &mut rng);
            assert!(verify(&c, &p).unwrap().valid);
        }
    }
}

#[test]
fn injected_x_before_bell_measurement_flips_by_x() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let none = BitVec::zeros(0);
    for _ in 0..50 {
        let n = 3;
        let c = CliffordTuple::random(n, &mut rng);
        let j = rng.gen_range(0..n);
        let target = (2 * j + 2) % (2 * n);
        let base = telep_circuit(&c);
        let mut hit = base.clone();
        hit.layers.insert(3, vec![Gate::X(target).into()]);
        let qubits: Vec<usize> = (0..2 * n).collect();
        let dist = |circ: &LayeredCircuit| -> BTreeMap<PauliTuple, u32> {
            unitary_tableau(circ)
                .outcome_distribution(&qubits)
                .into_iter()
                .map(|(bits, w)| {
                    let rec = Record { qubits: qubits.clone(), bits };
                    (telep_outcomes(n, &rec), w)
                })
                .collect()
        };
        let d0 = dist(&base);
        let d1 = dist(&hit);
        assert_eq!(d0.len(), d1.len());
        for (p, w) in &d0 {
            let mut shifted = p.clone();
            shifted.0[j] = shifted.0[j].mul(PauliClass::X);
            assert_eq!(d1.get(&shifted), Some(w));
        }
        let mut e = PauliFrame::identity(2 * n);
        e.x_mask.set(target, true);
        let (flips, _) = base.propagate(&none, &e, 3);
        assert_eq!(flips.ones().collect::<Vec<_>>(), vec![target]);
    }
}

#[test]
fn game_circuit_matches_game_distribution() {
    for input in GameInput::all() {
        let sim = game_circuit_distribution(input);
        let want = game_distribution(input);
        for p in 0..4 {
            for q in 0..4 {
                let w = want[p][q].to_f64();
                assert!((sim[p][q] as f64 / 16.0 - w).abs() < 1e-12, "{input:?} P={p} Q={q}");
                if sim[p][q] > 0 {
                    assert!(outcome_wins(input, PauliClass::from_code(p as u8), PauliClass::from_code(q as u8)));
                }
            }
        }
    }
}

#[test]
fn sampled_game_outcomes_always_win() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let none = BitVec::zeros(0);
    for input in GameInput::all() {
        let c = game_circuit(input);
        for _ in 0..500 {
            let (p, q) = game_outcomes(&c.run_tableau(&none, None, &mut rng).1);
            assert!(outcome_wins(input, p, q));
        }
    }
}

#[test]
fn zero_noise_matches_noiseless_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let c = CliffordTuple::random(2, &mut rng);
    let circ = telep_circuit(&c);
    let none = BitVec::zeros(0);
    let noise = NoiseModel::iid(0.0);
    let tv = empirical(&c, 200_000, || telep_outcomes(2, &circ.noisy_run(&none, &noise, &mut rng)));
    assert!(tv < 0.01, "tv = {tv}");
    let mut counts = vec![0u64; 16];
    let batches = 200_000 / 64;
    for _ in 0..batches {
        let words = circ.noisy_run_batch(&none, &noise, &mut rng);
        for l in 0..64 {
            let mut rec = Record { qubits: circ.measured_qubits(), bits: BitVec::zeros(4) };
            for (k, w) in words.iter().enumerate() {
                rec.bits.set(k, w >> l & 1 == 1);
            }
            let p = telep_outcomes(2, &rec);
            counts[(p.0[0].code() * 4 + p.0[1].code()) as usize] += 1;
            assert!(verify(&c, &p).unwrap().valid);
        }
    }
    let total = (batches * 64) as f64;
    let exact = full_distribution(&c).unwrap();
    let want: Vec<f64> = exact.values().map(|d| d.to_f64()).collect();
    let got: Vec<f64> = exact
        .keys()
        .map(|p| counts[(p.0[0].code() * 4 + p.0[1].code()) as usize] as f64 / total)
        .collect();
    assert!(tv_distance(&want, &got) < 0.01);
}

#[test]
fn full_depolarization_before_readout_gives_uniform_bits() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let c = CliffordTuple::random(2, &mut rng);
    let circ = telep_circuit(&c);
    let none = BitVec::zeros(0);
    // Uniform over {I, X, Y, Z} is iid strength 3/4 with uniform X/Y/Z.
    let noise = NoiseModel::iid(0.75).with_layers(LayerPlan::Only(vec![circ.depth() - 1]));
    let mut counts = vec![0u64; 16];
    let trials = 64_000;
    for _ in 0..trials {
        let rec = circ.noisy_run(&none, &noise, &mut rng);
        let k = (0..4).fold(0, |acc, i| acc | (rec.bits.get(i) as usize) << i);
        counts[k] += 1;
    }
    let (_, pval) = chi_square(&counts, &[1.0 / 16.0; 16]);
    assert!(pval > 1e-4, "p-value {pval}");
}

#[test]
fn deterministic_error_equals_conjugated_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let none = BitVec::zeros(0);
    for _ in 0..300 {
        let n = rng.gen_range(2..=5);
        let c = random_circuit(n, 25, &mut rng);
        let unitary_layers = c.depth() - 1;
        let j = rng.gen_range(0..=unitary_layers);
        let mut e = PauliFrame::identity(n);
        for q in 0..n {
            e.x_mask.set(q, rng.gen());
            e.z_mask.set(q, rng.gen());
        }
        let mut with_e = c.clone();
        let paulis: Vec<Op> = (0..n)
            .filter_map(|q| match (e.x_mask.get(q), e.z_mask.get(q)) {
                (true, false) => Some(Gate::X(q).into()),
                (true, true) => Some(Gate::Y(q).into()),
                (false, true) => Some(Gate::Z(q).into()),
                _ => None,
            })
            .collect();
        with_e.layers.insert(j, paulis);
        let qubits: Vec<usize> = (0..n).collect();
        let want = exact_tableau_marginal(&unitary_tableau(&with_e), &qubits);

        let (flips, _) = c.propagate(&none, &e, j);
        let mask = (0..n).fold(0, |acc, q| acc | (flips.get(q) as usize) << q);
        let base = exact_tableau_marginal(&unitary_tableau(&c), &qubits);
        let got: Vec<f64> = (0..base.len()).map(|k| base[k ^ mask]).collect();
        for (a, b) in want.iter().zip(&got) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn frame_propagation_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let none = BitVec::zeros(0);
    for _ in 0..200 {
        let n = 5;
        let c = random_circuit(n, 30, &mut rng);
        let j = rng.gen_range(0..c.depth());
        let mut rand_frame = || {
            let mut f = PauliFrame::identity(n);
            for q in 0..n {
                f.x_mask.set(q, rng.gen());
                f.z_mask.set(q, rng.gen());
            }
            f
        };
        let (a, b) = (rand_frame(), rand_frame());
        let mut ab = a.clone();
        ab.compose(&b);
        let (fa, ea) = c.propagate(&none, &a, j);
        let (fb, eb) = c.propagate(&none, &b, j);
        let (mut fab, mut eab) = c.propagate(&none, &ab, j);
        fab.xor_with(&fa);
        fab.xor_with(&fb);
        assert!(fab.is_zero());
        eab.compose(&ea);
        eab.compose(&eb);
        assert!(eab.is_identity());
    }
}

#[test]
fn mid_circuit_measurements_are_handled_by_frames() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let none = BitVec::zeros(0);
    let mut c = LayeredCircuit::new(2, 0);
    c.push_layer(vec![Gate::H(0).into()]).unwrap();
    c.push_layer(vec![Gate::Cnot(0, 1).into()]).unwrap();
    c.push_layer(vec![Gate::MeasureX(0).into(), Gate::MeasureX(1).into()]).unwrap();
    c.push_layer(vec![Gate::H(0).into()]).unwrap();
    c.push_layer(vec![Gate::MeasureZ(0).into()]).unwrap();
    let noise = NoiseModel::none();
    let mut firsts = 0;
    let mut lasts = 0;
    let trials = 20_000;
    for _ in 0..trials {
        let rec = c.noisy_run(&none, &noise, &mut rng);
        assert_eq!(rec.bits.get(0), rec.bits.get(1));
        assert_eq!(rec.bits.get(0), rec.bits.get(2));
        firsts += rec.bits.get(0) as u32;
        let (_, r2) = c.run_tableau(&none, None, &mut rng);
        lasts += r2.bits.get(0) as u32;
        assert_eq!(r2.bits.get(0), r2.bits.get(2));
    }
    for k in [firsts, lasts] {
        let f = k as f64 / trials as f64;
        assert!((f - 0.5).abs() < 0.02, "{f}");
    }
}
