use colosseum::adversary_toolkit::*;
use colosseum::pauli_clifford::{enc_random, CliffordClass, PauliClass};
use colosseum::stats::chi_square;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn gate(inputs: &[usize], table: u64) -> DagGate {
    DagGate { inputs: inputs.to_vec(), table }
}

const XOR2: u64 = 0b0110;

#[test]
fn validation_and_json_round_trip() {
    let dag = CircuitDag { n_in: 2, fan_in: 2, gates: vec![gate(&[0, 1], XOR2)], outputs: vec![2, 0] };
    dag.validate().unwrap();
    assert_eq!(dag.depth(), 1);
    assert_eq!(dag.eval(&[true, false]).unwrap(), vec![true, true]);
    let back: CircuitDag = serde_json::from_str(&serde_json::to_string(&dag).unwrap()).unwrap();
    assert_eq!(back, dag);
    let forward_ref = CircuitDag { gates: vec![gate(&[0, 2], XOR2)], ..dag.clone() };
    assert!(matches!(forward_ref.validate(), Err(AdversaryError::InvalidDag(_))));
    let wide = CircuitDag { gates: vec![gate(&[0, 1, 0], 0)], ..dag.clone() };
    assert!(wide.validate().is_err());
    assert!(dag.eval(&[true]).is_err());
}

#[test]
fn batch_evaluation_matches_single_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let dag = CircuitDag::random_layered(12, 7, 3, 3, &mut rng);
    dag.validate().unwrap();
    assert_eq!(dag.depth(), 3);
    let words: Vec<u64> = (0..12).map(|_| rng.gen()).collect();
    let out = dag.eval_batch(&words).unwrap();
    for l in 0..64 {
        let x: Vec<bool> = words.iter().map(|w| w >> l & 1 == 1).collect();
        let y = dag.eval(&x).unwrap();
        assert!(y.iter().enumerate().all(|(o, &b)| (out[o] >> l & 1 == 1) == b));
    }
}

#[test]
fn identity_wiring_has_singleton_cones() {
    let n = 5;
    let dag = CircuitDag { n_in: n, fan_in: 1, gates: (0..n).map(|i| gate(&[i], 0b10)).collect(), outputs: (n..2 * n).collect() };
    let cones = light_cones(&dag);
    for i in 0..n {
        assert_eq!(cones.forward[i], vec![i]);
        assert_eq!(cones.backward[i], vec![i]);
    }
    assert!(cones.modes.iter().all(|&m| m == ConeMode::Semantic));
}

#[test]
fn constant_gate_has_empty_semantic_cone() {
    // Output 0 ignores its wires; output 1 is x0 ∧ ¬x0 ∨ x1 = x1.
    let dag = CircuitDag {
        n_in: 2,
        fan_in: 2,
        gates: vec![gate(&[0, 1], 0), gate(&[0, 0], 0b0110), gate(&[2, 1], 0b1110), gate(&[3, 1], 0b1100)],
        outputs: vec![2, 5],
    };
    dag.validate().unwrap();
    let semantic = light_cones(&dag);
    let structural = light_cones_structural(&dag);
    assert!(semantic.backward[0].is_empty());
    assert_eq!(structural.backward[0], vec![0, 1]);
    assert_eq!(semantic.backward[1], vec![1]);
    assert_eq!(structural.backward[1], vec![0, 1]);
}

#[test]
fn backward_cones_respect_the_locality_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (k, d) in [(2, 1), (2, 3), (3, 2), (2, 4)] {
        let dag = CircuitDag::random_layered(40, 30, d, k, &mut rng);
        let bound = k.pow(d as u32);
        assert!(light_cones(&dag).max_backward() <= bound);
        assert!(light_cones_structural(&dag).max_backward() <= bound);
    }
}

#[test]
fn parallel_and_complete_circuits() {
    // Two copies of a 2-in 2-out XOR block.
    let dag = CircuitDag {
        n_in: 4,
        fan_in: 2,
        gates: vec![gate(&[0, 1], XOR2), gate(&[0, 1], 0b1000), gate(&[2, 3], XOR2), gate(&[2, 3], 0b1000)],
        outputs: vec![4, 5, 6, 7],
    };
    let (j, k) = find_nonsignaling_pair(&dag).unwrap();
    assert_eq!(j / 2 == 0, k / 2 == 1);
    // Every output is the parity of all inputs.
    let n = 4;
    let parity = (0..1u64 << n).filter(|m| m.count_ones() % 2 == 1).fold(0, |t, m| t | 1 << m);
    let complete = CircuitDag { n_in: n, fan_in: n, gates: vec![gate(&[0, 1, 2, 3], parity); n], outputs: (n..2 * n).collect() };
    assert_eq!(find_nonsignaling_pair(&complete), None);
}

#[test]
fn shallow_random_circuits_have_nonsignaling_pairs() {
    let n = 1 << 14;
    let depth = (0.3 * (n as f64).log2()).floor() as usize;
    let found: usize = (0..100u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = colosseum::seeds::cell_rng(3, s);
            let dag = CircuitDag::random_layered(n, n, depth, 2, &mut rng);
            light_cones_structural(&dag).nonsignaling_pair().is_some() as usize
        })
        .sum();
    assert!(found >= 99, "{found}/100");
}

#[test]
fn wide_shallow_regime_always_yields_a_pair() {
    // ℓ = K^d = 2, m = 512 ≥ n^{3/4} = 512 and ℓ²·n^{1/4} = 32 < m.
    let (n, m) = (4096, 512);
    for s in 0..20 {
        let dag = CircuitDag::random_layered(m, n, 1, 2, &mut colosseum::seeds::cell_rng(4, s));
        let cones = light_cones(&dag);
        let (j, k) = cones.nonsignaling_pair().expect("pair");
        assert!(cones.forward[j].iter().all(|o| !cones.forward[k].contains(o)));
    }
}

#[test]
fn block_cones_coarsen_bit_cones() {
    let dag = CircuitDag {
        n_in: 10,
        fan_in: 2,
        gates: vec![gate(&[0, 9], XOR2), gate(&[4, 4], 0b10)],
        outputs: vec![10, 11, 0, 1],
    };
    let blocks = light_cones(&dag).coarsen(5, 2);
    assert_eq!(blocks.backward[0], vec![0, 1]);
    assert_eq!(blocks.backward[1], vec![0]);
    assert_eq!(find_nonsignaling_blocks(&dag, 5, 2), None);
}

#[test]
fn switching_parameters_follow_the_formulas() {
    let (n, s, d) = (1usize << 20, 1024f64, 2usize);
    let p = switching_params(n, s, d);
    assert_eq!(p.q, 40);
    let p_star = (-(2.0 * n as f64).ln() / 40.0).exp() / (10.0 * 2f64.ln());
    assert!((p.p_star - p_star).abs() < 1e-12);
    assert!((p.t - p_star.powi(5) * n as f64 / 5.0).abs() < 1e-9);
    // ln 1024 exceeds n^{1/40} ≈ 1.41, so this point violates the size assumption.
    assert!(p.size_warning);
    assert!(!switching_params(1 << 20, 1.3, 2).size_warning);
    for d in 1..5 {
        for e in [10, 16, 24, 40] {
            for s in [10.0, 1e3, 1e6] {
                let p = switching_params(1 << e, s, d);
                if !p.size_warning {
                    assert!(p.p_star >= p.p_star_lower_bound * (1.0 - 1e-12), "d={d} n=2^{e} s={s}");
                }
            }
        }
    }
    assert_eq!(switching_params(100, 50.0, 1).p_star, 1.0 / 200f64.powf(1.0 / 20.0));
}

#[test]
fn restriction_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    assert_eq!(sample_rp(30, 1.0, &mut rng), BitRestriction::all_active(30));
    assert_eq!(sample_rp(30, 0.0, &mut rng).n_active(), 0);
    for _ in 0..200 {
        let rho = sample_rp(20, 0.6, &mut rng);
        assert_eq!(rho.concat(&BitRestriction::all_active(rho.n_active())).unwrap(), rho);
        let eta = sample_rp(rho.n_active(), 0.5, &mut rng);
        let tau = sample_rp(eta.n_active(), 0.5, &mut rng);
        let left = rho.concat(&eta).unwrap().concat(&tau).unwrap();
        let right = rho.concat(&eta.concat(&tau).unwrap()).unwrap();
        assert_eq!(left, right);
        let fill: Vec<bool> = (0..rho.n_active()).map(|_| rng.gen()).collect();
        let full = BitRestriction(fill.iter().map(|&b| Some(b)).collect());
        let direct: Vec<bool> = rho.concat(&full).unwrap().0.into_iter().map(Option::unwrap).collect();
        assert_eq!(rho.complete(&fill).unwrap(), direct);
    }
    assert!(BitRestriction::all_active(3).concat(&BitRestriction::all_active(2)).is_err());
}

#[test]
fn block_conversion() {
    let xi = BlockRestriction(vec![Some(19), None, Some(0)]);
    assert_eq!(xi.to_bits().to_block().unwrap(), xi);
    assert_eq!(xi.n_active(), 1);
    let mut bits = xi.to_bits();
    bits.0[7] = Some(true);
    assert_eq!(bits.to_block(), Err(AdversaryError::PartialBlock(1)));
}

#[test]
fn stub_process_keeps_free_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let params = SwitchingParams::with_p_star(60, 0.7);
    for _ in 0..2000 {
        let (xi, diag) = block_restriction_process(&params, &StubOracle, &mut rng);
        assert_eq!(xi.0.len(), 60);
        assert!(diag.t_set_nonempty && diag.t_set_size <= params.max_t_set());
        assert!(diag.xi_free_blocks as f64 >= diag.rho_free_blocks as f64 - 2.0 * params.t);
        assert_eq!(diag.xi_free_blocks, xi.n_active());
        assert!(diag.uniform_fixing);
    }
}

#[test]
fn fixed_blocks_are_uniform_given_the_active_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let params = SwitchingParams::with_p_star(2, 0.8);
    let mut counts = [0u64; 32];
    for _ in 0..60_000 {
        let (xi, _) = block_restriction_process(&params, &StubOracle, &mut rng);
        if let [Some(x), None] = xi.0[..] {
            counts[x as usize] += 1;
        }
    }
    assert!(counts.iter().sum::<u64>() > 3000);
    let (_, pv) = chi_square(&counts, &[1.0 / 32.0; 32]);
    assert!(pv > 1e-3, "p-value {pv}");
}

#[test]
fn exhaustive_oracle_leaves_a_local_circuit() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 3;
    let dag = CircuitDag::random_layered(5 * n, 2 * n, 3, 2, &mut rng);
    let oracle = ExhaustiveOracle { dag: &dag, locality: 2, budget: 1 << 16 };
    let params = SwitchingParams::with_p_star(n, 0.9);
    let mut nonempty = 0;
    for _ in 0..40 {
        let (xi, diag) = block_restriction_process(&params, &oracle, &mut rng);
        assert_eq!(diag.oracle_mode, OracleMode::Exhaustive);
        if !diag.t_set_nonempty {
            continue;
        }
        nonempty += 1;
        let bits = xi.to_bits();
        let active = bits.active_list();
        let base: Vec<bool> = bits.0.iter().map(|a| a.unwrap_or(false)).collect();
        for o in 0..dag.n_out() {
            let table = dag.output_table(o, &active, &base);
            assert!(table_support(&table, active.len()).len() <= 2, "output {o}");
        }
    }
    assert!(nonempty > 0);
}

#[test]
fn exhaustive_oracle_reports_oversized_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let dag = CircuitDag::random_layered(30, 12, 2, 2, &mut rng);
    let oracle = ExhaustiveOracle { dag: &dag, locality: 4, budget: 10 };
    let (xi, diag) = block_restriction_process(&SwitchingParams::with_p_star(6, 1.0), &oracle, &mut rng);
    assert!(diag.oracle_note.unwrap().contains("exceed"));
    assert_eq!(xi.n_active(), 0);
}

fn constant_strategy(n: usize) -> CircuitDag {
    CircuitDag { n_in: 5 * n, fan_in: 2, gates: vec![gate(&[], 0)], outputs: vec![5 * n; 2 * n] }
}

#[test]
fn all_identity_strategy_matches_exact_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let enc = enc_random(11);
    let mut good = 0u64;
    for x0 in 0..32u8 {
        for x1 in 0..32u8 {
            let m = enc.apply(x1).matrix() * enc.apply(x0).matrix();
            good += !m.abs_trace_sq().is_zero() as u64;
        }
    }
    let exact = good as f64 / 1024.0;
    let trials = 64_000;
    let r = nc0_ceiling_experiment(&constant_strategy(2), 2, &enc, trials, &mut rng).unwrap();
    let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
    assert!((r.rate - exact).abs() < 4.0 * sigma, "{} vs {exact}", r.rate);
    // Over uniform Clifford pairs the fraction is 15/24.
    let pairs = CliffordClass::all()
        .flat_map(|a| CliffordClass::all().map(move |b| (a, b)))
        .filter(|&(a, b)| !(b.matrix() * a.matrix()).abs_trace_sq().is_zero())
        .count();
    assert_eq!(pairs, 360);
}

#[test]
fn lookup_strategy_wins_at_n_equal_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let enc = enc_random(13);
    let (mut t1, mut t2) = (0u64, 0u64);
    for x in 0..32u8 {
        let c = enc.apply(x).matrix();
        let p = PauliClass::ALL.into_iter().find(|p| !(p.matrix() * c.clone()).abs_trace_sq().is_zero()).unwrap();
        t1 |= (p.has_z() as u64) << x;
        t2 |= (p.has_x() as u64) << x;
    }
    let inputs = [0, 1, 2, 3, 4];
    let dag = CircuitDag { n_in: 5, fan_in: 5, gates: vec![gate(&inputs, t1), gate(&inputs, t2)], outputs: vec![5, 6] };
    let r = nc0_ceiling_experiment(&dag, 1, &enc, 6400, &mut rng).unwrap();
    assert_eq!(r.successes, 6400);
    assert!(r.witness.is_none());
}

#[test]
fn random_shallow_strategies_stay_below_the_ceiling() {
    let n = 64;
    let ceiling = 80.0 / 81.0;
    let reports: Vec<CeilingReport> = (0..16u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = colosseum::seeds::cell_rng(14, s);
            let enc = enc_random(s);
            let dag = CircuitDag::random_layered(5 * n, 2 * n, 2, 2, &mut rng);
            nc0_ceiling_experiment(&dag, n, &enc, 10_000, &mut rng).unwrap()
        })
        .collect();
    for r in &reports {
        let w = r.witness.as_ref().expect("non-signaling pair");
        let sigma = (ceiling * (1.0 - ceiling) / r.trials as f64).sqrt();
        assert!(r.rate <= ceiling + 3.0 * sigma, "rate {}", r.rate);
        assert_eq!(w.contexts_with_failure, w.contexts);
        assert!(w.min_failures * 81 >= 1024, "{w:?}");
    }
}

#[test]
fn experiment_rejects_wrong_arity() {
    let enc = enc_random(0);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(nc0_ceiling_experiment(&constant_strategy(2), 3, &enc, 10, &mut rng).is_err());
}
