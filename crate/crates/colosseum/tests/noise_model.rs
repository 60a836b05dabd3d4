use colosseum::noise_model::{small_subsets, support_masks, verify_local_stochastic, NoiseModel};
use colosseum::stabilizer_sim::{FrameBatch, PauliFrame};
use colosseum::stats::chi_square;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn samples(model: &NoiseModel, n: usize, count: usize, seed: u64) -> Vec<PauliFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| model.sample(n, &mut rng)).collect()
}

#[test]
fn iid_sampler_is_local_stochastic_on_small_subsets() {
    let subsets = small_subsets(8, 2);
    assert_eq!(subsets.len(), 8 + 28);
    for (i, p) in [0.01, 0.05, 0.1].into_iter().enumerate() {
        let masks = support_masks(&samples(&NoiseModel::iid(p), 8, 100_000, i as u64));
        let report = verify_local_stochastic(&masks, p, &subsets);
        assert!(report.passed(), "p={p}: {:?}", report.violations().next());
        // For independent hits the bound is tight: Pr[F ⊆ supp] = p^{|F|}.
        for c in &report.checks {
            let sigma = (c.bound * (1.0 - c.bound) / 100_000.0).sqrt();
            assert!((c.empirical - c.bound).abs() < 5.0 * sigma, "{c:?}");
        }
    }
}

#[test]
fn clustered_sampler_is_local_stochastic() {
    let p = 0.1;
    let masks = support_masks(&samples(&NoiseModel::clustered(p), 8, 100_000, 7));
    assert!(verify_local_stochastic(&masks, p, &small_subsets(8, 3)).passed());
    // Paired qubits are correlated: Pr[both] = p²/2 + (1 − p²/2)·p²/4.
    let both = masks.iter().filter(|&&m| m & 0b11 == 0b11).count() as f64 / masks.len() as f64;
    let expect = p * p / 2.0 + (1.0 - p * p / 2.0) * p * p / 4.0;
    assert!((both - expect).abs() < 5.0 * (expect / 100_000.0).sqrt(), "{both} vs {expect}");
}

#[test]
fn verifier_rejects_all_or_nothing_noise() {
    // Every qubit is hit together with probability p, so pairs see p instead of p².
    let p = 0.05;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let masks: Vec<u64> = (0..50_000).map(|_| if rand::Rng::gen_bool(&mut rng, p) { 0xff } else { 0 }).collect();
    let report = verify_local_stochastic(&masks, p, &small_subsets(8, 2));
    assert!(!report.passed());
    assert!(report.violations().all(|c| c.subset.len() == 2));
}

#[test]
fn hit_paulis_are_uniform_over_xyz() {
    let mut counts = [0u64; 3];
    for f in samples(&NoiseModel::iid(0.3), 16, 20_000, 4) {
        for q in 0..16 {
            match (f.x_mask.get(q), f.z_mask.get(q)) {
                (true, false) => counts[0] += 1,
                (true, true) => counts[1] += 1,
                (false, true) => counts[2] += 1,
                _ => {}
            }
        }
    }
    let (_, pv) = chi_square(&counts, &[1.0 / 3.0; 3]);
    assert!(pv > 1e-3, "{counts:?}");
}

#[test]
fn batch_sampler_matches_single_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = 0.02;
    let qubits: Vec<usize> = (0..50).collect();
    let mut hits = 0u64;
    let rounds = 400;
    for _ in 0..rounds {
        let mut batch = FrameBatch::new(50);
        NoiseModel::iid(p).sample_batch(&qubits, &mut batch, &mut rng);
        hits += (0..50).map(|q| (batch.x[q] | batch.z[q]).count_ones() as u64).sum::<u64>();
    }
    let trials = (rounds * 50 * 64) as f64;
    let rate = hits as f64 / trials;
    assert!((rate - p).abs() < 5.0 * (p * (1.0 - p) / trials).sqrt(), "{rate}");
}

#[test]
fn silent_models_emit_nothing() {
    assert!(samples(&NoiseModel::none(), 20, 100, 6).iter().all(|f| f.x_mask.is_zero() && f.z_mask.is_zero()));
    assert!(samples(&NoiseModel::iid(0.0), 20, 100, 6).iter().all(|f| f.x_mask.is_zero() && f.z_mask.is_zero()));
}
