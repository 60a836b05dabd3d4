//! Samplers and an empirical verifier for local stochastic Pauli noise.

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::stabilizer_sim::{FrameBatch, PauliFrame};
use crate::stats::binomial_sigma;

/// Correlation structure of the sampler.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    None,
    Iid,
    /// Qubits `(2k, 2k+1)` form blocks. A block is fully hit with
    /// probability `p²/2`; independently each qubit is hit with `p/2`.
    ClusteredAdversarial,
}

/// Which noise layers `E_0..E_D` are drawn.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerPlan {
    All,
    Only(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub p: f64,
    pub layers: LayerPlan,
}

/// Samples the index of the next success in a Bernoulli(`p`) stream.
struct Skipper {
    geo: Option<Geometric>,
    p: f64,
}

impl Skipper {
    fn new(p: f64) -> Self {
        let geo = (p > 0.0 && p < 1.0).then(|| Geometric::new(p).expect("valid probability"));
        Self { geo, p }
    }

    /// Calls `hit(i)` for every success index `i < len`.
    fn for_each<R: Rng + ?Sized>(&self, len: usize, rng: &mut R, mut hit: impl FnMut(usize, &mut R)) {
        if self.p <= 0.0 {
            return;
        }
        if self.p >= 1.0 {
            for i in 0..len {
                hit(i, rng);
            }
            return;
        }
        let geo = self.geo.as_ref().expect("geometric sampler");
        let mut i = 0usize;
        loop {
            let gap = geo.sample(rng);
            i = match i.checked_add(gap as usize) {
                Some(v) if v < len => v,
                _ => return,
            };
            hit(i, rng);
            i += 1;
        }
    }
}

/// A uniformly random non-identity Pauli as `(x, z)`.
fn random_xyz<R: Rng + ?Sized>(rng: &mut R) -> (bool, bool) {
    match rng.gen_range(0..3u8) {
        0 => (true, false),
        1 => (true, true),
        _ => (false, true),
    }
}

impl NoiseModel {
    pub fn none() -> Self {
        Self { kind: NoiseKind::None, p: 0.0, layers: LayerPlan::All }
    }

    pub fn iid(p: f64) -> Self {
        Self { kind: NoiseKind::Iid, p, layers: LayerPlan::All }
    }

    pub fn clustered(p: f64) -> Self {
        Self { kind: NoiseKind::ClusteredAdversarial, p, layers: LayerPlan::All }
    }

    pub fn with_layers(mut self, layers: LayerPlan) -> Self {
        self.layers = layers;
        self
    }

    pub fn is_silent(&self) -> bool {
        self.kind == NoiseKind::None || self.p <= 0.0
    }

    pub fn applies_to_layer(&self, j: usize) -> bool {
        !self.is_silent()
            && match &self.layers {
                LayerPlan::All => true,
                LayerPlan::Only(v) => v.contains(&j),
            }
    }

    /// One draw `E` on `n` qubits.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> PauliFrame {
        let mut f = PauliFrame::identity(n);
        self.for_each_hit(n, 1, rng, |q, _, (x, z)| {
            if x {
                f.x_mask.flip(q);
            }
            if z {
                f.z_mask.flip(q);
            }
        });
        f
    }

    /// Independent draws into all 64 lanes of a batch, restricted to the
    /// qubits listed in `qubits`.
    pub fn sample_batch<R: Rng + ?Sized>(&self, qubits: &[usize], batch: &mut FrameBatch, rng: &mut R) {
        self.for_each_hit(qubits.len(), 64, rng, |i, lane, (x, z)| {
            let q = qubits[i];
            let m = 1u64 << lane;
            if x {
                batch.x[q] ^= m;
            }
            if z {
                batch.z[q] ^= m;
            }
        });
    }

    /// Enumerates `(qubit index, lane, pauli)` hits over `n × lanes` slots.
    fn for_each_hit<R: Rng + ?Sized>(
        &self,
        n: usize,
        lanes: usize,
        rng: &mut R,
        mut emit: impl FnMut(usize, usize, (bool, bool)),
    ) {
        if self.is_silent() {
            return;
        }
        let p = self.p.clamp(0.0, 1.0);
        match self.kind {
            NoiseKind::None => {}
            NoiseKind::Iid => {
                Skipper::new(p).for_each(n * lanes, rng, |i, r| emit(i / lanes, i % lanes, random_xyz(r)));
            }
            NoiseKind::ClusteredAdversarial => {
                let blocks = n.div_ceil(2);
                Skipper::new(p * p / 2.0).for_each(blocks * lanes, rng, |i, r| {
                    let (b, lane) = (i / lanes, i % lanes);
                    for q in [2 * b, 2 * b + 1] {
                        if q < n {
                            emit(q, lane, random_xyz(r));
                        }
                    }
                });
                Skipper::new(p / 2.0).for_each(n * lanes, rng, |i, r| emit(i / lanes, i % lanes, random_xyz(r)));
            }
        }
    }
}

/// Outcome of the empirical local-stochastic check for one subset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsetCheck {
    pub subset: Vec<usize>,
    pub empirical: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalStochasticReport {
    pub samples: usize,
    pub checks: Vec<SubsetCheck>,
}

impl LocalStochasticReport {
    pub fn violations(&self) -> impl Iterator<Item = &SubsetCheck> {
        self.checks.iter().filter(|c| c.violated)
    }

    pub fn passed(&self) -> bool {
        self.violations().next().is_none()
    }
}

/// Support masks of samples, one `u64` per sample (at most 64 qubits).
pub fn support_masks(samples: &[PauliFrame]) -> Vec<u64> {
    samples
        .iter()
        .map(|f| {
            let mut m = 0u64;
            for q in 0..f.n().min(64) {
                if f.x_mask.get(q) || f.z_mask.get(q) {
                    m |= 1 << q;
                }
            }
            m
        })
        .collect()
}

/// Checks `Pr[F ⊆ supp(E)] ≤ p^{|F|} + 3σ` for each subset, where `σ` is the
/// binomial standard deviation at the bound.
pub fn verify_local_stochastic(supports: &[u64], p: f64, subsets: &[Vec<usize>]) -> LocalStochasticReport {
    let n = supports.len();
    let checks = subsets
        .iter()
        .map(|f| {
            let mask = f.iter().fold(0u64, |m, &q| m | (1 << q));
            let hits = supports.iter().filter(|&&s| s & mask == mask).count();
            let empirical = hits as f64 / n as f64;
            let bound = p.powi(f.len() as i32);
            let tolerance = 3.0 * binomial_sigma(bound, n as u64);
            SubsetCheck {
                subset: f.clone(),
                empirical,
                bound,
                tolerance,
                violated: empirical > bound + tolerance,
            }
        })
        .collect();
    LocalStochasticReport { samples: n, checks }
}

/// All subsets of `0..n` of size `1..=max_size`.
pub fn small_subsets(n: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u64..(1 << n) {
        let k = mask.count_ones() as usize;
        if k <= max_size {
            out.push((0..n).filter(|q| mask >> q & 1 == 1).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_noise_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = NoiseModel::iid(0.0);
        assert!((0..100).all(|_| m.sample(10, &mut rng).is_identity()));
    }

    #[test]
    fn full_noise_hits_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = NoiseModel::iid(1.0).sample(10, &mut rng);
        assert_eq!(f.weight(), 10);
    }

    #[test]
    fn batch_rate_is_close_to_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut hits = 0u64;
        let qubits: Vec<usize> = (0..100).collect();
        for _ in 0..100 {
            let mut b = FrameBatch::new(100);
            NoiseModel::iid(0.1).sample_batch(&qubits, &mut b, &mut rng);
            hits += b.x.iter().zip(&b.z).map(|(x, z)| (x | z).count_ones() as u64).sum::<u64>();
        }
        let rate = hits as f64 / (100.0 * 100.0 * 64.0);
        assert!((rate - 0.1).abs() < 0.005, "{rate}");
    }
}
