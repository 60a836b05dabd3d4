//! Success of a classical circuit on the relation with encoded inputs.
//!
//! Input block `j` (bits `5j..5j+5`) encodes `C_j` through an
//! [`EncodingMap`]; output bits `2j` and `2j+1` are `(s1, s2)` of `P_j`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dag::{light_cones, CircuitDag};
use super::restriction::BLOCK_BITS;
use super::AdversaryError;
use crate::pauli_clifford::{trace_is_zero, CliffordClass, EncodingMap, PauliClass};
use crate::stats::wilson95;

/// Random contexts per non-signaling pair in the witness count.
pub const WITNESS_CONTEXTS: usize = 8;

/// Failures over the `32 × 32` values of a non-signaling block pair, with
/// every other block fixed to a random context.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairWitness {
    pub j: usize,
    pub k: usize,
    pub contexts: usize,
    /// Contexts with at least one failing pair.
    pub contexts_with_failure: usize,
    /// Fewest failing pairs over the contexts.
    pub min_failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CeilingReport {
    pub n: usize,
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub witness: Option<PairWitness>,
}

/// Success of each lane of a 64-lane batch.
fn lane_successes(dag: &CircuitDag, enc: &EncodingMap, n: usize, words: &[u64], lanes: usize) -> Result<u64, AdversaryError> {
    let out = dag.eval_batch(words)?;
    let mut mask = 0u64;
    for l in 0..lanes {
        let mut acc = CliffordClass::IDENTITY;
        for j in 0..n {
            let x = (0..BLOCK_BITS).fold(0u8, |x, i| x | ((words[BLOCK_BITS * j + i] >> l & 1) as u8) << i);
            let p = PauliClass::new(out[2 * j] >> l & 1 == 1, out[2 * j + 1] >> l & 1 == 1);
            acc = p.as_clifford().compose(enc.apply(x).compose(acc));
        }
        if !trace_is_zero(acc) {
            mask |= 1 << l;
        }
    }
    Ok(mask)
}

fn check_arity(dag: &CircuitDag, n: usize) -> Result<(), AdversaryError> {
    if dag.n_in != BLOCK_BITS * n {
        return Err(AdversaryError::Arity { expected: BLOCK_BITS * n, got: dag.n_in });
    }
    if dag.n_out() != 2 * n {
        return Err(AdversaryError::Arity { expected: 2 * n, got: dag.n_out() });
    }
    Ok(())
}

/// Empirical success on uniform `5n`-bit inputs. When the circuit has a
/// non-signaling pair of input blocks, also counts failures of that pair
/// over [`WITNESS_CONTEXTS`] random contexts.
pub fn nc0_ceiling_experiment<R: Rng + ?Sized>(
    dag: &CircuitDag,
    n: usize,
    enc: &EncodingMap,
    trials: u64,
    rng: &mut R,
) -> Result<CeilingReport, AdversaryError> {
    check_arity(dag, n)?;
    let mut successes = 0u64;
    let mut done = 0u64;
    let mut words = vec![0u64; dag.n_in];
    while done < trials {
        let lanes = (trials - done).min(64) as usize;
        words.iter_mut().for_each(|w| *w = rng.gen());
        successes += lane_successes(dag, enc, n, &words, lanes)?.count_ones() as u64;
        done += lanes as u64;
    }
    let witness = match light_cones(dag).coarsen(BLOCK_BITS, 2).nonsignaling_pair() {
        Some((j, k)) => Some(pair_witness(dag, n, enc, j, k, rng)?),
        None => None,
    };
    let (wilson_lo, wilson_hi) = wilson95(successes, trials);
    Ok(CeilingReport { n, trials, successes, rate: successes as f64 / trials.max(1) as f64, wilson_lo, wilson_hi, witness })
}

/// Failures over all values of blocks `j` and `k`, per random context.
pub fn pair_witness<R: Rng + ?Sized>(
    dag: &CircuitDag,
    n: usize,
    enc: &EncodingMap,
    j: usize,
    k: usize,
    rng: &mut R,
) -> Result<PairWitness, AdversaryError> {
    check_arity(dag, n)?;
    let mut w = PairWitness { j, k, contexts: WITNESS_CONTEXTS, contexts_with_failure: 0, min_failures: usize::MAX };
    for _ in 0..WITNESS_CONTEXTS {
        let context: Vec<bool> = (0..dag.n_in).map(|_| rng.gen()).collect();
        let mut failures = 0;
        // 1024 value pairs in 16 batches: lane `l` of batch `b` is `xj = b·2 + l/32`, `xk = l % 32`.
        for b in 0..16usize {
            let mut words: Vec<u64> = context.iter().map(|&c| if c { !0 } else { 0 }).collect();
            for i in 0..BLOCK_BITS {
                let (mut wj, mut wk) = (0u64, 0u64);
                for l in 0..64usize {
                    let (xj, xk) = (2 * b + l / 32, l % 32);
                    wj |= ((xj >> i & 1) as u64) << l;
                    wk |= ((xk >> i & 1) as u64) << l;
                }
                words[BLOCK_BITS * j + i] = wj;
                words[BLOCK_BITS * k + i] = wk;
            }
            failures += 64 - lane_successes(dag, enc, n, &words, 64)?.count_ones() as usize;
        }
        w.contexts_with_failure += (failures > 0) as usize;
        w.min_failures = w.min_failures.min(failures);
    }
    Ok(w)
}
