//! Bounded fan-in Boolean circuits and their light cones.
//!
//! Nodes `0..n_in` are inputs, node `n_in + g` is gate `g`. A gate reads
//! earlier nodes only, so the node order is a topological order. The
//! output of a gate with inputs `a_0, …, a_{k-1}` is bit `Σ a_i 2^i` of its
//! truth table.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AdversaryError;

/// Largest fan-in a `u64` truth table can hold.
pub const MAX_FAN_IN: usize = 6;
/// Backward cones up to this many inputs are tested semantically.
pub const SEMANTIC_CONE_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DagGate {
    pub inputs: Vec<usize>,
    pub table: u64,
}

impl DagGate {
    /// Bit-sliced evaluation over 64 lanes.
    fn eval_words(&self, args: &[u64]) -> u64 {
        let mut out = 0u64;
        for m in 0..1usize << args.len() {
            if self.table >> m & 1 == 1 {
                let mut lanes = !0u64;
                for (i, &a) in args.iter().enumerate() {
                    lanes &= if m >> i & 1 == 1 { a } else { !a };
                }
                out |= lanes;
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitDag {
    pub n_in: usize,
    /// Fan-in bound `K`.
    pub fan_in: usize,
    pub gates: Vec<DagGate>,
    /// Node index feeding each output.
    pub outputs: Vec<usize>,
}

impl CircuitDag {
    pub fn n_out(&self) -> usize {
        self.outputs.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.n_in + self.gates.len()
    }

    pub fn validate(&self) -> Result<(), AdversaryError> {
        let bad = |m: String| Err(AdversaryError::InvalidDag(m));
        if self.fan_in > MAX_FAN_IN {
            return bad(format!("fan-in bound {} exceeds {MAX_FAN_IN}", self.fan_in));
        }
        for (g, gate) in self.gates.iter().enumerate() {
            let node = self.n_in + g;
            if gate.inputs.len() > self.fan_in {
                return bad(format!("gate {g} has fan-in {}", gate.inputs.len()));
            }
            if let Some(&a) = gate.inputs.iter().find(|&&a| a >= node) {
                return bad(format!("gate {g} reads node {a}, not an earlier node"));
            }
        }
        if let Some(&o) = self.outputs.iter().find(|&&o| o >= self.n_nodes()) {
            return bad(format!("output reads missing node {o}"));
        }
        Ok(())
    }

    /// Depth of every node; inputs have depth 0.
    fn node_depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.n_nodes()];
        for (g, gate) in self.gates.iter().enumerate() {
            depth[self.n_in + g] = 1 + gate.inputs.iter().map(|&a| depth[a]).max().unwrap_or(0);
        }
        depth
    }

    /// Longest input-to-output path.
    pub fn depth(&self) -> usize {
        let depth = self.node_depths();
        self.outputs.iter().map(|&o| depth[o]).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[bool]) -> Result<Vec<bool>, AdversaryError> {
        let words: Vec<u64> = x.iter().map(|&b| if b { !0 } else { 0 }).collect();
        Ok(self.eval_batch(&words)?.into_iter().map(|w| w & 1 == 1).collect())
    }

    /// One word per input, lane `l` of every word forming one input string.
    pub fn eval_batch(&self, inputs: &[u64]) -> Result<Vec<u64>, AdversaryError> {
        if inputs.len() != self.n_in {
            return Err(AdversaryError::Arity { expected: self.n_in, got: inputs.len() });
        }
        let mut val = inputs.to_vec();
        val.reserve(self.gates.len());
        let mut args = Vec::with_capacity(MAX_FAN_IN);
        for gate in &self.gates {
            args.clear();
            args.extend(gate.inputs.iter().map(|&a| val[a]));
            val.push(gate.eval_words(&args));
        }
        Ok(self.outputs.iter().map(|&o| val[o]).collect())
    }

    /// Layered random circuit: `depth` layers of gates, each reading
    /// `fan_in` distinct nodes of the previous layer with a uniform truth
    /// table. Inner layers have `max(n_in, n_out)` gates; the last layer
    /// holds the outputs.
    pub fn random_layered<R: Rng + ?Sized>(n_in: usize, n_out: usize, depth: usize, fan_in: usize, rng: &mut R) -> Self {
        assert!(depth >= 1 && (1..=MAX_FAN_IN).contains(&fan_in) && n_in >= fan_in);
        let width = n_in.max(n_out);
        let mut gates = Vec::new();
        let mut prev: Vec<usize> = (0..n_in).collect();
        for layer in 0..depth {
            let count = if layer + 1 == depth { n_out } else { width };
            let mut next = Vec::with_capacity(count);
            for _ in 0..count {
                let inputs = rand::seq::index::sample(rng, prev.len(), fan_in).into_iter().map(|i| prev[i]).collect();
                let table = rng.gen::<u64>() & mask(1 << fan_in);
                next.push(n_in + gates.len());
                gates.push(DagGate { inputs, table });
            }
            prev = next;
        }
        Self { n_in, fan_in, gates, outputs: prev }
    }

    /// Gates feeding `node` in topological order, and the inputs reached.
    fn cone_of(&self, node: usize) -> (Vec<usize>, Vec<usize>) {
        let mut seen = BTreeSet::new();
        let mut stack = vec![node];
        while let Some(v) = stack.pop() {
            if seen.insert(v) && v >= self.n_in {
                stack.extend(self.gates[v - self.n_in].inputs.iter().copied());
            }
        }
        let (inputs, gates) = seen.into_iter().partition(|&v| v < self.n_in);
        (gates, inputs)
    }

    /// Inputs reachable from every node, in one topological pass.
    pub fn input_supports(&self) -> Vec<Vec<usize>> {
        let mut sup: Vec<Vec<usize>> = (0..self.n_in).map(|i| vec![i]).collect();
        for gate in &self.gates {
            let mut s: Vec<usize> = gate.inputs.iter().flat_map(|&a| sup[a].iter().copied()).collect();
            s.sort_unstable();
            s.dedup();
            sup.push(s);
        }
        sup
    }

    /// Truth table of output `o` as a function of `vars`, with every other
    /// input taken from `base`. Entry `a` uses bit `i` of `a` for `vars[i]`.
    pub fn output_table(&self, o: usize, vars: &[usize], base: &[bool]) -> Vec<bool> {
        let (gates, _) = self.cone_of(self.outputs[o]);
        let k = vars.len();
        let mut local = std::collections::HashMap::new();
        let mut table = Vec::with_capacity(1 << k);
        let mut args = Vec::with_capacity(MAX_FAN_IN);
        for chunk in (0..1usize << k).step_by(64) {
            local.clear();
            let lanes = (1usize << k).min(64);
            for (i, &v) in vars.iter().enumerate() {
                let mut w = 0u64;
                for l in 0..lanes {
                    w |= (((chunk + l) >> i & 1) as u64) << l;
                }
                local.insert(v, w);
            }
            let value = |local: &std::collections::HashMap<usize, u64>, a: usize| {
                local.get(&a).copied().unwrap_or_else(|| if a < self.n_in && base[a] { !0 } else { 0 })
            };
            for &g in &gates {
                let gate = &self.gates[g - self.n_in];
                args.clear();
                args.extend(gate.inputs.iter().map(|&a| value(&local, a)));
                let w = gate.eval_words(&args);
                local.insert(g, w);
            }
            let w = value(&local, self.outputs[o]);
            table.extend((0..lanes).map(|l| w >> l & 1 == 1));
        }
        table
    }
}

fn mask(bits: usize) -> u64 {
    if bits >= 64 { !0 } else { (1u64 << bits) - 1 }
}

/// Variables among `0..k` a truth table depends on.
pub fn table_support(table: &[bool], k: usize) -> Vec<usize> {
    (0..k).filter(|&i| (0..table.len()).any(|a| a >> i & 1 == 0 && table[a] != table[a | 1 << i])).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeMode {
    Semantic,
    Structural,
}

/// Forward cone per input and backward cone per output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LightCones {
    pub forward: Vec<Vec<usize>>,
    pub backward: Vec<Vec<usize>>,
    /// How each backward cone was obtained.
    pub modes: Vec<ConeMode>,
}

impl LightCones {
    fn from_backward(n_in: usize, backward: Vec<Vec<usize>>, modes: Vec<ConeMode>) -> Self {
        let mut forward = vec![Vec::new(); n_in];
        for (o, b) in backward.iter().enumerate() {
            for &i in b {
                forward[i].push(o);
            }
        }
        Self { forward, backward, modes }
    }

    /// Largest backward cone.
    pub fn max_backward(&self) -> usize {
        self.backward.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Cones between blocks of `in_block` inputs and `out_block` outputs.
    pub fn coarsen(&self, in_block: usize, out_block: usize) -> Self {
        let n_in = self.forward.len().div_ceil(in_block);
        let n_out = self.backward.len().div_ceil(out_block);
        let mut backward = vec![BTreeSet::new(); n_out];
        for (o, b) in self.backward.iter().enumerate() {
            backward[o / out_block].extend(b.iter().map(|&i| i / in_block));
        }
        let mut modes = vec![ConeMode::Semantic; n_out];
        for (o, &m) in self.modes.iter().enumerate() {
            if m == ConeMode::Structural {
                modes[o / out_block] = m;
            }
        }
        Self::from_backward(n_in, backward.into_iter().map(|s| s.into_iter().collect()).collect(), modes)
    }

    /// `j` with the smallest forward cone, then any `k ≠ j` outside the
    /// backward cone of that forward cone.
    pub fn nonsignaling_pair(&self) -> Option<(usize, usize)> {
        let j = (0..self.forward.len()).min_by_key(|&i| self.forward[i].len())?;
        let mut blocked = vec![false; self.forward.len()];
        blocked[j] = true;
        for &o in &self.forward[j] {
            for &i in &self.backward[o] {
                blocked[i] = true;
            }
        }
        let k = blocked.iter().position(|&b| !b)?;
        Some((j, k))
    }
}

/// Reachability cones.
pub fn light_cones_structural(dag: &CircuitDag) -> LightCones {
    let sup = dag.input_supports();
    let backward = dag.outputs.iter().map(|&o| sup[o].clone()).collect();
    LightCones::from_backward(dag.n_in, backward, vec![ConeMode::Structural; dag.n_out()])
}

/// Dependence cones: an input belongs to the backward cone of `o` when
/// toggling it changes `o` for some assignment. Cones above
/// [`SEMANTIC_CONE_LIMIT`] inputs fall back to reachability.
pub fn light_cones(dag: &CircuitDag) -> LightCones {
    let base = vec![false; dag.n_in];
    let sup = dag.input_supports();
    let (backward, modes) = (0..dag.n_out())
        .map(|o| {
            let reach = sup[dag.outputs[o]].clone();
            if reach.len() > SEMANTIC_CONE_LIMIT {
                return (reach, ConeMode::Structural);
            }
            let table = dag.output_table(o, &reach, &base);
            (table_support(&table, reach.len()).into_iter().map(|i| reach[i]).collect(), ConeMode::Semantic)
        })
        .unzip();
    LightCones::from_backward(dag.n_in, backward, modes)
}

/// Non-signaling input pair of `dag` under its semantic cones.
pub fn find_nonsignaling_pair(dag: &CircuitDag) -> Option<(usize, usize)> {
    light_cones(dag).nonsignaling_pair()
}

/// Non-signaling pair of input blocks, with `in_block` input bits and
/// `out_block` output bits per block.
pub fn find_nonsignaling_blocks(dag: &CircuitDag, in_block: usize, out_block: usize) -> Option<(usize, usize)> {
    light_cones(dag).coarsen(in_block, out_block).nonsignaling_pair()
}
