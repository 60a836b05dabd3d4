//! The wedge: a foliated cluster state whose bulk, once measured in the X
//! basis, leaves a logical Bell pair on two opposite faces.
//!
//! Sheets `t = 0..=T` each carry a copy of the patch lattice. Data sites
//! appear on every sheet, Z-check sites on even sheets and X-check sites on
//! odd sheets. Cluster edges join a check site to its data in the same sheet
//! and each data site to its copy in the next sheet. The data of sheets `0`
//! and `T` form the left and right faces; everything else is bulk.

use std::collections::HashMap;

use serde::Serialize;

use super::decoder::{DecoderKind, DecodingGraph, Edge};
use super::patch::{CodeError, SurfaceCodePatch};
use crate::gf2::{transpose, BitVec, Echelon};
use crate::stabilizer_sim::{Gate, LayeredCircuit, Op, PauliFrame, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SiteRole {
    FaceL,
    FaceR,
    BulkData,
    ZNode,
    XNode,
}

/// A lattice site at `(x, y)` on sheet `t`. `local` is the data index for
/// data sites and the check index for check sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Site {
    pub role: SiteRole,
    pub x: usize,
    pub y: usize,
    pub t: usize,
    pub local: usize,
}

impl Site {
    pub fn is_face(&self) -> bool {
        matches!(self.role, SiteRole::FaceL | SiteRole::FaceR)
    }

    /// Coordinates after folding along the diagonal: `(min, max, side)`.
    pub fn folded(&self) -> (usize, usize, bool) {
        (self.x.min(self.y), self.x.max(self.y), self.x > self.y)
    }
}

/// Qubits are numbered: left face `0..m`, right face `m..2m`, then the bulk
/// in the order of the bulk measurement record.
#[derive(Clone, Debug, Serialize)]
pub struct WedgeLayout {
    pub d: usize,
    #[serde(skip)]
    pub patch: SurfaceCodePatch,
    /// Index of the last sheet.
    pub t_max: usize,
    pub sites: Vec<Site>,
    pub m: usize,
    pub m_aux: usize,
    /// Cluster edges (CZ pairs).
    pub edges: Vec<(usize, usize)>,
    /// State generation (no measurements).
    #[serde(skip)]
    pub circuit: LayeredCircuit,
    /// Parity checks on the bulk record, as bulk indices.
    pub checks: Vec<Vec<usize>>,
    #[serde(skip)]
    pub check_signs: BitVec,
    /// Face stabilizers of the Bell pair: the four check families, then
    /// `X̄X̄` and `Z̄Z̄`.
    #[serde(skip)]
    pub targets: Vec<PauliString>,
    #[serde(skip)]
    target_bulk: Vec<BitVec>,
    #[serde(skip)]
    pub target_signs: BitVec,
    #[serde(skip)]
    pub destabilizers: Vec<PauliFrame>,
    #[serde(skip)]
    rec_const: PauliFrame,
    #[serde(skip)]
    rec_cols: Vec<PauliFrame>,
    #[serde(skip)]
    pub graph: DecodingGraph,
    /// Bulk record of the reference run (random outcomes fixed to 0).
    #[serde(skip)]
    pub s_ref: BitVec,
}

/// Colour order of the CZ layers.
pub const DEFAULT_SCHEDULE: [usize; 6] = [0, 1, 2, 3, 4, 5];

/// Nominal per-fault rate used to weight the matching graph.
pub const FAULT_GRAPH_RATE: f64 = 1e-3 / 3.0;

fn cluster_stabilizer(n: usize, v: usize, nbrs: &[Vec<usize>]) -> PauliString {
    let mut p = PauliString::x_on(n, [v]);
    for &w in &nbrs[v] {
        p.z.flip(w);
    }
    p
}

impl WedgeLayout {
    /// Builds the wedge for odd `d`. `d = 1` gives a bare Bell pair.
    pub fn new(d: usize) -> Result<Self, CodeError> {
        Self::with_schedule(d, DEFAULT_SCHEDULE)
    }

    /// As [`WedgeLayout::new`] with the six edge colours applied in the given
    /// order. Colours 0–3 are in-sheet edges (x-axis even/odd lower end,
    /// y-axis even/odd), 4–5 are time edges (even/odd lower sheet).
    pub fn with_schedule(d: usize, order: [usize; 6]) -> Result<Self, CodeError> {
        let patch = SurfaceCodePatch::new(d)?;
        if d == 1 {
            return Ok(Self::bell_pair(patch));
        }
        let m = patch.m;
        let t_max = (2 * d - 2).max(2);
        let mut sites = Vec::new();
        for (role, t) in [(SiteRole::FaceL, 0), (SiteRole::FaceR, t_max)] {
            for (q, &(x, y)) in patch.coords.iter().enumerate() {
                sites.push(Site { role, x, y, t, local: q });
            }
        }
        for t in 1..t_max {
            for (q, &(x, y)) in patch.coords.iter().enumerate() {
                sites.push(Site { role: SiteRole::BulkData, x, y, t, local: q });
            }
        }
        for t in (0..=t_max).step_by(2) {
            for (c, &((x, y), _)) in patch.z_checks.iter().enumerate() {
                sites.push(Site { role: SiteRole::ZNode, x, y, t, local: c });
            }
        }
        for t in (1..t_max).step_by(2) {
            for (c, &((x, y), _)) in patch.x_checks.iter().enumerate() {
                sites.push(Site { role: SiteRole::XNode, x, y, t, local: c });
            }
        }
        let n = sites.len();
        let at: HashMap<(usize, usize, usize), usize> =
            sites.iter().enumerate().map(|(i, s)| ((s.x, s.y, s.t), i)).collect();
        let data = |q: usize, t: usize| at[&(patch.coords[q].0, patch.coords[q].1, t)];

        // Edges with a six-colouring: in-sheet edges by axis and parity of
        // the lower coordinate, time edges by parity of the lower sheet.
        let mut colored: Vec<(usize, usize, usize)> = Vec::new();
        for (i, s) in sites.iter().enumerate() {
            let supp = match s.role {
                SiteRole::ZNode => &patch.z_checks[s.local].1,
                SiteRole::XNode => &patch.x_checks[s.local].1,
                _ => continue,
            };
            for &q in supp {
                let j = data(q, s.t);
                let (qx, qy) = patch.coords[q];
                let color = if qy == s.y { qx.min(s.x) % 2 } else { 2 + qy.min(s.y) % 2 };
                colored.push((color, i, j));
            }
        }
        for t in 0..t_max {
            for q in 0..m {
                colored.push((4 + t % 2, data(q, t), data(q, t + 1)));
            }
        }
        let edges: Vec<(usize, usize)> = colored.iter().map(|&(_, a, b)| (a.min(b), a.max(b))).collect();
        let mut circuit = LayeredCircuit::new(n, 0);
        for (slot, &color) in order.iter().enumerate() {
            let mut layer: Vec<Op> = Vec::new();
            let mut covered = vec![false; n];
            for &(c, a, b) in &colored {
                if c == color {
                    covered[a] = true;
                    covered[b] = true;
                    layer.push(if slot == 0 { Gate::HCz(a, b) } else { Gate::Cz(a, b) }.into());
                }
            }
            if slot == 0 {
                layer.extend((0..n).filter(|&q| !covered[q]).map(|q| Op::from(Gate::H(q))));
            }
            circuit.push_layer(layer).expect("a proper edge colouring gives disjoint layers");
        }

        let mut nbrs = vec![Vec::new(); n];
        for &(a, b) in &edges {
            nbrs[a].push(b);
            nbrs[b].push(a);
        }
        let face = 2 * m;
        let m_aux = n - face;

        // Bulk parity checks.
        let mut checks = Vec::new();
        for (i, s) in sites.iter().enumerate() {
            let supp = match s.role {
                SiteRole::ZNode if s.t + 2 <= t_max => &patch.z_checks[s.local].1,
                SiteRole::XNode if s.t + 3 <= t_max => &patch.x_checks[s.local].1,
                _ => continue,
            };
            let mut set = vec![i - face, at[&(s.x, s.y, s.t + 2)] - face];
            set.extend(supp.iter().map(|&q| data(q, s.t + 1) - face));
            checks.push(set);
        }
        let mut check_signs = BitVec::zeros(checks.len());
        for (k, set) in checks.iter().enumerate() {
            let mut prod = PauliString::identity(n);
            for &b in set {
                prod.mul_assign(&cluster_stabilizer(n, face + b, &nbrs));
            }
            assert!(prod.z.is_zero(), "bulk check {k} leaves Z support");
            check_signs.set(k, prod.phase == 2);
        }
        let graph = DecodingGraph::from_checks(m_aux, &checks);

        // Face stabilizers of the target Bell pair.
        let mut targets = Vec::new();
        for off in [0, m] {
            for (_, supp) in &patch.z_checks {
                targets.push(PauliString::z_on(face, supp.iter().map(|&q| off + q)));
            }
            for (_, supp) in &patch.x_checks {
                targets.push(PauliString::x_on(face, supp.iter().map(|&q| off + q)));
            }
        }
        let lx = &patch.logical_x;
        let lz = &patch.logical_z;
        targets.push(PauliString::x_on(face, lx.iter().copied().chain(lx.iter().map(|&q| m + q))));
        targets.push(PauliString::z_on(face, lz.iter().copied().chain(lz.iter().map(|&q| m + q))));

        // Find S with ∏_{v∈S} K_v = ± X_{S∩bulk} ⊗ T on the face.
        let gens: Vec<BitVec> = (0..n)
            .map(|v| {
                let mut g = BitVec::zeros(face + n);
                if v < face {
                    g.set(v, true);
                }
                for &w in &nbrs[v] {
                    g.flip(face + w);
                }
                g
            })
            .collect();
        let ech = Echelon::new(&gens);
        let mut target_bulk = Vec::new();
        let mut target_signs = BitVec::zeros(targets.len());
        for (i, t) in targets.iter().enumerate() {
            let mut want = BitVec::zeros(face + n);
            for q in t.x.ones() {
                want.set(q, true);
            }
            for q in t.z.ones() {
                want.set(face + q, true);
            }
            let combo = ech.express(&want).unwrap_or_else(|| panic!("face stabilizer {i} is not reachable"));
            let mut prod = PauliString::identity(n);
            for v in combo.ones() {
                prod.mul_assign(&cluster_stabilizer(n, v, &nbrs));
            }
            debug_assert!((0..face).all(|q| prod.x.get(q) == t.x.get(q) && prod.z.get(q) == t.z.get(q)));
            target_signs.set(i, prod.phase == 2);
            target_bulk.push(BitVec::from_indices(m_aux, combo.ones().filter(|&v| v >= face).map(|v| v - face)));
        }
        let destabilizers = destabilizers(&targets);
        let mut rec_const = PauliFrame::identity(face);
        for i in target_signs.ones() {
            rec_const.compose(&destabilizers[i]);
        }
        let mut rec_cols = vec![PauliFrame::identity(face); m_aux];
        for (i, sb) in target_bulk.iter().enumerate() {
            for v in sb.ones() {
                rec_cols[v].compose(&destabilizers[i]);
            }
        }

        let mut w = Self {
            d,
            patch,
            t_max,
            sites,
            m,
            m_aux,
            edges,
            circuit,
            checks,
            check_signs,
            targets,
            target_bulk,
            target_signs,
            destabilizers,
            rec_const,
            rec_cols,
            graph,
            s_ref: BitVec::zeros(m_aux),
        };
        let mut rng = rand::rngs::mock::StepRng::new(0, 0);
        let rec = w.measurement_circuit().run_tableau(&BitVec::zeros(0), Some(false), &mut rng).1;
        w.s_ref = rec.bits;
        w.graph = w.fault_graph(FAULT_GRAPH_RATE);
        Ok(w)
    }

    fn bell_pair(patch: SurfaceCodePatch) -> Self {
        let mut circuit = LayeredCircuit::new(2, 0);
        circuit.push_layer(vec![Gate::H(0).into()]).expect("one gate");
        circuit.push_layer(vec![Gate::Cnot(0, 1).into()]).expect("one gate");
        let targets = vec![PauliString::x_on(2, [0, 1]), PauliString::z_on(2, [0, 1])];
        let sites = vec![
            Site { role: SiteRole::FaceL, x: 0, y: 0, t: 0, local: 0 },
            Site { role: SiteRole::FaceR, x: 0, y: 0, t: 1, local: 0 },
        ];
        Self {
            d: 1,
            patch,
            t_max: 1,
            sites,
            m: 1,
            m_aux: 0,
            edges: vec![(0, 1)],
            circuit,
            checks: Vec::new(),
            check_signs: BitVec::zeros(0),
            destabilizers: destabilizers(&targets),
            targets,
            target_bulk: vec![BitVec::zeros(0); 2],
            target_signs: BitVec::zeros(2),
            rec_const: PauliFrame::identity(2),
            rec_cols: Vec::new(),
            graph: DecodingGraph::from_checks(0, &[]),
            s_ref: BitVec::zeros(0),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.sites.len()
    }

    pub fn face_l(&self) -> std::ops::Range<usize> {
        0..self.m
    }

    pub fn face_r(&self) -> std::ops::Range<usize> {
        self.m..2 * self.m
    }

    pub fn bulk(&self) -> std::ops::Range<usize> {
        2 * self.m..self.n_qubits()
    }

    /// Generation followed by one layer of bulk X measurements, recorded in
    /// bulk order.
    pub fn measurement_circuit(&self) -> LayeredCircuit {
        let mut c = self.circuit.clone();
        if self.m_aux > 0 {
            c.push_layer(self.bulk().map(|q| Op::from(Gate::MeasureX(q))).collect())
                .expect("bulk measurements are disjoint");
        }
        c
    }

    /// Bulk-check syndrome of a record.
    pub fn syndrome(&self, s: &BitVec) -> BitVec {
        let mut out = self.check_signs.clone();
        for (k, set) in self.checks.iter().enumerate() {
            if set.iter().filter(|&&b| s.get(b)).count() % 2 == 1 {
                out.flip(k);
            }
        }
        out
    }

    /// `Σ_v s_v R_v`: the record-linear part of the recovery.
    pub fn rec_linear(&self, s: &BitVec) -> PauliFrame {
        let mut f = PauliFrame::identity(2 * self.m);
        for v in s.ones() {
            f.compose(&self.rec_cols[v]);
        }
        f
    }

    /// Recovery for a record with a consistent syndrome.
    pub fn rec_exact(&self, s: &BitVec) -> PauliFrame {
        let mut f = self.rec_linear(s);
        f.compose(&self.rec_const);
        f
    }

    /// `Rec(s)`: decode the bulk syndrome, then apply the exact recovery to
    /// the corrected record.
    pub fn rec(&self, s: &BitVec, kind: DecoderKind) -> PauliFrame {
        let syn = self.syndrome(s);
        let mut fixed = s.clone();
        if !syn.is_zero() {
            fixed.xor_with(&self.graph.decode(kind, &syn));
        }
        self.rec_exact(&fixed)
    }

    /// Matching graph from the single faults of the measurement circuit.
    /// Every X, Y or Z fault at every location whose bulk syndrome has one
    /// or two defects becomes an edge carrying its own flip pattern. Faults
    /// sharing endpoints are pooled: the weight is the log-odds of the
    /// pooled rate at `q` per fault, and the most common pattern is kept.
    /// Plain bit edges stay as heavy fallbacks.
    pub fn fault_graph(&self, q: f64) -> DecodingGraph {
        self.fault_graph_with_stats(q).0
    }

    /// [`WedgeLayout::fault_graph`] plus the number of faults left out for
    /// lighting more than two checks.
    pub fn fault_graph_with_stats(&self, q: f64) -> (DecodingGraph, usize) {
        let mut skipped = 0;
        let base = DecodingGraph::from_checks(self.m_aux, &self.checks);
        let circ = self.measurement_circuit();
        let n = self.n_qubits();
        let none = BitVec::zeros(0);
        type Key = (usize, Option<usize>);
        let mut groups: HashMap<Key, (usize, HashMap<Vec<usize>, usize>)> = HashMap::new();
        for layer in 0..=circ.depth() {
            for qb in 0..n {
                for (x, z) in [(true, false), (false, true), (true, true)] {
                    let mut e = PauliFrame::identity(n);
                    e.x_mask.set(qb, x);
                    e.z_mask.set(qb, z);
                    let (flips, _) = circ.propagate(&none, &e, layer);
                    let defects: Vec<usize> = base.syndrome(&flips).ones().collect();
                    let key = match defects.as_slice() {
                        [a] => (*a, None),
                        [a, b] => (*a, Some(*b)),
                        [] => continue,
                        _ => {
                            skipped += 1;
                            continue;
                        }
                    };
                    let g = groups.entry(key).or_default();
                    g.0 += 1;
                    *g.1.entry(flips.ones().collect()).or_default() += 1;
                }
            }
        }
        let heavy = 4.0 * ((1.0 - q) / q).ln();
        let mut graph = base.with_uniform_weight(heavy);
        let mut keys: Vec<_> = groups.into_iter().collect();
        keys.sort_by(|a, b| a.0.cmp(&b.0));
        for ((a, b), (count, patterns)) in keys {
            let rate = (count as f64 * q).min(0.5);
            let flips = patterns.into_iter().max_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0))).expect("nonempty").0;
            graph.add_edge(Edge { a, b, weight: ((1.0 - rate) / rate).ln(), flips });
        }
        (graph, skipped)
    }

    /// Bulk support of the cluster product realising target `i`.
    pub fn target_support(&self, i: usize) -> &BitVec {
        &self.target_bulk[i]
    }
}

/// Paulis `D_i` with `D_i` anticommuting with `T_i` and commuting with every
/// other `T_k`. The targets must be independent.
pub fn destabilizers(targets: &[PauliString]) -> Vec<PauliFrame> {
    let n = targets.first().map_or(0, PauliString::n);
    // Row k of A is (z_k | x_k), so A·(dx | dz) is the commutation pattern.
    let rows: Vec<BitVec> = targets
        .iter()
        .map(|t| {
            let mut r = BitVec::zeros(2 * n);
            for q in t.z.ones() {
                r.set(q, true);
            }
            for q in t.x.ones() {
                r.set(n + q, true);
            }
            r
        })
        .collect();
    let cols = transpose(&rows, 2 * n);
    let ech = Echelon::new(&cols);
    (0..targets.len())
        .map(|i| {
            let c = ech
                .express(&BitVec::from_indices(targets.len(), [i]))
                .expect("targets are independent");
            let mut f = PauliFrame::identity(n);
            for j in c.ones() {
                if j < n {
                    f.x_mask.set(j, true);
                } else {
                    f.z_mask.set(j - n, true);
                }
            }
            f
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_three_counts() {
        let w = WedgeLayout::new(3).unwrap();
        assert_eq!(w.m, 13);
        assert_eq!(w.m_aux, 69);
        assert_eq!(w.circuit.depth(), 6);
    }

    #[test]
    fn degenerate_wedge_is_a_bell_pair() {
        let w = WedgeLayout::new(1).unwrap();
        assert_eq!((w.m, w.m_aux), (1, 0));
        assert!(w.rec_exact(&BitVec::zeros(0)).is_identity());
    }
}
