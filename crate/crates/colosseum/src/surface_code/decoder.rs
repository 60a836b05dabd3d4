//! Matching-graph decoders. Checks are nodes; every bit lies in at most two
//! checks (a bit in one check also touches the boundary), and extra fault
//! edges with their own flip patterns can be added.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::gf2::BitVec;

/// Exact matching is used up to this many defects; beyond it, union-find.
pub const MATCHING_DEFECT_LIMIT: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    /// Maximum likelihood by enumeration (small 2D codes only).
    Exhaustive,
    UnionFind,
    /// Minimum-weight matching by subset dynamic programming.
    #[default]
    Matching,
}

impl std::str::FromStr for DecoderKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exhaustive" => Ok(Self::Exhaustive),
            "union-find" | "uf" => Ok(Self::UnionFind),
            "matching" | "mwpm" => Ok(Self::Matching),
            _ => Err(format!("unknown decoder {s:?}")),
        }
    }
}

/// Decoder selection; `q` is the iid bit-flip rate assumed by the
/// exhaustive decoder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoderChoice {
    pub kind: DecoderKind,
    pub q: f64,
}

impl Default for DecoderChoice {
    fn default() -> Self {
        Self { kind: DecoderKind::Matching, q: 0.01 }
    }
}

/// An edge of the matching graph: a fault that lights `a` and `b` (`None`
/// is the boundary) and is corrected by flipping `flips`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub a: usize,
    pub b: Option<usize>,
    pub weight: f64,
    pub flips: Vec<usize>,
}

/// Checks are nodes and faults are edges. Built from check supports, each
/// bit is one unit-weight edge; further fault edges may be added.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecodingGraph {
    pub n_checks: usize,
    pub n_bits: usize,
    pub edges: Vec<Edge>,
    /// Checks containing each bit.
    bit_checks: Vec<Vec<usize>>,
    adj: Vec<Vec<(usize, usize)>>,
    index: HashMap<(usize, usize), usize>,
}

#[derive(Clone, Copy, PartialEq)]
struct Dist(f64, usize);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Dist {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

impl DecodingGraph {
    /// From check supports over `n_bits` bits. A bit in no check is
    /// invisible and gets no edge.
    ///
    /// # Panics
    /// If a bit lies in more than two checks.
    pub fn from_checks(n_bits: usize, checks: &[Vec<usize>]) -> Self {
        let mut bit_checks: Vec<Vec<usize>> = vec![Vec::new(); n_bits];
        for (c, supp) in checks.iter().enumerate() {
            for &b in supp {
                bit_checks[b].push(c);
            }
        }
        let mut g = Self {
            n_checks: checks.len(),
            n_bits,
            edges: Vec::new(),
            bit_checks,
            adj: vec![Vec::new(); checks.len() + 1],
            index: HashMap::new(),
        };
        for b in 0..n_bits {
            let (a, c) = match g.bit_checks[b].as_slice() {
                [] => continue,
                [a] => (*a, None),
                [a, c] => (*a, Some(*c)),
                more => panic!("bit {b} lies in {} checks", more.len()),
            };
            g.add_edge(Edge { a, b: c, weight: 1.0, flips: vec![b] });
        }
        g
    }

    /// Adds a fault edge. An edge between the same endpoints is replaced
    /// when the new one is lighter.
    pub fn add_edge(&mut self, e: Edge) {
        let bnd = self.n_checks;
        let (a, b) = (e.a, e.b.unwrap_or(bnd));
        if a == b {
            return;
        }
        let key = (a.min(b), a.max(b));
        if let Some(&i) = self.index.get(&key) {
            if e.weight < self.edges[i].weight {
                self.edges[i] = e;
            }
            return;
        }
        let i = self.edges.len();
        self.index.insert(key, i);
        self.adj[a].push((b, i));
        self.adj[b].push((a, i));
        self.edges.push(e);
    }

    /// Sets every edge weight to `w`.
    pub fn with_uniform_weight(mut self, w: f64) -> Self {
        for e in &mut self.edges {
            e.weight = w;
        }
        self
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    fn boundary(&self) -> usize {
        self.n_checks
    }

    fn other(&self, e: usize, v: usize) -> usize {
        let edge = &self.edges[e];
        let b = edge.b.unwrap_or(self.n_checks);
        if edge.a == v {
            b
        } else {
            edge.a
        }
    }

    /// Syndrome of a bit pattern.
    pub fn syndrome(&self, bits: &BitVec) -> BitVec {
        let mut s = BitVec::zeros(self.n_checks);
        for b in bits.ones() {
            for &c in &self.bit_checks[b] {
                s.flip(c);
            }
        }
        s
    }

    fn apply(&self, e: usize, out: &mut BitVec) {
        for &b in &self.edges[e].flips {
            out.flip(b);
        }
    }

    /// Shortest paths from `src` that do not pass through the boundary.
    fn dijkstra(&self, src: usize) -> (Vec<f64>, Vec<Option<(usize, usize)>>) {
        let n = self.n_checks + 1;
        let mut dist = vec![f64::INFINITY; n];
        let mut parent = vec![None; n];
        let mut heap = std::collections::BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(Dist(0.0, src));
        while let Some(Dist(d, v)) = heap.pop() {
            if d > dist[v] || v == self.boundary() {
                continue;
            }
            for &(w, e) in &self.adj[v] {
                let nd = d + self.edges[e].weight;
                if nd < dist[w] {
                    dist[w] = nd;
                    parent[w] = Some((v, e));
                    heap.push(Dist(nd, w));
                }
            }
        }
        (dist, parent)
    }

    fn path_flips(&self, parent: &[Option<(usize, usize)>], mut to: usize, out: &mut BitVec) {
        while let Some((p, e)) = parent[to] {
            self.apply(e, out);
            to = p;
        }
    }

    /// Correction (bits to flip) for `syndrome`.
    pub fn decode(&self, kind: DecoderKind, syndrome: &BitVec) -> BitVec {
        let defects: Vec<usize> = syndrome.ones().collect();
        if defects.is_empty() {
            return BitVec::zeros(self.n_bits);
        }
        match kind {
            DecoderKind::Matching if defects.len() <= MATCHING_DEFECT_LIMIT => self.matching(&defects),
            _ => self.union_find(&defects),
        }
    }

    /// Exact minimum-weight matching with optional boundary matches.
    pub fn matching(&self, defects: &[usize]) -> BitVec {
        let k = defects.len();
        assert!(k <= 20, "subset matching is exponential in the defect count");
        let trees: Vec<_> = defects.iter().map(|&d| self.dijkstra(d)).collect();
        let dist = |i: usize, t: usize| trees[i].0[t];
        let full = (1usize << k) - 1;
        let mut best = vec![f64::INFINITY; 1 << k];
        let mut choice = vec![(0usize, usize::MAX); 1 << k];
        best[0] = 0.0;
        for mask in 1..=full {
            let i = mask.trailing_zeros() as usize;
            let rest = mask & !(1 << i);
            let b = best[rest] + dist(i, self.boundary());
            if b < best[mask] {
                best[mask] = b;
                choice[mask] = (i, usize::MAX);
            }
            let mut r = rest;
            while r != 0 {
                let j = r.trailing_zeros() as usize;
                r &= r - 1;
                let c = best[rest & !(1 << j)] + dist(i, defects[j]);
                if c < best[mask] {
                    best[mask] = c;
                    choice[mask] = (i, j);
                }
            }
        }
        let mut out = BitVec::zeros(self.n_bits);
        let mut mask = full;
        while mask != 0 {
            let (i, j) = choice[mask];
            if j == usize::MAX {
                self.path_flips(&trees[i].1, self.boundary(), &mut out);
                mask &= !(1 << i);
            } else {
                self.path_flips(&trees[i].1, defects[j], &mut out);
                mask &= !(1 << i) & !(1 << j);
            }
        }
        out
    }

    /// Union-find decoder: grow odd clusters by half-edges until every
    /// cluster is even or touches the boundary, then peel a spanning forest.
    /// Edge weights are ignored.
    pub fn union_find(&self, defects: &[usize]) -> BitVec {
        let n = self.n_checks + 1;
        let bnd = self.boundary();
        let mut parent: Vec<usize> = (0..n).collect();
        let mut odd = vec![false; n];
        let mut touches = vec![false; n];
        touches[bnd] = true;
        let mut is_defect = vec![false; n];
        for &d in defects {
            odd[d] = true;
            is_defect[d] = true;
        }
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut support = vec![0u8; self.edges.len()];
        let active = |p: &mut Vec<usize>, odd: &[bool], touches: &[bool], v: usize| {
            let r = find(p, v);
            odd[r] && !touches[r]
        };
        loop {
            let mut any = false;
            let mut grown = Vec::new();
            for (e, edge) in self.edges.iter().enumerate() {
                if support[e] >= 2 {
                    continue;
                }
                let (a, b) = (edge.a, edge.b.unwrap_or(bnd));
                let inc = active(&mut parent, &odd, &touches, a) as u8 + active(&mut parent, &odd, &touches, b) as u8;
                if inc > 0 {
                    any = true;
                    support[e] = (support[e] + inc).min(2);
                    if support[e] == 2 {
                        grown.push(e);
                    }
                }
            }
            if !any {
                break;
            }
            for e in grown {
                let edge = &self.edges[e];
                let (ra, rb) = (find(&mut parent, edge.a), find(&mut parent, edge.b.unwrap_or(bnd)));
                if ra != rb {
                    parent[rb] = ra;
                    odd[ra] ^= odd[rb];
                    touches[ra] |= touches[rb];
                }
            }
        }
        // Spanning forest over fully grown edges, rooted at the boundary when
        // a cluster contains it.
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (e, edge) in self.edges.iter().enumerate() {
            if support[e] == 2 {
                let b = edge.b.unwrap_or(bnd);
                adj[edge.a].push((b, e));
                adj[b].push((edge.a, e));
            }
        }
        let mut seen = vec![false; n];
        let mut order = Vec::new();
        let mut tree_parent: Vec<Option<(usize, usize)>> = vec![None; n];
        for root in std::iter::once(bnd).chain(defects.iter().copied()) {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut q = VecDeque::from([root]);
            while let Some(v) = q.pop_front() {
                order.push(v);
                for &(w, e) in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        tree_parent[w] = Some((v, e));
                        q.push_back(w);
                    }
                }
            }
        }
        let mut out = BitVec::zeros(self.n_bits);
        for &v in order.iter().rev() {
            if is_defect[v] {
                if let Some((p, e)) = tree_parent[v] {
                    debug_assert_eq!(self.other(e, v), p);
                    self.apply(e, &mut out);
                    is_defect[v] = false;
                    if p != bnd {
                        is_defect[p] ^= true;
                    }
                }
            }
        }
        out
    }
}

/// Maximum-likelihood table for a small code: for each syndrome, the most
/// likely logical class under iid flips at rate `q`, with a minimum-weight
/// representative. `logical` marks the bits whose parity is the logical
/// readout.
#[derive(Clone, Debug)]
pub struct ExhaustiveDecoder {
    table: HashMap<BitVec, BitVec>,
    n_bits: usize,
}

impl ExhaustiveDecoder {
    pub fn new(graph: &DecodingGraph, logical: &BitVec, q: f64) -> Self {
        let n = graph.n_bits();
        assert!(n <= 24, "exhaustive decoding is limited to 24 bits");
        let ratio = q / (1.0 - q);
        // syndrome -> [(weight sum, min-weight rep); 2 classes]
        let mut acc: HashMap<BitVec, [(f64, Option<(u32, BitVec)>); 2]> = HashMap::new();
        for v in 0u32..(1 << n) {
            let bits = BitVec::from_indices(n, (0..n).filter(|&b| v >> b & 1 == 1));
            let w = v.count_ones();
            let class = bits.dot(logical) as usize;
            let entry = acc.entry(graph.syndrome(&bits)).or_insert([(0.0, None), (0.0, None)]);
            entry[class].0 += ratio.powi(w as i32);
            if entry[class].1.as_ref().is_none_or(|(bw, _)| w < *bw) {
                entry[class].1 = Some((w, bits));
            }
        }
        let table = acc
            .into_iter()
            .map(|(s, cls)| {
                let pick = if cls[1].0 > cls[0].0 { 1 } else { 0 };
                let rep = cls[pick].1.clone().or_else(|| cls[1 - pick].1.clone()).expect("nonempty").1;
                (s, rep)
            })
            .collect();
        Self { table, n_bits: n }
    }

    pub fn decode(&self, syndrome: &BitVec) -> BitVec {
        self.table.get(syndrome).cloned().unwrap_or_else(|| BitVec::zeros(self.n_bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Repetition code on 5 bits with 4 checks.
    fn repetition() -> DecodingGraph {
        DecodingGraph::from_checks(5, &[vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4]])
    }

    #[test]
    fn single_flips_are_corrected() {
        let g = repetition();
        for kind in [DecoderKind::Matching, DecoderKind::UnionFind] {
            for b in 0..5 {
                let e = BitVec::from_indices(5, [b]);
                let c = g.decode(kind, &g.syndrome(&e));
                assert_eq!(c, e, "{kind:?} bit {b}");
            }
        }
    }

    #[test]
    fn two_flips_use_the_shorter_explanation() {
        let g = repetition();
        let e = BitVec::from_indices(5, [0, 1]);
        let c = g.decode(DecoderKind::Matching, &g.syndrome(&e));
        assert_eq!(c, e);
        let e = BitVec::from_indices(5, [3, 4]);
        let c = g.decode(DecoderKind::UnionFind, &g.syndrome(&e));
        assert_eq!(c, e);
    }
}
