//! Dense linear algebra over GF(2) with `u64`-packed rows.

/// A packed bit vector of fixed length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    pub words: Vec<u64>,
    pub len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in idx {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_indices(bits.len(), bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i))
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        let m = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_with(&mut self, o: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&o.words) {
            *a ^= b;
        }
    }

    pub fn and_with(&mut self, o: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&o.words) {
            *a &= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the bitwise AND.
    pub fn dot(&self, o: &BitVec) -> bool {
        self.words
            .iter()
            .zip(&o.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.ones().next()
    }
}

/// Row-echelon basis of a span, remembering how each pivot row was formed
/// from the original generators.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<BitVec>,
    pub pivots: Vec<usize>,
    /// `combos[r]` marks the generators whose XOR equals `rows[r]`.
    pub combos: Vec<BitVec>,
    pub n_generators: usize,
}

impl Echelon {
    /// Gaussian elimination on `gens` (all of equal length).
    pub fn new(gens: &[BitVec]) -> Self {
        let k = gens.len();
        let mut rows: Vec<BitVec> = Vec::new();
        let mut pivots = Vec::new();
        let mut combos = Vec::new();
        for (g, v) in gens.iter().enumerate() {
            let mut v = v.clone();
            let mut c = BitVec::from_indices(k, [g]);
            for (r, &p) in pivots.iter().enumerate() {
                if v.get(p) {
                    v.xor_with(&rows[r]);
                    c.xor_with(&combos[r]);
                }
            }
            if let Some(p) = v.first_one() {
                // Keep the basis fully reduced on pivot columns.
                for r in 0..rows.len() {
                    if rows[r].get(p) {
                        let (vr, cr) = (v.clone(), c.clone());
                        rows[r].xor_with(&vr);
                        combos[r].xor_with(&cr);
                    }
                }
                rows.push(v);
                pivots.push(p);
                combos.push(c);
            }
        }
        Self { rows, pivots, combos, n_generators: k }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Returns the generator combination producing `target`, if in the span.
    pub fn express(&self, target: &BitVec) -> Option<BitVec> {
        let mut v = target.clone();
        let mut c = BitVec::zeros(self.n_generators);
        for (r, &p) in self.pivots.iter().enumerate() {
            if v.get(p) {
                v.xor_with(&self.rows[r]);
                c.xor_with(&self.combos[r]);
            }
        }
        v.is_zero().then_some(c)
    }

    pub fn contains(&self, target: &BitVec) -> bool {
        self.express(target).is_some()
    }
}

pub fn rank(gens: &[BitVec]) -> usize {
    Echelon::new(gens).rank()
}

/// Basis of `{x : Σ x_i gens_i = 0}`.
pub fn left_kernel(gens: &[BitVec]) -> Vec<BitVec> {
    let k = gens.len();
    let mut rows: Vec<BitVec> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut combos: Vec<BitVec> = Vec::new();
    let mut out = Vec::new();
    for (g, v) in gens.iter().enumerate() {
        let mut v = v.clone();
        let mut c = BitVec::from_indices(k, [g]);
        for (r, &p) in pivots.iter().enumerate() {
            if v.get(p) {
                v.xor_with(&rows[r]);
                c.xor_with(&combos[r]);
            }
        }
        match v.first_one() {
            Some(p) => {
                rows.push(v);
                pivots.push(p);
                combos.push(c);
            }
            None => out.push(c),
        }
    }
    out
}

/// Transposes a list of rows of length `ncols` into `ncols` rows.
pub fn transpose(rows: &[BitVec], ncols: usize) -> Vec<BitVec> {
    let mut out = vec![BitVec::zeros(rows.len()); ncols];
    for (r, row) in rows.iter().enumerate() {
        for c in row.ones() {
            out[c].set(r, true);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel() {
        let a = BitVec::from_indices(4, [0, 1]);
        let b = BitVec::from_indices(4, [1, 2]);
        let c = BitVec::from_indices(4, [0, 2]);
        assert_eq!(rank(&[a.clone(), b.clone(), c.clone()]), 2);
        let k = left_kernel(&[a.clone(), b.clone(), c.clone()]);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], BitVec::from_indices(3, [0, 1, 2]));
        let e = Echelon::new(&[a, b]);
        let combo = e.express(&c).unwrap();
        assert_eq!(combo, BitVec::from_indices(2, [0, 1]));
        assert!(e.express(&BitVec::from_indices(4, [3])).is_none());
    }

    #[test]
    fn ones_iterates_set_bits() {
        let v = BitVec::from_indices(130, [0, 63, 64, 129]);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(v.count_ones(), 4);
    }
}
