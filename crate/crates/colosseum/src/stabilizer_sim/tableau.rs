//! Aaronson–Gottesman stabilizer tableau with bit-packed rows.

use rand::Rng;

use super::pauli::{phase_masks, PauliString};
use crate::gf2::BitVec;
use crate::pauli_clifford::{table, CliffordClass, Letter};

/// Rows `0..n` are destabilizers, rows `n..2n` stabilizers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    words: usize,
    xs: Vec<u64>,
    zs: Vec<u64>,
    signs: Vec<bool>,
}

/// Result of a Z-basis measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub bit: bool,
    pub random: bool,
}

impl Tableau {
    /// The state `|0…0⟩`.
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut t = Self {
            n,
            words,
            xs: vec![0; 2 * n * words],
            zs: vec![0; 2 * n * words],
            signs: vec![false; 2 * n],
        };
        for q in 0..n {
            t.xs[q * words + q / 64] |= 1 << (q % 64);
            t.zs[(n + q) * words + q / 64] |= 1 << (q % 64);
        }
        t
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn bit(v: &[u64], row: usize, words: usize, q: usize) -> bool {
        (v[row * words + q / 64] >> (q % 64)) & 1 == 1
    }

    fn row(&self, r: usize) -> PauliString {
        let mut p = PauliString::identity(self.n);
        let k = p.x.words.len();
        p.x.words.copy_from_slice(&self.xs[r * self.words..r * self.words + k]);
        p.z.words.copy_from_slice(&self.zs[r * self.words..r * self.words + k]);
        p.phase = if self.signs[r] { 2 } else { 0 };
        p
    }

    pub fn stabilizer(&self, i: usize) -> PauliString {
        self.row(self.n + i)
    }

    pub fn destabilizer(&self, i: usize) -> PauliString {
        self.row(i)
    }

    pub fn stabilizers(&self) -> Vec<PauliString> {
        (0..self.n).map(|i| self.stabilizer(i)).collect()
    }

    pub fn h(&mut self, q: usize) {
        let (w, m) = (q / 64, 1u64 << (q % 64));
        for r in 0..2 * self.n {
            let i = r * self.words + w;
            let (x, z) = (self.xs[i] & m, self.zs[i] & m);
            if x != 0 && z != 0 {
                self.signs[r] ^= true;
            }
            self.xs[i] = (self.xs[i] & !m) | z;
            self.zs[i] = (self.zs[i] & !m) | x;
        }
    }

    pub fn s(&mut self, q: usize) {
        let (w, m) = (q / 64, 1u64 << (q % 64));
        for r in 0..2 * self.n {
            let i = r * self.words + w;
            let (x, z) = (self.xs[i] & m, self.zs[i] & m);
            if x != 0 && z != 0 {
                self.signs[r] ^= true;
            }
            self.zs[i] ^= x;
        }
    }

    pub fn s_dag(&mut self, q: usize) {
        let (w, m) = (q / 64, 1u64 << (q % 64));
        for r in 0..2 * self.n {
            let i = r * self.words + w;
            let (x, z) = (self.xs[i] & m, self.zs[i] & m);
            if x != 0 && z == 0 {
                self.signs[r] ^= true;
            }
            self.zs[i] ^= x;
        }
    }

    fn flip_signs(&mut self, q: usize, by_x: bool, by_z: bool) {
        let (w, m) = (q / 64, 1u64 << (q % 64));
        for r in 0..2 * self.n {
            let i = r * self.words + w;
            let x = by_x && self.xs[i] & m != 0;
            let z = by_z && self.zs[i] & m != 0;
            self.signs[r] ^= x ^ z;
        }
    }

    pub fn x(&mut self, q: usize) {
        self.flip_signs(q, false, true);
    }

    pub fn z(&mut self, q: usize) {
        self.flip_signs(q, true, false);
    }

    pub fn y(&mut self, q: usize) {
        self.flip_signs(q, true, true);
    }

    pub fn cnot(&mut self, c: usize, t: usize) {
        assert_ne!(c, t, "CNOT needs distinct qubits");
        let w = self.words;
        for r in 0..2 * self.n {
            let xc = Self::bit(&self.xs, r, w, c);
            let zc = Self::bit(&self.zs, r, w, c);
            let xt = Self::bit(&self.xs, r, w, t);
            let zt = Self::bit(&self.zs, r, w, t);
            if xc && zt && (xt == zc) {
                self.signs[r] ^= true;
            }
            if xc {
                self.xs[r * w + t / 64] ^= 1 << (t % 64);
            }
            if zt {
                self.zs[r * w + c / 64] ^= 1 << (c % 64);
            }
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        assert_ne!(a, b, "CZ needs distinct qubits");
        let w = self.words;
        for r in 0..2 * self.n {
            let xa = Self::bit(&self.xs, r, w, a);
            let za = Self::bit(&self.zs, r, w, a);
            let xb = Self::bit(&self.xs, r, w, b);
            let zb = Self::bit(&self.zs, r, w, b);
            if xa && xb && (za != zb) {
                self.signs[r] ^= true;
            }
            if xb {
                self.zs[r * w + a / 64] ^= 1 << (a % 64);
            }
            if xa {
                self.zs[r * w + b / 64] ^= 1 << (b % 64);
            }
        }
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        self.cnot(a, b);
        self.cnot(b, a);
        self.cnot(a, b);
    }

    pub fn letter(&mut self, q: usize, l: Letter) {
        match l {
            Letter::H => self.h(q),
            Letter::S => self.s(q),
            Letter::Sdg => self.s_dag(q),
            Letter::X => self.x(q),
            Letter::Y => self.y(q),
            Letter::Z => self.z(q),
        }
    }

    /// Applies a single-qubit Clifford class through its gate word.
    pub fn clifford(&mut self, q: usize, c: CliffordClass) {
        for &l in &table().gate_words[c.index()] {
            self.letter(q, l);
        }
    }

    /// Applies a Pauli operator (phase ignored).
    pub fn pauli(&mut self, p: &PauliString) {
        for q in 0..self.n {
            match (p.x.get(q), p.z.get(q)) {
                (true, false) => self.x(q),
                (true, true) => self.y(q),
                (false, true) => self.z(q),
                _ => {}
            }
        }
    }

    /// Sets the sign of `h` to that of `h · i` (rows as Pauli products).
    fn rowsum(&mut self, h: usize, i: usize) {
        let w = self.words;
        let mut acc: i64 = 0;
        for k in 0..w {
            let (x1, z1) = (self.xs[i * w + k], self.zs[i * w + k]);
            let (x2, z2) = (self.xs[h * w + k], self.zs[h * w + k]);
            let (p, m) = phase_masks(x1, z1, x2, z2);
            acc += p.count_ones() as i64 - m.count_ones() as i64;
            self.xs[h * w + k] ^= x1;
            self.zs[h * w + k] ^= z1;
        }
        let total = 2 * self.signs[h] as i64 + 2 * self.signs[i] as i64 + acc;
        let t = total.rem_euclid(4);
        debug_assert!(t == 0 || t == 2, "rowsum of commuting rows");
        self.signs[h] = t == 2;
    }

    /// Which stabilizer row (if any) has an X component on `q`.
    fn random_pivot(&self, q: usize) -> Option<usize> {
        (self.n..2 * self.n).find(|&r| Self::bit(&self.xs, r, self.words, q))
    }

    /// Z measurement of qubit `q`. Random outcomes take `forced` when given,
    /// otherwise a fair coin from `rng`.
    pub fn measure_z_with<R: Rng + ?Sized>(
        &mut self,
        q: usize,
        forced: Option<bool>,
        rng: &mut R,
    ) -> Measurement {
        let n = self.n;
        let w = self.words;
        if let Some(p) = self.random_pivot(q) {
            for r in 0..2 * n {
                if r != p && r != p - n && Self::bit(&self.xs, r, w, q) {
                    self.rowsum(r, p);
                }
            }
            let d = p - n;
            for k in 0..w {
                self.xs[d * w + k] = self.xs[p * w + k];
                self.zs[d * w + k] = self.zs[p * w + k];
                self.xs[p * w + k] = 0;
                self.zs[p * w + k] = 0;
            }
            self.signs[d] = self.signs[p];
            self.zs[p * w + q / 64] |= 1 << (q % 64);
            let bit = forced.unwrap_or_else(|| rng.gen());
            self.signs[p] = bit;
            Measurement { bit, random: true }
        } else {
            let bit = self.deterministic_z(q);
            Measurement { bit, random: false }
        }
    }

    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Measurement {
        self.measure_z_with(q, None, rng)
    }

    pub fn measure_x<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Measurement {
        self.h(q);
        let m = self.measure_z(q, rng);
        self.h(q);
        m
    }

    /// Whether measuring Z on `q` would be random.
    pub fn is_random_z(&self, q: usize) -> bool {
        self.random_pivot(q).is_some()
    }

    fn deterministic_z(&self, q: usize) -> bool {
        let target = PauliString::single(self.n, q, false, true);
        self.expectation(&target).expect("deterministic outcome")
    }

    fn row_commutes(&self, r: usize, p: &PauliString) -> bool {
        let w = self.words;
        let mut par = 0u32;
        for k in 0..p.x.words.len() {
            par ^= (self.xs[r * w + k] & p.z.words[k]).count_ones()
                ^ (self.zs[r * w + k] & p.x.words[k]).count_ones();
        }
        par & 1 == 0
    }

    /// For a Pauli `P` (phase `0` or `2`): `Some(negative)` when `±P` is in
    /// the stabilizer group, `None` when its expectation is zero.
    pub fn expectation(&self, p: &PauliString) -> Option<bool> {
        let n = self.n;
        if (n..2 * n).any(|r| !self.row_commutes(r, p)) {
            return None;
        }
        let w = self.words;
        let pw = p.x.words.len();
        let (mut ax, mut az) = (vec![0u64; pw], vec![0u64; pw]);
        let mut acc: i64 = 0;
        for i in 0..n {
            if self.row_commutes(i, p) {
                continue;
            }
            let r = n + i;
            for k in 0..pw {
                let (x2, z2) = (self.xs[r * w + k], self.zs[r * w + k]);
                let (pl, mi) = phase_masks(ax[k], az[k], x2, z2);
                acc += pl.count_ones() as i64 - mi.count_ones() as i64;
                ax[k] ^= x2;
                az[k] ^= z2;
            }
            acc += 2 * self.signs[r] as i64;
        }
        debug_assert!(ax == p.x.words && az == p.z.words);
        let rel = (acc - p.phase as i64).rem_euclid(4);
        debug_assert!(rel == 0 || rel == 2);
        Some(rel == 2)
    }

    /// Symplectic validity: stabilizers commute pairwise, destabilizer `i`
    /// anticommutes with stabilizer `i` only.
    pub fn check_invariants(&self) -> bool {
        let n = self.n;
        let stabs = self.stabilizers();
        let destabs: Vec<_> = (0..n).map(|i| self.destabilizer(i)).collect();
        for i in 0..n {
            for j in 0..n {
                if !stabs[i].commutes_with(&stabs[j]) {
                    return false;
                }
                if destabs[i].commutes_with(&stabs[j]) != (i != j) {
                    return false;
                }
                if !destabs[i].commutes_with(&destabs[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// Text dump of stabilizer rows, one per line.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for i in 0..self.n {
            s.push_str(&self.stabilizer(i).to_string());
            s.push('\n');
        }
        s
    }

    /// Exact joint distribution of Z measurements on `qubits`, in order, as
    /// `(bits, log2 of the inverse probability)` pairs.
    pub fn outcome_distribution(&self, qubits: &[usize]) -> Vec<(BitVec, u32)> {
        let mut out = Vec::new();
        let mut stack = vec![(self.clone(), 0usize, BitVec::zeros(qubits.len()), 0u32)];
        let mut rng = rand::rngs::mock::StepRng::new(0, 0);
        while let Some((t, k, bits, depth)) = stack.pop() {
            if k == qubits.len() {
                out.push((bits, depth));
                continue;
            }
            let q = qubits[k];
            if t.is_random_z(q) {
                for b in [false, true] {
                    let mut t2 = t.clone();
                    t2.measure_z_with(q, Some(b), &mut rng);
                    let mut bits2 = bits.clone();
                    bits2.set(k, b);
                    stack.push((t2, k + 1, bits2, depth + 1));
                }
            } else {
                let mut t2 = t;
                let m = t2.measure_z_with(q, None, &mut rng);
                let mut bits2 = bits;
                bits2.set(k, m.bit);
                stack.push((t2, k + 1, bits2, depth));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bell_pair_outcomes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut t = Tableau::new(2);
            t.h(0);
            t.cnot(0, 1);
            let a = t.measure_z(0, &mut rng);
            let b = t.measure_z(1, &mut rng);
            assert!(a.random && !b.random);
            assert_eq!(a.bit, b.bit);
        }
    }

    #[test]
    fn expectation_of_bell_stabilizers() {
        let mut t = Tableau::new(2);
        t.h(0);
        t.cnot(0, 1);
        assert_eq!(t.expectation(&PauliString::parse("XX").unwrap()), Some(false));
        assert_eq!(t.expectation(&PauliString::parse("ZZ").unwrap()), Some(false));
        assert_eq!(t.expectation(&PauliString::parse("YY").unwrap()), Some(true));
        assert_eq!(t.expectation(&PauliString::parse("ZI").unwrap()), None);
        assert!(t.check_invariants());
    }

    #[test]
    fn s_and_sdg_invert() {
        let mut t = Tableau::new(1);
        t.h(0);
        t.s(0);
        t.s_dag(0);
        assert_eq!(t.expectation(&PauliString::parse("X").unwrap()), Some(false));
        t.s(0);
        assert_eq!(t.expectation(&PauliString::parse("Y").unwrap()), Some(false));
    }
}
