//! Pauli frames: a single frame and a 64-lane batch.

use super::pauli::PauliString;
use crate::gf2::BitVec;
use crate::pauli_clifford::{table, CliffordClass, Letter};

/// A Pauli error up to phase, as X and Z masks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliFrame {
    pub x_mask: BitVec,
    pub z_mask: BitVec,
}

impl PauliFrame {
    pub fn identity(n: usize) -> Self {
        Self { x_mask: BitVec::zeros(n), z_mask: BitVec::zeros(n) }
    }

    pub fn n(&self) -> usize {
        self.x_mask.len
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask.is_zero() && self.z_mask.is_zero()
    }

    pub fn weight(&self) -> usize {
        (0..self.n()).filter(|&q| self.x_mask.get(q) || self.z_mask.get(q)).count()
    }

    /// Composition (XOR of masks).
    pub fn compose(&mut self, o: &PauliFrame) {
        self.x_mask.xor_with(&o.x_mask);
        self.z_mask.xor_with(&o.z_mask);
    }

    pub fn to_pauli(&self) -> PauliString {
        PauliString::from_parts(self.x_mask.clone(), self.z_mask.clone())
    }

    pub fn from_pauli(p: &PauliString) -> Self {
        Self { x_mask: p.x.clone(), z_mask: p.z.clone() }
    }

    /// Whether the frame anticommutes with `p`.
    pub fn anticommutes(&self, p: &PauliString) -> bool {
        self.x_mask.dot(&p.z) != self.z_mask.dot(&p.x)
    }

    pub fn h(&mut self, q: usize) {
        let (x, z) = (self.x_mask.get(q), self.z_mask.get(q));
        self.x_mask.set(q, z);
        self.z_mask.set(q, x);
    }

    pub fn s(&mut self, q: usize) {
        if self.x_mask.get(q) {
            self.z_mask.flip(q);
        }
    }

    pub fn cnot(&mut self, c: usize, t: usize) {
        if self.x_mask.get(c) {
            self.x_mask.flip(t);
        }
        if self.z_mask.get(t) {
            self.z_mask.flip(c);
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        let (xa, xb) = (self.x_mask.get(a), self.x_mask.get(b));
        if xb {
            self.z_mask.flip(a);
        }
        if xa {
            self.z_mask.flip(b);
        }
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        let (xa, za) = (self.x_mask.get(a), self.z_mask.get(a));
        self.x_mask.set(a, self.x_mask.get(b));
        self.z_mask.set(a, self.z_mask.get(b));
        self.x_mask.set(b, xa);
        self.z_mask.set(b, za);
    }

    pub fn letter(&mut self, q: usize, l: Letter) {
        match l {
            Letter::H => self.h(q),
            Letter::S | Letter::Sdg => self.s(q),
            _ => {}
        }
    }

    pub fn clifford(&mut self, q: usize, c: CliffordClass) {
        for &l in &table().gate_words[c.index()] {
            self.letter(q, l);
        }
    }
}

/// 64 frames side by side: bit `l` of `x[q]` is lane `l`'s X component on
/// qubit `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameBatch {
    pub x: Vec<u64>,
    pub z: Vec<u64>,
}

impl FrameBatch {
    pub fn new(n: usize) -> Self {
        Self { x: vec![0; n], z: vec![0; n] }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Lane `l` as a single frame.
    pub fn lane(&self, l: usize) -> PauliFrame {
        let n = self.n();
        let mut f = PauliFrame::identity(n);
        for q in 0..n {
            f.x_mask.set(q, (self.x[q] >> l) & 1 == 1);
            f.z_mask.set(q, (self.z[q] >> l) & 1 == 1);
        }
        f
    }

    /// XORs a frame into the lanes in `mask`.
    pub fn inject(&mut self, f: &PauliFrame, mask: u64) {
        for q in f.x_mask.ones() {
            self.x[q] ^= mask;
        }
        for q in f.z_mask.ones() {
            self.z[q] ^= mask;
        }
    }

    #[inline]
    pub fn h(&mut self, q: usize, m: u64) {
        let t = (self.x[q] ^ self.z[q]) & m;
        self.x[q] ^= t;
        self.z[q] ^= t;
    }

    #[inline]
    pub fn s(&mut self, q: usize, m: u64) {
        self.z[q] ^= self.x[q] & m;
    }

    #[inline]
    pub fn cnot(&mut self, c: usize, t: usize, m: u64) {
        self.x[t] ^= self.x[c] & m;
        self.z[c] ^= self.z[t] & m;
    }

    #[inline]
    pub fn cz(&mut self, a: usize, b: usize, m: u64) {
        self.z[a] ^= self.x[b] & m;
        self.z[b] ^= self.x[a] & m;
    }

    #[inline]
    pub fn swap(&mut self, a: usize, b: usize, m: u64) {
        let tx = (self.x[a] ^ self.x[b]) & m;
        let tz = (self.z[a] ^ self.z[b]) & m;
        self.x[a] ^= tx;
        self.x[b] ^= tx;
        self.z[a] ^= tz;
        self.z[b] ^= tz;
    }

    pub fn letter(&mut self, q: usize, l: Letter, m: u64) {
        match l {
            Letter::H => self.h(q, m),
            Letter::S | Letter::Sdg => self.s(q, m),
            _ => {}
        }
    }

    pub fn clifford(&mut self, q: usize, c: CliffordClass, m: u64) {
        for &l in &table().gate_words[c.index()] {
            self.letter(q, l, m);
        }
    }
}
