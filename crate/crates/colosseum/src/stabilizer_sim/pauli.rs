//! Multi-qubit Pauli operators with exact phase.

use crate::gf2::BitVec;

/// `i^phase · Π_q P_q` where qubit `q` carries `X^{x_q} Z^{z_q}` read as the
/// Hermitian Pauli (`x = z = 1` means `Y`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub x: BitVec,
    pub z: BitVec,
    pub phase: u8,
}

/// `(plus, minus)` masks of qubits where `P1·P2 = ±i·P3`.
#[inline]
pub(crate) fn phase_masks(x1: u64, z1: u64, x2: u64, z2: u64) -> (u64, u64) {
    let px = x1 & !z1;
    let py = x1 & z1;
    let pz = !x1 & z1;
    let qx = x2 & !z2;
    let qy = x2 & z2;
    let qz = !x2 & z2;
    let plus = (px & qy) | (py & qz) | (pz & qx);
    let minus = (px & qz) | (py & qx) | (pz & qy);
    (plus, minus)
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self { x: BitVec::zeros(n), z: BitVec::zeros(n), phase: 0 }
    }

    pub fn n(&self) -> usize {
        self.x.len
    }

    pub fn from_parts(x: BitVec, z: BitVec) -> Self {
        Self { x, z, phase: 0 }
    }

    pub fn single(n: usize, q: usize, x: bool, z: bool) -> Self {
        let mut p = Self::identity(n);
        p.x.set(q, x);
        p.z.set(q, z);
        p
    }

    pub fn x_on(n: usize, qs: impl IntoIterator<Item = usize>) -> Self {
        Self::from_parts(BitVec::from_indices(n, qs), BitVec::zeros(n))
    }

    pub fn z_on(n: usize, qs: impl IntoIterator<Item = usize>) -> Self {
        Self::from_parts(BitVec::zeros(n), BitVec::from_indices(n, qs))
    }

    /// Parses strings such as `"+XIZY"` or `"-iZZ"`.
    pub fn parse(s: &str) -> Option<Self> {
        let mut phase = 0u8;
        let mut body = s.trim();
        if let Some(r) = body.strip_prefix('-') {
            phase = 2;
            body = r;
        } else if let Some(r) = body.strip_prefix('+') {
            body = r;
        }
        if let Some(r) = body.strip_prefix('i') {
            phase = (phase + 1) % 4;
            body = r;
        }
        let n = body.chars().count();
        let mut p = Self::identity(n);
        p.phase = phase;
        for (q, c) in body.chars().enumerate() {
            let (x, z) = match c {
                'I' | '_' => (false, false),
                'X' => (true, false),
                'Y' => (true, true),
                'Z' => (false, true),
                _ => return None,
            };
            p.x.set(q, x);
            p.z.set(q, z);
        }
        Some(p)
    }

    pub fn weight(&self) -> usize {
        let mut s = self.x.clone();
        for (a, b) in s.words.iter_mut().zip(&self.z.words) {
            *a |= b;
        }
        s.count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn commutes_with(&self, o: &Self) -> bool {
        self.x.dot(&o.z) == self.z.dot(&o.x)
    }

    /// Exact product `self · o`.
    pub fn mul(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.mul_assign(o);
        out
    }

    pub fn mul_assign(&mut self, o: &Self) {
        let mut acc: i64 = 0;
        for w in 0..self.x.words.len() {
            let (p, m) = phase_masks(self.x.words[w], self.z.words[w], o.x.words[w], o.z.words[w]);
            acc += p.count_ones() as i64 - m.count_ones() as i64;
            self.x.words[w] ^= o.x.words[w];
            self.z.words[w] ^= o.z.words[w];
        }
        self.phase = ((self.phase as i64 + o.phase as i64 + acc).rem_euclid(4)) as u8;
    }

    /// `Some(false)` for `+P`, `Some(true)` for `−P`, `None` for `±iP`.
    pub fn sign(&self) -> Option<bool> {
        match self.phase {
            0 => Some(false),
            2 => Some(true),
            _ => None,
        }
    }

    /// Restriction to a subset of qubits (phase kept).
    pub fn restrict(&self, qubits: &[usize]) -> Self {
        let mut out = Self::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            out.x.set(i, self.x.get(q));
            out.z.set(i, self.z.get(q));
        }
        out.phase = self.phase;
        out
    }

    fn flip_sign(&mut self) {
        self.phase = (self.phase + 2) % 4;
    }

    /// Conjugation `P ↦ H P H` on qubit `q`.
    pub fn h(&mut self, q: usize) {
        let (x, z) = (self.x.get(q), self.z.get(q));
        if x && z {
            self.flip_sign();
        }
        self.x.set(q, z);
        self.z.set(q, x);
    }

    /// Conjugation `P ↦ S P S†`.
    pub fn s(&mut self, q: usize) {
        let (x, z) = (self.x.get(q), self.z.get(q));
        if x && z {
            self.flip_sign();
        }
        self.z.set(q, z ^ x);
    }

    /// Conjugation `P ↦ S† P S`.
    pub fn s_dag(&mut self, q: usize) {
        let (x, z) = (self.x.get(q), self.z.get(q));
        if x && !z {
            self.flip_sign();
        }
        self.z.set(q, z ^ x);
    }

    /// Conjugation by a Pauli `X^bx Z^bz` on qubit `q`.
    pub fn by_pauli(&mut self, q: usize, bx: bool, bz: bool) {
        if (bx && self.z.get(q)) ^ (bz && self.x.get(q)) {
            self.flip_sign();
        }
    }

    pub fn cnot(&mut self, c: usize, t: usize) {
        let (xc, zc, xt, zt) = (self.x.get(c), self.z.get(c), self.x.get(t), self.z.get(t));
        if xc && zt && (xt == zc) {
            self.flip_sign();
        }
        self.x.set(t, xt ^ xc);
        self.z.set(c, zc ^ zt);
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        let (xa, za, xb, zb) = (self.x.get(a), self.z.get(a), self.x.get(b), self.z.get(b));
        if xa && xb && (za != zb) {
            self.flip_sign();
        }
        self.z.set(a, za ^ xb);
        self.z.set(b, zb ^ xa);
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        let (xa, za) = (self.x.get(a), self.z.get(a));
        self.x.set(a, self.x.get(b));
        self.z.set(a, self.z.get(b));
        self.x.set(b, xa);
        self.z.set(b, za);
    }

    /// Symplectic vector `(x | z)` of length `2n`.
    pub fn symplectic(&self) -> BitVec {
        let n = self.n();
        let mut v = BitVec::zeros(2 * n);
        for q in self.x.ones() {
            v.set(q, true);
        }
        for q in self.z.ones() {
            v.set(n + q, true);
        }
        v
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let pre = ["+", "+i", "-", "-i"][self.phase as usize % 4];
        write!(f, "{pre}")?;
        for q in 0..self.n() {
            let c = match (self.x.get(q), self.z.get(q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
