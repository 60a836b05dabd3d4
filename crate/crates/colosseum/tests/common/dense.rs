//! Dense state-vector simulator used as an independent oracle.

use colosseum::pauli_clifford::{table, CliffordClass, Letter};
use num_complex::Complex64 as C;

pub struct Dense {
    pub n: usize,
    pub amp: Vec<C>,
}

impl Dense {
    pub fn new(n: usize) -> Self {
        let mut amp = vec![C::new(0.0, 0.0); 1 << n];
        amp[0] = C::new(1.0, 0.0);
        Self { n, amp }
    }

    fn one(&mut self, q: usize, m: [[C; 2]; 2]) {
        let bit = 1 << q;
        for i in 0..self.amp.len() {
            if i & bit == 0 {
                let (a, b) = (self.amp[i], self.amp[i | bit]);
                self.amp[i] = m[0][0] * a + m[0][1] * b;
                self.amp[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    pub fn h(&mut self, q: usize) {
        let r = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.one(q, [[r, r], [r, -r]]);
    }

    pub fn s(&mut self, q: usize) {
        let (o, z) = (C::new(1.0, 0.0), C::new(0.0, 0.0));
        self.one(q, [[o, z], [z, C::new(0.0, 1.0)]]);
    }

    pub fn sdg(&mut self, q: usize) {
        let (o, z) = (C::new(1.0, 0.0), C::new(0.0, 0.0));
        self.one(q, [[o, z], [z, C::new(0.0, -1.0)]]);
    }

    pub fn x(&mut self, q: usize) {
        let (o, z) = (C::new(1.0, 0.0), C::new(0.0, 0.0));
        self.one(q, [[z, o], [o, z]]);
    }

    pub fn z(&mut self, q: usize) {
        let (o, z) = (C::new(1.0, 0.0), C::new(0.0, 0.0));
        self.one(q, [[o, z], [z, -o]]);
    }

    pub fn y(&mut self, q: usize) {
        let z = C::new(0.0, 0.0);
        self.one(q, [[z, C::new(0.0, -1.0)], [C::new(0.0, 1.0), z]]);
    }

    pub fn cnot(&mut self, c: usize, t: usize) {
        for i in 0..self.amp.len() {
            if i >> c & 1 == 1 && i >> t & 1 == 0 {
                self.amp.swap(i, i | 1 << t);
            }
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        for i in 0..self.amp.len() {
            if i >> a & 1 == 1 && i >> b & 1 == 1 {
                self.amp[i] = -self.amp[i];
            }
        }
    }

    pub fn letter(&mut self, q: usize, l: Letter) {
        match l {
            Letter::H => self.h(q),
            Letter::S => self.s(q),
            Letter::Sdg => self.sdg(q),
            Letter::X => self.x(q),
            Letter::Y => self.y(q),
            Letter::Z => self.z(q),
        }
    }

    pub fn clifford(&mut self, q: usize, c: CliffordClass) {
        for &l in &table().gate_words[c.index()] {
            self.letter(q, l);
        }
    }

    /// Probability of every computational-basis string (bit `q` of the
    /// index is qubit `q`).
    pub fn probabilities(&self) -> Vec<f64> {
        self.amp.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Joint outcome probabilities of measuring `qubits` in Z, indexed by
    /// the bits in order (bit `k` of the index is `qubits[k]`).
    pub fn marginal(&self, qubits: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; 1 << qubits.len()];
        for (i, p) in self.probabilities().into_iter().enumerate() {
            let k = qubits.iter().enumerate().fold(0, |acc, (j, &q)| acc | ((i >> q & 1) << j));
            out[k] += p;
        }
        out
    }
}
