//! Planar (unrotated) surface code with a diagonal fold.
//!
//! Data qubits sit at `(x, y) ∈ [0, 2d−2]²` with `x + y` even. Z-checks sit at
//! `x` odd, `y` even and X-checks at `x` even, `y` odd; each acts on its (up
//! to four) lattice neighbours. `X̄` is the row `y = 0`, `Z̄` the column
//! `x = 0`. The reflection `(x, y) ↦ (y, x)` swaps the two check types.

use serde::Serialize;

use crate::gf2::{BitVec, Echelon};
use crate::stabilizer_sim::{Gate, LayeredCircuit, Op, PauliString};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("distance {0} must be 1 or an odd number >= 3")]
    InvalidDistance(usize),
    #[error("unsupported logical gate token {0:?}")]
    UnsupportedGate(String),
    #[error("input is not a codeword: Z-check {0} is violated")]
    NotCodeword(usize),
    #[error("length {got} does not match {expected}")]
    Length { expected: usize, got: usize },
}

/// Logical gate tokens with a transversal realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LogicalGate {
    H,
    S,
    X,
    Z,
}

impl LogicalGate {
    pub fn parse(token: &str) -> Result<Self, CodeError> {
        match token.trim() {
            "H" | "h" => Ok(Self::H),
            "S" | "s" => Ok(Self::S),
            "X" | "x" => Ok(Self::X),
            "Z" | "z" => Ok(Self::Z),
            t => Err(CodeError::UnsupportedGate(t.to_string())),
        }
    }
}

/// Which Pauli type a check measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CheckKind {
    X,
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceCodePatch {
    pub d: usize,
    pub m: usize,
    pub coords: Vec<(usize, usize)>,
    /// Check positions and supports (data indices).
    pub x_checks: Vec<((usize, usize), Vec<usize>)>,
    pub z_checks: Vec<((usize, usize), Vec<usize>)>,
    pub logical_x: Vec<usize>,
    pub logical_z: Vec<usize>,
    /// The diagonal reflection on data indices.
    pub fold: Vec<usize>,
    #[serde(skip)]
    index: Vec<Option<usize>>,
}

impl SurfaceCodePatch {
    pub fn new(d: usize) -> Result<Self, CodeError> {
        if d == 0 || d % 2 == 0 {
            return Err(CodeError::InvalidDistance(d));
        }
        let w = 2 * d - 1;
        let mut coords = Vec::new();
        let mut index = vec![None; w * w];
        for y in 0..w {
            for x in 0..w {
                if (x + y) % 2 == 0 {
                    index[y * w + x] = Some(coords.len());
                    coords.push((x, y));
                }
            }
        }
        let at = |x: isize, y: isize| -> Option<usize> {
            if x < 0 || y < 0 || x >= w as isize || y >= w as isize {
                return None;
            }
            index[y as usize * w + x as usize]
        };
        let mut x_checks = Vec::new();
        let mut z_checks = Vec::new();
        for y in 0..w {
            for x in 0..w {
                if (x + y) % 2 == 0 {
                    continue;
                }
                let (xi, yi) = (x as isize, y as isize);
                let supp: Vec<usize> = [(xi - 1, yi), (xi + 1, yi), (xi, yi - 1), (xi, yi + 1)]
                    .into_iter()
                    .filter_map(|(a, b)| at(a, b))
                    .collect();
                if x % 2 == 1 {
                    z_checks.push(((x, y), supp));
                } else {
                    x_checks.push(((x, y), supp));
                }
            }
        }
        let logical_x = (0..w).step_by(2).map(|x| at(x as isize, 0).expect("row qubit")).collect();
        let logical_z = (0..w).step_by(2).map(|y| at(0, y as isize).expect("column qubit")).collect();
        let fold = coords.iter().map(|&(x, y)| index[x * w + y].expect("reflected qubit")).collect();
        Ok(Self { d, m: coords.len(), coords, x_checks, z_checks, logical_x, logical_z, fold, index })
    }

    pub fn width(&self) -> usize {
        2 * self.d - 1
    }

    pub fn qubit_at(&self, x: usize, y: usize) -> Option<usize> {
        let w = self.width();
        (x < w && y < w).then(|| self.index[y * w + x]).flatten()
    }

    /// Data indices on the fold line.
    pub fn fold_fixed_points(&self) -> Vec<usize> {
        (0..self.m).filter(|&q| self.fold[q] == q).collect()
    }

    /// Mirror pairs `(q, fold(q))` with `q < fold(q)`.
    pub fn mirror_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.m).filter(|&q| q < self.fold[q]).map(|q| (q, self.fold[q])).collect()
    }

    pub fn checks(&self, kind: CheckKind) -> &[((usize, usize), Vec<usize>)] {
        match kind {
            CheckKind::X => &self.x_checks,
            CheckKind::Z => &self.z_checks,
        }
    }

    pub fn stabilizers(&self) -> Vec<PauliString> {
        let m = self.m;
        self.x_checks
            .iter()
            .map(|(_, s)| PauliString::x_on(m, s.iter().copied()))
            .chain(self.z_checks.iter().map(|(_, s)| PauliString::z_on(m, s.iter().copied())))
            .collect()
    }

    pub fn logical_x_op(&self) -> PauliString {
        PauliString::x_on(self.m, self.logical_x.iter().copied())
    }

    pub fn logical_z_op(&self) -> PauliString {
        PauliString::z_on(self.m, self.logical_z.iter().copied())
    }

    /// `Ȳ = i X̄ Z̄`.
    pub fn logical_y_op(&self) -> PauliString {
        let mut y = self.logical_x_op().mul(&self.logical_z_op());
        y.phase = (y.phase + 1) % 4;
        y
    }

    /// Rank of the stabilizer group over GF(2).
    pub fn stabilizer_rank(&self) -> usize {
        let rows: Vec<BitVec> = self.stabilizers().iter().map(PauliString::symplectic).collect();
        crate::gf2::rank(&rows)
    }

    /// Number of encoded qubits, `m − rank`.
    pub fn logical_qubits(&self) -> usize {
        self.m - self.stabilizer_rank()
    }

    /// Syndrome of a bit string against the checks of `kind`.
    pub fn syndrome(&self, kind: CheckKind, bits: &BitVec) -> BitVec {
        let checks = self.checks(kind);
        let mut s = BitVec::zeros(checks.len());
        for (i, (_, supp)) in checks.iter().enumerate() {
            if supp.iter().filter(|&&q| bits.get(q)).count() % 2 == 1 {
                s.set(i, true);
            }
        }
        s
    }

    /// `Parity(x)` over `supp(Z̄)`, for `x` in the Z-check kernel.
    pub fn parity(&self, x: &BitVec) -> Result<bool, CodeError> {
        if x.len != self.m {
            return Err(CodeError::Length { expected: self.m, got: x.len });
        }
        if let Some(i) = self.syndrome(CheckKind::Z, x).first_one() {
            return Err(CodeError::NotCodeword(i));
        }
        Ok(self.logical_z.iter().filter(|&&q| x.get(q)).count() % 2 == 1)
    }

    /// Parity of `bits` over the support of the logical operator of `kind`
    /// (`Z` gives `Z̄`, `X` gives `X̄`).
    pub fn logical_parity(&self, kind: CheckKind, bits: &BitVec) -> bool {
        let supp = match kind {
            CheckKind::Z => &self.logical_z,
            CheckKind::X => &self.logical_x,
        };
        supp.iter().filter(|&&q| bits.get(q)).count() % 2 == 1
    }

    /// Minimum weight of an X-type (or Z-type) logical operator, by
    /// enumerating all vectors in the kernel of the opposite checks.
    /// Exponential in `m`; meant for `d ≤ 3`.
    pub fn min_logical_weight(&self, kind: CheckKind) -> usize {
        let m = self.m;
        assert!(m <= 24, "exhaustive search is limited to m <= 24");
        let (detect, same) = match kind {
            CheckKind::X => (&self.z_checks, &self.x_checks),
            CheckKind::Z => (&self.x_checks, &self.z_checks),
        };
        let masks: Vec<u32> = detect.iter().map(|(_, s)| s.iter().fold(0, |a, &q| a | 1 << q)).collect();
        let stab_rows: Vec<BitVec> =
            same.iter().map(|(_, s)| BitVec::from_indices(m, s.iter().copied())).collect();
        let ech = Echelon::new(&stab_rows);
        let mut best = usize::MAX;
        for v in 1u32..(1 << m) {
            let w = v.count_ones() as usize;
            if w >= best || masks.iter().any(|&c| (c & v).count_ones() % 2 == 1) {
                continue;
            }
            let bv = BitVec::from_indices(m, (0..m).filter(|&q| v >> q & 1 == 1));
            if !ech.contains(&bv) {
                best = w;
            }
        }
        best
    }

    /// Physical circuit for a logical word, on qubit indices `offset..offset+m`.
    ///
    /// `H` is `H` on every qubit followed by SWAPs across the fold. `S` is CZ
    /// across the fold with `S`/`S†` alternating along the diagonal. `X` and
    /// `Z` are transversal along `X̄`/`Z̄`.
    pub fn logical_layers(&self, g: LogicalGate, offset: usize) -> Vec<Vec<Gate>> {
        match g {
            LogicalGate::H => {
                let h = (0..self.m).map(|q| Gate::H(offset + q)).collect();
                let sw: Vec<Gate> =
                    self.mirror_pairs().into_iter().map(|(a, b)| Gate::Swap(offset + a, offset + b)).collect();
                if sw.is_empty() {
                    vec![h]
                } else {
                    vec![h, sw]
                }
            }
            LogicalGate::S => {
                let mut layer: Vec<Gate> =
                    self.mirror_pairs().into_iter().map(|(a, b)| Gate::Cz(offset + a, offset + b)).collect();
                for q in self.fold_fixed_points() {
                    let (x, _) = self.coords[q];
                    layer.push(if x % 2 == 0 { Gate::S(offset + q) } else { Gate::Sdg(offset + q) });
                }
                vec![layer]
            }
            LogicalGate::X => vec![self.logical_x.iter().map(|&q| Gate::X(offset + q)).collect()],
            LogicalGate::Z => vec![self.logical_z.iter().map(|&q| Gate::Z(offset + q)).collect()],
        }
    }

    /// `transversal_logical` for a word of tokens.
    pub fn transversal_logical(&self, word: &[LogicalGate]) -> LayeredCircuit {
        let mut c = LayeredCircuit::new(self.m, 0);
        for &g in word {
            for layer in self.logical_layers(g, 0) {
                c.push_layer(layer.into_iter().map(Op::from).collect()).expect("disjoint transversal layer");
            }
        }
        c
    }

    /// Exact membership of `p` (with sign) in the stabilizer group.
    pub fn in_stabilizer_group(&self, p: &PauliString) -> bool {
        let stabs = self.stabilizers();
        let rows: Vec<BitVec> = stabs.iter().map(PauliString::symplectic).collect();
        let ech = Echelon::new(&rows);
        let Some(combo) = ech.express(&p.symplectic()) else {
            return false;
        };
        let mut prod = PauliString::identity(self.m);
        for i in combo.ones() {
            prod.mul_assign(&stabs[i]);
        }
        prod == *p
    }

    /// Whether `p ≅ q` modulo the stabilizer group, signs included.
    pub fn equal_mod_stabilizers(&self, p: &PauliString, q: &PauliString) -> bool {
        p.commutes_with(q) && self.in_stabilizer_group(&p.mul(q))
    }
}
