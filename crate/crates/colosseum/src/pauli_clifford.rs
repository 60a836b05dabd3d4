//! Single-qubit Pauli and Clifford groups modulo global phase.
//!
//! A Clifford class is stored by its canonical form: the signed images of `X`
//! and `Z` under conjugation. The 24 classes are numbered by a breadth-first
//! closure from `{I, H, S, X, Z}`; that numbering also fixes the 5-bit
//! injection `iota` used for bit-string encodings.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exact::{Dyadic, Unitary2};

type Mat = Unitary2<i64>;

/// A Pauli operator mod phase. `(s1, s2)` denotes `X^{s2} Z^{s1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliClass {
    pub s1: bool,
    pub s2: bool,
}

impl PauliClass {
    pub const I: Self = Self { s1: false, s2: false };
    pub const Z: Self = Self { s1: true, s2: false };
    pub const X: Self = Self { s1: false, s2: true };
    pub const Y: Self = Self { s1: true, s2: true };
    pub const ALL: [Self; 4] = [Self::I, Self::X, Self::Y, Self::Z];

    pub fn new(s1: bool, s2: bool) -> Self {
        Self { s1, s2 }
    }

    /// Has an `X` component (flips computational-basis outcomes).
    pub fn has_x(self) -> bool {
        self.s2
    }

    /// Has a `Z` component.
    pub fn has_z(self) -> bool {
        self.s1
    }

    pub fn from_xz(x: bool, z: bool) -> Self {
        Self { s1: z, s2: x }
    }

    /// Two-bit code `2·s1 + s2`: I=0, X=1, Z=2, Y=3.
    pub fn code(self) -> u8 {
        (self.s1 as u8) << 1 | self.s2 as u8
    }

    pub fn from_code(c: u8) -> Self {
        Self { s1: c & 2 != 0, s2: c & 1 != 0 }
    }

    /// Product mod phase.
    pub fn mul(self, o: Self) -> Self {
        Self { s1: self.s1 ^ o.s1, s2: self.s2 ^ o.s2 }
    }

    pub fn commutes_with(self, o: Self) -> bool {
        !((self.s2 & o.s1) ^ (self.s1 & o.s2))
    }

    pub fn symbol(self) -> char {
        match (self.s1, self.s2) {
            (false, false) => 'I',
            (false, true) => 'X',
            (true, true) => 'Y',
            (true, false) => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Self::I),
            'X' => Some(Self::X),
            'Y' => Some(Self::Y),
            'Z' => Some(Self::Z),
            _ => None,
        }
    }

    /// Hermitian matrix of the canonical representative (`Y = iXZ`).
    pub fn matrix(self) -> Mat {
        match (self.s1, self.s2) {
            (false, false) => Mat::identity(),
            (false, true) => Mat::pauli_x(),
            (true, true) => Mat::pauli_y(),
            (true, false) => Mat::pauli_z(),
        }
    }

    pub fn as_clifford(self) -> CliffordClass {
        table().pauli_class[self.code() as usize]
    }
}

impl fmt::Display for PauliClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// A Pauli operator with an exact phase `i^phase` times the Hermitian
/// representative of `pauli`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedPauli {
    pub pauli: PauliClass,
    pub phase: u8,
}

impl SignedPauli {
    pub fn new(pauli: PauliClass, phase: u8) -> Self {
        Self { pauli, phase: phase % 4 }
    }

    pub fn plus(pauli: PauliClass) -> Self {
        Self::new(pauli, 0)
    }

    /// Sign `±1` when the phase is real.
    pub fn sign(self) -> Option<i8> {
        match self.phase {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    /// Exact product. Uses `Y = iXZ`, so `X^a Z^b` representatives multiply as
    /// `X^{a1}Z^{b1}X^{a2}Z^{b2} = (−1)^{b1·a2} X^{a1+a2} Z^{b1+b2}`.
    pub fn mul(self, o: Self) -> Self {
        // Hermitian rep of (s1, s2) is i^{s1·s2} X^{s2} Z^{s1}.
        let ph = |p: PauliClass| (p.s1 & p.s2) as u8;
        let mut phase = self.phase + o.phase + ph(self.pauli) + ph(o.pauli);
        if self.pauli.s1 & o.pauli.s2 {
            phase += 2;
        }
        let out = self.pauli.mul(o.pauli);
        // Convert X^{x}Z^{z} back to the Hermitian representative.
        phase += 4 - ph(out);
        Self::new(out, phase % 4)
    }

    pub fn matrix(self) -> Mat {
        self.pauli.matrix().scale(self.phase)
    }
}

/// An element of the single-qubit Clifford group mod phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CliffordClass(pub u8);

/// Canonical form: signed images of `X` and `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub x_image: (PauliClass, bool),
    pub z_image: (PauliClass, bool),
}

impl CanonicalForm {
    /// Lexicographic key `(code_x, neg_x, code_z, neg_z)` used for tie-breaks.
    fn key(&self) -> (u8, bool, u8, bool) {
        (self.x_image.0.code(), self.x_image.1, self.z_image.0.code(), self.z_image.1)
    }
}

/// Gate letters used in Clifford decompositions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    H,
    S,
    Sdg,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn matrix(self) -> Mat {
        match self {
            Letter::H => Mat::hadamard(),
            Letter::S => Mat::phase_s(),
            Letter::Sdg => Mat::phase_s().adjoint(),
            Letter::X => Mat::pauli_x(),
            Letter::Y => Mat::pauli_y(),
            Letter::Z => Mat::pauli_z(),
        }
    }
}

/// Precomputed group data for the 24 classes.
#[derive(Clone, Debug)]
pub struct GroupTable {
    pub forms: Vec<CanonicalForm>,
    pub reps: Vec<Mat>,
    pub mult: Vec<[CliffordClass; 24]>,
    pub inv: Vec<CliffordClass>,
    /// `conj[c][code(P)] = (Q, negative)` with `C P C† = ±Q`.
    pub conj: Vec<[(PauliClass, bool); 4]>,
    pub traceless: Vec<bool>,
    /// `|tr|²` of any representative; one of 0, 1, 2, 4.
    pub abs_trace_sq: Vec<u8>,
    /// Shortest words over `{H, S, S†, X, Y, Z}`, applied left to right in
    /// time (the matrix is the product in reverse order).
    pub gate_words: Vec<Vec<Letter>>,
    /// Shortest words over `{H, S, X, Z}` for transversal logical gates.
    pub logical_words: Vec<Vec<Letter>>,
    pub pauli_class: [CliffordClass; 4],
    index: HashMap<CanonicalForm, u8>,
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("closure produced {0} classes, expected 24")]
    ClosureSize(usize),
    #[error("operator is not a Clifford: conjugate of a Pauli is not a signed Pauli")]
    NotClifford,
}

fn signed_pauli_of(m: &Mat) -> Option<(PauliClass, bool)> {
    for p in [PauliClass::X, PauliClass::Y, PauliClass::Z, PauliClass::I] {
        let pm = p.matrix();
        if m.equals(&pm) {
            return Some((p, false));
        }
        if m.equals(&pm.scale(2)) {
            return Some((p, true));
        }
    }
    None
}

/// Signed image `U P U†` of a Pauli for a unitary `U`.
pub fn conjugate_matrix(u: &Mat, p: PauliClass) -> Option<(PauliClass, bool)> {
    let m = *u * p.matrix() * u.adjoint();
    // U and U† share the scale k, so the product carries 2^{-k}.
    let k = m.k;
    let mut mm = m;
    mm.k = 0;
    let shift = k / 2;
    if k % 2 == 1 {
        return None;
    }
    for e in mm.m.iter_mut().flatten() {
        if e.re % (1 << shift) != 0 || e.im % (1 << shift) != 0 {
            return None;
        }
        e.re /= 1 << shift;
        e.im /= 1 << shift;
    }
    signed_pauli_of(&mm)
}

pub fn canonical_form_of(u: &Mat) -> Result<CanonicalForm, TableError> {
    let x = conjugate_matrix(u, PauliClass::X).ok_or(TableError::NotClifford)?;
    let z = conjugate_matrix(u, PauliClass::Z).ok_or(TableError::NotClifford)?;
    Ok(CanonicalForm { x_image: x, z_image: z })
}

fn shortest_words(
    forms_index: &HashMap<CanonicalForm, u8>,
    alphabet: &[Letter],
) -> Vec<Vec<Letter>> {
    let mut words: Vec<Option<Vec<Letter>>> = vec![None; 24];
    let id = canonical_form_of(&Mat::identity()).expect("identity");
    words[forms_index[&id] as usize] = Some(vec![]);
    let mut queue = VecDeque::from([(Mat::identity(), Vec::<Letter>::new())]);
    while let Some((m, w)) = queue.pop_front() {
        for &l in alphabet {
            // Appending a letter in time multiplies on the left.
            let next = (l.matrix() * m).reduced();
            let f = canonical_form_of(&next).expect("Clifford");
            let idx = forms_index[&f] as usize;
            if words[idx].is_none() {
                let mut nw = w.clone();
                nw.push(l);
                words[idx] = Some(nw.clone());
                queue.push_back((next, nw));
            }
        }
    }
    words.into_iter().map(|w| w.expect("closure reached")).collect()
}

/// Builds the table by closing `{H, S, X, Z}` with exact matrices and
/// quotienting by phase through canonical forms.
pub fn build_group_table() -> Result<GroupTable, TableError> {
    let gens = [Mat::hadamard(), Mat::phase_s(), Mat::pauli_x(), Mat::pauli_z()];
    let mut forms: Vec<CanonicalForm> = Vec::new();
    let mut reps: Vec<Mat> = Vec::new();
    let mut index: HashMap<CanonicalForm, u8> = HashMap::new();

    let id = Mat::identity();
    let idf = canonical_form_of(&id)?;
    index.insert(idf, 0);
    forms.push(idf);
    reps.push(id);
    let mut level = vec![id];
    while !level.is_empty() {
        let mut found: Vec<(CanonicalForm, Mat)> = Vec::new();
        for g in &level {
            for h in &gens {
                let prod = (*g * *h).reduced();
                let f = canonical_form_of(&prod)?;
                if !index.contains_key(&f) && !found.iter().any(|(ff, _)| *ff == f) {
                    found.push((f, prod));
                }
            }
        }
        found.sort_by_key(|(f, _)| f.key());
        level = Vec::new();
        for (f, m) in found {
            if forms.len() >= 255 {
                return Err(TableError::ClosureSize(forms.len()));
            }
            index.insert(f, forms.len() as u8);
            forms.push(f);
            reps.push(m);
            level.push(m);
        }
    }
    if forms.len() != 24 {
        return Err(TableError::ClosureSize(forms.len()));
    }

    let class_of = |m: &Mat| -> Result<CliffordClass, TableError> {
        let f = canonical_form_of(&m.reduced())?;
        Ok(CliffordClass(index[&f]))
    };
    let mut mult = Vec::with_capacity(24);
    for a in 0..24 {
        let mut row = [CliffordClass(0); 24];
        for (b, slot) in row.iter_mut().enumerate() {
            *slot = class_of(&(reps[a] * reps[b]))?;
        }
        mult.push(row);
    }
    let inv = (0..24).map(|a| class_of(&reps[a].adjoint())).collect::<Result<Vec<_>, _>>()?;
    let conj = (0..24)
        .map(|a| {
            let mut row = [(PauliClass::I, false); 4];
            for p in PauliClass::ALL {
                row[p.code() as usize] =
                    conjugate_matrix(&reps[a], p).ok_or(TableError::NotClifford)?;
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, TableError>>()?;
    let abs_trace_sq: Vec<u8> = reps
        .iter()
        .map(|m| {
            let d = m.abs_trace_sq();
            assert_eq!(d.log2_den, 0, "|tr|^2 of a Clifford is an integer");
            d.num as u8
        })
        .collect();
    let traceless = reps.iter().map(|m| m.is_traceless()).collect();
    let mut pauli_class = [CliffordClass(0); 4];
    for p in PauliClass::ALL {
        pauli_class[p.code() as usize] = class_of(&p.matrix())?;
    }
    let gate_words = shortest_words(
        &index,
        &[Letter::H, Letter::S, Letter::Sdg, Letter::X, Letter::Y, Letter::Z],
    );
    let logical_words = shortest_words(&index, &[Letter::H, Letter::S, Letter::X, Letter::Z]);
    Ok(GroupTable {
        forms,
        reps,
        mult,
        inv,
        conj,
        traceless,
        abs_trace_sq,
        gate_words,
        logical_words,
        pauli_class,
        index,
    })
}

/// The process-wide group table.
pub fn table() -> &'static GroupTable {
    static TABLE: OnceLock<GroupTable> = OnceLock::new();
    TABLE.get_or_init(|| build_group_table().expect("Clifford closure"))
}

impl GroupTable {
    pub fn class_of_matrix(&self, m: &Mat) -> Option<CliffordClass> {
        let f = canonical_form_of(&m.reduced()).ok()?;
        self.index.get(&f).map(|&i| CliffordClass(i))
    }

    pub fn class_of_form(&self, f: &CanonicalForm) -> Option<CliffordClass> {
        self.index.get(f).map(|&i| CliffordClass(i))
    }

    /// JSON dump for cross-implementation diffing.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = (0..24)
            .map(|i| {
                let f = &self.forms[i];
                let img = |(p, neg): (PauliClass, bool)| {
                    format!("{}{}", if neg { "-" } else { "+" }, p.symbol())
                };
                serde_json::json!({
                    "index": i,
                    "iota": format!("{:05b}", i),
                    "x_image": img(f.x_image),
                    "z_image": img(f.z_image),
                    "traceless": self.traceless[i],
                    "abs_trace_sq": self.abs_trace_sq[i],
                })
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

impl CliffordClass {
    pub const IDENTITY: Self = Self(0);

    pub fn all() -> impl Iterator<Item = Self> {
        (0..24u8).map(Self)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Matrix product `self · o`.
    pub fn compose(self, o: Self) -> Self {
        table().mult[self.index()][o.index()]
    }

    pub fn inverse(self) -> Self {
        table().inv[self.index()]
    }

    pub fn form(self) -> CanonicalForm {
        table().forms[self.index()]
    }

    pub fn matrix(self) -> Mat {
        table().reps[self.index()]
    }

    pub fn abs_trace_sq(self) -> u8 {
        table().abs_trace_sq[self.index()]
    }

    pub fn is_pauli(self) -> bool {
        table().pauli_class.contains(&self)
    }

    pub fn as_pauli(self) -> Option<PauliClass> {
        PauliClass::ALL.into_iter().find(|p| p.as_clifford() == self)
    }

    /// Named gate or a product word such as `"HS"` (matrix product order).
    pub fn from_name(name: &str) -> Option<Self> {
        let upper = name.trim().to_ascii_uppercase();
        if upper == "SDG" || upper == "S†" {
            return table().class_of_matrix(&Letter::Sdg.matrix());
        }
        if upper.is_empty() {
            return None;
        }
        let mut acc = Mat::identity();
        for c in upper.chars() {
            let m = match c {
                'I' => Mat::identity(),
                'H' => Mat::hadamard(),
                'S' => Mat::phase_s(),
                'X' => Mat::pauli_x(),
                'Y' => Mat::pauli_y(),
                'Z' => Mat::pauli_z(),
                _ => return None,
            };
            acc = (acc * m).reduced();
        }
        table().class_of_matrix(&acc)
    }

    pub fn h() -> Self {
        Self::from_name("H").expect("H")
    }

    pub fn s() -> Self {
        Self::from_name("S").expect("S")
    }
}

impl fmt::Display for CliffordClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:05b}", self.0)
    }
}

/// `C P C† = σ Q`, returning `(Q, σ)`.
pub fn conjugate_pauli(c: CliffordClass, p: PauliClass) -> (PauliClass, i8) {
    let (q, neg) = table().conj[c.index()][p.code() as usize];
    (q, if neg { -1 } else { 1 })
}

/// Exact conjugation of a phased Pauli.
pub fn conjugate_signed(c: CliffordClass, p: SignedPauli) -> SignedPauli {
    let (q, s) = conjugate_pauli(c, p.pauli);
    SignedPauli::new(q, p.phase + if s < 0 { 2 } else { 0 })
}

/// True iff every phase representative of `g` has trace zero.
pub fn trace_is_zero(g: CliffordClass) -> bool {
    table().traceless[g.index()]
}

/// The injection of classes into 5-bit strings.
pub fn iota(c: CliffordClass) -> u8 {
    c.0
}

/// Partial inverse of `iota`.
pub fn iota_inverse(x: u8) -> Option<CliffordClass> {
    (x < 24).then_some(CliffordClass(x))
}

/// `Enc`: identity on `iota(Cliff)`, an arbitrary completion elsewhere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingMap {
    pub completion: [CliffordClass; 8],
}

impl EncodingMap {
    pub fn apply(&self, x: u8) -> CliffordClass {
        enc_apply(self, x)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut completion = [CliffordClass(0); 8];
        for c in completion.iter_mut() {
            *c = CliffordClass(rng.gen_range(0..24));
        }
        Self { completion }
    }
}

pub fn enc_apply(e: &EncodingMap, x: u8) -> CliffordClass {
    assert!(x < 32, "5-bit input expected");
    match iota_inverse(x) {
        Some(c) => c,
        None => e.completion[(x - 24) as usize],
    }
}

/// Draws the 8 completion entries uniformly from the 24 classes.
pub fn enc_random(seed: u64) -> EncodingMap {
    EncodingMap::random(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Exact product of a Dyadic probability helper for relation code.
pub fn abs_trace_sq_dyadic(g: CliffordClass) -> Dyadic {
    Dyadic::new(g.abs_trace_sq() as u64, 0)
}
