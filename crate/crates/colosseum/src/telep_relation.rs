//! The gate-teleportation relation: `(C, P)` is valid iff
//! `tr(P_{n-1} C_{n-1} ⋯ P_0 C_0) ≠ 0`, and the ideal circuit outputs `P` with
//! probability `4^{-n} |tr(⋯)|²`.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exact::Dyadic;
use crate::pauli_clifford::{
    conjugate_signed, iota_inverse, CliffordClass, PauliClass, SignedPauli,
};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RelationError {
    #[error("length mismatch: {cliffords} Cliffords vs {paulis} Paulis")]
    LengthMismatch { cliffords: usize, paulis: usize },
    #[error("empty tuple")]
    Empty,
    #[error("n = {0} exceeds the enumeration guard of 8")]
    TooLarge(usize),
    #[error("index {0} out of range or j >= k")]
    BadIndex(usize),
    #[error("restriction has {expected} active entries but {got} were supplied")]
    Arity { expected: usize, got: usize },
    #[error("cannot parse token {0:?}")]
    Parse(String),
}

/// `(C_0, …, C_{n-1})`, indexed cyclically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CliffordTuple(pub Vec<CliffordClass>);

/// `(P_0, …, P_{n-1})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliTuple(pub Vec<PauliClass>);

impl CliffordTuple {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self((0..n).map(|_| CliffordClass(rng.gen_range(0..24))).collect())
    }

    pub fn rotate(&self, r: usize) -> Self {
        let mut v = self.0.clone();
        if !v.is_empty() {
            let r = r % v.len();
            v.rotate_left(r);
        }
        Self(v)
    }

    /// Parses comma- or space-separated tokens: 5-bit strings (`iota`) or
    /// gate words such as `H`, `S`, `HS`, `Sdg`.
    pub fn parse(s: &str) -> Result<Self, RelationError> {
        s.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                if t.len() == 5 && t.chars().all(|c| c == '0' || c == '1') {
                    let x = u8::from_str_radix(t, 2).expect("binary");
                    iota_inverse(x).ok_or_else(|| RelationError::Parse(t.to_string()))
                } else {
                    CliffordClass::from_name(t).ok_or_else(|| RelationError::Parse(t.to_string()))
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

impl fmt::Display for CliffordTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl PauliTuple {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rotate(&self, r: usize) -> Self {
        let mut v = self.0.clone();
        if !v.is_empty() {
            let r = r % v.len();
            v.rotate_left(r);
        }
        Self(v)
    }

    pub fn parse(s: &str) -> Result<Self, RelationError> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| PauliClass::from_symbol(c).ok_or_else(|| RelationError::Parse(c.to_string())))
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }

    /// Enumerates all `4^n` tuples in lexicographic code order.
    pub fn enumerate(n: usize) -> impl Iterator<Item = PauliTuple> {
        (0..4usize.pow(n as u32)).map(move |mut v| {
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                out.push(PauliClass::from_code((v % 4) as u8));
                v /= 4;
            }
            PauliTuple(out)
        })
    }
}

impl fmt::Display for PauliTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

/// Validity and exact probability `prob_num · 2^{-prob_den_log2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationOutcome {
    pub valid: bool,
    pub prob_num: u64,
    pub prob_den_log2: u32,
}

impl RelationOutcome {
    fn from_abs_trace_sq(abs: u8, n: usize) -> Self {
        let d = Dyadic::new(abs as u64, 2 * n as u32);
        Self { valid: abs != 0, prob_num: d.num, prob_den_log2: d.log2_den }
    }

    pub fn probability(&self) -> Dyadic {
        Dyadic::new(self.prob_num, self.prob_den_log2)
    }
}

/// The class of `P_{n-1} C_{n-1} ⋯ P_0 C_0`.
pub fn fold_product(c: &CliffordTuple, p: &PauliTuple) -> CliffordClass {
    c.0.iter().zip(&p.0).fold(CliffordClass::IDENTITY, |acc, (&ci, &pi)| {
        pi.as_clifford().compose(ci.compose(acc))
    })
}

fn check_lengths(c: &CliffordTuple, p: &PauliTuple) -> Result<usize, RelationError> {
    if c.len() != p.len() {
        return Err(RelationError::LengthMismatch { cliffords: c.len(), paulis: p.len() });
    }
    if c.is_empty() {
        return Err(RelationError::Empty);
    }
    Ok(c.len())
}

pub fn verify(c: &CliffordTuple, p: &PauliTuple) -> Result<RelationOutcome, RelationError> {
    let n = check_lengths(c, p)?;
    Ok(RelationOutcome::from_abs_trace_sq(fold_product(c, p).abs_trace_sq(), n))
}

pub fn full_distribution(c: &CliffordTuple) -> Result<BTreeMap<PauliTuple, Dyadic>, RelationError> {
    let n = c.len();
    if n == 0 {
        return Err(RelationError::Empty);
    }
    if n > 8 {
        return Err(RelationError::TooLarge(n));
    }
    Ok(PauliTuple::enumerate(n)
        .map(|p| {
            let o = verify(c, &p).expect("lengths agree");
            (p, o.probability())
        })
        .collect())
}

/// Draws from the ideal output distribution: the first `n−1` Paulis are
/// uniform, the last is drawn with weight `|tr(P·A)|²/4`.
pub fn sample_ideal<R: Rng + ?Sized>(c: &CliffordTuple, rng: &mut R) -> PauliTuple {
    let n = c.len();
    assert!(n >= 1, "empty Clifford tuple");
    let mut out = Vec::with_capacity(n);
    let mut acc = CliffordClass::IDENTITY;
    for j in 0..n - 1 {
        let p = PauliClass::from_code(rng.gen_range(0..4));
        acc = p.as_clifford().compose(c.0[j].compose(acc));
        out.push(p);
    }
    let a = c.0[n - 1].compose(acc);
    // Weights sum to 4 by Pauli-basis completeness.
    let mut u = rng.gen_range(0..4u8);
    let mut last = PauliClass::I;
    for p in PauliClass::ALL {
        let w = p.as_clifford().compose(a).abs_trace_sq();
        if u < w {
            last = p;
            break;
        }
        u -= w;
    }
    out.push(last);
    PauliTuple(out)
}

/// Which light cone a Pauli factor depends on during regrouping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeLabel {
    J,
    K,
    Neither,
}

/// Intermediate data of the normal-form rewriting.
#[derive(Clone, Debug)]
pub struct NormalForm {
    /// Product of the Cliffords on the arc `k+1, …, j−1`.
    pub k_prod: CliffordClass,
    /// Product of the Cliffords on the arc `j+1, …, k−1`.
    pub l_prod: CliffordClass,
    /// Pauli in the slot after `C_j K`.
    pub f_tilde: SignedPauli,
    /// Pauli in the slot after `C_k L`.
    pub g_tilde: SignedPauli,
    /// `tr(C P-product) = sign · tr(C_j K F̃ C_k L G̃)`.
    pub sign: SignedPauli,
    pub outcome: RelationOutcome,
}

/// Pushes each Pauli of the arc to the right through its Clifford prefix:
/// `P_{a_m}C_{a_m}⋯P_{a_1}C_{a_1} = D_m · P̃_{a_m}⋯P̃_{a_1}` with
/// `D_i = C_{a_i}⋯C_{a_1}` and `P̃_{a_i} = D_i† P_{a_i} D_i`.
fn push_through(
    c: &CliffordTuple,
    p: &PauliTuple,
    arc: &[usize],
) -> (CliffordClass, Vec<(usize, SignedPauli)>) {
    let mut d = CliffordClass::IDENTITY;
    let mut tildes = Vec::with_capacity(arc.len());
    for &a in arc {
        d = c.0[a].compose(d);
        let pt = conjugate_signed(d.inverse(), SignedPauli::plus(p.0[a]));
        tildes.push((a, pt));
    }
    // Leftmost factor is the last arc element.
    tildes.reverse();
    (d, tildes)
}

fn product(factors: &[(usize, SignedPauli)]) -> SignedPauli {
    factors
        .iter()
        .fold(SignedPauli::plus(PauliClass::I), |acc, (_, f)| acc.mul(*f))
}

fn select(
    factors: &[(usize, SignedPauli)],
    labels: &dyn Fn(usize) -> ConeLabel,
    want: ConeLabel,
) -> Vec<(usize, SignedPauli)> {
    factors.iter().copied().filter(|(i, _)| labels(*i) == want).collect()
}

/// Ratio `whole / parts` for two equal-up-to-sign Pauli products.
fn ratio(whole: SignedPauli, parts: SignedPauli) -> SignedPauli {
    assert_eq!(whole.pauli, parts.pauli);
    SignedPauli::new(PauliClass::I, (whole.phase + 4 - parts.phase) % 4)
}

/// Evaluates `|tr|` via the commutation normal form around the pair `(j, k)`.
///
/// `labels` assigns each index to the `J` cone, the `K` cone or neither;
/// Pauli factors are regrouped accordingly and moved around the trace so that
/// `F̃` collects `Q′` and the conjugated `P′P‴`, while `G̃` collects `P″` and the
/// conjugated `Q″Q‴`.
pub fn normal_form_trace_labeled(
    c: &CliffordTuple,
    p: &PauliTuple,
    j: usize,
    k: usize,
    labels: &dyn Fn(usize) -> ConeLabel,
) -> Result<NormalForm, RelationError> {
    let n = check_lengths(c, p)?;
    if j >= k || k >= n {
        return Err(RelationError::BadIndex(k.max(j)));
    }
    let arc_k: Vec<usize> = (1..n).map(|s| (k + s) % n).take_while(|&i| i != j).collect();
    let arc_l: Vec<usize> = (j + 1..k).collect();
    let (k_prod, q_factors) = push_through(c, p, &arc_k);
    let (l_prod, p_factors) = push_through(c, p, &arc_l);

    // tr(P_j C_j K Π_K P_k C_k L Π_L) = tr(C_j K [Π_K P_k] C_k L [Π_L P_j]).
    let mut q_all = q_factors.clone();
    q_all.push((k, SignedPauli::plus(p.0[k])));
    let mut p_all = p_factors.clone();
    p_all.push((j, SignedPauli::plus(p.0[j])));
    let q = product(&q_all);
    let pg = product(&p_all);

    let q1 = product(&select(&q_all, labels, ConeLabel::K));
    let q2 = product(&select(&q_all, labels, ConeLabel::J));
    let q3 = product(&select(&q_all, labels, ConeLabel::Neither));
    let p1 = product(&select(&p_all, labels, ConeLabel::K));
    let p2 = product(&select(&p_all, labels, ConeLabel::J));
    let p3 = product(&select(&p_all, labels, ConeLabel::Neither));
    let q_sign = ratio(q, q1.mul(q2).mul(q3));
    let p_sign = ratio(pg, p2.mul(p1).mul(p3));

    // Move Q″Q‴ to the G slot and P′P‴ to the F slot.
    let cj_k = c.0[j].compose(k_prod);
    let ck_l = c.0[k].compose(l_prod);
    let r = conjugate_signed(cj_k.inverse(), p1.mul(p3));
    let s = conjugate_signed(ck_l.inverse(), q2.mul(q3));
    let f_tilde = r.mul(q1);
    let g_tilde = s.mul(p2);
    let sign = q_sign.mul(p_sign);

    let total = cj_k
        .compose(f_tilde.pauli.as_clifford())
        .compose(ck_l)
        .compose(g_tilde.pauli.as_clifford());
    Ok(NormalForm {
        k_prod,
        l_prod,
        f_tilde,
        g_tilde,
        sign,
        outcome: RelationOutcome::from_abs_trace_sq(total.abs_trace_sq(), n),
    })
}

/// Normal-form evaluation with every factor labeled `Neither`.
pub fn normal_form_trace(
    c: &CliffordTuple,
    p: &PauliTuple,
    j: usize,
    k: usize,
) -> Result<RelationOutcome, RelationError> {
    normal_form_trace_labeled(c, p, j, k, &|_| ConeLabel::Neither).map(|nf| nf.outcome)
}

/// Fixes some entries and leaves the rest active.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordRestriction {
    pub assignment: Vec<Option<CliffordClass>>,
}

impl CliffordRestriction {
    pub fn active_list(&self) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i].is_none()).collect()
    }

    /// Places `d[t]` at the `t`-th active index.
    pub fn splice(&self, d: &[CliffordClass]) -> Result<CliffordTuple, RelationError> {
        let active = self.active_list();
        if active.len() != d.len() {
            return Err(RelationError::Arity { expected: active.len(), got: d.len() });
        }
        let mut it = d.iter();
        Ok(CliffordTuple(
            self.assignment
                .iter()
                .map(|a| a.unwrap_or_else(|| *it.next().expect("counted")))
                .collect(),
        ))
    }
}

pub fn verify_restricted(
    xi: &CliffordRestriction,
    d: &[CliffordClass],
    p: &PauliTuple,
) -> Result<RelationOutcome, RelationError> {
    verify(&xi.splice(d)?, p)
}
