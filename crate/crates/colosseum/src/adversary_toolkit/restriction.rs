//! Random restrictions, the switching-lemma parameters and the process
//! that turns a bit restriction into a block restriction.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::dag::{table_support, CircuitDag};
use super::AdversaryError;

/// Input bits per Clifford block.
pub const BLOCK_BITS: usize = 5;

/// `None` marks an active bit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitRestriction(pub Vec<Option<bool>>);

impl BitRestriction {
    pub fn all_active(n: usize) -> Self {
        Self(vec![None; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `N(ρ)`, the number of active bits.
    pub fn n_active(&self) -> usize {
        self.0.iter().filter(|a| a.is_none()).count()
    }

    pub fn active_list(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i].is_none()).collect()
    }

    /// First `self`, then `eta` on the `N(self)` remaining bits in order.
    pub fn concat(&self, eta: &BitRestriction) -> Result<Self, AdversaryError> {
        if eta.len() != self.n_active() {
            return Err(AdversaryError::Arity { expected: self.n_active(), got: eta.len() });
        }
        let mut it = eta.0.iter();
        Ok(Self(self.0.iter().map(|a| a.or_else(|| *it.next().expect("counted"))).collect()))
    }

    /// Full assignment with `fill` on the active bits.
    pub fn complete(&self, fill: &[bool]) -> Result<Vec<bool>, AdversaryError> {
        let eta = BitRestriction(fill.iter().map(|&b| Some(b)).collect());
        Ok(self.concat(&eta)?.0.into_iter().map(|a| a.expect("fully fixed")).collect())
    }

    /// Blocks of [`BLOCK_BITS`] bits that are entirely active.
    pub fn free_blocks(&self) -> usize {
        self.0.chunks(BLOCK_BITS).filter(|b| b.iter().all(Option::is_none)).count()
    }

    /// Reads the restriction blockwise, rejecting partially fixed blocks.
    pub fn to_block(&self) -> Result<BlockRestriction, AdversaryError> {
        if self.len() % BLOCK_BITS != 0 {
            return Err(AdversaryError::Arity { expected: self.len().next_multiple_of(BLOCK_BITS), got: self.len() });
        }
        self.0
            .chunks(BLOCK_BITS)
            .enumerate()
            .map(|(j, b)| match b.iter().filter(|a| a.is_none()).count() {
                BLOCK_BITS => Ok(None),
                0 => Ok(Some(b.iter().enumerate().fold(0u8, |x, (i, a)| x | (a.expect("fixed") as u8) << i))),
                _ => Err(AdversaryError::PartialBlock(j)),
            })
            .collect::<Result<_, _>>()
            .map(BlockRestriction)
    }
}

/// Per block either a fixed 5-bit value (bit `i` of the value is bit
/// `5j + i`) or `None` for an active block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRestriction(pub Vec<Option<u8>>);

impl BlockRestriction {
    /// `N(ξ^block)`.
    pub fn n_active(&self) -> usize {
        self.0.iter().filter(|a| a.is_none()).count()
    }

    pub fn active_list(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&j| self.0[j].is_none()).collect()
    }

    pub fn to_bits(&self) -> BitRestriction {
        BitRestriction(
            self.0
                .iter()
                .flat_map(|a| (0..BLOCK_BITS).map(move |i| a.map(|x| x >> i & 1 == 1)))
                .collect(),
        )
    }
}

/// `R_p`: each bit active with probability `p`, otherwise a fair bit.
pub fn sample_rp<R: Rng + ?Sized>(n_bits: usize, p_star: f64, rng: &mut R) -> BitRestriction {
    BitRestriction((0..n_bits).map(|_| if rng.gen_bool(p_star) { None } else { Some(rng.gen()) }).collect())
}

/// Parameters for a depth-`d`, size-`s` circuit on `n` blocks (`5n` input
/// bits, `2n` output bits).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwitchingParams {
    pub n: usize,
    pub s: f64,
    pub d: usize,
    pub q: usize,
    pub p_star: f64,
    pub t: f64,
    /// `1/(2^{1/(20d)}·n^{1/20})`, valid under the size assumption.
    pub p_star_lower_bound: f64,
    /// `ln s ≤ n^{1/(20d)}` fails.
    pub size_warning: bool,
    /// `s ≤ 2^{t/2}`.
    pub s_within_two_pow_half_t: bool,
}

pub fn switching_params(n: usize, s: f64, d: usize) -> SwitchingParams {
    let (nf, df) = (n as f64, d as f64);
    let q = 20 * d;
    let p_star = 1.0 / ((2.0 * nf).powf(1.0 / (20.0 * df)) * s.ln().powi(d as i32 - 1));
    let t = p_star.powi(5) * nf / 5.0;
    SwitchingParams {
        n,
        s,
        d,
        q,
        p_star,
        t,
        p_star_lower_bound: 1.0 / (2f64.powf(1.0 / (20.0 * df)) * nf.powf(1.0 / 20.0)),
        size_warning: s.ln() > nf.powf(1.0 / (20.0 * df)),
        s_within_two_pow_half_t: s.log2() <= t / 2.0,
    }
}

impl SwitchingParams {
    /// Toy parameters with a chosen `p_*` and `t = p_*⁵·n/5`.
    pub fn with_p_star(n: usize, p_star: f64) -> Self {
        Self {
            n,
            s: f64::NAN,
            d: 0,
            q: 0,
            p_star,
            t: p_star.powi(5) * n as f64 / 5.0,
            p_star_lower_bound: f64::NAN,
            size_warning: false,
            s_within_two_pow_half_t: false,
        }
    }

    /// Most bits a set in `E(ρ)` may hold.
    pub fn max_t_set(&self) -> usize {
        (2.0 * self.t).floor() as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleMode {
    Exhaustive,
    Stub,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleAnswer {
    /// A set `T` of active bit positions in `E(ρ)`.
    Found(Vec<usize>),
    /// `E(ρ)` is empty.
    Empty,
    Failed(String),
}

/// Supplies an element of `E(ρ)`: active bits of size at most `max_size`
/// whose fixing leaves a shallow circuit.
pub trait TSetOracle {
    fn mode(&self) -> OracleMode;
    fn pick(&self, rho: &BitRestriction, max_size: usize, rng: &mut dyn RngCore) -> OracleAnswer;
}

/// Declares `E(ρ)` non-empty and returns a uniformly random set of
/// `min(max_size, N(ρ))` active bits.
pub struct StubOracle;

impl TSetOracle for StubOracle {
    fn mode(&self) -> OracleMode {
        OracleMode::Stub
    }

    fn pick(&self, rho: &BitRestriction, max_size: usize, rng: &mut dyn RngCore) -> OracleAnswer {
        let active = rho.active_list();
        let k = max_size.min(active.len());
        let mut t: Vec<usize> = rand::seq::index::sample(rng, active.len(), k).into_iter().map(|i| active[i]).collect();
        t.sort_unstable();
        OracleAnswer::Found(t)
    }
}

/// Searches sets `T` by increasing size, accepting the first one for which
/// every fixing of `T` leaves each output depending on at most `locality`
/// active bits.
pub struct ExhaustiveOracle<'a> {
    pub dag: &'a CircuitDag,
    pub locality: usize,
    /// Candidate sets tried before giving up.
    pub budget: usize,
}

/// Active inputs the exhaustive oracle accepts.
pub const EXHAUSTIVE_ACTIVE_LIMIT: usize = 24;

impl ExhaustiveOracle<'_> {
    fn accepts(&self, tables: &[(Vec<usize>, Vec<bool>)], t: &[usize]) -> bool {
        tables.iter().all(|(vars, table)| {
            let local: Vec<usize> = t.iter().filter_map(|b| vars.iter().position(|v| v == b)).collect();
            (0..1usize << local.len()).all(|fix| {
                let k = vars.len();
                let sub: Vec<bool> = (0..1usize << k)
                    .map(|a| {
                        let mut a = a;
                        for (i, &l) in local.iter().enumerate() {
                            a = (a & !(1 << l)) | ((fix >> i & 1) << l);
                        }
                        table[a]
                    })
                    .collect();
                table_support(&sub, k).len() <= self.locality
            })
        })
    }
}

impl TSetOracle for ExhaustiveOracle<'_> {
    fn mode(&self) -> OracleMode {
        OracleMode::Exhaustive
    }

    fn pick(&self, rho: &BitRestriction, max_size: usize, _rng: &mut dyn RngCore) -> OracleAnswer {
        let active = rho.active_list();
        if active.len() > EXHAUSTIVE_ACTIVE_LIMIT {
            return OracleAnswer::Failed(format!("{} active inputs exceed {EXHAUSTIVE_ACTIVE_LIMIT}", active.len()));
        }
        if rho.len() != self.dag.n_in {
            return OracleAnswer::Failed(format!("restriction on {} bits, circuit has {}", rho.len(), self.dag.n_in));
        }
        let base: Vec<bool> = rho.0.iter().map(|a| a.unwrap_or(false)).collect();
        let structural = super::dag::light_cones_structural(self.dag);
        let tables: Vec<(Vec<usize>, Vec<bool>)> = (0..self.dag.n_out())
            .map(|o| {
                let vars: Vec<usize> = structural.backward[o].iter().copied().filter(|&i| rho.0[i].is_none()).collect();
                let table = self.dag.output_table(o, &vars, &base);
                (vars, table)
            })
            .collect();
        let mut tried = 0;
        for size in 0..=max_size.min(active.len()) {
            for subset in Combinations::new(active.len(), size) {
                tried += 1;
                if tried > self.budget {
                    return OracleAnswer::Failed(format!("search budget {} exhausted", self.budget));
                }
                let t: Vec<usize> = subset.iter().map(|&i| active[i]).collect();
                if self.accepts(&tables, &t) {
                    return OracleAnswer::Found(t);
                }
            }
        }
        OracleAnswer::Empty
    }
}

/// `k`-subsets of `0..n` in lexicographic order.
struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self { n, cur: (k <= n).then(|| (0..k).collect()) }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let c = self.cur.as_mut().expect("present");
        let k = c.len();
        match (0..k).rev().find(|&i| c[i] < self.n - k + i) {
            Some(i) => {
                c[i] += 1;
                for l in i + 1..k {
                    c[l] = c[l - 1] + 1;
                }
            }
            None => self.cur = None,
        }
        Some(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessDiagnostics {
    pub oracle_mode: OracleMode,
    /// Active bits of `ρ`.
    pub rho_active_bits: usize,
    /// `N(ρ)`: fully active blocks of `ρ`.
    pub rho_free_blocks: usize,
    pub t_set_nonempty: bool,
    pub t_set_size: usize,
    /// Bits fixed in the cleanup of partially fixed blocks.
    pub tau_bits: usize,
    /// `N(ξ^block)`.
    pub xi_free_blocks: usize,
    /// Every fixed bit came from a fair coin.
    pub uniform_fixing: bool,
    pub oracle_note: Option<String>,
}

/// Draws `ρ ∼ R_{p*}`, fixes a set `T ∈ E(ρ)` (or every active bit when
/// none exists) to uniform bits, then fixes the active bits of partially
/// fixed blocks to uniform bits.
pub fn block_restriction_process<R: Rng>(
    params: &SwitchingParams,
    oracle: &dyn TSetOracle,
    rng: &mut R,
) -> (BlockRestriction, ProcessDiagnostics) {
    let rho = sample_rp(BLOCK_BITS * params.n, params.p_star, rng);
    let mut diag = ProcessDiagnostics {
        oracle_mode: oracle.mode(),
        rho_active_bits: rho.n_active(),
        rho_free_blocks: rho.free_blocks(),
        t_set_nonempty: false,
        t_set_size: 0,
        tau_bits: 0,
        xi_free_blocks: 0,
        uniform_fixing: true,
        oracle_note: None,
    };
    let t_set = match oracle.pick(&rho, params.max_t_set(), rng) {
        OracleAnswer::Found(t) => {
            diag.t_set_nonempty = true;
            t
        }
        OracleAnswer::Empty => rho.active_list(),
        OracleAnswer::Failed(msg) => {
            diag.oracle_note = Some(msg);
            rho.active_list()
        }
    };
    diag.t_set_size = t_set.len();
    let mut eta_rho = rho.clone();
    for &i in &t_set {
        if eta_rho.0[i].is_some() {
            diag.uniform_fixing = false;
            diag.oracle_note.get_or_insert_with(|| format!("oracle returned fixed bit {i}"));
        }
        eta_rho.0[i] = Some(rng.gen());
    }
    for block in eta_rho.0.chunks_mut(BLOCK_BITS) {
        let free = block.iter().filter(|a| a.is_none()).count();
        if free > 0 && free < block.len() {
            for a in block.iter_mut().filter(|a| a.is_none()) {
                *a = Some(rng.gen());
                diag.tau_bits += 1;
            }
        }
    }
    let xi = eta_rho.to_block().expect("every block is fully fixed or fully active");
    diag.xi_free_blocks = xi.n_active();
    (xi, diag)
}
