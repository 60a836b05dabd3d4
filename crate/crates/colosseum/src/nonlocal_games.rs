//! The magic-square game, the single-qubit-control game `G` and brute-force
//! oracles for their classical values.

use num_rational::Ratio;
use rand::Rng;
use serde::Serialize;

use crate::exact::{Dyadic, Unitary2};
use crate::pauli_clifford::{
    enc_apply, iota_inverse, table, trace_is_zero, CliffordClass, EncodingMap, PauliClass,
};

type Mat = Unitary2<i64>;

/// Inputs of both players, each in `{1, 2, 3}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GameInput {
    pub alpha: u8,
    pub beta: u8,
}

impl GameInput {
    pub fn all() -> impl Iterator<Item = GameInput> {
        (1..=3u8).flat_map(|alpha| (1..=3u8).map(move |beta| GameInput { alpha, beta }))
    }
}

/// A triple of `±1` values.
pub type Signs = [i8; 3];

/// Deterministic magic-square strategy: one row per Alice input (product `+1`)
/// and one column per Bob input (product `−1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StrategyTables {
    pub alice: [Signs; 3],
    pub bob: [Signs; 3],
}

/// Deterministic Pauli-valued strategy on inputs `{1,2,3}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PauliStrategy {
    pub f: [PauliClass; 3],
    pub g: [PauliClass; 3],
}

/// The six Clifford classes `(U_1, U_2, U_3, V_1, V_2, V_3)`.
pub fn constants_uv() -> ([CliffordClass; 3], [CliffordClass; 3]) {
    let rx = Mat::rotation(&Mat::pauli_x());
    let ry = Mat::rotation(&Mat::pauli_y());
    let rz = Mat::rotation(&Mat::pauli_z());
    let z = Mat::pauli_z();
    let class = |m: Mat| table().class_of_matrix(&m.reduced()).expect("Clifford");
    let u = [class(rx), class(z * ry.adjoint()), class(rz.adjoint())];
    let v = [
        class(Mat::identity()),
        class(rz * ry.adjoint()),
        class(rx.adjoint() * ry),
    ];
    (u, v)
}

fn uv() -> &'static ([CliffordClass; 3], [CliffordClass; 3]) {
    static UV: std::sync::OnceLock<([CliffordClass; 3], [CliffordClass; 3])> =
        std::sync::OnceLock::new();
    UV.get_or_init(constants_uv)
}

/// `U_α A V_β B` as a class.
pub fn trace_product(alpha: u8, a: PauliClass, beta: u8, b: PauliClass) -> CliffordClass {
    let (u, v) = uv();
    u[alpha as usize - 1]
        .compose(a.as_clifford())
        .compose(v[beta as usize - 1])
        .compose(b.as_clifford())
}

/// Outcome distribution of the two Bell measurements, indexed
/// `[code(P)][code(Q)]` with `P` Alice's and `Q` Bob's outcome.
///
/// Contracting `⟨Φ_P|⟨Φ_Q| (U_α ⊗ V_β) |Φ⟩|Φ⟩` gives `|tr(U_α Q V_β P)|²/16`:
/// Bob's label is the one adjacent to `U_α`.
pub fn game_distribution(input: GameInput) -> [[Dyadic; 4]; 4] {
    let mut out = [[Dyadic::zero(); 4]; 4];
    for p in PauliClass::ALL {
        for q in PauliClass::ALL {
            let g = trace_product(input.alpha, q, input.beta, p);
            out[p.code() as usize][q.code() as usize] = Dyadic::new(g.abs_trace_sq() as u64, 4);
        }
    }
    out
}

fn sgn(bit: u8) -> i8 {
    if bit % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Alice's table `f_α(u_1, u_2)`.
pub fn postprocess(alpha: u8, u: (u8, u8)) -> Signs {
    let (a, b) = (sgn(u.0), sgn(u.1));
    match alpha {
        1 => [a, b, a * b],
        2 => [a * b, a, b],
        3 => [b, a * b, a],
        _ => panic!("alpha must be in 1..=3"),
    }
}

/// Bob's table `g_β(v_1, v_2)`, read off his measured observables: for
/// `β = 2`, `v_1` is the eigenvalue of `−X⊗Y` (third column entry) and `v_2`
/// that of `Z⊗X`; for `β = 3`, `v_1` belongs to `X⊗Z` and `v_2` to `−Z⊗Y`.
pub fn postprocess_bob(beta: u8, v: (u8, u8)) -> Signs {
    let (a, b) = (sgn(v.0), sgn(v.1));
    match beta {
        1 => [a, -a * b, b],
        2 => [-a * b, b, a],
        3 => [b, a, -a * b],
        _ => panic!("beta must be in 1..=3"),
    }
}

/// Bell-outcome bits of a Pauli label: `P = X^{s_2} Z^{s_1}`.
pub fn bits_of(p: PauliClass) -> (u8, u8) {
    (p.s1 as u8, p.s2 as u8)
}

/// The magic-square winning predicate.
pub fn wins(input: GameInput, x: Signs, y: Signs) -> bool {
    x[0] * x[1] * x[2] == 1
        && y[0] * y[1] * y[2] == -1
        && y[input.alpha as usize - 1] * x[input.beta as usize - 1] == 1
}

/// Whether the post-processed outputs of `(P, Q)` win on `input`.
pub fn outcome_wins(input: GameInput, p: PauliClass, q: PauliClass) -> bool {
    let x = postprocess(input.alpha, bits_of(p));
    let y = postprocess_bob(input.beta, bits_of(q));
    wins(input, x, y)
}

fn sign_triples(product: i8) -> Vec<Signs> {
    let mut out = Vec::with_capacity(4);
    for m in 0..8u8 {
        let t = [sgn(m & 1), sgn((m >> 1) & 1), sgn((m >> 2) & 1)];
        if t[0] * t[1] * t[2] == product {
            out.push(t);
        }
    }
    out
}

/// Wins of one deterministic strategy over the 9 inputs.
pub fn strategy_wins(s: &StrategyTables) -> u32 {
    GameInput::all()
        .filter(|i| wins(*i, s.alice[i.alpha as usize - 1], s.bob[i.beta as usize - 1]))
        .count() as u32
}

/// Every deterministic strategy (`4³ × 4³`).
pub fn all_strategies() -> impl Iterator<Item = StrategyTables> {
    let rows = sign_triples(1);
    let cols = sign_triples(-1);
    (0..4096usize).map(move |k| {
        let pick = |t: &Vec<Signs>, s: usize| [t[s & 3], t[(s >> 2) & 3], t[(s >> 4) & 3]];
        StrategyTables {
            alice: pick(&rows, k & 63),
            bob: pick(&cols, k >> 6),
        }
    })
}

/// Classical value of the magic-square game under uniform inputs.
pub fn magic_square_classical_value() -> Ratio<u32> {
    let best = all_strategies().map(|s| strategy_wins(&s)).max().unwrap_or(0);
    Ratio::new(best, 9)
}

fn pauli_strategy(k: usize) -> PauliStrategy {
    let p = |s: usize| PauliClass::from_code((s & 3) as u8);
    PauliStrategy {
        f: [p(k), p(k >> 2), p(k >> 4)],
        g: [p(k >> 6), p(k >> 8), p(k >> 10)],
    }
}

/// Inputs on which `tr(U_α F(α) V_β G(β)) = 0`.
pub fn zero_trace_witnesses(s: &PauliStrategy) -> Vec<GameInput> {
    GameInput::all()
        .filter(|i| {
            trace_is_zero(trace_product(
                i.alpha,
                s.f[i.alpha as usize - 1],
                i.beta,
                s.g[i.beta as usize - 1],
            ))
        })
        .collect()
}

/// True iff each of the 4096 Pauli strategies has a zero-trace input pair.
pub fn check_cor_main_ms() -> bool {
    (0..4096).all(|k| !zero_trace_witnesses(&pauli_strategy(k)).is_empty())
}

/// Classical value of `G`: Alice outputs `F(α)`, Bob outputs `G(β)`, and they
/// win on `(α, β)` when that outcome has nonzero probability.
pub fn game_g_classical_value() -> Ratio<u32> {
    let best = (0..4096)
        .map(|k| {
            let s = pauli_strategy(k);
            GameInput::all()
                .filter(|i| {
                    let d = game_distribution(*i);
                    let p = s.f[i.alpha as usize - 1];
                    let q = s.g[i.beta as usize - 1];
                    !d[p.code() as usize][q.code() as usize].is_zero()
                })
                .count() as u32
        })
        .max()
        .unwrap_or(0);
    Ratio::new(best, 9)
}

/// Counts `(U, V) ∈ Cliff²` with `tr(U F'(U) V G'(V)) = 0`; ok when ≥ 16.
pub fn gamma_bound_check(f: &[PauliClass; 24], g: &[PauliClass; 24]) -> (u32, bool) {
    let mut count = 0;
    for u in CliffordClass::all() {
        let left = u.compose(f[u.index()].as_clifford());
        for v in CliffordClass::all() {
            let prod = left.compose(v).compose(g[v.index()].as_clifford());
            if trace_is_zero(prod) {
                count += 1;
            }
        }
    }
    (count, count >= 16)
}

/// For each `(P, Q) ∈ Pauli²`, the pair `(U_α P, V_β Q) ∈ Γ` found by applying
/// the zero-trace witness search to `F(α) = P F'(U_α P)`, `G(β) = Q G'(V_β Q)`.
pub fn coset_witnesses(
    f: &[PauliClass; 24],
    g: &[PauliClass; 24],
) -> Vec<(CliffordClass, CliffordClass)> {
    let (u, v) = uv();
    let mut out = Vec::with_capacity(16);
    for p in PauliClass::ALL {
        for q in PauliClass::ALL {
            let up = |a: usize| u[a].compose(p.as_clifford());
            let vq = |b: usize| v[b].compose(q.as_clifford());
            let s = PauliStrategy {
                f: [0, 1, 2].map(|a| p.mul(f[up(a).index()])),
                g: [0, 1, 2].map(|b| q.mul(g[vq(b).index()])),
            };
            let w = zero_trace_witnesses(&s)[0];
            out.push((up(w.alpha as usize - 1), vq(w.beta as usize - 1)));
        }
    }
    out
}

/// Exact probability over `32²` inputs that the encoded trace vanishes.
pub fn encoded_bound_check(
    enc1: &EncodingMap,
    enc2: &EncodingMap,
    f: &[PauliClass; 32],
    g: &[PauliClass; 32],
) -> Ratio<u32> {
    let mut count = 0;
    for x1 in 0..32u8 {
        let left = enc_apply(enc1, x1).compose(f[x1 as usize].as_clifford());
        for x2 in 0..32u8 {
            let prod = left
                .compose(enc_apply(enc2, x2))
                .compose(g[x2 as usize].as_clifford());
            if trace_is_zero(prod) {
                count += 1;
            }
        }
    }
    Ratio::new(count, 1024)
}

/// Fraction of input pairs `(x¹, x²)` with both strings in `iota(Cliff)`.
pub fn in_image_fraction() -> Ratio<u32> {
    let inside = (0..32u8).filter(|x| iota_inverse(*x).is_some()).count() as u32;
    Ratio::new(inside * inside, 1024)
}

/// Samples `(α, β)` uniformly and `(P, Q)` from the game distribution, then
/// scores the post-processed outputs.
pub fn quantum_strategy_winrate<R: Rng + ?Sized>(trials: u64, rng: &mut R) -> f64 {
    assert!(trials >= 1, "at least one trial");
    let tables: Vec<_> = GameInput::all().map(game_distribution).collect();
    let mut won = 0u64;
    for _ in 0..trials {
        let idx = rng.gen_range(0..9usize);
        let input = GameInput {
            alpha: idx as u8 / 3 + 1,
            beta: idx as u8 % 3 + 1,
        };
        // Probabilities are multiples of 1/16.
        let mut r = rng.gen_range(0..16u64);
        let mut chosen = (PauliClass::I, PauliClass::I);
        'outer: for p in PauliClass::ALL {
            for q in PauliClass::ALL {
                let w = tables[idx][p.code() as usize][q.code() as usize];
                let w16 = w.num << (4 - w.log2_den);
                if r < w16 {
                    chosen = (p, q);
                    break 'outer;
                }
                r -= w16;
            }
        }
        if outcome_wins(input, chosen.0, chosen.1) {
            won += 1;
        }
    }
    won as f64 / trials as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn v1_is_identity_and_u1_is_rx() {
        let (u, v) = constants_uv();
        assert_eq!(v[0], CliffordClass::IDENTITY);
        let rx = Mat::rotation(&Mat::pauli_x());
        assert!(u[0].matrix().equals_up_to_phase(&rx.reduced()));
    }

    #[test]
    fn distributions_sum_to_one() {
        for input in GameInput::all() {
            let d = game_distribution(input);
            let total = d.iter().flatten().fold(Dyadic::zero(), |a, b| a + *b);
            assert_eq!(total, Dyadic::one());
        }
    }

    #[test]
    fn table_entries() {
        assert_eq!(postprocess(1, (0, 0)), [1, 1, 1]);
        assert_eq!(postprocess(2, (1, 0)), [-1, -1, 1]);
        assert_eq!(postprocess_bob(2, (0, 1)), [1, -1, 1]);
        for k in 1..=3 {
            for v in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let x = postprocess(k, v);
                let y = postprocess_bob(k, v);
                assert_eq!(x[0] * x[1] * x[2], 1);
                assert_eq!(y[0] * y[1] * y[2], -1);
            }
        }
    }

    #[test]
    fn classical_values() {
        assert_eq!(magic_square_classical_value(), Ratio::new(8, 9));
        assert!(all_strategies().all(|s| strategy_wins(&s) <= 8));
        assert!(check_cor_main_ms());
        assert!(game_g_classical_value() < Ratio::from_integer(1));
    }

    #[test]
    fn coset_witnesses_are_distinct() {
        let f = [PauliClass::I; 24];
        let w = coset_witnesses(&f, &f);
        let set: std::collections::HashSet<_> = w.iter().collect();
        assert_eq!(set.len(), 16);
        for (u, v) in w {
            assert!(trace_is_zero(u.compose(v)));
        }
        assert!(gamma_bound_check(&f, &f).1);
    }

    #[test]
    fn in_image_fraction_is_nine_sixteenths() {
        assert_eq!(in_image_fraction(), Ratio::new(9, 16));
    }

    #[test]
    fn quantum_rate_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(quantum_strategy_winrate(10_000, &mut rng), 1.0);
    }

    #[test]
    fn win_on_support() {
        for input in GameInput::all() {
            let d = game_distribution(input);
            for p in PauliClass::ALL {
                for q in PauliClass::ALL {
                    if !d[p.code() as usize][q.code() as usize].is_zero() {
                        assert!(outcome_wins(input, p, q), "{input:?} {p} {q}");
                    }
                }
            }
        }
    }

    #[test]
    fn printed_label_order_has_losing_support() {
        let losing = GameInput::all().any(|i| {
            PauliClass::ALL.iter().any(|&p| {
                PauliClass::ALL.iter().any(|&q| {
                    !trace_is_zero(trace_product(i.alpha, p, i.beta, q)) && !outcome_wins(i, p, q)
                })
            })
        });
        assert!(losing);
    }
}
