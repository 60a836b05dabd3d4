use std::io::Write;

use anyhow::{anyhow, bail, Context};
use colosseum::adversary_toolkit::{
    block_restriction_process, light_cones_structural, nc0_ceiling_experiment, switching_params, CeilingReport, CircuitDag,
    StubOracle, SwitchingParams,
};
use colosseum::geometry::{check_locality_with, colosseum_layout};
use colosseum::nonlocal_games::{
    check_cor_main_ms, game_distribution, game_g_classical_value, magic_square_classical_value, outcome_wins, GameInput,
};
use colosseum::pauli_clifford::EncodingMap;
use colosseum::seeds::cell_rng;
use colosseum::stabilizer_sim::run_telep_circuit;
use colosseum::surface_code::{threshold_scan, ScanRow};
use colosseum::telep_relation::{full_distribution, sample_ideal, verify, CliffordTuple, PauliTuple};
use colosseum::noise_model::NoiseModel;
use colosseum::PauliClass;
use rayon::prelude::*;
use serde::Serialize;

use crate::{
    AdversaryArgs, Command, DistributionArgs, Failure, GamesArgs, LocalityArgs, Outcome, RestrictionArgs, SampleArgs,
    SampleMethod, ScanArgs, VerifyArgs,
};

pub fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Verify(a) => verify_cmd(cmd, a),
        Command::Sample(a) => sample_cmd(a),
        Command::Distribution(a) => distribution_cmd(cmd, a),
        Command::Games(a) => games_cmd(cmd, a),
        Command::ThresholdScan(a) => scan_cmd(a),
        Command::LocalityCheck(a) => locality_cmd(cmd, a),
        Command::Restrictions(a) => restrictions_cmd(cmd, a),
        Command::Adversary(a) => adversary_cmd(cmd, a),
        Command::Run(a) => dispatch(&crate::config::load(&a.config)?),
    }
}

/// JSON report: artifact version, the command as configured, the result.
fn emit_json(cmd: &Command, result: impl Serialize) -> Outcome {
    #[derive(Serialize)]
    struct RunReport<'a, T> {
        version: &'static str,
        config: &'a Command,
        result: T,
    }
    let report = RunReport { version: env!("CARGO_PKG_VERSION"), config: cmd, result };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn assert_that(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(Failure::Assertion(msg()))
    }
}

fn parse_count(s: &str) -> anyhow::Result<u64> {
    let x: f64 = s.parse().with_context(|| format!("not a number: {s:?}"))?;
    if !(x >= 1.0 && x.fract() == 0.0 && x <= 1e15) {
        bail!("count must be a positive integer, got {s}");
    }
    Ok(x as u64)
}

fn cliffords(s: &str) -> anyhow::Result<CliffordTuple> {
    let c = CliffordTuple::parse(s)?;
    if c.is_empty() {
        bail!("no Cliffords given");
    }
    Ok(c)
}

/// `lo..hi` gives `points` log-spaced values; otherwise a comma list.
pub fn parse_p_grid(s: &str, points: usize) -> anyhow::Result<Vec<f64>> {
    let ps: Vec<f64> = match s.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi): (f64, f64) = (lo.trim().parse()?, hi.trim().parse()?);
            if !(lo > 0.0 && hi >= lo) {
                bail!("grid bounds must satisfy 0 < lo <= hi");
            }
            if points < 2 {
                bail!("a range needs at least 2 points");
            }
            (0..points).map(|k| lo * (hi / lo).powf(k as f64 / (points - 1) as f64)).collect()
        }
        None => s.split(',').map(|t| t.trim().parse::<f64>()).collect::<Result<_, _>>()?,
    };
    if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
        bail!("noise strengths must lie in [0, 1]");
    }
    Ok(ps)
}

fn verify_cmd(cmd: &Command, a: &VerifyArgs) -> Outcome {
    let c = cliffords(&a.cliffords)?;
    let p = PauliTuple::parse(&a.paulis)?;
    if let Some(n) = a.n {
        if c.len() != n || p.len() != n {
            return Err(anyhow!("--n {n} but got {} Cliffords and {} Paulis", c.len(), p.len()).into());
        }
    }
    let out = verify(&c, &p)?;
    #[derive(Serialize)]
    struct Verdict {
        cliffords: String,
        paulis: String,
        valid: bool,
        probability: String,
    }
    emit_json(cmd, Verdict { cliffords: c.to_string(), paulis: p.to_string(), valid: out.valid, probability: out.probability().to_string() })?;
    match a.expect_valid {
        Some(want) => assert_that(want == out.valid, || format!("expected valid = {want}, got {}", out.valid)),
        None => Ok(()),
    }
}

fn sample_cmd(a: &SampleArgs) -> Outcome {
    let c = cliffords(&a.cliffords)?;
    if a.method == SampleMethod::Ideal && a.noise.is_some() {
        return Err(anyhow!("--noise needs --method circuit").into());
    }
    let noise = a.noise.map(NoiseModel::iid);
    let mut rng = cell_rng(a.seed, 0);
    let mut invalid = 0u64;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for _ in 0..a.shots {
        let p = match a.method {
            SampleMethod::Ideal => sample_ideal(&c, &mut rng),
            SampleMethod::Circuit => run_telep_circuit(&c, noise.as_ref(), &mut rng),
        };
        if !verify(&c, &p)?.valid {
            invalid += 1;
        }
        writeln!(out, "{p}")?;
    }
    assert_that(!a.check || invalid == 0, || format!("{invalid} of {} samples are outside the relation", a.shots))
}

fn distribution_cmd(cmd: &Command, a: &DistributionArgs) -> Outcome {
    let c = cliffords(&a.cliffords)?;
    let dist = full_distribution(&c)?;
    let table: std::collections::BTreeMap<String, String> = dist
        .iter()
        .filter(|(_, pr)| a.all || !pr.is_zero())
        .map(|(p, pr)| (p.to_string(), pr.to_string()))
        .collect();
    emit_json(cmd, table)
}

fn games_cmd(cmd: &Command, a: &GamesArgs) -> Outcome {
    #[derive(Serialize)]
    struct Games {
        quantum_wins_on_support: bool,
        magic_square_classical_value: Option<String>,
        variant_classical_value: Option<String>,
        every_strategy_pair_has_zero_trace_witness: Option<bool>,
    }
    let quantum = GameInput::all().all(|i| {
        let dist = game_distribution(i);
        PauliClass::ALL.into_iter().all(|p| {
            PauliClass::ALL.into_iter().all(|q| dist[p.code() as usize][q.code() as usize].is_zero() || outcome_wins(i, p, q))
        })
    });
    let mut g = Games {
        quantum_wins_on_support: quantum,
        magic_square_classical_value: None,
        variant_classical_value: None,
        every_strategy_pair_has_zero_trace_witness: None,
    };
    if a.brute_force {
        g.magic_square_classical_value = Some(magic_square_classical_value().to_string());
        g.variant_classical_value = Some(game_g_classical_value().to_string());
        g.every_strategy_pair_has_zero_trace_witness = Some(check_cor_main_ms());
    }
    let ok = quantum
        && g.magic_square_classical_value.as_deref().map_or(true, |v| v == "8/9")
        && g.every_strategy_pair_has_zero_trace_witness.unwrap_or(true);
    emit_json(cmd, g)?;
    assert_that(!a.check || ok, || "game values differ from 8/9 or a strategy pair lacks a witness".into())
}

/// `(d, i)` pairs where the rate at the larger `p` lies CI-separated above
/// the rate at the smaller one.
pub fn monotonicity_violations(rows: &[ScanRow]) -> Vec<(usize, f64, f64)> {
    let mut out = Vec::new();
    let mut ds: Vec<usize> = rows.iter().map(|r| r.d).collect();
    ds.dedup();
    for d in ds {
        let mut cells: Vec<&ScanRow> = rows.iter().filter(|r| r.d == d).collect();
        cells.sort_by(|a, b| a.p.total_cmp(&b.p));
        for w in cells.windows(2) {
            if w[1].wilson_lo > w[0].wilson_hi {
                out.push((d, w[0].p, w[1].p));
            }
        }
    }
    out
}

fn scan_cmd(a: &ScanArgs) -> Outcome {
    let ds: Vec<usize> = a.d.split(',').map(|t| t.trim().parse()).collect::<Result<_, _>>().context("--d")?;
    let ps = parse_p_grid(&a.p, a.points)?;
    let trials = parse_count(&a.trials)?;
    let rows = threshold_scan(a.n, &ds, &ps, trials, a.seed)?;
    let sink: Box<dyn Write> = match &a.out {
        Some(path) => Box::new(std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    let bad = monotonicity_violations(&rows);
    assert_that(!a.check_monotone || bad.is_empty(), || format!("rate increases with p (d, p_lo, p_hi): {bad:?}"))
}

fn locality_cmd(cmd: &Command, a: &LocalityArgs) -> Outcome {
    let layout = colosseum_layout(a.n, a.d, a.delta_out, a.delta_r)?;
    let report = check_locality_with(&layout, a.kappa, a.occupancy_bound);
    emit_json(cmd, report)?;
    assert_that(report.pass, || {
        format!("max edge {:.4} and occupancy {} at κ = {}", report.max_edge_length, report.max_ball_occupancy, a.kappa)
    })
}

#[derive(Serialize)]
struct RestrictionSummary {
    params: SwitchingParams,
    runs: u64,
    mean_rho_free_blocks: f64,
    binomial_mean: f64,
    mean_tolerance: f64,
    mean_rho_active_bits: f64,
    mean_xi_free_blocks: f64,
    bound_violations: u64,
    min_slack: f64,
}

fn restrictions_cmd(cmd: &Command, a: &RestrictionArgs) -> Outcome {
    let params = match (a.p_star, a.size, a.depth) {
        (Some(p), None, None) if (0.0..=1.0).contains(&p) => SwitchingParams::with_p_star(a.n, p),
        (None, Some(s), Some(d)) if s > 1.0 && d >= 1 => switching_params(a.n, s, d),
        _ => return Err(anyhow!("give either --p-star in [0, 1], or --size > 1 with --depth >= 1").into()),
    };
    if params.p_star > 1.0 {
        return Err(anyhow!("derived p_* = {} exceeds 1; increase n or s", params.p_star).into());
    }
    let diags: Vec<_> =
        (0..a.runs).into_par_iter().map(|r| block_restriction_process(&params, &StubOracle, &mut cell_rng(a.seed, r)).1).collect();
    let runs = a.runs as f64;
    let q = params.p_star.powi(5);
    let slack = |d: &colosseum::adversary_toolkit::ProcessDiagnostics| {
        d.xi_free_blocks as f64 - (d.rho_free_blocks as f64 - 2.0 * params.t)
    };
    let summary = RestrictionSummary {
        params,
        runs: a.runs,
        mean_rho_free_blocks: diags.iter().map(|d| d.rho_free_blocks as f64).sum::<f64>() / runs,
        binomial_mean: a.n as f64 * q,
        mean_tolerance: 3.0 * (a.n as f64 * q * (1.0 - q) / runs).sqrt(),
        mean_rho_active_bits: diags.iter().map(|d| d.rho_active_bits as f64).sum::<f64>() / runs,
        mean_xi_free_blocks: diags.iter().map(|d| d.xi_free_blocks as f64).sum::<f64>() / runs,
        bound_violations: diags.iter().filter(|d| slack(d) < 0.0).count() as u64,
        min_slack: diags.iter().map(slack).fold(f64::INFINITY, f64::min),
    };
    let ok = summary.bound_violations == 0
        && (summary.mean_rho_free_blocks - summary.binomial_mean).abs() <= summary.mean_tolerance.max(1e-12);
    let msg = format!(
        "{} runs violate N(ξ) ≥ N(ρ) − 2t, or mean N(ρ) = {} is outside {} ± {}",
        summary.bound_violations, summary.mean_rho_free_blocks, summary.binomial_mean, summary.mean_tolerance
    );
    emit_json(cmd, summary)?;
    assert_that(ok, || msg)
}

#[derive(Serialize)]
struct CeilingRow {
    dag: u64,
    trials: u64,
    successes: u64,
    rate: f64,
    wilson_lo: f64,
    wilson_hi: f64,
    pair_j: Option<usize>,
    pair_k: Option<usize>,
    witness_min_failures: Option<usize>,
    witness_contexts_with_failure: Option<usize>,
}

impl CeilingRow {
    fn new(dag: u64, r: &CeilingReport) -> Self {
        let w = r.witness.as_ref();
        Self {
            dag,
            trials: r.trials,
            successes: r.successes,
            rate: r.rate,
            wilson_lo: r.wilson_lo,
            wilson_hi: r.wilson_hi,
            pair_j: w.map(|w| w.j),
            pair_k: w.map(|w| w.k),
            witness_min_failures: w.map(|w| w.min_failures),
            witness_contexts_with_failure: w.map(|w| w.contexts_with_failure),
        }
    }
}

/// Success allowed for a circuit with a non-signaling pair: `80/81 + 3σ`.
pub fn ceiling_limit(trials: u64) -> f64 {
    let c = 80.0 / 81.0;
    c + 3.0 * (c * (1.0 - c) / trials as f64).sqrt()
}

fn adversary_cmd(cmd: &Command, a: &AdversaryArgs) -> Outcome {
    if a.survey {
        let depth = ((0.3 * (a.n as f64).log2()).floor() as usize).max(1);
        if a.n < a.fan_in {
            return Err(anyhow!("--n must be at least --fan-in").into());
        }
        let found = (0..a.dags)
            .into_par_iter()
            .filter(|&s| {
                let dag = CircuitDag::random_layered(a.n, a.n, depth, a.fan_in, &mut cell_rng(a.seed, s));
                light_cones_structural(&dag).nonsignaling_pair().is_some()
            })
            .count() as u64;
        #[derive(Serialize)]
        struct Survey {
            depth: usize,
            dags: u64,
            with_pair: u64,
        }
        emit_json(cmd, Survey { depth, dags: a.dags, with_pair: found })?;
        return assert_that(found * 100 >= a.dags * 99, || format!("only {found} of {} circuits have a pair", a.dags));
    }
    let trials = parse_count(&a.trials)?;
    let reports: Vec<(u64, CeilingReport)> = match &a.dag {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let dag: CircuitDag = serde_json::from_str(&text).context("circuit JSON")?;
            dag.validate()?;
            if dag.n_in % 5 != 0 {
                return Err(anyhow!("circuit has {} inputs, not a multiple of 5", dag.n_in).into());
            }
            let mut rng = cell_rng(a.seed, 0);
            let enc = EncodingMap::random(&mut rng);
            vec![(0, nc0_ceiling_experiment(&dag, dag.n_in / 5, &enc, trials, &mut rng)?)]
        }
        None => {
            if a.n == 0 || !(1..=6).contains(&a.fan_in) || a.depth == 0 {
                return Err(anyhow!("need n >= 1, depth >= 1 and fan-in in 1..=6").into());
            }
            (0..a.dags)
                .into_par_iter()
                .map(|s| {
                    let mut rng = cell_rng(a.seed, s);
                    let dag = CircuitDag::random_layered(5 * a.n, 2 * a.n, a.depth, a.fan_in, &mut rng);
                    let enc = EncodingMap::random(&mut rng);
                    nc0_ceiling_experiment(&dag, a.n, &enc, trials, &mut rng).map(|r| (s, r))
                })
                .collect::<Result<_, _>>()?
        }
    };
    let mut w = csv::Writer::from_writer(std::io::stdout());
    for (s, r) in &reports {
        w.serialize(CeilingRow::new(*s, r))?;
    }
    w.flush()?;
    let limit = ceiling_limit(trials);
    let over: Vec<u64> = reports.iter().filter(|(_, r)| r.witness.is_some() && r.rate > limit).map(|(s, _)| *s).collect();
    assert_that(over.is_empty(), || format!("circuits {over:?} with a non-signaling pair exceed {limit:.6}"))
}
