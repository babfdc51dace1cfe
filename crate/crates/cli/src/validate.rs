//! Oracle suites behind `regionlab validate`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regionlab_core::oracle::{brute_force_projection, hausdorff, jittered_cmi, mc_cmi_estimate, JITTER};
use regionlab_core::signal::GAMMA_MAX;
use regionlab_core::{
    build_system, cmi, evaluate_bounds, icdms_best_gamma, icdms_frontier, icdms_point, project_polytope,
    BaselineChannel, ChannelParams, CodingParams, RateBounds, RatePair, SearchConfig, SignalSystem, Var, VarSet,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

pub const SUITES: [&str; 3] = ["cmi", "polytope", "baseline"];

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub seed: u64,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

fn check(name: &str, passed: bool, detail: Value) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

pub fn run_suite(suite: &str, seed: u64) -> Result<SuiteReport, CliError> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = match suite {
        "cmi" => cmi_suite(&mut rng)?,
        "polytope" => polytope_suite(&mut rng)?,
        "baseline" => baseline_suite()?,
        other => {
            return Err(CliError::Config(format!(
                "suite: unknown suite `{other}` (expected one of {})",
                SUITES.join(", ")
            )))
        }
    };
    Ok(SuiteReport {
        suite: suite.into(),
        passed: checks.iter().all(|c| c.passed),
        seed,
        seconds: start.elapsed().as_secs_f64(),
        checks,
    })
}

/// Channel and coding parameters drawn uniformly from their full ranges
/// (powers up to 10, gains up to 4, `gamma` up to [`GAMMA_MAX`]).
pub fn random_params(rng: &mut impl Rng) -> (ChannelParams, CodingParams) {
    let ch = ChannelParams {
        p1: rng.random_range(0.0..10.0),
        p2: rng.random_range(0.0..10.0),
        p3: rng.random_range(0.0..10.0),
        c21: rng.random_range(0.0..4.0),
        c12: rng.random_range(0.0..4.0),
    };
    let cp = CodingParams {
        alpha: rng.random_range(0.0..=1.0),
        beta: rng.random_range(0.0..=1.0),
        lam1: rng.random_range(0.0..=1.0),
        lam2: rng.random_range(0.0..=1.0),
        lam3: rng.random_range(0.0..=1.0),
        gamma1: rng.random_range(0.0..=GAMMA_MAX),
        gamma2: rng.random_range(0.0..=GAMMA_MAX),
    };
    (ch, cp)
}

pub fn random_system(rng: &mut impl Rng) -> SignalSystem {
    let (ch, cp) = random_params(rng);
    build_system(ch, cp).expect("sampled parameters are in range")
}

/// Three pairwise disjoint variable sets; the first two are nonempty.
pub fn random_triple(rng: &mut impl Rng) -> (VarSet, VarSet, VarSet) {
    loop {
        let mut sets = [VarSet::EMPTY; 3];
        for v in Var::ALL {
            // Each variable lands in x, y, z or nowhere.
            let k = rng.random_range(0..4);
            if k < 3 {
                sets[k] = sets[k].with(v);
            }
        }
        if !sets[0].is_empty() && !sets[1].is_empty() {
            return (sets[0], sets[1], sets[2]);
        }
    }
}

/// Splits `y` into two nonempty parts when it has at least two members.
fn split(y: VarSet, rng: &mut impl Rng) -> (VarSet, VarSet) {
    let mut a = VarSet::EMPTY;
    let mut b = VarSet::EMPTY;
    for v in y.iter() {
        if a.is_empty() || (rng.random_bool(0.5) && y.len() > a.len() + b.len() + 1) {
            a = a.with(v);
        } else {
            b = b.with(v);
        }
    }
    (a, b)
}

/// Largest chain-rule residual `|I(X;Y|Z) - I(X;Y1|Z) - I(X;Y2|Y1,Z)|` over
/// `queries` random queries with finite left-hand side.
pub fn chain_rule_residual(rng: &mut impl Rng, queries: usize) -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < queries {
        let sys = random_system(rng);
        let (x, y, z) = random_triple(rng);
        if y.len() < 2 {
            continue;
        }
        let (y1, y2) = split(y, rng);
        let whole = cmi(&sys, x, y, z)?;
        let parts = cmi(&sys, x, y1, z)? + cmi(&sys, x, y2, y1 | z)?;
        if whole.is_infinite() {
            if parts.is_infinite() {
                continue;
            }
            return Ok(f64::INFINITY);
        }
        worst = worst.max((whole - parts).abs());
        done += 1;
    }
    Ok(worst)
}

/// Change of the jittered value between jitter variances `1e-5` and `1e-7`.
pub fn jitter_sensitivity(sys: &SignalSystem, x: VarSet, y: VarSet, z: VarSet) -> f64 {
    (jittered_cmi(sys, x, y, z, 1e-5) - jittered_cmi(sys, x, y, z, 1e-7)).abs()
}

pub const MC_SAMPLES: usize = 200_000;

/// Largest gap between the exact value and its jittered counterpart for a
/// query to be compared against Monte-Carlo. Exact functional relations make
/// the jittered value a jitter-independent constant that differs from the
/// exact one, which no sensitivity test across jitter levels can reveal.
pub const JITTER_GAP: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct McQuery {
    pub query: String,
    pub exact: f64,
    pub jittered: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub jitter_sensitivity: f64,
}

pub struct Query {
    pub sys: SignalSystem,
    pub x: VarSet,
    pub y: VarSet,
    pub z: VarSet,
    pub exact: f64,
    pub jittered: f64,
}

impl Query {
    pub fn random(rng: &mut impl Rng) -> Result<Self, CliError> {
        let sys = random_system(rng);
        let (x, y, z) = random_triple(rng);
        let exact = cmi(&sys, x, y, z)?;
        let jittered = jittered_cmi(&sys, x, y, z, JITTER);
        Ok(Self {
            sys,
            x,
            y,
            z,
            exact,
            jittered,
        })
    }

    /// Whether the exact value is finite and the jitter does not move it.
    pub fn is_regular(&self) -> bool {
        self.exact.is_finite() && (self.jittered - self.exact).abs() <= JITTER_GAP
    }

    pub fn estimate(&self, n: usize, seed: u64) -> Result<McQuery, CliError> {
        let e = mc_cmi_estimate(&self.sys, self.x, self.y, self.z, n, seed)?;
        Ok(McQuery {
            query: format!("I({:?}; {:?} | {:?})", self.x, self.y, self.z),
            exact: self.exact,
            jittered: self.jittered,
            estimate: e.estimate,
            stderr: e.stderr,
            jitter_sensitivity: jitter_sensitivity(&self.sys, self.x, self.y, self.z),
        })
    }
}

/// Random query that passes [`Query::is_regular`].
pub fn regular_query(rng: &mut impl Rng) -> Result<Query, CliError> {
    loop {
        let q = Query::random(rng)?;
        if q.is_regular() {
            return Ok(q);
        }
    }
}

/// `count` regular queries with their Monte-Carlo estimates at `n` samples.
pub fn mc_queries(rng: &mut impl Rng, count: usize, n: usize) -> Result<Vec<McQuery>, CliError> {
    (0..count)
        .map(|_| {
            let q = regular_query(rng)?;
            q.estimate(n, rng.random())
        })
        .collect()
}

/// `count` unfiltered queries (finite jittered value only), compared against
/// the jittered analytic value rather than the exact one.
pub fn mc_jittered_queries(rng: &mut impl Rng, count: usize, n: usize) -> Result<Vec<McQuery>, CliError> {
    let mut out = Vec::new();
    while out.len() < count {
        let q = Query::random(rng)?;
        if q.jittered.is_finite() {
            out.push(q.estimate(n, rng.random())?);
        }
    }
    Ok(out)
}

fn cmi_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();

    let p2p = build_system(
        ChannelParams {
            p1: 6.0,
            p2: 0.0,
            p3: 0.0,
            c21: 0.0,
            c12: 0.0,
        },
        CodingParams::default(),
    )?;
    let v = cmi(&p2p, VarSet::of(&[Var::X1]), VarSet::of(&[Var::Y1]), VarSet::EMPTY)?;
    let want = 0.5 * 7f64.log2();
    checks.push(check(
        "point_to_point",
        (v - want).abs() <= 1e-9,
        json!({"value": v, "expected": want}),
    ));

    let worst = chain_rule_residual(rng, 100)?;
    checks.push(check(
        "chain_rule",
        worst < 1e-9,
        json!({"queries": 100, "max_residual": worst}),
    ));

    let mut degenerate = 0;
    for _ in 0..50 {
        let sys = random_system(rng);
        let i = cmi(
            &sys,
            VarSet::of(&[Var::S]),
            VarSet::of(&[Var::W, Var::Y1]),
            VarSet::of(&[Var::V, Var::T]),
        )?;
        let b4 = evaluate_bounds(&sys)?.b(4);
        if i != 0.0 || b4 != 0.0 {
            degenerate += 1;
        }
    }
    checks.push(check(
        "common_message_given_itself",
        degenerate == 0,
        json!({"systems": 50, "nonzero": degenerate}),
    ));

    let queries = mc_queries(rng, 30, MC_SAMPLES)?;
    let outside = queries
        .iter()
        .filter(|q| (q.estimate - q.exact).abs() > 3.0 * q.stderr)
        .count();
    checks.push(check(
        "monte_carlo_agreement",
        outside == 0,
        json!({"samples": MC_SAMPLES, "outside_3_stderr": outside, "queries": queries}),
    ));

    let queries = mc_jittered_queries(rng, 30, MC_SAMPLES)?;
    let outside = queries
        .iter()
        .filter(|q| (q.estimate - q.jittered).abs() > 3.0 * q.stderr)
        .count();
    checks.push(check(
        "monte_carlo_vs_jittered",
        outside == 0,
        json!({"samples": MC_SAMPLES, "jitter": JITTER, "outside_3_stderr": outside, "queries": queries}),
    ));

    let ratio = stderr_ratio(rng, 20)?;
    checks.push(check(
        "monte_carlo_stderr_scaling",
        (2.5..=3.8).contains(&ratio),
        json!({"n": [20_000, 200_000], "rms_stderr_ratio": ratio, "queries": 20}),
    ));
    Ok(checks)
}

/// Ratio of root-mean-square standard errors at `n = 2e4` and `n = 2e5` over
/// `count` queries, each estimated at both sizes. A single query's ratio is
/// too noisy (ten batches) to test on its own.
pub fn stderr_ratio(rng: &mut impl Rng, count: usize) -> Result<f64, CliError> {
    let (mut small, mut large) = (0.0, 0.0);
    for _ in 0..count {
        let q = regular_query(rng)?;
        let seed: u64 = rng.random();
        small += q.estimate(20_000, seed)?.stderr.powi(2);
        large += q.estimate(200_000, seed)?.stderr.powi(2);
    }
    Ok((small / large).sqrt())
}

fn random_bounds(rng: &mut impl Rng) -> RateBounds {
    let mut rb = RateBounds::new([0.0; 10]);
    for k in 4..=13 {
        let hi = if matches!(k, 4 | 5 | 7 | 8 | 9) { 3.0 } else { 6.0 };
        rb.set(k, rng.random_range(0.0..hi));
    }
    rb
}

pub const BRUTE_STEP: f64 = 0.05;

/// Hausdorff distances between the exact projection and the brute-force grid
/// for `count` random bound vectors, plus the number of grid points found
/// outside the exact region.
pub fn projection_distances(rng: &mut impl Rng, count: usize) -> Result<(Vec<f64>, usize), CliError> {
    let mut dists = Vec::new();
    let mut outside = 0;
    for _ in 0..count {
        let rb = random_bounds(rng);
        let exact = project_polytope(&rb);
        let grid = brute_force_projection(&rb, BRUTE_STEP)?;
        outside += grid
            .iter()
            .filter(|p| {
                let single = regionlab_core::convex_hull_upper(vec![regionlab_core::FrontierPoint::bare(p.r1, p.r2)]);
                !exact.contains(&single, 1e-9)
            })
            .count();
        dists.push(hausdorff(&exact, &grid));
    }
    Ok((dists, outside))
}

fn polytope_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let mut rb = RateBounds::new([100.0; 10]);
    rb.set(4, 1.0);
    rb.set(5, 0.0);
    rb.set(7, 2.0);
    rb.set(8, 1.5);
    let exact = project_polytope(&rb).pairs();
    let grid = brute_force_projection(&rb, 0.25)?;
    checks.push(check(
        "box",
        exact == vec![(3.0, 1.5)] && grid == vec![RatePair::new(3.0, 1.5)],
        json!({"exact": exact, "grid": grid}),
    ));

    let mut rb = RateBounds::new([1.0; 10]);
    rb.set(6, -1.0);
    let empty = project_polytope(&rb).is_empty() && brute_force_projection(&rb, BRUTE_STEP)?.is_empty();
    checks.push(check("empty", empty, json!({})));

    let (dists, outside) = projection_distances(rng, 20)?;
    let worst = dists.iter().copied().fold(0.0, f64::max);
    checks.push(check(
        "brute_force_hausdorff",
        worst <= 0.0708,
        json!({"step": BRUTE_STEP, "max_distance": worst, "distances": dists}),
    ));
    checks.push(check(
        "brute_force_inside_exact",
        outside == 0,
        json!({"points_outside": outside}),
    ));
    Ok(checks)
}

/// Largest deviation of the optimized baseline `r2max` from the clean
/// dirty-paper rate over `alpha = 0.1, ..., 1.0`.
pub fn dpc_deviation(ch: &BaselineChannel) -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for k in 1..=10 {
        let alpha = k as f64 / 10.0;
        let (_, p) = icdms_best_gamma(ch, alpha, GAMMA_MAX)?;
        worst = worst.max((p.r2max - 0.5 * (1.0 + alpha * ch.p2).log2()).abs());
    }
    Ok(worst)
}

pub fn fig3_baseline(p2: f64) -> BaselineChannel {
    BaselineChannel {
        p1: 6.0,
        p2,
        c12: 4.0,
        c21: 0.09,
    }
}

fn baseline_suite() -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for (name, p2) in [("dpc_setting_I", 6.0), ("dpc_setting_II", 3.0)] {
        let d = dpc_deviation(&fig3_baseline(p2))?;
        checks.push(check(name, d <= 1e-5, json!({"max_deviation": d})));
    }

    let cfg = SearchConfig::default();
    let f = icdms_frontier(&fig3_baseline(6.0), &cfg)?;
    let got = f.max_r1().unwrap_or(f64::NAN);
    let want = 0.5 * (1.0 + (6f64.sqrt() + 0.3 * 6f64.sqrt()).powi(2)).log2();
    checks.push(check(
        "max_r1_endpoint",
        (got - want).abs() <= 1e-6,
        json!({"value": got, "expected": want}),
    ));

    let f = icdms_frontier(&fig3_baseline(3.0), &cfg)?;
    let got = f.max_r2().unwrap_or(f64::NAN);
    checks.push(check(
        "max_r2_endpoint",
        (got - 1.0).abs() <= 1e-5,
        json!({"value": got, "expected": 1.0}),
    ));

    let silent = BaselineChannel {
        p2: 0.0,
        ..fig3_baseline(6.0)
    };
    let p = icdms_point(&silent, 0.5, 1.0, GAMMA_MAX)?;
    let want = 0.5 * 7f64.log2();
    checks.push(check(
        "silent_sender_two",
        (p.r1max - want).abs() <= 1e-9 && p.r2max == 0.0,
        json!({"r1max": p.r1max, "r2max": p.r2max}),
    ));

    let mute = BaselineChannel {
        p1: 0.0,
        ..fig3_baseline(6.0)
    };
    let f = icdms_frontier(&mute, &cfg)?;
    let vertical = f.max_r1().is_some_and(|r| r.abs() <= 1e-12) && f.max_r2().is_some_and(|r| (r - want).abs() <= 1e-5);
    checks.push(check("silent_sender_one", vertical, json!({"frontier": f.pairs()})));
    Ok(checks)
}
