//! Acceptance suite: one pass/fail line per criterion, nonzero exit if any
//! criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regionlab_cli::validate::{
    chain_rule_residual, dpc_deviation, fig3_baseline, mc_queries, projection_distances, random_params, MC_SAMPLES,
};
use regionlab_cli::{preset, DOMINANCE_TOL};
use regionlab_core::frontier::GridSteps;
use regionlab_core::*;

struct Outcome {
    passed: bool,
    detail: String,
}

type Criterion = fn() -> Outcome;

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn within(start: Instant, limit: Duration) -> (bool, String) {
    let t = start.elapsed();
    (
        t < limit,
        format!("{:.2} s (limit {} s)", t.as_secs_f64(), limit.as_secs()),
    )
}

fn cmi_exactness() -> Outcome {
    let start = Instant::now();
    let sys = build_system(
        ChannelParams {
            p1: 6.0,
            p2: 0.0,
            p3: 0.0,
            c21: 0.0,
            c12: 0.0,
        },
        CodingParams::default(),
    )
    .unwrap();
    let v = cmi_named(&sys, "X1", "Y1", "").unwrap();
    let err = (v - 0.5 * 7f64.log2()).abs();
    let residual = chain_rule_residual(&mut ChaCha8Rng::seed_from_u64(1), 100).unwrap();
    let (fast, time) = within(start, Duration::from_secs(1));
    outcome(
        err <= 1e-9 && residual < 1e-9 && fast,
        format!("|I - log2(7)/2| = {err:.1e}, max chain-rule residual {residual:.1e}, {time}"),
    )
}

fn degeneracy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad = 0;
    for _ in 0..50 {
        let (ch, cp) = random_params(&mut rng);
        let sys = build_system(ch, cp).unwrap();
        let i = cmi_named(&sys, "S", "W,Y1", "V,T").unwrap();
        let b4 = evaluate_bounds(&sys).unwrap().b(4);
        if i != 0.0 || b4 != 0.0 {
            bad += 1;
        }
    }
    outcome(
        bad == 0,
        format!("{bad} of 50 systems with nonzero I(S;W,Y1|V,T) or b4"),
    )
}

fn dpc_oracle() -> Outcome {
    let start = Instant::now();
    let d1 = dpc_deviation(&fig3_baseline(6.0)).unwrap();
    let d2 = dpc_deviation(&fig3_baseline(3.0)).unwrap();
    let (fast, time) = within(start, Duration::from_secs(10));
    outcome(
        d1 <= 1e-5 && d2 <= 1e-5 && fast,
        format!("max deviation {d1:.1e} (p2=6), {d2:.1e} (p2=3), {time}"),
    )
}

fn projection_oracle() -> Outcome {
    let start = Instant::now();
    let (dists, outside) = projection_distances(&mut ChaCha8Rng::seed_from_u64(4), 20).unwrap();
    let worst = dists.iter().copied().fold(0.0, f64::max);
    let (fast, time) = within(start, Duration::from_secs(120));
    outcome(
        worst <= 0.0708 && outside == 0 && fast,
        format!("max Hausdorff {worst:.4} over 20 bound vectors, {outside} grid points outside, {time}"),
    )
}

fn monte_carlo() -> Outcome {
    let start = Instant::now();
    let queries = mc_queries(&mut ChaCha8Rng::seed_from_u64(5), 30, MC_SAMPLES).unwrap();
    let z: Vec<f64> = queries
        .iter()
        .map(|q| (q.estimate - q.exact).abs() / q.stderr)
        .collect();
    let outside = z.iter().filter(|&&z| z > 3.0).count();
    let worst = z.iter().copied().fold(0.0, f64::max);
    let (fast, time) = within(start, Duration::from_secs(120));
    outcome(
        outside == 0 && fast,
        format!("{outside} of 30 queries beyond 3 stderr (largest {worst:.2}), {time}"),
    )
}

fn dominance() -> Outcome {
    let start = Instant::now();
    let mut passed = true;
    let mut parts = Vec::new();
    for name in ["fig3-I", "fig3-II"] {
        let s = preset(name).unwrap();
        let udc = optimize_frontier(s.budget(), &s.search).unwrap();
        let base = icdms_frontier(&s.baseline_channel(), &s.search).unwrap();
        let r = dominance_report(&udc, &base).unwrap();
        let ok = r.min_gap >= -DOMINANCE_TOL && r.max_gap >= 0.01;
        passed &= ok;
        parts.push(format!("{name}: min gap {:.6}, max gap {:.6}", r.min_gap, r.max_gap));
        if name == "fig3-I" {
            let want = 0.5 * (1.0 + (6f64.sqrt() + 0.3 * 6f64.sqrt()).powi(2)).log2();
            let got = base.max_r1().unwrap();
            passed &= (got - want).abs() <= 1e-6;
            parts.push(format!("baseline max R1 {got:.7} vs {want:.7}"));
        }
    }
    let (fast, time) = within(start, Duration::from_secs(300));
    parts.push(time);
    outcome(passed && fast, parts.join("; "))
}

fn run_cli(out: &Path, workers: usize) -> bool {
    Command::new(env!("CARGO_BIN_EXE_regionlab"))
        .args([
            "run",
            "--preset",
            "fig3-I",
            "--seed",
            "42",
            "--workers",
            &workers.to_string(),
            "--out",
        ])
        .arg(out)
        .output()
        .is_ok_and(|o| o.status.success())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    if !(run_cli(&a, 2) && run_cli(&b, 4)) {
        return outcome(false, "regionlab run failed".into());
    }
    let mut same = true;
    let mut parts = Vec::new();
    for file in ["udc_frontier.csv", "icdms_frontier.csv"] {
        let x = std::fs::read(a.join(file)).unwrap();
        let y = std::fs::read(b.join(file)).unwrap();
        same &= x == y;
        parts.push(format!(
            "{file} {} bytes {}",
            x.len(),
            if x == y { "identical" } else { "DIFFERENT" }
        ));
    }
    outcome(same, format!("workers 2 vs 4: {}", parts.join(", ")))
}

fn monotonicity() -> Outcome {
    let coarse = SearchConfig {
        grid_steps: GridSteps {
            rho: 3,
            alpha: 3,
            beta: 3,
            lam1: 3,
            lam2: 1,
            lam3: 1,
            gamma1: 3,
            gamma2: 3,
        },
        mu_count: 17,
        refine_iters: 100,
        refine_seeds: 3,
        ..SearchConfig::default()
    };
    // Every axis of this grid contains the matching axis of the coarse one.
    let fine = SearchConfig {
        grid_steps: GridSteps {
            rho: 5,
            alpha: 5,
            beta: 5,
            lam1: 5,
            lam2: 1,
            lam3: 1,
            gamma1: 4,
            gamma2: 4,
        },
        ..coarse.clone()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = Vec::new();
    let mut worst_power: f64 = f64::INFINITY;
    for i in 0..5 {
        let b = ChannelBudget {
            ptotal1: rng.random_range(1.0..8.0),
            p2: rng.random_range(1.0..8.0),
            c12: rng.random_range(0.0..4.0),
            c21: rng.random_range(0.0..1.0),
        };
        let bigger = ChannelBudget {
            ptotal1: b.ptotal1 * rng.random_range(1.1..2.0),
            p2: b.p2 * rng.random_range(1.1..2.0),
            ..b
        };
        if !coarse_frontier(b, &fine)
            .unwrap()
            .contains(&coarse_frontier(b, &coarse).unwrap(), 1e-12)
        {
            failures.push(format!("channel {i}: grid refinement"));
        }
        let small = optimize_frontier(b, &coarse).unwrap();
        let large = optimize_frontier(bigger, &coarse).unwrap();
        worst_power = worst_power.min(dominance_report(&large, &small).unwrap().min_gap);
        if !large.contains(&small, DOMINANCE_TOL) {
            failures.push(format!("channel {i}: power increase"));
        }
    }
    let detail = if failures.is_empty() {
        format!(
            "5 channels contained under refinement and under more power (smallest power gain {worst_power:.4} bits)"
        )
    } else {
        failures.join(", ")
    };
    outcome(failures.is_empty(), detail)
}

fn main() {
    let criteria: [(&str, Criterion); 8] = [
        ("cmi engine exactness", cmi_exactness),
        ("degeneracy handling", degeneracy),
        ("dirty-paper oracle", dpc_oracle),
        ("projection vs brute force", projection_oracle),
        ("monte-carlo agreement", monte_carlo),
        ("dominance over the baseline", dominance),
        ("determinism", determinism),
        ("monotonicity", monotonicity),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.passed {
            failed += 1;
        }
        println!(
            "criterion {} ({name}): {} - {}",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
