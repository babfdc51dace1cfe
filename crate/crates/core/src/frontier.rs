//! Pareto frontiers in the `(R1, R2)` plane: time-sharing hull, comparison,
//! and the parameter search that builds the cooperative frontier.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::region::{evaluate_bounds, project_polytope, RateBounds, RatePolytope, SUBRATES};
use crate::signal::{build_system_with_limit, ChannelParams, CodingParams, GAMMA_MAX};
use crate::simplex::{self, NelderMeadOptions};

/// A rate pair in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
}

impl RatePair {
    pub fn new(r1: f64, r2: f64) -> Self {
        Self { r1, r2 }
    }
}

/// Coding parameters of the cooperative scheme, together with the share `rho`
/// of sender 1's budget kept at sender 1 (the rest goes to the relay).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UdcParams {
    pub rho: f64,
    pub coding: CodingParams,
}

impl UdcParams {
    pub const DIM: usize = 8;

    pub fn to_array(&self) -> [f64; Self::DIM] {
        let c = &self.coding;
        [self.rho, c.alpha, c.beta, c.lam1, c.lam2, c.lam3, c.gamma1, c.gamma2]
    }

    pub fn from_slice(x: &[f64]) -> Self {
        Self {
            rho: x[0],
            coding: CodingParams {
                alpha: x[1],
                beta: x[2],
                lam1: x[3],
                lam2: x[4],
                lam3: x[5],
                gamma1: x[6],
                gamma2: x[7],
            },
        }
    }

    pub fn channel(&self, budget: &ChannelBudget) -> ChannelParams {
        ChannelParams {
            p1: self.rho * budget.ptotal1,
            p2: budget.p2,
            p3: (1.0 - self.rho) * budget.ptotal1,
            c21: budget.c21,
            c12: budget.c12,
        }
    }
}

/// How a frontier point was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum Certificate {
    #[default]
    None,
    /// Sub-rate vertex `(R11, R1R, R22, R2P)` of a single polytope.
    Split([f64; SUBRATES]),
    /// Operating point of the cooperative scheme and its sub-rate vertex.
    Cooperative { params: UdcParams, split: [f64; SUBRATES] },
    /// Operating point of the baseline scheme.
    Baseline { alpha: f64, gamma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub rate: RatePair,
    pub cert: Certificate,
}

impl FrontierPoint {
    pub fn bare(r1: f64, r2: f64) -> Self {
        Self {
            rate: RatePair::new(r1, r2),
            cert: Certificate::None,
        }
    }
}

/// Bookkeeping from the search that produced a frontier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SearchStats {
    pub evaluations: u64,
    /// Operating points whose evaluation failed and were left out.
    pub skipped: u64,
}

/// Upper-right boundary of a convex, downward-closed region of the
/// nonnegative quadrant, stored as its vertices with strictly increasing `r1`
/// and strictly decreasing `r2`. The region itself is every pair dominated by
/// a convex combination of the vertices.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Frontier {
    pub points: Vec<FrontierPoint>,
    pub stats: SearchStats,
}

impl Frontier {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.rate.r1, p.rate.r2)).collect()
    }

    pub fn max_r1(&self) -> Option<f64> {
        self.points.last().map(|p| p.rate.r1)
    }

    pub fn max_r2(&self) -> Option<f64> {
        self.points.first().map(|p| p.rate.r2)
    }

    /// Largest `r1` in the region at level `r2`, or `None` above the frontier.
    pub fn r1_at(&self, r2: f64) -> Option<f64> {
        let first = self.points.first()?;
        let last = self.points.last()?;
        if r2 > first.rate.r2 || r2 < 0.0 {
            return None;
        }
        if r2 <= last.rate.r2 {
            return Some(last.rate.r1);
        }
        let k = self.points.partition_point(|p| p.rate.r2 >= r2);
        // points[k-1].r2 >= r2 > points[k].r2
        let (a, b) = (self.points[k - 1].rate, self.points[k].rate);
        let t = (a.r2 - r2) / (a.r2 - b.r2);
        Some(a.r1 + t * (b.r1 - a.r1))
    }

    /// Whether every vertex of `other` lies in this region, up to `tol` in each
    /// coordinate.
    pub fn contains(&self, other: &Frontier, tol: f64) -> bool {
        let Some(top) = self.max_r2() else {
            return other.is_empty();
        };
        other.points.iter().all(|q| {
            if q.rate.r2 > top + tol {
                return false;
            }
            let r2 = q.rate.r2.clamp(0.0, top);
            matches!(self.r1_at(r2), Some(r1) if q.rate.r1 <= r1 + tol)
        })
    }

    /// Checks the frontier invariants: finite nonnegative coordinates, `r1`
    /// strictly increasing, `r2` strictly decreasing.
    pub fn is_well_formed(&self) -> bool {
        let finite = self
            .points
            .iter()
            .all(|p| p.rate.r1.is_finite() && p.rate.r2.is_finite() && p.rate.r1 >= 0.0 && p.rate.r2 >= 0.0);
        finite
            && self
                .points
                .windows(2)
                .all(|w| w[0].rate.r1 < w[1].rate.r1 && w[0].rate.r2 > w[1].rate.r2)
    }
}

fn cross(o: RatePair, a: RatePair, b: RatePair) -> f64 {
    (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1)
}

/// Pareto-maximal vertices of the convex hull of `points`, i.e. the frontier
/// reachable by time-sharing. Negative coordinates are clamped to zero and
/// non-finite points are ignored.
pub fn convex_hull_upper(points: Vec<FrontierPoint>) -> Frontier {
    let mut pts: Vec<FrontierPoint> = points
        .into_iter()
        .filter(|p| p.rate.r1.is_finite() && p.rate.r2.is_finite())
        .map(|mut p| {
            p.rate.r1 = p.rate.r1.max(0.0);
            p.rate.r2 = p.rate.r2.max(0.0);
            p
        })
        .collect();
    if pts.is_empty() {
        return Frontier::default();
    }
    // r1 ascending, r2 descending; stable so equal pairs keep input order.
    pts.sort_by(|a, b| a.rate.r1.total_cmp(&b.rate.r1).then(b.rate.r2.total_cmp(&a.rate.r2)));

    // The chain starts at the highest point (rightmost among ties).
    let top_r2 = pts.iter().map(|p| p.rate.r2).fold(f64::NEG_INFINITY, f64::max);
    let start = pts.iter().rposition(|p| p.rate.r2 == top_r2).expect("nonempty");

    let mut hull: Vec<FrontierPoint> = Vec::new();
    let mut last_r1 = f64::NEG_INFINITY;
    for p in &pts[start..] {
        // Only the highest point at each r1 can be on the upper chain.
        if p.rate.r1 == last_r1 {
            continue;
        }
        last_r1 = p.rate.r1;
        while hull.len() >= 2 && cross(hull[hull.len() - 2].rate, hull[hull.len() - 1].rate, p.rate) >= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    Frontier {
        points: hull,
        stats: SearchStats::default(),
    }
}

/// Pointwise comparison of two frontiers on a shared `R2` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub r2_grid: Vec<f64>,
    /// `R1_a(r2) - R1_b(r2)` at each grid level.
    pub gaps: Vec<f64>,
    pub max_gap: f64,
    pub min_gap: f64,
    pub r2_max_a: f64,
    pub r2_max_b: f64,
    /// Set when the two frontiers reach different `R2` maxima and the grid was
    /// restricted to the common range.
    pub overlap_restricted: bool,
}

pub const DOMINANCE_SAMPLES: usize = 201;

pub fn dominance_report(a: &Frontier, b: &Frontier) -> Result<DominanceReport> {
    dominance_report_with(a, b, DOMINANCE_SAMPLES)
}

/// [`dominance_report`] with a custom number of `R2` levels (at least 2).
pub fn dominance_report_with(a: &Frontier, b: &Frontier, samples: usize) -> Result<DominanceReport> {
    let (Some(top_a), Some(top_b)) = (a.max_r2(), b.max_r2()) else {
        return Err(Error::EmptyFrontier);
    };
    let samples = samples.max(2);
    let top = top_a.min(top_b);
    let r2_grid: Vec<f64> = (0..samples).map(|k| top * k as f64 / (samples - 1) as f64).collect();
    let gaps: Vec<f64> = r2_grid
        .iter()
        .map(|&r2| {
            let ra = a.r1_at(r2.min(top_a)).expect("level inside range");
            let rb = b.r1_at(r2.min(top_b)).expect("level inside range");
            ra - rb
        })
        .collect();
    let max_gap = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(DominanceReport {
        r2_grid,
        gaps,
        max_gap,
        min_gap,
        r2_max_a: top_a,
        r2_max_b: top_b,
        overlap_restricted: (top_a - top_b).abs() > 1e-9,
    })
}

/// Power budget of the cooperative channel: `ptotal1` is split between sender
/// 1 and the relaying receiver, `p2` belongs to sender 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelBudget {
    pub ptotal1: f64,
    pub p2: f64,
    pub c12: f64,
    pub c21: f64,
}

impl ChannelBudget {
    pub fn validate(&self) -> Result<()> {
        const NONNEG: &str = "finite and >= 0";
        check_range("ptotal1", self.ptotal1, 0.0, f64::MAX, NONNEG)?;
        check_range("p2", self.p2, 0.0, f64::MAX, NONNEG)?;
        check_range("c12", self.c12, 0.0, f64::MAX, NONNEG)?;
        check_range("c21", self.c21, 0.0, f64::MAX, NONNEG)
    }
}

/// Coarse grid sizes per search coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSteps {
    pub rho: usize,
    pub alpha: usize,
    pub beta: usize,
    pub lam1: usize,
    pub lam2: usize,
    pub lam3: usize,
    pub gamma1: usize,
    pub gamma2: usize,
}

impl Default for GridSteps {
    fn default() -> Self {
        Self {
            rho: 9,
            alpha: 9,
            beta: 9,
            lam1: 9,
            // Every term with U or W also has T on the same side or in the
            // condition, so their T components cannot move any bound.
            lam2: 1,
            lam3: 1,
            gamma1: 7,
            gamma2: 7,
        }
    }
}

impl GridSteps {
    fn as_array(&self) -> [usize; UdcParams::DIM] {
        [
            self.rho,
            self.alpha,
            self.beta,
            self.lam1,
            self.lam2,
            self.lam3,
            self.gamma1,
            self.gamma2,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub grid_steps: GridSteps,
    /// Nelder–Mead iterations per refinement run.
    pub refine_iters: usize,
    /// Best coarse points refined per weighting direction.
    pub refine_seeds: usize,
    /// Number of weights `mu` in `[0, 1]` for `mu*R1 + (1-mu)*R2`.
    pub mu_count: usize,
    pub seed: u64,
    pub gamma_max: f64,
    /// Grid size for the baseline's `alpha` sweep.
    pub baseline_alpha_steps: usize,
    /// Worker threads; `None` uses the global pool. Results do not depend on it.
    pub workers: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_steps: GridSteps::default(),
            refine_iters: 200,
            refine_seeds: 5,
            mu_count: 65,
            seed: 42,
            gamma_max: GAMMA_MAX,
            baseline_alpha_steps: 201,
            workers: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mu_count < 2 {
            return Err(Error::Config(format!("mu_count must be >= 2, got {}", self.mu_count)));
        }
        if self.refine_iters < 1 || self.refine_seeds < 1 || self.baseline_alpha_steps < 1 {
            return Err(Error::Config(
                "refine_iters, refine_seeds and baseline_alpha_steps must be >= 1".into(),
            ));
        }
        if self.grid_steps.as_array().iter().any(|&n| n < 1) {
            return Err(Error::Config("every grid step count must be >= 1".into()));
        }
        if !(self.gamma_max.is_finite() && self.gamma_max > 0.0) {
            return Err(Error::Config(format!(
                "gamma_max must be finite and > 0, got {}",
                self.gamma_max
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        Ok(())
    }

    /// Runs `f` on a pool of `workers` threads when requested.
    pub(crate) fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.workers {
            None => Ok(f()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }

    pub fn mus(&self) -> Vec<f64> {
        let n = self.mu_count;
        (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
    }
}

/// `n` evenly spaced values on `[lo, hi]`; a single point sits at `lo`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Zero followed by `n - 1` log-spaced values from `gamma_max / 1000` to
/// `gamma_max`. The grid for `n` contains the grid for `m` whenever `m - 2`
/// divides `n - 2`.
pub fn gamma_grid(gamma_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        2 => vec![0.0, gamma_max],
        _ => std::iter::once(0.0)
            .chain((0..n - 1).map(|k| {
                let e = -3.0 + 3.0 * k as f64 / (n - 2) as f64;
                gamma_max * 10f64.powf(e)
            }))
            .collect(),
    }
}

fn axes(cfg: &SearchConfig) -> [Vec<f64>; UdcParams::DIM] {
    let g = &cfg.grid_steps;
    [
        linear_grid(0.0, 1.0, g.rho),
        linear_grid(0.0, 1.0, g.alpha),
        linear_grid(0.0, 1.0, g.beta),
        linear_grid(0.0, 1.0, g.lam1),
        linear_grid(0.0, 1.0, g.lam2),
        linear_grid(0.0, 1.0, g.lam3),
        gamma_grid(cfg.gamma_max, g.gamma1),
        gamma_grid(cfg.gamma_max, g.gamma2),
    ]
}

fn grid_point(axes: &[Vec<f64>; UdcParams::DIM], mut idx: usize) -> [f64; UdcParams::DIM] {
    let mut x = [0.0; UdcParams::DIM];
    for d in (0..UdcParams::DIM).rev() {
        let n = axes[d].len();
        x[d] = axes[d][idx % n];
        idx /= n;
    }
    x
}

/// Bounds of the cooperative scheme at one operating point.
pub fn point_bounds(budget: &ChannelBudget, params: &UdcParams, gamma_max: f64) -> Result<RateBounds> {
    check_range("rho", params.rho, 0.0, 1.0, "within [0, 1]")?;
    let sys = build_system_with_limit(params.channel(budget), params.coding, gamma_max)?;
    evaluate_bounds(&sys)
}

/// Projected region at one operating point, with certificates attached.
pub fn point_frontier(budget: &ChannelBudget, params: &UdcParams, gamma_max: f64) -> Result<(RateBounds, Frontier)> {
    let rb = point_bounds(budget, params, gamma_max)?;
    let mut f = project_polytope(&rb);
    for p in &mut f.points {
        if let Certificate::Split(split) = p.cert {
            p.cert = Certificate::Cooperative { params: *params, split };
        }
    }
    Ok((rb, f))
}

/// Re-evaluates a cooperative certificate from scratch and returns the
/// constraint violation of its split together with the distance between the
/// recorded rate pair and the one the split implies.
pub fn check_certificate(budget: &ChannelBudget, point: &FrontierPoint, gamma_max: f64) -> Result<(f64, f64)> {
    let Certificate::Cooperative { params, split } = point.cert else {
        return Err(Error::Config("point carries no cooperative certificate".into()));
    };
    let rb = point_bounds(budget, &params, gamma_max)?;
    let violation = RatePolytope::from_bounds(&rb).max_violation(&split);
    let d1 = (split[0] + split[1] - point.rate.r1).abs();
    let d2 = (split[2] + split[3] - point.rate.r2).abs();
    Ok((violation, d1.max(d2)))
}

/// Weighted-sum score of one operating point. Empty regions score by their
/// most negative bound so the local search can climb back to feasibility.
fn score(rb: &RateBounds, f: &Frontier, mu: f64) -> f64 {
    if f.is_empty() {
        let worst = rb.bounds.iter().copied().fold(f64::INFINITY, f64::min);
        return if worst.is_finite() { worst.min(0.0) - 1.0 } else { -1e3 };
    }
    f.points
        .iter()
        .map(|p| mu * p.rate.r1 + (1.0 - mu) * p.rate.r2)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Candidate seed: score, then grid index as a deterministic tie-break.
#[derive(Clone, Copy)]
struct Seed {
    score: f64,
    index: usize,
}

fn better(a: &Seed, b: &Seed) -> std::cmp::Ordering {
    b.score.total_cmp(&a.score).then(a.index.cmp(&b.index))
}

fn keep_best(list: &mut Vec<Seed>, k: usize) {
    list.sort_by(better);
    list.truncate(k);
}

struct ChunkResult {
    points: Vec<FrontierPoint>,
    seeds: Vec<Vec<Seed>>,
    evaluations: u64,
    skipped: u64,
}

const CHUNK: usize = 256;

fn coarse_pass(budget: &ChannelBudget, cfg: &SearchConfig, keep: usize) -> (Frontier, Vec<Vec<Seed>>) {
    let axes = axes(cfg);
    let total: usize = axes.iter().map(Vec::len).product();
    let mus = cfg.mus();
    let chunks = total.div_ceil(CHUNK);

    let results: Vec<ChunkResult> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut res = ChunkResult {
                points: Vec::new(),
                seeds: vec![Vec::new(); mus.len()],
                evaluations: 0,
                skipped: 0,
            };
            for index in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let params = UdcParams::from_slice(&grid_point(&axes, index));
                res.evaluations += 1;
                let Ok((rb, f)) = point_frontier(budget, &params, cfg.gamma_max) else {
                    res.skipped += 1;
                    continue;
                };
                for (m, &mu) in mus.iter().enumerate() {
                    let seeds = &mut res.seeds[m];
                    seeds.push(Seed {
                        score: score(&rb, &f, mu),
                        index,
                    });
                    if seeds.len() > 4 * keep {
                        keep_best(seeds, keep);
                    }
                }
                res.points.extend(f.points);
            }
            for s in &mut res.seeds {
                keep_best(s, keep);
            }
            res.points = convex_hull_upper(std::mem::take(&mut res.points)).points;
            res
        })
        .collect();

    let mut points = Vec::new();
    let mut seeds = vec![Vec::new(); mus.len()];
    let mut stats = SearchStats::default();
    for r in results {
        points.extend(r.points);
        for (all, part) in seeds.iter_mut().zip(r.seeds) {
            all.extend(part);
        }
        stats.evaluations += r.evaluations;
        stats.skipped += r.skipped;
    }
    for s in &mut seeds {
        keep_best(s, keep);
    }
    let mut frontier = convex_hull_upper(points);
    frontier.stats = stats;
    (frontier, seeds)
}

/// Union of the projected regions over the coarse grid only, hulled.
pub fn coarse_frontier(budget: ChannelBudget, cfg: &SearchConfig) -> Result<Frontier> {
    budget.validate()?;
    cfg.validate()?;
    cfg.install(|| coarse_pass(&budget, cfg, 1).0)
}

/// Cooperative frontier for a power budget.
///
/// A coarse grid over `(rho, alpha, beta, lam1, lam2, lam3, gamma1, gamma2)`
/// seeds a box-constrained Nelder–Mead search of `mu*R1 + (1-mu)*R2` for each
/// weight `mu`. Every operating point visited contributes its projected region;
/// the result is the time-sharing hull of all of them. Work items run in
/// parallel but are merged in a fixed order, so the output is identical for
/// any worker count.
pub fn optimize_frontier(budget: ChannelBudget, cfg: &SearchConfig) -> Result<Frontier> {
    budget.validate()?;
    cfg.validate()?;
    cfg.install(|| optimize_inner(&budget, cfg))
}

fn optimize_inner(budget: &ChannelBudget, cfg: &SearchConfig) -> Frontier {
    let (coarse, seeds) = coarse_pass(budget, cfg, cfg.refine_seeds);
    let axes = axes(cfg);
    let mus = cfg.mus();

    let mut lo = [0.0; UdcParams::DIM];
    let mut hi = [1.0; UdcParams::DIM];
    lo[6] = 0.0;
    lo[7] = 0.0;
    hi[6] = cfg.gamma_max;
    hi[7] = cfg.gamma_max;

    let work: Vec<(usize, usize, usize)> = seeds
        .iter()
        .enumerate()
        .flat_map(|(m, list)| list.iter().enumerate().map(move |(j, s)| (m, j, s.index)))
        .collect();

    let refined: Vec<(Vec<FrontierPoint>, SearchStats)> = work
        .par_iter()
        .map(|&(m, j, index)| {
            let mu = mus[m];
            let mut rng = ChaCha8Rng::seed_from_u64(
                cfg.seed ^ ((m as u64) << 32) ^ (j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            );
            let opts = NelderMeadOptions {
                max_iters: cfg.refine_iters,
                initial_step: (0..UdcParams::DIM).map(|_| rng.random_range(0.05..0.2)).collect(),
                f_tol: 1e-12,
            };
            let mut found = Vec::new();
            let mut stats = SearchStats::default();
            let objective = |x: &[f64]| {
                let params = UdcParams::from_slice(x);
                stats.evaluations += 1;
                match point_frontier(budget, &params, cfg.gamma_max) {
                    Ok((rb, f)) => {
                        let s = score(&rb, &f, mu);
                        found.extend(f.points);
                        -s
                    }
                    Err(_) => {
                        stats.skipped += 1;
                        f64::INFINITY
                    }
                }
            };
            simplex::minimize(objective, &grid_point(&axes, index), &lo, &hi, &opts);
            (convex_hull_upper(found).points, stats)
        })
        .collect();

    let mut stats = coarse.stats;
    let mut points = coarse.points;
    for (p, s) in refined {
        points.extend(p);
        stats.evaluations += s.evaluations;
        stats.skipped += s.skipped;
    }
    let mut frontier = convex_hull_upper(points);
    frontier.stats = stats;
    frontier
}
