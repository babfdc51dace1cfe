//! Brute-force references for the information engine and the polytope
//! projection. Both are deliberately naive and share no code path with the
//! routines they check.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontier::{Frontier, RatePair};
use crate::info::VarSet;
use crate::region::RateBounds;
use crate::signal::{SignalSystem, Var, BASIS_LEN};

/// Variance of the independent jitter added to every sampled variable.
pub const JITTER: f64 = 1e-6;

const BATCHES: usize = 10;

/// Monte-Carlo estimate of a conditional mutual information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    /// Plug-in estimate from the full sample, bits.
    pub estimate: f64,
    /// Standard error from the spread of per-batch estimates.
    pub stderr: f64,
    /// The same plug-in formula applied to the exact jittered covariance.
    pub analytic: f64,
}

fn log_det_spd(m: &DMatrix<f64>) -> Option<f64> {
    if m.nrows() == 0 {
        return Some(0.0);
    }
    let chol = m.clone().cholesky()?;
    Some(2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

fn sub(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Gaussian CMI from a covariance over `[x.., y.., z..]` (block sizes given).
fn gaussian_cmi(cov: &DMatrix<f64>, nx: usize, ny: usize, nz: usize) -> f64 {
    let x: Vec<usize> = (0..nx).collect();
    let y: Vec<usize> = (nx..nx + ny).collect();
    let z: Vec<usize> = (nx + ny..nx + ny + nz).collect();
    let cat = |a: &[usize], b: &[usize]| a.iter().chain(b).copied().collect::<Vec<_>>();
    let ld = |idx: &[usize]| log_det_spd(&sub(cov, idx)).unwrap_or(f64::NAN);
    let xz = cat(&x, &z);
    let yz = cat(&y, &z);
    let xyz = cat(&x, &yz);
    0.5 * (ld(&xz) + ld(&yz) - ld(&z) - ld(&xyz)) / std::f64::consts::LN_2
}

#[derive(Clone)]
struct Moments {
    n: f64,
    sum: Vec<f64>,
    outer: DMatrix<f64>,
}

impl Moments {
    fn new(k: usize) -> Self {
        Self {
            n: 0.0,
            sum: vec![0.0; k],
            outer: DMatrix::zeros(k, k),
        }
    }

    fn push(&mut self, v: &[f64]) {
        self.n += 1.0;
        for (i, &a) in v.iter().enumerate() {
            self.sum[i] += a;
            for (j, &b) in v.iter().enumerate().skip(i) {
                self.outer[(i, j)] += a * b;
            }
        }
    }

    fn merge(&mut self, o: &Moments) {
        self.n += o.n;
        for (a, b) in self.sum.iter_mut().zip(&o.sum) {
            *a += b;
        }
        self.outer += &o.outer;
    }

    fn covariance(&self) -> DMatrix<f64> {
        let k = self.sum.len();
        DMatrix::from_fn(k, k, |i, j| {
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            (self.outer[(i, j)] - self.sum[i] * self.sum[j] / self.n) / (self.n - 1.0)
        })
    }
}

/// Monte-Carlo estimate of `I(X; Y | Z)` with the default jitter.
pub fn mc_cmi_estimate(sys: &SignalSystem, x: VarSet, y: VarSet, z: VarSet, n: usize, seed: u64) -> Result<McEstimate> {
    mc_cmi_estimate_with_jitter(sys, x, y, z, n, seed, JITTER)
}

/// Draws `n` samples of the basis with ChaCha8 seeded by `seed`, forms every
/// variable of `X`, `Y`, `Z` (a variable listed twice gets two independent
/// jitters), and evaluates the plug-in Gaussian CMI on the sample covariance.
/// The standard error comes from ten equal batches.
pub fn mc_cmi_estimate_with_jitter(
    sys: &SignalSystem,
    x: VarSet,
    y: VarSet,
    z: VarSet,
    n: usize,
    seed: u64,
    jitter: f64,
) -> Result<McEstimate> {
    if n < 10_000 {
        return Err(Error::Config(format!("sample count must be >= 10000, got {n}")));
    }
    if x.is_empty() || y.is_empty() {
        return Err(Error::Config(
            "both sides of the information term must be nonempty".into(),
        ));
    }
    let vars: Vec<Var> = x.iter().chain(y.iter()).chain(z.iter()).collect();
    let (nx, ny, nz) = (x.len(), y.len(), z.len());
    let k = vars.len();
    let coeffs: Vec<[f64; BASIS_LEN]> = vars.iter().map(|&v| sys.whitened(v)).collect();
    let sigma = jitter.sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut batches = vec![Moments::new(k); BATCHES];
    let mut g = [0.0; BASIS_LEN];
    let mut v = vec![0.0; k];
    for s in 0..n {
        for gi in g.iter_mut() {
            *gi = StandardNormal.sample(&mut rng);
        }
        for (vi, c) in v.iter_mut().zip(&coeffs) {
            let e: f64 = StandardNormal.sample(&mut rng);
            *vi = c.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() + sigma * e;
        }
        batches[s * BATCHES / n].push(&v);
    }

    let per_batch: Vec<f64> = batches
        .iter()
        .map(|m| gaussian_cmi(&m.covariance(), nx, ny, nz))
        .collect();
    let mut total = Moments::new(k);
    for b in &batches {
        total.merge(b);
    }
    let estimate = gaussian_cmi(&total.covariance(), nx, ny, nz);
    let mean = per_batch.iter().sum::<f64>() / BATCHES as f64;
    let var = per_batch.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
    let stderr = (var / BATCHES as f64).sqrt();

    Ok(McEstimate {
        estimate,
        stderr,
        analytic: jittered_cmi(sys, x, y, z, jitter),
    })
}

/// Plug-in Gaussian CMI on the exact covariance with `jitter` added to every
/// variable independently.
pub fn jittered_cmi(sys: &SignalSystem, x: VarSet, y: VarSet, z: VarSet, jitter: f64) -> f64 {
    let coeffs: Vec<[f64; BASIS_LEN]> = x
        .iter()
        .chain(y.iter())
        .chain(z.iter())
        .map(|v| sys.whitened(v))
        .collect();
    let k = coeffs.len();
    let cov = DMatrix::from_fn(k, k, |i, j| {
        let c: f64 = coeffs[i].iter().zip(&coeffs[j]).map(|(a, b)| a * b).sum();
        if i == j {
            c + jitter
        } else {
            c
        }
    });
    gaussian_cmi(&cov, x.len(), y.len(), z.len())
}

/// Largest grid the projection oracle will enumerate.
pub const MAX_GRID_CELLS: u128 = 100_000_000;

/// Per-sub-rate enumeration ceiling, bits.
pub const SUBRATE_CLIP: f64 = 8.0;

/// Pareto-maximal `(R1, R2)` pairs among the grid points `(R11, R1R, R22, R2P)`
/// that satisfy all ten rate constraints.
///
/// Each sub-rate runs over multiples of `step` up to the smallest bound it
/// appears in (clipped to `[0, 8]`), with that ceiling added as a final node.
pub fn brute_force_projection(rb: &RateBounds, step: f64) -> Result<Vec<RatePair>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Config(format!("grid step must be > 0, got {step}")));
    }
    let b = |k: usize| rb.b(k);
    let feasible = |r11: f64, r1r: f64, r22: f64, r2p: f64| {
        let tol = 1e-9;
        r11 <= b(4) + tol
            && r2p <= b(5) + tol
            && r11 + r1r + r2p <= b(6) + tol
            && r1r <= b(7) + tol
            && r22 <= b(8) + tol
            && r2p <= b(9) + tol
            && r1r + r22 <= b(10) + tol
            && r1r + r2p <= b(11) + tol
            && r22 + r2p <= b(12) + tol
            && r1r + r22 + r2p <= b(13) + tol
    };

    let ceiling = |ks: &[usize]| ks.iter().map(|&k| b(k)).fold(f64::INFINITY, f64::min);
    let ceilings = [
        ceiling(&[4, 6]),
        ceiling(&[6, 7, 10, 11, 13]),
        ceiling(&[8, 10, 12, 13]),
        ceiling(&[5, 6, 9, 11, 12, 13]),
    ];
    if ceilings.iter().any(|c| c.is_nan() || *c < -1e-9) {
        return Ok(Vec::new());
    }
    let axes: Vec<Vec<f64>> = ceilings
        .iter()
        .map(|&c| {
            let top = c.clamp(0.0, SUBRATE_CLIP);
            let mut axis: Vec<f64> = (0..).map(|i| i as f64 * step).take_while(|&v| v < top).collect();
            axis.push(top);
            axis
        })
        .collect();
    let cells: u128 = axes.iter().map(|a| a.len() as u128).product();
    if cells > MAX_GRID_CELLS {
        return Err(Error::GridTooLarge {
            cells,
            limit: MAX_GRID_CELLS,
        });
    }

    let mut found: Vec<RatePair> = Vec::new();
    for &r11 in &axes[0] {
        for &r1r in &axes[1] {
            for &r22 in &axes[2] {
                for &r2p in &axes[3] {
                    if feasible(r11, r1r, r22, r2p) {
                        found.push(RatePair::new(r11 + r1r, r22 + r2p));
                    }
                }
            }
        }
    }

    // Pareto filter: scan by decreasing r1, keep strict improvements in r2.
    found.sort_by(|a, b| b.r1.total_cmp(&a.r1).then(b.r2.total_cmp(&a.r2)));
    let mut out = Vec::new();
    let mut best_r2 = f64::NEG_INFINITY;
    for p in found {
        if p.r2 > best_r2 {
            best_r2 = p.r2;
            out.push(p);
        }
    }
    out.reverse();
    Ok(out)
}

fn dist_to_segment(p: RatePair, a: RatePair, b: RatePair) -> f64 {
    let (dx, dy) = (b.r1 - a.r1, b.r2 - a.r2);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.r1 - a.r1) * dx + (p.r2 - a.r2) * dy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (a.r1 + t * dx, a.r2 + t * dy);
    ((p.r1 - qx).powi(2) + (p.r2 - qy).powi(2)).sqrt()
}

/// Hausdorff distance between the region below a frontier and the region
/// below a finite point set (the union of the boxes `[0, p]`).
///
/// Distances to a down-closed set only grow when moving up or right, so the
/// supremum over the frontier's region is attained on its outline, which is
/// sampled every `1e-3` bits.
pub fn hausdorff(frontier: &Frontier, points: &[RatePair]) -> f64 {
    match (frontier.is_empty(), points.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return f64::INFINITY,
        _ => {}
    }
    let verts: Vec<RatePair> = frontier.points.iter().map(|p| p.rate).collect();
    let first = verts[0];
    let last = verts[verts.len() - 1];
    let mut outline = vec![RatePair::new(0.0, first.r2)];
    outline.extend(&verts);
    outline.push(RatePair::new(last.r1, 0.0));

    let to_region = |p: RatePair| {
        let inside = p.r1 <= last.r1 && p.r2 <= first.r2 && frontier.r1_at(p.r2.max(0.0)).is_some_and(|r| p.r1 <= r);
        if inside {
            return 0.0;
        }
        outline
            .windows(2)
            .map(|w| dist_to_segment(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min)
    };
    let to_boxes = |q: RatePair| {
        points
            .iter()
            .map(|p| (q.r1 - p.r1).max(0.0).hypot((q.r2 - p.r2).max(0.0)))
            .fold(f64::INFINITY, f64::min)
    };

    let forward = points.iter().map(|&p| to_region(p)).fold(0.0, f64::max);
    let mut backward: f64 = 0.0;
    for w in outline.windows(2) {
        let len = (w[1].r1 - w[0].r1).hypot(w[1].r2 - w[0].r2);
        let m = (len / 1e-3).ceil().max(1.0) as usize;
        for i in 0..=m {
            let t = i as f64 / m as f64;
            let q = RatePair::new(w[0].r1 + t * (w[1].r1 - w[0].r1), w[0].r2 + t * (w[1].r2 - w[0].r2));
            backward = backward.max(to_boxes(q));
        }
    }
    forward.max(backward)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::cmi;
    use crate::signal::{build_system, ChannelParams, CodingParams};

    fn awgn() -> SignalSystem {
        let ch = ChannelParams {
            p1: 6.0,
            p2: 0.0,
            p3: 0.0,
            c21: 0.0,
            c12: 0.0,
        };
        build_system(ch, CodingParams::default()).unwrap()
    }

    #[test]
    fn mc_point_to_point() {
        let sys = awgn();
        let set = |s: &str| VarSet::parse(s).unwrap();
        let e = mc_cmi_estimate(&sys, set("X1"), set("Y1"), set(""), 200_000, 7).unwrap();
        assert!((e.estimate - 0.5 * 7f64.log2()).abs() <= 3.0 * e.stderr, "{e:?}");
        assert!((e.analytic - 0.5 * 7f64.log2()).abs() < 1e-5);
    }

    #[test]
    fn mc_independent_components() {
        // X1 carries no information about a receiver that sees only Z2.
        let sys = awgn();
        let set = |s: &str| VarSet::parse(s).unwrap();
        let e = mc_cmi_estimate(&sys, set("X1"), set("Y2"), set(""), 200_000, 11).unwrap();
        assert!(e.estimate.abs() <= 3.0 * e.stderr + 1e-4, "{e:?}");
        assert_eq!(cmi(&sys, set("X1"), set("Y2"), set("")).unwrap(), 0.0);
    }

    #[test]
    fn mc_rejects_small_samples() {
        let sys = awgn();
        let set = |s: &str| VarSet::parse(s).unwrap();
        assert!(mc_cmi_estimate(&sys, set("X1"), set("Y1"), set(""), 100, 0).is_err());
    }

    #[test]
    fn brute_force_box() {
        let mut rb = RateBounds::new([100.0; 10]);
        rb.set(4, 1.0);
        rb.set(7, 2.0);
        rb.set(8, 1.5);
        rb.set(5, 0.0);
        let pts = brute_force_projection(&rb, 0.25).unwrap();
        assert_eq!(pts, vec![RatePair::new(3.0, 1.5)]);
    }

    #[test]
    fn brute_force_empty_and_limits() {
        let mut rb = RateBounds::new([1.0; 10]);
        rb.set(6, -1.0);
        assert!(brute_force_projection(&rb, 0.05).unwrap().is_empty());
        let rb = RateBounds::new([100.0; 10]);
        assert!(matches!(
            brute_force_projection(&rb, 0.01),
            Err(Error::GridTooLarge { .. })
        ));
        assert!(brute_force_projection(&rb, 0.0).is_err());
    }

    #[test]
    fn hausdorff_basics() {
        let f = crate::frontier::convex_hull_upper(vec![
            crate::frontier::FrontierPoint::bare(0.0, 1.0),
            crate::frontier::FrontierPoint::bare(1.0, 0.0),
        ]);
        let pts = [
            RatePair::new(0.0, 1.0),
            RatePair::new(0.5, 0.5),
            RatePair::new(1.0, 0.0),
        ];
        // Farthest outline point from the boxes is (0.25, 0.75), 0.25 past
        // both neighbouring boxes.
        assert!((hausdorff(&f, &pts) - 0.25).abs() < 1e-3);
        assert!((hausdorff(&f, &pts[..1]) - 1.0).abs() < 1e-9);
        // A point outside the region counts by its distance to the outline.
        let far = [RatePair::new(1.0, 1.0)];
        assert!((hausdorff(&f, &far) - 0.5f64.sqrt()).abs() < 1e-9);
        assert_eq!(hausdorff(&Frontier::default(), &[]), 0.0);
        assert_eq!(hausdorff(&f, &[]), f64::INFINITY);
    }
}
