//! Baseline region without a relaying receiver: sender 2 dirty-paper codes
//! against sender 1's codeword, receiver 1 treats the fresh part of `X2` as
//! noise. For `c21 <= 1` this is the capacity region of the channel.
//!
//! The rates go through the same information engine as the cooperative
//! scheme; closed forms only appear in tests.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::frontier::{
    convex_hull_upper, linear_grid, Certificate, Frontier, FrontierPoint, SearchConfig, SearchStats,
};
use crate::info::{cmi, VarSet};
use crate::signal::{build_baseline_system, ChannelParams, Var};

/// Channel of the baseline comparison. `p1` is the full budget of sender 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineChannel {
    pub p1: f64,
    pub p2: f64,
    pub c12: f64,
    pub c21: f64,
}

impl BaselineChannel {
    fn params(&self) -> ChannelParams {
        ChannelParams {
            p1: self.p1,
            p2: self.p2,
            p3: 0.0,
            c21: self.c21,
            c12: self.c12,
        }
    }

    /// Whether the baseline region is known to be the capacity region here.
    pub fn is_capacity_regime(&self) -> bool {
        self.c21 <= 1.0
    }

    pub fn region_label(&self) -> &'static str {
        if self.is_capacity_regime() {
            "capacity"
        } else {
            "achievable only"
        }
    }
}

/// Corner of the rectangular region at one `(alpha, gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselinePoint {
    pub r1max: f64,
    pub r2max: f64,
}

fn rates(ch: &BaselineChannel, alpha: f64, gamma: f64, gamma_max: f64) -> Result<(f64, f64)> {
    use Var::*;
    let sys = build_baseline_system(ch.params(), alpha, gamma, gamma_max)?;
    let set = |v: &[Var]| VarSet::of(v);
    let r1 = cmi(&sys, set(&[S]), set(&[Y1]), VarSet::EMPTY)?;
    let r2 = cmi(&sys, set(&[U]), set(&[Y2]), VarSet::EMPTY)? - cmi(&sys, set(&[S]), set(&[U]), VarSet::EMPTY)?;
    Ok((r1, r2))
}

/// Rates at one operating point. `r2max` is clamped at zero.
pub fn icdms_point(ch: &BaselineChannel, alpha: f64, gamma: f64, gamma_max: f64) -> Result<BaselinePoint> {
    let (r1, r2) = rates(ch, alpha, gamma, gamma_max)?;
    Ok(BaselinePoint {
        r1max: r1,
        r2max: r2.max(0.0),
    })
}

const GOLDEN_TOL: f64 = 1e-6;
const UNIMODAL_PROBES: usize = 41;
const DENSE_PROBES: usize = 2001;

/// Golden-section maximization of `f` on `[lo, hi]` down to an interval of
/// width `tol`.
pub(crate) fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        }
    }
    // Endpoints are candidates too; the optimum may sit on the box edge.
    [lo, 0.5 * (lo + hi), hi]
        .into_iter()
        .map(|x| (x, f(x)))
        .fold((lo, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
        .0
}

fn is_unimodal(values: &[f64]) -> bool {
    let slack = 1e-12;
    let peak = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > values[best] { i } else { best });
    values[..=peak].windows(2).all(|w| w[1] >= w[0] - slack) && values[peak..].windows(2).all(|w| w[1] <= w[0] + slack)
}

/// Dirty-paper coefficient maximizing `r2max` at a given `alpha`, and the
/// resulting point. Uses golden-section search when a coarse probe shows the
/// objective to be unimodal, and a dense sweep followed by a local golden
/// search otherwise.
pub fn icdms_best_gamma(ch: &BaselineChannel, alpha: f64, gamma_max: f64) -> Result<(f64, BaselinePoint)> {
    // Surface domain errors before the search swallows them.
    rates(ch, alpha, 0.0, gamma_max)?;
    let objective = |g: f64| match rates(ch, alpha, g, gamma_max) {
        Ok((_, r2)) if !r2.is_nan() => r2,
        _ => f64::NEG_INFINITY,
    };

    let probes: Vec<f64> = linear_grid(0.0, gamma_max, UNIMODAL_PROBES)
        .into_iter()
        .map(objective)
        .collect();
    let gamma = if is_unimodal(&probes) {
        golden_max(&objective, 0.0, gamma_max, GOLDEN_TOL)
    } else {
        let grid = linear_grid(0.0, gamma_max, DENSE_PROBES);
        let best = grid
            .iter()
            .copied()
            .max_by(|a, b| objective(*a).total_cmp(&objective(*b)))
            .unwrap_or(0.0);
        let h = gamma_max / (DENSE_PROBES - 1) as f64;
        golden_max(&objective, (best - h).max(0.0), (best + h).min(gamma_max), GOLDEN_TOL)
    };
    Ok((gamma, icdms_point(ch, alpha, gamma, gamma_max)?))
}

/// Baseline frontier: sweep `alpha`, optimize `gamma` per `alpha`, hull.
pub fn icdms_frontier(ch: &BaselineChannel, cfg: &SearchConfig) -> Result<Frontier> {
    ch.params().validate()?;
    cfg.validate()?;
    let alphas = linear_grid(0.0, 1.0, cfg.baseline_alpha_steps);
    let points = cfg.install(|| {
        alphas
            .par_iter()
            .map(|&alpha| {
                let (gamma, p) = icdms_best_gamma(ch, alpha, cfg.gamma_max)?;
                Ok(FrontierPoint {
                    rate: crate::frontier::RatePair::new(p.r1max, p.r2max),
                    cert: Certificate::Baseline { alpha, gamma },
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut f = convex_hull_upper(points);
    f.stats = SearchStats {
        evaluations: alphas.len() as u64,
        skipped: 0,
    };
    Ok(f)
}
