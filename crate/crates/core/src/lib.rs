//! Achievable rate regions for a two-user Gaussian interference channel in
//! which one receiver also relays for the other sender, and for the plain
//! dirty-paper baseline.
//!
//! The pipeline is: build a [`SignalSystem`] from channel and coding
//! parameters, evaluate the ten [`RateBounds`] with the conditional mutual
//! information engine in [`info`], project the resulting [`RatePolytope`] onto
//! `(R1, R2)`, and take the convex hull of many such projections.

pub mod baseline;
pub mod error;
pub mod frontier;
pub mod info;
pub mod oracle;
pub mod region;
pub mod signal;
pub mod simplex;

pub use baseline::{icdms_best_gamma, icdms_frontier, icdms_point, BaselineChannel, BaselinePoint};
pub use error::{Error, Result};
pub use frontier::{
    check_certificate, coarse_frontier, convex_hull_upper, dominance_report, dominance_report_with, optimize_frontier,
    point_bounds, point_frontier, Certificate, ChannelBudget, DominanceReport, Frontier, FrontierPoint, GridSteps,
    RatePair, SearchConfig, SearchStats, UdcParams,
};
pub use info::{cmi, cmi_named, VarSet};
pub use region::{evaluate_bounds, project_polytope, RateBounds, RatePolytope};
pub use signal::{build_baseline_system, build_system, ChannelParams, CodingParams, SignalSystem, Var};
