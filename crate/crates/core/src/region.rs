//! Rate bounds of the cooperative scheme at one operating point, and their
//! projection from sub-rates `(R11, R1R, R22, R2P)` onto `(R1, R2)`.

use std::sync::OnceLock;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::frontier::{convex_hull_upper, Certificate, Frontier, FrontierPoint, RatePair};
use crate::info::{cmi, VarSet};
use crate::signal::{SignalSystem, Var};

/// Constraint residual tolerated when testing a vertex for feasibility.
pub const FEAS_TOL: f64 = 1e-9;

/// Stand-in for a `+inf` bound. Every finite bound in practice is far below it,
/// and the polytope stays bounded through the sum constraints anyway.
pub const UNBOUNDED_CAP: f64 = 1e3;

/// Number of sub-rates.
pub const SUBRATES: usize = 4;

/// Right-hand sides of the ten rate constraints, in bits. `bounds[0]` is the
/// constraint on `R11`, `bounds[9]` the three-term sum at receiver 2; see
/// [`RatePolytope::ROWS`] for the left-hand sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBounds {
    pub bounds: [f64; 10],
}

impl RateBounds {
    pub fn new(bounds: [f64; 10]) -> Self {
        Self { bounds }
    }

    /// Bound number `k` in `4..=13`, matching the row labels used in reports.
    pub fn b(&self, k: usize) -> f64 {
        assert!((4..=13).contains(&k), "bound index {k} outside 4..=13");
        self.bounds[k - 4]
    }

    pub fn set(&mut self, k: usize, value: f64) {
        assert!((4..=13).contains(&k), "bound index {k} outside 4..=13");
        self.bounds[k - 4] = value;
    }

    pub fn is_finite(&self) -> bool {
        self.bounds.iter().all(|b| b.is_finite())
    }
}

fn set(vars: &[Var]) -> VarSet {
    VarSet::of(vars)
}

/// Evaluates the ten bounds with the relay codeword `T` in every conditioning
/// set (the time-sharing variable is constant and dropped).
///
/// Every penalty of the form `I(V,S; U|T)` is split by the chain rule into
/// `I(V; U|T) + I(S; U|V,T)` and the `I(V; U|T)` part is cancelled against the
/// matching reward term before evaluation. The result equals
/// [`evaluate_bounds_literal`] wherever that is finite, and stays well defined
/// when an auxiliary has no fresh randomness and both halves of a cancelling
/// pair are infinite.
pub fn evaluate_bounds(sys: &SignalSystem) -> Result<RateBounds> {
    use Var::*;
    let i = |x: &[Var], y: &[Var], z: &[Var]| cmi(sys, set(x), set(y), set(z));

    let u_s = i(&[U], &[S], &[V, T])?;
    let w_s = i(&[W], &[S], &[V, T])?;
    let u_w = i(&[U], &[W], &[V, T])?;

    let b = [
        i(&[S], &[W, Y1], &[V, T])?,
        i(&[W], &[Y1], &[T])? - i(&[V, S], &[W], &[T])?,
        i(&[T, W, V, S], &[Y1], &[])?,
        i(&[V], &[U, W, Y2], &[T])?,
        i(&[U], &[W, Y2], &[V, T])? - u_s,
        i(&[W], &[U, Y2], &[V, T])? - w_s,
        i(&[V, U], &[W, Y2], &[T])? - u_s,
        i(&[V, W], &[U, Y2], &[T])? - w_s,
        i(&[U, W], &[Y2], &[V, T])? + u_w - u_s - w_s,
        i(&[V, U, W], &[Y2], &[T])? + u_w - u_s - w_s,
    ];
    // `inf - inf` cannot be resolved from the remaining terms; such a point
    // achieves nothing.
    Ok(RateBounds::new(
        b.map(|v| if v.is_nan() { f64::NEG_INFINITY } else { v }),
    ))
}

/// The ten bounds as written, term by term. May contain `NaN` where an
/// auxiliary is a deterministic function of the interference.
pub fn evaluate_bounds_literal(sys: &SignalSystem) -> Result<RateBounds> {
    use Var::*;
    let i = |x: &[Var], y: &[Var], z: &[Var]| cmi(sys, set(x), set(y), set(z));

    let vs_u = i(&[V, S], &[U], &[T])?;
    let vs_w = i(&[V, S], &[W], &[T])?;

    Ok(RateBounds::new([
        i(&[S], &[W, Y1], &[V, T])?,
        i(&[W], &[Y1], &[T])? - vs_w,
        i(&[T, W, V, S], &[Y1], &[])?,
        i(&[V], &[U, W, Y2], &[T])?,
        i(&[U], &[V, W, Y2], &[T])? - vs_u,
        i(&[W], &[V, U, Y2], &[T])? - vs_w,
        i(&[V, U], &[W, Y2], &[T])? + i(&[U], &[V], &[T])? - vs_u,
        i(&[V, W], &[U, Y2], &[T])? + i(&[W], &[V], &[T])? - vs_w,
        i(&[U, W], &[V, Y2], &[T])? + i(&[U], &[W], &[T])? - vs_u - vs_w,
        i(&[V, U, W], &[Y2], &[T])? + i(&[V], &[U, W], &[T])? + i(&[W], &[U], &[T])? - vs_u - vs_w,
    ]))
}

/// `{x >= 0 : A x <= b}` over `x = (R11, R1R, R22, R2P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatePolytope {
    pub rhs: [f64; RatePolytope::NROWS],
}

impl RatePolytope {
    pub const NROWS: usize = 14;

    /// Ten rate constraints followed by the four nonnegativity rows.
    pub const ROWS: [[f64; SUBRATES]; RatePolytope::NROWS] = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [1.0, 1.0, 0.0, 1.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 1.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 1.0],
        [0.0, 1.0, 1.0, 1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
    ];

    /// `+inf` bounds are replaced by [`UNBOUNDED_CAP`]; `-inf` and `NaN` are kept
    /// and make the polytope empty.
    pub fn from_bounds(rb: &RateBounds) -> Self {
        let mut rhs = [0.0; Self::NROWS];
        for (r, &b) in rhs.iter_mut().zip(&rb.bounds) {
            *r = if b == f64::INFINITY { UNBOUNDED_CAP } else { b };
        }
        Self { rhs }
    }

    /// Largest constraint violation of `x` (negative when strictly inside).
    pub fn max_violation(&self, x: &[f64; SUBRATES]) -> f64 {
        Self::ROWS
            .iter()
            .zip(&self.rhs)
            .map(|(row, &b)| row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, x: &[f64; SUBRATES]) -> bool {
        self.max_violation(x) <= FEAS_TOL
    }

    /// All vertices, deduplicated at [`FEAS_TOL`].
    pub fn vertices(&self) -> Vec<[f64; SUBRATES]> {
        if self.rhs.iter().any(|b| !b.is_finite()) {
            return Vec::new();
        }
        let mut out: Vec<[f64; SUBRATES]> = Vec::new();
        for (rows, inv) in basis_inverses() {
            let b = nalgebra::Vector4::from_fn(|i, _| self.rhs[rows[i]]);
            let v = inv * b;
            let x = [v[0], v[1], v[2], v[3]];
            if !self.contains(&x) {
                continue;
            }
            let dup = out
                .iter()
                .any(|y| y.iter().zip(&x).all(|(a, b)| (a - b).abs() <= FEAS_TOL));
            if !dup {
                out.push(x);
            }
        }
        out
    }
}

/// Inverses of every invertible 4-row subsystem of [`RatePolytope::ROWS`].
/// The rows are integer, so a determinant below one in magnitude is zero.
fn basis_inverses() -> &'static [([usize; 4], Matrix4<f64>)] {
    static CACHE: OnceLock<Vec<([usize; 4], Matrix4<f64>)>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let n = RatePolytope::NROWS;
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        let rows = [a, b, c, d];
                        let m = Matrix4::from_fn(|i, j| RatePolytope::ROWS[rows[i]][j]);
                        if m.determinant().abs() < 0.5 {
                            continue;
                        }
                        if let Some(inv) = m.try_inverse() {
                            out.push((rows, inv));
                        }
                    }
                }
            }
        }
        out
    })
}

/// Projects the sub-rate polytope onto `(R11 + R1R, R22 + R2P)` and returns
/// its Pareto boundary. Each point carries the generating sub-rate vertex.
pub fn project_polytope(rb: &RateBounds) -> Frontier {
    let poly = RatePolytope::from_bounds(rb);
    let points = poly
        .vertices()
        .into_iter()
        .map(|x| FrontierPoint {
            rate: RatePair::new(x[0] + x[1], x[2] + x[3]),
            cert: Certificate::Split(x),
        })
        .collect::<Vec<_>>();
    convex_hull_upper(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{build_system, ChannelParams, CodingParams};
    use approx::assert_relative_eq;

    fn bounds_with(defaults: f64, overrides: &[(usize, f64)]) -> RateBounds {
        let mut rb = RateBounds::new([defaults; 10]);
        for &(k, v) in overrides {
            rb.set(k, v);
        }
        rb
    }

    #[test]
    fn thousand_and_one_candidate_systems() {
        // C(14, 4) = 1001 subsets; only the invertible ones are kept.
        let n = basis_inverses().len();
        assert!(n > 0 && n < 1001);
    }

    #[test]
    fn box_constraints_give_single_corner() {
        let rb = bounds_with(100.0, &[(4, 1.0), (7, 2.0), (8, 1.5), (5, 0.0)]);
        let f = project_polytope(&rb);
        assert_eq!(f.len(), 1);
        assert_relative_eq!(f.points[0].rate.r1, 3.0, epsilon = 1e-12);
        assert_relative_eq!(f.points[0].rate.r2, 1.5, epsilon = 1e-12);
    }

    #[test]
    fn loose_private_rate_trades_against_sums() {
        // With R2P only limited by the sums at 100, receiver 2's three-term
        // constraint gives a unit-slope edge.
        let rb = bounds_with(100.0, &[(4, 1.0), (7, 2.0), (8, 1.5)]);
        let f = project_polytope(&rb);
        let pts: Vec<_> = f.points.iter().map(|p| (p.rate.r1, p.rate.r2)).collect();
        assert_eq!(pts.len(), 2, "{pts:?}");
        assert_relative_eq!(pts[0].0, 1.0, epsilon = 1e-9);
        assert_relative_eq!(pts[0].1, 100.0, epsilon = 1e-9);
        assert_relative_eq!(pts[1].0, 3.0, epsilon = 1e-9);
        assert_relative_eq!(pts[1].1, 98.0, epsilon = 1e-9);
    }

    #[test]
    fn negative_single_bound_empties_the_polytope() {
        let rb = bounds_with(100.0, &[(5, -0.2), (4, 1.0), (7, 1.0), (8, 1.0)]);
        assert!(project_polytope(&rb).is_empty());
        let rb = bounds_with(100.0, &[(6, -1.0)]);
        assert!(project_polytope(&rb).is_empty());
    }

    #[test]
    fn infinite_bounds() {
        let mut rb = bounds_with(1.0, &[]);
        rb.set(7, f64::INFINITY);
        let f = project_polytope(&rb);
        assert!(!f.is_empty());
        assert!(f.points.iter().all(|p| p.rate.r1 <= 2.0 + 1e-12));
        rb.set(5, f64::NEG_INFINITY);
        assert!(project_polytope(&rb).is_empty());
        rb.set(5, f64::NAN);
        assert!(project_polytope(&rb).is_empty());
    }

    #[test]
    fn sum_constraint_creates_a_sloped_edge() {
        // R11 <= 1, R1R <= 1, R22 <= 1, R2P <= 0, R1R + R22 <= 1.5.
        let rb = bounds_with(10.0, &[(4, 1.0), (5, 0.0), (7, 1.0), (8, 1.0), (10, 1.5)]);
        let f = project_polytope(&rb);
        let pts: Vec<_> = f.points.iter().map(|p| (p.rate.r1, p.rate.r2)).collect();
        assert_eq!(pts.len(), 2);
        assert_relative_eq!(pts[0].0, 1.5, epsilon = 1e-12);
        assert_relative_eq!(pts[0].1, 1.0, epsilon = 1e-12);
        assert_relative_eq!(pts[1].0, 2.0, epsilon = 1e-12);
        assert_relative_eq!(pts[1].1, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn certificates_are_feasible_vertices() {
        let rb = RateBounds::new([0.4, 1.2, 2.5, 1.1, 0.9, 1.7, 1.6, 2.2, 1.4, 2.0]);
        let poly = RatePolytope::from_bounds(&rb);
        let f = project_polytope(&rb);
        assert!(!f.is_empty());
        for p in &f.points {
            let Certificate::Split(x) = p.cert else {
                panic!("missing split certificate")
            };
            assert!(poly.contains(&x));
            assert!(x.iter().all(|&v| v >= -FEAS_TOL));
            assert_relative_eq!(x[0] + x[1], p.rate.r1, epsilon = 1e-12);
            assert_relative_eq!(x[2] + x[3], p.rate.r2, epsilon = 1e-12);
        }
    }

    fn sample_system() -> SignalSystem {
        let ch = ChannelParams {
            p1: 3.5,
            p2: 6.0,
            p3: 2.5,
            c21: 0.09,
            c12: 4.0,
        };
        let cp = CodingParams {
            alpha: 0.55,
            beta: 0.35,
            lam1: 0.45,
            lam2: 0.25,
            lam3: 0.6,
            gamma1: 0.8,
            gamma2: 0.3,
        };
        build_system(ch, cp).unwrap()
    }

    #[test]
    fn first_bound_vanishes() {
        let rb = evaluate_bounds(&sample_system()).unwrap();
        assert_eq!(rb.b(4), 0.0);
    }

    #[test]
    fn expanded_and_literal_forms_agree_inside_the_box() {
        let sys = sample_system();
        let a = evaluate_bounds(&sys).unwrap();
        let b = evaluate_bounds_literal(&sys).unwrap();
        for k in 4..=13 {
            assert!((a.b(k) - b.b(k)).abs() < 1e-9, "b{k}: {} vs {}", a.b(k), b.b(k));
        }
    }

    #[test]
    fn degenerate_auxiliaries_stay_defined() {
        // alpha = 0: U and W have no fresh part. γ2 > 0 makes W a function of S,
        // which costs an unbounded binning rate at receiver 1.
        let ch = ChannelParams {
            p1: 4.0,
            p2: 6.0,
            p3: 2.0,
            c21: 0.09,
            c12: 4.0,
        };
        let cp = CodingParams {
            alpha: 0.0,
            lam1: 0.5,
            gamma1: 1.0,
            gamma2: 0.5,
            ..CodingParams::default()
        };
        let rb = evaluate_bounds(&build_system(ch, cp).unwrap()).unwrap();
        assert!(rb.bounds.iter().all(|b| !b.is_nan()));
        assert_eq!(rb.b(5), f64::NEG_INFINITY);
        assert!(project_polytope(&rb).is_empty());

        let cp = CodingParams { gamma2: 0.0, ..cp };
        let rb = evaluate_bounds(&build_system(ch, cp).unwrap()).unwrap();
        assert!(rb.bounds.iter().all(|b| !b.is_nan()));
        assert!(rb.b(8).abs() < 1e-12);
        assert!(!project_polytope(&rb).is_empty());
    }
}
