//! Conditional mutual information between sets of jointly Gaussian variables.
//!
//! The systems built in [`crate::signal`] are rank deficient by construction
//! (`V ≡ S`, `T ≡ X3`, zero-variance auxiliaries at the edges of the parameter
//! box), so the covariance blocks are not inverted directly. Each variable is
//! first projected off the span of the conditioning set; directions that are
//! a.s. determined by the conditioning carry no information and are dropped.
//! The log-determinant ratio is then accumulated from the Gram–Schmidt
//! residual norms, which are the diagonal of the Cholesky factor of the
//! reduced covariance blocks.

use std::fmt;
use std::ops::BitOr;

use crate::error::{Error, Result};
use crate::signal::{SignalSystem, Var, BASIS_LEN};

/// Relative tolerance below which a residual direction counts as dependent.
pub const RANK_TOL: f64 = 1e-10;

/// Largest negative round-off tolerated before a result is reported as an error.
pub const NEG_TOL: f64 = 1e-9;

/// A set of named variables, stored as a bit mask in [`Var`] order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct VarSet(u16);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn of(vars: &[Var]) -> Self {
        vars.iter().fold(Self::EMPTY, |acc, &v| acc.with(v))
    }

    /// Parses a comma- or whitespace-separated list such as `"V,S"`.
    pub fn parse(names: &str) -> Result<Self> {
        names
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .try_fold(Self::EMPTY, |acc, n| Ok(acc.with(n.parse()?)))
    }

    pub fn with(self, v: Var) -> Self {
        VarSet(self.0 | (1 << v.index()))
    }

    pub fn contains(self, v: Var) -> bool {
        self.0 & (1 << v.index()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Var> {
        Var::ALL.into_iter().filter(move |&v| self.contains(v))
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn from_bits(bits: u16) -> Self {
        VarSet(bits & ((1 << Var::COUNT) - 1))
    }
}

impl BitOr for VarSet {
    type Output = VarSet;

    fn bitor(self, rhs: VarSet) -> VarSet {
        VarSet(self.0 | rhs.0)
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(v.name())?;
        }
        f.write_str("}")
    }
}

type Vector = [f64; BASIS_LEN];

fn dot(a: &Vector, b: &Vector) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal basis grown one direction at a time.
#[derive(Clone, Default)]
struct Span {
    dirs: Vec<Vector>,
}

impl Span {
    /// Component of `v` orthogonal to the span; two passes of classical
    /// Gram–Schmidt keep the residual orthogonal to working precision.
    fn residual(&self, v: &Vector) -> Vector {
        let mut r = *v;
        for _ in 0..2 {
            for q in &self.dirs {
                let c = dot(q, &r);
                for (ri, qi) in r.iter_mut().zip(q) {
                    *ri -= c * qi;
                }
            }
        }
        r
    }

    /// Adds `v` if its residual norm exceeds `tol`; returns the squared residual norm
    /// when it was added.
    fn try_push(&mut self, v: &Vector, tol: f64) -> Option<f64> {
        let r = self.residual(v);
        let norm2 = dot(&r, &r);
        let norm = norm2.sqrt();
        if norm > tol {
            self.dirs.push(r.map(|x| x / norm));
            Some(norm2)
        } else {
            None
        }
    }
}

/// Largest singular value of the stacked whitened coefficient matrix.
fn spectral_scale(rows: &[Vector]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let m = nalgebra::DMatrix::from_fn(rows.len(), BASIS_LEN, |i, j| rows[i][j]);
    m.singular_values().max()
}

/// `I(X; Y | Z)` in bits, before clamping. Returns `+inf` when some
/// combination of `X` is an exact function of `Y` and `Z`.
pub fn cmi_raw(sys: &SignalSystem, x: VarSet, y: VarSet, z: VarSet) -> f64 {
    let whiten = |s: VarSet| s.iter().map(|v| sys.whitened(v)).collect::<Vec<_>>();
    let (xs, ys, zs) = (whiten(x), whiten(y), whiten(z));

    let all: Vec<Vector> = zs.iter().chain(&xs).chain(&ys).copied().collect();
    let scale = spectral_scale(&all);
    if scale == 0.0 {
        return 0.0;
    }
    let tol = RANK_TOL * scale;

    let mut given_z = Span::default();
    for v in &zs {
        given_z.try_push(v, tol);
    }

    let mut y_span = given_z.clone();
    let y_kept = ys.iter().filter(|v| y_span.try_push(v, tol).is_some()).count();

    // Residual norms of the retained X directions, first given Z alone, then
    // given Z and Y. Their log-ratio is the log-determinant ratio.
    let mut x_given_z = given_z;
    let mut x_given_yz = y_span;
    let mut log_ratio = 0.0;
    let mut x_kept = 0;
    for v in &xs {
        let Some(n_z) = x_given_z.try_push(v, tol) else {
            continue;
        };
        x_kept += 1;
        if y_kept == 0 {
            continue;
        }
        match x_given_yz.try_push(v, tol) {
            Some(n_yz) => log_ratio += (n_z / n_yz).ln(),
            None => return f64::INFINITY,
        }
    }

    if x_kept == 0 || y_kept == 0 {
        return 0.0;
    }
    0.5 * log_ratio / std::f64::consts::LN_2
}

/// `I(X; Y | Z)` in bits for the jointly Gaussian system `sys`.
///
/// Round-off in `(-NEG_TOL, 0)` is clamped to zero; anything more negative is
/// an error. The result is `+inf` when `X` and `Y` share a direction that `Z`
/// does not explain (e.g. a codeword with no fresh randomness).
pub fn cmi(sys: &SignalSystem, x: VarSet, y: VarSet, z: VarSet) -> Result<f64> {
    let value = cmi_raw(sys, x, y, z);
    if value < -NEG_TOL || value.is_nan() {
        return Err(Error::NegativeInformation {
            value,
            tolerance: NEG_TOL,
        });
    }
    Ok(value.max(0.0))
}

/// Convenience wrapper taking comma-separated variable names.
pub fn cmi_named(sys: &SignalSystem, x: &str, y: &str, z: &str) -> Result<f64> {
    cmi(sys, VarSet::parse(x)?, VarSet::parse(y)?, VarSet::parse(z)?)
}
