//! Joint-Gaussian model of the channel inputs, outputs and auxiliary codeword
//! variables.
//!
//! Every variable is an exact linear combination over six independent
//! zero-mean Gaussians `(A, B, Ũ, W̃, Z1, Z2)`. Covariances are therefore
//! bilinear forms in the coefficient vectors and no sampling is involved.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};

/// Upper end of the admissible range for the dirty-paper coefficients.
pub const GAMMA_MAX: f64 = 10.0;

pub const BASIS_LEN: usize = 6;

/// Independent basis of the model, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Unit variance, shared by the relay codeword and the coherent part of `C`.
    A = 0,
    /// Unit variance, private part of `C`.
    B = 1,
    /// Variance `alpha * beta * p2`.
    UTilde = 2,
    /// Variance `alpha * (1 - beta) * p2`.
    WTilde = 3,
    Z1 = 4,
    Z2 = 5,
}

/// Named variables of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    T = 0,
    V = 1,
    S = 2,
    U = 3,
    W = 4,
    X1 = 5,
    X2 = 6,
    X3 = 7,
    Y1 = 8,
    Y2 = 9,
}

impl Var {
    pub const COUNT: usize = 10;

    pub const ALL: [Var; Var::COUNT] = [
        Var::T,
        Var::V,
        Var::S,
        Var::U,
        Var::W,
        Var::X1,
        Var::X2,
        Var::X3,
        Var::Y1,
        Var::Y2,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::T => "T",
            Var::V => "V",
            Var::S => "S",
            Var::U => "U",
            Var::W => "W",
            Var::X1 => "X1",
            Var::X2 => "X2",
            Var::X3 => "X3",
            Var::Y1 => "Y1",
            Var::Y2 => "Y2",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Var::ALL
            .iter()
            .copied()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::UnknownVariable(s.to_string()))
    }
}

/// A random variable as a linear combination of the [`Basis`] elements.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinExpr {
    pub coeffs: [f64; BASIS_LEN],
}

impl LinExpr {
    pub const ZERO: LinExpr = LinExpr {
        coeffs: [0.0; BASIS_LEN],
    };

    pub fn term(basis: Basis, coeff: f64) -> Self {
        let mut e = Self::ZERO;
        e.coeffs[basis as usize] = coeff;
        e
    }
}

impl Add for LinExpr {
    type Output = LinExpr;

    fn add(mut self, rhs: LinExpr) -> LinExpr {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
        self
    }
}

impl Mul<LinExpr> for f64 {
    type Output = LinExpr;

    fn mul(self, mut rhs: LinExpr) -> LinExpr {
        for a in rhs.coeffs.iter_mut() {
            *a *= self;
        }
        rhs
    }
}

/// Physical channel: powers are linear, gains are power gains (`c21`, `c12`),
/// the amplitude on the cross links is their square root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub c21: f64,
    pub c12: f64,
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        const NONNEG: &str = "finite and >= 0";
        check_range("p1", self.p1, 0.0, f64::MAX, NONNEG)?;
        check_range("p2", self.p2, 0.0, f64::MAX, NONNEG)?;
        check_range("p3", self.p3, 0.0, f64::MAX, NONNEG)?;
        check_range("c21", self.c21, 0.0, f64::MAX, NONNEG)?;
        check_range("c12", self.c12, 0.0, f64::MAX, NONNEG)
    }
}

/// Coding parameters of the Gaussian auxiliary-variable mapping.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CodingParams {
    /// Fraction of sender 2's power spent on fresh (non-cooperative) signalling.
    pub alpha: f64,
    /// Split of the fresh power between `U` (beta) and `W` (1 - beta).
    pub beta: f64,
    /// Correlation between sender 1 and the relay, squared.
    pub lam1: f64,
    pub lam2: f64,
    pub lam3: f64,
    /// Dirty-paper coefficient on `S` inside `U`.
    pub gamma1: f64,
    /// Dirty-paper coefficient on `S` inside `W`.
    pub gamma2: f64,
}

impl CodingParams {
    pub fn validate(&self, gamma_max: f64) -> Result<()> {
        const UNIT: &str = "within [0, 1]";
        const GAMMA: &str = "within [0, gamma_max]";
        check_range("alpha", self.alpha, 0.0, 1.0, UNIT)?;
        check_range("beta", self.beta, 0.0, 1.0, UNIT)?;
        check_range("lam1", self.lam1, 0.0, 1.0, UNIT)?;
        check_range("lam2", self.lam2, 0.0, 1.0, UNIT)?;
        check_range("lam3", self.lam3, 0.0, 1.0, UNIT)?;
        check_range("gamma1", self.gamma1, 0.0, gamma_max, GAMMA)?;
        check_range("gamma2", self.gamma2, 0.0, gamma_max, GAMMA)
    }
}

/// Parameters that produced a [`SignalSystem`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Origin {
    /// Full model with a relaying receiver.
    Cooperative {
        channel: ChannelParams,
        coding: CodingParams,
    },
    /// Reduced model without relay and without `W`; `gamma` multiplies `C`.
    Baseline {
        channel: ChannelParams,
        alpha: f64,
        gamma: f64,
    },
}

/// All named variables of one operating point as linear expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSystem {
    basis_var: [f64; BASIS_LEN],
    exprs: [LinExpr; Var::COUNT],
    origin: Origin,
}

/// Builds the joint-Gaussian system for the cooperative channel.
///
/// `C = √λ1·A + √(1−λ1)·B`, `T = X3 = √p3·A`, `S = V = X1 = √p1·C`,
/// `U = Ũ + √λ2·T + γ1·S`, `W = W̃ + √λ3·T + γ2·S`,
/// `X2 = Ũ + W̃ + √((1−α)p2)·C`, and the outputs follow the channel law
/// `Y1 = X1 + √c21·X2 + X3 + Z1`, `Y2 = X2 + √c12·X1 + Z2`.
pub fn build_system(ch: ChannelParams, cp: CodingParams) -> Result<SignalSystem> {
    build_system_with_limit(ch, cp, GAMMA_MAX)
}

/// [`build_system`] with a caller-chosen upper limit on the dirty-paper coefficients.
pub fn build_system_with_limit(ch: ChannelParams, cp: CodingParams, gamma_max: f64) -> Result<SignalSystem> {
    ch.validate()?;
    cp.validate(gamma_max)?;

    let basis_var = [
        1.0,
        1.0,
        cp.alpha * cp.beta * ch.p2,
        cp.alpha * (1.0 - cp.beta) * ch.p2,
        1.0,
        1.0,
    ];

    let a = LinExpr::term(Basis::A, 1.0);
    let b = LinExpr::term(Basis::B, 1.0);
    let u_fresh = LinExpr::term(Basis::UTilde, 1.0);
    let w_fresh = LinExpr::term(Basis::WTilde, 1.0);

    let c = cp.lam1.sqrt() * a + (1.0 - cp.lam1).sqrt() * b;
    let t = ch.p3.sqrt() * a;
    let s = ch.p1.sqrt() * c;
    let u = u_fresh + cp.lam2.sqrt() * t + cp.gamma1 * s;
    let w = w_fresh + cp.lam3.sqrt() * t + cp.gamma2 * s;
    let x2 = u_fresh + w_fresh + ((1.0 - cp.alpha) * ch.p2).sqrt() * c;

    let exprs = assemble(ch, t, s, u, w, x2);
    Ok(SignalSystem {
        basis_var,
        exprs,
        origin: Origin::Cooperative {
            channel: ch,
            coding: cp,
        },
    })
}

/// Builds the reduced system used by the baseline region: no relay, no `W`,
/// `S = X1 = √p1·C` with `C` a unit-variance basis element, `U = Ũ + γ·C`,
/// `X2 = Ũ + √((1−α)p2)·C`. Any `p3` in `ch` is ignored.
pub fn build_baseline_system(ch: ChannelParams, alpha: f64, gamma: f64, gamma_max: f64) -> Result<SignalSystem> {
    let ch = ChannelParams { p3: 0.0, ..ch };
    ch.validate()?;
    check_range("alpha", alpha, 0.0, 1.0, "within [0, 1]")?;
    check_range("gamma", gamma, 0.0, gamma_max, "within [0, gamma_max]")?;

    let basis_var = [1.0, 0.0, alpha * ch.p2, 0.0, 1.0, 1.0];
    let c = LinExpr::term(Basis::A, 1.0);
    let u_fresh = LinExpr::term(Basis::UTilde, 1.0);
    let s = ch.p1.sqrt() * c;
    let u = u_fresh + gamma * c;
    let x2 = u_fresh + ((1.0 - alpha) * ch.p2).sqrt() * c;

    let exprs = assemble(ch, LinExpr::ZERO, s, u, LinExpr::ZERO, x2);
    Ok(SignalSystem {
        basis_var,
        exprs,
        origin: Origin::Baseline {
            channel: ch,
            alpha,
            gamma,
        },
    })
}

fn assemble(ch: ChannelParams, t: LinExpr, s: LinExpr, u: LinExpr, w: LinExpr, x2: LinExpr) -> [LinExpr; Var::COUNT] {
    let x1 = s;
    let x3 = t;
    let y1 = x1 + ch.c21.sqrt() * x2 + x3 + LinExpr::term(Basis::Z1, 1.0);
    let y2 = x2 + ch.c12.sqrt() * x1 + LinExpr::term(Basis::Z2, 1.0);

    let mut exprs = [LinExpr::ZERO; Var::COUNT];
    exprs[Var::T.index()] = t;
    exprs[Var::V.index()] = s;
    exprs[Var::S.index()] = s;
    exprs[Var::U.index()] = u;
    exprs[Var::W.index()] = w;
    exprs[Var::X1.index()] = x1;
    exprs[Var::X2.index()] = x2;
    exprs[Var::X3.index()] = x3;
    exprs[Var::Y1.index()] = y1;
    exprs[Var::Y2.index()] = y2;
    exprs
}

impl SignalSystem {
    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn basis_variances(&self) -> &[f64; BASIS_LEN] {
        &self.basis_var
    }

    pub fn expr(&self, var: Var) -> &LinExpr {
        &self.exprs[var.index()]
    }

    /// Coefficients rescaled so that the basis has unit variance; the Gram
    /// matrix of whitened vectors is the covariance matrix.
    pub fn whitened(&self, var: Var) -> [f64; BASIS_LEN] {
        let e = self.expr(var);
        std::array::from_fn(|m| e.coeffs[m] * self.basis_var[m].sqrt())
    }

    pub fn covariance(&self, a: Var, b: Var) -> f64 {
        let (ea, eb) = (self.expr(a), self.expr(b));
        (0..BASIS_LEN)
            .map(|m| ea.coeffs[m] * eb.coeffs[m] * self.basis_var[m])
            .sum()
    }

    pub fn variance(&self, var: Var) -> f64 {
        self.covariance(var, var)
    }

    /// Covariance matrix of `names`, in the given order; duplicates allowed.
    pub fn covariance_matrix<N: AsRef<str>>(&self, names: &[N]) -> Result<DMatrix<f64>> {
        let vars = names
            .iter()
            .map(|n| n.as_ref().parse::<Var>())
            .collect::<Result<Vec<_>>>()?;
        Ok(self.covariance_of(&vars))
    }

    pub fn covariance_of(&self, vars: &[Var]) -> DMatrix<f64> {
        let k = vars.len();
        DMatrix::from_fn(k, k, |i, j| self.covariance(vars[i], vars[j]))
    }

    /// Returns a copy with `var` replaced by `factor` times itself. Only the
    /// named entry changes; aliases such as `V`/`S` are left untouched.
    pub fn scale_variable(&self, var: Var, factor: f64) -> SignalSystem {
        let mut out = self.clone();
        out.exprs[var.index()] = factor * out.exprs[var.index()];
        out
    }
}
