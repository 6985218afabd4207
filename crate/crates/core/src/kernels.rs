//! Covariance kernels of the physics-informed beam model.
//!
//! The bending deflection `w_b` is a zero-mean GP with a squared-exponential
//! covariance. Every other beam quantity is a linear differential operator
//! applied to `w_b`:
//!
//! | quantity | operator on `w_b`            |
//! |----------|------------------------------|
//! | `w`      | `1 - c D²`                   |
//! | `φ`      | `D - c D³`                   |
//! | `ε`      | `-z (D² - c D⁴)`             |
//! | `M`      | `EI D²`                      |
//! | `V`      | `EI D³`                      |
//! | `q`      | `EI D⁴`                      |
//!
//! with `c = EI / kGA`. The covariance between quantities `i` at `x` and `j`
//! at `x'` is `L_i L'_j k(x, x')`, so every kernel is a short polynomial in
//! `c` whose terms are mixed partials of the SE kernel. Those mixed partials
//! have the closed form
//!
//! ```text
//! ∂ᵐ/∂xᵐ ∂ⁿ/∂x'ⁿ k = σ² (-1)ᵐ ℓ^-(m+n) He_{m+n}(u) exp(-u²/2),  u = (x - x')/ℓ
//! ```
//!
//! where `He_p` are the probabilists' Hermite polynomials, tabulated below.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest derivative order per argument used by the beam operators.
pub const MAX_ORDER: usize = 4;

/// Coefficients of `He_0 .. He_8`, lowest power first.
///
/// Generated from `He_{p+1}(u) = u He_p(u) - p He_{p-1}(u)`; the unit tests
/// regenerate the table from the recursion.
pub const HERMITE: [[f64; 9]; 9] = [
    [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, -3.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0, 0.0, -6.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 15.0, 0.0, -10.0, 0.0, 1.0, 0.0, 0.0, 0.0],
    [-15.0, 0.0, 45.0, 0.0, -15.0, 0.0, 1.0, 0.0, 0.0],
    [0.0, -105.0, 0.0, 105.0, 0.0, -21.0, 0.0, 1.0, 0.0],
    [105.0, 0.0, -420.0, 0.0, 210.0, 0.0, -28.0, 0.0, 1.0],
];

/// The six observable beam quantities, in covariance block order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum QuantityKind {
    #[serde(rename = "w")]
    Deflection,
    #[serde(rename = "phi")]
    Rotation,
    #[serde(rename = "eps")]
    Strain,
    #[serde(rename = "M")]
    Moment,
    #[serde(rename = "V")]
    Shear,
    #[serde(rename = "q")]
    Load,
}

impl QuantityKind {
    pub const ALL: [QuantityKind; 6] = [
        QuantityKind::Deflection,
        QuantityKind::Rotation,
        QuantityKind::Strain,
        QuantityKind::Moment,
        QuantityKind::Shear,
        QuantityKind::Load,
    ];

    /// Short symbol used in CSV files.
    pub fn symbol(self) -> &'static str {
        match self {
            QuantityKind::Deflection => "w",
            QuantityKind::Rotation => "phi",
            QuantityKind::Strain => "eps",
            QuantityKind::Moment => "M",
            QuantityKind::Shear => "V",
            QuantityKind::Load => "q",
        }
    }

    /// Position of the kind's block in the joint covariance.
    pub fn block_index(self) -> usize {
        self as usize
    }

    pub fn needs_depth(self) -> bool {
        self == QuantityKind::Strain
    }
}

impl fmt::Display for QuantityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for QuantityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "w" => Ok(QuantityKind::Deflection),
            "phi" => Ok(QuantityKind::Rotation),
            "eps" => Ok(QuantityKind::Strain),
            "M" => Ok(QuantityKind::Moment),
            "V" => Ok(QuantityKind::Shear),
            "q" => Ok(QuantityKind::Load),
            other => Err(Error::Argument(format!(
                "unknown quantity `{other}` (expected one of w, phi, eps, M, V, q)"
            ))),
        }
    }
}

/// Hyperparameters entering the kernels.
///
/// `z` and `z_prime` are the strain depths of the first and second argument;
/// they only matter when a strain quantity participates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub sigma_s2: f64,
    pub ell: f64,
    pub ei: f64,
    pub kga: f64,
    #[serde(default)]
    pub z: f64,
    #[serde(default)]
    pub z_prime: f64,
}

impl KernelParams {
    pub fn new(sigma_s2: f64, ell: f64, ei: f64, kga: f64) -> Self {
        KernelParams {
            sigma_s2,
            ell,
            ei,
            kga,
            z: 0.0,
            z_prime: 0.0,
        }
    }

    pub fn with_depths(mut self, z: f64, z_prime: f64) -> Self {
        self.z = z;
        self.z_prime = z_prime;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && !v.is_nan();
        if ok(self.sigma_s2) && ok(self.ell) && ok(self.ei) && ok(self.kga) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "kernel parameters must be positive: sigma_s2={}, ell={}, EI={}, kGA={}",
                self.sigma_s2, self.ell, self.ei, self.kga
            )))
        }
    }

    /// Shear flexibility ratio `EI / kGA`.
    pub fn shear_ratio(&self) -> f64 {
        self.ei / self.kga
    }
}

fn hermite(p: usize, u: f64) -> f64 {
    HERMITE[p].iter().rev().fold(0.0, |acc, &c| acc * u + c)
}

/// Squared-exponential covariance of the bending deflection.
pub fn se_base(x: f64, x_prime: f64, params: &KernelParams) -> f64 {
    let u = (x - x_prime) / params.ell;
    params.sigma_s2 * (-0.5 * u * u).exp()
}

/// Mixed partial `∂ᵐ/∂xᵐ ∂ⁿ/∂x'ⁿ` of [`se_base`], for `m, n ≤ 4`.
pub fn se_derivative(
    m: usize,
    n: usize,
    x: f64,
    x_prime: f64,
    params: &KernelParams,
) -> Result<f64> {
    if m > MAX_ORDER || n > MAX_ORDER {
        return Err(Error::Argument(format!(
            "derivative order ({m}, {n}) out of range 0..={MAX_ORDER}"
        )));
    }
    let u = (x - x_prime) / params.ell;
    Ok(se_derivative_unchecked(m + n, m % 2 == 1, u, params))
}

#[inline]
fn se_derivative_unchecked(order: usize, negate: bool, u: f64, params: &KernelParams) -> f64 {
    let v = params.sigma_s2
        * params.ell.powi(-(order as i32))
        * hermite(order, u)
        * (-0.5 * u * u).exp();
    if negate {
        -v
    } else {
        v
    }
}

/// One term `coeff · Dᵖ` of a differential operator acting on `w_b`.
#[derive(Debug, Clone, Copy)]
struct Term {
    coeff: f64,
    order: usize,
}

/// Operator of `kind` as at most two terms.
fn operator(
    kind: QuantityKind,
    depth: f64,
    params: &KernelParams,
    timoshenko: bool,
) -> [Option<Term>; 2] {
    let c = if timoshenko {
        params.shear_ratio()
    } else {
        0.0
    };
    let t = |coeff, order| Some(Term { coeff, order });
    let shear_term = |coeff: f64, order| if timoshenko { t(coeff, order) } else { None };
    match kind {
        QuantityKind::Deflection => [t(1.0, 0), shear_term(-c, 2)],
        QuantityKind::Rotation => [t(1.0, 1), shear_term(-c, 3)],
        QuantityKind::Strain => [t(-depth, 2), shear_term(depth * c, 4)],
        QuantityKind::Moment => [t(params.ei, 2), None],
        QuantityKind::Shear => [t(params.ei, 3), None],
        QuantityKind::Load => [t(params.ei, 4), None],
    }
}

fn apply(
    i: QuantityKind,
    j: QuantityKind,
    x: f64,
    x_prime: f64,
    params: &KernelParams,
    timoshenko: bool,
) -> f64 {
    let u = (x - x_prime) / params.ell;
    let left = operator(i, params.z, params, timoshenko);
    let right = operator(j, params.z_prime, params, timoshenko);
    let mut acc = 0.0;
    for a in left.iter().flatten() {
        for b in right.iter().flatten() {
            let d = se_derivative_unchecked(a.order + b.order, a.order % 2 == 1, u, params);
            acc += a.coeff * b.coeff * d;
        }
    }
    acc
}

/// Timoshenko-level covariance between quantity `i` at `x` and quantity `j`
/// at `x_prime`. Strain depths are taken from `params.z` / `params.z_prime`.
pub fn kernel(
    i: QuantityKind,
    j: QuantityKind,
    x: f64,
    x_prime: f64,
    params: &KernelParams,
) -> f64 {
    apply(i, j, x, x_prime, params, true)
}

/// Euler-Bernoulli covariance: deflection, rotation and strain are the
/// bending parts `w_b`, `φ_b`, `ε_b`; moment, shear and load are unchanged.
pub fn bernoulli_kernel(
    i: QuantityKind,
    j: QuantityKind,
    x: f64,
    x_prime: f64,
    params: &KernelParams,
) -> f64 {
    apply(i, j, x, x_prime, params, false)
}

/// Prior variance `k_ii(x, x)` of a quantity (strain at depth `z`).
pub fn prior_variance(kind: QuantityKind, z: f64, params: &KernelParams) -> f64 {
    kernel(kind, kind, 0.0, 0.0, &params.with_depths(z, z))
}
