//! Closed-form evaluation of the level-set Bellman surface and everything
//! attached to it.
//!
//! For fixed `r > 0` put `ω_0 = 2^{-1/r}`. The central objects are:
//!
//! ```text
//! ω_n(r) = ((2^r - 1) / (2^{nr} (2^{r+1} - 1) - 1))^{1/r}      (decreasing)
//! φ_r(ω) = ω / (1 + ω^r)^{1/r}                                  (jump map)
//! 𝔣_r    = linear interpolation through (ω_n, 2^{-n}), the A = 2 boundary
//! M_r    = the piecewise-linear surface on [0,∞) × [0,2]
//! Φ_r    = the smooth concave envelope touching M_r along the seams
//! C(r)   = ((2^{r+1} - 1)/(2^r - 1))^{1/r}, the sharp weak-(1,1) constant
//! ```
//!
//! `M_r` is assembled from four regions: two flat trapezoids (`Σ_0` where
//! the value is 1, `Σ_1` where it is `A`), a linear triangle `Δ_0`, and the
//! fan `Δ` of triangles ruled by `𝔣_r`. Adjacent formulas agree on shared
//! boundaries, so the tie-break order in [`classify_region`] does not
//! affect values.
//!
//! Everything here is a stateless pure function; quantities that would
//! overflow `f64` for large `n·r` are computed in log space.

use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ClosedFormError {
    #[error("parameter {name} = {value} outside its domain")]
    BadParameter { name: &'static str, value: f64 },
    #[error("point (ω, A) = ({omega}, {a}) outside [0,∞) × [0,2]")]
    OutsideDomain { omega: f64, a: f64 },
    #[error("envelope requires ω ≤ A, got (ω, A) = ({omega}, {a})")]
    EnvelopeDomain { omega: f64, a: f64 },
}

fn check_r(r: f64) -> Result<(), ClosedFormError> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(ClosedFormError::BadParameter {
            name: "r",
            value: r,
        })
    }
}

/// `ln(e^t - 1)` for `t > 0`, stable across the whole range.
fn ln_expm1(t: f64) -> f64 {
    if t < 700.0 {
        t.exp_m1().ln()
    } else {
        t + (-(-t).exp()).ln_1p()
    }
}

/// `ln(e^a + e^b)` without overflow.
fn log_sum_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// The decreasing sequence `ω_n(r) = ((2^r-1)/(2^{nr}(2^{r+1}-1)-1))^{1/r}`
/// with `ω_0 = 2^{-1/r}`; satisfies the recursion `ω_n = φ_r(ω_{n-1}/2)`.
pub fn omega_seq(r: f64, n: u32) -> Result<f64, ClosedFormError> {
    check_r(r)?;
    Ok(omega_seq_unchecked(r, n))
}

pub(crate) fn omega_seq_unchecked(r: f64, n: u32) -> f64 {
    let nr = n as f64 * r;
    if nr + r + 1.0 <= 1000.0 {
        let num = r.exp2() - 1.0;
        let den = nr.exp2() * ((r + 1.0).exp2() - 1.0) - 1.0;
        (num / den).powf(1.0 / r)
    } else {
        let ln_num = ln_expm1(r * LN_2);
        let ln_den = ln_expm1(nr * LN_2 + ln_expm1((r + 1.0) * LN_2));
        ((ln_num - ln_den) / r).exp()
    }
}

/// `ω_0 = 2^{-1/r}`, the right edge of the interpolation range of `𝔣_r`.
pub fn omega_zero(r: f64) -> Result<f64, ClosedFormError> {
    omega_seq(r, 0)
}

/// The jump map `φ_r(ω) = ω / (1 + ω^r)^{1/r}`: strictly increasing,
/// strictly concave, `φ_r(ω) ≤ ω`, with limit 1 at infinity.
pub fn phi(r: f64, omega: f64) -> Result<f64, ClosedFormError> {
    check_r(r)?;
    if omega.is_nan() || omega < 0.0 {
        return Err(ClosedFormError::BadParameter {
            name: "omega",
            value: omega,
        });
    }
    if omega == 0.0 {
        return Ok(0.0);
    }
    let p = omega.powf(r);
    if p.is_finite() {
        Ok(omega / (1.0 + p).powf(1.0 / r))
    } else {
        // ω^r overflowed: φ = (1 + ω^{-r})^{-1/r}
        Ok((-omega.powf(-r).ln_1p() / r).exp())
    }
}

/// The `A = 2` boundary function `𝔣_r`: zero at zero, one for `ω ≥ ω_0`,
/// and on `[ω_n, ω_{n-1})` the linear interpolation
/// `2^{-n} (1 + (ω - ω_n)/(ω_{n-1} - ω_n))`. Piecewise linear, concave,
/// nondecreasing.
pub fn boundary_f(r: f64, omega: f64) -> Result<f64, ClosedFormError> {
    check_r(r)?;
    if omega.is_nan() || omega < 0.0 {
        return Err(ClosedFormError::BadParameter {
            name: "omega",
            value: omega,
        });
    }
    Ok(boundary_f_unchecked(r, omega))
}

pub(crate) fn boundary_f_unchecked(r: f64, omega: f64) -> f64 {
    if omega <= 0.0 {
        return 0.0;
    }
    if omega >= omega_seq_unchecked(r, 0) {
        return 1.0;
    }
    let n = locate_segment(r, omega);
    let hi = omega_seq_unchecked(r, n - 1);
    let lo = omega_seq_unchecked(r, n);
    2f64.powi(-(n as i32)) * (1.0 + (omega - lo) / (hi - lo))
}

/// Smallest `n ≥ 1` with `ω_n ≤ omega`, for `0 < omega < ω_0`. A closed-form
/// logarithmic estimate followed by integer verification against the
/// computed sequence, so the bracket `ω_n ≤ omega < ω_{n-1}` holds exactly
/// with respect to `omega_seq` values.
fn locate_segment(r: f64, omega: f64) -> u32 {
    // ω_n ≤ ω  ⟺  2^{nr} ≥ ((2^r - 1) ω^{-r} + 1) / (2^{r+1} - 1)
    let ln_e = ln_expm1(r * LN_2) - r * omega.ln();
    let ln_t = if ln_e > 700.0 {
        ln_e
    } else {
        ln_e.exp().ln_1p()
    };
    let guess = (ln_t - ln_expm1((r + 1.0) * LN_2)) / (r * LN_2);
    let mut n = if guess.is_finite() {
        guess.ceil().clamp(1.0, 1e9) as u32
    } else {
        1
    };
    // The computed sequence is non-increasing and eventually underflows to
    // zero, so both adjustment loops terminate.
    while omega < omega_seq_unchecked(r, n) {
        n += 1;
    }
    while n > 1 && omega >= omega_seq_unchecked(r, n - 1) {
        n -= 1;
    }
    n
}

/// The `A = 1` section `𝐠(ω) = M_r(ω, 1)`.
pub fn boundary_g(r: f64, omega: f64) -> Result<f64, ClosedFormError> {
    check_r(r)?;
    if omega.is_nan() || omega < 0.0 {
        return Err(ClosedFormError::BadParameter {
            name: "omega",
            value: omega,
        });
    }
    let w0 = omega_seq_unchecked(r, 0);
    Ok(if omega < 0.5 * w0 {
        0.5 * boundary_f_unchecked(r, 2.0 * omega)
    } else if omega < 1.0 {
        (omega + 1.0 - w0) / (2.0 - w0)
    } else {
        1.0
    })
}

/// The four regions partitioning `[0,∞) × [0,2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionLabel {
    /// Flat top: value 1. `A ≥ max(1, 1 + (1-ω)/(1-ω_0))`.
    #[serde(rename = "SIGMA0")]
    Sigma0,
    /// Plane `z = A`: `A < min(1, ω)`.
    #[serde(rename = "SIGMA1")]
    Sigma1,
    /// Linear triangle between the two: everything else below `Δ`.
    #[serde(rename = "DELTA0")]
    Delta0,
    /// Fan of triangles ruled by `𝔣_r`: `A > 2ω/ω_0`.
    #[serde(rename = "DELTA")]
    Delta,
}

impl RegionLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::Sigma0 => "SIGMA0",
            RegionLabel::Sigma1 => "SIGMA1",
            RegionLabel::Delta0 => "DELTA0",
            RegionLabel::Delta => "DELTA",
        }
    }
}

/// Classifies `(ω, A)`, resolving boundary ties in the order
/// `Σ_0 → Σ_1 → Δ → Δ_0`. Adjacent region formulas agree on shared
/// boundaries, so the tie-break never affects `M_r` values.
pub fn classify_region(r: f64, omega: f64, a: f64) -> Result<RegionLabel, ClosedFormError> {
    check_r(r)?;
    check_domain(omega, a)?;
    let w0 = omega_seq_unchecked(r, 0);
    Ok(classify_unchecked(w0, omega, a))
}

fn classify_unchecked(w0: f64, omega: f64, a: f64) -> RegionLabel {
    // A ≥ max(1, 1 + (1-ω)/(1-ω_0)) rearranged to ω ≥ (2-A) + (A-1) ω_0,
    // which stays exact when ω_0 underflows against 1 (tiny r)
    if a >= 1.0 && omega >= (2.0 - a) + (a - 1.0) * w0 {
        RegionLabel::Sigma0
    } else if a < omega.min(1.0) {
        RegionLabel::Sigma1
    } else if a > 2.0 * omega / w0 {
        RegionLabel::Delta
    } else {
        RegionLabel::Delta0
    }
}

fn check_domain(omega: f64, a: f64) -> Result<(), ClosedFormError> {
    // ω = +∞ is admitted: the flat regions extend to infinity and the
    // homogeneity reduction can land there for tiny λ.
    if omega.is_nan() || omega < 0.0 || !(0.0..=2.0).contains(&a) {
        return Err(ClosedFormError::OutsideDomain { omega, a });
    }
    Ok(())
}

/// The Bellman surface `M_r(ω, A)` on `[0,∞) × [0,2]`.
pub fn bellman_m(r: f64, omega: f64, a: f64) -> Result<f64, ClosedFormError> {
    let region = classify_region(r, omega, a)?;
    Ok(region_formula_unchecked(r, region, omega, a))
}

/// Evaluates the formula of one fixed region at `(ω, A)`, whether or not
/// the point lies in that region. Exposed so boundary continuity between
/// adjacent formulas can be checked directly.
pub fn region_formula(
    r: f64,
    region: RegionLabel,
    omega: f64,
    a: f64,
) -> Result<f64, ClosedFormError> {
    check_r(r)?;
    check_domain(omega, a)?;
    Ok(region_formula_unchecked(r, region, omega, a))
}

fn region_formula_unchecked(r: f64, region: RegionLabel, omega: f64, a: f64) -> f64 {
    match region {
        RegionLabel::Sigma0 => 1.0,
        RegionLabel::Sigma1 => a,
        RegionLabel::Delta0 => {
            let w0 = omega_seq_unchecked(r, 0);
            (omega + (1.0 - w0) * a) / (2.0 - w0)
        }
        RegionLabel::Delta => {
            if a == 0.0 {
                // only reachable through region_formula: Δ itself needs A > 0
                return 0.0;
            }
            0.5 * a * boundary_f_unchecked(r, 2.0 * omega / a)
        }
    }
}

/// A point of the three-variable Bellman domain `[0,∞) × [0,2] × ℝ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellmanPoint {
    x: f64,
    a: f64,
    lambda: f64,
}

impl BellmanPoint {
    pub fn new(x: f64, a: f64, lambda: f64) -> Result<Self, ClosedFormError> {
        if !x.is_finite() || x < 0.0 {
            return Err(ClosedFormError::BadParameter {
                name: "x",
                value: x,
            });
        }
        if !(0.0..=2.0).contains(&a) {
            return Err(ClosedFormError::BadParameter {
                name: "A",
                value: a,
            });
        }
        if lambda.is_nan() {
            return Err(ClosedFormError::BadParameter {
                name: "lambda",
                value: lambda,
            });
        }
        Ok(BellmanPoint { x, a, lambda })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// The full Bellman function `B_r(x, A, λ)`: 1 on the obstacle `λ ≤ 0`,
/// and `M_r(x λ^{-1/r}, A)` by homogeneity for `λ > 0`.
pub fn bellman_b(r: f64, point: &BellmanPoint) -> Result<f64, ClosedFormError> {
    check_r(r)?;
    if point.lambda <= 0.0 {
        return Ok(1.0);
    }
    let omega = if point.x == 0.0 {
        0.0
    } else {
        point.x * point.lambda.powf(-1.0 / r)
    };
    bellman_m(r, omega, point.a)
}

/// The smooth concave envelope
/// `Φ_r(ω, A) = Aω ((2^{r+1}-1)/(2^r ω^r + (2^r-1) A^r))^{1/r}` on
/// `0 ≤ ω ≤ A ≤ 2`. Dominates `M_r` there, with equality along the seams
/// `[O G_0]` and `[O F_n]`.
pub fn envelope_phi(r: f64, omega: f64, a: f64) -> Result<f64, ClosedFormError> {
    check_r(r)?;
    check_domain(omega, a)?;
    if omega > a {
        return Err(ClosedFormError::EnvelopeDomain { omega, a });
    }
    if omega == 0.0 {
        return Ok(0.0);
    }
    // 2^r ω^r = (2ω)^r; branch to log space when powers leave f64 range.
    let t_omega = r * (2.0 * omega).ln();
    let t_a = r * a.ln();
    if r <= 256.0 && t_omega.abs() < 600.0 && t_a.abs() < 600.0 {
        let num = (r + 1.0).exp2() - 1.0;
        let den = (2.0 * omega).powf(r) + (r.exp2() - 1.0) * a.powf(r);
        Ok(a * omega * (num / den).powf(1.0 / r))
    } else {
        let ln_num = ln_expm1((r + 1.0) * LN_2);
        let ln_den = log_sum_exp(t_omega, ln_expm1(r * LN_2) + t_a);
        Ok((a.ln() + omega.ln() + (ln_num - ln_den) / r).exp())
    }
}

/// The sharp weak-(1,1) constant `C(r) = ((2^{r+1}-1)/(2^r-1))^{1/r}`.
pub fn weak_norm_constant(r: f64) -> Result<f64, ClosedFormError> {
    check_r(r)?;
    Ok(if r <= 1000.0 {
        (((r + 1.0).exp2() - 1.0) / (r.exp2() - 1.0)).powf(1.0 / r)
    } else {
        ((ln_expm1((r + 1.0) * LN_2) - ln_expm1(r * LN_2)) / r).exp()
    })
}

/// The sharp weak-(p,p) constant of the power-mean operator,
/// `C(1/p)^{1/p} = (2·2^{1/p} - 1)/(2^{1/p} - 1)` for `p ≥ 1`.
pub fn power_mean_constant(p: f64) -> Result<f64, ClosedFormError> {
    if !p.is_finite() || p < 1.0 {
        return Err(ClosedFormError::BadParameter {
            name: "p",
            value: p,
        });
    }
    let t = (1.0 / p).exp2();
    Ok((2.0 * t - 1.0) / (t - 1.0))
}

/// Pointwise limit surface as `r → 0+` (also `sup_r M_r`):
/// `min(1, A, (ω+A)/2)`.
pub fn limit_surface_zero(omega: f64, a: f64) -> f64 {
    1f64.min(a).min(0.5 * (omega + a))
}

/// Pointwise limit surface as `r → ∞` (also `inf_r M_r`): `min(1, A, ω)`.
pub fn limit_surface_inf(omega: f64, a: f64) -> f64 {
    1f64.min(a).min(omega)
}
