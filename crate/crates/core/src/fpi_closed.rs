//! Closed-form fundamental finite-part integrals.
//!
//! * branch: `∳₀^∞ (s+x)^{-υ} x^{-λ} dx`, λ not an integer
//! * pole: `∳₀^∞ (s+x)^{-υ} x^{-(n+1)} dx`
//! * beta: `∳₀^1 y^{σ-1} (1-y)^{-ρ} dy`, optionally weighted by `ln y`
//!
//! Gamma ratios are assembled in log space and exponentiated once.

use crate::error::{FpiError, Result};
use crate::special::{
    as_integer, as_nonpositive_integer, digamma, factorial, real, sin_pi, warn_if_near_integer, LogProduct, C64,
    INT_TOL, NEAR_INT_WARN,
};
use serde::Serialize;
use std::f64::consts::PI;

fn on_cut(s: C64) -> bool {
    s.im == 0.0 && s.re <= 0.0
}

fn nonzero(z: C64) -> bool {
    z.re != 0.0 || z.im != 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FpiBranchSpec {
    s: C64,
    upsilon: C64,
    lambda: C64,
}

impl FpiBranchSpec {
    pub fn new(s: C64, upsilon: C64, lambda: C64) -> Result<Self> {
        Self::with_int_tol(s, upsilon, lambda, INT_TOL)
    }

    pub fn with_int_tol(s: C64, upsilon: C64, lambda: C64, int_tol: f64) -> Result<Self> {
        if !s.re.is_finite() || !s.im.is_finite() || on_cut(s) {
            return Err(FpiError::domain(format!("s = {s} must satisfy |arg s| < π")));
        }
        if !nonzero(upsilon) {
            return Err(FpiError::domain("υ must be nonzero"));
        }
        if !(lambda.re > 0.0) {
            return Err(FpiError::domain(format!("Re λ must be positive, got λ = {lambda}")));
        }
        if as_integer(lambda, int_tol).is_some() {
            return Err(FpiError::domain(format!("λ = {lambda} is an integer; use the pole family")));
        }
        if !((lambda + upsilon).re > 1.0) {
            return Err(FpiError::domain("Re(λ+υ) must exceed 1"));
        }
        warn_if_near_integer("λ", lambda, NEAR_INT_WARN);
        Ok(Self { s, upsilon, lambda })
    }

    pub fn s(&self) -> C64 {
        self.s
    }

    pub fn upsilon(&self) -> C64 {
        self.upsilon
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FpiPoleSpec {
    s: C64,
    upsilon: C64,
    n: u64,
}

impl FpiPoleSpec {
    pub fn new(s: C64, upsilon: C64, n: u64) -> Result<Self> {
        if !s.re.is_finite() || !s.im.is_finite() || on_cut(s) {
            return Err(FpiError::domain(format!("s = {s} must satisfy |arg s| < π")));
        }
        if !nonzero(upsilon) {
            return Err(FpiError::domain("υ must be nonzero"));
        }
        if !(upsilon.re + n as f64 > 0.0) {
            return Err(FpiError::domain("Re(n+υ) must be positive"));
        }
        Ok(Self { s, upsilon, n })
    }

    pub fn s(&self) -> C64 {
        self.s
    }

    pub fn upsilon(&self) -> C64 {
        self.upsilon
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaFpiSpec {
    sigma: C64,
    rho: C64,
    #[serde(skip)]
    int_tol: f64,
}

impl BetaFpiSpec {
    pub fn new(sigma: C64, rho: C64) -> Result<Self> {
        Self::with_int_tol(sigma, rho, INT_TOL)
    }

    pub fn with_int_tol(sigma: C64, rho: C64, int_tol: f64) -> Result<Self> {
        if !(sigma.re > 0.0) {
            return Err(FpiError::domain(format!("Re σ must be positive, got σ = {sigma}")));
        }
        if !(rho.re > 0.0) {
            return Err(FpiError::domain(format!("Re ρ must be positive, got ρ = {rho}")));
        }
        if as_integer(rho, int_tol).is_some() {
            return Err(FpiError::domain(format!("ρ = {rho} is a positive integer")));
        }
        warn_if_near_integer("ρ", rho, NEAR_INT_WARN);
        Ok(Self { sigma, rho, int_tol })
    }

    pub fn sigma(&self) -> C64 {
        self.sigma
    }

    pub fn rho(&self) -> C64 {
        self.rho
    }
}

/// `π Γ(λ+υ-1) / (s^{λ+υ-1} sin(πλ) Γ(υ) Γ(λ))` without domain checks.
///
/// Also serves the analytic continuation to Re λ ≤ 0 used by series terms.
pub(crate) fn branch_lp(s: C64, upsilon: C64, lambda: C64) -> Result<LogProduct> {
    let sn = sin_pi(lambda);
    if !nonzero(sn) {
        return Err(FpiError::DegenerateParameters(format!("sin(πλ) vanishes at λ = {lambda}")));
    }
    let e = lambda + upsilon - 1.0;
    Ok(LogProduct::one()
        .scalar(real(PI) / sn)
        .gamma(e)?
        .rgamma(upsilon)
        .rgamma(lambda)
        .power(s, -e))
}

/// `(-1)^n (υ)_n / (s^{n+υ} n!) · (ln s + ψ(n+1) - ψ(n+υ))` without domain checks.
pub(crate) fn pole_lp(s: C64, upsilon: C64, n: u64) -> Result<LogProduct> {
    let bracket = crate::special::ln(s) + digamma(real(n as f64 + 1.0))? - digamma(upsilon + n as f64)?;
    Ok(LogProduct::one()
        .sign(n as i64)
        .pochhammer(upsilon, n)
        .rfactorial(n)
        .power(s, -(upsilon + n as f64))
        .scalar(bracket))
}

/// `π Γ(σ) / (sin(πρ) Γ(ρ) Γ(1+σ-ρ))`, exactly zero when σ-ρ is a negative integer.
pub(crate) fn beta_lp(sigma: C64, rho: C64) -> Result<LogProduct> {
    let sn = sin_pi(rho);
    if !nonzero(sn) {
        return Err(FpiError::DegenerateParameters(format!("sin(πρ) vanishes at ρ = {rho}")));
    }
    Ok(LogProduct::one()
        .scalar(real(PI) / sn)
        .gamma(sigma)?
        .rgamma(rho)
        .rgamma(sigma - rho + 1.0))
}

/// Log-weighted beta finite part, including the removable case σ-ρ = -(m+1).
pub(crate) fn beta_log_value(sigma: C64, rho: C64, int_tol: f64) -> Result<C64> {
    if let Some(k) = as_nonpositive_integer(sigma - rho + 1.0, int_tol) {
        // 1/Γ(1+σ-ρ) vanishes while ψ(σ-ρ+1) blows up; the product tends to (-1)^{m+1} m!
        let m = k;
        let v = LogProduct::one()
            .sign(m as i64)
            .scalar(real(PI) / sin_pi(rho))
            .gamma(sigma)?
            .real(factorial(m))
            .rgamma(rho)
            .value();
        return Ok(v);
    }
    let base = beta_lp(sigma, rho)?.value();
    Ok(base * (digamma(sigma)? - digamma(sigma - rho + 1.0)?))
}

/// Finite part of `∫₀^∞ (s+x)^{-υ} x^{-λ} dx`.
pub fn fpi_branch_infinite(spec: &FpiBranchSpec) -> C64 {
    branch_lp(spec.s, spec.upsilon, spec.lambda).map(LogProduct::value).unwrap_or(C64::new(f64::NAN, f64::NAN))
}

/// Finite part of `∫₀^∞ (s+x)^{-υ} x^{-(n+1)} dx`.
pub fn fpi_pole_infinite(spec: &FpiPoleSpec) -> C64 {
    pole_lp(spec.s, spec.upsilon, spec.n).map(LogProduct::value).unwrap_or(C64::new(f64::NAN, f64::NAN))
}

/// Finite part of `∫₀^1 y^{σ-1}(1-y)^{-ρ} dy`.
pub fn beta_fpi(spec: &BetaFpiSpec) -> C64 {
    if as_nonpositive_integer(spec.sigma - spec.rho + 1.0, spec.int_tol).is_some() {
        return C64::new(0.0, 0.0);
    }
    beta_lp(spec.sigma, spec.rho).map(LogProduct::value).unwrap_or(C64::new(f64::NAN, f64::NAN))
}

/// Finite part of `∫₀^1 y^{σ-1}(1-y)^{-ρ} ln y dy`.
pub fn beta_fpi_log(spec: &BetaFpiSpec) -> C64 {
    beta_log_value(spec.sigma, spec.rho, spec.int_tol).unwrap_or(C64::new(f64::NAN, f64::NAN))
}
