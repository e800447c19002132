//! `₃F₂(β, ν, 1; β+σ, n; z)` near `z = 1`.
//!
//! The function is tied to the Stieltjes-type integral
//! `K(x) = ∫₀^∞ s^{β-n} ((1-x)^{-1} + s)^{n-ν-1} (1+s)^{-(β+σ-ν)} ds`
//! through
//!
//! ```text
//! Γ(β)Γ(σ)(ν-n+1)_{n-1} z^{n-1} / (Γ(β+σ)(n-1)!) · ₃F₂ = (1-z)^{n-ν-1} K(z) - Γ(σ) T(z)
//! ```
//!
//! where `T` is a finite polynomial tail. Expanding `K` about `x = 1` gives
//! transformation formulas for the three cases `σ - ν ∉ ℤ`, `σ = m - n + ν`
//! and `σ = ν - m - n`.

use crate::config::EvalConfig;
use crate::error::{FpiError, Result};
use crate::fpi_closed::{branch_lp, pole_lp};
use crate::hyp2f1::{gauss_2f1_nu1_n, hyper_log_sum, hyper_sum};
use crate::quad::{integrate, Interval, Node, QuadOptions};
use crate::special::{
    as_integer, binomial_complex, factorial, ln, pochhammer, pow, real, sin_pi, warn_if_near_integer, LogProduct, C64, INT_TOL,
    NEAR_INT_WARN,
};
use crate::sum::{csum, sum_series, SeriesResult};
use serde::Serialize;
use std::f64::consts::PI;

const MAX_ONE_MINUS_Z: f64 = 0.9;

/// Parameters of `₃F₂(β, ν, 1; β+σ, n; z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreeF2Params {
    beta: C64,
    nu: C64,
    n: u64,
    sigma: C64,
    z: C64,
    #[serde(skip)]
    int_tol: f64,
}

impl ThreeF2Params {
    pub fn new(beta: C64, nu: C64, n: u64, sigma: C64, z: C64) -> Result<Self> {
        Self::with_int_tol(beta, nu, n, sigma, z, INT_TOL)
    }

    pub fn with_int_tol(beta: C64, nu: C64, n: u64, sigma: C64, z: C64, int_tol: f64) -> Result<Self> {
        if n == 0 {
            return Err(FpiError::domain("n must be at least 1"));
        }
        if as_integer(nu, int_tol).is_some() {
            return Err(FpiError::domain(format!("ν = {nu} must not be an integer")));
        }
        if !(sigma.re > 0.0) {
            return Err(FpiError::domain(format!("Re σ must be positive, got {sigma}")));
        }
        if !((beta + sigma - nu).re > 0.0) {
            return Err(FpiError::domain("Re(β+σ-ν) must be positive"));
        }
        warn_if_near_integer("ν", nu, NEAR_INT_WARN);
        Ok(Self { beta, nu, n, sigma, z, int_tol })
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    pub fn nu(&self) -> C64 {
        self.nu
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn sigma(&self) -> C64 {
        self.sigma
    }

    pub fn z(&self) -> C64 {
        self.z
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `λ = β + σ - ν`, the exponent of the kernel `(1+s)^{-λ}`.
    fn lambda(&self) -> C64 {
        self.beta + self.sigma - self.nu
    }

    /// Factor turning the transformed left side back into `₃F₂`:
    /// `Γ(β+σ)(n-1)! / (Γ(β) (ν-n+1)_{n-1} z^{n-1})`.
    fn lhs_factor(&self) -> Result<C64> {
        let nf = self.nf();
        let lp = LogProduct::one()
            .gamma(self.beta + self.sigma)?
            .rgamma(self.beta)
            .factorial(self.n - 1)
            .rpochhammer(self.nu - nf + 1.0, self.n - 1)?
            .power(self.z, real(1.0 - nf));
        if self.beta.re <= 0.0 && lp.is_zero() {
            return Err(FpiError::DegenerateParameters("1/Γ(β) vanishes".into()));
        }
        Ok(lp.value())
    }

    fn near_one(&self) -> Result<C64> {
        let w = 1.0 - self.z;
        if w.norm() > MAX_ONE_MINUS_Z {
            return Err(FpiError::domain(format!("|1-z| = {} exceeds {MAX_ONE_MINUS_Z}", w.norm())));
        }
        if w.im == 0.0 && w.re <= 0.0 {
            return Err(FpiError::domain("1-z lies on the branch cut"));
        }
        Ok(w)
    }
}

/// Canonical `ₚF_q` partial sums.
pub fn pfq_series(upper: &[C64], lower: &[C64], z: C64, cfg: &EvalConfig) -> Result<SeriesResult> {
    if upper.len() > lower.len() + 1 {
        return Err(FpiError::domain("p > q+1 gives a divergent series"));
    }
    if upper.len() == lower.len() + 1 && z.norm() > 0.95 {
        return Err(FpiError::domain(format!("|z| = {} exceeds 0.95", z.norm())));
    }
    hyper_sum(upper, lower, z, cfg)?.require_converged()
}

fn canonical(p: &ThreeF2Params, cfg: &EvalConfig) -> Result<SeriesResult> {
    pfq_series(&[p.beta, p.nu, real(1.0)], &[p.beta + p.sigma, real(p.nf())], p.z, cfg)
}

/// `₃F₂` from its beta-integral representation
/// `Γ(β+σ)/(Γ(β)Γ(σ)) ∫₀^∞ s^{β-1}(1+s)^{-β-σ} ₂F₁(ν, 1; n; zs/(s+1)) ds`,
/// integrated in `u = s/(1+s)` for real `0 ≤ z < 1`.
pub fn threef2_integral_direct(p: &ThreeF2Params) -> Result<C64> {
    if p.z.im != 0.0 || !(0.0..1.0).contains(&p.z.re) {
        return Err(FpiError::domain("the integral path needs real 0 ≤ z < 1"));
    }
    if !(p.beta.re > p.nf() - 1.0) {
        return Err(FpiError::domain("the integral path needs Re β > n-1"));
    }
    if p.z.re == 0.0 {
        return Ok(real(1.0));
    }
    let z = p.z.re;
    let (beta, sigma, nu, n) = (p.beta, p.sigma, p.nu, p.n);
    let f = |node: Node| {
        let (u, v) = (node.from_lower, node.to_upper);
        if u == 0.0 || v == 0.0 {
            return real(0.0);
        }
        let inner = gauss_2f1_nu1_n(nu, n, real(z * node.x)).unwrap_or(C64::new(f64::NAN, f64::NAN));
        ((beta - 1.0) * u.ln() + (sigma - 1.0) * v.ln()).exp() * inner
    };
    let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-12, ..QuadOptions::default() };
    let q = integrate(f, Interval::Finite(0.0, 1.0), &[], &opts)?;
    let pre = LogProduct::one().gamma(beta + sigma)?.rgamma(beta).rgamma(sigma).value();
    Ok(pre * q.value)
}

/// `Σ_{k=0}^{n-2} (ν-n+1)_k Γ(β-n+1+k)/Γ(β+σ-n+1+k) z^k`, the finite tail in powers of `z`.
pub fn finite_tail_power(p: &ThreeF2Params) -> Result<C64> {
    let nf = p.nf();
    let mut terms = Vec::new();
    for k in 0..p.n.saturating_sub(1) {
        let kf = k as f64;
        let g = LogProduct::one().gamma(p.beta - nf + 1.0 + kf)?.rgamma(p.beta + p.sigma - nf + 1.0 + kf).value();
        terms.push(pochhammer(p.nu - nf + 1.0, k) * g * p.z.powu(k as u32));
    }
    Ok(csum(terms))
}

/// The same tail re-expanded in powers of `z - 1`.
pub fn finite_tail(p: &ThreeF2Params) -> Result<C64> {
    let nf = p.nf();
    let top = p.n.saturating_sub(1);
    let mut coef = Vec::with_capacity(top as usize);
    for k in 0..top {
        let kf = k as f64;
        let g = LogProduct::one().gamma(p.beta - nf + 1.0 + kf)?.rgamma(p.beta + p.sigma - nf + 1.0 + kf).value();
        coef.push(pochhammer(p.nu - nf + 1.0, k) * g);
    }
    let zm1 = p.z - 1.0;
    Ok(csum((0..top).map(|l| {
        let inner = csum((l..top).map(|k| coef[k as usize] * (factorial(k) / factorial(k - l))));
        inner * zm1.powu(l as u32) / factorial(l)
    })))
}

/// `σ - ν ∉ ℤ`, `β + σ - ν ∉ ℤ`: two `₂F₁` in `1-z` with `csc π(σ-ν)` weights, minus the tail.
pub fn threef2_transform_general(p: &ThreeF2Params, cfg: &EvalConfig) -> Result<SeriesResult> {
    let w = p.near_one()?;
    if as_integer(p.sigma - p.nu, p.int_tol).is_some() || as_integer(p.lambda(), p.int_tol).is_some() {
        return Err(FpiError::UnsupportedCase("needs σ-ν and β+σ-ν non-integer".into()));
    }
    let (beta, nu, sigma) = (p.beta, p.nu, p.sigma);
    let nf = p.nf();
    let d = sigma - nu;
    let lam = p.lambda();
    let sign = if p.n % 2 == 0 { 1.0 } else { -1.0 };
    let c = real(sign * PI) / sin_pi(d);
    let a = LogProduct::one()
        .scalar(c)
        .power(w, d + nf - 1.0)
        .rgamma(nu - nf + 1.0)
        .rgamma(d + nf)
        .value();
    let b = -LogProduct::one()
        .scalar(c)
        .gamma(beta - nf + 1.0)?
        .rgamma(sigma)
        .rgamma(lam)
        .rgamma(2.0 - nf - d)
        .value();
    let f1 = hyper_sum(&[sigma, lam], &[d + nf], w, cfg)?;
    let f2 = hyper_sum(&[nu - nf + 1.0, beta - nf + 1.0], &[2.0 - nf - d], w, cfg)?;
    let rhs = f1.combine(a, f2, b).add_exact(-finite_tail(p)?);
    Ok(rhs.scale(p.lhs_factor()?)).and_then(SeriesResult::require_converged)
}

fn case_integer(value: C64, tol: f64, what: &str, min: i64) -> Result<u64> {
    match as_integer(value, tol) {
        Some(m) if m >= min => Ok(m as u64),
        _ => Err(FpiError::UnsupportedCase(format!("{what} = {value} must be an integer ≥ {min}"))),
    }
}

/// `σ = m - n + ν` with `m ≥ 1`: finite sum, logarithmic digamma series, tail.
pub fn threef2_transform_pole_pos(p: &ThreeF2Params, cfg: &EvalConfig) -> Result<SeriesResult> {
    let w = p.near_one()?;
    let nf = p.nf();
    let m = case_integer(p.sigma - p.nu + nf, p.int_tol, "σ-ν+n", 1)?;
    let mf = m as f64;
    let (beta, nu, sigma) = (p.beta, p.nu, p.sigma);
    let bm = beta + mf - nf;
    let mut head = Vec::new();
    for k in 0..m.saturating_sub(1) {
        let kf = k as f64;
        let g = LogProduct::one().gamma(beta - nf + 1.0 + kf)?.value();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        head.push(g * pochhammer(nu - nf + 1.0, k) * (sign * factorial(m - 2 - k) / factorial(k)) * w.powu(k as u32));
    }
    let head_pre = LogProduct::one().rgamma(sigma).rgamma(bm).value();
    let series = hyper_log_sum(
        &[sigma, bm],
        &[real(mf)],
        w,
        ln(w),
        &[(-1.0, real(mf)), (1.0, sigma), (1.0, bm), (-1.0, real(1.0))],
        cfg,
    )?;
    let pre = LogProduct::one()
        .sign(m as i64)
        .rgamma(nu - nf + 1.0)
        .rfactorial(m - 1)
        .power(w, real(mf - 1.0))
        .value();
    let rhs = series.scale(pre).add_exact(head_pre * csum(head) - finite_tail(p)?);
    rhs.scale(p.lhs_factor()?).require_converged()
}

/// `σ = ν - m - n` with `m ≥ 0`.
pub fn threef2_transform_pole_neg(p: &ThreeF2Params, cfg: &EvalConfig) -> Result<SeriesResult> {
    let w = p.near_one()?;
    let nf = p.nf();
    let m = case_integer(p.nu - p.sigma - nf, p.int_tol, "ν-σ-n", 0)?;
    let mf = m as f64;
    let (beta, nu, sigma) = (p.beta, p.nu, p.sigma);
    let head = csum((0..=m).map(|k| {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        pochhammer(beta - mf - nf, k) * pochhammer(sigma, k) * (sign * factorial(m - k) / factorial(k)) * w.powu(k as u32)
    }));
    let head_pre = LogProduct::one().rgamma(nu - nf + 1.0).power(w, real(-mf - 1.0)).value();
    let series = hyper_log_sum(
        &[beta - nf + 1.0, nu - nf + 1.0],
        &[real(mf + 2.0)],
        w,
        ln(w),
        &[(-1.0, real(1.0)), (1.0, nu - nf + 1.0), (1.0, beta - nf + 1.0), (-1.0, real(mf + 2.0))],
        cfg,
    )?;
    let pre = LogProduct::one()
        .sign(m as i64)
        .pochhammer(beta - mf - nf, m + 1)
        .rgamma(sigma)
        .rfactorial(m + 1)
        .value();
    let rhs = series.scale(pre).add_exact(head_pre * head - finite_tail(p)?);
    rhs.scale(p.lhs_factor()?).require_converged()
}

/// Progenic finite parts of the kernel expansion.
///
/// With `h(y) = y^{β-n} (x/(1-x) + 1 - y)^{n-ν-1}` and `λ = β + σ - ν`:
/// * `Plain`: `∳₀^1 h(y) (1-y)^{-λ} dy`, any case with `λ ∉ ℤ`
/// * `LogPolePos`: `∳₀^1 h(y) ln y (1-y)^{-λ} dy` for `σ = m - n + ν`
/// * `LogPoleNeg`: the same for `σ = ν - m - n`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProgenicPiece {
    Plain,
    LogPolePos,
    LogPoleNeg,
}

pub fn progenic_3f2_pieces(p: &ThreeF2Params, kind: ProgenicPiece, cfg: &EvalConfig) -> Result<C64> {
    let w = 1.0 - p.z;
    if w.norm() > 0.95 || (w.im == 0.0 && w.re <= 0.0) {
        return Err(FpiError::domain("needs 1-x off the cut with |1-x| ≤ 0.95"));
    }
    let (beta, nu, sigma) = (p.beta, p.nu, p.sigma);
    let nf = p.nf();
    let lam = p.lambda();
    let wpow = pow(w, nu - nf + 1.0);
    match kind {
        ProgenicPiece::Plain => {
            if as_integer(lam, p.int_tol).is_some() {
                return Err(FpiError::UnsupportedCase("β+σ-ν must not be an integer".into()));
            }
            let pre = LogProduct::one()
                .scalar(real(PI) / sin_pi(lam))
                .gamma(beta - nf + 1.0)?
                .rgamma(lam)
                .rgamma(2.0 - nf - sigma + nu)
                .value();
            let f = hyper_sum(&[nu - nf + 1.0, beta - nf + 1.0], &[2.0 - nf - sigma + nu], w, cfg)?.require_converged()?;
            Ok(pre * wpow * f.value)
        }
        ProgenicPiece::LogPolePos => {
            let m = case_integer(sigma - nu + nf, p.int_tol, "σ-ν+n", 1)?;
            let mf = m as f64;
            let csc = real(PI) / sin_pi(beta);
            let mut head = Vec::new();
            for k in 0..m.saturating_sub(1) {
                let kf = k as f64;
                let sign = if (p.n + k) % 2 == 0 { 1.0 } else { -1.0 };
                let g = LogProduct::one().gamma(beta - nf + 1.0 + kf)?.value();
                head.push(
                    g * pochhammer(nu - nf + 1.0, k) * (sign * factorial(m - 2 - k) / factorial(k)) * w.powu(k as u32),
                );
            }
            let head_pre = LogProduct::one().scalar(csc).rgamma(lam).value() * wpow;
            let s = hyper_log_sum(&[sigma, lam], &[real(mf)], w, real(0.0), &[(1.0, lam), (-1.0, real(1.0))], cfg)?
                .require_converged()?;
            let pre = LogProduct::one()
                .sign(m as i64 - p.n as i64)
                .scalar(csc)
                .gamma(sigma)?
                .rgamma(nu - nf + 1.0)
                .rfactorial(m - 1)
                .power(w, sigma)
                .value();
            Ok(head_pre * csum(head) + pre * s.value)
        }
        ProgenicPiece::LogPoleNeg => {
            let m = case_integer(nu - sigma - nf, p.int_tol, "ν-σ-n", 0)?;
            let mf = m as f64;
            let s = hyper_log_sum(
                &[nu - nf + 1.0, beta - nf + 1.0],
                &[real(mf + 2.0)],
                w,
                real(0.0),
                &[(1.0, beta - nf + 1.0), (-1.0, real(mf + 2.0))],
                cfg,
            )?
            .require_converged()?;
            let pre = LogProduct::one()
                .sign(m as i64 + p.n as i64)
                .scalar(real(PI) / sin_pi(beta))
                .gamma(beta - nf + 1.0)?
                .rgamma(lam)
                .rfactorial(m + 1)
                .value();
            Ok(pre * wpow * s.value)
        }
    }
}

/// `K(x) = ∫₀^∞ s^{β-n} ((1-x)^{-1} + s)^{n-ν-1} (1+s)^{-(β+σ-ν)} ds` written as the
/// sum of its two `₂F₁` pieces, valid for `σ - ν ∉ ℤ`.
pub fn kernel_integral_pieces(p: &ThreeF2Params, cfg: &EvalConfig) -> Result<C64> {
    let w = 1.0 - p.z;
    if w.norm() > 0.95 || (w.im == 0.0 && w.re <= 0.0) {
        return Err(FpiError::domain("needs 1-x off the cut with |1-x| ≤ 0.95"));
    }
    if as_integer(p.sigma - p.nu, p.int_tol).is_some() {
        return Err(FpiError::UnsupportedCase("σ-ν must not be an integer".into()));
    }
    let (beta, nu, sigma) = (p.beta, p.nu, p.sigma);
    let nf = p.nf();
    let d = sigma - nu;
    let lam = p.lambda();
    let sign = if p.n % 2 == 0 { 1.0 } else { -1.0 };
    let c = real(sign * PI) / sin_pi(d);
    let a = LogProduct::one()
        .scalar(c)
        .gamma(sigma)?
        .power(w, sigma)
        .rgamma(nu - nf + 1.0)
        .rgamma(d + nf)
        .value();
    let b = -LogProduct::one()
        .scalar(c)
        .gamma(beta - nf + 1.0)?
        .power(w, nu - nf + 1.0)
        .rgamma(lam)
        .rgamma(2.0 - nf - d)
        .value();
    let f1 = hyper_sum(&[sigma, lam], &[d + nf], w, cfg)?;
    let f2 = hyper_sum(&[nu - nf + 1.0, beta - nf + 1.0], &[2.0 - nf - d], w, cfg)?;
    Ok(f1.combine(a, f2, b).require_converged()?.value)
}

/// `K(x)` from the term-by-term expansion of the kernel `(1+s)^{-λ}` in `1/s`:
/// fundamental finite parts at `s' = (1-x)^{-1}` plus the progenic piece.
///
/// Dispatches on `m = σ - ν + n`: non-integer (branch-type finite parts),
/// `m ≥ 1` (pole-type finite parts), `m ≤ 0` (the first `1-m` integrals converge).
pub fn kernel_integral_fpi(p: &ThreeF2Params, cfg: &EvalConfig) -> Result<SeriesResult> {
    let w = 1.0 - p.z;
    let s = 1.0 / w;
    let (beta, nu, sigma) = (p.beta, p.nu, p.sigma);
    let nf = p.nf();
    let lam = p.lambda();
    let up = nu - nf + 1.0;
    match as_integer(sigma - nu + nf, p.int_tol) {
        None => {
            let series = sum_series(
                |k| Ok(binomial_complex(-lam, k as u64) * branch_lp(s, up, sigma - nu + nf + k as f64)?.value()),
                cfg,
            )?;
            let sign = if p.n % 2 == 0 { -1.0 } else { 1.0 };
            let piece = progenic_3f2_pieces(p, ProgenicPiece::Plain, cfg)?;
            Ok(series.add_exact(sign * sin_pi(lam) / sin_pi(sigma - nu) * piece))
        }
        Some(m) => {
            if as_integer(beta, p.int_tol).is_some() {
                return Err(FpiError::UnsupportedCase("β must not be an integer".into()));
            }
            let sign = if p.n % 2 == 0 { 1.0 } else { -1.0 };
            let weight = sign * sin_pi(beta) / PI;
            if m >= 1 {
                let series = sum_series(
                    |k| Ok(binomial_complex(-lam, k as u64) * pole_lp(s, up, m as u64 - 1 + k as u64)?.value()),
                    cfg,
                )?;
                let piece = progenic_3f2_pieces(p, ProgenicPiece::LogPolePos, cfg)?;
                Ok(series.add_exact(weight * piece))
            } else {
                let big_m = (-m) as u64;
                let mut head = Vec::new();
                for k in 0..=big_m {
                    let kf = k as f64;
                    let g = LogProduct::one()
                        .gamma(1.0 - kf - nf + nu - sigma)?
                        .gamma(sigma + kf)?
                        .rgamma(up)
                        .power(w, sigma + kf)
                        .value();
                    head.push(binomial_complex(-lam, k) * g);
                }
                let series = sum_series(
                    |k| Ok(binomial_complex(-lam, k as u64 + big_m + 1) * pole_lp(s, up, k as u64)?.value()),
                    cfg,
                )?;
                let piece = progenic_3f2_pieces(p, ProgenicPiece::LogPoleNeg, cfg)?;
                Ok(series.add_exact(csum(head) + weight * piece))
            }
        }
    }
    .and_then(SeriesResult::require_converged)
}

/// `K(x)` by direct quadrature, for real `0 < x < 1`.
pub fn kernel_integral_direct(p: &ThreeF2Params) -> Result<C64> {
    if p.z.im != 0.0 || !(p.z.re > 0.0 && p.z.re < 1.0) {
        return Err(FpiError::domain("needs real 0 < x < 1"));
    }
    let q = 1.0 / (1.0 - p.z.re);
    let (beta, nu, lam) = (p.beta, p.nu, p.lambda());
    let nf = p.nf();
    let f = |s: f64| {
        let l1 = if s > 1.0 { s.ln() + (1.0 / s).ln_1p() } else { s.ln_1p() };
        let lq = if s > q { s.ln() + (q / s).ln_1p() } else { q.ln() + (s / q).ln_1p() };
        ((beta - nf) * s.ln() + (nf - nu - 1.0) * lq - lam * l1).exp()
    };
    crate::quad::quadrature(f, Interval::SemiInfinite(0.0), crate::quad::SingularHint::Interior(vec![1.0, q]))
}

/// `₃F₂(β, ν, 1; β+σ, n; z)` by whichever case formula applies.
pub fn threef2_transform(p: &ThreeF2Params, cfg: &EvalConfig) -> Result<SeriesResult> {
    let nf = p.nf();
    if let Some(m) = as_integer(p.sigma - p.nu + nf, p.int_tol) {
        if m >= 1 {
            return threef2_transform_pole_pos(p, cfg);
        }
        return threef2_transform_pole_neg(p, cfg);
    }
    threef2_transform_general(p, cfg)
}

/// Canonical series of `₃F₂(β, ν, 1; β+σ, n; z)`.
pub fn threef2_series(p: &ThreeF2Params, cfg: &EvalConfig) -> Result<SeriesResult> {
    canonical(p, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp2f1::{gauss_series, Gauss2F1Params};
    use crate::oracle::{extract_finite_part_upper, OracleOptions};
    use proptest::prelude::*;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    fn params(beta: f64, nu: f64, n: u64, sigma: f64, z: f64) -> ThreeF2Params {
        ThreeF2Params::new(real(beta), real(nu), n, real(sigma), real(z)).unwrap()
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn pfq_examples() {
        let up = [real(0.8), real(0.3), real(1.0)];
        let lo = [real(1.5), real(2.0)];
        assert_eq!(pfq_series(&up, &lo, real(0.0), &cfg()).unwrap().value, real(1.0));
        let z = 0.4;
        let mut t = 1.0;
        let mut brute = 0.0;
        for k in 0..60 {
            brute += t;
            let kf = k as f64;
            t *= (0.8 + kf) * (0.3 + kf) * (1.0 + kf) / ((1.5 + kf) * (2.0 + kf) * (kf + 1.0)) * z;
        }
        assert!(rel(pfq_series(&up, &lo, real(z), &cfg()).unwrap().value, real(brute)) < 1e-14);
        let collapsed = pfq_series(&[real(1.7), real(0.3), real(1.0)], &[real(1.7), real(3.0)], real(0.4), &cfg()).unwrap();
        assert!(rel(collapsed.value, gauss_2f1_nu1_n(real(0.3), 3, real(0.4)).unwrap()) < 1e-13);
        assert!(pfq_series(&up, &lo, real(0.97), &cfg()).unwrap_err().is_domain());
        assert!(pfq_series(&[real(1.0); 4], &lo, real(0.1), &cfg()).unwrap_err().is_domain());
    }

    #[test]
    fn integral_examples() {
        assert_eq!(threef2_integral_direct(&params(1.6, 0.3, 2, 0.9, 0.0)).unwrap(), real(1.0));
        let p = params(1.6, 0.3, 1, 0.9, 0.5);
        let g = gauss_series(&Gauss2F1Params::new(real(1.6), real(0.3), real(2.5), real(0.5)).unwrap(), &cfg()).unwrap();
        assert!(rel(threef2_integral_direct(&p).unwrap(), g.value) < 1e-10);
        let p = params(1.6, 0.3, 2, 0.9, 0.5);
        assert!(rel(threef2_integral_direct(&p).unwrap(), threef2_series(&p, &cfg()).unwrap().value) < 1e-9);
        assert!(threef2_integral_direct(&params(0.6, 0.3, 2, 0.9, 0.5)).unwrap_err().is_domain());
    }

    #[test]
    fn general_examples() {
        for p in [params(1.6, 0.3, 1, 0.9, 0.6), params(2.3, 0.45, 2, 0.8, 0.55)] {
            let t = threef2_transform_general(&p, &cfg()).unwrap().value;
            assert!(rel(t, threef2_series(&p, &cfg()).unwrap().value) < 1e-9, "{p:?}");
        }
        assert_eq!(finite_tail(&params(1.6, 0.3, 1, 0.9, 0.6)).unwrap(), real(0.0));
        assert!(threef2_transform_general(&params(1.6, 0.3, 1, 0.9, 0.05), &cfg()).unwrap_err().is_domain());
    }

    #[test]
    fn pole_examples() {
        let pos = |n: u64, m: u64, beta: f64, nu: f64, z: f64| params(beta, nu, n, m as f64 - n as f64 + nu, z);
        for p in [pos(1, 1, 1.7, 0.4, 0.6), pos(2, 2, 2.4, 0.3, 0.5)] {
            let t = threef2_transform_pole_pos(&p, &cfg()).unwrap().value;
            assert!(rel(t, threef2_series(&p, &cfg()).unwrap().value) < 1e-8, "{p:?}");
        }
        let neg = |n: u64, m: u64, beta: f64, nu: f64, z: f64| params(beta, nu, n, nu - m as f64 - n as f64, z);
        for p in [neg(1, 0, 2.6, 1.55, 0.6), neg(1, 1, 3.2, 2.45, 0.55), neg(2, 0, 3.1, 2.4, 0.5)] {
            let t = threef2_transform_pole_neg(&p, &cfg()).unwrap().value;
            assert!(rel(t, threef2_series(&p, &cfg()).unwrap().value) < 1e-8, "{p:?}");
        }
        assert!(matches!(
            threef2_transform_pole_pos(&params(1.7, 0.4, 1, 0.9, 0.6), &cfg()),
            Err(FpiError::UnsupportedCase(_))
        ));
    }

    fn oracle_piece(p: &ThreeF2Params, log: bool) -> C64 {
        let x = p.z.re;
        let (beta, nu, n) = (p.beta.re, p.nu.re, p.n as f64);
        let h = move |y: f64| {
            let v = y.powf(beta - n) * (x / (1.0 - x) + 1.0 - y).powf(n - nu - 1.0);
            real(if log { v * y.ln() } else { v })
        };
        let opts = OracleOptions { eps0: 0.05, ..OracleOptions::default() };
        extract_finite_part_upper(h, p.lambda(), 1.0, false, None, &opts).unwrap().finite_part
    }

    #[test]
    fn progenic_pieces_match_oracle() {
        let p = params(2.6, 1.55, 2, 0.7, 0.57);
        let v = progenic_3f2_pieces(&p, ProgenicPiece::Plain, &cfg()).unwrap();
        assert!(rel(v, oracle_piece(&p, false)) < 1e-5);
        for (n, m) in [(1u64, 1u64), (1, 2), (2, 3)] {
            let (beta, nu) = (0.6 + n as f64, 1.55 + n as f64);
            let p = params(beta, nu, n, m as f64 - n as f64 + nu, 0.57);
            let v = progenic_3f2_pieces(&p, ProgenicPiece::LogPolePos, &cfg()).unwrap();
            assert!(rel(v, oracle_piece(&p, true)) < 1e-5, "n={n} m={m}");
        }
        for (n, m) in [(1u64, 0u64), (2, 1)] {
            let (beta, nu) = (0.6 + (n + m) as f64, 1.55 + (n + m) as f64);
            let p = params(beta, nu, n, nu - (m + n) as f64, 0.57);
            let v = progenic_3f2_pieces(&p, ProgenicPiece::LogPoleNeg, &cfg()).unwrap();
            assert!(rel(v, oracle_piece(&p, true)) < 1e-5, "n={n} m={m}");
        }
    }

    #[test]
    fn progenic_piece_vanishes_as_x_to_one() {
        let p = params(2.6, 1.55, 1, 0.7, 1.0 - 1e-10);
        assert!(progenic_3f2_pieces(&p, ProgenicPiece::Plain, &cfg()).unwrap().norm() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn general_agrees_with_series(beta in 0.3f64..3.0, nu in 0.1f64..2.9, n in 1u64..4, sigma in 0.2f64..2.0, z in 0.45f64..0.7) {
            let d = sigma - nu;
            prop_assume!((d - d.round()).abs() > 0.05 && (beta + d - (beta + d).round()).abs() > 0.05 && (nu - nu.round()).abs() > 0.05);
            prop_assume!(beta + d > 0.05);
            let p = params(beta, nu, n, sigma, z);
            let t = threef2_transform_general(&p, &cfg()).unwrap().value;
            let s = threef2_series(&p, &cfg()).unwrap().value;
            prop_assert!(rel(t, s) <= 1e-8, "{t} vs {s}");
        }

        #[test]
        fn pole_pos_agrees_with_series(beta in 0.3f64..3.0, nu in 0.1f64..2.9, n in 1u64..4, m in 1u64..4, z in 0.45f64..0.7) {
            prop_assume!((nu - nu.round()).abs() > 0.05 && m as f64 - n as f64 + nu > 0.05);
            prop_assume!(beta + m as f64 - n as f64 > 0.05);
            let p = params(beta, nu, n, m as f64 - n as f64 + nu, z);
            let t = threef2_transform_pole_pos(&p, &cfg()).unwrap().value;
            let s = threef2_series(&p, &cfg()).unwrap().value;
            prop_assert!(rel(t, s) <= 1e-8, "{t} vs {s}");
        }

        #[test]
        fn pole_neg_agrees_with_series(extra in 0.1f64..2.0, frac in 0.1f64..0.9, n in 1u64..4, m in 0u64..3, z in 0.45f64..0.7) {
            let nu = (m + n) as f64 + frac;
            let beta = (m + n) as f64 + extra;
            let p = params(beta, nu, n, nu - (m + n) as f64, z);
            let t = threef2_transform_pole_neg(&p, &cfg()).unwrap().value;
            let s = threef2_series(&p, &cfg()).unwrap().value;
            prop_assert!(rel(t, s) <= 1e-8, "{t} vs {s}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn integral_agrees_with_series(extra in 0.05f64..2.0, nu in 0.1f64..2.9, n in 1u64..4, sigma in 0.2f64..2.0, z in 0.05f64..0.9) {
            prop_assume!((nu - nu.round()).abs() > 0.05 && n as f64 - 1.0 + extra + sigma - nu > 0.05);
            let p = params(n as f64 - 1.0 + extra, nu, n, sigma, z);
            let q = threef2_integral_direct(&p).unwrap();
            let s = threef2_series(&p, &cfg()).unwrap().value;
            prop_assert!(rel(q, s) <= 1e-9, "{q} vs {s}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]

        #[test]
        fn kernel_pieces_match_quadrature(beta in 1.0f64..3.0, nu in 0.1f64..2.9, n in 1u64..4, sigma in 0.2f64..2.0, x in 0.1f64..0.9) {
            let d = sigma - nu;
            prop_assume!((d - d.round()).abs() > 0.05 && (nu - nu.round()).abs() > 0.05);
            prop_assume!(beta - n as f64 > -0.95 && beta + d > 0.05);
            let p = params(beta, nu, n, sigma, x);
            let k = kernel_integral_pieces(&p, &cfg()).unwrap();
            let q = kernel_integral_direct(&p).unwrap();
            prop_assert!(rel(k, q) <= 1e-8, "{k} vs {q}");
        }

        #[test]
        fn kernel_expansion_matches_quadrature(beta in 1.0f64..3.0, nu in 0.1f64..2.9, n in 1u64..4, sigma in 0.2f64..2.0, x in 0.45f64..0.7, kind in 0usize..3) {
            prop_assume!((nu - nu.round()).abs() > 0.05 && (beta - beta.round()).abs() > 0.05);
            let nf = n as f64;
            let sigma = match kind {
                0 => sigma,
                1 => (nu - nf + 1.0 + sigma.floor()).max(nu - nf + 1.0),
                _ => nu - nf - sigma.floor(),
            };
            let d = sigma - nu;
            prop_assume!(sigma > 0.05 && beta - nf > -0.95 && beta + d > 0.05);
            prop_assume!(kind > 0 || ((d - d.round()).abs() > 0.05 && (beta + d - (beta + d).round()).abs() > 0.05));
            let p = params(beta, nu, n, sigma, x);
            let k = kernel_integral_fpi(&p, &cfg()).unwrap().value;
            let q = kernel_integral_direct(&p).unwrap();
            prop_assert!(rel(k, q) <= 1e-8, "{k} vs {q}");
        }

        #[test]
        fn tail_reexpansion(beta in 1.0f64..4.0, nu in 0.1f64..3.9, n in 1u64..7, sigma in 0.2f64..2.0, z in -0.5f64..1.5) {
            prop_assume!((nu - nu.round()).abs() > 0.05);
            let p = params(beta + n as f64, nu, n, sigma, z);
            let a = finite_tail(&p).unwrap();
            let b = finite_tail_power(&p).unwrap();
            prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0), "{a} vs {b}");
        }
    }
}
