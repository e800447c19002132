//! Gauss hypergeometric function: canonical series, the Pfaff transformation,
//! and expansions about `z = 1` for every integer class of `σ - μ - ν`.

use crate::config::EvalConfig;
use crate::error::{FpiError, Result};
use crate::special::{
    as_integer, as_nonpositive_integer, digamma, factorial, ln, pochhammer, pow, real, sin_pi, warn_if_near_integer, LogProduct, C64, NEAR_INT_WARN,
};
use crate::sum::{csum, sum_series, SeriesResult};
use serde::Serialize;
use std::f64::consts::PI;

/// Parameters of `₂F₁(μ, ν; σ; z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gauss2F1Params {
    pub mu: C64,
    pub nu: C64,
    pub sigma: C64,
    pub z: C64,
}

impl Gauss2F1Params {
    pub fn new(mu: C64, nu: C64, sigma: C64, z: C64) -> Result<Self> {
        if let Some(n) = as_nonpositive_integer(sigma, crate::special::INT_TOL) {
            return Err(FpiError::UnsupportedCase(format!("lower parameter σ = -{n} is a nonpositive integer")));
        }
        Ok(Self { mu, nu, sigma, z })
    }
}

/// Snaps parameters within `tol` of a nonpositive integer onto it, so that
/// terminating series terminate exactly.
fn snap(a: C64, tol: f64) -> C64 {
    match as_nonpositive_integer(a, tol) {
        Some(n) => real(-(n as f64)),
        None => a,
    }
}

fn check_lower(lower: &[C64], tol: f64) -> Result<()> {
    for b in lower {
        if let Some(n) = as_nonpositive_integer(*b, tol) {
            return Err(FpiError::DegenerateParameters(format!("lower parameter {b} ≈ -{n}")));
        }
    }
    Ok(())
}

/// `Σ_k Π(a_i)_k / Π(b_j)_k · w^k / k!` by term ratios.
pub(crate) fn hyper_sum(upper: &[C64], lower: &[C64], w: C64, cfg: &EvalConfig) -> Result<SeriesResult> {
    hyper_log_sum(upper, lower, w, real(1.0), &[], cfg)
}

/// `Σ_k Π(a_i)_k / Π(b_j)_k · w^k / k! · (c + Σ_i s_i ψ(k + x_i))`.
///
/// Digamma values advance by `ψ(x+1) = ψ(x) + 1/x`.
pub(crate) fn hyper_log_sum(
    upper: &[C64],
    lower: &[C64],
    w: C64,
    constant: C64,
    psis: &[(f64, C64)],
    cfg: &EvalConfig,
) -> Result<SeriesResult> {
    check_lower(lower, cfg.int_tol)?;
    let upper: Vec<C64> = upper.iter().map(|a| snap(*a, cfg.int_tol)).collect();
    let mut psi: Vec<C64> = Vec::with_capacity(psis.len());
    for (_, x) in psis {
        psi.push(digamma(*x)?);
    }
    let mut coef = real(1.0);
    sum_series(
        |k| {
            if k > 0 {
                let kf = k as f64 - 1.0;
                let mut r = w / (kf + 1.0);
                for a in &upper {
                    r *= a + kf;
                }
                for b in lower {
                    r /= b + kf;
                }
                coef *= r;
                for (v, (_, x)) in psi.iter_mut().zip(psis) {
                    *v += (x + kf).inv();
                }
            }
            if coef == C64::new(0.0, 0.0) {
                return Ok(coef);
            }
            let mut bracket = constant;
            for (v, (s, _)) in psi.iter().zip(psis) {
                bracket += v * *s;
            }
            Ok(coef * bracket)
        },
        cfg,
    )
}

/// `₂F₁(μ, ν; σ; z)` by the canonical series, `|z| ≤ 0.95`.
pub fn gauss_series(p: &Gauss2F1Params, cfg: &EvalConfig) -> Result<SeriesResult> {
    if p.z.norm() > 0.95 {
        return Err(FpiError::domain(format!("|z| = {} exceeds 0.95 for the canonical series", p.z.norm())));
    }
    hyper_sum(&[p.mu, p.nu], &[p.sigma], p.z, cfg)?.require_converged()
}

/// `(1-z)^{-a} ₂F₁(a, b; c; z/(z-1))`, which equals `₂F₁(a, c-b; c; z)`.
pub fn pfaff_transform(p: &Gauss2F1Params, cfg: &EvalConfig) -> Result<C64> {
    let w = p.z / (p.z - 1.0);
    if w.norm() > 0.95 {
        return Err(FpiError::domain(format!("|z/(z-1)| = {} exceeds 0.95", w.norm())));
    }
    let f = hyper_sum(&[p.mu, p.nu], &[p.sigma], w, cfg)?.require_converged()?;
    Ok(pow(1.0 - p.z, -p.mu) * f.value)
}

/// `₂F₁(μ, ν; σ; z)` for `|1 - z| ≤ 0.9`, dispatching on `d = σ - μ - ν`.
pub fn gauss_2f1_near_one(p: &Gauss2F1Params, cfg: &EvalConfig) -> Result<SeriesResult> {
    let w = 1.0 - p.z;
    if w.norm() > 0.9 {
        return Err(FpiError::domain(format!("|1-z| = {} exceeds 0.9", w.norm())));
    }
    if w.im == 0.0 && w.re <= 0.0 {
        return Err(FpiError::domain("1-z lies on the branch cut"));
    }
    if as_nonpositive_integer(p.sigma, cfg.int_tol).is_some() {
        return Err(FpiError::UnsupportedCase(format!("σ = {} is a nonpositive integer", p.sigma)));
    }
    // polynomial case: the canonical series terminates
    for a in [p.mu, p.nu] {
        if as_nonpositive_integer(a, cfg.int_tol).is_some() {
            return hyper_sum(&[p.mu, p.nu], &[p.sigma], p.z, cfg)?.require_converged();
        }
    }
    let d = p.sigma - p.mu - p.nu;
    let r = match as_integer(d, cfg.int_tol) {
        None => {
            warn_if_near_integer("σ-μ-ν", d, NEAR_INT_WARN);
            near_one_generic(p.mu, p.nu, p.sigma, p.z, cfg)?
        }
        Some(0) => near_one_zero(p.mu, p.nu, p.z, cfg)?,
        Some(m) if m > 0 => near_one_positive(p.mu, p.nu, m as u64, p.z, cfg)?,
        Some(n) => near_one_negative(p.mu, p.nu, (-n) as u64, p.z, cfg)?,
    };
    r.require_converged()
}

fn near_one_generic(mu: C64, nu: C64, sigma: C64, z: C64, cfg: &EvalConfig) -> Result<SeriesResult> {
    let w = 1.0 - z;
    let d = sigma - mu - nu;
    let a = LogProduct::one().gamma(sigma)?.gamma(-d)?.rgamma(nu).rgamma(mu).power(w, d).value();
    let b = LogProduct::one().gamma(sigma)?.gamma(d)?.rgamma(sigma - nu).rgamma(sigma - mu).value();
    let f1 = hyper_sum(&[sigma - nu, sigma - mu], &[d + 1.0], w, cfg)?;
    let f2 = hyper_sum(&[mu, nu], &[1.0 - d], w, cfg)?;
    Ok(f1.combine(a, f2, b))
}

/// `σ = μ + ν`.
fn near_one_zero(mu: C64, rho: C64, z: C64, cfg: &EvalConfig) -> Result<SeriesResult> {
    let w = 1.0 - z;
    let c = LogProduct::one().gamma(mu + rho)?.rgamma(rho).rgamma(mu).value();
    let s = hyper_log_sum(
        &[mu, rho],
        &[real(1.0)],
        w,
        -ln(w),
        &[(2.0, real(1.0)), (-1.0, mu), (-1.0, rho)],
        cfg,
    )?;
    Ok(s.scale(c))
}

/// `σ = μ + ν + m`.
fn near_one_positive(mu: C64, nu: C64, m: u64, z: C64, cfg: &EvalConfig) -> Result<SeriesResult> {
    let w = 1.0 - z;
    let mf = m as f64;
    let sigma = mu + nu + mf;
    let finite = csum((0..m).map(|k| {
        pochhammer(mu, k) * pochhammer(nu, k) * (factorial(m - k - 1) / factorial(k)) * (-w).powu(k as u32)
    }));
    let pre1 = LogProduct::one().gamma(sigma)?.rgamma(mu + mf).rgamma(nu + mf).value();
    let pre2 = -LogProduct::one().gamma(sigma)?.rgamma(nu).rgamma(mu).rfactorial(m).value() * (-w).powu(m as u32);
    let s = hyper_log_sum(
        &[nu + mf, mu + mf],
        &[real(mf + 1.0)],
        w,
        ln(w),
        &[(-1.0, real(mf + 1.0)), (1.0, mu + mf), (1.0, nu + mf), (-1.0, real(1.0))],
        cfg,
    )?;
    Ok(s.scale(pre2).add_exact(pre1 * finite))
}

/// `σ = μ + ν - n`.
fn near_one_negative(mu: C64, nu: C64, n: u64, z: C64, cfg: &EvalConfig) -> Result<SeriesResult> {
    let w = 1.0 - z;
    let nf = n as f64;
    let sigma = mu + nu - nf;
    let finite = csum((0..n).map(|k| {
        pochhammer(nu - nf, k) * pochhammer(mu - nf, k) / (pochhammer(real(1.0 - nf), k) * factorial(k))
            * w.powu(k as u32)
    }));
    let pre1 = LogProduct::one().gamma(sigma)?.factorial(n - 1).rgamma(nu).rgamma(mu).power(w, real(-nf)).value();
    let pre2 =
        LogProduct::one().sign(n as i64).gamma(sigma)?.rgamma(nu - nf).rgamma(mu - nf).rfactorial(n).value();
    let s = hyper_log_sum(
        &[mu, nu],
        &[real(nf + 1.0)],
        w,
        -ln(w),
        &[(1.0, real(1.0)), (1.0, real(nf + 1.0)), (-1.0, mu), (-1.0, nu)],
        cfg,
    )?;
    Ok(s.scale(pre2).add_exact(pre1 * finite))
}

/// `₂F₁(ν, 1; n; z)` in closed form.
///
/// Equals `(n-1)! / ((ν-n+1)_{n-1} z^{n-1}) · [(1-z)^{n-ν-1} - Σ_{k≤n-2} (ν-n+1)_k z^k / k!]`,
/// with the value 1 at `z = 0`. The bracket cancels to `O(z^{n-1})`, so for
/// `|z| ≤ 0.5` the canonical series is summed instead.
pub fn gauss_2f1_nu1_n(nu: C64, n: u64, z: C64) -> Result<C64> {
    if n == 0 {
        return Err(FpiError::domain("n must be at least 1"));
    }
    let nf = n as f64;
    let poch = pochhammer(nu - nf + 1.0, n - 1);
    if poch.norm() == 0.0 || as_integer(nu, crate::special::INT_TOL).is_some_and(|v| v >= 1 && (v as u64) < n) {
        return Err(FpiError::DegenerateParameters(format!("(ν-n+1)_(n-1) vanishes for ν = {nu}, n = {n}")));
    }
    if z == C64::new(0.0, 0.0) {
        return Ok(real(1.0));
    }
    if n > 1 && z.norm() <= 0.5 {
        return Ok(hyper_sum(&[nu, real(1.0)], &[real(nf)], z, &EvalConfig::default())?.require_converged()?.value);
    }
    let mut term = real(1.0);
    let mut partial = Vec::with_capacity(n as usize);
    for k in 0..n.saturating_sub(1) {
        partial.push(term);
        term *= (nu - nf + 1.0 + k as f64) * z / (k as f64 + 1.0);
    }
    let bracket = pow(1.0 - z, real(nf) - nu - 1.0) - csum(partial);
    Ok(bracket * factorial(n - 1) / (poch * z.powu((n - 1) as u32)))
}

/// `Σ_{k<n} C(n-1,k) (μ)_k (ν-n+1+k)_{n-1-k} z^k / (1-z)^{k+μ}`,
/// equal to `Γ(ν)/Γ(ν-n+1) ₂F₁(μ, ν; ν-n+1; z)`.
pub fn xxx12_sum(mu: C64, nu: C64, n: u64, z: C64) -> C64 {
    let nf = n as f64;
    let w = 1.0 - z;
    csum((0..n).map(|k| {
        let kf = k as f64;
        let binom = factorial(n - 1) / (factorial(k) * factorial(n - 1 - k));
        pochhammer(mu, k) * pochhammer(nu - nf + 1.0 + kf, n - 1 - k) * binom * z.powu(k as u32) * pow(w, -(mu + kf))
    }))
}

/// `₂F₁(μ, ν; μ+ρ; 1-z)` as a series about `z = 0` when `ρ` and `ρ-ν` are not
/// integers: a power series in `z` plus a Pfaff-transformed term.
pub fn connection_branch_branch(mu: C64, nu: C64, rho: C64, z: C64, cfg: &EvalConfig) -> Result<SeriesResult> {
    if as_integer(rho, cfg.int_tol).is_some() || as_integer(rho - nu, cfg.int_tol).is_some() {
        return Err(FpiError::UnsupportedCase("ρ and ρ-ν must not be integers".into()));
    }
    let w = z / (z - 1.0);
    if w.norm() > 0.95 || z.norm() > 0.95 {
        return Err(FpiError::domain("need |z| and |z/(z-1)| at most 0.95"));
    }
    let d = rho - nu;
    let c1 = -LogProduct::one()
        .scalar(real(PI) / sin_pi(d))
        .gamma(mu + rho)?
        .rgamma(nu)
        .rgamma(mu)
        .rgamma(d + 1.0)
        .power(z, d)
        .value();
    let c2 = LogProduct::one()
        .scalar(sin_pi(rho) / sin_pi(d))
        .power(1.0 - z, -mu)
        .gamma(mu + rho)?
        .gamma(1.0 - rho)?
        .rgamma(nu - rho + 1.0)
        .rgamma(mu - nu + rho)
        .value();
    let s1 = hyper_sum(&[d + mu, rho], &[d + 1.0], z, cfg)?;
    let s2 = hyper_sum(&[mu, 1.0 - rho], &[1.0 - d], w, cfg)?;
    s1.combine(c1, s2, c2).require_converged()
}

/// `₂F₁(μ, ν; μ+n; 1-z)` about `z = 0` for integer `n ≥ 1`, `ν` not an integer.
pub fn connection_pole_kernel(mu: C64, nu: C64, n: u64, z: C64, cfg: &EvalConfig) -> Result<SeriesResult> {
    if n == 0 || as_integer(nu, cfg.int_tol).is_some() {
        return Err(FpiError::UnsupportedCase("need n ≥ 1 and non-integer ν".into()));
    }
    let nf = n as f64;
    let common = LogProduct::one().sign(n as i64).scalar(real(PI) / sin_pi(nu)).gamma(mu + nf)?.rgamma(nu);
    let c1 = common.rgamma(mu).rgamma(nf - nu + 1.0).power(z, nf - nu).value();
    let c2 = -common.rgamma(mu - nu + nf).rfactorial(n - 1).value();
    let s = hyper_sum(&[nf - nu + mu, real(nf)], &[nf - nu + 1.0], z, cfg)?;
    Ok(s.scale(c1).add_exact(c2 * xxx12_sum(mu, nu, n, z))).and_then(SeriesResult::require_converged)
}

/// `₂F₁(μ, ν; μ+ρ; 1-z)` about `z = 0` when `ν - ρ = N ≥ 1`.
pub fn connection_origin_pos(mu: C64, nu: C64, rho: C64, z: C64, cfg: &EvalConfig) -> Result<SeriesResult> {
    let big_n = match as_integer(nu - rho, cfg.int_tol) {
        Some(v) if v >= 1 => v as u64,
        _ => return Err(FpiError::UnsupportedCase("ν-ρ must be a positive integer".into())),
    };
    let nf = big_n as f64;
    let finite = csum((0..big_n).map(|k| {
        pochhammer(rho, k) * pochhammer(mu - nu + rho, k) / (pochhammer(1.0 - nu + rho, k) * factorial(k))
            * z.powu(k as u32)
    }));
    let pre1 = LogProduct::one()
        .gamma(mu + rho)?
        .gamma(real(nf))?
        .rgamma(mu)
        .rgamma(nu)
        .power(z, real(-nf))
        .value();
    let c = LogProduct::one().gamma(mu + rho)?.rgamma(rho).rgamma(real(nf + 1.0)).rgamma(mu - nu + rho);
    let c = c.sign(big_n as i64).value();
    let s = hyper_log_sum(
        &[mu, nu],
        &[real(nf + 1.0)],
        z,
        -ln(z),
        &[(1.0, real(1.0)), (-1.0, mu), (1.0, real(nf + 1.0)), (-1.0, nu)],
        cfg,
    )?;
    s.scale(c).add_exact(pre1 * finite).require_converged()
}

/// `₂F₁(μ, ν; μ+ρ; 1-z)` about `z = 0` when `ρ - ν = M ≥ 0`.
pub fn connection_origin_neg(mu: C64, nu: C64, rho: C64, z: C64, cfg: &EvalConfig) -> Result<SeriesResult> {
    let m = match as_integer(rho - nu, cfg.int_tol) {
        Some(v) if v >= 0 => v as u64,
        _ => return Err(FpiError::UnsupportedCase("ρ-ν must be a nonnegative integer".into())),
    };
    let mf = m as f64;
    let pre1 = LogProduct::one()
        .sign(m as i64 + 1)
        .gamma(mu + rho)?
        .rgamma(mu)
        .rgamma(nu)
        .rfactorial(m)
        .power(z, real(mf))
        .value();
    let s = hyper_log_sum(
        &[rho, mu + mf],
        &[real(mf + 1.0)],
        z,
        ln(z),
        &[(-1.0, real(mf + 1.0)), (1.0, mu + mf), (1.0, rho), (-1.0, real(1.0))],
        cfg,
    )?;
    let pre2 = LogProduct::one().gamma(mu + rho)?.rgamma(rho).rgamma(mu + mf).value();
    let finite = csum((0..m).map(|k| {
        pochhammer(mu, k) * pochhammer(nu, k) * (factorial(m - k - 1) / factorial(k)) * (-z).powu(k as u32)
    }));
    s.scale(pre1).add_exact(pre2 * finite).require_converged()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{c, gamma};
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    fn f(mu: f64, nu: f64, sigma: f64, z: f64) -> C64 {
        let p = Gauss2F1Params::new(real(mu), real(nu), real(sigma), real(z)).unwrap();
        gauss_series(&p, &cfg()).unwrap().value
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn series_examples() {
        assert_eq!(f(0.3, 0.7, 1.9, 0.0), real(1.0));
        assert!(rel(f(0.4, 1.3, 1.3, 0.6), real(0.4f64.powf(-0.4))) < 1e-14);
        assert!(rel(f(1.0, 1.0, 2.0, 0.5), real(2.0 * LN_2)) < 1e-14);
        let p = Gauss2F1Params::new(real(1.0), real(1.0), real(2.0), real(0.97)).unwrap();
        assert!(gauss_series(&p, &cfg()).unwrap_err().is_domain());
        assert!(Gauss2F1Params::new(real(1.0), real(1.0), real(-2.0), real(0.5)).is_err());
    }

    #[test]
    fn pfaff_examples() {
        let p = Gauss2F1Params::new(real(0.3), real(0.7), real(1.9), real(0.0)).unwrap();
        assert_eq!(pfaff_transform(&p, &cfg()).unwrap(), real(1.0));
        let p = Gauss2F1Params::new(real(0.3), real(1.9), real(1.9), real(0.4)).unwrap();
        assert!(rel(pfaff_transform(&p, &cfg()).unwrap(), real(1.0)) < 1e-14);
        let p = Gauss2F1Params::new(real(0.3), real(0.7), real(1.9), real(0.4)).unwrap();
        assert!(rel(pfaff_transform(&p, &cfg()).unwrap(), f(0.3, 1.2, 1.9, 0.4)) < 1e-11);
    }

    #[test]
    fn near_one_examples() {
        for (mu, nu, sigma, z) in [(0.3, 0.7, 1.9, 0.6), (0.4, 0.9, 2.3, 0.7), (0.4, 0.6, 1.0, 0.5), (0.8, 1.3, 1.1, 0.55)] {
            let p = Gauss2F1Params::new(real(mu), real(nu), real(sigma), real(z)).unwrap();
            let a = gauss_2f1_near_one(&p, &cfg()).unwrap().value;
            assert!(rel(a, f(mu, nu, sigma, z)) < 1e-10, "{mu} {nu} {sigma}: {a}");
        }
        let p = Gauss2F1Params::new(real(0.3), real(0.7), real(1.9), real(0.05)).unwrap();
        assert!(gauss_2f1_near_one(&p, &cfg()).unwrap_err().is_domain());
    }

    #[test]
    fn near_one_polynomial_case() {
        let p = Gauss2F1Params::new(real(-3.0), real(0.7), real(1.9), real(0.6)).unwrap();
        let a = gauss_2f1_near_one(&p, &cfg()).unwrap().value;
        assert!(rel(a, f(-3.0, 0.7, 1.9, 0.6)) < 1e-14);
    }

    #[test]
    fn nu1_n_examples() {
        let z = real(0.3);
        assert!(rel(gauss_2f1_nu1_n(real(0.7), 1, z).unwrap(), pow(1.0 - z, real(-0.7))) < 1e-15);
        assert!(rel(gauss_2f1_nu1_n(real(2.0), 2, real(0.5)).unwrap(), real(2.0)) < 1e-15);
        assert!(rel(gauss_2f1_nu1_n(real(0.3), 3, real(0.4)).unwrap(), f(0.3, 1.0, 3.0, 0.4)) < 1e-12);
        assert_eq!(gauss_2f1_nu1_n(real(0.3), 4, real(0.0)).unwrap(), real(1.0));
        assert!(matches!(gauss_2f1_nu1_n(real(2.0), 4, z), Err(FpiError::DegenerateParameters(_))));
    }

    #[test]
    fn xxx12_examples() {
        let z = real(0.3);
        assert!(rel(xxx12_sum(real(0.5), real(2.3), 1, z), pow(1.0 - z, real(-0.5))) < 1e-15);
        let rhs = gamma(real(2.3)) / gamma(real(1.3)) * f(0.5, 2.3, 1.3, 0.3);
        assert!(rel(xxx12_sum(real(0.5), real(2.3), 2, z), rhs) < 1e-11);
        let v = xxx12_sum(real(0.5), real(2.3), 3, real(0.0));
        assert!(rel(v, pochhammer(real(0.3), 2)) < 1e-15);
    }

    #[test]
    fn z_series_forms_match_canonical() {
        let (mu, z) = (c(0.83, 0.1), real(0.42));
        let lhs = |nu: C64, rho: C64| hyper_sum(&[mu, nu], &[mu + rho], 1.0 - z, &cfg()).unwrap().value;
        let (nu, rho) = (c(1.37, -0.2), real(0.61));
        assert!(rel(connection_branch_branch(mu, nu, rho, z, &cfg()).unwrap().value, lhs(nu, rho)) < 1e-10);
        for n in 1..=3u64 {
            let v = connection_pole_kernel(mu, nu, n, z, &cfg()).unwrap().value;
            assert!(rel(v, lhs(nu, real(n as f64))) < 1e-10, "n={n}");
        }
        for big_n in 1..=3 {
            let rho = c(0.37, 0.05);
            let nu = rho + big_n as f64;
            let v = connection_origin_pos(mu, nu, rho, z, &cfg()).unwrap().value;
            assert!(rel(v, lhs(nu, rho)) < 1e-10, "N={big_n}");
        }
        for m in 0..=3 {
            let nu = c(0.41, -0.1);
            let rho = nu + m as f64;
            let v = connection_origin_neg(mu, nu, rho, z, &cfg()).unwrap().value;
            assert!(rel(v, lhs(nu, rho)) < 1e-10, "M={m}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn near_one_agrees_with_series(mu in 0.1f64..2.0, nu in 0.1f64..2.0, d in -3.0f64..3.0, z in 0.4f64..0.75, kind in 0usize..4, m in 1u32..4) {
            let d = match kind {
                0 => d,
                1 => 0.0,
                2 => m as f64,
                _ => -(m as f64),
            };
            let sigma = mu + nu + d;
            prop_assume!(sigma > 0.05);
            prop_assume!(kind != 0 || (d - d.round()).abs() > 0.1);
            let p = Gauss2F1Params::new(real(mu), real(nu), real(sigma), real(z)).unwrap();
            let a = gauss_2f1_near_one(&p, &cfg()).unwrap().value;
            let b = gauss_series(&p, &cfg()).unwrap().value;
            prop_assert!(rel(a, b) < 1e-9, "{a} vs {b}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn nu1_n_agrees_with_series(nu in -2.5f64..3.5, n in 1u64..=6, z in -0.8f64..0.8) {
            prop_assume!((nu - nu.round()).abs() > 0.05);
            let a = gauss_2f1_nu1_n(real(nu), n, real(z)).unwrap();
            let b = hyper_sum(&[real(nu), real(1.0)], &[real(n as f64)], real(z), &cfg()).unwrap().value;
            prop_assert!(rel(a, b) < 1e-11, "{a} vs {b}");
        }

        #[test]
        fn raw_connection_agrees_with_near_one(mu in 0.2f64..2.0, nu in 0.2f64..2.5, rho in 0.1f64..2.9, z in 0.3f64..0.48) {
            prop_assume!((rho - rho.round()).abs() > 0.05 && ((rho - nu) - (rho - nu).round()).abs() > 0.05);
            let p = Gauss2F1Params::new(real(mu), real(nu), real(mu + rho), real(1.0 - z)).unwrap();
            let raw = connection_branch_branch(real(mu), real(nu), real(rho), real(z), &cfg()).unwrap().value;
            let conn = gauss_2f1_near_one(&p, &cfg()).unwrap().value;
            prop_assert!(rel(raw, conn) < 1e-10, "{raw} vs {conn}");
        }

        #[test]
        fn z_series_forms_random(mu in 0.2f64..2.0, nu in 0.2f64..2.5, frac in 0.1f64..0.9, z in 0.15f64..0.45, k in 0i64..3) {
            let (mu, nu) = (real(mu), real(nu));
            let z = real(z);
            let lhs = |rho: C64| hyper_sum(&[mu, nu], &[mu + rho], 1.0 - z, &cfg()).unwrap().value;
            let rho = real(frac + k as f64);
            prop_assume!((nu - rho).re.fract().abs() > 0.05 && (nu - rho).re.fract().abs() < 0.95);
            prop_assert!(rel(connection_branch_branch(mu, nu, rho, z, &cfg()).unwrap().value, lhs(rho)) < 1e-9);
            let n = k as u64 + 1;
            prop_assert!(rel(connection_pole_kernel(mu, nu, n, z, &cfg()).unwrap().value, lhs(real(n as f64))) < 1e-9);
            let rho = nu + k as f64;
            prop_assert!(rel(connection_origin_neg(mu, nu, rho, z, &cfg()).unwrap().value, lhs(rho)) < 1e-9);
            let nu2 = real(frac) + (k + 1) as f64;
            let lhs2 = hyper_sum(&[mu, nu2], &[mu + frac], 1.0 - z, &cfg()).unwrap().value;
            prop_assert!(rel(connection_origin_pos(mu, nu2, real(frac), z, &cfg()).unwrap().value, lhs2) < 1e-9);
        }

        #[test]
        fn pfaff_consistency(a in 0.1f64..2.0, b in 0.1f64..2.0, cc in 0.2f64..3.0, z in -0.9f64..0.45) {
            let p = Gauss2F1Params::new(real(a), real(b), real(cc), real(z)).unwrap();
            let lhs = pfaff_transform(&p, &cfg()).unwrap();
            let rhs = hyper_sum(&[real(a), real(cc - b)], &[real(cc)], real(z), &cfg()).unwrap().value;
            prop_assert!(rel(lhs, rhs) < 1e-10);
        }
    }
}
