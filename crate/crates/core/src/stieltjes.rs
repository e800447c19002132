//! The generalized Stieltjes integral
//! `S = ∫₀^∞ x^{ν-1} (a+x)^{-μ} (b+x)^{-ρ} dx`
//! evaluated by quadrature and by a finite-part series in powers of `b`
//! plus the singular contribution of the kernel `(b+x)^{-ρ}`.
//!
//! Expanding `(b+x)^{-ρ} = Σ C(-ρ,k) b^k x^{-ρ-k}` term by term gives the
//! fundamental finite-part integrals `∳₀^∞ (a+x)^{-μ} x^{ν-ρ-k-1} dx`. What
//! the expansion misses is either a progenic finite part over `[0, b]`, a
//! residue at `x = -b`, or, when `ν - ρ` is an integer, a log-weighted
//! progenic finite part.

use crate::config::EvalConfig;
use crate::error::{FpiError, Result};
use crate::fpi_closed::{branch_lp, pole_lp};
use crate::hyp2f1::{gauss_2f1_near_one, gauss_series, hyper_log_sum, hyper_sum, Gauss2F1Params};
use crate::quad::{integrate, Interval, Node, QuadOptions};
use crate::special::{
    as_integer, binomial_complex, c, factorial, ln, pochhammer, pow, real, sin_pi, warn_if_near_integer,
    LogProduct, C64, INT_TOL, NEAR_INT_WARN,
};
use crate::sum::{csum, SeriesResult};
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;

/// Largest `|b/a|` accepted by the series path.
pub const MAX_RATIO: f64 = 0.9;

const MAX_HYP_ARG: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StieltjesGaussSpec {
    a: C64,
    b: C64,
    mu: C64,
    nu: C64,
    rho: C64,
    #[serde(skip)]
    int_tol: f64,
}

fn off_cut(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite() && !(z.im == 0.0 && z.re <= 0.0)
}

impl StieltjesGaussSpec {
    pub fn new(a: C64, b: C64, mu: C64, nu: C64, rho: C64) -> Result<Self> {
        Self::with_int_tol(a, b, mu, nu, rho, INT_TOL)
    }

    pub fn with_int_tol(a: C64, b: C64, mu: C64, nu: C64, rho: C64, int_tol: f64) -> Result<Self> {
        let spec = Self::progenic_with_int_tol(a, b, mu, nu, rho, int_tol)?;
        if mu == c(0.0, 0.0) {
            return Err(FpiError::domain("μ must be nonzero"));
        }
        if !((rho + mu - nu).re > 0.0) {
            return Err(FpiError::domain(format!("Re(ρ+μ-ν) must be positive, got {}", rho + mu - nu)));
        }
        Ok(spec)
    }

    /// Parameters for the progenic integrals over `[0, b]` alone.
    ///
    /// Those converge at the lower end for `Re ν > 0` regardless of the
    /// behaviour at infinity, so `μ = 0` and `Re(ρ+μ-ν) ≤ 0` are accepted.
    pub fn progenic(a: C64, b: C64, mu: C64, nu: C64, rho: C64) -> Result<Self> {
        Self::progenic_with_int_tol(a, b, mu, nu, rho, INT_TOL)
    }

    pub fn progenic_with_int_tol(a: C64, b: C64, mu: C64, nu: C64, rho: C64, int_tol: f64) -> Result<Self> {
        if !off_cut(a) || !off_cut(b) {
            return Err(FpiError::domain("a and b must satisfy |arg| < π"));
        }
        if !(nu.re > 0.0) {
            return Err(FpiError::domain(format!("Re ν must be positive, got {nu}")));
        }
        if !(rho.re > 0.0) {
            return Err(FpiError::domain(format!("Re ρ must be positive, got {rho}")));
        }
        for v in [mu, nu, rho] {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(FpiError::domain("parameters must be finite"));
            }
        }
        Ok(Self { a, b, mu, nu, rho, int_tol })
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn b(&self) -> C64 {
        self.b
    }

    pub fn mu(&self) -> C64 {
        self.mu
    }

    pub fn nu(&self) -> C64 {
        self.nu
    }

    pub fn rho(&self) -> C64 {
        self.rho
    }

    pub fn int_tol(&self) -> f64 {
        self.int_tol
    }

    fn ratio(&self) -> C64 {
        self.b / self.a
    }

    fn real_ordered(&self) -> Option<(f64, f64)> {
        if self.a.im == 0.0 && self.b.im == 0.0 && self.b.re > 0.0 && self.b.re < self.a.re {
            Some((self.a.re, self.b.re))
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseTag {
    /// `ρ - ν` and `ρ` not integers.
    BranchBranch,
    /// `ρ = n ≥ 1`, `ν` not an integer.
    PoleKernel,
    /// `ν - ρ` a positive integer.
    PoleOriginPos,
    /// `ρ - ν` a nonnegative integer.
    PoleOriginNeg,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::BranchBranch => "BranchBranch",
            CaseTag::PoleKernel => "PoleKernel",
            CaseTag::PoleOriginPos => "PoleOriginPos",
            CaseTag::PoleOriginNeg => "PoleOriginNeg",
        };
        f.write_str(s)
    }
}

pub fn classify_case(spec: &StieltjesGaussSpec) -> Result<CaseTag> {
    let tol = spec.int_tol;
    let rho_int = as_integer(spec.rho, tol);
    match as_integer(spec.rho - spec.nu, tol) {
        Some(_) if rho_int.is_some() => Err(FpiError::UnsupportedCase(format!(
            "ρ = {} and ν = {} are both integers",
            spec.rho, spec.nu
        ))),
        Some(d) if d < 0 => Ok(CaseTag::PoleOriginPos),
        Some(_) => Ok(CaseTag::PoleOriginNeg),
        None if rho_int.is_some() => Ok(CaseTag::PoleKernel),
        None => {
            warn_if_near_integer("ρ-ν", spec.rho - spec.nu, NEAR_INT_WARN);
            warn_if_near_integer("ρ", spec.rho, NEAR_INT_WARN);
            Ok(CaseTag::BranchBranch)
        }
    }
}

/// `ρ - ν` as an integer, for the pole-origin cases.
fn shift(spec: &StieltjesGaussSpec) -> i64 {
    as_integer(spec.rho - spec.nu, spec.int_tol).expect("pole-origin case")
}

/// `S` by quadrature after `x = t/(1-t)`, for real positive `a` and `b`.
pub fn stieltjes_direct(spec: &StieltjesGaussSpec) -> Result<C64> {
    let (a, b) = (spec.a, spec.b);
    if a.im != 0.0 || b.im != 0.0 || a.re <= 0.0 || b.re <= 0.0 {
        return Err(FpiError::domain("quadrature needs real positive a and b"));
    }
    let (a, b) = (a.re, b.re);
    let (mu, nu, rho) = (spec.mu, spec.nu, spec.rho);
    let f = |n: Node| {
        // x = t/(1-t), dx = dt/(1-t)^2
        let (t, u) = (n.from_lower, n.to_upper);
        if t == 0.0 || u == 0.0 {
            return c(0.0, 0.0);
        }
        let x = t / u;
        let lx = x.ln();
        let la = if x > a { lx + (a / x).ln_1p() } else { a.ln() + (x / a).ln_1p() };
        let lb = if x > b { lx + (b / x).ln_1p() } else { b.ln() + (x / b).ln_1p() };
        ((nu - 1.0) * lx - mu * la - rho * lb - 2.0 * u.ln()).exp()
    };
    let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-11, max_level: 10, max_depth: 10 };
    Ok(integrate(f, Interval::Finite(0.0, 1.0), &[0.5], &opts)?.value)
}

/// The `k`-th fundamental finite-part integral of the expansion,
/// `∳₀^∞ (a+x)^{-μ} x^{-(k+ρ-ν+1)} dx`.
pub fn fundamental_fpi_for_case(spec: &StieltjesGaussSpec, k: u64) -> Result<C64> {
    let (a, mu) = (spec.a, spec.mu);
    let kf = k as f64;
    match classify_case(spec)? {
        CaseTag::BranchBranch | CaseTag::PoleKernel => Ok(branch_lp(a, mu, spec.rho - spec.nu + kf + 1.0)?.value()),
        CaseTag::PoleOriginPos | CaseTag::PoleOriginNeg => {
            let m = shift(spec) + k as i64;
            if m >= 0 {
                Ok(pole_lp(a, mu, m as u64)?.value())
            } else {
                let e = mu + (m as f64);
                Ok(LogProduct::one().gamma(real(-(m as f64)))?.gamma(e)?.rgamma(mu).power(a, -e).value())
            }
        }
    }
}

/// Terms `C(-ρ,k) b^k · fundamental_fpi_for_case(k)` of the finite-part series.
pub fn fpi_series_terms(spec: &StieltjesGaussSpec, count: usize) -> Result<Vec<C64>> {
    (0..count as u64)
        .map(|k| Ok(binomial_complex(-spec.rho, k) * pow(spec.b, real(k as f64)) * fundamental_fpi_for_case(spec, k)?))
        .collect()
}

/// `S` as the finite-part series plus the singular contribution.
pub fn stieltjes_fpi_series(spec: &StieltjesGaussSpec, cfg: &EvalConfig) -> Result<SeriesResult> {
    let z = spec.ratio();
    if z.norm() > MAX_RATIO {
        return Err(FpiError::domain(format!("|b/a| = {} exceeds {MAX_RATIO}", z.norm())));
    }
    let (a, b, mu, nu, rho) = (spec.a, spec.b, spec.mu, spec.nu, spec.rho);
    let r = match classify_case(spec)? {
        tag @ (CaseTag::BranchBranch | CaseTag::PoleKernel) => {
            let d = rho - nu;
            let t0 = branch_lp(a, mu, d + 1.0)?.value();
            let s = hyper_sum(&[rho, d + mu], &[d + 1.0], z, cfg)?.scale(t0);
            let singular = if tag == CaseTag::BranchBranch {
                progenic_branch(spec, cfg)? * sin_pi(rho) / sin_pi(d)
            } else {
                // -2πi Res / (e^{2πiν} - 1) with the phase e^{iπν} cancelled
                -real(PI) / sin_pi(nu) * residue_sum(spec)
            };
            s.add_exact(singular)
        }
        CaseTag::PoleOriginPos => {
            let n = (-shift(spec)) as u64;
            let nf = n as f64;
            let mut head = Vec::with_capacity(n as usize);
            for k in 0..n {
                head.push(binomial_complex(-rho, k) * b.powu(k as u32) * fundamental_fpi_for_case(spec, k)?);
            }
            let pre = LogProduct::one()
                .sign(n as i64)
                .pochhammer(rho, n)
                .rfactorial(n)
                .power(b, real(nf))
                .power(a, -mu)
                .value();
            let tail =
                hyper_log_sum(&[rho + nf, mu], &[real(nf + 1.0)], z, ln(a), &[(1.0, real(1.0)), (-1.0, mu)], cfg)?;
            let singular = sin_pi(rho) / PI * progenic_log_value(spec, cfg)? * if n % 2 == 0 { -1.0 } else { 1.0 };
            tail.scale(pre).add_exact(csum(head) + singular)
        }
        CaseTag::PoleOriginNeg => {
            let m = shift(spec) as u64;
            let mf = m as f64;
            let pre = LogProduct::one()
                .sign(m as i64)
                .pochhammer(mu, m)
                .rfactorial(m)
                .power(a, -(mu + mf))
                .value();
            let s = hyper_log_sum(
                &[rho, mu + mf],
                &[real(mf + 1.0)],
                z,
                ln(a),
                &[(1.0, real(mf + 1.0)), (-1.0, mu + mf)],
                cfg,
            )?;
            let singular = sin_pi(rho) / PI * progenic_log_value(spec, cfg)? * if m % 2 == 0 { -1.0 } else { 1.0 };
            s.scale(pre).add_exact(singular)
        }
    };
    r.require_converged()
}

/// `∳₀^b x^{ν-1} (a-x)^{-μ} (b-x)^{-ρ} dx` for `0 < b < a`, branch-branch case.
///
/// Evaluates `b^{ν-ρ} (a-b)^{-μ} Γ(ν)Γ(1-ρ)/Γ(ν-ρ+1) ₂F₁(μ, 1-ρ; ν-ρ+1; b/(b-a))`,
/// switching to the Pfaff-equivalent argument `b/a` when that is smaller.
pub fn progenic_fpi_gauss(spec: &StieltjesGaussSpec, cfg: &EvalConfig) -> Result<C64> {
    if spec.real_ordered().is_none() {
        return Err(FpiError::domain("the progenic integral needs real 0 < b < a"));
    }
    if classify_case(spec)? != CaseTag::BranchBranch {
        return Err(FpiError::UnsupportedCase("progenic_fpi_gauss needs ρ and ρ-ν non-integer".into()));
    }
    progenic_branch(spec, cfg)
}

fn progenic_branch(spec: &StieltjesGaussSpec, cfg: &EvalConfig) -> Result<C64> {
    let (a, b, mu, nu, rho) = (spec.a, spec.b, spec.mu, spec.nu, spec.rho);
    let w = b / (b - a);
    let z = b / a;
    let pre = LogProduct::one().power(b, nu - rho).gamma(nu)?.gamma(1.0 - rho)?.rgamma(nu - rho + 1.0);
    let (pre, f) = if w.norm() <= z.norm() {
        (pre.power(a - b, -mu), hyper_sum(&[mu, 1.0 - rho], &[nu - rho + 1.0], w, cfg)?)
    } else {
        (pre.power(a, -mu), hyper_sum(&[mu, nu], &[nu - rho + 1.0], z, cfg)?)
    };
    if w.norm().min(z.norm()) > MAX_HYP_ARG {
        return Err(FpiError::domain("b is too close to a for the progenic series"));
    }
    Ok(pre.value() * f.require_converged()?.value)
}

/// `∳₀^b x^{ν-1} (a-x)^{-μ} (b-x)^{-ρ} ln x dx` for `0 < b < a` when `ν - ρ` is an integer.
pub fn progenic_fpi_gauss_log(spec: &StieltjesGaussSpec, cfg: &EvalConfig) -> Result<C64> {
    if spec.real_ordered().is_none() {
        return Err(FpiError::domain("the progenic integral needs real 0 < b < a"));
    }
    match classify_case(spec)? {
        CaseTag::PoleOriginPos | CaseTag::PoleOriginNeg => progenic_log_value(spec, cfg),
        _ => Err(FpiError::UnsupportedCase("progenic_fpi_gauss_log needs ν-ρ an integer".into())),
    }
}

fn progenic_log_value(spec: &StieltjesGaussSpec, cfg: &EvalConfig) -> Result<C64> {
    let (a, b, mu, nu, rho) = (spec.a, spec.b, spec.mu, spec.nu, spec.rho);
    let z = b / a;
    if z.norm() > MAX_HYP_ARG {
        return Err(FpiError::domain("b is too close to a for the progenic series"));
    }
    let d = shift(spec);
    let cot = real(PI) / sin_pi(rho);
    if d < 0 {
        // ν = ρ + n
        let n = (-d) as u64;
        let nf = n as f64;
        let pre = LogProduct::one()
            .scalar(cot)
            .gamma(nu)?
            .rgamma(rho)
            .rfactorial(n)
            .power(b, real(nf))
            .power(a, -mu)
            .value();
        let s = hyper_log_sum(&[mu, nu], &[real(nf + 1.0)], z, ln(b), &[(1.0, nu), (-1.0, real(nf + 1.0))], cfg)?;
        Ok(s.require_converged()?.value * pre)
    } else {
        // ρ = ν + m
        let m = d as u64;
        let mf = m as f64;
        let pre = cot * pochhammer(mu, m) / factorial(m) * pow(a, -(mu + mf));
        let s = hyper_log_sum(&[mu + mf, rho], &[real(mf + 1.0)], z, ln(b), &[(1.0, rho), (-1.0, real(1.0))], cfg)?;
        let finite = csum((0..m).map(|k| {
            pochhammer(mu, k) * pochhammer(nu, k) * (factorial(m - k - 1) / factorial(k)) * (-z).powu(k as u32)
        }));
        let fin_pre = LogProduct::one()
            .sign(m as i64 + 1)
            .scalar(cot)
            .gamma(nu)?
            .rgamma(rho)
            .power(b, real(-mf))
            .power(a, -mu)
            .value();
        Ok(s.require_converged()?.value * pre + fin_pre * finite)
    }
}

/// `Σ_{k<n} C(n-1,k) (ν-k)_k (μ)_{n-1-k} b^{ν-1-k} (a-b)^{k-μ-n+1} · (-1)^n / Γ(n)`.
fn residue_sum(spec: &StieltjesGaussSpec) -> C64 {
    let n = as_integer(spec.rho, spec.int_tol).expect("pole-kernel case") as u64;
    let (a, b, mu, nu) = (spec.a, spec.b, spec.mu, spec.nu);
    let nf = n as f64;
    let s = csum((0..n).map(|k| {
        let kf = k as f64;
        let binom = factorial(n - 1) / (factorial(k) * factorial(n - 1 - k));
        pochhammer(nu - kf, k) * pochhammer(mu, n - 1 - k) * binom * pow(b, nu - 1.0 - kf) * pow(a - b, kf - mu - nf + 1.0)
    }));
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    s * sign / factorial(n - 1)
}

/// Residue of `z^{ν-1} (a+z)^{-μ} (b+z)^{-n}` at `z = -b`, with `arg z ∈ (0, 2π)`
/// on the cut of `z^{ν-1}` so that `(-b)^{ν-1} = e^{iπ(ν-1)} b^{ν-1}`.
pub fn residue_pole_kernel(spec: &StieltjesGaussSpec) -> Result<C64> {
    if classify_case(spec)? != CaseTag::PoleKernel {
        return Err(FpiError::UnsupportedCase("residue_pole_kernel needs ρ = n and ν non-integer".into()));
    }
    Ok((C64::i() * PI * spec.nu).exp() * residue_sum(spec))
}

/// Reference value `Γ(ν)Γ(μ-ν+ρ)/Γ(μ+ρ) · b^{ν-ρ} a^{-μ} ₂F₁(μ, ν; μ+ρ; 1-b/a)`.
pub fn stieltjes_reference(spec: &StieltjesGaussSpec, cfg: &EvalConfig) -> Result<C64> {
    let (a, b, mu, nu, rho) = (spec.a, spec.b, spec.mu, spec.nu, spec.rho);
    let w = 1.0 - b / a;
    let pre = LogProduct::one()
        .gamma(nu)?
        .gamma(mu - nu + rho)?
        .rgamma(mu + rho)
        .power(b, nu - rho)
        .power(a, -mu)
        .value();
    let p = Gauss2F1Params::new(mu, nu, mu + rho, w)?;
    let f = if w.norm() <= 0.5 { gauss_series(&p, cfg)? } else { gauss_2f1_near_one(&p, cfg)? };
    Ok(pre * f.value)
}
