//! Complex special-function primitives: gamma, log-gamma, digamma,
//! Pochhammer symbols, generalized binomials, principal powers and `sin(πz)`.
//!
//! Gamma uses the Lanczos approximation with Godfrey's g = 607/128 coefficient
//! set on `Re z ≥ 1/2` and reflection elsewhere. Log-gamma is computed
//! independently through Stirling's series after upward recurrence, which
//! yields the standard branch (cut along the negative real axis).

use crate::error::{FpiError, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

pub type C64 = Complex64;

/// Default tolerance for deciding that a value is an integer.
pub const INT_TOL: f64 = 1e-9;

/// Values this close to an integer (but outside `INT_TOL`) are ill-conditioned.
pub const NEAR_INT_WARN: f64 = 1e-6;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_C: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_76e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

// B_{2k} / (2k (2k-1)) for the Stirling series.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

// B_{2k} / (2k) for the digamma asymptotic series.
const DIGAMMA_ASY: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
    43867.0 / 14364.0,
    -174_611.0 / 6600.0,
];

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Returns `n` when `|z - n| <= tol` for an integer `n`.
pub fn as_integer(z: C64, tol: f64) -> Option<i64> {
    let n = z.re.round();
    if (z - n).norm() <= tol && n.abs() < 9.0e15 {
        Some(n as i64)
    } else {
        None
    }
}

/// Returns `n >= 0` when `z` is within `tol` of `-n`.
pub fn as_nonpositive_integer(z: C64, tol: f64) -> Option<u64> {
    match as_integer(z, tol) {
        Some(n) if n <= 0 => Some((-n) as u64),
        _ => None,
    }
}

/// True when `z` is within `NEAR_INT_WARN` of an integer but not within `tol`.
pub fn near_integer(z: C64, tol: f64) -> bool {
    let d = (z - z.re.round()).norm();
    d > tol && d <= NEAR_INT_WARN
}

pub(crate) fn warn_if_near_integer(what: &str, z: C64, tol: f64) {
    if near_integer(z, tol) {
        log::warn!("{what} = {z} is within {NEAR_INT_WARN:e} of an integer; result may be ill-conditioned");
    }
}

/// `(sin πx, cos πx)` with exact reduction modulo 2.
fn sincos_pi_real(x: f64) -> (f64, f64) {
    if !x.is_finite() {
        return (f64::NAN, f64::NAN);
    }
    let n = (2.0 * x).round();
    let r = x - 0.5 * n;
    let (s, c) = (PI * r).sin_cos();
    match (n as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

/// `sin(πz)`, exactly zero at integers within `INT_TOL`.
pub fn sin_pi(z: C64) -> C64 {
    if as_integer(z, INT_TOL).is_some() {
        return C64::new(0.0, 0.0);
    }
    let (s, c) = sincos_pi_real(z.re);
    let y = PI * z.im;
    C64::new(s * y.cosh(), c * y.sinh())
}

/// `cos(πz)` with the same argument reduction as [`sin_pi`].
pub fn cos_pi(z: C64) -> C64 {
    let (s, c) = sincos_pi_real(z.re);
    let y = PI * z.im;
    C64::new(c * y.cosh(), -s * y.sinh())
}

fn lanczos_gamma(z: C64) -> C64 {
    let zm = z - 1.0;
    let mut acc = real(LANCZOS_C[0]);
    for (i, &ci) in LANCZOS_C.iter().enumerate().skip(1) {
        acc += ci / (zm + i as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    ((zm + 0.5) * t.ln() - t + LN_SQRT_2PI).exp() * acc
}

/// Γ(z). Infinite (not an error) at the poles; use [`log_gamma`] or
/// [`reciprocal_gamma`] where poles matter.
pub fn gamma(z: C64) -> C64 {
    if let Some(_) = as_nonpositive_integer(z, INT_TOL) {
        return C64::new(f64::INFINITY, 0.0);
    }
    if z.re < 0.5 {
        PI / (sin_pi(z) * lanczos_gamma(1.0 - z))
    } else {
        lanczos_gamma(z)
    }
}

/// Γ(z) with an error at the poles.
pub fn gamma_checked(z: C64) -> Result<C64> {
    if let Some(n) = as_nonpositive_integer(z, INT_TOL) {
        return Err(FpiError::PoleAtNonpositiveInteger(-(n as i64)));
    }
    Ok(gamma(z))
}

/// 1/Γ(z); exactly zero at nonpositive integers within `INT_TOL`.
pub fn reciprocal_gamma(z: C64) -> C64 {
    if as_nonpositive_integer(z, INT_TOL).is_some() {
        return C64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        sin_pi(z) * lanczos_gamma(1.0 - z) / PI
    } else {
        let g = lanczos_gamma(z);
        if g.is_finite() {
            1.0 / g
        } else {
            (-log_gamma_unchecked(z)).exp()
        }
    }
}

fn stirling(z: C64) -> C64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut corr = C64::new(0.0, 0.0);
    let mut p = inv;
    for &k in STIRLING.iter() {
        corr += k * p;
        p *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + corr
}

fn log_gamma_unchecked(z: C64) -> C64 {
    // Upward recurrence keeps every Log(z + k) on the principal branch,
    // which reproduces the standard continuous branch off the negative axis.
    let shift = if z.re < 12.0 { (12.0 - z.re).ceil() as usize } else { 0 };
    let mut w = z;
    let mut acc = C64::new(0.0, 0.0);
    for _ in 0..shift {
        acc += w.ln();
        w += 1.0;
    }
    stirling(w) - acc
}

/// Standard branch of ln Γ(z).
pub fn log_gamma(z: C64) -> Result<C64> {
    if let Some(n) = as_nonpositive_integer(z, INT_TOL) {
        return Err(FpiError::PoleAtNonpositiveInteger(-(n as i64)));
    }
    Ok(log_gamma_unchecked(z))
}

/// ln(1/Γ(z)) usable inside log-space products, `None` at poles (where 1/Γ = 0).
pub(crate) fn log_rgamma(z: C64) -> Option<C64> {
    log_gamma(z).ok().map(|v| -v)
}

fn digamma_asymptotic(z: C64) -> C64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut corr = C64::new(0.0, 0.0);
    let mut p = inv2;
    for &k in DIGAMMA_ASY.iter() {
        corr += k * p;
        p *= inv2;
    }
    z.ln() - 0.5 * inv - corr
}

/// ψ(z), the logarithmic derivative of Γ.
pub fn digamma(z: C64) -> Result<C64> {
    if let Some(n) = as_nonpositive_integer(z, INT_TOL) {
        return Err(FpiError::PoleAtNonpositiveInteger(-(n as i64)));
    }
    if z.re < 0.5 {
        // ψ(z) = ψ(1−z) − π cot(πz)
        let cot = cos_pi(z) / sin_pi(z);
        return Ok(digamma(1.0 - z)? - PI * cot);
    }
    let mut w = z;
    let mut acc = C64::new(0.0, 0.0);
    while w.norm() < 14.0 {
        acc += 1.0 / w;
        w += 1.0;
    }
    Ok(digamma_asymptotic(w) - acc)
}

/// lim_{z→−n} ψ(z)/Γ(z) = (−1)^{n+1} n!.
pub fn digamma_over_gamma_limit(n: u64) -> f64 {
    let f = factorial(n);
    if n % 2 == 0 {
        -f
    } else {
        f
    }
}

/// n! as a float (exact up to 22!).
pub fn factorial(n: u64) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Rising factorial (a)_k = a(a+1)…(a+k−1).
pub fn pochhammer(a: C64, k: u64) -> C64 {
    let mut p = C64::new(1.0, 0.0);
    for j in 0..k {
        p *= a + j as f64;
    }
    p
}

/// Generalized binomial C(α, k) = (−1)^k (−α)_k / k!.
pub fn binomial_complex(alpha: C64, k: u64) -> C64 {
    let mut p = C64::new(1.0, 0.0);
    for j in 0..k {
        p *= (alpha - j as f64) / (j + 1) as f64;
    }
    p
}

/// Principal value of base^exponent.
pub fn principal_power(base: C64, exponent: C64) -> Result<C64> {
    if base == C64::new(0.0, 0.0) {
        if exponent.re > 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        return Err(FpiError::ZeroToNonpositivePower);
    }
    if exponent == C64::new(0.0, 0.0) {
        return Ok(C64::new(1.0, 0.0));
    }
    Ok(pow(base, exponent))
}

/// Principal power without the zero-base check; callers guarantee base ≠ 0.
#[inline]
pub(crate) fn pow(base: C64, exponent: C64) -> C64 {
    if exponent.im == 0.0 && base.im == 0.0 && base.re > 0.0 {
        return real(base.re.powf(exponent.re));
    }
    (exponent * base.ln()).exp()
}

/// Principal logarithm with the real fast path kept exact.
#[inline]
pub(crate) fn ln(z: C64) -> C64 {
    if z.im == 0.0 && z.re > 0.0 {
        real(z.re.ln())
    } else {
        z.ln()
    }
}

/// A product of gamma factors and powers accumulated in log space.
///
/// Each factor contributes to a complex logarithm; the result is exponentiated
/// once. Reciprocal gamma factors at poles make the whole product vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogProduct {
    log: C64,
    zero: bool,
}

impl Default for LogProduct {
    fn default() -> Self {
        Self::one()
    }
}

impl LogProduct {
    pub fn one() -> Self {
        Self { log: C64::new(0.0, 0.0), zero: false }
    }

    pub fn zero() -> Self {
        Self { log: C64::new(0.0, 0.0), zero: true }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn scalar(mut self, x: C64) -> Self {
        if x == C64::new(0.0, 0.0) {
            self.zero = true;
        } else {
            self.log += x.ln();
        }
        self
    }

    pub fn real(self, x: f64) -> Self {
        self.scalar(real(x))
    }

    /// Multiplies by (-1)^k.
    pub fn sign(mut self, k: i64) -> Self {
        if k.rem_euclid(2) == 1 {
            self.log += C64::new(0.0, PI);
        }
        self
    }

    pub fn gamma(mut self, z: C64) -> Result<Self> {
        self.log += log_gamma(z)?;
        Ok(self)
    }

    pub fn rgamma(mut self, z: C64) -> Self {
        match log_rgamma(z) {
            Some(v) => self.log += v,
            None => self.zero = true,
        }
        self
    }

    /// Multiplies by k! (exact for the argument range used here).
    pub fn factorial(mut self, k: u64) -> Self {
        self.log += log_factorial(k);
        self
    }

    pub fn rfactorial(mut self, k: u64) -> Self {
        self.log -= log_factorial(k);
        self
    }

    /// Multiplies by (a)_k = Γ(a+k)/Γ(a), zero when the product vanishes.
    pub fn pochhammer(self, a: C64, k: u64) -> Self {
        if k < 32 {
            return self.scalar(pochhammer(a, k));
        }
        if let Some(n) = as_nonpositive_integer(a, INT_TOL) {
            if k > n {
                return Self::zero();
            }
        }
        match (log_gamma(a + k as f64), log_gamma(a)) {
            (Ok(x), Ok(y)) => Self { log: self.log + x - y, ..self },
            _ => self.scalar(pochhammer(a, k)),
        }
    }

    /// Divides by (a)_k.
    pub fn rpochhammer(self, a: C64, k: u64) -> Result<Self> {
        let p = Self::one().pochhammer(a, k);
        if p.zero {
            return Err(FpiError::DegenerateParameters(format!("({a})_{k} vanishes in a denominator")));
        }
        Ok(Self { log: self.log - p.log, ..self })
    }

    /// Multiplies by base^exponent (principal branch).
    pub fn power(mut self, base: C64, exponent: C64) -> Self {
        if base == C64::new(0.0, 0.0) {
            if exponent != C64::new(0.0, 0.0) {
                self.zero = true;
            }
            return self;
        }
        self.log += exponent * ln(base);
        self
    }

    pub fn times(self, other: LogProduct) -> Self {
        Self { log: self.log + other.log, zero: self.zero || other.zero }
    }

    pub fn log(&self) -> Option<C64> {
        if self.zero {
            None
        } else {
            Some(self.log)
        }
    }

    pub fn value(self) -> C64 {
        if self.zero {
            C64::new(0.0, 0.0)
        } else {
            self.log.exp()
        }
    }
}

fn log_factorial(k: u64) -> C64 {
    if k < 2 {
        return C64::new(0.0, 0.0);
    }
    if k <= 170 {
        return real(factorial(k).ln());
    }
    log_gamma_unchecked(real(k as f64 + 1.0))
}
