//! Brute-force finite parts straight from the cutoff definition.
//!
//! For `I(ε) = ∫_ε^d f(x) x^{-λ} (ln x)^δ dx` with `f(x) = Σ a_p x^p` near 0,
//! term-by-term integration gives
//!
//! ```text
//! I(ε) = C - Σ_p a_p ε^{q_p} / q_p                           (δ = 0, q_p ≠ 0)
//!          - a_p ln ε                                        (δ = 0, q_p = 0)
//!          - a_p (ε^{q_p} ln ε / q_p - ε^{q_p} / q_p²)       (δ = 1, q_p ≠ 0)
//!          - a_p ln² ε / 2                                   (δ = 1, q_p = 0)
//! ```
//!
//! with `q_p = p + 1 - λ`. The finite part is `C`. Terms with `Re q_p ≤ 0` are
//! the divergent model and are dropped; the rest vanish as `ε → 0`.
//!
//! `I(ε)` is computed on `ε_j = ε₀ 2^{-j}` and `C` is recovered by a weighted
//! linear least-squares fit over these known exponents. Logarithms are always
//! `ln ε` (never `ln(cε)`), so any constant from rescaling lands in `C`.

use crate::error::{FpiError, Result};
use crate::quad::{integrate, Interval, Node, QuadOptions};
use crate::special::{pow, real, C64};
use crate::sum::Neumaier;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::OnceLock;

type Integrand<'a> = Box<dyn Fn(f64, f64) -> C64 + Sync + 'a>;

/// A divergent integral `∫₀^d f(x) x^{-λ} (ln x)^δ dx` with `f` regular at 0.
pub struct OracleProblem<'a> {
    integrand: Integrand<'a>,
    pub lambda: C64,
    pub log_factor: bool,
    pub upper_limit: f64,
    /// Taylor coefficients `a_k` of `f` at 0; trusted as exact when given.
    pub taylor_coeffs: Option<Vec<C64>>,
}

impl<'a> OracleProblem<'a> {
    pub fn new<F>(f: F, lambda: C64, upper_limit: f64) -> Self
    where
        F: Fn(f64) -> C64 + Sync + 'a,
    {
        Self::with_gap(move |x, _| f(x), lambda, upper_limit)
    }

    /// Integrand receiving `(x, d - x)`, the second argument computed without
    /// cancellation near `d` (infinite when `d` is).
    pub fn with_gap<F>(f: F, lambda: C64, upper_limit: f64) -> Self
    where
        F: Fn(f64, f64) -> C64 + Sync + 'a,
    {
        Self { integrand: Box::new(f), lambda, log_factor: false, upper_limit, taylor_coeffs: None }
    }

    pub fn log_factor(mut self, on: bool) -> Self {
        self.log_factor = on;
        self
    }

    pub fn taylor(mut self, coeffs: Vec<C64>) -> Self {
        self.taylor_coeffs = Some(coeffs);
        self
    }

    fn f(&self, x: f64, gap: f64) -> C64 {
        (self.integrand)(x, gap)
    }

    fn weight(&self, x: f64) -> C64 {
        let w = pow(real(x), -self.lambda);
        if self.log_factor {
            w * x.ln()
        } else {
            w
        }
    }

    fn gap(&self, x: f64) -> f64 {
        if self.upper_limit.is_finite() {
            self.upper_limit - x
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub eps0: f64,
    pub levels: usize,
    /// Breakpoint between the finite and the exp-sinh part of `[ε₀, ∞)`.
    pub split: f64,
    pub corrections: usize,
    /// Interpolation radius for estimated Taylor coefficients; `None` uses `eps0`.
    pub taylor_radius: Option<f64>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { eps0: 5e-2, levels: 20, split: 1.0, corrections: 5, taylor_radius: None }
    }
}

/// One dropped divergent contribution `coefficient · ε^exponent · (ln ε)^log_power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DroppedTerm {
    pub exponent: C64,
    pub log_power: u32,
    pub coefficient: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub finite_part: C64,
    pub error_estimate: f64,
    pub dropped_terms: Vec<DroppedTerm>,
}

/// Exponents with real part below this count as divergent (or logarithmic).
const DIVERGENT_CUTOFF: f64 = 1e-9;
const COLLISION: f64 = 1e-3;

#[derive(Debug, Clone, Copy)]
struct Column {
    exponent: C64,
    log_power: u32,
}

impl Column {
    fn at(&self, eps: f64) -> C64 {
        let l = eps.ln();
        let base = if self.exponent == C64::new(0.0, 0.0) { real(1.0) } else { (self.exponent * l).exp() };
        base * l.powi(self.log_power as i32)
    }
}

/// Columns `ε^q (ln ε)^k` contributed by the power `x^p` of `f`.
fn columns_for(q: C64, log_factor: bool) -> Vec<Column> {
    let zero = q.norm() <= DIVERGENT_CUTOFF;
    match (log_factor, zero) {
        (false, false) => vec![Column { exponent: q, log_power: 0 }],
        (false, true) => vec![Column { exponent: real(0.0), log_power: 1 }],
        (true, false) => vec![Column { exponent: q, log_power: 1 }, Column { exponent: q, log_power: 0 }],
        (true, true) => vec![Column { exponent: real(0.0), log_power: 2 }],
    }
}

/// Analytic coefficients of those columns for Taylor coefficient `a`.
fn divergent_coefficients(a: C64, q: C64, log_factor: bool) -> Vec<C64> {
    let zero = q.norm() <= DIVERGENT_CUTOFF;
    match (log_factor, zero) {
        (false, false) => vec![-a / q],
        (false, true) => vec![-a],
        (true, false) => vec![-a / q, a / (q * q)],
        (true, true) => vec![-a * 0.5],
    }
}

/// Number of Taylor terms whose contribution does not vanish as ε → 0.
fn divergent_count(lambda: C64) -> usize {
    let mut p = 0usize;
    while (p as f64 + 1.0 - lambda.re) <= DIVERGENT_CUTOFF {
        p += 1;
    }
    p
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n <= 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[n - 1 - i] = ws[i];
    }
    (xs, ws)
}

fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

/// Taylor coefficients `a_0..a_{count-1}` of `f` at 0.
///
/// Interpolates `f` at 20 Chebyshev points of `[-h, h]` and expands the
/// interpolant in monomials. For `f` analytic on a disk of radius `R > h` the
/// truncation error is `O((h/R)^20)` and rounding contributes about
/// `1e-16 h^{-k} max|f|` to `a_k`.
pub fn taylor_coefficients<F: Fn(f64) -> C64>(f: F, count: usize, h: f64) -> Vec<C64> {
    const N: usize = 20;
    let vals: Vec<C64> = (0..N).map(|j| f(h * (PI * (j as f64 + 0.5) / N as f64).cos())).collect();
    // Chebyshev coefficients of the interpolant in u = x/h
    let cheb: Vec<C64> = (0..N)
        .map(|m| {
            let mut acc = Neumaier::new();
            for (j, v) in vals.iter().enumerate() {
                acc.add(v * (PI * m as f64 * (j as f64 + 0.5) / N as f64).cos());
            }
            acc.value() * (if m == 0 { 1.0 } else { 2.0 } / N as f64)
        })
        .collect();
    // coefficients at rounding level would be amplified by the monomial
    // expansion of high-order T_m
    let top = cheb.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let cheb: Vec<C64> = cheb.into_iter().map(|z| if z.norm() <= 64.0 * f64::EPSILON * top { C64::new(0.0, 0.0) } else { z }).collect();
    // monomial coefficients of T_m, built by T_{m+1} = 2u T_m - T_{m-1}
    let mut mono = vec![C64::new(0.0, 0.0); N];
    let mut prev = vec![0.0; N];
    let mut cur = vec![0.0; N];
    cur[0] = 1.0;
    for (m, cm) in cheb.iter().enumerate() {
        for k in 0..N {
            mono[k] += cm * cur[k];
        }
        let mut next = vec![0.0; N];
        for k in 0..N - 1 {
            next[k + 1] = if m == 0 { cur[k] } else { 2.0 * cur[k] };
        }
        if m > 0 {
            for k in 0..N {
                next[k] -= prev[k];
            }
        }
        prev = std::mem::replace(&mut cur, next);
    }
    mono.iter().take(count).enumerate().map(|(k, v)| v / h.powi(k as i32)).collect()
}

/// Integral over `[eps0, d]` (or `[eps0, ∞)`).
///
/// Dyadic Gauss–Legendre pieces cover `[eps0, x1]`, where `x^{-λ}` is large
/// and double-exponential tolerances would leak into the constant; the
/// remainder goes to tanh-sinh / exp-sinh.
fn base_integral(problem: &OracleProblem, eps0: f64, split: f64) -> Result<C64> {
    let d = problem.upper_limit;
    let x1 = if d.is_finite() { 0.5 * d } else { split.max(eps0) };
    let mut acc = Neumaier::new();
    let mut lo = eps0;
    while lo < x1 {
        let hi = (2.0 * lo).min(x1);
        if hi > 0.75 * x1 && hi < x1 {
            // avoid a sliver at the end
            acc.add(dyadic_piece(problem, lo, x1));
            break;
        }
        acc.add(dyadic_piece(problem, lo, hi));
        lo = hi;
    }
    let g = |n: Node| {
        let x = n.x;
        let gap = if d.is_finite() { n.to_upper } else { f64::INFINITY };
        problem.f(x, gap) * problem.weight(x)
    };
    let interval = if d.is_finite() { Interval::Finite(x1, d) } else { Interval::SemiInfinite(x1) };
    let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-13, ..QuadOptions::default() };
    let tail = match integrate(g, interval, &[], &opts) {
        Ok(r) => r.value,
        Err(_) => integrate(g, interval, &[], &QuadOptions::default())?.value,
    };
    acc.add(tail);
    Ok(acc.value())
}

/// `∫_{lo}^{hi} f x^{-λ} (ln x)^δ dx` by 20-point Gauss–Legendre.
fn dyadic_piece(problem: &OracleProblem, lo: f64, hi: f64) -> C64 {
    let (xs, ws) = gl20();
    let c = 0.5 * (hi + lo);
    let r = 0.5 * (hi - lo);
    let mut acc = Neumaier::new();
    for (x, w) in xs.iter().zip(ws) {
        let t = c + r * x;
        acc.add(problem.f(t, problem.gap(t)) * problem.weight(t) * (w * r));
    }
    acc.value()
}

struct Grid {
    eps: Vec<f64>,
    values: Vec<C64>,
}

fn grid(problem: &OracleProblem, opts: &OracleOptions, points: usize) -> Result<Grid> {
    let eps: Vec<f64> = (0..points).map(|j| opts.eps0 * 0.5f64.powi(j as i32)).collect();
    let base = base_integral(problem, opts.eps0, opts.split)?;
    let pieces: Vec<C64> = (1..points).into_par_iter().map(|j| dyadic_piece(problem, eps[j], eps[j - 1])).collect();
    let mut acc = Neumaier::new();
    acc.add(base);
    let mut values = Vec::with_capacity(points);
    values.push(base);
    for p in pieces {
        acc.add(p);
        values.push(acc.value());
    }
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(FpiError::QuadratureFailure { estimate: f64::NAN, error: f64::INFINITY });
    }
    Ok(Grid { eps, values })
}

struct Model {
    /// Divergent columns removed from the data, with their coefficients.
    known: Vec<(Column, C64)>,
    corrections: Vec<Column>,
}

fn build_model(problem: &OracleProblem, opts: &OracleOptions, corrections: usize) -> Result<Model> {
    let lam = problem.lambda;
    let p_div = divergent_count(lam);
    let q = |p: usize| real(p as f64 + 1.0) - lam;
    let coeffs = match &problem.taylor_coeffs {
        Some(c) if c.len() >= p_div => c[..p_div].to_vec(),
        Some(c) => {
            return Err(FpiError::domain(format!("need {p_div} Taylor coefficients, got {}", c.len())));
        }
        None => {
            let f = |x: f64| problem.f(x, problem.gap(x));
            taylor_coefficients(f, p_div, opts.taylor_radius.unwrap_or(opts.eps0))
        }
    };
    let mut known = Vec::new();
    for (p, a) in coeffs.iter().enumerate() {
        let cols = columns_for(q(p), problem.log_factor);
        let vals = divergent_coefficients(*a, q(p), problem.log_factor);
        known.extend(cols.into_iter().zip(vals));
    }
    let mut corr = Vec::new();
    for p in p_div..p_div + corrections {
        corr.extend(columns_for(q(p), problem.log_factor));
    }
    Ok(Model { known, corrections: corr })
}

fn check_collisions(cols: &[Column]) -> Result<()> {
    let constant = Column { exponent: real(0.0), log_power: 0 };
    let all: Vec<Column> = std::iter::once(constant).chain(cols.iter().copied()).collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if all[i].log_power == all[j].log_power && (all[i].exponent - all[j].exponent).norm() < COLLISION {
                return Err(FpiError::FitIllConditioned(format!(
                    "exponents {} and {} nearly collide",
                    all[i].exponent, all[j].exponent
                )));
            }
        }
    }
    Ok(())
}

/// Weighted least squares for the constant.
fn fit(eps: &[f64], values: &[C64], model: &Model) -> Result<C64> {
    let mut cols = vec![Column { exponent: real(0.0), log_power: 0 }];
    cols.extend(model.corrections.iter().copied());
    check_collisions(&cols[1..])?;
    let rows = eps.len();
    let unknowns = cols.len();
    if rows < unknowns + 4 {
        return Err(FpiError::FitIllConditioned(format!("{rows} levels for {unknowns} unknowns")));
    }
    let mut a = DMatrix::<C64>::zeros(rows, unknowns);
    let mut b = DVector::<C64>::zeros(rows);
    for (i, (&e, &v)) in eps.iter().zip(values).enumerate() {
        let w = 1.0 / v.norm().max(1.0);
        let mut y = v;
        for (c, k) in &model.known {
            y -= *k * c.at(e);
        }
        b[i] = y * w;
        for (j, c) in cols.iter().enumerate() {
            a[(i, j)] = c.at(e) * w;
        }
    }
    let mut scale = vec![1.0; unknowns];
    for (j, s) in scale.iter_mut().enumerate() {
        let m = a.column(j).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if m > 0.0 {
            *s = m;
            a.column_mut(j).scale_mut(1.0 / m);
        }
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-15 * smax) {
        return Err(FpiError::FitIllConditioned(format!("singular value ratio {:.3e}", smin / smax)));
    }
    let x = svd.solve(&b, 0.0).map_err(|e| FpiError::FitIllConditioned(e.to_string()))?;
    Ok(x[0] / scale[0])
}

/// Finite part with the default options at a given grid.
pub fn extract_finite_part(problem: &OracleProblem, eps0: f64, levels: usize) -> Result<OracleResult> {
    extract_finite_part_with(problem, &OracleOptions { eps0, levels, ..OracleOptions::default() })
}

/// Finite part of `∫₀^d f(x) x^{-λ} (ln x)^δ dx`.
///
/// The error estimate is the largest change in `C` when one correction term is
/// added or when the grid starts one level lower (`ε₀/2`).
pub fn extract_finite_part_with(problem: &OracleProblem, opts: &OracleOptions) -> Result<OracleResult> {
    if !(problem.lambda.re > 0.0) {
        return Err(FpiError::domain("Re λ must be positive"));
    }
    if !(opts.eps0 > 0.0) || !(opts.eps0 < 0.5 * problem.upper_limit) {
        return Err(FpiError::domain(format!("eps0 = {} must lie in (0, d/2)", opts.eps0)));
    }
    let g = grid(problem, opts, opts.levels + 1)?;
    let model = build_model(problem, opts, opts.corrections)?;
    let n = opts.levels;
    let c0 = fit(&g.eps[..n], &g.values[..n], &model)?;
    let extra = build_model(problem, opts, opts.corrections + 1)?;
    let c1 = fit(&g.eps[..n], &g.values[..n], &extra)?;
    let c2 = fit(&g.eps[1..], &g.values[1..], &model)?;
    let error_estimate = (c1 - c0).norm().max((c2 - c0).norm()).max(f64::EPSILON * c0.norm());

    let dropped: Vec<DroppedTerm> = model
        .known
        .iter()
        .map(|(c, k)| DroppedTerm { exponent: c.exponent, log_power: c.log_power, coefficient: *k })
        .collect();
    Ok(OracleResult { finite_part: c0, error_estimate, dropped_terms: dropped })
}

/// Finite part of `∫₀^d h(y) (d-y)^{-σ} (ln(d-y))^δ dy`, singular at the upper end.
///
/// Substitutes `t = d - y` and hands `h` the exact `y` near `y = 0` as well.
pub fn extract_finite_part_upper<H>(
    h: H,
    sigma: C64,
    d: f64,
    log_factor: bool,
    taylor: Option<Vec<C64>>,
    opts: &OracleOptions,
) -> Result<OracleResult>
where
    H: Fn(f64) -> C64 + Sync,
{
    let mut problem = OracleProblem::with_gap(|_t, y| h(y), sigma, d).log_factor(log_factor);
    problem.taylor_coeffs = taylor;
    extract_finite_part_with(&problem, opts)
}

/// `(1/2πi) ∮ g(z) dz` over the circle `|z - center| = radius` by the
/// trapezoidal rule, which converges geometrically for analytic `g`.
pub fn contour_residue<G: Fn(C64) -> C64>(g: G, center: C64, radius: f64, points: usize) -> C64 {
    let mut acc = Neumaier::new();
    for k in 0..points {
        let th = 2.0 * PI * k as f64 / points as f64;
        let e = C64::from_polar(radius, th);
        // dz = i e dθ, so g dz / (2πi) = g e dθ / 2π
        acc.add(g(center + e) * e);
    }
    acc.value() / points as f64
}

/// `z^p` with `arg z ∈ (0, 2π)`, the branch cut along the positive real axis.
pub fn power_cut_positive(z: C64, p: C64) -> C64 {
    let mut th = z.arg();
    if th <= 0.0 {
        th += 2.0 * PI;
    }
    (p * C64::new(z.norm().ln(), th)).exp()
}
