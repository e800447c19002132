//! Numerical verification of the transformation identities.
//!
//! Every identity has a tag, a sampler that draws parameters from a box
//! inside its validity domain, and a pair of evaluators for the two sides.
//! The left side is always an independent reference (canonical series,
//! `ₚF_q` partial sums or quadrature); the right side is the transformation
//! or finite-part formula under test.

use crate::config::EvalConfig;
use crate::error::{FpiError, Result};
use crate::fpi_closed::{beta_fpi_log, fpi_branch_infinite, fpi_pole_infinite, BetaFpiSpec, FpiBranchSpec, FpiPoleSpec};
use crate::hyp2f1::{
    connection_branch_branch, connection_origin_neg, connection_origin_pos, connection_pole_kernel, gauss_2f1_near_one,
    gauss_2f1_nu1_n, gauss_series, xxx12_sum, Gauss2F1Params,
};
use crate::hyp3f2::{
    kernel_integral_direct, kernel_integral_fpi, pfq_series, threef2_integral_direct, threef2_transform_general,
    threef2_transform_pole_neg, threef2_transform_pole_pos, ThreeF2Params,
};
use crate::oracle::{extract_finite_part, extract_finite_part_upper, OracleOptions, OracleProblem};
use crate::special::{as_integer, binomial_complex, principal_power, real, LogProduct, C64};
use crate::stieltjes::{classify_case, stieltjes_direct, stieltjes_fpi_series, CaseTag, StieltjesGaussSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Named real parameters of one sample. Integer parameters are stored as whole floats.
pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IdentityTag {
    MainResult3,
    MainResult4x,
    MainResult1,
    RepCase4bx,
    RepCase4bShift,
    ResultX,
    RepCase4d,
    RepCase4c,
    Keykey,
    Xxx12,
    Iden3F2,
    General3F2,
    Res2,
    Res2x,
    Bebebe,
    Bebebex,
    MainLemma,
    Sese,
    Representation1a,
    May,
    Case4b,
    Case4c,
    Keyx,
    Fullint,
    Keyxxx,
}

impl IdentityTag {
    pub const ALL: [IdentityTag; 25] = [
        IdentityTag::MainResult3,
        IdentityTag::MainResult4x,
        IdentityTag::MainResult1,
        IdentityTag::RepCase4bx,
        IdentityTag::RepCase4bShift,
        IdentityTag::ResultX,
        IdentityTag::RepCase4d,
        IdentityTag::RepCase4c,
        IdentityTag::Keykey,
        IdentityTag::Xxx12,
        IdentityTag::Iden3F2,
        IdentityTag::General3F2,
        IdentityTag::Res2,
        IdentityTag::Res2x,
        IdentityTag::Bebebe,
        IdentityTag::Bebebex,
        IdentityTag::MainLemma,
        IdentityTag::Sese,
        IdentityTag::Representation1a,
        IdentityTag::May,
        IdentityTag::Case4b,
        IdentityTag::Case4c,
        IdentityTag::Keyx,
        IdentityTag::Fullint,
        IdentityTag::Keyxxx,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityTag::MainResult3 => "MainResult3",
            IdentityTag::MainResult4x => "MainResult4x",
            IdentityTag::MainResult1 => "MainResult1",
            IdentityTag::RepCase4bx => "RepCase4bx",
            IdentityTag::RepCase4bShift => "RepCase4bShift",
            IdentityTag::ResultX => "ResultX",
            IdentityTag::RepCase4d => "RepCase4d",
            IdentityTag::RepCase4c => "RepCase4c",
            IdentityTag::Keykey => "Keykey",
            IdentityTag::Xxx12 => "Xxx12",
            IdentityTag::Iden3F2 => "Iden3F2",
            IdentityTag::General3F2 => "General3F2",
            IdentityTag::Res2 => "Res2",
            IdentityTag::Res2x => "Res2x",
            IdentityTag::Bebebe => "Bebebe",
            IdentityTag::Bebebex => "Bebebex",
            IdentityTag::MainLemma => "MainLemma",
            IdentityTag::Sese => "Sese",
            IdentityTag::Representation1a => "Representation1a",
            IdentityTag::May => "May",
            IdentityTag::Case4b => "Case4b",
            IdentityTag::Case4c => "Case4c",
            IdentityTag::Keyx => "Keyx",
            IdentityTag::Fullint => "Fullint",
            IdentityTag::Keyxxx => "Keyxxx",
        }
    }

    /// Parameter names expected in [`Params`], besides `z`.
    pub fn param_names(self) -> &'static [&'static str] {
        use IdentityTag::*;
        match self {
            MainResult3 | RepCase4bx | ResultX => &["mu", "nu", "rho"],
            MainResult4x => &["mu", "nu", "sigma"],
            MainResult1 | RepCase4bShift | Xxx12 => &["mu", "nu", "n"],
            RepCase4d => &["mu", "nu", "m"],
            RepCase4c => &["mu", "rho"],
            Keykey => &["nu", "n"],
            Iden3F2 | General3F2 | Res2 | Bebebe | Keyx | Fullint => &["beta", "nu", "n", "sigma"],
            Res2x | Bebebex | Keyxxx => &["beta", "nu", "n", "m"],
            MainLemma | Sese | May | Case4b | Case4c => &["a", "mu", "nu", "rho"],
            Representation1a => &["a", "mu", "nu", "n"],
        }
    }

    pub fn default_tol(self) -> f64 {
        use IdentityTag::*;
        match self {
            Iden3F2 | General3F2 | Res2 | Res2x | Bebebe | Bebebex | Keyx | Fullint | Keyxxx | MainLemma => 1e-8,
            Sese | Representation1a | May | Case4b | Case4c => 1e-7,
            _ => 1e-9,
        }
    }
}

impl fmt::Display for IdentityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityTag {
    type Err = FpiError;

    /// Case-insensitive; `-` and `_` are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| *c != '-' && *c != '_').collect::<String>().to_lowercase();
        IdentityTag::ALL
            .iter()
            .copied()
            .find(|t| t.name().to_lowercase() == key)
            .ok_or_else(|| FpiError::domain(format!("unknown identity tag '{s}'")))
    }
}

fn complex_object<S: Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Obj {
        re: f64,
        im: f64,
    }
    Obj { re: z.re, im: z.im }.serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub tag: IdentityTag,
    pub params: Params,
    #[serde(serialize_with = "complex_object")]
    pub lhs: C64,
    #[serde(serialize_with = "complex_object")]
    pub rhs: C64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub pass: bool,
}

fn residuals(lhs: C64, rhs: C64) -> (f64, f64) {
    let abs = (lhs - rhs).norm();
    (abs, abs / lhs.norm().max(rhs.norm()).max(1e-300))
}

struct Args<'a> {
    params: &'a Params,
    int_tol: f64,
}

impl Args<'_> {
    fn f(&self, key: &str) -> Result<f64> {
        match self.params.get(key) {
            Some(v) if v.is_finite() => Ok(*v),
            _ => Err(FpiError::domain(format!("missing or non-finite parameter '{key}'"))),
        }
    }

    fn c(&self, key: &str) -> Result<C64> {
        self.f(key).map(real)
    }

    fn u(&self, key: &str, min: u64) -> Result<u64> {
        let v = self.f(key)?;
        match as_integer(real(v), self.int_tol) {
            Some(k) if k >= min as i64 => Ok(k as u64),
            _ => Err(FpiError::domain(format!("parameter '{key}' = {v} must be an integer ≥ {min}"))),
        }
    }

    fn integer(&self, x: C64) -> Option<i64> {
        as_integer(x, self.int_tol)
    }
}

fn need(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(FpiError::domain(msg))
    }
}

fn side<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| FpiError::EvaluatorFailure { side: name, source: Box::new(e) })
}

fn g2(mu: C64, nu: C64, sigma: C64, z: C64, cfg: &EvalConfig) -> Result<C64> {
    Ok(gauss_series(&Gauss2F1Params::new(mu, nu, sigma, z)?, cfg)?.value)
}

fn real_unit(z: C64, hi: f64) -> Result<f64> {
    need(z.im == 0.0 && z.re > 0.0 && z.re < hi, "this identity needs real z inside (0, 1)")?;
    Ok(z.re)
}

fn pfq_lhs(p: &ThreeF2Params, cfg: &EvalConfig) -> Result<C64> {
    let upper = [p.beta(), p.nu(), real(1.0)];
    let lower = [p.beta() + p.sigma(), real(p.n() as f64)];
    Ok(pfq_series(&upper, &lower, p.z(), cfg)?.value)
}

/// `(β, ν, n, σ)` from either an explicit `sigma` or the case integer `m`.
fn threef2_params(tag: IdentityTag, a: &Args, z: C64) -> Result<ThreeF2Params> {
    let beta = a.c("beta")?;
    let nu = a.c("nu")?;
    let n = a.u("n", 1)?;
    let nf = n as f64;
    let sigma = match tag {
        IdentityTag::Res2x => a.u("m", 1)? as f64 - nf + nu,
        IdentityTag::Bebebex | IdentityTag::Keyxxx => nu - a.u("m", 0)? as f64 - nf,
        _ => a.c("sigma")?,
    };
    ThreeF2Params::with_int_tol(beta, nu, n, sigma, z, a.int_tol)
}

fn stieltjes_spec(tag: IdentityTag, a: &Args, z: C64) -> Result<StieltjesGaussSpec> {
    let av = a.f("a")?;
    need(av > 0.0, "a must be positive")?;
    let zr = real_unit(z, 0.9 + 1e-12)?;
    let rho = if tag == IdentityTag::Representation1a { real(a.u("n", 1)? as f64) } else { a.c("rho")? };
    StieltjesGaussSpec::with_int_tol(real(av), real(zr * av), a.c("mu")?, a.c("nu")?, rho, a.int_tol)
}

/// Both sides of `tag` at `(params, z)`, after checking the validity domain.
fn evaluate(tag: IdentityTag, a: &Args, z: C64, cfg: &EvalConfig) -> Result<(C64, C64)> {
    use IdentityTag::*;
    let w = 1.0 - z;
    match tag {
        MainResult3 => {
            let (mu, nu, rho) = (a.c("mu")?, a.c("nu")?, a.c("rho")?);
            need(a.integer(rho).is_none() && a.integer(rho - nu).is_none(), "ρ and ρ-ν must not be integers")?;
            need(mu.re != 0.0 && rho.re > 0.0 && (rho - nu + mu).re > 0.0, "need μ ≠ 0, Re ρ > 0, Re(ρ-ν+μ) > 0")?;
            need((z / (z - 1.0)).norm() <= 0.95, "need |z/(z-1)| ≤ 0.95")?;
            let lhs = side("lhs", g2(mu, nu, mu + rho, w, cfg))?;
            let rhs = side("rhs", connection_branch_branch(mu, nu, rho, z, cfg).map(|s| s.value))?;
            Ok((lhs, rhs))
        }
        MainResult4x | RepCase4bShift | RepCase4d | RepCase4c => {
            let mu = a.c("mu")?;
            let (nu, sigma) = match tag {
                MainResult4x => {
                    let (nu, sigma) = (a.c("nu")?, a.c("sigma")?);
                    need(a.integer(sigma - mu - nu).is_none(), "σ-μ-ν must not be an integer")?;
                    (nu, sigma)
                }
                RepCase4bShift => {
                    let nu = a.c("nu")?;
                    need(nu.re != 0.0, "ν must be nonzero")?;
                    (nu, mu + nu - a.u("n", 1)? as f64)
                }
                RepCase4d => {
                    let nu = a.c("nu")?;
                    (nu, mu + nu + a.u("m", 1)? as f64)
                }
                _ => {
                    let rho = a.c("rho")?;
                    (rho, mu + rho)
                }
            };
            need(w.norm() <= 0.9 && z.norm() <= 0.95, "need |1-z| ≤ 0.9 and |z| ≤ 0.95")?;
            let lhs = side("lhs", g2(mu, nu, sigma, z, cfg))?;
            let rhs = side(
                "rhs",
                Gauss2F1Params::new(mu, nu, sigma, z).and_then(|p| gauss_2f1_near_one(&p, cfg)).map(|s| s.value),
            )?;
            Ok((lhs, rhs))
        }
        MainResult1 => {
            let (mu, nu, n) = (a.c("mu")?, a.c("nu")?, a.u("n", 1)?);
            need(a.integer(nu).is_none() && nu.re > 0.0, "ν must be a non-integer with Re ν > 0")?;
            need(mu.re != 0.0 && (mu - nu + n as f64).re > 0.0, "need μ ≠ 0 and Re(n+μ-ν) > 0")?;
            let lhs = side("lhs", g2(mu, nu, mu + n as f64, w, cfg))?;
            let rhs = side("rhs", connection_pole_kernel(mu, nu, n, z, cfg).map(|s| s.value))?;
            Ok((lhs, rhs))
        }
        RepCase4bx | ResultX => {
            let (mu, nu, rho) = (a.c("mu")?, a.c("nu")?, a.c("rho")?);
            let shift = if tag == RepCase4bx { a.integer(nu - rho) } else { a.integer(rho - nu) };
            need(matches!(shift, Some(k) if k >= 1), "the shift between ν and ρ must be a positive integer")?;
            need(a.integer(rho).is_none() && rho.re > 0.0 && nu.re > 0.0, "need ρ non-integer, Re ρ > 0, Re ν > 0")?;
            need((rho - nu + mu).re > 0.0, "need Re(ρ-ν+μ) > 0")?;
            let lhs = side("lhs", g2(mu, nu, mu + rho, w, cfg))?;
            let rhs = if tag == RepCase4bx {
                side("rhs", connection_origin_pos(mu, nu, rho, z, cfg).map(|s| s.value))?
            } else {
                side("rhs", connection_origin_neg(mu, nu, rho, z, cfg).map(|s| s.value))?
            };
            Ok((lhs, rhs))
        }
        Keykey => {
            let (nu, n) = (a.c("nu")?, a.u("n", 1)?);
            need(
                (1..n).all(|k| a.integer(nu - k as f64) != Some(0)),
                "ν must avoid 1, ..., n-1",
            )?;
            let lhs = side("lhs", g2(nu, real(1.0), real(n as f64), z, cfg))?;
            let rhs = side("rhs", gauss_2f1_nu1_n(nu, n, z))?;
            Ok((lhs, rhs))
        }
        Xxx12 => {
            let (mu, nu, n) = (a.c("mu")?, a.c("nu")?, a.u("n", 1)?);
            let low = nu - n as f64 + 1.0;
            need(!matches!(a.integer(low), Some(k) if k <= 0), "ν-n+1 must not be a nonpositive integer")?;
            let lhs = side(
                "lhs",
                g2(mu, nu, low, z, cfg).and_then(|f| Ok(LogProduct::one().gamma(nu)?.rgamma(low).value() * f)),
            )?;
            let rhs = side("rhs", Ok(xxx12_sum(mu, nu, n, z)))?;
            Ok((lhs, rhs))
        }
        Iden3F2 | General3F2 | Res2 | Res2x | Bebebe | Bebebex => {
            let p = threef2_params(tag, a, z)?;
            let nf = p.n() as f64;
            let d = p.sigma() - p.nu();
            match tag {
                General3F2 => {
                    real_unit(z, 1.0)?;
                    need(p.beta().re > nf - 1.0, "need Re β > n-1")?;
                }
                Iden3F2 => {
                    need(a.integer(d).is_none() && a.integer(p.beta() + d).is_none(), "σ-ν and β+σ-ν must not be integers")?
                }
                Res2 | Res2x => need(matches!(a.integer(d + nf), Some(m) if m >= 1), "σ-ν+n must be a positive integer")?,
                _ => need(matches!(a.integer(-d - nf), Some(m) if m >= 0), "ν-σ-n must be a nonnegative integer")?,
            }
            let lhs = side("lhs", pfq_lhs(&p, cfg))?;
            let rhs = match tag {
                General3F2 => side("rhs", threef2_integral_direct(&p))?,
                Iden3F2 => side("rhs", threef2_transform_general(&p, cfg).map(|s| s.value))?,
                Res2 | Res2x => side("rhs", threef2_transform_pole_pos(&p, cfg).map(|s| s.value))?,
                _ => side("rhs", threef2_transform_pole_neg(&p, cfg).map(|s| s.value))?,
            };
            Ok((lhs, rhs))
        }
        Keyx | Fullint | Keyxxx => {
            real_unit(z, 1.0)?;
            let p = threef2_params(tag, a, z)?;
            let nf = p.n() as f64;
            let d = p.sigma() - p.nu();
            need(p.beta().re > nf - 1.0, "need Re β > n-1")?;
            if tag == Keyx {
                need(a.integer(d).is_none() && a.integer(p.beta() + d).is_none(), "σ-ν and β+σ-ν must not be integers")?;
            } else {
                need(a.integer(d).is_some() && a.integer(p.beta()).is_none(), "need σ-ν integer and β non-integer")?;
            }
            let lhs = side("lhs", kernel_integral_direct(&p))?;
            let rhs = side("rhs", kernel_integral_fpi(&p, cfg).map(|s| s.value))?;
            Ok((lhs, rhs))
        }
        MainLemma => {
            let spec = stieltjes_spec(tag, a, z)?;
            let (mu, nu, rho) = (spec.mu(), spec.nu(), spec.rho());
            need(nu.re > 0.0 && (rho + mu - nu).re > 0.0, "need Re ν > 0 and Re(ρ+μ-ν) > 0")?;
            let lhs = side(
                "lhs",
                Gauss2F1Params::new(mu, nu, mu + rho, w).and_then(|p| {
                    if w.norm() <= 0.5 {
                        gauss_series(&p, cfg)
                    } else {
                        gauss_2f1_near_one(&p, cfg)
                    }
                    .map(|s| s.value)
                }),
            )?;
            let rhs = side(
                "rhs",
                stieltjes_direct(&spec).and_then(|v| {
                    let pre = LogProduct::one()
                        .gamma(mu + rho)?
                        .rgamma(nu)
                        .rgamma(mu - nu + rho)
                        .power(spec.a(), mu)
                        .power(spec.b(), rho - nu)
                        .value();
                    Ok(pre * v)
                }),
            )?;
            Ok((lhs, rhs))
        }
        Sese | Representation1a | May | Case4b | Case4c => {
            let spec = stieltjes_spec(tag, a, z)?;
            let case = classify_case(&spec)?;
            let ok = match tag {
                Sese => case == CaseTag::BranchBranch,
                Representation1a => case == CaseTag::PoleKernel,
                May => matches!(case, CaseTag::PoleOriginPos | CaseTag::PoleOriginNeg),
                Case4b => case == CaseTag::PoleOriginPos,
                _ => case == CaseTag::PoleOriginNeg,
            };
            need(ok, &format!("parameters fall in case {case}, not the one {tag} covers"))?;
            let lhs = side("lhs", stieltjes_direct(&spec))?;
            let rhs = side("rhs", stieltjes_fpi_series(&spec, cfg).map(|s| s.value))?;
            Ok((lhs, rhs))
        }
    }
}

/// Evaluates both sides of `tag` and compares them.
///
/// Domain violations come back as plain domain errors; failures inside an
/// evaluator are wrapped in [`FpiError::EvaluatorFailure`] naming the side.
pub fn verify_identity(tag: IdentityTag, params: &Params, z: C64, tol: f64, cfg: &EvalConfig) -> Result<VerificationReport> {
    for key in tag.param_names() {
        if !params.contains_key(*key) {
            return Err(FpiError::domain(format!("{tag} needs parameter '{key}'")));
        }
    }
    let args = Args { params, int_tol: cfg.int_tol };
    let (lhs, rhs) = evaluate(tag, &args, z, cfg)?;
    let (abs_residual, rel_residual) = residuals(lhs, rhs);
    let mut recorded = params.clone();
    recorded.insert("z".into(), z.re);
    if z.im != 0.0 {
        recorded.insert("z_im".into(), z.im);
    }
    Ok(VerificationReport { tag, params: recorded, lhs, rhs, abs_residual, rel_residual, pass: rel_residual <= tol })
}

/// One parameter draw.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub params: Params,
    pub z: f64,
}

/// Seeded sampler over the validity boxes of every tag.
///
/// Draw `i` of a tag depends only on `(seed, tag, i)`, so sweeps can run in
/// any order and still reproduce bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParamSampler {
    pub seed: u64,
}

const MAX_REJECTIONS: usize = 10_000;
const INT_MARGIN: f64 = 0.05;
/// Wider margin for the `csc` reflections whose two terms cancel.
const CSC_MARGIN: f64 = 0.1;

fn away(x: f64, margin: f64) -> bool {
    (x - x.round()).abs() > margin
}

impl ParamSampler {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    fn rng(&self, stream: u64, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng.set_word_pos((index as u128) << 32);
        rng
    }

    /// Draw `index` for `tag`. Every returned sample satisfies the tag's constraints.
    pub fn sample(&self, tag: IdentityTag, index: u64) -> Sample {
        let mut rng = self.rng(tag as u64, index);
        for _ in 0..MAX_REJECTIONS {
            if let Some(s) = draw(tag, &mut rng) {
                return s;
            }
        }
        unreachable!("sampler box for {tag} rejects everything")
    }

    /// `count` points of a fundamental finite-part family with `|s| ∈ [0.5, 3]`, `|arg s| ≤ 2`.
    pub fn fpi_grid(&self, family: FpiFamily, count: usize) -> Vec<Params> {
        let mut rng = self.rng(1000 + family as u64, 0);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let mut p = Params::new();
            match family {
                FpiFamily::Branch | FpiFamily::Pole => {
                    let s = C64::from_polar(rng.gen_range(0.5..3.0), rng.gen_range(-2.0..2.0));
                    p.insert("s_re".into(), s.re);
                    p.insert("s_im".into(), s.im);
                    p.insert("upsilon".into(), rng.gen_range(0.3..2.5));
                    if family == FpiFamily::Branch {
                        let l: f64 = rng.gen_range(1.05..3.9);
                        if !away(l, INT_MARGIN) {
                            continue;
                        }
                        p.insert("lambda".into(), l);
                    } else {
                        p.insert("n".into(), rng.gen_range(0..4) as f64);
                    }
                }
                FpiFamily::BetaLog => {
                    let r: f64 = rng.gen_range(1.05..3.9);
                    if !away(r, INT_MARGIN) {
                        continue;
                    }
                    p.insert("sigma".into(), rng.gen_range(0.2..3.0));
                    p.insert("rho".into(), r);
                }
            }
            out.push(p);
        }
        out
    }
}

fn ins(p: &mut Params, k: &str, v: f64) {
    p.insert(k.into(), v);
}

fn draw(tag: IdentityTag, rng: &mut ChaCha8Rng) -> Option<Sample> {
    use IdentityTag::*;
    let mut u = |lo: f64, hi: f64| rng.gen_range(lo..hi);
    let mut p = Params::new();
    let z;
    match tag {
        MainResult3 => {
            let (mu, nu, rho) = (u(0.1, 2.5), u(0.1, 2.5), u(0.1, 2.5));
            z = u(0.30, 0.48);
            if !away(rho, CSC_MARGIN) || !away(rho - nu, CSC_MARGIN) || rho - nu + mu < 0.1 {
                return None;
            }
            ins(&mut p, "mu", mu);
            ins(&mut p, "nu", nu);
            ins(&mut p, "rho", rho);
        }
        MainResult4x => {
            let (mu, nu, sigma) = (u(0.1, 2.0), u(0.1, 2.0), u(0.2, 3.0));
            z = u(0.45, 0.7);
            if !away(sigma - mu - nu, CSC_MARGIN) {
                return None;
            }
            ins(&mut p, "mu", mu);
            ins(&mut p, "nu", nu);
            ins(&mut p, "sigma", sigma);
        }
        MainResult1 => {
            let n = (u(1.0, 4.0).floor()).min(3.0);
            let (mu, nu) = (u(0.1, 2.5), u(0.1, 2.9));
            z = u(0.45, 0.7);
            if !away(nu, CSC_MARGIN) || n + mu - nu < 0.1 {
                return None;
            }
            ins(&mut p, "mu", mu);
            ins(&mut p, "nu", nu);
            ins(&mut p, "n", n);
        }
        RepCase4bx => {
            let big_n = (u(1.0, 4.0).floor()).min(3.0);
            let rho = u(0.1, 0.9);
            let mu = big_n + u(0.1, 2.5);
            z = u(0.45, 0.7);
            ins(&mut p, "mu", mu);
            ins(&mut p, "nu", rho + big_n);
            ins(&mut p, "rho", rho);
        }
        RepCase4bShift => {
            let n = (u(1.0, 4.0).floor()).min(3.0);
            let (mu, nu) = (n + u(0.1, 2.0), n + u(0.1, 2.0));
            z = u(0.45, 0.7);
            if !away(mu, INT_MARGIN) || !away(nu, INT_MARGIN) {
                return None;
            }
            ins(&mut p, "mu", mu);
            ins(&mut p, "nu", nu);
            ins(&mut p, "n", n);
        }
        ResultX => {
            let big_m = (u(1.0, 4.0).floor()).min(3.0);
            let (mu, nu) = (u(0.1, 2.5), u(0.1, 2.5));
            z = u(0.45, 0.7);
            if !away(nu, INT_MARGIN) {
                return None;
            }
            ins(&mut p, "mu", mu);
            ins(&mut p, "nu", nu);
            ins(&mut p, "rho", nu + big_m);
        }
        RepCase4d => {
            let m = (u(1.0, 4.0).floor()).min(3.0);
            z = u(0.45, 0.7);
            ins(&mut p, "mu", u(0.1, 2.5));
            ins(&mut p, "nu", u(0.1, 2.5));
            ins(&mut p, "m", m);
        }
        RepCase4c => {
            z = u(0.45, 0.7);
            ins(&mut p, "mu", u(0.1, 2.5));
            ins(&mut p, "rho", u(0.1, 2.5));
        }
        Keykey => {
            let n = (u(1.0, 7.0).floor()).min(6.0);
            let nu = u(0.1, 3.1);
            z = u(0.45, 0.7);
            if !away(nu, INT_MARGIN) {
                return None;
            }
            ins(&mut p, "nu", nu);
            ins(&mut p, "n", n);
        }
        Xxx12 => {
            let n = (u(1.0, 4.0).floor()).min(3.0);
            let (mu, nu) = (u(0.1, 2.5), u(0.1, 2.9));
            z = u(0.45, 0.7);
            if !away(nu, INT_MARGIN) {
                return None;
            }
            ins(&mut p, "mu", mu);
            ins(&mut p, "nu", nu);
            ins(&mut p, "n", n);
        }
        Iden3F2 | General3F2 | Keyx => {
            let n = (u(1.0, 4.0).floor()).min(3.0);
            let beta = n - 1.0 + u(0.1, 2.5);
            let (nu, sigma) = (u(0.1, 2.9), u(0.2, 2.5));
            z = u(0.45, 0.7);
            let d = sigma - nu;
            if !away(nu, INT_MARGIN) || beta + d < 0.1 {
                return None;
            }
            if tag != General3F2 && (!away(d, CSC_MARGIN) || !away(beta + d, CSC_MARGIN)) {
                return None;
            }
            ins(&mut p, "beta", beta);
            ins(&mut p, "nu", nu);
            ins(&mut p, "n", n);
            ins(&mut p, "sigma", sigma);
        }
        Res2 | Res2x | Fullint => {
            let n = (u(1.0, 4.0).floor()).min(3.0);
            let m = (u(1.0, 4.0).floor()).min(3.0);
            let nu = u(0.1, 2.9);
            let lo = if tag == Fullint { n - 1.0 } else { (n - m).max(0.0) };
            let beta = lo + u(0.1, 2.5);
            z = u(0.45, 0.7);
            let sigma = m - n + nu;
            if !away(nu, INT_MARGIN) || sigma < 0.1 || beta + m - n < 0.1 {
                return None;
            }
            if tag == Fullint && !away(beta, INT_MARGIN) {
                return None;
            }
            ins(&mut p, "beta", beta);
            ins(&mut p, "nu", nu);
            ins(&mut p, "n", n);
            if tag == Res2x {
                ins(&mut p, "m", m);
            } else {
                ins(&mut p, "sigma", sigma);
            }
        }
        Bebebe | Bebebex | Keyxxx => {
            let top = if tag == Bebebe { 3.0 } else { 2.0 };
            let n = (u(1.0, top + 1.0).floor()).min(top);
            let m = (u(0.0, 3.0).floor()).min(2.0);
            let nu = m + n + u(0.1, 0.9);
            let beta = m + n + u(0.1, 2.0);
            z = u(0.45, 0.7);
            if tag == Keyxxx && !away(beta, INT_MARGIN) {
                return None;
            }
            ins(&mut p, "beta", beta);
            ins(&mut p, "nu", nu);
            ins(&mut p, "n", n);
            if tag == Bebebe {
                ins(&mut p, "sigma", nu - m - n);
            } else {
                ins(&mut p, "m", m);
            }
        }
        MainLemma => {
            let (mu, nu, rho) = (u(0.1, 2.0), u(0.1, 2.0), u(0.1, 2.0));
            z = u(0.45, 0.7);
            if rho + mu - nu < 0.2 {
                return None;
            }
            ins(&mut p, "a", u(0.5, 3.0));
            ins(&mut p, "mu", mu);
            ins(&mut p, "nu", nu);
            ins(&mut p, "rho", rho);
        }
        Sese | Representation1a | May | Case4b | Case4c => {
            let a = u(0.5, 3.0);
            let mu = u(0.1, 1.5);
            let frac = u(0.1, 0.9);
            let k = (u(0.0, 3.0).floor()).min(2.0);
            z = u(0.05, 0.85);
            let nu = u(0.1, 0.9);
            let pos = match tag {
                Case4b => true,
                Case4c => false,
                _ => u(0.0, 1.0) < 0.5,
            };
            let (mu, nu, rho) = match tag {
                Sese => {
                    let rho = nu + frac + 0.5 * k;
                    if !away(rho, INT_MARGIN) || !away(rho - nu, INT_MARGIN) {
                        return None;
                    }
                    (mu, nu, rho)
                }
                Representation1a => (mu, nu, k + 1.0),
                _ if pos => (mu + k + 1.0, frac + k + 1.0, frac),
                _ => (mu, nu, nu + k),
            };
            ins(&mut p, "a", a);
            ins(&mut p, "mu", mu);
            ins(&mut p, "nu", nu);
            if tag == Representation1a {
                ins(&mut p, "n", rho);
            } else {
                ins(&mut p, "rho", rho);
            }
        }
    }
    Some(Sample { params: p, z })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepFailure {
    pub index: u64,
    pub params: Params,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub tag: IdentityTag,
    pub seed: u64,
    pub count: usize,
    pub tol: f64,
    pub max_rel_residual: f64,
    pub median_rel_residual: f64,
    pub failures: Vec<SweepFailure>,
    pub reports: Vec<VerificationReport>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Verifies `count` seeded draws of `tag`. Samples run in parallel; the
/// results are folded in index order.
pub fn sweep(tag: IdentityTag, sampler: &ParamSampler, count: usize, tol: f64, cfg: &EvalConfig) -> Result<SweepReport> {
    if count == 0 {
        return Err(FpiError::domain("sweep needs count ≥ 1"));
    }
    let outcomes: Vec<(Sample, Result<VerificationReport>)> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let s = sampler.sample(tag, i);
            let r = verify_identity(tag, &s.params, real(s.z), tol, cfg);
            (s, r)
        })
        .collect();
    let mut failures = Vec::new();
    let mut reports = Vec::with_capacity(count);
    for (i, (s, r)) in outcomes.into_iter().enumerate() {
        match r {
            Ok(rep) => {
                if !rep.pass {
                    failures.push(SweepFailure {
                        index: i as u64,
                        params: rep.params.clone(),
                        reason: format!("relative residual {:.3e} exceeds {tol:.1e}", rep.rel_residual),
                    });
                }
                reports.push(rep);
            }
            Err(e) => {
                let mut params = s.params;
                params.insert("z".into(), s.z);
                failures.push(SweepFailure { index: i as u64, params, reason: e.to_string() });
            }
        }
    }
    let rels: Vec<f64> = reports.iter().map(|r| r.rel_residual).collect();
    let max_rel_residual = rels.iter().copied().fold(0.0, f64::max);
    Ok(SweepReport {
        tag,
        seed: sampler.seed,
        count,
        tol,
        max_rel_residual,
        median_rel_residual: median(rels),
        failures,
        reports,
    })
}

/// Families of fundamental finite parts with both a closed form and an oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FpiFamily {
    /// `∳₀^∞ (s+x)^{-υ} x^{-λ} dx`
    Branch,
    /// `∳₀^∞ (s+x)^{-υ} x^{-n-1} dx`
    Pole,
    /// `∳₀^1 y^{σ-1} (1-y)^{-ρ} ln y dy`
    BetaLog,
}

impl FpiFamily {
    pub fn default_tol(self) -> f64 {
        match self {
            FpiFamily::BetaLog => 1e-4,
            _ => 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    pub params: Params,
    #[serde(serialize_with = "complex_object")]
    pub closed: C64,
    #[serde(serialize_with = "complex_object")]
    pub oracle: C64,
    pub oracle_error_estimate: f64,
    pub rel_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSweepReport {
    pub family: FpiFamily,
    pub tol: f64,
    pub max_rel_residual: f64,
    pub failures: Vec<SweepFailure>,
    pub comparisons: Vec<OracleComparison>,
}

fn closed_and_oracle(family: FpiFamily, params: &Params) -> Result<(C64, C64, f64)> {
    let a = Args { params, int_tol: crate::special::INT_TOL };
    match family {
        FpiFamily::Branch | FpiFamily::Pole => {
            let s = C64::new(a.f("s_re")?, a.f("s_im")?);
            let u = a.c("upsilon")?;
            let (closed, lambda) = if family == FpiFamily::Branch {
                let l = a.c("lambda")?;
                (fpi_branch_infinite(&FpiBranchSpec::new(s, u, l)?), l)
            } else {
                let n = a.u("n", 0)?;
                (fpi_pole_infinite(&FpiPoleSpec::new(s, u, n)?), real(n as f64 + 1.0))
            };
            // binomial Taylor coefficients of (s+x)^{-υ} at 0
            let taylor = (0..6).map(|k| binomial_complex(-u, k) * principal_power(s, -u - k as f64).unwrap_or(C64::new(f64::NAN, 0.0))).collect();
            let problem = OracleProblem::new(move |x| principal_power(s + x, -u).unwrap_or(C64::new(f64::NAN, 0.0)), lambda, f64::INFINITY).taylor(taylor);
            let o = extract_finite_part(&problem, 0.1 * s.norm().min(1.0), 20)?;
            Ok((closed, o.finite_part, o.error_estimate))
        }
        FpiFamily::BetaLog => {
            let (sg, rh) = (a.c("sigma")?, a.c("rho")?);
            let closed = beta_fpi_log(&BetaFpiSpec::new(sg, rh)?);
            let h = move |y: f64| principal_power(real(y), sg - 1.0).unwrap_or(C64::new(f64::NAN, 0.0)) * y.ln();
            let o = extract_finite_part_upper(h, rh, 1.0, false, None, &OracleOptions::default())?;
            Ok((closed, o.finite_part, o.error_estimate))
        }
    }
}

/// Compares closed-form fundamental finite parts against the ε-extraction oracle.
pub fn verify_fpi_closed_vs_oracle(family: FpiFamily, grid: &[Params]) -> OracleSweepReport {
    let tol = family.default_tol();
    let outcomes: Vec<Result<(C64, C64, f64)>> = grid.par_iter().map(|p| closed_and_oracle(family, p)).collect();
    let mut failures = Vec::new();
    let mut comparisons = Vec::new();
    for (i, (p, r)) in grid.iter().zip(outcomes).enumerate() {
        match r {
            Ok((closed, oracle, est)) => {
                let rel = (closed - oracle).norm() / closed.norm().max(oracle.norm()).max(1e-300);
                // the log family is compared absolutely near its zeros
                let scaled = if family == FpiFamily::BetaLog { (closed - oracle).norm() / closed.norm().max(1.0) } else { rel };
                let pass = scaled <= tol;
                if !pass {
                    failures.push(SweepFailure {
                        index: i as u64,
                        params: p.clone(),
                        reason: format!("relative residual {rel:.3e} exceeds {tol:.1e}"),
                    });
                }
                comparisons.push(OracleComparison {
                    params: p.clone(),
                    closed,
                    oracle,
                    oracle_error_estimate: est,
                    rel_residual: scaled,
                    pass,
                });
            }
            Err(e) => failures.push(SweepFailure { index: i as u64, params: p.clone(), reason: e.to_string() }),
        }
    }
    let max_rel_residual = comparisons.iter().map(|c| c.rel_residual).fold(0.0, f64::max);
    OracleSweepReport { family, tol, max_rel_residual, failures, comparisons }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(kv: &[(&str, f64)]) -> Params {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    #[test]
    fn tag_names_round_trip() {
        for t in IdentityTag::ALL {
            assert_eq!(t.name().parse::<IdentityTag>().unwrap(), t);
            assert_eq!(t.name().to_lowercase().parse::<IdentityTag>().unwrap(), t);
        }
        assert!("nonsense".parse::<IdentityTag>().unwrap_err().is_domain());
        let mut names: Vec<_> = IdentityTag::ALL.iter().map(|t| t.name()).collect();
        names.dedup();
        assert_eq!(names.len(), 25);
    }

    #[test]
    fn keykey_trivial_case() {
        let r = verify_identity(IdentityTag::Keykey, &params(&[("n", 1.0), ("nu", 0.7)]), real(0.3), 1e-13, &cfg()).unwrap();
        assert!(r.rel_residual <= 1e-13, "{r:?}");
        assert!((r.lhs - real(0.7f64.powf(-0.7))).norm() < 1e-13);
    }

    #[test]
    fn listed_examples_pass() {
        let r = verify_identity(
            IdentityTag::MainResult4x,
            &params(&[("mu", 0.3), ("nu", 0.7), ("sigma", 1.9)]),
            real(0.6),
            1e-9,
            &cfg(),
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
        let r = verify_identity(
            IdentityTag::Res2x,
            &params(&[("n", 1.0), ("m", 1.0), ("beta", 1.7), ("nu", 0.4)]),
            real(0.6),
            1e-8,
            &cfg(),
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn domain_violations_are_reported() {
        let e = verify_identity(IdentityTag::MainResult4x, &params(&[("mu", 0.3), ("nu", 0.7), ("sigma", 2.0)]), real(0.6), 1e-9, &cfg())
            .unwrap_err();
        assert!(matches!(e, FpiError::Domain(_)), "{e:?}");
        let e = verify_identity(IdentityTag::Keykey, &params(&[("n", 2.0)]), real(0.6), 1e-9, &cfg()).unwrap_err();
        assert!(e.is_domain());
        let e = verify_identity(IdentityTag::General3F2, &params(&[("beta", 1.6), ("nu", 0.3), ("n", 2.0), ("sigma", 0.9)]), C64::new(0.5, 0.1), 1e-8, &cfg())
            .unwrap_err();
        assert!(e.is_domain());
    }

    #[test]
    fn evaluator_failures_name_the_side() {
        // z = 0.97 is inside the tag's nominal domain but past the canonical-series radius
        let e = verify_identity(IdentityTag::Keykey, &params(&[("n", 2.0), ("nu", 0.7)]), real(0.97), 1e-9, &cfg()).unwrap_err();
        assert!(matches!(e, FpiError::EvaluatorFailure { side: "lhs", .. }), "{e:?}");
    }

    #[test]
    fn samples_satisfy_constraints_and_are_deterministic() {
        let s = ParamSampler::new(9);
        for tag in IdentityTag::ALL {
            for i in 0..20 {
                let a = s.sample(tag, i);
                assert_eq!(a, s.sample(tag, i));
                for key in tag.param_names() {
                    assert!(a.params.contains_key(*key), "{tag} missing {key}");
                }
            }
        }
        assert_ne!(s.sample(IdentityTag::Keykey, 0), ParamSampler::new(10).sample(IdentityTag::Keykey, 0));
    }

    #[test]
    fn sweep_examples() {
        let r = sweep(IdentityTag::Keykey, &ParamSampler::new(42), 100, 1e-10, &cfg()).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        let r = sweep(IdentityTag::RepCase4c, &ParamSampler::new(7), 100, 1e-9, &cfg()).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        let r = sweep(IdentityTag::MainLemma, &ParamSampler::new(1), 50, 1e-8, &cfg()).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert!(sweep(IdentityTag::Keykey, &ParamSampler::new(1), 0, 1e-9, &cfg()).is_err());
    }

    #[test]
    fn sweeps_are_reproducible() {
        let a = sweep(IdentityTag::Iden3F2, &ParamSampler::new(5), 30, 1e-8, &cfg()).unwrap();
        let b = sweep(IdentityTag::Iden3F2, &ParamSampler::new(5), 30, 1e-8, &cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn every_tag_sweeps_clean() {
        for tag in IdentityTag::ALL {
            let r = sweep(tag, &ParamSampler::new(3), 25, tag.default_tol(), &cfg()).unwrap();
            assert!(r.passed(), "{tag}: {:?}", r.failures);
        }
    }

    #[test]
    fn oracle_grids() {
        let s = ParamSampler::new(11);
        for (family, count) in [(FpiFamily::Branch, 20), (FpiFamily::Pole, 20), (FpiFamily::BetaLog, 10)] {
            let r = verify_fpi_closed_vs_oracle(family, &s.fpi_grid(family, count));
            assert_eq!(r.comparisons.len(), count);
            assert!(r.failures.is_empty(), "{family:?}: {:?}", r.failures);
        }
    }
}
