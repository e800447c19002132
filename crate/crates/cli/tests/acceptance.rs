//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use fpi_core::fpi_closed::{beta_fpi, beta_fpi_log, fpi_branch_infinite, fpi_pole_infinite, BetaFpiSpec, FpiBranchSpec, FpiPoleSpec};
use fpi_core::oracle::{contour_residue, power_cut_positive};
use fpi_core::quad::{integrate, Interval, Node, QuadOptions};
use fpi_core::special::{c, principal_power, real};
use fpi_core::stieltjes::{residue_pole_kernel, CaseTag, StieltjesGaussSpec};
use fpi_core::verify::{sweep, verify_fpi_closed_vs_oracle, FpiFamily, IdentityTag, ParamSampler};
use fpi_core::{EvalConfig, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::Command;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn away(x: f64, margin: f64) -> bool {
    (x - x.round()).abs() > margin
}

fn within(elapsed: Duration, budget_s: u64) -> bool {
    elapsed <= Duration::from_secs(budget_s)
}

fn fundamental_oracle() -> Outcome {
    let sampler = ParamSampler::new(42);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for family in [FpiFamily::Branch, FpiFamily::Pole] {
        let r = verify_fpi_closed_vs_oracle(family, &sampler.fpi_grid(family, 50));
        worst = worst.max(r.max_rel_residual);
        failures += r.failures.len() + r.comparisons.iter().filter(|c| c.rel_residual > 1e-5).count();
    }
    Outcome { pass: failures == 0 && worst <= 1e-5, detail: format!("100 draws, max rel residual {worst:.2e}, {failures} failures") }
}

fn quad_01(f: impl Fn(Node) -> C64) -> C64 {
    integrate(f, Interval::Finite(0.0, 1.0), &[], &QuadOptions::default()).expect("quadrature").value
}

fn convergent_match() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 200 {
        let (closed, quad) = match done % 3 {
            0 => {
                let s = C64::from_polar(rng.gen_range(0.5..3.0), rng.gen_range(-2.0..2.0));
                let l: f64 = rng.gen_range(0.1..0.9);
                let u = c(rng.gen_range(1.1 - l..2.5), rng.gen_range(-0.3..0.3));
                let lam = c(l, rng.gen_range(-0.3..0.3));
                let closed = fpi_branch_infinite(&FpiBranchSpec::new(s, u, lam).unwrap());
                let q = integrate(
                    |n: Node| principal_power(s + n.x, -u).unwrap() * principal_power(real(n.x), -lam).unwrap(),
                    Interval::SemiInfinite(0.0),
                    &[],
                    &QuadOptions::default(),
                )
                .expect("quadrature")
                .value;
                (closed, q)
            }
            k => {
                let r: f64 = rng.gen_range(0.05..0.9);
                if !away(r, 0.05) {
                    continue;
                }
                let sg = c(rng.gen_range(0.2..3.0), rng.gen_range(-0.3..0.3));
                let rh = c(r, rng.gen_range(-0.3..0.3));
                let spec = BetaFpiSpec::new(sg, rh).unwrap();
                let log = k == 2;
                let q = quad_01(|n: Node| {
                    let v = principal_power(real(n.x), sg - 1.0).unwrap() * principal_power(real(n.to_upper), -rh).unwrap();
                    if log {
                        v * n.x.ln()
                    } else {
                        v
                    }
                });
                (if log { beta_fpi_log(&spec) } else { beta_fpi(&spec) }, q)
            }
        };
        worst = worst.max(rel(closed, quad));
        done += 1;
    }
    Outcome { pass: worst <= 1e-9, detail: format!("200 draws (branch, beta, beta-log), max rel residual {worst:.2e}") }
}

fn sweeps(tags: &[(IdentityTag, CaseTagLabel)], count: usize, tol: f64) -> Outcome {
    let sampler = ParamSampler::new(42);
    let cfg = EvalConfig::default();
    let mut parts = Vec::new();
    let mut pass = true;
    for (tag, label) in tags {
        let r = sweep(*tag, &sampler, count, tol, &cfg).expect("sweep");
        pass &= r.passed() && r.max_rel_residual <= tol;
        let name = label.map(|c| format!("{c} via {tag}")).unwrap_or_else(|| tag.to_string());
        parts.push(format!("{name} {:.1e}/{}f", r.max_rel_residual, r.failures.len()));
    }
    Outcome { pass, detail: format!("{count} draws each: {}", parts.join(", ")) }
}

type CaseTagLabel = Option<CaseTag>;

fn exact_zeros() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let sg = c(rng.gen_range(0.1..3.0), rng.gen_range(-1.0..1.0));
        let k = rng.gen_range(1..6) as f64;
        let v = beta_fpi(&BetaFpiSpec::new(sg, sg + k).unwrap());
        worst = worst.max(v.norm());
    }
    let p = fpi_pole_infinite(&FpiPoleSpec::new(real(1.0), real(1.0), 0).unwrap()).norm();
    Outcome { pass: worst <= 1e-12 && p <= 1e-14, detail: format!("max |beta| {worst:.1e} over 20 pairs, |pole(1,1,0)| {p:.1e}") }
}

fn residue_sign() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 20 {
        let n = 1 + (done % 2) as u64;
        let a: f64 = rng.gen_range(1.0..3.0);
        let b = a * rng.gen_range(0.2..0.8);
        let mu: f64 = rng.gen_range(0.3..2.5);
        let nu: f64 = rng.gen_range(0.2..3.0);
        if !away(nu, 0.05) || n as f64 + mu - nu <= 0.05 {
            continue;
        }
        let spec = StieltjesGaussSpec::new(real(a), real(b), real(mu), real(nu), real(n as f64)).unwrap();
        let got = residue_pole_kernel(&spec).unwrap();
        let g = |z: C64| power_cut_positive(z, real(nu - 1.0)) * principal_power(a + z, real(-mu)).unwrap() * (b + z).powi(-(n as i32));
        let want = contour_residue(g, real(-b), 0.4 * b.min(a - b), 256);
        worst = worst.max(rel(got, want));
        done += 1;
    }
    Outcome {
        pass: worst <= 1e-8,
        detail: format!("20 draws n=1,2, max rel residual {worst:.1e}; convention (-1)^n e^(i pi nu)/Gamma(n) * sum, arg z in (0, 2pi)"),
    }
}

fn determinism() -> Outcome {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_fpi")).args(["verify", "--all", "--seed", "42"]).output().expect("run fpi");
        (out.status.code(), out.stdout)
    };
    let (c1, a) = run();
    let (c2, b) = run();
    Outcome {
        pass: c1 == Some(0) && c2 == Some(0) && !a.is_empty() && a == b,
        detail: format!("{} bytes, exit codes {c1:?}/{c2:?}, identical: {}", a.len(), a == b),
    }
}

fn main() {
    let criteria: Vec<(&str, u64, Box<dyn Fn() -> Outcome>)> = vec![
        ("fundamental FPI vs oracle", 60, Box::new(fundamental_oracle)),
        ("convergent closed forms vs quadrature", 30, Box::new(convergent_match)),
        (
            "Stieltjes series vs direct per case",
            120,
            Box::new(|| {
                sweeps(
                    &[
                        (IdentityTag::Sese, Some(CaseTag::BranchBranch)),
                        (IdentityTag::Representation1a, Some(CaseTag::PoleKernel)),
                        (IdentityTag::Case4b, Some(CaseTag::PoleOriginPos)),
                        (IdentityTag::Case4c, Some(CaseTag::PoleOriginNeg)),
                    ],
                    50,
                    1e-7,
                )
            }),
        ),
        (
            "2F1 identity sweeps",
            60,
            Box::new(|| {
                let tags = [
                    IdentityTag::MainResult4x,
                    IdentityTag::RepCase4bShift,
                    IdentityTag::RepCase4d,
                    IdentityTag::RepCase4c,
                    IdentityTag::MainResult1,
                    IdentityTag::Keykey,
                    IdentityTag::Xxx12,
                ];
                sweeps(&tags.map(|t| (t, None)), 100, 1e-9)
            }),
        ),
        (
            "3F2 sweeps",
            120,
            Box::new(|| sweeps(&[IdentityTag::General3F2, IdentityTag::Res2x, IdentityTag::Bebebex].map(|t| (t, None)), 100, 1e-8)),
        ),
        ("exact zeros", 10, Box::new(exact_zeros)),
        ("residue sign", 10, Box::new(residue_sign)),
        ("verify --all determinism", 120, Box::new(determinism)),
    ];
    let mut all = true;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = check();
        let elapsed = t.elapsed();
        let pass = o.pass && within(elapsed, *budget);
        all &= pass;
        println!(
            "{} criterion {}: {name}: {} [{:.2} s, budget {budget} s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            elapsed.as_secs_f64()
        );
    }
    if !all {
        std::process::exit(1);
    }
}
