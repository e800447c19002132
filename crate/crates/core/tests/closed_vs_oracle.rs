use fpi_core::fpi_closed::{beta_fpi, beta_fpi_log, fpi_branch_infinite, fpi_pole_infinite, BetaFpiSpec, FpiBranchSpec, FpiPoleSpec};
use fpi_core::oracle::{extract_finite_part, extract_finite_part_upper, OracleOptions, OracleProblem};
use fpi_core::special::{binomial_complex, c, principal_power, real};
use fpi_core::C64;
use proptest::prelude::*;

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn away_from_integer(x: f64) -> bool {
    (x - x.round()).abs() > 0.05
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn branch_family(r in 0.5f64..3.0, th in -2.0f64..2.0, ur in 0.3f64..2.5, ui in -0.5f64..0.5,
                     lr in 1.05f64..3.9, li in -0.5f64..0.5) {
        prop_assume!(away_from_integer(lr));
        let s = C64::from_polar(r, th);
        let (u, l) = (c(ur, ui), c(lr, li));
        let closed = fpi_branch_infinite(&FpiBranchSpec::new(s, u, l).unwrap());
        let p = OracleProblem::new(move |x| principal_power(s + x, -u).unwrap(), l, f64::INFINITY);
        let o = extract_finite_part(&p, 0.1 * r.min(1.0), 20).unwrap();
        prop_assert!(rel(o.finite_part, closed) <= 1e-5, "{} vs {} (est {})", o.finite_part, closed, o.error_estimate);
    }

    #[test]
    fn pole_family(r in 0.5f64..3.0, th in -2.0f64..2.0, ur in 0.3f64..2.5, ui in -0.5f64..0.5, n in 0u64..4) {
        let s = C64::from_polar(r, th);
        let u = c(ur, ui);
        let closed = fpi_pole_infinite(&FpiPoleSpec::new(s, u, n).unwrap());
        let p = OracleProblem::new(move |x| principal_power(s + x, -u).unwrap(), real(n as f64 + 1.0), f64::INFINITY);
        let o = extract_finite_part(&p, 0.1 * r.min(1.0), 20).unwrap();
        prop_assert!(rel(o.finite_part, closed) <= 1e-5, "{} vs {} (est {})", o.finite_part, closed, o.error_estimate);
    }

    #[test]
    fn pole_family_with_exact_taylor(r in 0.5f64..3.0, th in -2.0f64..2.0, ur in 0.3f64..2.5, ui in -0.5f64..0.5, n in 0u64..4) {
        let s = C64::from_polar(r, th);
        let u = c(ur, ui);
        let closed = fpi_pole_infinite(&FpiPoleSpec::new(s, u, n).unwrap());
        let a: Vec<C64> = (0..=n).map(|k| binomial_complex(-u, k) * principal_power(s, -u - k as f64).unwrap()).collect();
        let p = OracleProblem::new(move |x| principal_power(s + x, -u).unwrap(), real(n as f64 + 1.0), f64::INFINITY).taylor(a);
        let o = extract_finite_part(&p, 0.1 * r.min(1.0), 20).unwrap();
        prop_assert!(rel(o.finite_part, closed) <= 1e-6, "{} vs {}", o.finite_part, closed);
    }

    #[test]
    fn beta_families(sr in 0.2f64..3.0, si in -0.5f64..0.5, rr in 1.05f64..3.9, ri in -0.5f64..0.5) {
        prop_assume!(away_from_integer(rr));
        let (sg, rh) = (c(sr, si), c(rr, ri));
        let spec = BetaFpiSpec::new(sg, rh).unwrap();
        let h = move |y: f64| principal_power(real(y), sg - 1.0).unwrap();
        let o = extract_finite_part_upper(h, rh, 1.0, false, None, &OracleOptions::default()).unwrap();
        let b = beta_fpi(&spec);
        prop_assert!((o.finite_part - b).norm() <= 1e-5 * b.norm().max(1.0), "{} vs {}", o.finite_part, b);
        let hl = move |y: f64| principal_power(real(y), sg - 1.0).unwrap() * y.ln();
        let o = extract_finite_part_upper(hl, rh, 1.0, false, None, &OracleOptions::default()).unwrap();
        let bl = beta_fpi_log(&spec);
        prop_assert!((o.finite_part - bl).norm() <= 1e-4 * bl.norm().max(1.0), "{} vs {}", o.finite_part, bl);
    }
}
