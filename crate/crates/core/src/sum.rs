//! Compensated summation and the shared series driver.

use serde::{Deserialize, Serialize};

use crate::config::EvalConfig;
use crate::error::{FpiError, Result};
use crate::special::C64;

/// Neumaier-compensated running sum of complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    re: (f64, f64),
    im: (f64, f64),
}

#[inline]
fn add_part(acc: &mut (f64, f64), x: f64) {
    let (s, c) = *acc;
    let t = s + x;
    let c = if s.abs() >= x.abs() { c + ((s - t) + x) } else { c + ((x - t) + s) };
    *acc = (t, c);
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: C64) {
        add_part(&mut self.re, z.re);
        add_part(&mut self.im, z.im);
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

impl FromIterator<C64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = C64>>(iter: I) -> Self {
        let mut s = Neumaier::new();
        for z in iter {
            s.add(z);
        }
        s
    }
}

/// Compensated sum of a finite sequence.
pub fn csum<I: IntoIterator<Item = C64>>(iter: I) -> C64 {
    iter.into_iter().collect::<Neumaier>().value()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesStatus {
    Converged,
    Truncated,
}

/// Outcome of a series evaluation.
///
/// `tail_estimate` is an absolute bound estimate on the neglected tail. A
/// converged result satisfies `tail_estimate <= tol * max(1, |value|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: C64,
    pub terms_used: usize,
    pub tail_estimate: f64,
    pub status: SeriesStatus,
}

impl SeriesResult {
    pub fn exact(value: C64) -> Self {
        Self { value, terms_used: 0, tail_estimate: 0.0, status: SeriesStatus::Converged }
    }

    pub fn converged(&self) -> bool {
        self.status == SeriesStatus::Converged
    }

    /// Turns a truncated result into `NonConvergence`.
    pub fn require_converged(self) -> Result<Self> {
        match self.status {
            SeriesStatus::Converged => Ok(self),
            SeriesStatus::Truncated => {
                Err(FpiError::NonConvergence { terms: self.terms_used, last_term: self.tail_estimate })
            }
        }
    }

    /// Linear combination: `self * a + other * b`.
    pub fn combine(self, a: C64, other: SeriesResult, b: C64) -> Self {
        Self {
            value: self.value * a + other.value * b,
            terms_used: self.terms_used + other.terms_used,
            tail_estimate: self.tail_estimate * a.norm() + other.tail_estimate * b.norm(),
            status: if self.converged() && other.converged() {
                SeriesStatus::Converged
            } else {
                SeriesStatus::Truncated
            },
        }
    }

    pub fn scale(self, a: C64) -> Self {
        Self { value: self.value * a, tail_estimate: self.tail_estimate * a.norm(), ..self }
    }

    pub fn add_exact(self, c: C64) -> Self {
        Self { value: self.value + c, ..self }
    }
}

/// Number of consecutive small terms required before stopping.
pub const SMALL_RUN: usize = 3;

/// Sums `term(0) + term(1) + ...` until `SMALL_RUN` consecutive terms satisfy
/// `|term| <= tol * |sum|`, or `max_terms` is reached (status `Truncated`).
pub fn sum_series<F>(mut term: F, cfg: &EvalConfig) -> Result<SeriesResult>
where
    F: FnMut(usize) -> Result<C64>,
{
    let mut acc = Neumaier::new();
    let mut run = 0usize;
    let mut last = [0.0f64; 2];
    for k in 0..cfg.max_terms.max(1) {
        let t = term(k)?;
        if !t.re.is_finite() || !t.im.is_finite() {
            return Err(FpiError::NonConvergence { terms: k, last_term: f64::NAN });
        }
        acc.add(t);
        let s = acc.value();
        last = [last[1], t.norm()];
        if t.norm() <= cfg.tol * s.norm() {
            run += 1;
            if run >= SMALL_RUN {
                let tail = tail_bound(last, cfg.tol * s.norm().max(1.0));
                return Ok(SeriesResult {
                    value: s,
                    terms_used: k + 1,
                    tail_estimate: tail,
                    status: SeriesStatus::Converged,
                });
            }
        } else {
            run = 0;
        }
    }
    let s = acc.value();
    let tail = tail_bound(last, f64::INFINITY);
    log::debug!("series truncated at {} terms, last |term| {:.3e}", cfg.max_terms, last[1]);
    Ok(SeriesResult {
        value: s,
        terms_used: cfg.max_terms.max(1),
        tail_estimate: tail,
        status: SeriesStatus::Truncated,
    })
}

/// Geometric tail estimate from the last two term magnitudes, capped by `cap`.
fn tail_bound(last: [f64; 2], cap: f64) -> f64 {
    let [prev, cur] = last;
    let est = if prev > 0.0 && cur < prev {
        let r = cur / prev;
        cur * r / (1.0 - r)
    } else {
        cur
    };
    est.min(cap)
}

/// [`sum_series`] followed by [`SeriesResult::require_converged`].
pub fn sum_series_converged<F>(term: F, cfg: &EvalConfig) -> Result<SeriesResult>
where
    F: FnMut(usize) -> Result<C64>,
{
    sum_series(term, cfg)?.require_converged()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_bits() {
        let xs = [1.0, 1e100, 1.0, -1e100].map(|x| C64::new(x, -x));
        assert_eq!(csum(xs), C64::new(2.0, -2.0));
    }

    #[test]
    fn geometric_series() {
        let cfg = EvalConfig::default();
        let r = sum_series(|k| Ok(C64::new(0.5f64.powi(k as i32), 0.0)), &cfg).unwrap();
        assert!(r.converged());
        assert!((r.value.re - 2.0).abs() < 1e-15);
        assert!(r.tail_estimate <= cfg.tol * 2.0);
    }

    #[test]
    fn divergent_series_truncates() {
        let cfg = EvalConfig::default().with_max_terms(50);
        let r = sum_series(|k| Ok(C64::new(k as f64, 0.0)), &cfg).unwrap();
        assert_eq!(r.status, SeriesStatus::Truncated);
        assert!(r.require_converged().is_err());
    }

    #[test]
    fn isolated_small_term_does_not_stop() {
        // The second term vanishes; one small term must not end the sum.
        let cfg = EvalConfig::default();
        let r = sum_series(|k| Ok(C64::new(if k == 1 { 0.0 } else { 0.1f64.powi(k as i32) }, 0.0)), &cfg)
            .unwrap();
        assert!((r.value.re - (1.0 / 0.9 - 0.1)).abs() < 1e-15);
    }
}
