//! Mean-zero stable laws `St(p, a, b)` with index `p` in `(1, 2]`:
//!
//! ```text
//! E exp(i t Z) = exp(-a |t|^p (1 - i b sgn(t) tan(p pi / 2)))
//! ```
//!
//! `p = 2` is `N(0, 2a)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{IbtError, Result};
use crate::parallel::{chunk_rng, chunks, Execution};
use crate::quad::{integrate, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub p: f64,
    pub a: f64,
    pub b: f64,
}

const SAMPLE_CHUNK: usize = 1 << 16;

impl StableParams {
    pub fn new(p: f64, a: f64, b: f64) -> Result<Self> {
        if !(p > 1.0 && p <= 2.0) {
            return Err(IbtError::invalid("p", format!("must lie in (1, 2], got {p}")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(IbtError::invalid("a", format!("must be positive and finite, got {a}")));
        }
        if !(-1.0..=1.0).contains(&b) {
            return Err(IbtError::invalid("b", format!("must lie in [-1, 1], got {b}")));
        }
        Ok(StableParams { p, a, b })
    }

    /// `N(0, variance)` as `St(2, variance / 2, 0)`.
    pub fn normal(variance: f64) -> Result<Self> {
        Self::new(2.0, 0.5 * variance, 0.0)
    }

    /// `b tan(p pi / 2)`; exactly zero at `p = 2`.
    fn skew(&self) -> f64 {
        if self.p == 2.0 {
            0.0
        } else {
            self.b * (self.p * FRAC_PI_2).tan()
        }
    }

    pub fn char_fn(&self, t: f64) -> Complex64 {
        let m = self.a * t.abs().powf(self.p);
        let phase = m * self.skew() * t.signum();
        Complex64::from_polar((-m).exp(), if t == 0.0 { 0.0 } else { phase })
    }

    /// One Chambers–Mallows–Stuck draw.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let p = self.p;
        let scale = self.a.powf(1.0 / p);
        let v = PI * (rng.random::<f64>() - 0.5);
        let w: f64 = Exp1.sample(rng);
        if p == 2.0 {
            // sin(2v)/sqrt(cos v) * sqrt(cos v / w) = 2 sin v sqrt(w)
            return scale * 2.0 * v.sin() * w.sqrt();
        }
        let zeta = self.skew();
        let b0 = zeta.atan() / p;
        let s = (1.0 + zeta * zeta).powf(0.5 / p);
        let x = s * (p * (v + b0)).sin() / v.cos().powf(1.0 / p)
            * ((v - p * (v + b0)).cos() / w).powf((1.0 - p) / p);
        scale * x
    }

    /// `n` reproducible draws; chunked so the result does not depend on the
    /// thread count.
    pub fn sample(&self, seed: u64, n: usize, exec: Execution) -> Vec<f64> {
        let parts = chunks(n, SAMPLE_CHUNK);
        exec.map(parts.len(), |c| {
            let mut rng = chunk_rng(seed, c as u64);
            (0..parts[c].1).map(|_| self.draw(&mut rng)).collect::<Vec<_>>()
        })
        .concat()
    }

    /// Gil-Pelaez inversion: `F(x) = 1/2 - (1/pi) int_0^inf Im(e^{-itx} cf(t)) / t dt`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(IbtError::invalid("x", "must be finite"));
        }
        if self.p == 2.0 {
            return Ok(crate::stats::normal_cdf(x / (2.0 * self.a).sqrt()));
        }
        let (p, a, z) = (self.p, self.a, self.skew());
        // exp(-a t^p) < 1e-14 beyond t_max
        let t_max = (32.3 / a).powf(1.0 / p);
        let integrand = |t: f64| {
            if t == 0.0 {
                return -x;
            }
            let m = a * t.powf(p);
            (-m).exp() * (m * z - t * x).sin() / t
        };
        let pieces = ((x.abs() * t_max / PI).ceil() as usize).clamp(1, 20_000);
        let h = t_max / pieces as f64;
        let opts = QuadOptions::new(1e-10 / pieces as f64, 1e-10);
        let mut total = 0.0;
        for i in 0..pieces {
            total += integrate(integrand, i as f64 * h, (i + 1) as f64 * h, opts)?;
        }
        Ok((0.5 - total / PI).clamp(0.0, 1.0))
    }
}

/// Kolmogorov–Smirnov distance of `samples` to `sp`.
pub fn ks_distance(samples: &[f64], sp: &StableParams, exec: Execution) -> Result<f64> {
    if samples.is_empty() {
        return Err(IbtError::invalid("samples", "must be nonempty"));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    let parts = chunks(n, 4096);
    let per_chunk = exec.map(parts.len(), |c| -> Result<f64> {
        let (start, len) = parts[c];
        let mut d: f64 = 0.0;
        for i in start..start + len {
            let f = sp.cdf(s[i])?;
            d = d.max(f - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - f);
        }
        Ok(d)
    });
    per_chunk.into_iter().try_fold(0.0f64, |acc, d| Ok(acc.max(d?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{empirical_cdf_at, empirical_cf, summarize};
    use approx::assert_relative_eq;

    #[test]
    fn char_fn_examples() {
        let sp = StableParams::new(2.0, 0.7, 0.9).unwrap();
        let z = sp.char_fn(1.3);
        assert_relative_eq!(z.re, (-0.7f64 * 1.69).exp(), max_relative = 1e-14);
        assert_eq!(z.im, 0.0);
        let z = StableParams::new(1.5, 2.0, 0.0).unwrap().char_fn(1.0);
        assert_relative_eq!(z.re, (-2.0f64).exp(), max_relative = 1e-14);
        assert!(z.im.abs() < 1e-16);
        // tan(3 pi / 4) = -1, so the exponent is -(1 + i)
        let z = StableParams::new(1.5, 1.0, 1.0).unwrap().char_fn(1.0);
        let want = Complex64::new(-1.0, -1.0).exp();
        assert!((z - want).norm() < 1e-14, "{z} vs {want}");
    }

    #[test]
    fn char_fn_conjugate_symmetry() {
        let sp = StableParams::new(1.3, 0.8, -0.6).unwrap();
        assert_eq!(sp.char_fn(0.0), Complex64::new(1.0, 0.0));
        for i in 1..50 {
            let t = 0.17 * i as f64;
            let (u, v) = (sp.char_fn(t), sp.char_fn(-t));
            assert!((u - v.conj()).norm() < 1e-15);
            assert!(u.norm() <= 1.0);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(StableParams::new(1.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(2.1, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 0.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 1.0, 1.5).is_err());
    }

    #[test]
    fn normal_case_variance() {
        let sp = StableParams::new(2.0, 0.5, 0.0).unwrap();
        let xs = sp.sample(1, 200_000, Execution::Auto);
        let (v, se) = crate::stats::variance_with_se(&xs);
        assert!((v - 1.0).abs() < 3.0 * se, "{v} ± {se}");
    }

    #[test]
    fn sampler_matches_char_fn() {
        let sp = StableParams::new(1.5, 1.0, 0.0).unwrap();
        let xs = sp.sample(5, 200_000, Execution::Auto);
        let ts = [0.5, 1.0, 2.0];
        for (t, z) in ts.iter().zip(empirical_cf(&xs, &ts)) {
            assert!((z - sp.char_fn(*t)).norm() < 0.01, "t = {t}");
        }
    }

    #[test]
    fn samples_have_mean_zero() {
        let sp = StableParams::new(1.8, 1.0, 0.8).unwrap();
        let xs = sp.sample(9, 400_000, Execution::Auto);
        let s = summarize(&xs);
        // heavy tails: the standard error is only indicative, use a loose band
        assert!(s.mean.abs() < 0.05, "{}", s.mean);
    }

    #[test]
    fn cdf_symmetric_and_normal_cases() {
        assert_relative_eq!(StableParams::new(2.0, 0.5, 0.0).unwrap().cdf(0.0).unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(StableParams::new(1.5, 1.0, 0.0).unwrap().cdf(0.0).unwrap(), 0.5, epsilon = 1e-10);
        let sp = StableParams::new(1.5, 1.0, 0.3).unwrap();
        let mut last = 0.0;
        for i in -40..=40 {
            let f = sp.cdf(0.5 * i as f64).unwrap();
            assert!(f >= last - 1e-9);
            last = f;
        }
        assert!(sp.cdf(-60.0).unwrap() < 0.01 && sp.cdf(60.0).unwrap() > 0.99);
    }

    #[test]
    fn cdf_matches_samples() {
        let sp = StableParams::new(1.5, 1.0, 0.5).unwrap();
        let xs = sp.sample(17, 1_000_000, Execution::Auto);
        for &x in &[-2.0, 0.0, 1.5] {
            let emp = empirical_cdf_at(&xs, x);
            assert!((emp - sp.cdf(x).unwrap()).abs() < 2e-3, "x = {x}");
        }
    }

    #[test]
    fn right_skewed_median_is_negative() {
        let sp = StableParams::new(1.5, 1.0, 1.0).unwrap();
        assert!(sp.cdf(0.0).unwrap() > 0.5);
        let xs = sp.sample(23, 100_001, Execution::Auto);
        let mut s = xs.clone();
        s.sort_by(f64::total_cmp);
        assert!(s[50_000] < 0.0);
    }

    #[test]
    fn ks_examples() {
        let sp = StableParams::new(1.5, 1.0, 0.0).unwrap();
        assert_relative_eq!(ks_distance(&[0.0], &sp, Execution::Sequential).unwrap(), 0.5, epsilon = 1e-9);
        let own = sp.sample(31, 20_000, Execution::Auto);
        assert!(ks_distance(&own, &sp, Execution::Auto).unwrap() < 1.63 / (20_000f64).sqrt());
        let normal = StableParams::normal(1.0).unwrap().sample(37, 20_000, Execution::Auto);
        assert!(ks_distance(&normal, &sp, Execution::Auto).unwrap() >= 0.05);
    }
}
