//! Small statistical helpers shared by the ensemble diagnostics.

use num_complex::Complex64;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Neumaier-compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut k = KahanSum::default();
    for x in xs {
        k.add(x);
    }
    k.value()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    /// standard error of the mean
    pub se: f64,
}

/// Mean and unbiased variance (two-pass).
pub fn summarize(xs: &[f64]) -> Summary {
    let n = xs.len();
    if n == 0 {
        return Summary {
            n,
            mean: f64::NAN,
            variance: f64::NAN,
            se: f64::NAN,
        };
    }
    let mean = compensated_sum(xs.iter().copied()) / n as f64;
    let variance = if n > 1 {
        compensated_sum(xs.iter().map(|x| (x - mean) * (x - mean))) / (n - 1) as f64
    } else {
        0.0
    };
    Summary {
        n,
        mean,
        variance,
        se: (variance / n as f64).sqrt(),
    }
}

/// Sample variance of `xs` together with its standard error under a normal
/// fourth moment estimate from the data.
pub fn variance_with_se(xs: &[f64]) -> (f64, f64) {
    let s = summarize(xs);
    let n = xs.len() as f64;
    let m4 = compensated_sum(xs.iter().map(|x| (x - s.mean).powi(4))) / n;
    let se = ((m4 - s.variance * s.variance) / n).max(0.0).sqrt();
    (s.variance, se)
}

/// Kolmogorov–Smirnov statistic of `samples` against `cdf`. Sorts a copy.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// Fraction of `samples` that are `<= x`.
pub fn empirical_cdf_at(samples: &[f64], x: f64) -> f64 {
    samples.iter().filter(|&&s| s <= x).count() as f64 / samples.len() as f64
}

pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// `(1/N) sum exp(i t s)` at each `t`.
pub fn empirical_cf(samples: &[f64], t_grid: &[f64]) -> Vec<Complex64> {
    let n = samples.len() as f64;
    t_grid
        .iter()
        .map(|&t| {
            let mut re = KahanSum::default();
            let mut im = KahanSum::default();
            for &s in samples {
                let (sn, cs) = (t * s).sin_cos();
                re.add(cs);
                im.add(sn);
            }
            Complex64::new(re.value() / n, im.value() / n)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
}

/// Least squares line through `(x, y)`, optionally weighted.
pub fn linear_fit(xs: &[f64], ys: &[f64], weights: Option<&[f64]>) -> LinearFit {
    let n = xs.len();
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let sw: f64 = (0..n).map(w).sum();
    let mx = (0..n).map(|i| w(i) * xs[i]).sum::<f64>() / sw;
    let my = (0..n).map(|i| w(i) * ys[i]).sum::<f64>() / sw;
    let sxx: f64 = (0..n).map(|i| w(i) * (xs[i] - mx).powi(2)).sum();
    let sxy: f64 = (0..n).map(|i| w(i) * (xs[i] - mx) * (ys[i] - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = (0..n)
        .map(|i| w(i) * (ys[i] - intercept - slope * xs[i]).powi(2))
        .sum();
    let slope_se = if n > 2 {
        (rss / (n - 2) as f64 / sxx).sqrt()
    } else {
        f64::NAN
    };
    LinearFit {
        slope,
        intercept,
        slope_se,
    }
}

/// Upper-tail probability of a chi-squared statistic.
pub fn chi2_pvalue(stat: f64, dof: f64) -> f64 {
    ChiSquared::new(dof).map_or(f64::NAN, |d| d.sf(stat))
}

/// Pearson statistic of `counts` against a uniform expectation.
pub fn chi2_uniform(counts: &[u64]) -> (f64, f64) {
    let total: u64 = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    (stat, chi2_pvalue(stat, (counts.len() - 1) as f64))
}
