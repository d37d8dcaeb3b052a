//! Ulam discretization of the induced factor `u(x) = f^{r(x)}(x)` on `[p, q]`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::baker::State;
use crate::error::{IbtError, Result};
use crate::factor::Pos;
use crate::induced::InducedSystem;
use crate::parallel::{chunk_rng, Execution};

/// Largest bin count handled by a dense eigen-solve.
pub const DENSE_LIMIT: usize = 512;
const MAX_REDRAW_RATIO: usize = 10;

#[derive(Debug, Clone)]
pub struct UlamOperator {
    pub bins: usize,
    /// Row-stochastic: `matrix[(i, j)]` is the fraction of bin `i` sent to bin `j`.
    pub matrix: DMatrix<f64>,
    pub edges: Vec<f64>,
    pub samples_per_bin: usize,
    pub seed: u64,
    /// Points redrawn after meeting the cut.
    pub near_cut: usize,
    /// Points redrawn after exceeding the return-time cap.
    pub censored: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
}

impl From<Complex64> for Eigenvalue {
    fn from(z: Complex64) -> Self {
        Eigenvalue {
            re: z.re,
            im: z.im,
            modulus: z.norm(),
        }
    }
}

/// Image of `x` under the induced factor, or `None` for points to redraw.
fn induced_image(sys: &InducedSystem, x: f64) -> Result<std::result::Result<f64, bool>> {
    let s = State {
        x: Pos::from_x(x),
        y: 0.5,
    };
    match sys.excursion(s, |_| {}) {
        Ok((t, _)) => Ok(Ok(t.x.x())),
        Err(IbtError::NearCut { .. }) => Ok(Err(false)),
        Err(IbtError::TailOverflow { .. }) => Ok(Err(true)),
        Err(e) => Err(e),
    }
}

pub fn build_ulam(
    sys: &InducedSystem,
    bins: usize,
    samples_per_bin: usize,
    seed: u64,
    exec: Execution,
) -> Result<UlamOperator> {
    if bins < 16 {
        return Err(IbtError::invalid("bins", format!("must be at least 16, got {bins}")));
    }
    if samples_per_bin == 0 {
        return Err(IbtError::invalid("samples_per_bin", "must be at least 1"));
    }
    let o = sys.orbit();
    let h = (o.q - o.p) / bins as f64;
    let edges: Vec<f64> = (0..=bins)
        .map(|i| if i == bins { o.q } else { o.p + h * i as f64 })
        .collect();
    let rows = exec.map(bins, |i| -> Result<(Vec<f64>, usize, usize)> {
        let mut rng = chunk_rng(seed, i as u64);
        let mut counts = vec![0u64; bins];
        let (mut near_cut, mut censored) = (0, 0);
        let mut done = 0;
        while done < samples_per_bin {
            let x = edges[i] + (edges[i + 1] - edges[i]) * rng.random::<f64>();
            match induced_image(sys, x)? {
                Ok(ux) => {
                    let j = (((ux - o.p) / h).floor().max(0.0) as usize).min(bins - 1);
                    counts[j] += 1;
                    done += 1;
                }
                Err(over) => {
                    if over {
                        censored += 1;
                    } else {
                        near_cut += 1;
                    }
                    if near_cut + censored > MAX_REDRAW_RATIO * samples_per_bin {
                        return Err(IbtError::numeric("ulam", format!("bin {i}: too many redraws")));
                    }
                }
            }
        }
        let total = samples_per_bin as f64;
        Ok((counts.iter().map(|&c| c as f64 / total).collect(), near_cut, censored))
    });
    let mut matrix = DMatrix::zeros(bins, bins);
    let (mut near_cut, mut censored) = (0, 0);
    for (i, r) in rows.into_iter().enumerate() {
        let (row, nc, ce) = r?;
        for (j, v) in row.into_iter().enumerate() {
            matrix[(i, j)] = v;
        }
        near_cut += nc;
        censored += ce;
    }
    Ok(UlamOperator {
        bins,
        matrix,
        edges,
        samples_per_bin,
        seed,
        near_cut,
        censored,
    })
}

impl UlamOperator {
    /// Largest `|row sum - 1|`.
    pub fn row_sum_error(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Leading left eigenvector (the discretized invariant density),
    /// normalized to sum 1, by power iteration on the transposed matrix.
    pub fn stationary(&self, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        let pt = self.matrix.transpose();
        let n = self.bins;
        let mut v = nalgebra::DVector::from_element(n, 1.0 / n as f64);
        for _ in 0..max_iter {
            let mut w = &pt * &v;
            let s = w.sum();
            w /= s;
            let diff = (&w - &v).amax();
            v = w;
            if diff < tol {
                return Ok(v.iter().copied().collect());
            }
        }
        Err(IbtError::numeric("stationary vector", format!("no convergence in {max_iter} iterations")))
    }

    /// Largest `|bins * v_i - 1|` for the stationary vector.
    pub fn uniformity_deviation(&self) -> Result<f64> {
        let v = self.stationary(1e-13, 100_000)?;
        let n = self.bins as f64;
        Ok(v.iter().map(|&x| (n * x - 1.0).abs()).fold(0.0, f64::max))
    }
}

/// The `k` eigenvalues of largest modulus, sorted by modulus descending.
///
/// Dense Schur decomposition up to [`DENSE_LIMIT`] bins; beyond that,
/// simultaneous power iteration on a `k`-dimensional subspace with
/// Rayleigh–Ritz extraction.
pub fn leading_spectrum(op: &UlamOperator, k: usize) -> Result<Vec<Complex64>> {
    leading_spectrum_with(op, k, 20_000, 1e-10)
}

pub fn leading_spectrum_with(op: &UlamOperator, k: usize, max_iter: usize, tol: f64) -> Result<Vec<Complex64>> {
    if k == 0 || k > op.bins {
        return Err(IbtError::invalid("k", format!("must lie in [1, {}], got {k}", op.bins)));
    }
    let mut ev: Vec<Complex64> = if op.bins <= DENSE_LIMIT {
        op.matrix.complex_eigenvalues().iter().copied().collect()
    } else {
        subspace_iteration(&op.matrix, k, max_iter, tol)?
    };
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.re.total_cmp(&a.re)));
    ev.truncate(k);
    Ok(ev)
}

fn subspace_iteration(m: &DMatrix<f64>, k: usize, max_iter: usize, tol: f64) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    // a couple of guard vectors speed up separation of the k-th value
    let dim = (k + 4).min(n);
    let a = m.transpose();
    let mut q = DMatrix::from_fn(n, dim, |i, j| {
        // deterministic, generic start
        ((i * 7919 + j * 104_729) % 1009) as f64 / 1009.0 - 0.5 + if j == 0 { 1.0 } else { 0.0 }
    });
    q = q.qr().q();
    let mut last: Vec<Complex64> = vec![];
    for it in 0..max_iter {
        q = (&a * &q).qr().q();
        if it % 10 != 9 {
            continue;
        }
        let h = q.transpose() * &a * &q;
        let mut ritz: Vec<Complex64> = h.complex_eigenvalues().iter().copied().collect();
        ritz.sort_by(|x, y| y.norm().total_cmp(&x.norm()).then(y.re.total_cmp(&x.re)));
        ritz.truncate(k);
        if last.len() == k && ritz.iter().zip(&last).all(|(x, y)| (x - y).norm() < tol) {
            return Ok(ritz);
        }
        last = ritz;
    }
    Err(IbtError::numeric("leading spectrum", format!("subspace iteration did not converge in {max_iter} steps")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baker::IbtMap;
    use crate::icf::make_beta_icf;

    fn sys(a0: f64, a1: f64) -> InducedSystem {
        InducedSystem::new(IbtMap::new(&make_beta_icf(a0, a1).unwrap()).unwrap(), 10_000, 1_000_000).unwrap()
    }

    fn op_from(m: DMatrix<f64>) -> UlamOperator {
        let bins = m.nrows();
        UlamOperator {
            bins,
            matrix: m,
            edges: (0..=bins).map(|i| i as f64 / bins as f64).collect(),
            samples_per_bin: 1,
            seed: 0,
            near_cut: 0,
            censored: 0,
        }
    }

    #[test]
    fn rows_are_stochastic() {
        let s = sys(1.5, 0.8);
        let op = build_ulam(&s, 16, 2000, 1, Execution::Auto).unwrap();
        assert_eq!(op.bins, 16);
        assert!(op.row_sum_error() < 1e-12);
        assert!(op.matrix.iter().all(|&v| v >= 0.0));
        assert!(build_ulam(&s, 8, 10, 1, Execution::Auto).is_err());
    }

    #[test]
    fn rank_one_spectrum() {
        let row: Vec<f64> = (1..=20).map(|i| i as f64 / 210.0).collect();
        let m = DMatrix::from_fn(20, 20, |_, j| row[j]);
        let ev = leading_spectrum(&op_from(m.clone()), 3).unwrap();
        assert!((ev[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(ev[1].norm() < 1e-12 && ev[2].norm() < 1e-12);
    }

    #[test]
    fn subspace_iteration_matches_dense() {
        // a cyclic-ish stochastic matrix with complex eigenvalues
        let n = 40;
        let m = DMatrix::from_fn(n, n, |i, j| {
            if j == (i + 1) % n {
                0.6
            } else if j == (i + 3) % n {
                0.3
            } else if j == i {
                0.1
            } else {
                0.0
            }
        });
        let dense = leading_spectrum(&op_from(m.clone()), 4).unwrap();
        let it = subspace_iteration(&m, 1, 20_000, 1e-12).unwrap();
        assert!((it[0] - dense[0]).norm() < 1e-9);
        assert!((dense[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn induced_factor_preserves_lebesgue() {
        let s = sys(2.0, 2.0);
        let op = build_ulam(&s, 64, 100_000, 3, Execution::Auto).unwrap();
        let ev = leading_spectrum(&op, 2).unwrap();
        assert!((ev[0] - Complex64::new(1.0, 0.0)).norm() < 1e-3);
        assert!(op.uniformity_deviation().unwrap() < 0.1);
        assert!(ev[1].norm() < 0.99);
    }
}
