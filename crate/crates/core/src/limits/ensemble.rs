//! Monte Carlo ensembles: Birkhoff sums, induced observables, correlations.
//!
//! Every ensemble is cut into fixed chunks with their own random streams
//! (see [`crate::parallel`]); within a chunk, orbits advance four at a time
//! so independent steps can overlap in the pipeline.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{constants_c, moments_m, Norming, Observable};
use crate::baker::{IbtMap, SquarePoint, State};
use crate::error::{IbtError, Result};
use crate::factor::{Branch, Pos};
use crate::induced::{InducedSystem, Side};
use crate::parallel::{chunk_rng, chunks, Execution};
use crate::stats::KahanSum;

const LANES: usize = 4;
const BIRKHOFF_CHUNK: usize = 256;
const XI_CHUNK: usize = 1 << 16;
const COR_CHUNK: usize = 4096;
/// Largest tolerated fraction of censored excursions.
pub const MAX_CENSORED_FRACTION: f64 = 1e-4;
/// Redraws allowed per requested orbit before giving up.
const MAX_REDRAW_RATIO: usize = 10;

/// A point where every step is safe, used to park a lane whose orbit hit the
/// cut.
const PARKED: State = State {
    x: Pos::lower(0.25),
    y: 0.5,
};

fn uniform_state(rng: &mut ChaCha8Rng) -> State {
    State::from_point(SquarePoint {
        x: rng.random(),
        y: rng.random(),
    })
}

/// Advance up to `LANES` orbits in lockstep. `visit(lane, k, state)` sees
/// `B^k` for `k = 0..steps`. Returns which lanes completed without meeting
/// the cut.
#[inline]
fn drive(map: &IbtMap, starts: &[State], steps: usize, mut visit: impl FnMut(usize, usize, State)) -> [bool; LANES] {
    let live = starts.len();
    let mut st = [PARKED; LANES];
    st[..live].copy_from_slice(starts);
    let mut ok = [false; LANES];
    ok[..live].fill(true);
    for k in 0..steps {
        for l in 0..LANES {
            if l < live {
                visit(l, k, st[l]);
            }
            match map.step_state(st[l]) {
                Ok(s) => st[l] = s,
                Err(_) => {
                    ok[l] = false;
                    st[l] = PARKED;
                }
            }
        }
    }
    ok
}

#[derive(Debug, Clone, Serialize)]
pub struct BirkhoffEnsemble {
    pub n: usize,
    pub n_traj: usize,
    pub seed: u64,
    pub norming: Norming,
    pub norm: f64,
    /// `S_n / A_n` per trajectory, in trajectory order.
    pub samples: Vec<f64>,
    /// Initial points redrawn because their orbit met the cut.
    pub redraws: usize,
}

/// Normalized Birkhoff sums from Lebesgue-uniform initial points.
pub fn birkhoff_ensemble(
    obs: &Observable,
    map: &IbtMap,
    n: usize,
    n_traj: usize,
    norming: Norming,
    seed: u64,
    exec: Execution,
) -> Result<BirkhoffEnsemble> {
    if n == 0 || n_traj == 0 {
        return Err(IbtError::invalid("n, n_traj", "must be at least 1"));
    }
    let norm = norming.factor(n);
    if !(norm.is_finite() && norm > 0.0) {
        return Err(IbtError::invalid("norming", format!("A_n = {norm} at n = {n}")));
    }
    let parts = chunks(n_traj, BIRKHOFF_CHUNK);
    let results = exec.map(parts.len(), |c| -> Result<(Vec<f64>, usize)> {
        let mut rng = chunk_rng(seed, c as u64);
        let len = parts[c].1;
        let starts: Vec<State> = (0..len).map(|_| uniform_state(&mut rng)).collect();
        let mut out = vec![0.0; len];
        let mut redo = Vec::new();
        for (g, group) in starts.chunks(LANES).enumerate() {
            let mut sums = [0.0; LANES];
            let ok = drive(map, group, n, |l, _, s| sums[l] += obs.eval(s.x.x(), s.y));
            for l in 0..group.len() {
                if ok[l] {
                    out[g * LANES + l] = sums[l] / norm;
                } else {
                    redo.push(g * LANES + l);
                }
            }
        }
        let mut redraws = 0;
        for i in redo {
            loop {
                redraws += 1;
                if redraws > MAX_REDRAW_RATIO * len {
                    return Err(IbtError::numeric("birkhoff ensemble", "too many orbits meet the cut"));
                }
                let mut sum = 0.0;
                let ok = drive(map, &[uniform_state(&mut rng)], n, |_, _, s| sum += obs.eval(s.x.x(), s.y));
                if ok[0] {
                    out[i] = sum / norm;
                    break;
                }
            }
        }
        Ok((out, redraws))
    });
    let mut samples = Vec::with_capacity(n_traj);
    let mut redraws = 0;
    for r in results {
        let (s, k) = r?;
        samples.extend(s);
        redraws += k;
    }
    Ok(BirkhoffEnsemble {
        n,
        n_traj,
        seed,
        norming,
        norm,
        samples,
        redraws,
    })
}

/// Sum of `X` along one excursion. On overflow the partial sum is returned
/// with `r_max` and `censored = true`.
fn excursion_sum(obs: &Observable, sys: &InducedSystem, s: State) -> Result<(f64, usize, bool)> {
    let mut sum = 0.0;
    match sys.excursion(s, |st| sum += obs.eval(st.x.x(), st.y)) {
        Ok((_, r)) => Ok((sum, r, false)),
        Err(IbtError::TailOverflow { cap }) => Ok((sum, cap, true)),
        Err(e) => Err(e),
    }
}

/// `xi(pt) = sum_{k < r(pt)} X(B^k pt)`.
pub fn xi(obs: &Observable, sys: &InducedSystem, pt: SquarePoint) -> Result<f64> {
    let o = sys.orbit();
    if !(pt.x >= o.p && pt.x <= o.q) {
        return Err(IbtError::Domain {
            value: pt.x,
            domain: "[p, q]",
        });
    }
    let mut sum = 0.0;
    sys.excursion(State::from_point(pt), |st| sum += obs.eval(st.x.x(), st.y))?;
    Ok(sum)
}

#[derive(Debug, Clone, Serialize)]
pub struct TailPoint {
    pub t: f64,
    /// `lambda([xi > t] ∩ side)`
    pub upper: f64,
    /// `lambda([xi < -t] ∩ side)`
    pub lower: f64,
    pub upper_count: u64,
    pub lower_count: u64,
    /// Predicted mass of the tail with the sign of the side's moment.
    pub predicted: f64,
    /// Observed over predicted for that tail.
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SideTail {
    pub side: Side,
    pub moment: f64,
    pub constant: f64,
    pub alpha: f64,
    /// `lambda(side)`
    pub mass: f64,
    pub min_xi: f64,
    pub max_xi: f64,
    pub points: Vec<TailPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct XiTailReport {
    pub n_samples: usize,
    pub seed: u64,
    pub censored: usize,
    pub sides: Vec<SideTail>,
}

#[derive(Clone)]
struct TailCounts {
    side_count: [u64; 2],
    upper: Vec<[u64; 2]>,
    lower: Vec<[u64; 2]>,
    min: [f64; 2],
    max: [f64; 2],
    censored: usize,
}

impl TailCounts {
    fn new(m: usize) -> Self {
        TailCounts {
            side_count: [0; 2],
            upper: vec![[0; 2]; m],
            lower: vec![[0; 2]; m],
            min: [f64::INFINITY; 2],
            max: [f64::NEG_INFINITY; 2],
            censored: 0,
        }
    }

    fn merge(&mut self, o: &TailCounts) {
        for s in 0..2 {
            self.side_count[s] += o.side_count[s];
            self.min[s] = self.min[s].min(o.min[s]);
            self.max[s] = self.max[s].max(o.max[s]);
            for i in 0..self.upper.len() {
                self.upper[i][s] += o.upper[i][s];
                self.lower[i][s] += o.lower[i][s];
            }
        }
        self.censored += o.censored;
    }
}

/// Empirical tails of `xi` on each half of the base from `n_samples`
/// uniform points of the base, against `C_j t^{-1-1/a_j}`.
pub fn xi_tail(
    obs: &Observable,
    sys: &InducedSystem,
    t_grid: &[f64],
    n_samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<XiTailReport> {
    let cf = sys.map().cut_function();
    let mo = moments_m(obs, cf)?;
    if mo.m0 == 0.0 && mo.m1 == 0.0 {
        return Err(IbtError::invalid("observable", "M0 and M1 both vanish"));
    }
    if n_samples == 0 {
        return Err(IbtError::invalid("n_samples", "must be at least 1"));
    }
    let l = sys.base_length();
    let (c0, c1) = constants_c(mo.m0, mo.m1, cf, l);
    let o = sys.orbit();
    let cut = sys.factor().cut();
    let mut ts = t_grid.to_vec();
    ts.sort_by(f64::total_cmp);
    let parts = chunks(n_samples, XI_CHUNK);
    let results = exec.map(parts.len(), |c| -> Result<TailCounts> {
        let mut rng = chunk_rng(seed, c as u64);
        let mut acc = TailCounts::new(ts.len());
        let mut done = 0;
        while done < parts[c].1 {
            let x = o.p + (o.q - o.p) * rng.random::<f64>();
            let y: f64 = rng.random();
            let s = State::from_point(SquarePoint { x, y });
            let (v, _, censored) = match excursion_sum(obs, sys, s) {
                Ok(r) => r,
                Err(IbtError::NearCut { .. }) => continue,
                Err(e) => return Err(e),
            };
            done += 1;
            acc.censored += censored as usize;
            // side 0 is (A, q], side 1 is [p, A)
            let side = if x > cut { 0 } else { 1 };
            acc.side_count[side] += 1;
            acc.min[side] = acc.min[side].min(v);
            acc.max[side] = acc.max[side].max(v);
            let up = ts.partition_point(|&t| t < v);
            for row in &mut acc.upper[..up] {
                row[side] += 1;
            }
            let dn = ts.partition_point(|&t| t < -v);
            for row in &mut acc.lower[..dn] {
                row[side] += 1;
            }
        }
        Ok(acc)
    });
    let mut total = TailCounts::new(ts.len());
    for r in results {
        total.merge(&r?);
    }
    if total.censored as f64 > MAX_CENSORED_FRACTION * n_samples as f64 {
        return Err(IbtError::numeric(
            "xi tails",
            format!("{} of {n_samples} excursions exceeded r_max", total.censored),
        ));
    }
    let nf = n_samples as f64;
    let sides = [(Side::P, mo.m0, c0, cf.alpha0()), (Side::Q, mo.m1, c1, cf.alpha1())]
        .into_iter()
        .enumerate()
        .map(|(s, (side, m, c, a))| {
            let points = ts
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let upper = total.upper[i][s] as f64 / nf;
                    let lower = total.lower[i][s] as f64 / nf;
                    let predicted = c * t.powf(-1.0 - 1.0 / a);
                    let main = if m > 0.0 { upper } else { lower };
                    TailPoint {
                        t,
                        upper,
                        lower,
                        upper_count: total.upper[i][s],
                        lower_count: total.lower[i][s],
                        predicted,
                        ratio: main / predicted,
                    }
                })
                .collect();
            SideTail {
                side,
                moment: m,
                constant: c,
                alpha: a,
                mass: total.side_count[s] as f64 / nf,
                min_xi: total.min[s],
                max_xi: total.max[s],
                points,
            }
        })
        .collect();
    Ok(XiTailReport {
        n_samples,
        seed,
        censored: total.censored,
        sides,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationCurve {
    pub k: Vec<usize>,
    /// `|int psi o B^k eta - int psi int eta|`
    pub cor: Vec<f64>,
    /// Signed estimate before taking the absolute value.
    pub cov: Vec<f64>,
    pub se: Vec<f64>,
    pub n_samples: usize,
    pub redraws: usize,
}

/// Monte Carlo estimate of `Cor(k; psi, eta, B)` at each `k` in `ks`.
///
/// Uses `E[(psi o B^k - m_psi) eta] = Cov` with the exact mean of `psi`.
/// Initial points are stratified in `x` over the support of `eta` when one
/// is known (otherwise over `[0, 1]`), with `y` uniform.
pub fn correlation(
    psi: &Observable,
    eta: &Observable,
    map: &IbtMap,
    ks: &[usize],
    n_samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<CorrelationCurve> {
    if ks.is_empty() || n_samples == 0 {
        return Err(IbtError::invalid("k, n_samples", "need at least one lag and one sample"));
    }
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let k_max = *ks.last().unwrap();
    let m_psi = psi.integral()?;
    let (lo, hi, weight_shift) = match eta.x_support() {
        Some((a, b)) => (a, b, 0.0),
        None => (0.0, 1.0, eta.integral()?),
    };
    let width = hi - lo;
    let mut slot = vec![usize::MAX; k_max + 1];
    for (i, &k) in ks.iter().enumerate() {
        slot[k] = i;
    }
    let nk = ks.len();
    let x_only = psi.x_only() && eta.x_only();
    let parts = chunks(n_samples, COR_CHUNK);
    let results = exec.map(parts.len(), |c| -> Result<(Vec<KahanSum>, Vec<KahanSum>, usize)> {
        let mut rng = chunk_rng(seed, c as u64);
        let (start, len) = parts[c];
        let mut sum = vec![KahanSum::default(); nk];
        let mut sq = vec![KahanSum::default(); nk];
        let mut redraws = 0;
        let draw = |rng: &mut ChaCha8Rng, i: usize| {
            let x = lo + width * ((i as f64 + rng.random::<f64>()) / n_samples as f64);
            let y = if x_only { 0.5 } else { rng.random() };
            State::from_point(SquarePoint { x, y })
        };
        let mut pending: Vec<usize> = (start..start + len).collect();
        while !pending.is_empty() {
            let mut failed = Vec::new();
            for group in pending.chunks(LANES) {
                let starts: Vec<State> = group.iter().map(|&i| draw(&mut rng, i)).collect();
                let w: Vec<f64> = starts
                    .iter()
                    .map(|s| eta.eval(s.x.x(), s.y) - weight_shift)
                    .collect();
                let mut vals: [Vec<f64>; LANES] = std::array::from_fn(|_| vec![0.0; nk]);
                let ok = if x_only {
                    drive_x(map, &starts, k_max + 1, |l, k, x| {
                        let j = slot[k];
                        if j != usize::MAX {
                            vals[l][j] = (psi.eval(x.x(), 0.5) - m_psi) * w[l];
                        }
                    })
                } else {
                    drive(map, &starts, k_max + 1, |l, k, s| {
                        let j = slot[k];
                        if j != usize::MAX {
                            vals[l][j] = (psi.eval(s.x.x(), s.y) - m_psi) * w[l];
                        }
                    })
                };
                for (l, &i) in group.iter().enumerate() {
                    if ok[l] {
                        for j in 0..nk {
                            sum[j].add(vals[l][j]);
                            sq[j].add(vals[l][j] * vals[l][j]);
                        }
                    } else {
                        failed.push(i);
                    }
                }
            }
            redraws += failed.len();
            if redraws > MAX_REDRAW_RATIO * len {
                return Err(IbtError::numeric("correlation", "too many orbits meet the cut"));
            }
            pending = failed;
        }
        Ok((sum, sq, redraws))
    });
    let mut sum = vec![KahanSum::default(); nk];
    let mut sq = vec![KahanSum::default(); nk];
    let mut redraws = 0;
    for r in results {
        let (s, q, k) = r?;
        for j in 0..nk {
            sum[j].add(s[j].value());
            sq[j].add(q[j].value());
        }
        redraws += k;
    }
    let nf = n_samples as f64;
    let mut cov = Vec::with_capacity(nk);
    let mut se = Vec::with_capacity(nk);
    for j in 0..nk {
        let mean = sum[j].value() / nf;
        let var = (sq[j].value() / nf - mean * mean).max(0.0);
        cov.push(width * mean);
        se.push(width * (var / nf).sqrt());
    }
    Ok(CorrelationCurve {
        k: ks,
        cor: cov.iter().map(|c| c.abs()).collect(),
        cov,
        se,
        n_samples,
        redraws,
    })
}

/// Lockstep driver for the factor alone.
#[inline]
fn drive_x(map: &IbtMap, starts: &[State], steps: usize, mut visit: impl FnMut(usize, usize, Pos)) -> [bool; LANES] {
    let fm = map.factor();
    let live = starts.len();
    let mut st = [PARKED.x; LANES];
    for (l, s) in starts.iter().enumerate() {
        st[l] = s.x;
    }
    let mut ok = [false; LANES];
    ok[..live].fill(true);
    for k in 0..steps {
        for l in 0..LANES {
            if l < live {
                visit(l, k, st[l]);
            }
            match fm.step_pos(st[l]) {
                Ok(s) => st[l] = s.image,
                Err(_) => {
                    ok[l] = false;
                    st[l] = PARKED.x;
                }
            }
        }
    }
    ok
}

#[derive(Debug, Clone, Serialize)]
pub struct GreenKubo {
    /// `C(0) + 2 sum_{k=1}^{K} C(k)`
    pub sigma2: f64,
    pub se: f64,
    /// Last lag included.
    pub truncated_at: usize,
    pub lags: Vec<usize>,
    pub cov: Vec<f64>,
    pub cov_se: Vec<f64>,
    pub n_samples: usize,
}

/// Green–Kubo variance `sum_{k in Z} int X X o B^k` for a mean-zero `X`,
/// truncated at the first lag whose standard error exceeds its magnitude.
///
/// For `X = s (y - 1/2)` the `y`-integral is done exactly: the fiber map
/// is affine with slope `J_k(x)`, so `int X X o B^k dy = s^2 J_k(x) / 12`,
/// and only `x` is sampled.
pub fn green_kubo(
    obs: &Observable,
    map: &IbtMap,
    k_max: usize,
    n_samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<GreenKubo> {
    if !obs.is_mean_zero()? {
        return Err(IbtError::invalid("observable", "must have mean zero"));
    }
    if n_samples < 2 {
        return Err(IbtError::invalid("n_samples", "must be at least 2"));
    }
    let (cov, cov_se) = match obs.kind {
        super::ObservableKind::LinearY { slope, .. } => fiber_slope_moments(map, slope, k_max, n_samples, seed, exec)?,
        _ => {
            let ks: Vec<usize> = (0..=k_max).collect();
            let c = correlation(obs, obs, map, &ks, n_samples, seed, exec)?;
            (c.cov, c.se)
        }
    };
    let mut truncated_at = 0;
    let mut sigma2 = cov[0];
    let mut var = cov_se[0] * cov_se[0];
    for k in 1..=k_max {
        if !(cov_se[k] <= cov[k].abs()) {
            break;
        }
        sigma2 += 2.0 * cov[k];
        var += 4.0 * cov_se[k] * cov_se[k];
        truncated_at = k;
    }
    Ok(GreenKubo {
        sigma2,
        se: var.sqrt(),
        truncated_at,
        lags: (0..=k_max).collect(),
        cov,
        cov_se,
        n_samples,
    })
}

fn fiber_slope_moments(
    map: &IbtMap,
    slope: f64,
    k_max: usize,
    n_samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let fm = map.factor();
    let parts = chunks(n_samples, COR_CHUNK);
    let results = exec.map(parts.len(), |c| -> Result<(Vec<f64>, Vec<f64>)> {
        let mut rng = chunk_rng(seed, c as u64);
        let (start, len) = parts[c];
        let mut sum = vec![0.0; k_max + 1];
        let mut sq = vec![0.0; k_max + 1];
        let mut trail = Vec::with_capacity(64);
        let mut i = start;
        while i < start + len {
            let x = (i as f64 + rng.random::<f64>()) / n_samples as f64;
            let mut z = Pos::from_x(x);
            let mut jac = 1.0;
            trail.clear();
            trail.push(1.0);
            let mut hit = false;
            for _ in 0..k_max {
                match fm.step_pos(z) {
                    Ok(st) => {
                        jac *= match st.branch {
                            Branch::Left => st.phi,
                            Branch::Right => st.one_minus_phi,
                        };
                        z = st.image;
                    }
                    Err(_) => {
                        hit = true;
                        break;
                    }
                }
                if jac < 1e-18 {
                    break;
                }
                trail.push(jac);
            }
            if hit {
                // redraw inside the same stratum
                continue;
            }
            for (k, &j) in trail.iter().enumerate() {
                sum[k] += j;
                sq[k] += j * j;
            }
            i += 1;
        }
        Ok((sum, sq))
    });
    let mut sum = vec![KahanSum::default(); k_max + 1];
    let mut sq = vec![KahanSum::default(); k_max + 1];
    for r in results {
        let (s, q) = r?;
        for k in 0..=k_max {
            sum[k].add(s[k]);
            sq[k].add(q[k]);
        }
    }
    let nf = n_samples as f64;
    let f = slope * slope / 12.0;
    let mut cov = Vec::with_capacity(k_max + 1);
    let mut se = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mean = sum[k].value() / nf;
        let var = (sq[k].value() / nf - mean * mean).max(0.0);
        cov.push(f * mean);
        se.push(f * (var / nf).sqrt());
    }
    Ok((cov, se))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::icf::make_beta_icf;
    use crate::quad::{integrate, QuadOptions};

    fn map(a0: f64, a1: f64) -> IbtMap {
        IbtMap::new(&make_beta_icf(a0, a1).unwrap()).unwrap()
    }

    #[test]
    fn birkhoff_constant_and_deterministic() {
        let m = map(2.0, 2.0);
        let obs = Observable::constant(2.0);
        let e = birkhoff_ensemble(&obs, &m, 10, 37, Norming::Identity, 3, Execution::Auto).unwrap();
        assert_eq!(e.samples.len(), 37);
        assert!(e.samples.iter().all(|&s| (s - 20.0).abs() < 1e-12));
        let obs = Observable::linear_x(-1.0);
        let a = birkhoff_ensemble(&obs, &m, 200, 600, Norming::Sqrt, 9, Execution::Auto).unwrap();
        let b = birkhoff_ensemble(&obs, &m, 200, 600, Norming::Sqrt, 9, Execution::Sequential).unwrap();
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn birkhoff_matches_direct_orbit() {
        // first trajectory of chunk 0, recomputed with the public stepper
        let m = map(1.5, 0.8);
        let obs = Observable::linear_y(1.0);
        let e = birkhoff_ensemble(&obs, &m, 50, 1, Norming::Identity, 11, Execution::Sequential).unwrap();
        let mut rng = chunk_rng(11, 0);
        let pt = SquarePoint {
            x: rng.random(),
            y: rng.random(),
        };
        let orbit = m.iterate(pt, 49).unwrap();
        let direct: f64 = orbit.iter().map(|p| p.y - 0.5).sum();
        assert!((e.samples[0] - direct).abs() < 1e-9, "{} vs {direct}", e.samples[0]);
    }

    #[test]
    fn xi_matches_direct_sum() {
        let sys = InducedSystem::new(map(2.0, 2.0), 2000, 100_000).unwrap();
        let obs = Observable::linear_x(-1.0);
        let o = sys.orbit();
        for i in 1..40 {
            let x = o.p + (o.q - o.p) * i as f64 / 40.0 + 1e-7;
            let pt = SquarePoint { x, y: 0.3 };
            let r = sys.return_time_direct(x).unwrap();
            let direct: f64 = sys.map().iterate(pt, r - 1).unwrap().iter().map(|p| 0.5 - p.x).sum();
            assert!((xi(&obs, &sys, pt).unwrap() - direct).abs() < 1e-9);
        }
        assert!(xi(&obs, &sys, SquarePoint { x: 0.01, y: 0.5 }).is_err());
    }

    #[test]
    fn xi_tail_bookkeeping() {
        let sys = InducedSystem::new(map(2.0, 2.0), 10_000, 1_000_000).unwrap();
        let obs = Observable::linear_x(-1.0);
        let rep = xi_tail(&obs, &sys, &[1.0, 4.0], 20_000, 5, Execution::Auto).unwrap();
        assert_eq!(rep.censored, 0);
        let mass: f64 = rep.sides.iter().map(|s| s.mass).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        // symmetric map and antisymmetric observable: mirrored tails
        let (p, q) = (&rep.sides[0], &rep.sides[1]);
        assert!(p.moment > 0.0 && q.moment < 0.0);
        assert!((p.constant - q.constant).abs() < 1e-12);
        for (a, b) in p.points.iter().zip(&q.points) {
            assert!(a.upper_count >= b.upper_count && b.lower_count >= a.lower_count);
        }
    }

    #[test]
    fn correlation_lag_zero_is_exact_covariance() {
        let m = map(2.0, 2.0);
        let psi = Observable::linear_x(1.0);
        let c = correlation(&psi, &psi, &m, &[0, 1], 40_000, 1, Execution::Auto).unwrap();
        assert!((c.cov[0] - 1.0 / 12.0).abs() < 1e-6, "{}", c.cov[0]);
        let eta = Observable::smooth_indicator(0.2, 0.4, 0.05);
        let want = integrate(
            |x| (x - 0.5) * eta.eval(x, 0.5),
            0.0,
            1.0,
            QuadOptions::new(1e-13, 1e-12),
        )
        .unwrap();
        let c = correlation(&psi, &eta, &m, &[0], 40_000, 1, Execution::Auto).unwrap();
        assert!((c.cov[0] - want).abs() < 1e-5 + 3.0 * c.se[0], "{} vs {want}", c.cov[0]);
    }

    #[test]
    fn green_kubo_fast_path_agrees_with_generic() {
        // at the linear cut the fiber slopes are exact, so the two routes
        // estimate the same covariances
        let m = map(2.0, 2.0);
        let fast = green_kubo(&Observable::linear_y(1.0), &m, 8, 200_000, 4, Execution::Auto).unwrap();
        let obs = Observable::custom(|_, y| y - 0.5, 1.0).unwrap();
        let ks: Vec<usize> = (0..=8).collect();
        let slow = correlation(&obs, &obs, &m, &ks, 200_000, 4, Execution::Auto).unwrap();
        assert!((fast.cov[0] - 1.0 / 12.0).abs() < 1e-12);
        for k in 0..=8 {
            let tol = 4.0 * (fast.cov_se[k].powi(2) + slow.se[k].powi(2)).sqrt() + 1e-6;
            assert!((fast.cov[k] - slow.cov[k]).abs() < tol, "k = {k}: {} vs {}", fast.cov[k], slow.cov[k]);
        }
        assert!(fast.sigma2 > 1.0 / 12.0);
    }

    #[test]
    fn green_kubo_rejects_nonzero_mean() {
        assert!(green_kubo(&Observable::constant(1.0), &map(2.0, 2.0), 4, 100, 0, Execution::Auto).is_err());
    }
}
