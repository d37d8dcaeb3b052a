//! First returns to the base `Lambda = [p, q] x [0, 1]`.
//!
//! `{p, q}` is the period-2 orbit of `f`. Its preimages
//!
//! ```text
//! p_n = w0^n(p) -> 0,       q_n = w1^n(q) -> 1,
//! p°_{n+1} = w1(p_n),       q°_{n+1} = w0(q_n),
//! ```
//!
//! cut `[p, q]` into the level sets of the return time:
//! `[r = n + 2] = (q°_{n+1}, q°_{n+2}] ∪ [p°_{n+2}, p°_{n+1})`.
//! The interior boundaries accumulate at `A`, so they are stored as gaps
//! `p°_n - A` and `A - q°_n`, and the exterior ones as `p_n` and `1 - q_n`.

use serde::Serialize;

use crate::baker::{IbtMap, SquarePoint, State};
use crate::error::{IbtError, Result};
use crate::factor::{FactorMap, Pos, CUT_RADIUS};

pub const DEFAULT_R_MAX: usize = 1_000_000;
pub const DEFAULT_CELLS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodTwoOrbit {
    pub p: f64,
    pub q: f64,
}

impl PeriodTwoOrbit {
    /// `Leb(Lambda) = q - p`
    pub fn base_length(&self) -> f64 {
        self.q - self.p
    }
}

/// The period-2 orbit: bisection of `w0(w1(p)) = p` on `(0, A)`, then a
/// Newton polish.
pub fn find_period_two(fm: &FactorMap) -> Result<PeriodTwoOrbit> {
    let a = fm.cut();
    let g = |p: f64| fm.w0_pos(fm.w1_pos(Pos::from_x(p))).x() - p;
    let (mut lo, mut hi) = (0.0, a);
    if !(g(lo) > 0.0 && g(hi) < 0.0) {
        return Err(IbtError::numeric("period-2 orbit", "no sign change on (0, A)"));
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let cf = fm.cut_function();
    let mut p = 0.5 * (lo + hi);
    for _ in 0..3 {
        let w1p = fm.w1(p);
        let slope = cf.phi(w1p) * cf.one_minus_phi(p) - 1.0;
        let next = p - g(p) / slope;
        if !(next > lo - 1e-13 && next < hi + 1e-13) {
            break;
        }
        p = next;
    }
    let q = fm.w1(p);
    let residual = (fm.f(p) - q).abs().max((fm.f(q) - p).abs());
    if !(residual <= 1e-10 && 0.0 < p && p < a && a < q && q < 1.0) {
        return Err(IbtError::numeric(
            "period-2 orbit",
            format!("p = {p}, q = {q}, residual {residual:e}"),
        ));
    }
    Ok(PeriodTwoOrbit { p, q })
}

/// Tabulated orbit preimages.
#[derive(Debug, Clone)]
pub struct ReturnCells {
    /// `p_n`, `n = 0..=N`
    p_seq: Vec<f64>,
    /// `1 - q_n`
    s_seq: Vec<f64>,
    /// `p°_n - A`, `n = 1..=N+1`; slot 0 is `+inf`
    p_gap: Vec<f64>,
    /// `A - q°_n`
    q_gap: Vec<f64>,
    requested: usize,
}

impl ReturnCells {
    pub fn build(fm: &FactorMap, orbit: &PeriodTwoOrbit, n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(IbtError::invalid("n_max", format!("must be >= 2, got {n_max}")));
        }
        let mut p = Pos::from_x(orbit.p);
        let mut q = Pos::from_x(orbit.q);
        let mut p_seq = vec![orbit.p];
        let mut s_seq = vec![q.dist1()];
        let mut p_gap = vec![f64::INFINITY, fm.w1_gap(p)];
        let mut q_gap = vec![f64::INFINITY, fm.w0_gap(q)];
        for _ in 1..=n_max {
            let pn = fm.w0_pos(p);
            let qn = fm.w1_pos(q);
            let gp = fm.w1_gap(pn);
            let gq = fm.w0_gap(qn);
            let ok = pn.dist0() > 0.0
                && pn.dist0() < *p_seq.last().unwrap()
                && qn.dist1() > 0.0
                && qn.dist1() < *s_seq.last().unwrap()
                && gp > 0.0
                && gp < *p_gap.last().unwrap()
                && gq > 0.0
                && gq < *q_gap.last().unwrap();
            if !ok {
                break;
            }
            p = pn;
            q = qn;
            p_seq.push(pn.dist0());
            s_seq.push(qn.dist1());
            p_gap.push(gp);
            q_gap.push(gq);
        }
        Ok(ReturnCells {
            p_seq,
            s_seq,
            p_gap,
            q_gap,
            requested: n_max,
        })
    }

    /// Largest `n` with `p_n`, `q_n` tabulated.
    pub fn n_max(&self) -> usize {
        self.p_seq.len() - 1
    }

    pub fn requested(&self) -> usize {
        self.requested
    }

    pub fn truncated(&self) -> bool {
        self.n_max() < self.requested
    }

    pub fn p(&self, n: usize) -> f64 {
        self.p_seq[n]
    }

    pub fn q(&self, n: usize) -> f64 {
        1.0 - self.s_seq[n]
    }

    pub fn one_minus_q(&self, n: usize) -> f64 {
        self.s_seq[n]
    }

    /// `p°_n - A` for `1 <= n <= n_max + 1`.
    pub fn p_int_gap(&self, n: usize) -> f64 {
        self.p_gap[n]
    }

    /// `A - q°_n` for `1 <= n <= n_max + 1`.
    pub fn q_int_gap(&self, n: usize) -> f64 {
        self.q_gap[n]
    }

    /// Cell containing the point at signed distance `d = x - A` from the cut,
    /// if tabulated.
    fn lookup(&self, d: f64) -> Option<usize> {
        let (gaps, dist) = if d >= 0.0 { (&self.p_gap, d) } else { (&self.q_gap, -d) };
        // smallest j >= 2 with gap_j <= dist
        let j = 2 + gaps[2..].partition_point(|&g| g > dist);
        (j < gaps.len()).then_some(j)
    }
}

/// The first-return system on `Lambda`.
#[derive(Debug, Clone)]
pub struct InducedSystem {
    map: IbtMap,
    orbit: PeriodTwoOrbit,
    cells: ReturnCells,
    r_max: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KacReport {
    pub tabulated: f64,
    pub tail: f64,
    pub total: f64,
    pub target: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticEntry {
    pub quantity: &'static str,
    pub measured: f64,
    pub predicted: f64,
    pub ratio: f64,
    /// `(n, ratio)` at powers of ten up to the report's `n`.
    pub trace: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticReport {
    pub n: usize,
    pub entries: Vec<AsymptoticEntry>,
}

impl AsymptoticReport {
    pub fn get(&self, quantity: &str) -> Option<&AsymptoticEntry> {
        self.entries.iter().find(|e| e.quantity == quantity)
    }
}

/// Which half of the base a cell lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `(A, q]`: excursions near `x = 0`
    P,
    /// `[p, A)`: excursions near `x = 1`
    Q,
}

/// Ratios of an excursion's coordinates to their leading-order profiles.
///
/// On the p-side `x_k ~ K0 (n-k+2)^{-1/a0}` and `y_k ~ (1-(k+1)/n)^{1+1/a0}`;
/// on the q-side the same holds for `1 - x_k` and `1 - y_k` with `a1, c1`.
#[derive(Debug, Clone, Serialize)]
pub struct PointTrace {
    pub n: usize,
    pub side: Side,
    pub return_time: usize,
    pub k: Vec<usize>,
    pub x_ratio: Vec<f64>,
    pub y_ratio: Vec<f64>,
}

impl InducedSystem {
    pub fn new(map: IbtMap, n_cells: usize, r_max: usize) -> Result<Self> {
        if r_max < 2 {
            return Err(IbtError::invalid("r_max", format!("must be >= 2, got {r_max}")));
        }
        let orbit = find_period_two(map.factor())?;
        let cells = ReturnCells::build(map.factor(), &orbit, n_cells)?;
        Ok(InducedSystem {
            map,
            orbit,
            cells,
            r_max,
        })
    }

    pub fn with_defaults(map: IbtMap) -> Result<Self> {
        Self::new(map, DEFAULT_CELLS, DEFAULT_R_MAX)
    }

    pub fn map(&self) -> &IbtMap {
        &self.map
    }

    pub fn factor(&self) -> &FactorMap {
        self.map.factor()
    }

    pub fn orbit(&self) -> PeriodTwoOrbit {
        self.orbit
    }

    pub fn cells(&self) -> &ReturnCells {
        &self.cells
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    /// `Leb(Lambda) = q - p`
    pub fn base_length(&self) -> f64 {
        self.orbit.base_length()
    }

    #[inline]
    pub fn in_base(&self, x: Pos) -> bool {
        let v = x.x();
        v >= self.orbit.p && v <= self.orbit.q
    }

    fn check_base(&self, x: f64) -> Result<()> {
        if !(x >= self.orbit.p && x <= self.orbit.q) {
            return Err(IbtError::Domain {
                value: x,
                domain: "[p, q]",
            });
        }
        Ok(())
    }

    /// Return time from the tabulated cells, iterating `f` beyond the table.
    ///
    /// The endpoints `p` and `q` belong to the 2-cell.
    pub fn return_time(&self, x: f64) -> Result<usize> {
        self.check_base(x)?;
        let d = x - self.factor().cut();
        if d.abs() < CUT_RADIUS {
            return Err(IbtError::NearCut {
                x,
                radius: CUT_RADIUS,
                step: 0,
            });
        }
        match self.cells.lookup(d) {
            Some(r) => Ok(r),
            None => self.return_time_direct(x),
        }
    }

    /// Return time by iterating `f`: the least `n >= 2` with `f^n(x)` in `[p, q]`.
    pub fn return_time_direct(&self, x: f64) -> Result<usize> {
        self.check_base(x)?;
        let fm = self.factor();
        let mut z = Pos::from_x(x);
        for n in 1..=self.r_max {
            z = fm.step_pos(z).map_err(|e| e.at_step(n - 1))?.image;
            if n >= 2 && self.in_base(z) {
                return Ok(n);
            }
        }
        Err(IbtError::TailOverflow { cap: self.r_max })
    }

    /// Run one excursion from a base point, calling `visit` on
    /// `B^k(pt)` for `k = 0..r`; returns `(T(pt), r)`.
    #[inline]
    pub fn excursion(&self, s: State, mut visit: impl FnMut(State)) -> Result<(State, usize)> {
        let mut cur = s;
        for n in 1..=self.r_max {
            visit(cur);
            cur = self.map.step_state(cur).map_err(|e| e.at_step(n - 1))?;
            if n >= 2 && self.in_base(cur.x) {
                return Ok((cur, n));
            }
        }
        Err(IbtError::TailOverflow { cap: self.r_max })
    }

    /// `(T(pt), r(pt))`.
    pub fn induced_step(&self, pt: SquarePoint) -> Result<(SquarePoint, usize)> {
        self.check_base(pt.x)?;
        let (s, r) = self.excursion(State::from_point(pt), |_| {})?;
        Ok((s.point(), r))
    }

    /// `lambda[r = n]` for `2 <= n <= n_max + 1`.
    pub fn cell_measure(&self, n: usize) -> Result<f64> {
        let top = self.cells.n_max() + 1;
        if n < 2 || n > top {
            return Err(IbtError::invalid("n", format!("cell index must lie in [2, {top}], got {n}")));
        }
        let c = &self.cells;
        Ok((c.p_gap[n - 1] - c.p_gap[n] + c.q_gap[n - 1] - c.q_gap[n]) / self.base_length())
    }

    /// Sum of `n lambda[r = n]` over the table plus a power-law tail.
    pub fn kac_sum(&self) -> KacReport {
        let c = &self.cells;
        let top = c.n_max() + 1;
        let mut tabulated = 0.0;
        for n in 2..=top {
            tabulated += n as f64 * self.cell_measure(n).expect("in table");
        }
        let tail_of = |gaps: &[f64]| {
            let m = top;
            let gamma = (gaps[m / 2] / gaps[m]).ln() / 2f64.ln();
            let sum_from_m = gaps[m] * (m as f64 / (gamma - 1.0) + 0.5);
            m as f64 * gaps[m] + sum_from_m
        };
        let tail = (tail_of(&c.p_gap) + tail_of(&c.q_gap)) / self.base_length();
        let total = tabulated + tail;
        let target = 1.0 / self.base_length();
        KacReport {
            tabulated,
            tail,
            total,
            target,
            rel_err: (total - target).abs() / target,
        }
    }

    /// Least-squares slope of `log lambda[r = n]` against `log n` over every
    /// integer `n` in `[n_lo, n_hi]`.
    pub fn tail_exponent(&self, n_lo: usize, n_hi: usize) -> Result<f64> {
        self.tail_fit(n_lo, n_hi, (n_lo..=n_hi).collect())
    }

    /// Same fit on `points` log-spaced values of `n`; weights small `n` more.
    pub fn tail_exponent_log_spaced(&self, n_lo: usize, n_hi: usize, points: usize) -> Result<f64> {
        let (l0, l1) = ((n_lo as f64).ln(), (n_hi as f64).ln());
        let ns = (0..points.max(2))
            .map(|i| (l0 + (l1 - l0) * i as f64 / (points.max(2) - 1) as f64).exp().round() as usize)
            .collect();
        self.tail_fit(n_lo, n_hi, ns)
    }

    fn tail_fit(&self, n_lo: usize, n_hi: usize, ns: Vec<usize>) -> Result<f64> {
        if n_lo < 2 || n_hi <= n_lo {
            return Err(IbtError::invalid("n range", format!("need 2 <= n_lo < n_hi, got [{n_lo}, {n_hi}]")));
        }
        let mut xs = Vec::with_capacity(ns.len());
        let mut ys = Vec::with_capacity(ns.len());
        for n in ns {
            xs.push((n as f64).ln());
            ys.push(self.cell_measure(n)?.ln());
        }
        Ok(crate::stats::linear_fit(&xs, &ys, None).slope)
    }

    /// Trace an excursion from `pt`, which should lie in the cell
    /// `[r = n + 2]`, against the point asymptotics for `1 <= k <= n - 1`.
    pub fn point_asymptotics(&self, pt: SquarePoint, n: usize) -> Result<PointTrace> {
        self.check_base(pt.x)?;
        let side = if pt.x > self.factor().cut() { Side::P } else { Side::Q };
        let cf = self.map.cut_function();
        let (a, c) = match side {
            Side::P => (cf.alpha0(), cf.c0()),
            Side::Q => (cf.alpha1(), cf.c1()),
        };
        let kk = ((a + 1.0) / (c * a)).powf(1.0 / a);
        let mut states = Vec::with_capacity(n + 2);
        let (_, r) = self.excursion(State::from_point(pt), |s| states.push(s))?;
        if r != n + 2 {
            return Err(IbtError::invalid(
                "pt",
                format!("return time is {r}, expected {} for n = {n}", n + 2),
            ));
        }
        let mut trace = PointTrace {
            n,
            side,
            return_time: r,
            k: Vec::with_capacity(n),
            x_ratio: Vec::with_capacity(n),
            y_ratio: Vec::with_capacity(n),
        };
        for (k, s) in states.iter().enumerate().take(n).skip(1) {
            let (dx, dy) = match side {
                Side::P => (s.x.dist0(), s.y),
                Side::Q => (s.x.dist1(), 1.0 - s.y),
            };
            let m = n as f64;
            trace.k.push(k);
            trace.x_ratio.push(dx / (kk * (m - k as f64 + 2.0).powf(-1.0 / a)));
            trace.y_ratio.push(dy / (1.0 - (k as f64 + 1.0) / m).powf(1.0 + 1.0 / a));
        }
        Ok(trace)
    }

    /// Measured versus leading-order values of the eight orbit asymptotics at
    /// `n`. Interior gaps use the contact data of their own side.
    pub fn check_orbit_asymptotics(&self, n: usize) -> Result<AsymptoticReport> {
        if n < 1000 {
            return Err(IbtError::invalid("n_max", format!("must be >= 1000, got {n}")));
        }
        let owned;
        let c = if self.cells.n_max() > n {
            &self.cells
        } else {
            owned = ReturnCells::build(self.factor(), &self.orbit, n + 1)?;
            if owned.n_max() <= n {
                return Err(IbtError::numeric(
                    "orbit asymptotics",
                    format!("preimages lose monotonicity at n = {}", owned.n_max()),
                ));
            }
            &owned
        };
        let cf = self.map.cut_function();
        let k = |alpha: f64, cc: f64| ((alpha + 1.0) / (cc * alpha)).powf(1.0 / alpha);
        let (a0, a1) = (cf.alpha0(), cf.alpha1());
        let (k0, k1) = (k(a0, cf.c0()), k(a1, cf.c1()));

        type Meas<'a> = Box<dyn Fn(usize) -> f64 + 'a>;
        let rows: Vec<(&'static str, Meas, f64, f64)> = vec![
            ("p_n", Box::new(|m| c.p(m)), k0, 1.0 / a0),
            ("1-q_n", Box::new(|m| c.one_minus_q(m)), k1, 1.0 / a1),
            ("p_n-p_{n+1}", Box::new(|m| c.p(m) - c.p(m + 1)), k0 / a0, 1.0 + 1.0 / a0),
            ("q_{n+1}-q_n", Box::new(|m| c.one_minus_q(m) - c.one_minus_q(m + 1)), k1 / a1, 1.0 + 1.0 / a1),
            ("p°_n-A", Box::new(|m| c.p_int_gap(m)), k0 / a0, 1.0 + 1.0 / a0),
            ("A-q°_n", Box::new(|m| c.q_int_gap(m)), k1 / a1, 1.0 + 1.0 / a1),
            (
                "p°_n-p°_{n+1}",
                Box::new(|m| c.p_int_gap(m) - c.p_int_gap(m + 1)),
                (a0 + 1.0) / (a0 * a0) * k0,
                2.0 + 1.0 / a0,
            ),
            (
                "q°_{n+1}-q°_n",
                Box::new(|m| c.q_int_gap(m) - c.q_int_gap(m + 1)),
                (a1 + 1.0) / (a1 * a1) * k1,
                2.0 + 1.0 / a1,
            ),
        ];
        let mut checkpoints: Vec<usize> = std::iter::successors(Some(10usize), |v| Some(v * 10))
            .take_while(|&v| v < n)
            .collect();
        checkpoints.push(n);
        let entries = rows
            .into_iter()
            .map(|(quantity, meas, constant, expo)| {
                let pred = |m: usize| constant * (m as f64).powf(-expo);
                let trace = checkpoints.iter().map(|&m| (m, meas(m) / pred(m))).collect();
                AsymptoticEntry {
                    quantity,
                    measured: meas(n),
                    predicted: pred(n),
                    ratio: meas(n) / pred(n),
                    trace,
                }
            })
            .collect();
        Ok(AsymptoticReport { n, entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::icf::make_beta_icf;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sys(a0: f64, a1: f64, cells: usize) -> InducedSystem {
        let m = IbtMap::new(&make_beta_icf(a0, a1).unwrap()).unwrap();
        InducedSystem::new(m, cells, DEFAULT_R_MAX).unwrap()
    }

    #[test]
    fn linear_cut_orbit() {
        let s = sys(1.0, 1.0, 1000);
        let o = s.orbit();
        assert!((o.p - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!((o.q - (2.0 - 2f64.sqrt())).abs() < 1e-12);
        let p = o.p;
        assert_relative_eq!(s.cells().p(1), p - p * p / 2.0, max_relative = 1e-13);
        assert_eq!(s.cells().p(0), p);
        assert!((s.cells().q(0) - o.q).abs() < 1e-15);
    }

    #[test]
    fn symmetric_families_have_mirror_orbits() {
        for &a in &[0.5, 2.0, 3.0] {
            let o = find_period_two(sys(a, a, 10).factor()).unwrap();
            assert!((o.q - (1.0 - o.p)).abs() < 1e-12);
        }
    }

    #[test]
    fn period_two_by_fixed_point_iteration() {
        // w0 o w1 is a contraction; plain iteration is an independent route
        let s = sys(2.0, 2.0, 10);
        let fm = s.factor();
        let mut p = 0.25;
        for _ in 0..500 {
            p = fm.w0(fm.w1(p));
        }
        assert!((p - s.orbit().p).abs() < 1e-12);
    }

    #[test]
    fn cell_ordering() {
        let s = sys(1.5, 0.8, 2000);
        let c = s.cells();
        let a = s.factor().cut();
        for n in 0..c.n_max() {
            assert!(c.p(n + 1) < c.p(n));
            assert!(c.q(n) <= c.q(n + 1));
        }
        for n in 1..=c.n_max() {
            let (pi, pi1) = (a + c.p_int_gap(n), a + c.p_int_gap(n + 1));
            assert!(a < pi1 && pi1 < pi && pi <= s.orbit().q + 1e-15);
            assert!(c.q_int_gap(n + 1) < c.q_int_gap(n));
        }
    }

    #[test]
    fn return_time_examples() {
        let s = sys(1.0, 1.0, 1000);
        let o = s.orbit();
        let c = s.cells();
        let a = s.factor().cut();
        assert_eq!(s.return_time(o.p).unwrap(), 2);
        assert_eq!(s.return_time(o.q).unwrap(), 2);
        let p2 = a + c.p_int_gap(2);
        assert_eq!(s.return_time(p2 + 1e-12).unwrap(), 2);
        assert_eq!(s.return_time(p2 - 1e-12).unwrap(), 3);
        assert_eq!(s.return_time(0.5 * (p2 + o.q)).unwrap(), 2);
        // q°_1 = p; the 2-cell on the left is (q°_1, q°_2]
        let q1 = a - c.q_int_gap(1);
        assert_eq!(s.return_time(q1 + 1e-9).unwrap(), 2);
        assert_eq!(s.return_time_direct(q1 + 1e-9).unwrap(), 2);
        let q2 = a - c.q_int_gap(2);
        assert_eq!(s.return_time(q2 + 1e-9).unwrap(), 3);
        assert_eq!(s.return_time_direct(q2 + 1e-9).unwrap(), 3);
        assert!(matches!(s.return_time(0.1), Err(IbtError::Domain { .. })));
        assert!(matches!(s.return_time(0.5), Err(IbtError::NearCut { .. })));
    }

    #[test]
    fn cells_agree_with_direct_iteration() {
        let s = sys(2.0, 1.0, 500);
        let o = s.orbit();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let x = rng.random_range(o.p..o.q);
            if (x - s.factor().cut()).abs() < 1e-9 {
                continue;
            }
            assert_eq!(s.return_time(x).unwrap(), s.return_time_direct(x).unwrap(), "x = {x}");
        }
    }

    #[test]
    fn induced_step_stays_in_base() {
        let s = sys(1.0, 1.0, 100);
        let o = s.orbit();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let pt = SquarePoint {
                x: rng.random_range(o.p..o.q),
                y: rng.random(),
            };
            let (img, r) = s.induced_step(pt).unwrap();
            assert!(img.x >= o.p && img.x <= o.q);
            let (_, r2) = s.induced_step(SquarePoint { y: 1.0 - pt.y, ..pt }).unwrap();
            assert_eq!(r, r2);
        }
    }

    #[test]
    fn cell_measures_sum_to_one() {
        let s = sys(1.0, 1.0, 10_000);
        let total: f64 = (2..=10_000).map(|n| s.cell_measure(n).unwrap()).sum();
        assert!((0.999..=1.0 + 1e-12).contains(&total), "{total}");
        assert!(s.cell_measure(1).is_err());
        assert!(s.cell_measure(10_002).is_err());
    }

    #[test]
    fn linear_cut_asymptotics() {
        let s = sys(1.0, 1.0, 100_000);
        let rep = s.check_orbit_asymptotics(100_000).unwrap();
        let np = rep.get("p_n").unwrap().measured * 1e5;
        assert!((1.96..=2.04).contains(&np), "{np}");
        let inc = rep.get("p_n-p_{n+1}").unwrap().measured * 1e10;
        assert!((1.9..=2.1).contains(&inc), "{inc}");
        for e in &rep.entries {
            assert!((e.ratio - 1.0).abs() < 0.02, "{}: {}", e.quantity, e.ratio);
        }
    }

    #[test]
    fn point_asymptotics_both_sides() {
        let n = 10_000;
        for &(a0, a1) in &[(1.0, 1.0), (2.0, 2.0), (2.0, 0.7)] {
            let s = sys(a0, a1, 20_000);
            let c = s.cells();
            let a = s.factor().cut();
            let xp = a + 0.5 * (c.p_int_gap(n + 1) + c.p_int_gap(n + 2));
            let xq = a - 0.5 * (c.q_int_gap(n + 1) + c.q_int_gap(n + 2));
            for (x, y) in [(xp, 0.3), (xq, 0.6)] {
                let tr = s.point_asymptotics(SquarePoint { x, y }, n).unwrap();
                for i in 0..tr.k.len() {
                    if tr.k[i] <= n / 2 {
                        assert!((0.9..=1.1).contains(&tr.y_ratio[i]), "{a0},{a1} {:?} k={} {}", tr.side, tr.k[i], tr.y_ratio[i]);
                        assert!((0.9..=1.1).contains(&tr.x_ratio[i]), "{a0},{a1} {:?} k={} {}", tr.side, tr.k[i], tr.x_ratio[i]);
                    }
                }
            }
        }
    }
}
