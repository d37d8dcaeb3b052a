//! The expanding factor `f` of the baker's transformation.
//!
//! `f` is the branchwise inverse of
//!
//! ```text
//! w0(x) = int_0^x phi,        w1(x) = A + int_0^x (1 - phi),     A = int_0^1 phi.
//! ```
//!
//! Near the neutral fixed points `f` is a perturbation of the identity of
//! size `x^(alpha+1)`, so points are carried as a [`Pos`] (distance to the
//! nearer endpoint) and every branch is written in terms of the two deficit
//! integrals
//!
//! ```text
//! G0(z) = int_0^z (1 - phi),          H1(s) = int_0^s phi(1 - u) du,
//! w0(z) = z - G0(z) = A - H1(1 - z),  1 - w1(1 - s) = s - H1(s).
//! ```
//!
//! The hot path evaluates `f` with a single lookup in one of four
//! piecewise-Chebyshev tables (one per branch half), each returning the
//! preimage together with `1 - phi` or `phi` at it. The tables are fitted
//! on geometric segments, sixteen per octave, so their relative accuracy is
//! uniform down to `2^-62`.

use std::f64::consts::PI;

use crate::error::{IbtError, Result};
use crate::icf::CutFunction;
use crate::quad::{integrate, QuadOptions};

/// Points closer than this to the cut `x = A` have no well-defined image.
pub const CUT_RADIUS: f64 = 1e-12;

const DEGREE: usize = 8;
const SUBS_LOG2: u32 = 4;
const SUBS: usize = 1 << SUBS_LOG2;
const E_MIN: i32 = -62;
const FIT_TOL: f64 = 2e-13;

/// A point of `[0, 1]` stored as its distance to the nearer endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pos {
    off: f64,
    upper: bool,
}

impl Pos {
    pub fn from_x(x: f64) -> Pos {
        if x <= 0.5 {
            Pos { off: x, upper: false }
        } else {
            Pos {
                off: 1.0 - x,
                upper: true,
            }
        }
    }

    /// The point `off` itself.
    pub const fn lower(off: f64) -> Pos {
        Pos { off, upper: false }
    }

    /// The point `1 - off`.
    pub const fn upper(off: f64) -> Pos {
        Pos { off, upper: true }
    }

    pub fn x(self) -> f64 {
        if self.upper {
            1.0 - self.off
        } else {
            self.off
        }
    }

    /// Distance to the nearer endpoint.
    pub fn offset(self) -> f64 {
        self.off
    }

    pub fn is_upper(self) -> bool {
        self.upper
    }

    /// `x`, computed without rounding when the point is stored from below.
    pub fn dist0(self) -> f64 {
        self.x()
    }

    /// `1 - x`, computed without rounding when the point is stored from above.
    pub fn dist1(self) -> f64 {
        if self.upper {
            self.off
        } else {
            1.0 - self.off
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Left,
    Right,
}

/// One application of `f`, with the cut-function value at the image.
#[derive(Debug, Clone, Copy)]
pub struct FactorStep {
    pub image: Pos,
    pub branch: Branch,
    /// `phi(f(x))`
    pub phi: f64,
    /// `1 - phi(f(x))`
    pub one_minus_phi: f64,
}

const LEAF: u32 = 0;
const BAD: u32 = u32::MAX;
const REFINE_DEPTH: u32 = 4;

#[derive(Clone)]
struct Segment {
    mid: f64,
    inv_half: f64,
    /// `LEAF`, `BAD` (defer to the solvers) or the index of four children.
    kids: u32,
    /// Monomial coefficients in the local variable, value and slope interleaved.
    c: [[f64; 2]; DEGREE],
}

/// Piecewise polynomial fit of a pair of functions on `(0, t_max]`.
///
/// Top-level segments are addressed directly from the bits of the argument;
/// a segment whose fit misses the reference by more than [`FIT_TOL`] is split
/// into four children, recursively.
#[derive(Clone)]
struct Table {
    segs: Vec<Segment>,
    /// Number of top-level segments; refinements are stored after them.
    top: usize,
}

fn fits(seg: &Segment, f: &mut impl FnMut(f64) -> (f64, f64)) -> bool {
    [-1.0, -0.5, 0.0, 0.5, 1.0].into_iter().all(|u| {
        let (a, b) = f(seg.mid + u / seg.inv_half);
        let (fa, fb) = estrin(&seg.c, u);
        (fa - a).abs() <= FIT_TOL * a.abs() && (fb - b).abs() <= FIT_TOL * b.abs()
    })
}

impl Table {
    fn build(t_max: f64, mut f: impl FnMut(f64) -> (f64, f64)) -> Table {
        let mut segs = Vec::new();
        let mut i = 0usize;
        loop {
            let e = E_MIN + (i / SUBS) as i32;
            let k = (i % SUBS) as f64;
            let scale = 2f64.powi(e);
            let lo = scale * (1.0 + k / SUBS as f64);
            if lo >= t_max {
                break;
            }
            let hi = (scale * (1.0 + (k + 1.0) / SUBS as f64)).min(t_max);
            segs.push(fit_segment(lo, hi, &mut f));
            i += 1;
        }
        let top = segs.len();
        let mut pending: Vec<(usize, u32)> = (0..top).map(|i| (i, 0)).collect();
        while let Some((i, depth)) = pending.pop() {
            if fits(&segs[i], &mut f) {
                continue;
            }
            if depth == REFINE_DEPTH {
                segs[i].kids = BAD;
                continue;
            }
            let half = 1.0 / segs[i].inv_half;
            let lo = segs[i].mid - half;
            let first = segs.len();
            for j in 0..4 {
                let a = lo + half * 0.5 * j as f64;
                let b = lo + half * 0.5 * (j + 1) as f64;
                segs.push(fit_segment(a, b, &mut f));
                pending.push((first + j, depth + 1));
            }
            segs[i].kids = first as u32;
        }
        Table { segs, top }
    }

    /// `None` below the tabulated range (including zero) and where the fit
    /// was rejected.
    #[inline(always)]
    fn eval(&self, t: f64) -> Option<(f64, f64)> {
        let bits = t.to_bits();
        let e = ((bits >> 52) & 0x7ff) as i32 - 1023;
        if e < E_MIN {
            return None;
        }
        let k = ((bits >> (52 - SUBS_LOG2)) & (SUBS as u64 - 1)) as usize;
        let idx = (((e - E_MIN) as usize) * SUBS + k).min(self.top - 1);
        let mut s = &self.segs[idx];
        loop {
            let u = (t - s.mid) * s.inv_half;
            match s.kids {
                LEAF => return Some(estrin(&s.c, u)),
                BAD => return None,
                first => {
                    let j = (((u + 1.0) * 2.0) as usize).min(3);
                    s = &self.segs[first as usize + j];
                }
            }
        }
    }

    fn leaves(&self) -> impl Iterator<Item = &Segment> {
        self.segs.iter().filter(|s| s.kids == LEAF || s.kids == BAD)
    }

    fn t_min(&self) -> f64 {
        2f64.powi(E_MIN)
    }
}

#[inline(always)]
fn estrin(c: &[[f64; 2]; DEGREE], u: f64) -> (f64, f64) {
    let u2 = u * u;
    let u4 = u2 * u2;
    let mut out = [0.0; 2];
    for (j, o) in out.iter_mut().enumerate() {
        // plain products: without a hardware FMA target, mul_add is a libm call
        let p01 = c[0][j] + u * c[1][j];
        let p23 = c[2][j] + u * c[3][j];
        let p45 = c[4][j] + u * c[5][j];
        let p67 = c[6][j] + u * c[7][j];
        let p03 = p01 + u2 * p23;
        let p47 = p45 + u2 * p67;
        *o = p03 + u4 * p47;
    }
    (out[0], out[1])
}

fn fit_segment(lo: f64, hi: f64, f: &mut impl FnMut(f64) -> (f64, f64)) -> Segment {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let n = DEGREE;
    let mut vals = [[0.0; 2]; DEGREE];
    let mut theta = [0.0; DEGREE];
    for k in 0..n {
        theta[k] = PI * (k as f64 + 0.5) / n as f64;
        let (a, b) = f(mid + half * theta[k].cos());
        vals[k] = [a, b];
    }
    // Chebyshev coefficients
    let mut cheb = [[0.0; 2]; DEGREE];
    for (j, cj) in cheb.iter_mut().enumerate() {
        for (k, v) in vals.iter().enumerate() {
            let w = (j as f64 * theta[k]).cos();
            cj[0] += v[0] * w;
            cj[1] += v[1] * w;
        }
        let norm = if j == 0 { 1.0 / n as f64 } else { 2.0 / n as f64 };
        cj[0] *= norm;
        cj[1] *= norm;
    }
    // T_j in the monomial basis
    let mut t_prev = [0.0; DEGREE];
    let mut t_cur = [0.0; DEGREE];
    t_prev[0] = 1.0;
    t_cur[1] = 1.0;
    let mut mono = [[0.0; 2]; DEGREE];
    for (j, cj) in cheb.iter().enumerate() {
        let tj = match j {
            0 => t_prev,
            1 => t_cur,
            _ => {
                let mut next = [0.0; DEGREE];
                for i in 0..DEGREE {
                    next[i] = -t_prev[i];
                    if i > 0 {
                        next[i] += 2.0 * t_cur[i - 1];
                    }
                }
                t_prev = t_cur;
                t_cur = next;
                next
            }
        };
        for i in 0..DEGREE {
            mono[i][0] += cj[0] * tj[i];
            mono[i][1] += cj[1] * tj[i];
        }
    }
    Segment {
        mid,
        inv_half: 1.0 / half,
        kids: LEAF,
        c: mono,
    }
}

/// Deficit integral on one side, tabulated on `(0, 1/2]` with a power-law
/// continuation below the table.
#[derive(Clone)]
struct Deficit {
    table: Table,
    g_min: f64,
    slope_min: f64,
}

impl Deficit {
    fn new(table: Table) -> Deficit {
        let t = table.t_min();
        let (g, k) = table.eval(t).expect("table covers its lower edge");
        Deficit {
            table,
            g_min: g,
            slope_min: if g > 0.0 { t * k / g } else { 1.0 },
        }
    }

    /// `(G(t), G'(t))`
    #[inline]
    fn eval(&self, t: f64) -> (f64, f64) {
        match self.table.eval(t) {
            Some(v) => v,
            None => self.below(t),
        }
    }

    #[cold]
    fn below(&self, t: f64) -> (f64, f64) {
        if t <= 0.0 {
            return (0.0, 0.0);
        }
        let t_min = self.table.t_min();
        let g = self.g_min * (t / t_min).powf(self.slope_min);
        (g, self.slope_min * g / t)
    }

    /// Root of `z - G(z) = y` for `0 <= y <= max_y`; returns `(z, G'(z))`.
    fn solve_near_identity(&self, y: f64) -> (f64, f64) {
        if y <= 0.0 {
            return (0.0, 0.0);
        }
        // z - G(z) is concave, so Newton from z = y increases monotonically
        let mut z = y;
        for _ in 0..100 {
            let (g, k) = self.eval(z);
            let step = (y - (z - g)) / (1.0 - k);
            if !(step > 2e-16 * z) {
                return (z, k);
            }
            z += step;
        }
        let (_, k) = self.eval(z);
        (z, k)
    }

    /// Root of `G(z) = d` on `(0, z_max]`; returns `(z, G'(z))`.
    fn solve_convex(&self, d: f64, z_max: f64) -> (f64, f64) {
        if d <= 0.0 {
            return (0.0, 0.0);
        }
        let (g_top, k_top) = self.eval(z_max);
        if d >= g_top {
            return (z_max, k_top);
        }
        let beta = z_max * k_top / g_top;
        let mut z = z_max * (d / g_top).powf(1.0 / beta);
        let (mut lo, mut hi) = (0.0f64, z_max);
        let ln_d = d.ln();
        for _ in 0..200 {
            let (g, k) = self.eval(z);
            if g > d {
                hi = z;
            } else if g < d {
                lo = z;
            } else {
                return (z, k);
            }
            // Newton in (ln z, ln G) coordinates, where G is close to a power
            let dv = (g.ln() - ln_d) * g / (z * k);
            let mut next = z * (-dv).exp();
            if !(next > lo && next < hi) {
                next = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
            }
            if (next - z).abs() <= 1e-16 * z {
                z = next;
                break;
            }
            z = next;
        }
        let (_, k) = self.eval(z);
        (z, k)
    }
}

/// The expanding factor map.
#[derive(Clone)]
pub struct FactorMap {
    cf: CutFunction,
    a: f64,
    inverse_tol: f64,
    /// `w0(1/2)`
    m0: f64,
    /// `w1(1/2)`
    m1: f64,
    g0_half: f64,
    h1_half: f64,
    left: Deficit,
    right: Deficit,
    /// `x -> (G0(f(x)), 1 - phi(f(x)))` on `(0, m0]`
    inv_small0: Table,
    /// `A - x -> (1 - f(x), phi(f(x)))` on `(0, H1(1/2)]`
    inv_cut0: Table,
    /// `x - A -> (f(x), 1 - phi(f(x)))` on `(0, G0(1/2)]`
    inv_cut1: Table,
    /// `1 - x -> (H1(1 - f(x)), phi(f(x)))` on `(0, 1 - m1]`
    inv_small1: Table,
}

impl std::fmt::Debug for FactorMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FactorMap")
            .field("cf", &self.cf)
            .field("a", &self.a)
            .field("m0", &self.m0)
            .field("m1", &self.m1)
            .finish_non_exhaustive()
    }
}

/// Accurate `G0` and `H1`, used only while fitting the tables.
fn reference_deficits(cf: &CutFunction) -> Result<(Box<dyn Fn(f64) -> f64 + '_>, Box<dyn Fn(f64) -> f64 + '_>)> {
    if cf.beta_parameters().is_some() {
        let g0 = Box::new(move |z: f64| cf.closed_deficit_left(z).expect("beta family"));
        let h1 = Box::new(move |s: f64| cf.closed_deficit_right(s).expect("beta family"));
        return Ok((g0, h1));
    }
    let g0 = cumulative_deficit(move |t| cf.one_minus_phi(t), cf.alpha0(), cf.c0())?;
    let h1 = cumulative_deficit(move |s| cf.phi_near_one(s), cf.alpha1(), cf.c1())?;
    Ok((Box::new(g0), Box::new(h1)))
}

/// `t -> int_0^t k` for a user profile: exact quadrature between powers of two,
/// anchored by the contact law far below the tabulated range.
fn cumulative_deficit<K: Fn(f64) -> f64 + Clone>(
    k: K,
    alpha: f64,
    c: f64,
) -> Result<impl Fn(f64) -> f64> {
    let opts = QuadOptions::new(0.0, 1e-14);
    let e_lo = E_MIN - 12;
    let t_lo = 2f64.powi(e_lo);
    let mut anchors = vec![c * t_lo.powf(alpha + 1.0) / (alpha + 1.0)];
    for e in e_lo..1 {
        let a = 2f64.powi(e);
        let inc = integrate(&k, a, 2.0 * a, opts)?;
        anchors.push(anchors.last().copied().unwrap_or(0.0) + inc);
    }
    Ok(move |t: f64| {
        if t <= t_lo {
            return c * t.powf(alpha + 1.0) / (alpha + 1.0);
        }
        let e = t.log2().floor() as i32;
        let e = e.clamp(e_lo, 0);
        let a = 2f64.powi(e);
        let idx = (e - e_lo) as usize;
        anchors[idx] + integrate(&k, a, t, opts).unwrap_or(f64::NAN)
    })
}

/// Build the factor map for a cut function.
pub fn build_factor(cf: &CutFunction) -> Result<FactorMap> {
    let opts = QuadOptions::new(1e-15, 1e-14);
    let a = integrate(|x| cf.phi(x), 0.0, 0.5, opts)? + integrate(|s| cf.phi_near_one(s), 0.0, 0.5, opts)?;
    if !(a > 0.0 && a < 1.0) {
        return Err(IbtError::numeric("cut abscissa", format!("A = {a} outside (0, 1)")));
    }

    let (g0_ref, h1_ref) = reference_deficits(cf)?;
    let left_table = Table::build(0.5, |t| (g0_ref(t), cf.one_minus_phi(t)));
    let right_table = Table::build(0.5, |s| (h1_ref(s), cf.phi_near_one(s)));
    let left = Deficit::new(left_table);
    let right = Deficit::new(right_table);
    for (name, d) in [("G0", &left), ("H1", &right)] {
        if d.table.leaves().any(|s| s.kids == BAD || s.c.iter().flatten().any(|v| !v.is_finite())) {
            return Err(IbtError::numeric("factor tables", format!("poor fit of {name}")));
        }
    }

    let g0_half = left.eval(0.5).0;
    let h1_half = right.eval(0.5).0;
    let m0 = 0.5 - g0_half;
    let m1 = a + g0_half;

    let inv_small0 = Table::build(m0, |y| {
        let (z, k) = left.solve_near_identity(y);
        (left.eval(z).0, k)
    });
    let inv_small1 = Table::build(1.0 - m1, |t| {
        let (s, k) = right.solve_near_identity(t);
        (right.eval(s).0, k)
    });
    let inv_cut1 = Table::build(g0_half, |d| left.solve_convex(d, 0.5));
    let inv_cut0 = Table::build(h1_half, |e| right.solve_convex(e, 0.5));

    Ok(FactorMap {
        cf: cf.clone(),
        a,
        inverse_tol: 1e-14,
        m0,
        m1,
        g0_half,
        h1_half,
        left,
        right,
        inv_small0,
        inv_cut0,
        inv_cut1,
        inv_small1,
    })
}

impl FactorMap {
    pub fn cut_function(&self) -> &CutFunction {
        &self.cf
    }

    /// The cut abscissa `A = int_0^1 phi`.
    pub fn cut(&self) -> f64 {
        self.a
    }

    pub fn inverse_tol(&self) -> f64 {
        self.inverse_tol
    }

    /// `G0(z) = int_0^z (1 - phi)` for `z` in `[0, 1/2]`.
    pub fn deficit_left(&self, z: f64) -> f64 {
        self.left.eval(z.min(0.5)).0
    }

    /// `H1(s) = int_0^s phi(1 - u) du` for `s` in `[0, 1/2]`.
    pub fn deficit_right(&self, s: f64) -> f64 {
        self.right.eval(s.min(0.5)).0
    }

    /// `A - w0(z)`, accurate when the result is small.
    pub fn w0_gap(&self, z: Pos) -> f64 {
        if z.upper {
            self.right.eval(z.off).0
        } else {
            self.a - (z.off - self.left.eval(z.off).0)
        }
    }

    /// `w1(z) - A`, accurate when the result is small.
    pub fn w1_gap(&self, z: Pos) -> f64 {
        if z.upper {
            (1.0 - self.a) - (z.off - self.right.eval(z.off).0)
        } else {
            self.left.eval(z.off).0
        }
    }

    pub fn w0_pos(&self, z: Pos) -> Pos {
        if z.upper {
            let h = self.right.eval(z.off).0;
            let x = self.a - h;
            if x <= 0.5 {
                Pos::lower(x)
            } else {
                Pos::upper((1.0 - self.a) + h)
            }
        } else {
            Pos::lower(z.off - self.left.eval(z.off).0)
        }
    }

    pub fn w1_pos(&self, z: Pos) -> Pos {
        if z.upper {
            Pos::upper(z.off - self.right.eval(z.off).0)
        } else {
            let g = self.left.eval(z.off).0;
            let x = self.a + g;
            if x <= 0.5 {
                Pos::lower(x)
            } else {
                Pos::upper((1.0 - self.a) - g)
            }
        }
    }

    /// Left branch `w0(x) = int_0^x phi`, mapping `[0,1]` onto `[0,A]`.
    pub fn w0(&self, x: f64) -> f64 {
        self.w0_pos(Pos::from_x(x.clamp(0.0, 1.0))).x()
    }

    /// Right branch `w1(x) = A + int_0^x (1 - phi)`, mapping `[0,1]` onto `[A,1]`.
    pub fn w1(&self, x: f64) -> f64 {
        self.w1_pos(Pos::from_x(x.clamp(0.0, 1.0))).x()
    }

    /// One application of `f`.
    #[inline]
    pub fn step_pos(&self, x: Pos) -> Result<FactorStep> {
        let xv = x.x();
        let d = xv - self.a;
        if d.abs() < CUT_RADIUS {
            return Err(IbtError::NearCut {
                x: xv,
                radius: CUT_RADIUS,
                step: 0,
            });
        }
        Ok(if d < 0.0 {
            if xv <= self.m0 {
                let (g, k) = match self.inv_small0.eval(x.off) {
                    Some(v) => v,
                    None => self.slow_small0(x.off),
                };
                FactorStep {
                    image: Pos::lower(x.off + g),
                    branch: Branch::Left,
                    phi: 1.0 - k,
                    one_minus_phi: k,
                }
            } else {
                let (s, k) = match self.inv_cut0.eval(-d) {
                    Some(v) => v,
                    None => self.right.solve_convex(-d, 0.5),
                };
                FactorStep {
                    image: Pos::upper(s),
                    branch: Branch::Left,
                    phi: k,
                    one_minus_phi: 1.0 - k,
                }
            }
        } else if xv < self.m1 {
            let (z, k) = match self.inv_cut1.eval(d) {
                Some(v) => v,
                None => self.left.solve_convex(d, 0.5),
            };
            FactorStep {
                image: Pos::lower(z),
                branch: Branch::Right,
                phi: 1.0 - k,
                one_minus_phi: k,
            }
        } else {
            let t = x.dist1();
            let (h, k) = match self.inv_small1.eval(t) {
                Some(v) => v,
                None => self.slow_small1(t),
            };
            FactorStep {
                image: Pos::upper(t + h),
                branch: Branch::Right,
                phi: k,
                one_minus_phi: 1.0 - k,
            }
        })
    }

    #[cold]
    fn slow_small0(&self, y: f64) -> (f64, f64) {
        let (z, k) = self.left.solve_near_identity(y);
        (self.left.eval(z).0, k)
    }

    #[cold]
    fn slow_small1(&self, t: f64) -> (f64, f64) {
        let (s, k) = self.right.solve_near_identity(t);
        (self.right.eval(s).0, k)
    }

    /// `f(x)`. Points within [`CUT_RADIUS`] of `A` are resolved by the exact
    /// one-sided solvers.
    pub fn f(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match self.step_pos(Pos::from_x(x)) {
            Ok(s) => s.image.x(),
            Err(_) => {
                let d = x - self.a;
                if d < 0.0 {
                    1.0 - self.right.solve_convex(-d, 0.5).0
                } else {
                    self.left.solve_convex(d, 0.5).0
                }
            }
        }
    }

    /// `f(A + d)` for a signed offset `d` from the cut. Near the cut `f` has
    /// unbounded slope, so this is the accurate route when `d` is known
    /// exactly, e.g. from [`w0_gap`](Self::w0_gap) or [`w1_gap`](Self::w1_gap).
    pub fn f_at_gap(&self, d: f64) -> f64 {
        if d < 0.0 && self.a + d > self.m0 {
            let s = match self.inv_cut0.eval(-d) {
                Some(v) => v.0,
                None => self.right.solve_convex(-d, 0.5).0,
            };
            1.0 - s
        } else if d > 0.0 && self.a + d < self.m1 {
            match self.inv_cut1.eval(d) {
                Some(v) => v.0,
                None => self.left.solve_convex(d, 0.5).0,
            }
        } else if d == 0.0 {
            // both one-sided limits; the left branch ends at 1
            1.0
        } else {
            self.f(self.a + d)
        }
    }

    /// `Df(x)`, from the cut function evaluated directly at `f(x)`.
    pub fn df(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(IbtError::Domain {
                value: x,
                domain: "[0, 1]",
            });
        }
        let st = self.step_pos(Pos::from_x(x))?;
        let z = st.image;
        let phi = if z.upper {
            self.cf.phi_near_one(z.off)
        } else {
            self.cf.phi(z.off)
        };
        let omp = if z.upper {
            1.0 - self.cf.phi_near_one(z.off)
        } else {
            self.cf.one_minus_phi(z.off)
        };
        Ok(match st.branch {
            Branch::Left => 1.0 / phi,
            Branch::Right => 1.0 / omp,
        })
    }

    /// Thresholds `(w0(1/2), w1(1/2))` separating the table regimes.
    pub fn half_images(&self) -> (f64, f64) {
        (self.m0, self.m1)
    }

    /// `(G0(1/2), H1(1/2))`
    pub fn half_deficits(&self) -> (f64, f64) {
        (self.g0_half, self.h1_half)
    }

    /// Largest relative deviation of the tabulated inverse branches from an
    /// independent Newton solve at `n` log-spaced points of each regime.
    pub fn table_audit(&self, n: usize) -> f64 {
        let mut worst = 0.0f64;
        let mut rel = |a: f64, b: f64| {
            let r = if b == 0.0 { a.abs() } else { ((a - b) / b).abs() };
            worst = worst.max(r);
        };
        for i in 0..n {
            let frac = (i as f64 + 0.5) / n as f64;
            let y = self.m0 * 2f64.powf(-50.0 * frac);
            if let Some((g, kt)) = self.inv_small0.eval(y) {
                let (z, k) = self.left.solve_near_identity(y);
                rel(g, self.left.eval(z).0);
                rel(kt, k);
            }
            let t = (1.0 - self.m1) * 2f64.powf(-50.0 * frac);
            if let Some((h, kt)) = self.inv_small1.eval(t) {
                let (s, k) = self.right.solve_near_identity(t);
                rel(h, self.right.eval(s).0);
                rel(kt, k);
            }
            let d = self.g0_half * 2f64.powf(-40.0 * frac);
            if let Some((zt, kt)) = self.inv_cut1.eval(d) {
                let (z, k) = self.left.solve_convex(d, 0.5);
                rel(zt, z);
                rel(kt, k);
            }
            let e = self.h1_half * 2f64.powf(-40.0 * frac);
            if let Some((st, kt)) = self.inv_cut0.eval(e) {
                let (s, k) = self.right.solve_convex(e, 0.5);
                rel(st, s);
                rel(kt, k);
            }
        }
        worst
    }

    /// Fraction of inverse-table segments that defer to the iterative solvers.
    pub fn deferred_fraction(&self) -> f64 {
        let tabs = [&self.inv_small0, &self.inv_small1, &self.inv_cut0, &self.inv_cut1];
        let total: usize = tabs.iter().map(|t| t.leaves().count()).sum();
        let bad: usize = tabs.iter().map(|t| t.leaves().filter(|s| s.kids == BAD).count()).sum();
        bad as f64 / total as f64
    }
}
