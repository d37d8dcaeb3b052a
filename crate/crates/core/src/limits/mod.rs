//! Limit laws for Birkhoff sums `S_n = sum_{k<n} X o B^k`.
//!
//! The asymptotics are governed by the averages of `X` along the two neutral
//! lines, weighted by the profile of `y` during a long excursion:
//!
//! ```text
//! M0 = int_0^1 X(0, y^{1 + 1/a0}) dy
//! M1 = int_0^1 X(1, 1 - y^{1 + 1/a1}) dy
//! Cj = |Mj| / (aj L) * (|Mj| (aj + 1) / (cj aj))^{1/aj},   L = q - p
//! ```
//!
//! `Cj` is the tail constant of the induced observable `xi` under the
//! normalized measure on the base. A block of `n` steps of `B` contains about
//! `n L` returns, so the scale of the limit law for `S_n` carries a factor `L`:
//! `a = L (C0 + C1) Gamma(1 - p) cos(p pi / 2)` in the stable cases and
//! variance `L (C0 + C1)` in the `sqrt(n log n)` case. The values without
//! the factor are kept alongside as `*_unscaled`.

mod ensemble;
mod observable;

pub use ensemble::{
    birkhoff_ensemble, correlation, green_kubo, xi, xi_tail, BirkhoffEnsemble, CorrelationCurve, GreenKubo,
    SideTail, TailPoint, XiTailReport,
};
pub use observable::{Observable, ObservableKind, MEAN_ZERO_TOL};

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{IbtError, Result};
use crate::icf::CutFunction;
use crate::induced::InducedSystem;
use crate::quad::{integrate, QuadOptions};
use crate::stable::StableParams;

/// Threshold below which a moment counts as zero.
pub const MOMENT_ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub m0: f64,
    pub m1: f64,
    /// `int X(1, y^{1 + 1/a1}) dy`, the profile mirrored from the left line.
    pub m1_unmirrored: f64,
}

/// `(M0, M1)` by adaptive quadrature.
pub fn moments_m(obs: &Observable, cf: &CutFunction) -> Result<Moments> {
    let b0 = 1.0 + 1.0 / cf.alpha0();
    let b1 = 1.0 + 1.0 / cf.alpha1();
    let opts = QuadOptions::new(1e-12, 1e-11);
    let m0 = integrate(|y| obs.eval(0.0, y.powf(b0)), 0.0, 1.0, opts)?;
    let m1 = integrate(|y| obs.eval(1.0, 1.0 - y.powf(b1)), 0.0, 1.0, opts)?;
    let m1_unmirrored = integrate(|y| obs.eval(1.0, y.powf(b1)), 0.0, 1.0, opts)?;
    Ok(Moments { m0, m1, m1_unmirrored })
}

fn tail_constant(m: f64, alpha: f64, c: f64, base_length: f64) -> f64 {
    let m = m.abs();
    if m == 0.0 {
        return 0.0;
    }
    m / (alpha * base_length) * (m * (alpha + 1.0) / (c * alpha)).powf(1.0 / alpha)
}

/// `(C0, C1)`; zero when the matching moment vanishes.
pub fn constants_c(m0: f64, m1: f64, cf: &CutFunction, base_length: f64) -> (f64, f64) {
    (
        tail_constant(m0, cf.alpha0(), cf.c0(), base_length),
        tail_constant(m1, cf.alpha1(), cf.c1(), base_length),
    )
}

/// `Gamma(1 - p) cos(p pi / 2)`, positive for `p` in `(1, 2)`.
pub fn stable_scale_factor(p: f64) -> f64 {
    gamma(1.0 - p) * (p * FRAC_PI_2).cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitCase {
    Clt,
    StableOneSided,
    StableTwoSided,
    NonstandardClt,
    OutOfScope,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Norming {
    /// `sqrt(n)`
    Sqrt,
    /// `n^exponent`
    Power { exponent: f64 },
    /// `sqrt(n log n)`
    SqrtNLogN,
    /// 1
    Identity,
}

impl Norming {
    pub fn factor(&self, n: usize) -> f64 {
        let n = n as f64;
        match *self {
            Norming::Sqrt => n.sqrt(),
            Norming::Power { exponent } => n.powf(exponent),
            Norming::SqrtNLogN => (n * n.ln()).sqrt(),
            Norming::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LimitConstants {
    pub m0: f64,
    pub m1: f64,
    pub m1_unmirrored: f64,
    pub c0: f64,
    pub c1: f64,
    pub base_length: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitPrediction {
    pub case: LimitCase,
    /// The hypotheses hold only after `X -> -X` or exchanging the two sides.
    pub inferred_by_symmetry: bool,
    pub norming: Norming,
    /// Target law for `S_n / A_n`; `p = 2` for the normal cases. `None` for
    /// the CLT case, whose variance needs a Green–Kubo estimate.
    pub target: Option<StableParams>,
    /// The same law with the scale computed without the factor `L`.
    pub target_unscaled: Option<StableParams>,
    pub constants: LimitConstants,
    pub note: String,
}

fn finite_variance_side(alpha: f64, m: f64, gamma: f64) -> bool {
    let zero = m.abs() <= MOMENT_ZERO_TOL;
    alpha < 1.0 || (zero && alpha == 1.0) || (zero && alpha > 1.0 && alpha < 3.0 && gamma > (alpha - 1.0) / 2.0)
}

/// Select the limit theorem that applies to `obs` and build its target law.
pub fn predict_limit(obs: &Observable, sys: &InducedSystem) -> Result<LimitPrediction> {
    let mean = obs.integral()?;
    if mean.abs() > MEAN_ZERO_TOL {
        return Err(IbtError::invalid("observable", format!("must have mean zero, integral is {mean:e}")));
    }
    let cf = sys.map().cut_function();
    let l = sys.base_length();
    let mo = moments_m(obs, cf)?;
    let (c0, c1) = constants_c(mo.m0, mo.m1, cf, l);
    let constants = LimitConstants {
        m0: mo.m0,
        m1: mo.m1,
        m1_unmirrored: mo.m1_unmirrored,
        c0,
        c1,
        base_length: l,
    };
    let (a0, a1) = (cf.alpha0(), cf.alpha1());
    let nz = |m: f64| m.abs() > MOMENT_ZERO_TOL;
    let mut pred = LimitPrediction {
        case: LimitCase::OutOfScope,
        inferred_by_symmetry: false,
        norming: Norming::Sqrt,
        target: None,
        target_unscaled: None,
        constants,
        note: String::new(),
    };

    if finite_variance_side(a0, mo.m0, obs.gamma) && finite_variance_side(a1, mo.m1, obs.gamma) {
        pred.case = LimitCase::Clt;
        pred.note = "xi is square integrable; variance from Green-Kubo sums (assumes xi is not a coboundary)".into();
        return Ok(pred);
    }

    if a0 == 1.0 && a1 == 1.0 && nz(mo.m0) && nz(mo.m1) {
        pred.case = LimitCase::NonstandardClt;
        pred.norming = Norming::SqrtNLogN;
        pred.target = Some(StableParams::normal(l * (c0 + c1))?);
        pred.target_unscaled = Some(StableParams::normal(c0 + c1)?);
        pred.note = "normal limit with variance L (C0 + C1)".into();
        return Ok(pred);
    }

    let stable = |c: f64, b: f64, p: f64| -> Result<(StableParams, StableParams)> {
        let k = stable_scale_factor(p);
        let (a, a_unscaled) = (l * c * k, c * k);
        if !(a > 0.0) {
            return Err(IbtError::numeric("stable scale", format!("a = {a} is not positive for p = {p}")));
        }
        Ok((StableParams::new(p, a, b)?, StableParams::new(p, a_unscaled, b)?))
    };

    if a0 == a1 && a0 > 1.0 && nz(mo.m0) && nz(mo.m1) && mo.m0.signum() != mo.m1.signum() {
        let p = 1.0 + 1.0 / a0;
        // positive tail weight minus negative tail weight
        let (cp, cn) = if mo.m0 > 0.0 { (c0, c1) } else { (c1, c0) };
        let b = (cp - cn) / (c0 + c1);
        let (t, tu) = stable(c0 + c1, b, p)?;
        pred.case = LimitCase::StableTwoSided;
        pred.inferred_by_symmetry = mo.m0 < 0.0;
        pred.norming = Norming::Power { exponent: a0 / (a0 + 1.0) };
        pred.target = Some(t);
        pred.target_unscaled = Some(tu);
        pred.note = "two-sided stable law, b = (C0 - C1) / (C0 + C1)".into();
        return Ok(pred);
    }

    let one_sided = |alpha: f64, m: f64, c: f64, exchanged: bool, pred: &mut LimitPrediction| -> Result<()> {
        let p = 1.0 + 1.0 / alpha;
        let (t, tu) = stable(c, m.signum(), p)?;
        pred.case = LimitCase::StableOneSided;
        pred.inferred_by_symmetry = exchanged || m < 0.0;
        pred.norming = Norming::Power { exponent: alpha / (alpha + 1.0) };
        pred.target = Some(t);
        pred.target_unscaled = Some(tu);
        pred.note = "totally skewed stable law from the dominant neutral line".into();
        Ok(())
    };
    if a0 > a1 && a0 > 1.0 && nz(mo.m0) {
        one_sided(a0, mo.m0, c0, false, &mut pred)?;
        return Ok(pred);
    }
    if a1 > a0 && a1 > 1.0 && nz(mo.m1) {
        one_sided(a1, mo.m1, c1, true, &mut pred)?;
        return Ok(pred);
    }

    pred.note = "no limit theorem covers these exponents and moments".into();
    Ok(pred)
}
