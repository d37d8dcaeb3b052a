//! Intermittent cut functions.
//!
//! A cut function `phi: [0,1] -> [0,1]` is smooth, strictly decreasing, has
//! `phi(0) = 1`, `phi(1) = 0`, and power-law contact with both endpoints:
//!
//! ```text
//! 1 - phi(x)  = c0 x^alpha0 + o(x^alpha0)
//! phi(1 - x)  = c1 x^alpha1 + o(x^alpha1)
//! ```
//!
//! Every evaluation that feeds the dynamics goes through the three accurate
//! entry points [`CutFunction::phi`], [`CutFunction::one_minus_phi`] and
//! [`CutFunction::phi_near_one`], so that the tiny quantities near the
//! indifferent fixed points never come from a cancelling subtraction.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use statrs::function::beta::ln_beta;

use crate::error::{IbtError, Result};
use crate::special::inc_beta;

/// User-supplied cut-function profile.
///
/// Only `phi` and `dphi` are required; the two complement forms default to
/// plain subtraction and should be overridden whenever the profile has a
/// closed form that stays accurate near the endpoints.
pub trait CutProfile: Send + Sync {
    fn phi(&self, x: f64) -> f64;

    fn dphi(&self, x: f64) -> f64;

    /// `1 - phi(x)`, accurate for small `x`.
    fn one_minus_phi(&self, x: f64) -> f64 {
        1.0 - self.phi(x)
    }

    /// `phi(1 - s)`, accurate for small `s`.
    fn phi_near_one(&self, s: f64) -> f64 {
        self.phi(1.0 - s)
    }
}

#[derive(Clone)]
enum Shape {
    /// `phi(x) = 1 - I_x(alpha0, alpha1)`
    Beta { ln_beta: f64 },
    Custom(Arc<dyn CutProfile>),
}

/// An intermittent cut function together with its contact data.
#[derive(Clone)]
pub struct CutFunction {
    alpha0: f64,
    alpha1: f64,
    c0: f64,
    c1: f64,
    shape: Shape,
}

impl fmt::Debug for CutFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.shape {
            Shape::Beta { .. } => "beta",
            Shape::Custom(_) => "custom",
        };
        f.debug_struct("CutFunction")
            .field("kind", &kind)
            .field("alpha0", &self.alpha0)
            .field("alpha1", &self.alpha1)
            .field("c0", &self.c0)
            .field("c1", &self.c1)
            .finish()
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(IbtError::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

/// The regularized-incomplete-beta cut function `phi(x) = 1 - I_x(alpha0, alpha1)`.
///
/// Its contact coefficients are `c0 = 1/(alpha0 B)` and `c1 = 1/(alpha1 B)`
/// with `B = Beta(alpha0, alpha1)`.
pub fn make_beta_icf(alpha0: f64, alpha1: f64) -> Result<CutFunction> {
    CutFunction::beta(alpha0, alpha1)
}

/// Contact audit produced by [`CutFunction::verify_contact`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ContactAudit {
    pub probe: f64,
    pub c0_est: f64,
    pub c1_est: f64,
    pub rel_err0: f64,
    pub rel_err1: f64,
    /// Local log-log slope of `1 - phi` between `probe/2` and `probe`.
    pub alpha0_est: f64,
    /// Local log-log slope of `phi(1 - .)` between `probe/2` and `probe`.
    pub alpha1_est: f64,
}

impl CutFunction {
    pub fn beta(alpha0: f64, alpha1: f64) -> Result<Self> {
        check_positive("alpha0", alpha0)?;
        check_positive("alpha1", alpha1)?;
        let lb = ln_beta(alpha0, alpha1);
        let beta = lb.exp();
        Ok(CutFunction {
            alpha0,
            alpha1,
            c0: 1.0 / (alpha0 * beta),
            c1: 1.0 / (alpha1 * beta),
            shape: Shape::Beta { ln_beta: lb },
        })
    }

    /// Wrap a user profile. The caller declares the contact data; it is not
    /// derived, use [`CutFunction::verify_contact`] to audit it.
    pub fn custom(
        profile: Arc<dyn CutProfile>,
        alpha0: f64,
        alpha1: f64,
        c0: f64,
        c1: f64,
    ) -> Result<Self> {
        check_positive("alpha0", alpha0)?;
        check_positive("alpha1", alpha1)?;
        check_positive("c0", c0)?;
        check_positive("c1", c1)?;
        if profile.phi(0.0) != 1.0 || profile.phi(1.0) != 0.0 {
            return Err(IbtError::invalid(
                "profile",
                "phi(0) must be exactly 1 and phi(1) exactly 0",
            ));
        }
        let n = 4096;
        let mut prev = 1.0;
        for i in 1..=n {
            let v = profile.phi(i as f64 / n as f64);
            if !(v < prev) || !(0.0..=1.0).contains(&v) {
                return Err(IbtError::invalid(
                    "profile",
                    format!("phi is not strictly decreasing into [0,1] near x = {}", i as f64 / n as f64),
                ));
            }
            prev = v;
        }
        Ok(CutFunction {
            alpha0,
            alpha1,
            c0,
            c1,
            shape: Shape::Custom(profile),
        })
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }
    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }
    pub fn c0(&self) -> f64 {
        self.c0
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// `(alpha0, alpha1)` when this is a member of the beta family.
    pub fn beta_parameters(&self) -> Option<(f64, f64)> {
        match self.shape {
            Shape::Beta { .. } => Some((self.alpha0, self.alpha1)),
            Shape::Custom(_) => None,
        }
    }

    /// `max(alpha0, alpha1)`, the exponent governing the mixing rate.
    pub fn alpha(&self) -> f64 {
        self.alpha0.max(self.alpha1)
    }

    /// `phi(x)` with endpoints exact.
    pub fn eval_phi(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(IbtError::Domain {
                value: x,
                domain: "[0, 1]",
            });
        }
        Ok(self.phi(x))
    }

    /// `phi(x)` without domain checking; `x` is clamped to `[0, 1]`.
    pub fn phi(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        if x >= 1.0 {
            return 0.0;
        }
        match &self.shape {
            Shape::Beta { .. } => {
                if x <= 0.5 {
                    1.0 - inc_beta(x, self.alpha0, self.alpha1)
                } else {
                    inc_beta(1.0 - x, self.alpha1, self.alpha0)
                }
            }
            Shape::Custom(p) => p.phi(x),
        }
    }

    /// `1 - phi(x)`.
    pub fn one_minus_phi(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        match &self.shape {
            Shape::Beta { .. } => inc_beta(x, self.alpha0, self.alpha1),
            Shape::Custom(p) => p.one_minus_phi(x),
        }
    }

    /// `phi(1 - s)`.
    pub fn phi_near_one(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if s >= 1.0 {
            return 1.0;
        }
        match &self.shape {
            Shape::Beta { .. } => inc_beta(s, self.alpha1, self.alpha0),
            Shape::Custom(p) => p.phi_near_one(s),
        }
    }

    /// `D phi(x)` on the open interval.
    pub fn dphi(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x < 1.0) {
            return Err(IbtError::Domain {
                value: x,
                domain: "(0, 1)",
            });
        }
        Ok(match &self.shape {
            Shape::Beta { ln_beta } => {
                let ln = (self.alpha0 - 1.0) * x.ln() + (self.alpha1 - 1.0) * (-x).ln_1p() - ln_beta;
                -ln.exp()
            }
            Shape::Custom(p) => p.dphi(x),
        })
    }

    /// `int_0^z (1 - phi)`, closed form for the beta family.
    pub(crate) fn closed_deficit_left(&self, z: f64) -> Option<f64> {
        match self.shape {
            Shape::Beta { .. } => Some(beta_partial_mean(z, self.alpha0, self.alpha1)),
            Shape::Custom(_) => None,
        }
    }

    /// `int_0^s phi(1 - u) du`, closed form for the beta family.
    pub(crate) fn closed_deficit_right(&self, s: f64) -> Option<f64> {
        match self.shape {
            Shape::Beta { .. } => Some(beta_partial_mean(s, self.alpha1, self.alpha0)),
            Shape::Custom(_) => None,
        }
    }

    /// Ratio estimates of the contact coefficients at `x = probe`.
    pub fn verify_contact(&self, probe: f64) -> Result<ContactAudit> {
        if !(probe > 0.0 && probe <= 1e-3) {
            return Err(IbtError::invalid("probe", format!("must lie in (0, 1e-3], got {probe}")));
        }
        let left = |x: f64| self.one_minus_phi(x);
        let right = |s: f64| self.phi_near_one(s);
        let c0_est = left(probe) / probe.powf(self.alpha0);
        let c1_est = right(probe) / probe.powf(self.alpha1);
        let slope = |g: &dyn Fn(f64) -> f64| (g(probe) / g(0.5 * probe)).ln() / 2f64.ln();
        Ok(ContactAudit {
            probe,
            c0_est,
            c1_est,
            rel_err0: (c0_est - self.c0).abs() / self.c0,
            rel_err1: (c1_est - self.c1).abs() / self.c1,
            alpha0_est: slope(&left),
            alpha1_est: slope(&right),
        })
    }
}

/// `int_0^z I_t(a, b) dt`.
///
/// Below `z = 3/4` the term-wise integrated series is used, which keeps full
/// relative accuracy for tiny `z`; above it the closed form
/// `z I_z(a,b) - a/(a+b) I_z(a+1, b)` has no cancellation problem.
fn beta_partial_mean(z: f64, a: f64, b: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    if z > 0.75 {
        return z * inc_beta(z, a, b) - a / (a + b) * inc_beta(z, a + 1.0, b);
    }
    let mut term = 1.0;
    let mut sum = 1.0 / (a * (a + 1.0));
    for n in 1..4000 {
        let nf = n as f64;
        term *= (nf - b) * z / nf;
        let contrib = term / ((a + nf) * (a + nf + 1.0));
        sum += contrib;
        if contrib.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    ((a + 1.0) * z.ln() - ln_beta(a, b)).exp() * sum
}
