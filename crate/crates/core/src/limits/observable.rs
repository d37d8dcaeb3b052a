//! Observables `X: [0,1]^2 -> R`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{IbtError, Result};
use crate::quad::{integrate, QuadOptions};

/// Tolerance for declaring `int X = 0`.
pub const MEAN_ZERO_TOL: f64 = 1e-6;

type CustomFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum ObservableKind {
    Constant {
        value: f64,
    },
    /// `intercept + slope x`
    LinearX {
        slope: f64,
        #[serde(default)]
        intercept: Option<f64>,
    },
    /// `intercept + slope y`
    LinearY {
        slope: f64,
        #[serde(default)]
        intercept: Option<f64>,
    },
    /// `sum_k coeffs[k] x^k`
    PolyX {
        coeffs: Vec<f64>,
    },
    /// Bilinear interpolation of `values[j * nx + i]` given at
    /// `(i / (nx - 1), j / (ny - 1))`.
    CustomGrid {
        nx: usize,
        ny: usize,
        values: Vec<f64>,
    },
    /// 1 on `[lo, hi]`, linear ramps of width `ramp` on either side, 0 beyond.
    /// Depends on `x` only.
    SmoothIndicator {
        lo: f64,
        hi: f64,
        ramp: f64,
    },
    #[serde(skip)]
    Custom(CustomFn),
}

impl fmt::Debug for ObservableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservableKind::Constant { value } => write!(f, "Constant({value})"),
            ObservableKind::LinearX { slope, intercept } => write!(f, "LinearX({slope}, {intercept:?})"),
            ObservableKind::LinearY { slope, intercept } => write!(f, "LinearY({slope}, {intercept:?})"),
            ObservableKind::PolyX { coeffs } => write!(f, "PolyX({coeffs:?})"),
            ObservableKind::CustomGrid { nx, ny, .. } => write!(f, "CustomGrid({nx}x{ny})"),
            ObservableKind::SmoothIndicator { lo, hi, ramp } => write!(f, "SmoothIndicator([{lo}, {hi}], {ramp})"),
            ObservableKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// An observable with its declared Hölder exponent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Observable {
    #[serde(flatten)]
    pub kind: ObservableKind,
    #[serde(default = "one")]
    pub gamma: f64,
}

fn one() -> f64 {
    1.0
}

impl Observable {
    pub fn new(kind: ObservableKind, gamma: f64) -> Result<Self> {
        let obs = Observable { kind, gamma };
        obs.validate()?;
        Ok(obs)
    }

    fn smooth(kind: ObservableKind) -> Self {
        Observable { kind, gamma: 1.0 }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(value: f64) -> Self {
        Self::smooth(ObservableKind::Constant { value })
    }

    /// `s (x - 1/2)`; `linear_x(-1.0)` is `1/2 - x`.
    pub fn linear_x(slope: f64) -> Self {
        Self::smooth(ObservableKind::LinearX { slope, intercept: None })
    }

    /// `s (y - 1/2)`
    pub fn linear_y(slope: f64) -> Self {
        Self::smooth(ObservableKind::LinearY { slope, intercept: None })
    }

    pub fn poly_x(coeffs: Vec<f64>) -> Self {
        Self::smooth(ObservableKind::PolyX { coeffs })
    }

    pub fn smooth_indicator(lo: f64, hi: f64, ramp: f64) -> Self {
        Self::smooth(ObservableKind::SmoothIndicator { lo, hi, ramp })
    }

    pub fn custom(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static, gamma: f64) -> Result<Self> {
        Self::new(ObservableKind::Custom(Arc::new(f)), gamma)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(IbtError::invalid("gamma", format!("must lie in (0, 1], got {}", self.gamma)));
        }
        let finite = |v: f64, name: &'static str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(IbtError::invalid(name, "must be finite"))
            }
        };
        match &self.kind {
            ObservableKind::Constant { value } => finite(*value, "value"),
            ObservableKind::LinearX { slope, intercept } | ObservableKind::LinearY { slope, intercept } => {
                finite(*slope, "slope")?;
                finite(intercept.unwrap_or(0.0), "intercept")
            }
            ObservableKind::PolyX { coeffs } => {
                if coeffs.is_empty() {
                    return Err(IbtError::invalid("coeffs", "must be nonempty"));
                }
                coeffs.iter().try_for_each(|&c| finite(c, "coeffs"))
            }
            ObservableKind::CustomGrid { nx, ny, values } => {
                if *nx < 2 || *ny < 2 {
                    return Err(IbtError::invalid("grid", format!("needs nx, ny >= 2, got {nx} x {ny}")));
                }
                if values.len() != nx * ny {
                    return Err(IbtError::invalid(
                        "values",
                        format!("expected {} entries, got {}", nx * ny, values.len()),
                    ));
                }
                values.iter().try_for_each(|&c| finite(c, "values"))
            }
            ObservableKind::SmoothIndicator { lo, hi, ramp } => {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi && *ramp > 0.0) {
                    return Err(IbtError::invalid("smooth indicator", "needs lo <= hi and ramp > 0"));
                }
                Ok(())
            }
            ObservableKind::Custom(_) => Ok(()),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match &self.kind {
            ObservableKind::Constant { value } => *value,
            ObservableKind::LinearX { slope, intercept } => intercept.unwrap_or(-0.5 * slope) + slope * x,
            ObservableKind::LinearY { slope, intercept } => intercept.unwrap_or(-0.5 * slope) + slope * y,
            ObservableKind::PolyX { coeffs } => coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c),
            ObservableKind::CustomGrid { nx, ny, values } => {
                let (u, v) = (x * (nx - 1) as f64, y * (ny - 1) as f64);
                let i = (u.floor() as usize).min(nx - 2);
                let j = (v.floor() as usize).min(ny - 2);
                let (s, t) = (u - i as f64, v - j as f64);
                let at = |ii: usize, jj: usize| values[jj * nx + ii];
                (1.0 - t) * ((1.0 - s) * at(i, j) + s * at(i + 1, j)) + t * ((1.0 - s) * at(i, j + 1) + s * at(i + 1, j + 1))
            }
            ObservableKind::SmoothIndicator { lo, hi, ramp } => {
                let d = if x < *lo {
                    lo - x
                } else if x > *hi {
                    x - hi
                } else {
                    0.0
                };
                (1.0 - d / ramp).max(0.0)
            }
            ObservableKind::Custom(f) => f(x, y),
        }
    }

    /// True when the value never depends on `y`.
    pub fn x_only(&self) -> bool {
        matches!(
            self.kind,
            ObservableKind::Constant { .. }
                | ObservableKind::LinearX { .. }
                | ObservableKind::PolyX { .. }
                | ObservableKind::SmoothIndicator { .. }
        )
    }

    /// An `x`-interval outside of which the observable vanishes, if known.
    pub fn x_support(&self) -> Option<(f64, f64)> {
        match self.kind {
            ObservableKind::SmoothIndicator { lo, hi, ramp } => Some(((lo - ramp).max(0.0), (hi + ramp).min(1.0))),
            ObservableKind::Constant { value: 0.0 } => Some((0.0, 0.0)),
            _ => None,
        }
    }

    /// `int_{[0,1]^2} X`
    pub fn integral(&self) -> Result<f64> {
        let opts = QuadOptions::new(1e-13, 1e-12);
        match &self.kind {
            ObservableKind::Constant { value } => Ok(*value),
            ObservableKind::LinearX { slope, intercept } | ObservableKind::LinearY { slope, intercept } => {
                Ok(intercept.unwrap_or(-0.5 * slope) + 0.5 * slope)
            }
            ObservableKind::PolyX { coeffs } => Ok(coeffs.iter().enumerate().map(|(k, c)| c / (k + 1) as f64).sum()),
            ObservableKind::CustomGrid { nx, ny, values } => {
                // bilinear cells integrate exactly by the trapezoid rule
                let w = |i: usize, n: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                let mut s = 0.0;
                for j in 0..*ny {
                    for i in 0..*nx {
                        s += w(i, *nx) * w(j, *ny) * values[j * nx + i];
                    }
                }
                Ok(s / ((nx - 1) * (ny - 1)) as f64)
            }
            ObservableKind::SmoothIndicator { lo, hi, ramp } => {
                let g = |t: f64| self.eval(t, 0.5);
                let (a, b) = ((lo - ramp).max(0.0), (hi + ramp).min(1.0));
                let mut s = 0.0;
                for w in [a, lo.clamp(a, b), hi.clamp(a, b), b].windows(2) {
                    s += integrate(g, w[0], w[1], opts)?;
                }
                Ok(s)
            }
            ObservableKind::Custom(_) => {
                let inner = |x: f64| integrate(|y| self.eval(x, y), 0.0, 1.0, QuadOptions::new(1e-12, 1e-11));
                let outer = |x: f64| inner(x).unwrap_or(f64::NAN);
                let v = integrate(outer, 0.0, 1.0, QuadOptions::new(1e-11, 1e-10))?;
                if v.is_nan() {
                    return Err(IbtError::numeric("observable integral", "inner quadrature failed"));
                }
                Ok(v)
            }
        }
    }

    pub fn is_mean_zero(&self) -> Result<bool> {
        Ok(self.integral()?.abs() <= MEAN_ZERO_TOL)
    }

    /// `s X`
    pub fn scaled(&self, s: f64) -> Observable {
        let kind = match &self.kind {
            ObservableKind::Constant { value } => ObservableKind::Constant { value: s * value },
            ObservableKind::LinearX { slope, intercept } => ObservableKind::LinearX {
                slope: s * slope,
                intercept: intercept.map(|c| s * c),
            },
            ObservableKind::LinearY { slope, intercept } => ObservableKind::LinearY {
                slope: s * slope,
                intercept: intercept.map(|c| s * c),
            },
            ObservableKind::PolyX { coeffs } => ObservableKind::PolyX {
                coeffs: coeffs.iter().map(|c| s * c).collect(),
            },
            ObservableKind::CustomGrid { nx, ny, values } => ObservableKind::CustomGrid {
                nx: *nx,
                ny: *ny,
                values: values.iter().map(|c| s * c).collect(),
            },
            other => {
                let inner = other.clone();
                let probe = Observable { kind: inner, gamma: self.gamma };
                ObservableKind::Custom(Arc::new(move |x, y| s * probe.eval(x, y)))
            }
        };
        Observable { kind, gamma: self.gamma }
    }
}
