//! The intermittent baker's transformation `B(x, y) = (f(x), g_x(y))`.
//!
//! The fiber maps are affine contractions of `[0, 1]`:
//!
//! ```text
//! g_x(y) = phi(f(x)) y                          for x < A
//! g_x(y) = 1 - (1 - phi(f(x))) (1 - y)          for x > A
//! ```
//!
//! so the left half of the square is squeezed into the bottom strip under
//! the graph of `phi` and the right half into the top strip above it.

use serde::{Deserialize, Serialize};

use crate::error::{IbtError, Result};
use crate::factor::{build_factor, Branch, FactorMap, FactorStep, Pos};
use crate::icf::CutFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquarePoint {
    pub x: f64,
    pub y: f64,
}

impl SquarePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        for v in [x, y] {
            if !(0.0..=1.0).contains(&v) {
                return Err(IbtError::Domain {
                    value: v,
                    domain: "[0, 1]",
                });
            }
        }
        Ok(SquarePoint { x, y })
    }
}

/// Internal orbit state: `x` kept relative to its nearer endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub x: Pos,
    pub y: f64,
}

impl State {
    pub fn from_point(pt: SquarePoint) -> State {
        State {
            x: Pos::from_x(pt.x),
            y: pt.y,
        }
    }

    pub fn point(self) -> SquarePoint {
        SquarePoint {
            x: self.x.x(),
            y: self.y,
        }
    }
}

#[inline(always)]
fn fiber(st: &FactorStep, y: f64) -> f64 {
    match st.branch {
        Branch::Left => st.phi * y,
        Branch::Right => 1.0 - st.one_minus_phi * (1.0 - y),
    }
}

#[derive(Debug, Clone)]
pub struct IbtMap {
    fm: FactorMap,
}

impl IbtMap {
    pub fn new(cf: &CutFunction) -> Result<Self> {
        Ok(IbtMap {
            fm: build_factor(cf)?,
        })
    }

    pub fn from_factor(fm: FactorMap) -> Self {
        IbtMap { fm }
    }

    pub fn factor(&self) -> &FactorMap {
        &self.fm
    }

    pub fn cut_function(&self) -> &CutFunction {
        self.fm.cut_function()
    }

    #[inline]
    pub fn step_state(&self, s: State) -> Result<State> {
        let st = self.fm.step_pos(s.x)?;
        Ok(State {
            x: st.image,
            y: fiber(&st, s.y),
        })
    }

    pub fn step(&self, pt: SquarePoint) -> Result<SquarePoint> {
        Ok(self.step_state(State::from_point(pt))?.point())
    }

    /// `[pt, B(pt), ..., B^n(pt)]`. A near-cut error carries the index of the
    /// trajectory point that could not be mapped.
    pub fn iterate(&self, pt: SquarePoint, n: usize) -> Result<Vec<SquarePoint>> {
        let mut out = Vec::with_capacity(n + 1);
        let mut s = State::from_point(pt);
        out.push(pt);
        for k in 0..n {
            s = self.step_state(s).map_err(|e| e.at_step(k))?;
            out.push(s.point());
        }
        Ok(out)
    }

    /// `Df(x) * d/dy g_x(y)`.
    ///
    /// The fiber slope is the secant of the stepped map over `y = 0, 1`; `Df`
    /// comes from a direct evaluation of the cut function at `f(x)`. The
    /// result is 1 exactly in exact arithmetic.
    pub fn jacobian_det(&self, pt: SquarePoint) -> Result<f64> {
        let x = Pos::from_x(pt.x);
        let top = self.step_state(State { x, y: 1.0 })?;
        let bottom = self.step_state(State { x, y: 0.0 })?;
        let slope = top.y - bottom.y;
        Ok(self.fm.df(pt.x)? * slope)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::icf::make_beta_icf;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn map(a0: f64, a1: f64) -> IbtMap {
        IbtMap::new(&make_beta_icf(a0, a1).unwrap()).unwrap()
    }

    #[test]
    fn linear_cut_step() {
        let m = map(1.0, 1.0);
        let out = m.step(SquarePoint { x: 0.375, y: 0.5 }).unwrap();
        assert_relative_eq!(out.x, 0.5, max_relative = 1e-13);
        assert_relative_eq!(out.y, 0.25, max_relative = 1e-13);
    }

    #[test]
    fn fixed_lines() {
        for &(a0, a1) in &[(1.0, 1.0), (0.5, 2.0), (2.0, 2.0)] {
            let m = map(a0, a1);
            for &y in &[0.0, 0.1, 0.5, 0.999] {
                let l = m.step(SquarePoint { x: 0.0, y }).unwrap();
                assert_eq!(l.x, 0.0);
                assert!((l.y - y).abs() <= 1e-15);
                let r = m.step(SquarePoint { x: 1.0, y }).unwrap();
                assert_eq!(r.x, 1.0);
                assert!((r.y - y).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn iterate_reports_step_index() {
        let m = map(1.0, 1.0);
        let pt = SquarePoint { x: 0.375, y: 0.5 };
        assert_eq!(m.iterate(pt, 0).unwrap(), vec![pt]);
        let one = m.iterate(pt, 1).unwrap();
        assert_eq!(one.len(), 2);
        match m.iterate(pt, 2) {
            Err(IbtError::NearCut { step, .. }) => assert_eq!(step, 1),
            other => panic!("expected a near-cut error, got {other:?}"),
        }
    }

    #[test]
    fn period_two_trajectory() {
        let m = map(1.0, 1.0);
        let p = 2f64.sqrt() - 1.0;
        let traj = m.iterate(SquarePoint { x: p, y: 0.3 }, 2).unwrap();
        assert!((traj[1].x - (2.0 - 2f64.sqrt())).abs() < 1e-12);
        assert!((traj[2].x - p).abs() < 1e-12);
    }

    #[test]
    fn jacobian_examples() {
        assert!((map(1.0, 1.0).jacobian_det(SquarePoint { x: 0.375, y: 0.7 }).unwrap() - 1.0).abs() < 1e-12);
        assert!((map(2.0, 2.0).jacobian_det(SquarePoint { x: 0.1, y: 0.9 }).unwrap() - 1.0).abs() < 1e-10);
        assert!((map(2.0, 1.0).jacobian_det(SquarePoint { x: 0.8, y: 0.2 }).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_points_off_the_square() {
        assert!(SquarePoint::new(1.2, 0.0).is_err());
        assert!(SquarePoint::new(0.2, -0.1).is_err());
        assert!(SquarePoint::new(0.2, 0.3).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fibers_are_affine(x in 0.0f64..1.0, y1 in 0.0f64..1.0, y2 in 0.0f64..1.0, t in 0.0f64..1.0) {
            let m = map(1.5, 0.7);
            prop_assume!((x - m.factor().cut()).abs() > 1e-9);
            let g = |y: f64| m.step(SquarePoint { x, y }).unwrap().y;
            let lhs = g(t * y1 + (1.0 - t) * y2);
            let rhs = t * g(y1) + (1.0 - t) * g(y2);
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn x_image_ignores_y(x in 0.0f64..1.0, y1 in 0.0f64..1.0, y2 in 0.0f64..1.0) {
            let m = map(2.0, 0.5);
            prop_assume!((x - m.factor().cut()).abs() > 1e-9);
            let a = m.step(SquarePoint { x, y: y1 }).unwrap();
            let b = m.step(SquarePoint { x, y: y2 }).unwrap();
            prop_assert_eq!(a.x.to_bits(), b.x.to_bits());
        }
    }
}
