//! Simulation and verification kernels for intermittent baker's
//! transformations: area-preserving skew products of the unit square whose
//! expanding factor has neutral fixed points at both ends.

pub mod baker;
pub mod error;
pub mod factor;
pub mod icf;
pub mod induced;
pub mod limits;
pub mod parallel;
pub mod quad;
pub mod special;
pub mod stable;
pub mod stats;
pub mod ulam;

/// Crate version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use baker::{IbtMap, SquarePoint, State};
pub use error::{IbtError, Result};
pub use factor::{build_factor, FactorMap, Pos};
pub use icf::{make_beta_icf, CutFunction, CutProfile};
pub use induced::{find_period_two, InducedSystem, PeriodTwoOrbit, ReturnCells, Side};
pub use limits::{predict_limit, LimitCase, LimitPrediction, Norming, Observable};
pub use parallel::Execution;
pub use stable::StableParams;
pub use ulam::{build_ulam, leading_spectrum, UlamOperator};
