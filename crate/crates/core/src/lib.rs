//! Certified bounds for the p-capacity and q-torsional rigidity of convex
//! bodies, and enclosures of the scale-invariant functional
//! `G = cap_p · T_q^r / (|Ω|^α P^β)`.

pub mod acceptance;
pub mod capacity;
pub mod error;
pub mod experiments;
pub mod functional;
pub mod geometry;
pub mod numerics;
pub mod torsion;

pub use error::{Error, Result};

pub use capacity::{cap_report, CapBoundReport, CapParams, UpperMethod};
pub use experiments::{Family, FamilySweep, ShapeSearchResult, SweepRow};
pub use functional::{g_ball_exact, g_interval, make_params, GInterval, GParams};
pub use geometry::{BodyKind, BodyMetrics, ConvexBody, PreparedBody, SteinerPolynomial};
pub use numerics::{QuadratureConfig, SearchConfig, SlopeFit};
pub use torsion::{TorsionInterval, TorsionParams};
