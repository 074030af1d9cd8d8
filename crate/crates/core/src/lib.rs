//! Euclidean geometry of transferable-utility cooperative games.
//!
//! The crate models a TU game as a worth table over coalitions (bitmasks over
//! the player set) and provides, on top of it:
//!
//! * excesses, domination, and the region decomposition of the preimputation
//!   space ([`game`]);
//! * the hyperplane normals of the coalition constraints, their Gram
//!   matrices, balanced/unbalanced collection certificates, dual bases, and
//!   an incrementally maintained Gramian ([`geometry`]);
//! * closed-form projectors onto intersections of coalition hyperplanes, in
//!   four interchangeable formulations ([`projection`]);
//! * a self-contained dense two-phase simplex used by every linear-program
//!   backed query ([`lp`]);
//! * core membership, game balancedness, the exact-coalition set, and the
//!   projection of an arbitrary preimputation onto the core via a
//!   breadth-first search over reaching collections ([`solver`]);
//! * the failure measure, least-core, Chebyshev core, and optimal
//!   reallocation ([`solutions`]);
//! * linear-utility exchange markets and the totally balanced games they
//!   generate ([`market`]).
//!
//! Every operation is a pure function over immutable values, so the whole
//! API is safe to drive from multiple threads without synchronization.
//!
//! ```
//! use coreproj::{Game, Tolerances};
//! use coreproj::solver::project_onto_core;
//!
//! // Three players, every pair worth 0.6, the grand coalition worth 1.
//! let game = Game::from_worths(3, &[
//!     (0b011, 0.6), (0b101, 0.6), (0b110, 0.6), (0b111, 1.0),
//! ])?;
//! let x = game.preimputation(vec![1.0, 0.0, 0.0])?;
//!
//! let proj = project_onto_core(&game, &x, Tolerances::default())?;
//! assert!((proj.distance - 0.54f64.sqrt()).abs() < 1e-9);
//! assert!((proj.point.coords()[0] - 0.4).abs() < 1e-9);
//! # Ok::<(), coreproj::Error>(())
//! ```

pub mod coalition;
mod dense;
pub mod game;
pub mod geometry;
pub mod lp;
pub mod market;
pub mod projection;
pub mod sample;
pub mod solutions;
pub mod solver;

pub use coalition::{Coalition, CoalitionCollection};
pub use game::{Game, GameLoad, Preimputation, SidePayment};
pub use geometry::{DualBasis, GramExtension, GramMatrix, GramState, NormalVector};
pub use lp::{LinearProgram, LpOutcome};
pub use market::Market;
pub use projection::ProjectionResult;
pub use solutions::{ChebyshevReport, FailureReport, LeastCoreReport, ReallocationItem};
pub use solver::{BalancednessReport, ReachingSearchResult};

use thiserror::Error;

/// Absolute tolerance for efficiency and zero-sum checks on payment vectors.
pub const TAU_EQ: f64 = 1e-9;
/// Absolute tolerance for "lies on the face" assertions and core membership.
pub const TAU_FACE: f64 = 1e-8;
/// Tolerance below which a Gram determinant or a Gram-Schmidt residual is
/// treated as zero (a dependent collection).
pub const TAU_RANK: f64 = 1e-9;
/// Threshold a linear-program optimum must clear for a strictly positive
/// certificate (balancing weights, unbalancedness witnesses) to be accepted.
pub const TAU_POS: f64 = 1e-9;

/// The pair of tolerances a caller may override jointly (the CLI `--tol`
/// flag maps onto both). The structural tolerances [`TAU_RANK`] and
/// [`TAU_POS`] are not part of it: they describe exact rational geometry,
/// not user data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Equality tolerance for coordinate sums (efficiency, zero-sum).
    pub eq: f64,
    /// Face-membership tolerance for excesses at projected points.
    pub face: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eq: TAU_EQ, face: TAU_FACE }
    }
}

impl Tolerances {
    /// Both tolerances set to the same value.
    pub fn uniform(tol: f64) -> Self {
        Tolerances { eq: tol, face: tol }
    }
}

/// Error type shared by the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("coalition is empty")]
    EmptyCoalition,
    #[error("coalition {0} is not proper (the grand coalition is not allowed here)")]
    GrandCoalition(String),
    #[error("coalition mask {mask:#b} does not fit a {n}-player game")]
    MaskOutOfRange { mask: u32, n: usize },
    #[error("player count {0} exceeds the supported maximum of {1}")]
    TooManyPlayers(usize, usize),
    #[error("vector length {got} does not match player count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("collection mixes coalitions from games of {0} and {1} players")]
    MixedPlayerCounts(usize, usize),
    #[error("coordinates sum to {sum}, expected {expected} (tolerance {tol})")]
    NotEfficient { sum: f64, expected: f64, tol: f64 },
    #[error("collection is empty")]
    EmptyCollection,
    #[error("coalition {0} is already in the collection")]
    DuplicateCoalition(String),
    #[error("collection is dependent{}", dependent_detail(.subset))]
    DependentCollection { subset: Vec<String> },
    #[error("malformed linear program: {0}")]
    MalformedProgram(String),
    #[error("linear program is {0} where an optimum was required")]
    NoOptimum(&'static str),
    #[error("empty core: the game is not balanced")]
    EmptyCore,
    #[error("preimputation is already in the core")]
    AlreadyInCore,
    #[error("no reaching collection found (search exhausted)")]
    SearchExhausted,
    #[error("{0} is not a preimputation of the game")]
    NotPreimputation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

fn dependent_detail(subset: &[String]) -> String {
    if subset.is_empty() {
        String::new()
    } else {
        format!(" (dependent subset: {{{}}})", subset.join("; "))
    }
}

/// Shorthand used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
