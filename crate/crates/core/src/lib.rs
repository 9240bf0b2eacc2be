//! Exact solver for minimum competitive equilibria in unit-demand markets
//! where every buyer/item pair carries a hard payment cap.
//!
//! The crate is organised bottom-up:
//!
//! * [`rational`] — arbitrary-precision rationals extended with two infinities;
//!   every price, value and utility in the crate is one of these.
//! * [`model`] — market instances: utility families (quasi-linear, return-on-
//!   investment, ranked), per-pair parameters, reserve prices, dummy buyers.
//! * [`bipartite`] — matchings, critical (most-demanded) sets, and the
//!   two-stage matching used to read off a final assignment.
//! * [`demand`] — demand graphs at a price vector and the reduced/final graphs
//!   derived from them.
//! * [`raise`] — the price-increase subroutine: raises one over-demanded
//!   component to the next structural event, plus the capped variant and the
//!   epsilon-lift that realises strict ("plus") prices.
//! * [`solver`] — the ascending-price solver itself.
//! * [`verify`] — independent equilibrium and stability checkers.
//! * [`oracle`] — brute-force grid/subset oracles used to cross-check the
//!   solver on small inputs.
//! * [`mechanism`] — the direct-revelation mechanism wrapper and a
//!   best-response probe for strategic analysis.

pub mod bipartite;
pub mod demand;
pub mod mechanism;
#[cfg(test)]
pub(crate) mod testkit;
pub mod model;
pub mod oracle;
pub mod raise;
pub mod rational;
pub mod solver;
pub mod verify;

pub use model::{Family, Instance, PairParams};
pub use rational::ExtendedRational;
pub use solver::{algmin, solve_with_trace, Outcome, PricePlus, SolveResult};
