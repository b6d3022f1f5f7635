//! Exact computation of disjoint-occurrence counts on finite product
//! probability spaces.
//!
//! Everything here is `no_std` with `alloc`. Measures and distributions are
//! exact rationals; only the transcendental tail bounds use `f64`.
//!
//! * [`space`]: partially ordered factors, product spaces, outcomes.
//! * [`events`]: events as membership bitsets, witness sets, monotonicity,
//!   the "affects" relation and independence.
//! * [`disjoint`]: the box operator, the counts X and Z, the Bernoulli-sum
//!   comparison Y and stochastic domination.
//! * [`bounds`]: the rate function, Chernoff/Bernstein/product tail bounds and
//!   the factorial-moment verifier.
//! * [`percolation`]: terminal-pair path events under Bernoulli edge
//!   percolation, exact and Monte Carlo.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod disjoint;
mod error;
pub mod events;
mod packing;
pub mod percolation;
pub mod rational;
pub mod space;

pub use error::Error;
pub use rational::Rational;

pub type Result<T, E = Error> = core::result::Result<T, E>;
