//! Stochastic decision Petri nets.
//!
//! A net whose transitions race with positive rates; a controller may switch
//! off a fixed set of controllable transitions for the whole run, and the
//! payoff is a sum of rewards attached to sets of places visited. The crate
//! computes exact values of such constant policies, compiles nets to MDPs for
//! comparison with history-aware policies, rewrites place rewards into
//! rewards on configurations for safe acyclic free-choice nets and decides
//! the policy problem by brute force or with an external SMT solver. The
//! reductions to and from Bayesian networks and from 3-SAT are included.
//!
//! Each capability has a runnable example, run with
//! `cargo run --example <name>`; see the `examples/` directory.

pub mod bayes;
pub mod bench;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod idset;
pub mod mdp;
pub mod net;
pub mod rational;
pub mod reductions;
pub mod rewrite;
pub mod semantics;
pub mod solve;

pub use error::{Error, Result};
pub use idset::IdSet;
pub use net::{Marking, NetBuilder, RewardFn, Sdpn};
pub use rational::Rational;
