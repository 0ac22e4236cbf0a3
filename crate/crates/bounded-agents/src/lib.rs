//! Simulation and calibration of heterogeneous bounded-rational agents.
//!
//! Agents choose actions from discrete grids in small economic games
//! (a supply chain allocation game, Cournot competition, a cobweb commodity
//! market, and matrix games). Each agent maximizes its utility minus an
//! information cost: `lambda` times the KL divergence between its policy and
//! a prior belief. Populations are described by supertypes, distributions
//! over `lambda`, so one shared policy network trained with clipped policy
//! gradients covers a whole spectrum of decision styles.
//!
//! The crate provides:
//!
//! * [`core`]: action grids, priors, supertypes, KL costs;
//! * [`policy`]: the shared softmax network with exact hand-written gradients;
//! * [`learner`]: rollout collection, advantage estimation, and the clipped
//!   policy-gradient update with the regularizer folded into the loss;
//! * [`envs`]: the four environments behind one `Environment` trait;
//! * [`equilibrium`]: logit quantal-response and Nash benchmarks to compare
//!   learned behavior against;
//! * [`calibration`]: fitting supertype parameters to empirical decision
//!   data by grid search with repeated split-half validation, plus rank
//!   tables comparing models across environments;
//! * [`cli`]: the `train` / `simulate` / `calibrate` / `oracle` / `rank`
//!   subcommands used by the `bounded-agents` binary.
//!
//! Every stochastic path is driven by explicitly seeded ChaCha8 streams, so
//! any run can be reproduced bit for bit from its recorded seed. Start with
//! the `examples/` directory, which walks through each capability.

pub mod calibration;
pub mod checkpoint;
pub mod cli;
pub mod core;
pub mod envs;
pub mod equilibrium;
pub mod error;
pub mod learner;
pub mod policy;
pub mod report;
pub mod rng;

pub use error::{Error, Result};
