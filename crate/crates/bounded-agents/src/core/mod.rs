//! Domain primitives: action grids, prior beliefs, supertypes, and
//! information costs.

mod cost;
mod prior;
mod space;
mod supertype;

pub use cost::{kl_contribution, kl_divergence, regularized_reward, total_variation};
pub use prior::{PriorBelief, PriorSpec};
pub use space::ActionSpace;
pub use supertype::Supertype;
