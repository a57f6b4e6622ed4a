//! Concurrent infinite-duration games with colored transitions.
//!
//! Player 1 wins a game whose condition is closed under interleaving and prefix removal
//! exactly when she wins every one-player game derived from a delayed response of Player 2.
//! The crate decides that characterization, synthesizes finite-memory winning strategies
//! and checks the losing side statistically.

pub mod brl;
pub mod color;
pub mod conditions;
pub mod error;
pub mod format;
pub mod graph;
pub mod hull;
pub mod interleave;
pub mod model;
pub mod oracle;
pub mod responses;
pub mod semirandom;
pub mod solver1p;
pub mod solver2p;
pub mod strategy;

pub use color::Color;
pub use conditions::{CondSpec, Condition};
pub use error::{Error, Result};
pub use model::{Game, OnePlayerGame, StatelessGame, UpWord};
