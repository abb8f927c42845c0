pub mod error;
pub mod grid;
pub mod model;

pub use error::{Error, Result};
pub use grid::{flux_div, Field, Grid, Norm};
pub use model::{Params, State, ToyState};
pub mod diagnostics;
pub mod experiments;
pub mod oracles;
pub mod timestepper;
