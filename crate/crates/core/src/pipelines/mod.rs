//! End-to-end vectorized workloads built only from the public array
//! operations: coordinate grids, polynomial evaluation strategies, finite
//! differences and camera projection.

mod camera;
mod diff;
mod evaluate;
mod grid;

pub use camera::project_points;
pub use diff::{central_diff, forward_diff};
pub use evaluate::{evaluate_f, Strategy};
pub use grid::{distance_grid, grid_range, mgrid, ogrid, GridMethod, GridReport};
