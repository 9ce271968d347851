//! Two-stage planning stack: grid representations of the scene, collision
//! probability density maps built by ego-footprint convolution, and a
//! trajectory post-solver, wrapped in a closed-loop simulation harness with
//! per-scenario driving metrics.

pub mod collision;
pub mod geometry;
pub mod grid;
pub mod losses;
pub mod perturb;
pub mod predictor;
pub mod raster;
pub mod scenario;
pub mod sim;
pub mod solver;
pub mod synth;

pub use geometry::{GridFrame, Point2, Polygon, Polyline, Pose2, Trajectory, TrajectoryState};
pub use grid::SpatialTemporalGrid;
pub use scenario::{load_scenario, save_scenario, Scenario};
