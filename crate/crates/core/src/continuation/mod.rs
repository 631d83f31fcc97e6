//! Homotopy continuation over complex polynomial systems.

pub mod deform;
pub mod epsilon;
pub mod poly;
pub mod total_degree;
pub mod tracker;

pub use deform::{deform_framework, DeformDirection, DeformOptions, DeformStep, Deformation, PinnedSystem};
pub use epsilon::{epsilon_rigidity_check, EpsilonOptions, EpsilonReport, EpsilonVerdict, Witness};
pub use poly::{MultiPoly, PolySystem, C64};
pub use total_degree::{solve_total_degree, solve_total_degree_report, SolveOptions, SolveReport};
pub use tracker::{track_path, Homotopy, Predictor, TrackResult, TrackStatus, TrackerOptions};
