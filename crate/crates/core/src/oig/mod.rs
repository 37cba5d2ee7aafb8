//! One-inclusion graphs: projection, fractional orientation, prediction.

mod graph;
mod learner;
mod orient;

pub use graph::{build_one_inclusion_graph, full_cube, project_behaviors, BehaviorSet, Edge, OneInclusionGraph};
pub use learner::{oig_predict, oig_transductive_error, transductive_error, OigLearner, OigPredictor};
pub use orient::{
    densest_subgraph_density, densest_subgraph_exhaustive, densest_subgraph_flow, integral_orientation_values,
    min_max_fractional_orientation, parity_orient, parity_orientation, FractionalOrientation, ORIENTATION_TOLERANCE,
};
