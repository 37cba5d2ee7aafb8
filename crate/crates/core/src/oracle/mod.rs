//! Exact ground truth for tiny instances: optimal distribution-fixed error
//! by zero-sum game solving, and the optimal transductive value.

mod game;
mod transductive;

pub use game::{
    enumerate_deterministic_learners, expected_empirical_optimal_error, matrix_game_value, optimal_error_curve,
    optimal_fixed_error, optimal_fixed_error_by_enumeration, GameInstance, GameSolution, LearnerEnumeration,
    MixtureComponent, PureLearner, CLASS_CAP, DOMAIN_CAP, SAMPLE_CAP, SEQUENCE_CAP,
};
pub use transductive::{best_transductive_value, TRANSDUCTIVE_VERTEX_CAP};

use crate::error::{Error, Result};

pub const LEARNER_ENUMERATION_CAP: u64 = 1 << 20;
/// Slack allowed between the game value and either player's best response.
pub const NASH_TOLERANCE: f64 = 1e-6;

fn lp_solve(p: &microlp::Problem) -> Result<microlp::Solution> {
    p.solve()
        .map_err(|e| Error::Solver(format!("{e:?}")))?
        .into_solution()
        .map_err(|e| Error::Solver(format!("interrupted: {:?}", e.termination_reason())))
}
