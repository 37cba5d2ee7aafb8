pub mod construct;
pub mod distribution;
pub mod domain;
pub mod error;
pub mod hypothesis;
pub mod learners;
pub mod rng;
pub mod stats;
pub mod flow;
pub mod oig;
pub mod unitest;
pub mod certify;
pub mod oracle;
pub mod harness;

pub use distribution::{tv_distance, DiscreteDistribution};
pub use domain::{DomainPoint, LabeledExample, Labeling, Predictor};
pub use error::{Error, Result};
pub use harness::{run_experiment, ExperimentConfig, ResultTable};
pub use hypothesis::{FiniteClass, Hypothesis, HypothesisClass};
pub use learners::Learner;
pub use rng::RandomSource;
pub use stats::Estimate;
