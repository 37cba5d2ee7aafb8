//! Hypothesis-class and distribution-family constructions.

mod row;
mod setsystem;
mod tagged;

pub use row::{binomial, build_row_class, combinations, RowClass, RowSchedule, ROW_ENUMERATION_CAP};
pub use setsystem::{
    labeling_counts, sample_labelings, sample_set_system, separation_constant, verify_balanced_containers,
    verify_set_system, wellsep_family_from_setsystem, BalanceReport, SetSystem, SetSystemClass, SetSystemReport,
    SetSystemThresholds, DEFAULT_RETRY_CAP,
};
pub use tagged::{sample_tag, tagged_family, TaggedClass};
