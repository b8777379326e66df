//! Workloads shared by the criterion benches.

use sumfree_core::{ConstraintProfile, EnumTask, Mode};

/// `(n, profile id)` pairs for the counting benches; each runs well under a
/// second serially.
pub const COUNT_WORKLOADS: &[(usize, &str)] = &[
    (40, "sf-sigma-2n1"),
    (36, "sf-34a-2n1"),
    (30, "sf-3a-2n1"),
    (30, "any-3a-n1"),
];

pub fn count_task(n: usize, id: &str, workers: usize) -> EnumTask {
    let profile = ConstraintProfile::named(id).expect("registered profile");
    EnumTask::new(n, profile, Mode::Count).workers(workers)
}
