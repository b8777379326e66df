//! Sum-free subsets of `[n]` that avoid a forbidden sum.
//!
//! * [`sets`]: exact sumset arithmetic on bounded integer ranges.
//! * [`enumerate`]: the pruned backtracking engine and census harness.
//! * [`structures`]: t-special sets, sets closed under addition, and the maps
//!   between them.
//! * [`cyclic`]: symmetric complete sum-free subsets of `Z_p`.
//! * [`oracles`]: brute-force baselines and small-scale checkers.
//! * [`verify`]: the aggregate self-check run by `sumfree verify`.

pub mod bits;
pub mod cyclic;
pub mod enumerate;
pub mod error;
mod mask;
pub mod oracles;
pub mod profile;
pub mod sets;
pub mod store;
pub mod structures;
pub mod verify;

pub use cyclic::{census_scsf, PrimeParams, ZpSet};
pub use enumerate::{
    census, count_admissible, enumerate_admissible, max_admissible, CensusOptions, CensusRecord, EnumTask, MaxResult,
    Mode, VisitSummary,
};
pub use error::{Error, Result};
pub use oracles::{naive_count, stability_probe, StabilityProbe};
pub use profile::{ConstraintProfile, ForbiddenSum, Layers};
pub use sets::{
    count_forbidden_k_subsets, distance_to_extremal, extremal_interval, is_sum_free, k_fold_sumset, sigma_contains,
    sumset, ConfigCount, IntSet, Sumset,
};
pub use store::{Record, ResultsStore};
pub use structures::{ClosedSet, SpecialSet};
pub use verify::{VerifyOptions, VerifyReport};
