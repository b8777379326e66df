//! Constraint profiles: which sums a set `A ⊆ [n]` must avoid.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{is_sum_free, k_fold_sumset, sigma_contains, IntSet};

/// The forbidden value as a function of `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ForbiddenSum {
    TwoNPlusOne,
    TwoN,
    NPlusOne,
    Fixed(usize),
}

impl ForbiddenSum {
    pub fn value(self, n: usize) -> usize {
        match self {
            ForbiddenSum::TwoNPlusOne => 2 * n + 1,
            ForbiddenSum::TwoN => 2 * n,
            ForbiddenSum::NPlusOne => n + 1,
            ForbiddenSum::Fixed(v) => v,
        }
    }

    fn tag(self) -> String {
        match self {
            ForbiddenSum::TwoNPlusOne => "2n1".into(),
            ForbiddenSum::TwoN => "2n".into(),
            ForbiddenSum::NPlusOne => "n1".into(),
            ForbiddenSum::Fixed(v) => format!("v{v}"),
        }
    }
}

/// Which iterated sumsets must miss the forbidden value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Layers {
    /// All of `ΣA = ⋃_{k≥0} kA`.
    Sigma,
    /// Only the listed `kA`, each `k ≥ 3`, sorted and deduplicated.
    KSet(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstraintProfile {
    pub forbidden: ForbiddenSum,
    pub layers: Layers,
    pub require_sum_free: bool,
}

/// Frozen registry names. Census records are keyed by these strings.
pub const REGISTRY: [&str; 7] = [
    "sf-sigma-2n1",
    "sf-3a-2n1",
    "sf-34a-2n1",
    "sf-345a-2n1",
    "sf-sigma-2n",
    "any-3a-n1",
    "any-sigma-2n",
];

impl ConstraintProfile {
    pub fn sigma(forbidden: ForbiddenSum, require_sum_free: bool) -> Self {
        ConstraintProfile {
            forbidden,
            layers: Layers::Sigma,
            require_sum_free,
        }
    }

    pub fn layers(forbidden: ForbiddenSum, ks: &[usize], require_sum_free: bool) -> Result<Self> {
        let mut ks = ks.to_vec();
        ks.sort_unstable();
        ks.dedup();
        if ks.is_empty() {
            return Err(Error::InvalidProfile("empty layer list".into()));
        }
        if let Some(&k) = ks.iter().find(|&&k| k < 3) {
            return Err(Error::InvalidProfile(format!("layer k={k} must be at least 3")));
        }
        Ok(ConstraintProfile {
            forbidden,
            layers: Layers::KSet(ks),
            require_sum_free,
        })
    }

    /// Look up a registry name.
    pub fn named(id: &str) -> Result<Self> {
        use ForbiddenSum::*;
        Ok(match id {
            "sf-sigma-2n1" => Self::sigma(TwoNPlusOne, true),
            "sf-3a-2n1" => Self::layers(TwoNPlusOne, &[3], true)?,
            "sf-34a-2n1" => Self::layers(TwoNPlusOne, &[3, 4], true)?,
            "sf-345a-2n1" => Self::layers(TwoNPlusOne, &[3, 4, 5], true)?,
            "sf-sigma-2n" => Self::sigma(TwoN, true),
            "any-3a-n1" => Self::layers(NPlusOne, &[3], false)?,
            "any-sigma-2n" => Self::sigma(TwoN, false),
            other => return Err(Error::InvalidProfile(format!("unknown profile id {other:?}"))),
        })
    }

    pub fn builtins() -> Vec<(&'static str, ConstraintProfile)> {
        REGISTRY
            .iter()
            .map(|&id| (id, Self::named(id).expect("registry entries parse")))
            .collect()
    }

    /// Canonical id: the registry name when there is one, otherwise a
    /// synthesized name in the same style.
    pub fn id(&self) -> String {
        if let Some(name) = REGISTRY
            .iter()
            .find(|&&name| matches!(Self::named(name), Ok(ref p) if p == self))
        {
            return (*name).to_string();
        }
        let head = if self.require_sum_free { "sf" } else { "any" };
        let layers = match &self.layers {
            Layers::Sigma => "sigma".to_string(),
            Layers::KSet(ks) => {
                let digits: Vec<String> = ks.iter().map(|k| k.to_string()).collect();
                format!("k{}a", digits.join("."))
            }
        };
        format!("{head}-{layers}-{}", self.forbidden.tag())
    }

    /// Largest `k` named by the layers, if bounded.
    pub fn max_layer(&self) -> Option<usize> {
        match &self.layers {
            Layers::Sigma => None,
            Layers::KSet(ks) => ks.last().copied(),
        }
    }

    /// Direct check of `a ⊆ [1, n]` against the profile using the plain
    /// set operations. This is the reference the engine is tested against.
    pub fn admits(&self, a: &IntSet, n: usize) -> bool {
        if self.require_sum_free && !is_sum_free(a) {
            return false;
        }
        let target = self.forbidden.value(n);
        match &self.layers {
            Layers::Sigma => !sigma_contains(a, target),
            Layers::KSet(ks) => ks.iter().all(|&k| !k_fold_sumset(a, k, target).contains(target)),
        }
    }
}

impl fmt::Display for ConstraintProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for ConstraintProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::named(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_round_trips() {
        for (id, p) in ConstraintProfile::builtins() {
            assert_eq!(p.id(), id);
            assert_eq!(id.parse::<ConstraintProfile>().unwrap(), p);
        }
    }

    #[test]
    fn custom_ids() {
        let p = ConstraintProfile::layers(ForbiddenSum::Fixed(17), &[5, 3, 3], false).unwrap();
        assert_eq!(p.id(), "any-k3.5a-v17");
        assert_eq!(p.max_layer(), Some(5));
    }

    #[test]
    fn rejects_small_layers() {
        assert!(ConstraintProfile::layers(ForbiddenSum::TwoN, &[2, 3], true).is_err());
        assert!(ConstraintProfile::layers(ForbiddenSum::TwoN, &[], true).is_err());
        assert!("sf-nothing".parse::<ConstraintProfile>().is_err());
    }

    #[test]
    fn admits_small_cases() {
        let p = ConstraintProfile::named("sf-sigma-2n1").unwrap();
        assert!(p.admits(&IntSet::in_range(2, [2]).unwrap(), 2));
        assert!(!p.admits(&IntSet::in_range(2, [1]).unwrap(), 2));
        assert!(!p.admits(&IntSet::in_range(1, [1]).unwrap(), 1));
        assert!(p.admits(&IntSet::empty_in(1), 1));
    }
}
