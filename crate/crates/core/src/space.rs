//! Homeomorphism classes of compact countable Hausdorff spaces, represented by
//! their Cantor–Bendixson characteristic `(rank, count)`.
//!
//! `(0, 0)` is the empty space, `(0, p)` the discrete space on `p` points and
//! `(α, p)` with `α ≥ 1` the ordinal space `ω^α·p + 1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::Ordinal;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("invalid characteristic: count 0 requires rank 0, got rank {0}")]
    EmptyWithRank(String),
    #[error("census needs {needed}; class budget is {cap}")]
    BudgetExceeded { needed: String, cap: usize },
    #[error("unknown ambient descriptor {0:?}; expected finite:<n>, countable or uncountable")]
    BadDescriptor(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawChar")]
pub struct CbChar {
    rank: Ordinal,
    count: u64,
}

#[derive(Deserialize)]
struct RawChar {
    rank: Ordinal,
    count: u64,
}

impl TryFrom<RawChar> for CbChar {
    type Error = SpaceError;

    fn try_from(raw: RawChar) -> Result<Self, SpaceError> {
        CbChar::new(raw.rank, raw.count)
    }
}

impl CbChar {
    pub fn new(rank: Ordinal, count: u64) -> Result<Self, SpaceError> {
        if count == 0 && !rank.is_zero() {
            return Err(SpaceError::EmptyWithRank(rank.to_string()));
        }
        Ok(Self { rank, count })
    }

    pub fn empty() -> Self {
        Self {
            rank: Ordinal::zero(),
            count: 0,
        }
    }

    /// The `p`-point discrete space.
    pub fn finite(points: u64) -> Self {
        Self {
            rank: Ordinal::zero(),
            count: points,
        }
    }

    pub fn rank(&self) -> &Ordinal {
        &self.rank
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Characteristic of the derived set.
    pub fn derivative(&self) -> CbChar {
        self.derivative_steps(&Ordinal::one())
    }

    /// Characteristic of the `beta`-th Cantor–Bendixson derivative.
    pub fn derivative_steps(&self, beta: &Ordinal) -> CbChar {
        match beta.cmp(&self.rank) {
            std::cmp::Ordering::Less => CbChar {
                rank: self
                    .rank
                    .left_sub(beta)
                    .expect("beta < rank so the difference exists"),
                count: self.count,
            },
            std::cmp::Ordering::Equal => CbChar::finite(self.count),
            std::cmp::Ordering::Greater => CbChar::empty(),
        }
    }

    /// Characteristic of the disjoint union of representatives. Only the
    /// summands of maximal rank contribute to the count.
    pub fn union(&self, other: &CbChar) -> CbChar {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        match self.rank.cmp(&other.rank) {
            std::cmp::Ordering::Less => other.clone(),
            std::cmp::Ordering::Greater => self.clone(),
            std::cmp::Ordering::Equal => CbChar {
                rank: self.rank.clone(),
                count: self
                    .count
                    .checked_add(other.count)
                    .expect("point count overflows u64"),
            },
        }
    }

    /// Compact countable metric spaces are homeomorphic exactly when their
    /// characteristics agree.
    pub fn homeomorphic(&self, other: &CbChar) -> bool {
        self == other
    }
}

impl fmt::Display for CbChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.rank, self.count)
    }
}

/// Folds [`CbChar::union`] over any number of summands.
pub fn union_all<'a>(parts: impl IntoIterator<Item = &'a CbChar>) -> CbChar {
    parts
        .into_iter()
        .fold(CbChar::empty(), |acc, part| acc.union(part))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusBudget {
    /// Truncation of the rank enumeration; required when the rank bound is
    /// infinite.
    pub max_ranks: Option<usize>,
    /// Hard cap on the number of classes returned.
    pub max_classes: usize,
}

impl Default for CensusBudget {
    fn default() -> Self {
        Self {
            max_ranks: None,
            max_classes: 100_000,
        }
    }
}

/// Ranks below `rank_bound`, enumerated in increasing order and truncated by
/// the budget.
pub fn census_ranks(
    rank_bound: &Ordinal,
    budget: &CensusBudget,
) -> Result<Vec<Ordinal>, SpaceError> {
    let available = rank_bound.to_u64();
    let take = match (available, budget.max_ranks) {
        (Some(n), Some(cap)) => n.min(cap as u64),
        (Some(n), None) => n,
        (None, Some(cap)) => cap as u64,
        (None, None) => {
            return Err(SpaceError::BudgetExceeded {
                needed: format!("infinitely many ranks below {rank_bound}"),
                cap: budget.max_classes,
            })
        }
    };
    if take > budget.max_classes as u64 {
        return Err(SpaceError::BudgetExceeded {
            needed: format!("{take} ranks"),
            cap: budget.max_classes,
        });
    }
    // every ordinal below an infinite bound starts with the naturals
    Ok((0..take).map(Ordinal::from).collect())
}

/// All characteristics with rank below `rank_bound` and count at most
/// `count_bound`, sorted by `(rank, count)`.
pub fn census(
    rank_bound: &Ordinal,
    count_bound: u64,
    budget: &CensusBudget,
) -> Result<Vec<CbChar>, SpaceError> {
    let ranks = census_ranks(rank_bound, budget)?;
    if ranks.is_empty() {
        return Ok(Vec::new());
    }
    let needed = (ranks.len() as u128) * u128::from(count_bound) + 1;
    if needed > budget.max_classes as u128 {
        return Err(SpaceError::BudgetExceeded {
            needed: needed.to_string(),
            cap: budget.max_classes,
        });
    }
    let mut out = Vec::with_capacity(needed as usize);
    out.push(CbChar::empty());
    for rank in ranks {
        for count in 1..=count_bound {
            out.push(CbChar {
                rank: rank.clone(),
                count,
            });
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Cardinality {
    Finite { n: u64 },
    Aleph0,
    Aleph1,
}

/// The Polish ambient spaces distinguished by the class count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmbientDescriptor {
    FinitePolish(u64),
    CountablyInfinitePolish,
    UncountablePolish,
}

impl FromStr for AmbientDescriptor {
    type Err = SpaceError;

    fn from_str(s: &str) -> Result<Self, SpaceError> {
        let bad = || SpaceError::BadDescriptor(s.to_string());
        match s.trim() {
            "countable" | "aleph0" => Ok(Self::CountablyInfinitePolish),
            "uncountable" | "aleph1" => Ok(Self::UncountablePolish),
            other => other
                .strip_prefix("finite:")
                .and_then(|n| n.parse().ok())
                .map(Self::FinitePolish)
                .ok_or_else(bad),
        }
    }
}

/// Number of homeomorphism classes of compact subsets of a Polish space of the
/// given size.
pub fn class_count(ambient: AmbientDescriptor) -> Cardinality {
    match ambient {
        AmbientDescriptor::FinitePolish(n) => Cardinality::Finite { n: n + 1 },
        AmbientDescriptor::CountablyInfinitePolish => Cardinality::Aleph0,
        AmbientDescriptor::UncountablePolish => Cardinality::Aleph1,
    }
}
