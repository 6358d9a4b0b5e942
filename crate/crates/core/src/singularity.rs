//! AD plane-curve singularity types and their combinatorial invariants.
//!
//! Each type carries the number of local branches and the genus of the tail
//! that replaces it in a stable reduction. The delta invariant used as the
//! enumeration budget is derived from those two numbers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    A,
    D,
}

/// An `A_k` (k >= 1) or `D_k` (k >= 4) singularity.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SingularityType {
    family: Family,
    index: u32,
}

impl SingularityType {
    pub fn new(family: Family, index: u32) -> Result<Self, Error> {
        let min = match family {
            Family::A => 1,
            Family::D => 4,
        };
        if index < min {
            return Err(Error::InvalidSingularity(format!(
                "{family:?}{index}: index must be at least {min}"
            )));
        }
        Ok(Self { family, index })
    }

    pub fn a(index: u32) -> Self {
        Self::new(Family::A, index).expect("A_k needs k >= 1")
    }

    pub fn d(index: u32) -> Self {
        Self::new(Family::D, index).expect("D_k needs k >= 4")
    }

    pub fn family(self) -> Family {
        self.family
    }

    pub fn index(self) -> u32 {
        self.index
    }

    /// Number of local branches.
    pub fn branches(self) -> u32 {
        match self.family {
            Family::A if self.index.is_multiple_of(2) => 1,
            Family::A => 2,
            Family::D if self.index.is_multiple_of(2) => 3,
            Family::D => 2,
        }
    }

    /// Genus of the tail inserted by stable reduction.
    pub fn tail_genus(self) -> u32 {
        let k = self.index;
        match self.family {
            // A_{2k} and A_{2k+1} both give genus k.
            Family::A => k / 2,
            Family::D if k == 4 => 1,
            // D_{2k+4} -> k+1, D_{2k+3} -> k+1.
            Family::D if k.is_multiple_of(2) => (k - 4) / 2 + 1,
            Family::D => (k - 3) / 2 + 1,
        }
    }

    /// Genus drop: tail genus plus branches minus one.
    pub fn delta(self) -> u32 {
        self.tail_genus() + self.branches() - 1
    }

    /// `A_k` with `k <= 5`, or `D_4`.
    pub fn is_allowable(self) -> bool {
        match self.family {
            Family::A => self.index <= 5,
            Family::D => self.index == 4,
        }
    }

    /// `A_1`: realized by splicing rather than by a tail.
    pub fn is_node(self) -> bool {
        self.family == Family::A && self.index == 1
    }

    /// Whether one branch of the singularity is itself singular (a cusp).
    ///
    /// True for `A_{2k}` (the only branch) and `D_{2k+3}` (one of two).
    pub fn has_singular_branch(self) -> bool {
        match self.family {
            Family::A => self.index.is_multiple_of(2),
            Family::D => self.index % 2 == 1,
        }
    }

    /// All types with `delta <= max_delta`, A before D, increasing index.
    pub fn all_with_delta_at_most(max_delta: u32) -> Vec<Self> {
        let mut out = Vec::new();
        let mut k = 1;
        while Self::a(k).delta() <= max_delta {
            out.push(Self::a(k));
            k += 1;
        }
        let mut k = 4;
        while Self::d(k).delta() <= max_delta {
            out.push(Self::d(k));
            k += 1;
        }
        out
    }

    pub fn allowable() -> Vec<Self> {
        (1..=5)
            .map(Self::a)
            .chain(std::iter::once(Self::d(4)))
            .collect()
    }
}

impl fmt::Display for SingularityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.index)
    }
}

impl FromStr for SingularityType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::InvalidSingularity(s.to_string());
        let mut chars = s.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('D') => Family::D,
            _ => return Err(bad()),
        };
        let rest = chars.as_str().trim_start_matches('_');
        let index: u32 = rest.parse().map_err(|_| bad())?;
        Self::new(family, index)
    }
}

impl Serialize for SingularityType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SingularityType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
