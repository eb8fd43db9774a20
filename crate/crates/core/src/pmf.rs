//! Discrete capacity distributions over non-negative integer levels.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::PmfError;

/// Absolute tolerance used for every probability equality check.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// Capacity level, in data-units/second for branches and compute-units/second
/// for nodes.
pub type Level = u32;

/// A probability mass function over capacity levels.
///
/// Only levels with positive probability are stored, in ascending order.
/// Zero-probability levels are accepted on input and dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf {
    entries: Vec<(Level, f64)>,
}

impl Pmf {
    /// Builds a validated pmf from `(level, probability)` pairs.
    pub fn new<I>(entries: I) -> Result<Self, PmfError>
    where
        I: IntoIterator<Item = (Level, f64)>,
    {
        let mut map = BTreeMap::new();
        for (level, prob) in entries {
            if !prob.is_finite() || !(0.0..=1.0 + PROB_TOLERANCE).contains(&prob) {
                return Err(PmfError::InvalidProbability { level, prob });
            }
            if map.insert(level, prob).is_some() {
                return Err(PmfError::DuplicateLevel(level));
            }
        }
        let sum: f64 = map.values().sum();
        if (sum - 1.0).abs() > PROB_TOLERANCE {
            return Err(PmfError::Sum(sum));
        }
        Ok(Self {
            entries: map.into_iter().filter(|&(_, p)| p > 0.0).collect(),
        })
    }

    /// Point mass at `level`.
    pub fn degenerate(level: Level) -> Self {
        Self {
            entries: vec![(level, 1.0)],
        }
    }

    /// Levels with positive probability, ascending.
    pub fn support(&self) -> impl ExactSizeIterator<Item = Level> + '_ {
        self.entries.iter().map(|&(l, _)| l)
    }

    pub fn entries(&self) -> &[(Level, f64)] {
        &self.entries
    }

    pub fn max_level(&self) -> Level {
        // Non-empty by construction: probabilities sum to one.
        self.entries.last().map(|&(l, _)| l).unwrap_or(0)
    }

    pub fn prob(&self, level: Level) -> f64 {
        self.entries
            .binary_search_by_key(&level, |&(l, _)| l)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    /// `Pr(level' >= level)`.
    pub fn survival(&self, level: Level) -> f64 {
        if level == 0 {
            return 1.0;
        }
        let start = self.entries.partition_point(|&(l, _)| l < level);
        if start == 0 {
            return 1.0;
        }
        self.entries[start..].iter().map(|&(_, p)| p).sum()
    }

    /// Cumulative probabilities aligned with [`Pmf::entries`], used for
    /// inverse-CDF sampling. The final entry is forced to exactly 1.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .entries
            .iter()
            .map(|&(_, p)| {
                acc += p;
                acc
            })
            .collect();
        if let Some(last) = out.last_mut() {
            *last = 1.0;
        }
        out
    }
}

/// `Pr(level' >= level)` for `pmf`.
pub fn survival(pmf: &Pmf, level: Level) -> f64 {
    pmf.survival(level)
}

impl Serialize for Pmf {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for (level, prob) in &self.entries {
            map.serialize_entry(&level.to_string(), prob)?;
        }
        map.end()
    }
}

/// Pmf entries exactly as written in a document, before validation.
#[derive(Debug, Clone, Default)]
pub(crate) struct RawPmf(pub(crate) Vec<(String, f64)>);

impl RawPmf {
    pub(crate) fn validate(&self) -> Result<Pmf, PmfError> {
        let entries = self
            .0
            .iter()
            .map(|(key, prob)| parse_level(key).map(|level| (level, *prob)))
            .collect::<Result<Vec<_>, _>>()?;
        Pmf::new(entries)
    }
}

impl<'de> Deserialize<'de> for RawPmf {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RawVisitor;

        impl<'de> Visitor<'de> for RawVisitor {
            type Value = RawPmf;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping integer levels to probabilities")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<RawPmf, A::Error> {
                let mut entries = Vec::new();
                while let Some(entry) = access.next_entry::<String, f64>()? {
                    entries.push(entry);
                }
                Ok(RawPmf(entries))
            }
        }

        deserializer.deserialize_map(RawVisitor)
    }
}

impl<'de> Deserialize<'de> for Pmf {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        RawPmf::deserialize(deserializer)?
            .validate()
            .map_err(de::Error::custom)
    }
}

fn parse_level(key: &str) -> Result<Level, PmfError> {
    if key.is_empty() || !key.bytes().all(|b| b.is_ascii_digit()) {
        return Err(PmfError::InvalidLevel(key.to_owned()));
    }
    key.parse()
        .map_err(|_| PmfError::InvalidLevel(key.to_owned()))
}
