//! Turning clusters into named activity archetypes and an instance into a
//! maturity type.

mod classify;
mod naming;
mod stats;
mod trend;

use std::fmt;

use serde::{Serialize, Serializer};

pub use classify::{classify_instance, InstanceType, DEFAULT_SUSTAINABLE_THRESHOLD};
pub use naming::{label_clusters, ArchetypeLabels};
pub use stats::{activity_composition, archetype_stats, ArchetypeStats, Composition, CompositionEntry};
pub use trend::{trend_slope, TrendFit};

/// Temporal activity profile of a group of users, in ascending order of
/// activity frequency and volume. `Variant(i)` covers clusters that do not
/// map onto the four named profiles; `i` ranks them by total activity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Archetype {
    NonRecurring,
    Sporadic,
    Frequent,
    Permanent,
    Variant(usize),
}

impl Archetype {
    pub const NAMED: [Archetype; 4] =
        [Archetype::NonRecurring, Archetype::Sporadic, Archetype::Frequent, Archetype::Permanent];

    /// Named archetype for a (many_peaks, duplicate_max) corner.
    pub fn from_corner(many_peaks: bool, duplicate_max: bool) -> Self {
        match (many_peaks, duplicate_max) {
            (false, false) => Archetype::NonRecurring,
            (false, true) => Archetype::Sporadic,
            (true, false) => Archetype::Frequent,
            (true, true) => Archetype::Permanent,
        }
    }

    pub fn is_named(self) -> bool {
        !matches!(self, Archetype::Variant(_))
    }
}

impl fmt::Display for Archetype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Archetype::NonRecurring => f.write_str("NonRecurring"),
            Archetype::Sporadic => f.write_str("Sporadic"),
            Archetype::Frequent => f.write_str("Frequent"),
            Archetype::Permanent => f.write_str("Permanent"),
            Archetype::Variant(i) => write!(f, "Variant({i})"),
        }
    }
}

impl std::str::FromStr for Archetype {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match norm.as_str() {
            "nonrecurring" => Ok(Archetype::NonRecurring),
            "sporadic" => Ok(Archetype::Sporadic),
            "frequent" => Ok(Archetype::Frequent),
            "permanent" => Ok(Archetype::Permanent),
            v if v.starts_with("variant") => v["variant".len()..]
                .parse()
                .map(Archetype::Variant)
                .map_err(|_| crate::Error::InvalidParameter(format!("bad archetype `{s}`"))),
            _ => Err(crate::Error::InvalidParameter(format!("bad archetype `{s}`"))),
        }
    }
}

impl Serialize for Archetype {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
