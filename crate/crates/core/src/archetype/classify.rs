use serde::Serialize;

use super::{Archetype, Composition};
use crate::error::{Error, Result};

/// Default: non-Non-Recurring reply activity must reach 90% of the
/// Non-Recurring reply activity.
pub const DEFAULT_SUSTAINABLE_THRESHOLD: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum InstanceType {
    Emerging,
    Transitioning,
    Sustainable,
}

impl InstanceType {
    pub fn letter(self) -> char {
        match self {
            InstanceType::Emerging => 'E',
            InstanceType::Transitioning => 'T',
            InstanceType::Sustainable => 'S',
        }
    }
}

impl std::fmt::Display for InstanceType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

/// Emerging when more than four clusters were selected. Otherwise the reply
/// activity of Sporadic, Frequent and Permanent users is compared with
/// `threshold` times the Non-Recurring reply activity: at or above it the
/// instance is Sustainable, below it Transitioning.
///
/// Refuses with [`Error::UnnamedClusters`] when the clusters could not be
/// named.
pub fn classify_instance(k_star: usize, composition: &Composition, threshold: f64) -> Result<InstanceType> {
    if k_star > 4 {
        return Ok(InstanceType::Emerging);
    }
    if composition.entries.iter().any(|e| !e.archetype.is_named())
        || composition.get(Archetype::NonRecurring).is_none()
    {
        return Err(Error::UnnamedClusters);
    }
    let non_recurring = composition.get(Archetype::NonRecurring).map_or(0, |e| e.answers);
    let others: u64 = composition
        .entries
        .iter()
        .filter(|e| e.archetype != Archetype::NonRecurring)
        .map(|e| e.answers)
        .sum();
    if others as f64 >= threshold * non_recurring as f64 {
        Ok(InstanceType::Sustainable)
    } else {
        Ok(InstanceType::Transitioning)
    }
}
