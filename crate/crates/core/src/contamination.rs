//! Corrupting an observed configuration: pinning a random fraction of spins
//! to `+1`, or flipping their signs.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SpinConfiguration;
use crate::rng::{self, domain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContaminationKind {
    PinPlus,
    Flip,
}

impl ContaminationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ContaminationKind::PinPlus => "pin_plus",
            ContaminationKind::Flip => "flip",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContaminationScheme {
    pub kind: ContaminationKind,
    pub fraction: f64,
    #[serde(default)]
    pub seed: u64,
}

impl ContaminationScheme {
    pub fn new(kind: ContaminationKind, fraction: f64, seed: u64) -> Result<Self> {
        let scheme = Self {
            kind,
            fraction,
            seed,
        };
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.fraction) {
            return Err(Error::InvalidSpec(format!(
                "contamination fraction {} is outside [0, 1]",
                self.fraction
            )));
        }
        Ok(())
    }

    /// Number of entries touched in a configuration of length `n`.
    pub fn count(&self, n: usize) -> usize {
        ((self.fraction * n as f64).floor() as usize).min(n)
    }
}

impl fmt::Display for ContaminationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.as_str(), self.fraction)
    }
}

/// Parses `pin_plus:0.2` or `flip:0.05` (seed 0).
impl FromStr for ContaminationScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, fraction) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidSpec(format!("expected kind:fraction, got {s:?}")))?;
        let kind = match kind.trim() {
            "pin_plus" => ContaminationKind::PinPlus,
            "flip" => ContaminationKind::Flip,
            other => {
                return Err(Error::InvalidSpec(format!(
                    "unknown contamination kind {other:?} (pin_plus or flip)"
                )))
            }
        };
        let fraction: f64 = fraction
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("bad contamination fraction {fraction:?}")))?;
        Self::new(kind, fraction, 0)
    }
}

/// Applies `scheme` to a copy of `x`: `floor(fraction * n)` distinct indices
/// are drawn uniformly from the scheme's seed and pinned or flipped.
pub fn contaminate(
    x: &SpinConfiguration,
    scheme: &ContaminationScheme,
) -> Result<SpinConfiguration> {
    scheme.validate()?;
    let mut rng = rng::stream(scheme.seed, domain::CONTAMINATION, 0);
    Ok(apply(x, scheme, &mut rng))
}

pub(crate) fn apply(
    x: &SpinConfiguration,
    scheme: &ContaminationScheme,
    rng: &mut rng::StreamRng,
) -> SpinConfiguration {
    let n = x.len();
    let k = scheme.count(n);
    let mut out = x.clone();
    if k == 0 {
        return out;
    }
    let spins = out.spins_mut();
    for i in index::sample(rng, n, k).into_iter() {
        match scheme.kind {
            ContaminationKind::PinPlus => spins[i] = 1,
            ContaminationKind::Flip => spins[i] = -spins[i],
        }
    }
    out
}
