//! Run settings shared by the pipelines and the verifiers: work caps, the
//! worker count and the seed used for sampled verification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::DEFAULT_CELL_CAP;
use crate::octopus::DEFAULT_ENUMERATION_BUDGET;

/// Environment variable holding cap overrides, e.g.
/// `enumeration=1000000,convolution=50000000,exhaustive=20000,samples=500`.
pub const CAPS_ENV: &str = "BSGKIT_CAPS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Candidate budget for exact octopus enumeration.
    pub enumeration: u64,
    /// Cell budget for representation-count convolutions.
    pub convolution: u64,
    /// Support tuples are all checked when there are at most this many.
    pub exhaustive: u64,
    /// Number of seeded support samples drawn above the exhaustive cap.
    pub samples: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            enumeration: DEFAULT_ENUMERATION_BUDGET,
            convolution: DEFAULT_CELL_CAP,
            exhaustive: 10_000,
            samples: 1_000,
        }
    }
}

impl Caps {
    /// Applies `key=value` overrides separated by commas.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::ConfigInvalid(format!("cap override {item:?} is not key=value")))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| Error::ConfigInvalid(format!("cap {key:?} needs a non-negative integer")))?;
            match key.trim() {
                "enumeration" => self.enumeration = value,
                "convolution" => self.convolution = value,
                "exhaustive" => self.exhaustive = value,
                "samples" => self.samples = value,
                other => return Err(Error::ConfigInvalid(format!("unknown cap {other:?}"))),
            }
        }
        if self.samples == 0 {
            return Err(Error::ConfigInvalid("samples must be positive".into()));
        }
        Ok(self)
    }

    /// Defaults overridden by [`CAPS_ENV`] when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(CAPS_ENV) {
            Ok(v) => Caps::default().with_overrides(&v),
            Err(_) => Ok(Caps::default()),
        }
    }
}

/// How dependent random choice orders its pivots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "order", rename_all = "kebab-case")]
pub enum PivotOrder {
    /// Descending degree, ties by index.
    DegreeScan,
    /// A seeded shuffle of the right side.
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Settings {
    pub caps: Caps,
    pub workers: usize,
    /// Seed for sampled support verification.
    pub seed: u64,
    pub pivots: PivotOrder,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            caps: Caps::default(),
            workers: 1,
            seed: 0,
            pivots: PivotOrder::DegreeScan,
        }
    }
}

impl Settings {
    /// Runs `f` on a dedicated pool of `workers` threads. Every parallel
    /// sweep aggregates in an order-independent way, so the worker count
    /// never changes results.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        if self.workers == 0 {
            return Err(Error::ConfigInvalid("worker count must be positive".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::ConfigInvalid(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let c = Caps::default().with_overrides("samples=7, exhaustive=3").unwrap();
        assert_eq!((c.samples, c.exhaustive), (7, 3));
        assert_eq!(c.enumeration, DEFAULT_ENUMERATION_BUDGET);
        assert!(Caps::default().with_overrides("bogus=1").is_err());
        assert!(Caps::default().with_overrides("samples=x").is_err());
        assert!(Caps::default().with_overrides("samples=0").is_err());
    }
}
