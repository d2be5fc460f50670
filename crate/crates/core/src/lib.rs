//! Constructive hypergraph Balog–Szemerédi–Gowers extraction with exact
//! verification of every quantitative bound.
//!
//! ```
//! use bsgkit::{GroupSpec, Instance};
//!
//! let g = GroupSpec::integers();
//! let part: Vec<_> = (0..4).map(|x| g.embed(x)).collect();
//! let inst = Instance::complete(g, vec![part.clone(), part]).unwrap();
//! assert_eq!(inst.hypergraph().edge_count(), 16);
//! ```

pub mod drc;
pub mod error;
pub mod exact;
pub mod extraction;
pub mod generate;
pub mod group;
pub mod histogram;
pub mod hypergraph;
pub mod instance;
pub mod octopus;
pub mod oracle;
pub mod report;
pub mod settings;
pub mod sumset;

pub use error::{Error, Result};
pub use exact::Rational;
pub use extraction::{ExtractionResult, Mode, Param};
pub use generate::{gen_instance, measure_instance, Family, GenConfig, Measurement};
pub use group::{GroupElem, GroupSpec};
pub use hypergraph::{Bipartite, PartiteHypergraph};
pub use instance::Instance;
pub use octopus::Disjointness;
pub use report::{BoundReport, Inequality};
pub use settings::{Caps, PivotOrder, Settings};
pub use sumset::ElemSet;
