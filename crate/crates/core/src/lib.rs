pub mod error;
pub mod explain;
pub mod frames;
pub mod io;
pub mod mass;
pub mod network;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use explain::{check_ci, info_content, Explainer, Impact, LogBase, SensitivityMethod};
pub use frames::{ConfigSet, Domain, Variable};
pub use io::{captain_network, parse_network, serialize_network};
pub use mass::{ballooning, DenseCommonality, MassFunction};
pub use network::{Evidence, Relation, ValuationNetwork};
