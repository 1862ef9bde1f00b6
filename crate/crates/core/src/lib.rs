//! Exhaustive Local Optima Network (LON) extraction for small Quadratic
//! Assignment Problem instances.
//!
//! The pipeline is: generate (or parse) an instance, map every permutation to
//! the local optimum reached by best-improvement hill-climbing under the
//! pairwise-exchange move, collapse the basins into a weighted directed graph,
//! and compute basin and network statistics on it.
//!
//! ```
//! use qap_lon::{landscape, lon::LocalOptimaNetwork, metrics, QapInstance};
//!
//! let inst = QapInstance::new(vec![vec![0, 1], vec![2, 0]], vec![vec![0, 3], vec![4, 0]]).unwrap();
//! let basins = landscape::map_basins(&inst).unwrap();
//! let lon = LocalOptimaNetwork::build(&inst, &basins).unwrap();
//! let report = metrics::compute_report(&inst, &basins, &lon, 0.05);
//! assert_eq!(report.n_nodes, 1);
//! ```

pub mod error;
pub mod experiment;
pub mod format;
pub mod generate;
pub mod landscape;
pub mod lon;
pub mod metrics;
pub mod perm;
pub mod qap;
pub mod stats;

pub use error::{Error, Result};
pub use landscape::BasinMap;
pub use lon::LocalOptimaNetwork;
pub use metrics::MetricsReport;
pub use perm::{ConfigId, Permutation};
pub use qap::{InstanceMeta, QapInstance};
