//! Subgroups of free groups and free products: Stallings graphs, coset
//! automata with transfer-matrix counts, quasi-convex and undistorted
//! censuses, and subsemigroup densities.

mod coset;
mod qc;
mod semigroup;
mod stallings;
mod subgroup;

pub use coset::{lifted_return_experiment, CensusRow, CosetAutomaton, PerronData, ReturnRow};
pub use qc::{qc_census, qc_prefix_count, ud_census, QcRow, UdRow};
pub use semigroup::{semigroup_density, SemigroupRow, SemigroupSlices};
pub use stallings::StallingsGraph;
pub use subgroup::{SubgroupConfig, SubgroupSpec};
