//! Random walks, growth series and subgroup censuses on free groups, finite
//! groups, free products and direct products with finite groups.

pub mod census;
pub mod degenerate;
pub mod error;
pub mod group;
pub mod measure;
pub mod report;
pub mod series;
pub mod suite;
pub mod walk;

pub use error::{Error, Result};
pub use group::{Element, FiniteGroup, GroupConfig, GroupSpec};
