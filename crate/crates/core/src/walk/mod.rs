//! Random walks: Monte Carlo drift, convolution entropy, exact harmonic
//! data for nearest-neighbor walks on tree-like groups, and the
//! fundamental-inequality report.

mod drift;
mod entropy;
mod fundamental;
mod rng;
mod tree;

use serde::{Deserialize, Serialize};

pub use drift::{estimate_drift, simulate_drift, WalkConfig};
pub use entropy::{convolution_series, estimate_entropy, ConvolutionRow, ConvolutionSeries, EntropyEstimate};
pub use fundamental::{
    balls_to_v_experiment, fundamental_report, BallRow, Budgets, EntropyMethod, FundamentalReport, Verdict,
};
pub use rng::{replica_rng, replica_seed, splitmix64, AtomSampler};
pub use tree::{tree_harmonic, HarmonicEntry, TreeHarmonicData, TREE_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    MonteCarlo,
    ConvolutionUpper,
    ConvolutionIncrement,
    ExactTree,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::MonteCarlo => "monte-carlo",
            Method::ConvolutionUpper => "convolution-upper",
            Method::ConvolutionIncrement => "convolution-increment",
            Method::ExactTree => "exact-tree",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub n: usize,
    pub value: f64,
    pub std_error: f64,
}

/// Estimate of an asymptotic quantity (drift or entropy).
///
/// For Monte Carlo, `std_error` is the standard error of the mean. For the
/// deterministic convolution methods it is the change of the sequence at its
/// last step, which bounds the remaining convergence from one side; exact
/// methods report 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticEstimate {
    pub value: f64,
    pub std_error: f64,
    pub method: Method,
    pub table: Vec<EstimateRow>,
}

impl AsymptoticEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            method: Method::ExactTree,
            table: Vec::new(),
        }
    }
}
