use serde::{Deserialize, Serialize};

use super::{AsymptoticEstimate, EstimateRow, Method};
use crate::error::{Error, Result};
use crate::measure::FinMeasure;

/// H and L of μ^{*n} with their per-step rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionRow {
    pub n: usize,
    pub support: usize,
    pub entropy: f64,
    pub moment: f64,
    /// H_n / n, an upper bound for h by subadditivity.
    pub entropy_rate: f64,
    /// ΔH_n = H_n - H_{n-1}.
    pub entropy_increment: f64,
    /// ΔL_n = L_n - L_{n-1}.
    pub moment_increment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionSeries {
    pub rows: Vec<ConvolutionRow>,
    /// Why the series stopped before the requested length, if it did.
    pub stopped: Option<String>,
}

impl ConvolutionSeries {
    pub fn last(&self) -> Option<&ConvolutionRow> {
        self.rows.last()
    }

    /// Largest n reached.
    pub fn feasible_n(&self) -> usize {
        self.rows.last().map_or(0, |r| r.n)
    }
}

/// Rows for n = 1..=n_max, stopping early (without error) when the support cap is hit.
pub fn convolution_series(measure: &FinMeasure, n_max: usize, cap: usize) -> ConvolutionSeries {
    let (stats, err) = measure.power_stats(n_max, cap);
    let mut rows = Vec::with_capacity(stats.len());
    let (mut h_prev, mut l_prev) = (0.0, 0.0);
    for s in stats {
        rows.push(ConvolutionRow {
            n: s.n,
            support: s.support,
            entropy: s.entropy,
            moment: s.moment,
            entropy_rate: s.entropy / s.n as f64,
            entropy_increment: s.entropy - h_prev,
            moment_increment: s.moment - l_prev,
        });
        h_prev = s.entropy;
        l_prev = s.moment;
    }
    ConvolutionSeries {
        rows,
        stopped: err.map(|e| e.to_string()),
    }
}

/// Both convolution entropy sequences; the headline is the increment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    /// ΔH_{n_max}, with the last change of ΔH_n as its uncertainty.
    pub increment: AsymptoticEstimate,
    /// H_{n_max}/n_max.
    pub upper: AsymptoticEstimate,
    pub rows: Vec<ConvolutionRow>,
}

fn sequence_estimate(rows: &[ConvolutionRow], method: Method, pick: fn(&ConvolutionRow) -> f64) -> AsymptoticEstimate {
    let table: Vec<EstimateRow> = rows
        .iter()
        .enumerate()
        .map(|(k, r)| EstimateRow {
            n: r.n,
            value: pick(r),
            std_error: if k == 0 { 0.0 } else { (pick(r) - pick(&rows[k - 1])).abs() },
        })
        .collect();
    let last = table.last().copied().unwrap_or(EstimateRow {
        n: 0,
        value: 0.0,
        std_error: 0.0,
    });
    AsymptoticEstimate {
        value: last.value,
        std_error: last.std_error,
        method,
        table,
    }
}

/// Entropy from exact convolutions up to `n_max`. Fails if the support cap
/// stops the sequence early; the error names the largest feasible n.
pub fn estimate_entropy(measure: &FinMeasure, n_max: usize, cap: usize) -> Result<EntropyEstimate> {
    if n_max == 0 {
        return Err(Error::Config("n_max must be positive".into()));
    }
    let series = convolution_series(measure, n_max, cap);
    if let Some(why) = &series.stopped {
        return Err(Error::PartialBudget {
            what: why.clone(),
            feasible: series.feasible_n(),
        });
    }
    Ok(entropy_from_series(&series))
}

pub(crate) fn entropy_from_series(series: &ConvolutionSeries) -> EntropyEstimate {
    EntropyEstimate {
        increment: sequence_estimate(&series.rows, Method::ConvolutionIncrement, |r| r.entropy_increment),
        upper: sequence_estimate(&series.rows, Method::ConvolutionUpper, |r| r.entropy_rate),
        rows: series.rows.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use crate::measure::{critical_product, simple_random_walk};
    use crate::series::group_series;

    /// ΔH_n of the simple random walk on F₂, from an independent exact computation.
    const F2_SRW_INCREMENTS: [f64; 12] = [
        1.3862944, 1.0397208, 0.8815323, 0.7938334, 0.7378849, 0.7002681, 0.6733426, 0.6535789,
        0.6385041, 0.6268255, 0.6175286, 0.6100450,
    ];

    #[test]
    fn free_group_srw_increments() {
        let m = simple_random_walk(&GroupSpec::free(2).unwrap());
        let e = estimate_entropy(&m, 9, 1_000_000).unwrap();
        for (row, want) in e.rows.iter().zip(F2_SRW_INCREMENTS) {
            assert!((row.entropy_increment - want).abs() < 1e-6, "n={}", row.n);
        }
        assert_eq!(e.increment.method, Method::ConvolutionIncrement);
        for w in e.rows.windows(2) {
            assert!(w[1].entropy_increment <= w[0].entropy_increment + 1e-9);
            assert!(w[1].entropy_increment <= w[1].entropy_rate + 1e-9);
        }
    }

    #[test]
    fn point_mass_has_zero_entropy() {
        let z = GroupSpec::free(1).unwrap();
        let m = FinMeasure::point(&z, z.parse_word("a").unwrap()).unwrap();
        let e = estimate_entropy(&m, 6, 100).unwrap();
        assert!(e.rows.iter().all(|r| r.entropy == 0.0 && r.entropy_increment == 0.0));
    }

    #[test]
    fn critical_product_entropy_is_v_times_moment() {
        let g = GroupSpec::free_product(vec![
            GroupSpec::cyclic(2).unwrap(),
            GroupSpec::cyclic(4).unwrap(),
        ])
        .unwrap();
        let v = group_series(&g).growth_rate().unwrap().v;
        let m = critical_product(&g).unwrap();
        let e = estimate_entropy(&m, 8, 1_000_000).unwrap();
        let last = e.rows.last().unwrap();
        assert!((last.entropy_increment - v * last.moment_increment).abs() < 1e-6);
    }

    #[test]
    fn cap_reports_feasible_n() {
        let m = simple_random_walk(&GroupSpec::free(2).unwrap());
        match estimate_entropy(&m, 10, 1000) {
            Err(Error::PartialBudget { feasible, .. }) => assert_eq!(feasible, 5),
            other => panic!("{other:?}"),
        }
    }
}
