use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// For a probability vector `w` and a nonnegative `f` with Σ w f = 1, checks
/// Σ w(-log f) ≥ w(A)(-log Σ_A w f) - 2/e on the index set `a`.
///
/// An atom with positive weight and f = 0 makes the left side +∞.
pub fn check_entropy_lower_bound(w: &[f64], f: &[f64], a: &[usize]) -> Result<EntropyBound> {
    if w.len() != f.len() || w.is_empty() {
        return Err(Error::InvalidMeasure("weights and function differ in length".into()));
    }
    if w.iter().chain(f).any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidMeasure("negative or non-finite input".into()));
    }
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidMeasure(format!("weights sum to {total}")));
    }
    let mean: f64 = w.iter().zip(f).map(|(w, f)| w * f).sum();
    if (mean - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidMeasure(format!("function has average {mean}")));
    }
    if a.iter().any(|&i| i >= w.len()) {
        return Err(Error::InvalidMeasure("subset index out of range".into()));
    }
    let mut a = a.to_vec();
    a.sort_unstable();
    a.dedup();

    let lhs: f64 = w
        .iter()
        .zip(f)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, f)| if *f > 0.0 { -w * f.ln() } else { f64::INFINITY })
        .sum();
    let wa: f64 = a.iter().map(|&i| w[i]).sum();
    let fa: f64 = a.iter().map(|&i| w[i] * f[i]).sum();
    let main = if wa == 0.0 {
        0.0
    } else if fa == 0.0 {
        f64::INFINITY
    } else {
        -wa * fa.ln()
    };
    let rhs = main - 2.0 / std::f64::consts::E;
    Ok(EntropyBound {
        lhs,
        rhs,
        holds: lhs == f64::INFINITY || lhs >= rhs - 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_function() {
        let b = check_entropy_lower_bound(&[0.25; 4], &[1.0; 4], &[0, 1, 2, 3]).unwrap();
        assert_eq!(b.lhs, 0.0);
        assert!((b.rhs + 2.0 / std::f64::consts::E).abs() < 1e-15);
        assert!(b.holds);
        // w(A) log(1/w(A)) peaks at 1/e, so rhs stays below 0 for every A.
        let b = check_entropy_lower_bound(&[0.25; 4], &[1.0; 4], &[0, 2]).unwrap();
        assert!((b.rhs - (0.5 * 2f64.ln() - 2.0 / std::f64::consts::E)).abs() < 1e-15);
        assert!(b.holds);
    }

    #[test]
    fn degenerate_function() {
        let b = check_entropy_lower_bound(&[0.5, 0.5], &[2.0, 0.0], &[1]).unwrap();
        assert_eq!(b.lhs, f64::INFINITY);
        assert!(b.holds);
    }

    #[test]
    fn malformed_inputs() {
        assert!(check_entropy_lower_bound(&[0.5, 0.5], &[1.0], &[]).is_err());
        assert!(check_entropy_lower_bound(&[0.5, 0.5], &[1.0, 2.0], &[]).is_err());
        assert!(check_entropy_lower_bound(&[0.5, 0.5], &[1.0, 1.0], &[2]).is_err());
    }

    proptest! {
        #[test]
        fn holds_on_random_instances(
            raw in prop::collection::vec((0.01f64..1.0, 0.001f64..10.0, any::<bool>()), 1..12)
        ) {
            let total: f64 = raw.iter().map(|r| r.0).sum();
            let w: Vec<f64> = raw.iter().map(|r| r.0 / total).collect();
            let mean: f64 = w.iter().zip(&raw).map(|(w, r)| w * r.1).sum();
            let f: Vec<f64> = raw.iter().map(|r| r.1 / mean).collect();
            let a: Vec<usize> = raw.iter().enumerate().filter(|(_, r)| r.2).map(|(i, _)| i).collect();
            let b = check_entropy_lower_bound(&w, &f, &a).unwrap();
            prop_assert!(b.holds, "{b:?}");
        }
    }
}
