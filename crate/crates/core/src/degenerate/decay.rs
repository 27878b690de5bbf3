use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Element, Factor, GroupSpec};
use crate::measure::FinMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingRow {
    pub n: usize,
    /// Euclidean distance between μ^{*n} and the uniform measure.
    pub distance: f64,
}

/// Least-squares fit of log d(n) = log c + n log ρ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub n_lo: usize,
    pub n_hi: usize,
    pub rho: f64,
    pub c: f64,
    /// c₀ with ρ = 1 − (1 − c₀)η.
    pub c0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingDecay {
    /// 1 − μ(e).
    pub eta: f64,
    pub rows: Vec<MixingRow>,
    /// First n from which the distance never increases.
    pub monotone_from: usize,
}

impl MixingDecay {
    /// Fit over the rows with n in [n_lo, n_hi] and positive distance; None
    /// when fewer than two such rows exist.
    pub fn fit(&self, n_lo: usize, n_hi: usize) -> Option<DecayFit> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| (n_lo..=n_hi).contains(&r.n) && r.distance > 0.0)
            .map(|r| (r.n as f64, r.distance.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        let rho = slope.exp();
        Some(DecayFit {
            n_lo,
            n_hi,
            rho,
            c: (my - slope * mx).exp(),
            c0: if self.eta > 0.0 { 1.0 - (1.0 - rho) / self.eta } else { f64::NAN },
        })
    }
}

/// d(μ^{*n}, π) for n = 0..=n_max on a finite group, by dense convolution of
/// the signed deviation μ^{*n} − π (which satisfies D_{n+1} = D_n * μ and
/// keeps full relative precision far below the rounding level of 1/|G|).
pub fn mixing_decay(measure: &FinMeasure, n_max: usize) -> Result<MixingDecay> {
    let GroupSpec::Finite(g) = measure.group() else {
        return Err(Error::Unsupported("mixing decay needs a finite group".into()));
    };
    let order = g.order();
    let atoms: Vec<(u32, f64)> = measure
        .atoms()
        .iter()
        .map(|(x, m)| match x {
            Element::Finite(i) => (*i, *m),
            _ => unreachable!("validated finite-group element"),
        })
        .collect();
    let pi = 1.0 / order as f64;
    let mut dev = vec![-pi; order];
    dev[g.identity() as usize] += 1.0;
    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        rows.push(MixingRow {
            n,
            distance: dev.iter().map(|d| d * d).sum::<f64>().sqrt(),
        });
        if n == n_max {
            break;
        }
        let mut next = vec![0.0; order];
        for (x, d) in dev.iter().enumerate() {
            if *d != 0.0 {
                for &(y, m) in &atoms {
                    next[g.mul(x as u32, y) as usize] += d * m;
                }
            }
        }
        // Rounding leaves a component along π, which never decays; remove it.
        let mean = next.iter().sum::<f64>() / order as f64;
        next.iter_mut().for_each(|d| *d -= mean);
        dev = next;
    }
    let monotone_from = (1..rows.len())
        .rev()
        .find(|&i| rows[i].distance > rows[i - 1].distance)
        .unwrap_or(0);
    Ok(MixingDecay {
        eta: 1.0 - measure.mass(&measure.group().identity()),
        rows,
        monotone_from,
    })
}

/// Virtually cyclic models with an isometric embedding of the Cayley graph in Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineModel {
    /// Z = F₁ with generator a: aᵏ ↦ k.
    Integer,
    /// Z/2 * Z/2 with reflections r₁, r₂: alternating words of length k ↦ +k
    /// when they start with r₁, −k otherwise.
    Dihedral,
}

impl LineModel {
    pub fn of(group: &GroupSpec) -> Result<Self> {
        match group {
            GroupSpec::Free { rank: 1 } => Ok(LineModel::Integer),
            GroupSpec::FreeProduct(fs)
                if fs.len() == 2 && fs.iter().all(|f| matches!(f, Factor::Finite(h) if h.order() == 2)) =>
            {
                Ok(LineModel::Dihedral)
            }
            _ => Err(Error::Unsupported("sup-norm decay needs Z or Z/2 * Z/2".into())),
        }
    }

    pub fn position(self, group: &GroupSpec, x: &Element) -> i64 {
        let word = group.geodesic_word(x);
        match self {
            LineModel::Integer => word.iter().map(|&i| if i == 0 { 1 } else { -1 }).sum(),
            LineModel::Dihedral => match word.first() {
                None => 0,
                Some(0) => word.len() as i64,
                Some(_) => -(word.len() as i64),
            },
        }
    }

    /// Position of g·x from the position p of g and q of x.
    #[inline]
    fn step(self, p: i64, q: i64) -> i64 {
        match self {
            LineModel::Dihedral if p.rem_euclid(2) == 1 => p - q,
            _ => p + q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupNormRow {
    pub n: usize,
    pub sup: f64,
    pub sqrt_n_sup: f64,
    /// √(ηn)·sup μ^{*n}.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupNormDecay {
    pub model: LineModel,
    /// 1 − μ(e).
    pub eta: f64,
    /// μ(e) ≥ 1/2.
    pub lazy: bool,
    /// The support generates an infinite subgroup.
    pub infinite: bool,
    pub rows: Vec<SupNormRow>,
    pub notes: Vec<String>,
}

/// √(ηn)·sup_g μ^{*n}(g) at the requested n, by exact convolution on the line.
/// Violated hypotheses (μ(e) < 1/2, finite generated subgroup) are noted,
/// and the table is still computed.
pub fn vc_supnorm_decay(measure: &FinMeasure, n_values: &[usize]) -> Result<SupNormDecay> {
    let group = measure.group();
    let model = LineModel::of(group)?;
    let atoms: Vec<(i64, f64)> = measure.atoms().iter().map(|(x, m)| (model.position(group, x), *m)).collect();
    let reach = atoms.iter().map(|(q, _)| q.unsigned_abs()).max().unwrap_or(0) as i64;
    let mass_e = measure.mass(&group.identity());
    let eta = 1.0 - mass_e;
    let lazy = mass_e >= 0.5 - 1e-12;
    let infinite = match model {
        LineModel::Integer => atoms.iter().any(|(q, _)| *q != 0),
        LineModel::Dihedral => {
            let odd: std::collections::BTreeSet<i64> = atoms.iter().map(|a| a.0).filter(|q| q.rem_euclid(2) == 1).collect();
            atoms.iter().any(|(q, _)| *q != 0 && q.rem_euclid(2) == 0) || odd.len() >= 2
        }
    };
    let mut notes = Vec::new();
    if !lazy {
        notes.push(format!("μ(e) = {mass_e} < 1/2: laziness hypothesis violated"));
    }
    if !infinite {
        notes.push("the support generates a finite subgroup: the normalized column is unbounded".into());
    }

    let mut wanted: Vec<usize> = n_values.to_vec();
    wanted.sort_unstable();
    wanted.dedup();
    let n_max = wanted.last().copied().unwrap_or(0);
    let offset = reach * n_max as i64;
    let width = (2 * offset + 1) as usize;
    let mut cur = vec![0.0; width];
    cur[offset as usize] = 1.0;
    let (mut lo, mut hi) = (offset, offset);
    let mut rows = Vec::with_capacity(wanted.len());
    let mut next_wanted = wanted.iter().peekable();
    for n in 0..=n_max {
        if next_wanted.peek() == Some(&&n) {
            next_wanted.next();
            let sup = cur[lo as usize..=hi as usize].iter().copied().fold(0.0, f64::max);
            rows.push(SupNormRow {
                n,
                sup,
                sqrt_n_sup: (n as f64).sqrt() * sup,
                normalized: (eta * n as f64).sqrt() * sup,
            });
        }
        if n == n_max {
            break;
        }
        let mut next = vec![0.0; width];
        for i in lo..=hi {
            let m = cur[i as usize];
            if m == 0.0 {
                continue;
            }
            let p = i - offset;
            for &(q, w) in &atoms {
                next[(model.step(p, q) + offset) as usize] += m * w;
            }
        }
        cur = next;
        lo = (lo - reach).max(0);
        hi = (hi + reach).min(width as i64 - 1);
    }
    Ok(SupNormDecay {
        model,
        eta,
        lazy,
        infinite,
        rows,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z4_lazy(eta: f64) -> FinMeasure {
        let g = GroupSpec::cyclic(4).unwrap();
        FinMeasure::new(
            g.clone(),
            vec![
                (Element::Finite(0), 1.0 - eta),
                (Element::Finite(1), eta / 2.0),
                (Element::Finite(3), eta / 2.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn z4_decay_matches_fourier() {
        for eta in [0.1, 0.2] {
            let d = mixing_decay(&z4_lazy(eta), 200).unwrap();
            // Fourier: D_n has coefficients (1−η)ⁿ on the characters ±1 and (1−2η)ⁿ on -1.
            for r in &d.rows {
                let a = (1.0 - eta).powi(r.n as i32);
                let b = (1.0 - 2.0 * eta).powi(r.n as i32);
                let exact = (2.0 * a * a / 4.0 + b * b / 4.0).sqrt();
                assert!((r.distance - exact).abs() <= 1e-10 * exact, "n={}", r.n);
            }
            let fit = d.fit(20, 200).unwrap();
            assert!(fit.rho <= 1.0 - 0.5 * eta);
            assert!((fit.rho - (1.0 - eta)).abs() < 1e-3);
            assert_eq!(d.monotone_from, 0);
        }
    }

    #[test]
    fn uniform_and_half_measures() {
        let g = GroupSpec::cyclic(4).unwrap();
        let pi = FinMeasure::new(g.clone(), (0..4).map(|i| (Element::Finite(i), 0.25)).collect()).unwrap();
        assert!(mixing_decay(&pi, 10).unwrap().rows[1..].iter().all(|r| r.distance == 0.0));
        let z2 = GroupSpec::cyclic(2).unwrap();
        let half = FinMeasure::new(z2, vec![(Element::Finite(0), 0.5), (Element::Finite(1), 0.5)]).unwrap();
        assert_eq!(mixing_decay(&half, 3).unwrap().rows[1].distance, 0.0);
        assert!(mixing_decay(&crate::measure::simple_random_walk(&GroupSpec::free(2).unwrap()), 3).is_err());
    }

    #[test]
    fn lazy_walk_on_z() {
        let g = GroupSpec::free(1).unwrap();
        let mu = FinMeasure::new(
            g.clone(),
            vec![(g.identity(), 0.5), (g.parse_word("a").unwrap(), 0.25), (g.parse_word("a^-1").unwrap(), 0.25)],
        )
        .unwrap();
        let d = vc_supnorm_decay(&mu, &[100, 1000, 4000]).unwrap();
        assert!(d.lazy && d.infinite && d.notes.is_empty());
        for r in &d.rows {
            assert!((0.53..=0.60).contains(&r.sqrt_n_sup), "{r:?}");
        }
        // Local limit: √n sup → 1/√π.
        let last = d.rows.last().unwrap().sqrt_n_sup;
        assert!((last - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn point_mass_is_flagged() {
        let g = GroupSpec::free(1).unwrap();
        let d = vc_supnorm_decay(&FinMeasure::point(&g, g.identity()).unwrap(), &[1, 100]).unwrap();
        assert!(!d.infinite && d.lazy);
        assert_eq!(d.rows[1].sup, 1.0);
        assert_eq!(d.rows[1].sqrt_n_sup, 10.0);
        assert_eq!(d.notes.len(), 1);
    }

    #[test]
    fn infinite_dihedral() {
        let g = GroupSpec::free_product(vec![GroupSpec::cyclic(2).unwrap(), GroupSpec::cyclic(2).unwrap()]).unwrap();
        let model = LineModel::of(&g).unwrap();
        for w in ["a", "b", "a b", "b a", "a b a b a"] {
            let x = g.parse_word(w).unwrap();
            for s in ["a", "b"] {
                let y = g.parse_word(s).unwrap();
                let p = model.position(&g, &x);
                assert_eq!(model.step(p, model.position(&g, &y)), model.position(&g, &g.mul(&x, &y).unwrap()));
            }
        }
        let mu = FinMeasure::new(
            g.clone(),
            vec![(g.identity(), 0.5), (g.parse_word("a").unwrap(), 0.25), (g.parse_word("b").unwrap(), 0.25)],
        )
        .unwrap();
        let d = vc_supnorm_decay(&mu, &[100, 1000, 3000]).unwrap();
        assert!(d.infinite);
        assert!(d.rows.iter().all(|r| r.sqrt_n_sup <= 1.2));
        let single = FinMeasure::new(g.clone(), vec![(g.identity(), 0.5), (g.parse_word("a").unwrap(), 0.5)]).unwrap();
        assert!(!vc_supnorm_decay(&single, &[4]).unwrap().infinite);
    }
}
