use serde::{Deserialize, Serialize};

use super::*;
use crate::group::GroupSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub word: String,
    pub mass: f64,
}

/// JSON form of a measure: an explicit atom list or a named builder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureConfig {
    Atoms {
        atoms: Vec<AtomConfig>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        symmetric: bool,
    },
    Builder(BuilderConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case", deny_unknown_fields)]
pub enum BuilderConfig {
    /// Uniform on the generating set.
    Srw,
    Point { word: String },
    UniformSet { words: Vec<String> },
    UniformBall { radius: usize },
    UniformSphere { radius: usize },
    Gibbs { s: f64, radius: usize },
    SliceUniform { p: usize },
    CriticalProduct,
    LazyMix { theta: f64, base: Box<MeasureConfig> },
    Interpolation { eps: f64, m0: Box<MeasureConfig>, m1: Box<MeasureConfig> },
}

impl MeasureConfig {
    pub fn build(&self, group: &GroupSpec, cap: usize) -> Result<FinMeasure> {
        match self {
            MeasureConfig::Atoms { atoms, symmetric } => {
                let atoms = atoms
                    .iter()
                    .map(|a| Ok((group.parse_word(&a.word)?, a.mass)))
                    .collect::<Result<Vec<_>>>()?;
                let m = FinMeasure::new(group.clone(), atoms)?;
                if *symmetric {
                    m.with_symmetric_flag()
                } else {
                    Ok(m)
                }
            }
            MeasureConfig::Builder(b) => b.build(group, cap),
        }
    }

    pub fn from_json(text: &str, group: &GroupSpec, cap: usize) -> Result<FinMeasure> {
        let cfg: MeasureConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("measure spec: {e}")))?;
        cfg.build(group, cap)
    }
}

impl BuilderConfig {
    pub fn build(&self, group: &GroupSpec, cap: usize) -> Result<FinMeasure> {
        match self {
            BuilderConfig::Srw => Ok(simple_random_walk(group)),
            BuilderConfig::Point { word } => FinMeasure::point(group, group.parse_word(word)?),
            BuilderConfig::UniformSet { words } => uniform_on_set(
                group,
                words.iter().map(|w| group.parse_word(w)).collect::<Result<_>>()?,
            ),
            BuilderConfig::UniformBall { radius } => uniform_ball(group, *radius, cap),
            BuilderConfig::UniformSphere { radius } => uniform_sphere(group, *radius, cap),
            BuilderConfig::Gibbs { s, radius } => gibbs(group, *s, *radius, cap),
            BuilderConfig::SliceUniform { p } => slice_uniform(group, *p, cap),
            BuilderConfig::CriticalProduct => critical_product(group),
            BuilderConfig::LazyMix { theta, base } => lazy_mix(&base.build(group, cap)?, *theta),
            BuilderConfig::Interpolation { eps, m0, m1 } => {
                interpolation(&m0.build(group, cap)?, &m1.build(group, cap)?, *eps)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_and_builders() {
        let g = GroupSpec::free(2).unwrap();
        let text = r#"{"atoms":[{"word":"a","mass":0.25},{"word":"a^-1","mass":0.25},
            {"word":"b","mass":0.25},{"word":"b^-1","mass":0.25}],"symmetric":true}"#;
        let m = MeasureConfig::from_json(text, &g, 100).unwrap();
        assert_eq!(m.atoms(), simple_random_walk(&g).atoms());
        assert!(m.symmetric_flag());
        let b = MeasureConfig::from_json(r#"{"builder":"uniform_ball","radius":2}"#, &g, 100).unwrap();
        assert_eq!(b.len(), 17);
        let lazy = r#"{"builder":"lazy_mix","theta":0.5,"base":{"builder":"srw"}}"#;
        assert_eq!(MeasureConfig::from_json(lazy, &g, 100).unwrap().len(), 5);
    }

    #[test]
    fn rejects_bad_totals_and_words() {
        let g = GroupSpec::free(2).unwrap();
        let bad = r#"{"atoms":[{"word":"a","mass":0.5}]}"#;
        assert!(MeasureConfig::from_json(bad, &g, 100).is_err());
        let bad = r#"{"atoms":[{"word":"q","mass":1.0}]}"#;
        assert!(MeasureConfig::from_json(bad, &g, 100).is_err());
        let asym = r#"{"atoms":[{"word":"a","mass":1.0}],"symmetric":true}"#;
        assert!(MeasureConfig::from_json(asym, &g, 100).is_err());
    }

    #[test]
    fn config_round_trip() {
        let g = GroupSpec::free(2).unwrap();
        let m = uniform_ball(&g, 1, 10).unwrap();
        let back = m.to_config().build(&g, 10).unwrap();
        assert_eq!(m, back);
    }
}
