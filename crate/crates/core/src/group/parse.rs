use serde::{Deserialize, Serialize};

use super::{Element, FiniteGroup, GroupSpec};
use crate::error::{Error, Result};

/// JSON form of a group model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupConfig {
    Free { rank: usize },
    Cyclic { order: usize },
    Finite { table: Vec<Vec<u32>>, gens: Vec<u32> },
    FreeProduct { factors: Vec<GroupConfig> },
    DirectWithFinite { finite: Box<GroupConfig>, base: Box<GroupConfig> },
}

impl GroupConfig {
    pub fn build(&self) -> Result<GroupSpec> {
        match self {
            GroupConfig::Free { rank } => GroupSpec::free(*rank),
            GroupConfig::Cyclic { order } => GroupSpec::cyclic(*order),
            GroupConfig::Finite { table, gens } => {
                Ok(GroupSpec::finite(FiniteGroup::new(table.clone(), gens.clone())?))
            }
            GroupConfig::FreeProduct { factors } => {
                GroupSpec::free_product(factors.iter().map(|f| f.build()).collect::<Result<_>>()?)
            }
            GroupConfig::DirectWithFinite { finite, base } => {
                GroupSpec::direct_with_finite(finite.build()?, base.build()?)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<GroupSpec> {
        let cfg: GroupConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("group spec: {e}")))?;
        cfg.build()
    }
}

fn finite_config(g: &FiniteGroup) -> GroupConfig {
    if g.is_cyclic() {
        GroupConfig::Cyclic { order: g.order() }
    } else {
        GroupConfig::Finite {
            table: g.rows(),
            gens: g.gens().to_vec(),
        }
    }
}

impl GroupSpec {
    pub fn to_config(&self) -> GroupConfig {
        match self {
            GroupSpec::Free { rank } => GroupConfig::Free { rank: *rank },
            GroupSpec::Finite(g) => finite_config(g),
            GroupSpec::FreeProduct(factors) => GroupConfig::FreeProduct {
                factors: factors
                    .iter()
                    .map(|f| match f {
                        super::Factor::Free { rank } => GroupConfig::Free { rank: *rank },
                        super::Factor::Finite(g) => finite_config(g),
                    })
                    .collect(),
            },
            GroupSpec::DirectWithFinite { finite, base } => GroupConfig::DirectWithFinite {
                finite: Box::new(finite_config(finite)),
                base: Box::new(base.to_config()),
            },
        }
    }

    /// Parses whitespace-separated generator tokens into an element.
    ///
    /// A token is a generator name (`a`, `b^-1`), optionally with a factor
    /// prefix `f<i>.` that selects names local to factor `i`, and optionally
    /// raised to an integer power (`b^2`, `a^-3`). The token `e` is the identity.
    pub fn parse_word(&self, text: &str) -> Result<Element> {
        let gens = self.generators();
        let mut x = self.identity();
        for token in text.split_whitespace() {
            if token == "e" {
                continue;
            }
            let (factor, body) = match token.strip_prefix('f').and_then(|t| t.split_once('.')) {
                Some((i, rest)) if !i.is_empty() && i.bytes().all(|b| b.is_ascii_digit()) => {
                    (Some(i.parse::<usize>().map_err(|e| Error::Config(e.to_string()))?), rest)
                }
                _ => (None, token),
            };
            let lookup = |name: &str| {
                gens.iter().position(|g| match factor {
                    Some(f) => g.factor == Some(f) && g.local == name,
                    None => g.name == name,
                })
            };
            let y = if let Some(i) = lookup(body) {
                gens[i].element.clone()
            } else {
                let (name, exp) = body
                    .split_once('^')
                    .ok_or_else(|| Error::Config(format!("unknown generator `{token}`")))?;
                let i = lookup(name)
                    .ok_or_else(|| Error::Config(format!("unknown generator `{token}`")))?;
                let k: i64 = exp
                    .parse()
                    .map_err(|_| Error::Config(format!("bad exponent in `{token}`")))?;
                self.power(&gens[i].element, k)
            };
            self.mul_assign(&mut x, &y);
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let text = r#"{"type":"direct_with_finite","finite":{"type":"cyclic","order":2},
            "base":{"type":"free_product","factors":[{"type":"cyclic","order":2},{"type":"free","rank":1}]}}"#;
        let g = GroupConfig::from_json(text).unwrap();
        let back = g.to_config().build().unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn config_errors() {
        assert!(GroupConfig::from_json(r#"{"type":"free","rank":0}"#).is_err());
        assert!(GroupConfig::from_json(r#"{"type":"moebius"}"#).is_err());
        assert!(GroupConfig::from_json(r#"{"type":"finite","table":[[0,1],[1,1]],"gens":[1]}"#).is_err());
    }

    #[test]
    fn word_syntax() {
        let g = GroupSpec::free_product(vec![
            GroupSpec::cyclic(2).unwrap(),
            GroupSpec::cyclic(4).unwrap(),
        ])
        .unwrap();
        assert_eq!(g.parse_word("a b^2").unwrap(), g.parse_word("f0.a f1.a f1.a").unwrap());
        assert_eq!(g.parse_word("b^-1").unwrap(), g.parse_word("b^3").unwrap());
        assert!(g.is_identity(&g.parse_word("e").unwrap()));
        assert!(g.parse_word("c").is_err());
        assert!(g.parse_word("b^x").is_err());
    }
}
