use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use crate::group::Element;
use crate::measure::FinMeasure;

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream seed of replica `r`: splitmix64(seed ^ splitmix64(r)).
pub fn replica_seed(seed: u64, r: u64) -> u64 {
    splitmix64(seed ^ splitmix64(r))
}

/// ChaCha8 generator for replica `r`. Replicas are independent of how they
/// are scheduled, so serial and parallel runs agree.
pub fn replica_rng(seed: u64, r: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(replica_seed(seed, r))
}

/// Alias-method sampler over the atoms of a measure.
#[derive(Debug, Clone)]
pub struct AtomSampler {
    elements: Vec<Element>,
    index: WeightedAliasIndex<f64>,
}

impl AtomSampler {
    pub fn new(measure: &FinMeasure) -> Self {
        let (elements, weights): (Vec<_>, Vec<_>) = measure.atoms().iter().cloned().unzip();
        let index = WeightedAliasIndex::new(weights).expect("measure masses are positive");
        Self { elements, index }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &Element {
        &self.elements[self.index.sample(rng)]
    }

    #[inline]
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index.sample(rng)
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }
}
