//! Near-degenerate measures: splitting off an elementary heavy part, the
//! block-jump measure λ_ε, decay rates on finite and virtually cyclic
//! groups, and h/ℓ scans along degenerating families.

mod decay;
mod decompose;
mod lambda;
mod scan;

pub use decay::{
    mixing_decay, vc_supnorm_decay, DecayFit, LineModel, MixingDecay, MixingRow, SupNormDecay, SupNormRow,
};
pub use decompose::{classify_generated, decompose, Decomposition, SplitRule, SubgroupKind, DEFAULT_GAP};
pub use lambda::{lambda_stats, LambdaFamily, LambdaStats, TruncatedLambda, LAMBDA_DEFICIT};
pub use scan::{
    family_scan, free_product_sigma_limit, ratio_scan, Family, FamilyConfig, LimitComparison, RatioScan, ScanPoint,
};
