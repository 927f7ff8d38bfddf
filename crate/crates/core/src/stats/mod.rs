//! Seeded permutation tests, one-way ANOVA and the F distribution.

mod anova;
mod fdist;
mod permutation;
mod seed;

pub use anova::{
    anova, f_statistic, one_way_anova, welch_anova, welch_f_statistic, AnovaMethod, AnovaResult,
    P_FLOOR,
};
pub use fdist::{beta_reg, f_cdf, f_sf, f_sf_ln};
pub use permutation::{
    permutation_pvalue, resample_statistics, PermutationConfig, ResampledStatistic,
    MAX_EXHAUSTIVE_LEN,
};
pub use seed::derive_seed;
