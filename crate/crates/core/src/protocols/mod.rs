//! Tradeoff analyses between adequacy and fluency: PA breakdown over
//! concordant/discordant system pairs, the SPA plane with its sentinel
//! lines, and segment-level sensitivity.

mod breakdown;
mod plane;
mod sensitivity;

pub use breakdown::{pa_breakdown, pa_breakdown_means, DiscordantBreakdown, PABreakdown};
pub use plane::{
    default_grid, spa_plane, spa_plane_with_noise, LineKind, NoiseSource, SPAPlane, SPAPlanePoint,
    SentinelLine, SpaPlaneConfig, UniformNoise,
};
pub use sensitivity::{sensitivity, PairWeighting, SensitivityResult};
