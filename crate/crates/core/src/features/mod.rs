//! Window features: sample statistics, distribution flags and counts, AR
//! coefficients and simple dynamics, concatenated into a fixed-width vector.

mod ar;
mod dynamics;
mod stats;
mod vector;

pub use ar::{fit_ar, ArFit, AR_RIDGE_JITTER};
pub use dynamics::{mean_abs_change, mean_autocorrelation};
pub use stats::{distribution_features, sample_statistics, DistributionFeatures, SampleStats};
pub use vector::{
    extract_features, FeatureConfig, FeatureFlags, FeatureVector, DEFAULT_MAX_LAG, DEFAULT_WINDOW, FIXED_FEATURES,
};
