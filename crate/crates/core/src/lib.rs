//! Spatio-temporal KPI anomaly detection and next-step forecasting for
//! mobile network cells.
//!
//! The crate is organised as a pipeline:
//!
//! * [`ingest`] reads inventory, counter and speed-map CSV files, derives
//!   hourly KPIs and assembles cell × hour matrices; it also generates
//!   seeded synthetic networks.
//! * [`geo`] estimates cell coverage radius and user speed and groups cells
//!   with k-means.
//! * [`signatures`] builds hour-of-week reference profiles per cluster and
//!   flags trend deviations as anomaly events.
//! * [`features`] turns a window of samples into a fixed-width feature vector.
//! * [`forecast`] fits AdaBoost.R2 ensembles of regression trees on those
//!   vectors and evaluates one-step predictions walk-forward.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the common double-precision instantiations.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod features;
pub mod forecast;
pub mod geo;
pub mod ingest;
mod scalar;
pub mod signatures;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type KpiMatrix64 = ingest::KpiMatrix<f64>;
pub type FeatureVector64 = features::FeatureVector<f64>;
pub type AdaBoostModel64 = forecast::AdaBoostModel<f64>;
pub type RegressionTree64 = forecast::RegressionTree<f64>;
pub type ClusterPartition64 = geo::ClusterPartition<f64>;
pub type ClusterSignature64 = signatures::ClusterSignature<f64>;
pub type StepPrediction64 = forecast::StepPrediction<f64>;
pub type EvaluationReport64 = forecast::EvaluationReport<f64>;

pub type KpiMatrix32 = ingest::KpiMatrix<f32>;
pub type FeatureVector32 = features::FeatureVector<f32>;
pub type AdaBoostModel32 = forecast::AdaBoostModel<f32>;
