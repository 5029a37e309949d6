//! Next-step forecasting: regression trees, AdaBoost.R2, training rows,
//! walk-forward evaluation and MAE.

mod adaboost;
mod metrics;
mod training;
mod tree;
mod walk;

pub use adaboost::{
    adaboost_fit, adaboost_fit_traced, adaboost_predict, weighted_median, AdaBoostModel, AdaBoostParams, BoostStage,
    StageTrace, DEFAULT_LEARNING_RATE, DEFAULT_MIN_ROWS, DEFAULT_N_ESTIMATORS, PERFECT_FIT_BETA,
};
pub use metrics::{mae, MaeTriplet};
pub use training::{build_training_set, feature_row, TrainingSet};
pub use tree::{fit_tree, FeatureMatrix, RegressionTree, TreeFitter, TreeNode, DEFAULT_MAX_DEPTH};
pub use walk::{
    walk_forward, walk_forward_pooled, EvaluationReport, SeriesEvaluation, StepPrediction, WalkForward,
    WalkForwardConfig,
};
