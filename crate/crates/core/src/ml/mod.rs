//! Feature encoding, the three MQL task kinds (k-means clustering, least
//! squares prediction, k-NN classification), the on-disk model store and
//! the statement executor.

mod error;
mod exec;
mod features;
mod kmeans;
mod knn;
mod model;
mod regression;
mod store;

pub use error::{ExecError, MlError, Result};
pub use exec::{execute_mql, validate_mql, ExecContext, Execution};
pub use features::{
    build_features, fit_tfidf, tokenize, ColumnEncoder, Encoding, FeatureEncoder, FeatureMatrix, Provenance,
    MIN_TERM_FREQUENCY, ONE_HOT_LIMIT, PROSE_MIN_WORDS,
};
pub use kmeans::{kmeans, nearest_centroid, Clustering, CONVERGENCE_SHIFT, MAX_ITERATIONS, RESTARTS};
pub use knn::{KnnModel, DEFAULT_K};
pub use model::{
    apply_model, clustering_result, gate_accuracy, holdout_split, resolve_algorithm, train_classifier, train_clusterer,
    train_predictor, AlgorithmInfo, MlResult, ModelParams, TaskKind, TrainedModel, TrainingMeta, ALGORITHMS,
    MODEL_FORMAT_VERSION,
};
pub use regression::{fit_ols, normal_equation_residual, r_squared, LinearModel, RIDGE_JITTER};
pub use store::{validate_model_name, ModelStore, MODEL_FILE_SUFFIX};

/// Runs k-means by algorithm name. Only `KMeans` is registered.
pub fn run_cluster(features: &FeatureMatrix, k: usize, algorithm: &str, seed: u64) -> Result<Clustering> {
    resolve_algorithm(TaskKind::Cluster, Some(algorithm))?;
    kmeans(features, k, seed)
}
