use thiserror::Error;

use crate::regression::TrafficEstimate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Tag errors with the pipeline stage that produced them.
pub(crate) trait StageContext<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageContext<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| Error::Stage {
            stage,
            source: Box::new(e),
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid binning: {0}")]
    Binning(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("invalid measurement data: {0}")]
    Measurement(String),

    #[error("mixed serving cells: expected `{expected}`, found `{found}`")]
    MixedServing { expected: String, found: String },

    #[error("drive-test record {index} has no reading for serving cell `{serving}`")]
    MissingServing { index: usize, serving: String },

    #[error("no DT records: {0}")]
    NoDtRecords(String),

    #[error("K={k} exceeds the number of points M={m}")]
    TooManyClusters { k: usize, m: usize },

    #[error("clustering: {0}")]
    Clustering(String),

    #[error("no common neighboring cells between MMRs and DT data")]
    NoCommonNeighbors,

    #[error("design matrix is rank deficient (pivot {pivot:.3e} in column {column})")]
    RankDeficient { column: usize, pivot: f64 },

    #[error("no cluster center qualified to enter the regression model")]
    NoVariableEntered { fallback: Box<TrafficEstimate> },

    #[error("regression: {0}")]
    Regression(String),

    #[error("fusion: {0}")]
    Fusion(String),

    #[error("icdm: {0}")]
    Icdm(String),

    #[error("stage `{stage}`: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown pipeline `{0}`")]
    UnknownPipeline(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
