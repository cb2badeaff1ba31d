use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("bad CSV header: expected `user_id,timestamp,kind`, found `{0}`")]
    CsvHeader(String),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("no events")]
    NoEvents,

    #[error("invalid window: {0}")]
    Window(String),

    #[error("k exceeds distinct points (k = {k}, distinct = {distinct})")]
    TooFewDistinctPoints { k: usize, distinct: usize },

    #[error("silhouette undefined for k=1")]
    SilhouetteUndefined,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("unnamed clusters")]
    UnnamedClusters,

    #[error("invalid synthetic spec: {field}: {message}")]
    Spec { field: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
