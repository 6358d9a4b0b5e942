use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid singularity type `{0}`")]
    InvalidSingularity(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("graph has legs; operation needs a closed graph")]
    HasLegs,

    #[error("realization failed: {0}")]
    Realize(String),

    #[error("stabilization invariant violated: {0}")]
    Stabilize(String),

    #[error("resource limit exceeded: {what} (limit {limit}, reached {reached})")]
    Resource {
        what: &'static str,
        limit: usize,
        reached: usize,
    },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
