use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("structure: {0}")]
    Core(#[from] sphct_core::Error),
    #[error("constant term: {0}")]
    Cterm(#[from] sphct_cterm::CtermError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
    #[error("stage {stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<PipelineError>,
    },
}

pub type Result<T> = std::result::Result<T, PipelineError>;

impl PipelineError {
    pub fn in_stage(self, stage: &str) -> Self {
        PipelineError::Stage { stage: stage.to_string(), source: Box::new(self) }
    }
}
