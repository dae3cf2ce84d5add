use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size cap exceeded for {what}: {size} > {cap} (use the matrix-free path)")]
    SizeCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("dimension overflow: {0} does not fit in usize")]
    Overflow(String),

    #[error("gamma undefined (no finite invariant region): b = 0")]
    GammaUndefined,

    #[error("lambda1 = {0} is not negative; F1 must have all eigenvalues negative")]
    NotDissipative(f64),

    #[error("stiffness: reduce T or refine manually ({0})")]
    Stiffness(String),

    #[error("instability: step bound violated ({0})")]
    Instability(String),

    #[error("F1 norm bound invalid: denominator {0} is not positive")]
    InvalidStepBound(f64),

    #[error("undefined ratio: field is identically zero")]
    UndefinedRatio,

    #[error("config: {0}")]
    Config(String),

    #[error("preset {preset}: {source}")]
    Preset {
        preset: String,
        #[source]
        source: Box<Error>,
    },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("toml: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
