use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("element does not belong to this group: {0}")]
    GroupMismatch(String),

    #[error("invalid group specification: {0}")]
    InvalidSpec(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("{what}: cap {cap} exceeded (required {required}{})", if *.lower_bound { " or more" } else { "" })]
    CapExceeded {
        what: &'static str,
        cap: usize,
        required: usize,
        lower_bound: bool,
    },

    #[error("{what}; largest feasible n is {feasible}")]
    PartialBudget { what: String, feasible: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("element is not in the subgroup")]
    NotMember,

    #[error("coset window overflow reached at length {0}")]
    WindowOverflow(usize),

    #[error("no sign change of the denominator in (0, 1]: {0}")]
    NoRoot(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by a computational budget rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::PartialBudget { .. } | Error::WindowOverflow(_))
    }
}
