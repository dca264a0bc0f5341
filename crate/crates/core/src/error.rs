use thiserror::Error;

pub type Result<T> = std::result::Result<T, ModelError>;

#[derive(Debug, Error)]
pub enum ModelError {
    /// A physical parameter violates its domain (negative loss, zero
    /// coupling, ...). `field` is a dot path when the value came from a
    /// preset file.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    /// The preset or calibration document could not be parsed.
    #[error("config error{}: {reason}", fmt_path(.path))]
    Config { path: String, reason: String },

    #[error("pump power {power_w:e} W exceeds the degradation table limit of {limit_w:e} W")]
    Extrapolation { power_w: f64, limit_w: f64 },

    #[error("half maximum not bracketed within the probe range ({side} side)")]
    Unbracketed { side: &'static str },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn fmt_path(path: &str) -> String {
    if path.is_empty() {
        String::new()
    } else {
        format!(" at `{path}`")
    }
}

impl ModelError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ModelError::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        ModelError::Config {
            path: path.into(),
            reason: reason.into(),
        }
    }

    /// Stable machine-readable category, used for CLI exit reporting.
    pub fn category(&self) -> &'static str {
        match self {
            ModelError::InvalidParameter { .. } | ModelError::Config { .. } => "validation",
            ModelError::Extrapolation { .. } => "extrapolation",
            ModelError::Unbracketed { .. } => "unbracketed",
            ModelError::Csv(_) => "csv",
            ModelError::Io(_) => "io",
        }
    }

    /// Prefix the field path, so nested validation reports `molecule.mu_hz`.
    pub fn within(self, prefix: &str) -> Self {
        let join = |p: String| {
            if p.is_empty() {
                prefix.to_string()
            } else {
                format!("{prefix}.{p}")
            }
        };
        match self {
            ModelError::InvalidParameter { field, reason } => ModelError::InvalidParameter {
                field: join(field),
                reason,
            },
            ModelError::Config { path, reason } => ModelError::Config {
                path: join(path),
                reason,
            },
            other => other,
        }
    }
}

pub(crate) fn ensure(cond: bool, field: &str, reason: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(ModelError::invalid(field, reason))
    }
}

pub(crate) fn ensure_nonneg(value: f64, field: &str) -> Result<()> {
    ensure(value.is_finite() && value >= 0.0, field, "must be finite and >= 0")
}

pub(crate) fn ensure_positive(value: f64, field: &str) -> Result<()> {
    ensure(value.is_finite() && value > 0.0, field, "must be finite and > 0")
}
