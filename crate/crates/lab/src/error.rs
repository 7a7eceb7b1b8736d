use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    /// Bad flags, config keys or values.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("{module}: {source}")]
    Core {
        module: &'static str,
        #[source]
        source: carnot_core::Error,
    },

    /// Payload has no tabular form.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The run stopped early; `bundle` holds the completed part.
    #[error("{message}")]
    Truncated {
        bundle: Box<crate::bundle::ReportBundle>,
        message: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type LabResult<T> = Result<T, LabError>;

/// Tags a core error with the module that raised it.
pub trait ModuleContext<T> {
    fn module(self, module: &'static str) -> LabResult<T>;
}

impl<T> ModuleContext<T> for carnot_core::Result<T> {
    fn module(self, module: &'static str) -> LabResult<T> {
        self.map_err(|source| LabError::Core { module, source })
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorPayload {
    pub kind: &'static str,
    pub module: Option<&'static str>,
    pub message: String,
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub fn payload(&self) -> ErrorPayload {
        let (kind, module) = match self {
            LabError::Usage(_) => ("usage", None),
            LabError::Core { module, source } => (
                match source {
                    carnot_core::Error::Domain(_) => "domain",
                    carnot_core::Error::Input(_) => "input",
                    carnot_core::Error::Convergence { .. } => "convergence",
                    carnot_core::Error::Overflow => "overflow",
                    carnot_core::Error::Budget { .. } => "budget",
                    carnot_core::Error::Io(_) => "io",
                    carnot_core::Error::Json(_) => "json",
                },
                Some(*module),
            ),
            LabError::Unsupported(_) => ("unsupported", None),
            LabError::Truncated { .. } => ("budget", Some("cayley_growth")),
            LabError::Io(_) => ("io", None),
            LabError::Json(_) => ("json", None),
        };
        ErrorPayload {
            kind,
            module,
            message: self.to_string(),
        }
    }
}
