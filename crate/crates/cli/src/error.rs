use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io { file: String, message: String },
    Parse { file: String, line: usize, column: usize, message: String },
    Model { module: &'static str, error: coatfit::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Io { .. } | Self::Parse { .. } => 3,
            Self::Model { .. } => 4,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Self::Usage(message) => json!({"error": "usage", "message": message}),
            Self::Io { file, message } => json!({"error": "io", "file": file, "message": message}),
            Self::Parse { file, line, column, message } => {
                json!({"error": "parse", "file": file, "line": line, "column": column, "message": message})
            }
            Self::Model { module, error } => json!({
                "error": "domain",
                "module": module,
                "kind": kind(error),
                "message": error.to_string(),
            }),
        }
    }
}

fn kind(e: &coatfit::Error) -> &'static str {
    use coatfit::Error::*;
    match e {
        Domain(_) => "domain",
        InconsistentMeasurement(_) => "inconsistent-measurement",
        Underdetermined(_) => "underdetermined",
        Search(_) => "search",
        ScanTooCoarse { .. } => "scan-too-coarse",
        Fit(_) => "fit",
        Unbracketed(_) => "unbracketed",
        Unmeasurable(_) => "unmeasurable",
    }
}

/// Tags model errors with the module that raised them.
pub trait InModule<T> {
    fn in_module(self, module: &'static str) -> Result<T, CliError>;
}

impl<T> InModule<T> for coatfit::Result<T> {
    fn in_module(self, module: &'static str) -> Result<T, CliError> {
        self.map_err(|error| CliError::Model { module, error })
    }
}

pub fn parse_error(file: &std::path::Path, e: coatfit::description::ParseError) -> CliError {
    CliError::Parse { file: file.display().to_string(), line: e.line, column: e.column, message: e.message }
}
