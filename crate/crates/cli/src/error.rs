use std::fmt;

use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    Core(cma_kernel::Error),
    Config(String),
    Input(String),
    Io(String),
    Usage(String),
}

impl From<cma_kernel::Error> for CliError {
    fn from(e: cma_kernel::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn kind(&self) -> String {
        match self {
            // Variant name of the library error, e.g. `MRequired`.
            CliError::Core(e) => {
                let d = format!("{e:?}");
                d.split(|c: char| !c.is_alphanumeric())
                    .next()
                    .unwrap_or("Core")
                    .to_string()
            }
            CliError::Config(_) => "ConfigError".into(),
            CliError::Input(_) => "InputError".into(),
            CliError::Io(_) => "IoError".into(),
            CliError::Usage(_) => "UsageError".into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Config(s) | CliError::Input(s) | CliError::Io(s) | CliError::Usage(s) => f.write_str(s),
        }
    }
}
