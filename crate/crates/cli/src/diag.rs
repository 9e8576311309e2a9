use std::fmt;
use std::path::Path;

/// A failure located in one pipeline stage and, when known, one input file
/// position.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub file: Option<String>,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl StageError {
    pub fn new(stage: &'static str, message: impl fmt::Display) -> Self {
        StageError {
            stage,
            file: None,
            line: None,
            column: None,
            message: message.to_string(),
        }
    }

    pub fn file(mut self, path: &Path) -> Self {
        self.file = Some(path.display().to_string());
        self
    }

    pub fn line(mut self, line: usize) -> Self {
        self.line = Some(line);
        self
    }

    pub fn column(mut self, column: usize) -> Self {
        self.column = Some(column);
        self
    }
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.stage)?;
        if let Some(file) = &self.file {
            write!(f, " {file}")?;
            if let Some(line) = self.line {
                write!(f, ":{line}")?;
                if let Some(column) = self.column {
                    write!(f, ":{column}")?;
                }
            }
            f.write_str(":")?;
        }
        write!(f, " {}", self.message)
    }
}

impl std::error::Error for StageError {}

pub fn warn(stage: &str, message: impl fmt::Display) {
    eprintln!("warning: [{stage}] {message}");
}
