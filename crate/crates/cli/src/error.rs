use quartic_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or inconsistent configuration or input file.
    Config(String),
    Io(std::io::Error),
    Core(CoreError),
    /// A reported residual exceeded its tolerance.
    Tolerance(String),
    /// At least one verification property failed.
    PropertyFailed(usize),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Tolerance(m) => write!(f, "tolerance breach: {m}"),
            CliError::PropertyFailed(n) => write!(f, "{n} propert{} failed", if *n == 1 { "y" } else { "ies" }),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Invalid(m) => CliError::Config(m),
            other => CliError::Core(other),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(format!("csv: {e}"))
    }
}

impl CliError {
    /// Process exit code.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(CoreError::BranchCut { .. }) | CliError::Core(CoreError::DimensionMismatch { .. }) => 2,
            CliError::Core(CoreError::FrameSingular { .. }) => 3,
            CliError::Tolerance(_) => 4,
            CliError::Core(CoreError::NotAnalytic { .. }) => 5,
            CliError::PropertyFailed(_) => 1,
            CliError::Io(_) | CliError::Core(_) => 1,
        }
    }
}
