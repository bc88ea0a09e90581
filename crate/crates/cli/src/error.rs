use std::fmt;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    /// Unusable flags, config file or output path.
    Config(String),
    Backend(ergovolume::Error),
}

impl From<ergovolume::Error> for CliError {
    fn from(e: ergovolume::Error) -> Self {
        CliError::Backend(e)
    }
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Backend(e) => e.kind(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Backend(e) if e.is_input_error() => ExitCode::from(2),
            CliError::Backend(_) => ExitCode::from(3),
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(msg) => msg.clone(),
            CliError::Backend(e) => e.to_string(),
        }
    }
}

/// One machine-parsable line: `error: kind=<kind> message="<text>"`.
impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let escaped: String = self
            .message()
            .chars()
            .flat_map(|c| match c {
                '"' => vec!['\\', '"'],
                '\\' => vec!['\\', '\\'],
                '\n' => vec!['\\', 'n'],
                c => vec![c],
            })
            .collect();
        write!(f, "error: kind={} message=\"{escaped}\"", self.kind())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_line_with_escapes() {
        let e = CliError::Config("bad \"grid\"\nsecond".into());
        assert_eq!(e.to_string(), r#"error: kind=config message="bad \"grid\"\nsecond""#);
        let e = CliError::from(ergovolume::Error::ConstantSeries);
        assert_eq!(e.to_string(), r#"error: kind=constant_series message="cannot rescale a constant series""#);
    }
}
