//! Config files: a flat TOML table whose keys mirror the long flags of the
//! chosen experiment (`nph = 50` stands for `--nph 50`).

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    /// File contents, echoed verbatim into the output header.
    pub text: String,
    pub experiment: Option<String>,
    pub flags: Vec<String>,
}

pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str) -> Result<ConfigFile, CliError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
    let mut experiment = None;
    let mut flags = Vec::new();
    for (key, value) in table {
        if key == "experiment" {
            let name = value.as_str().ok_or_else(|| CliError::Config("'experiment' must be a string".into()))?;
            experiment = Some(name.to_string());
            continue;
        }
        if key == "config" {
            return Err(CliError::Config("config files cannot include other config files".into()));
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            toml::Value::Boolean(true) => flags.push(flag),
            toml::Value::Boolean(false) => {}
            toml::Value::String(s) => flags.extend([flag, s]),
            toml::Value::Integer(i) => flags.extend([flag, i.to_string()]),
            toml::Value::Float(x) => flags.extend([flag, x.to_string()]),
            other => {
                return Err(CliError::Config(format!("key '{key}' has unsupported type {}", other.type_str())));
            }
        }
    }
    Ok(ConfigFile { text: text.to_string(), experiment, flags })
}

/// Command line with the file's flags inserted right after the subcommand,
/// so that flags given on the command line come later and win.
pub fn merge(args: &[OsString], subcommand: &str, file_flags: &[String]) -> Vec<OsString> {
    let at = args.iter().skip(1).position(|a| a == subcommand).map_or(args.len(), |p| p + 2);
    let mut merged = args[..at].to_vec();
    merged.extend(file_flags.iter().map(OsString::from));
    merged.extend_from_slice(&args[at..]);
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_become_flags() {
        let c = parse("experiment = \"tc-dressed\"\nspins = 10\nomega_a = 1.5\ngrid = \"0:1:0.5\"\nrescale = true\nquiet = false\n")
            .unwrap();
        assert_eq!(c.experiment.as_deref(), Some("tc-dressed"));
        assert_eq!(c.flags, ["--grid", "0:1:0.5", "--omega-a", "1.5", "--rescale", "--spins", "10"]);
    }

    #[test]
    fn rejects_nested_and_bad_values() {
        assert!(parse("[section]\nx = 1\n").is_err());
        assert!(parse("config = \"other.toml\"\n").is_err());
        assert!(parse("experiment = 3\n").is_err());
        assert!(parse("spins = \n").is_err());
    }

    #[test]
    fn merge_places_file_flags_before_user_flags() {
        let args: Vec<OsString> = ["ergovolume", "tc-dressed", "--spins", "4"].iter().map(OsString::from).collect();
        let merged = merge(&args, "tc-dressed", &["--spins".into(), "9".into()]);
        let text: Vec<_> = merged.iter().map(|a| a.to_str().unwrap()).collect();
        assert_eq!(text, ["ergovolume", "tc-dressed", "--spins", "9", "--spins", "4"]);
    }
}
