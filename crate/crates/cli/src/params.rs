//! Command-line and config-file parsing.
//!
//! Every run is described by a subcommand name plus a flat key → value
//! map. The map is assembled in two layers: an optional config file
//! (`--config path`, one `key = value` per line, `#` comments) and the
//! command-line flags themselves; the command line wins on conflicts.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

/// Failure classes of a run, mapped to distinct exit codes by `main`:
/// usage errors exit 2, I/O errors exit 3.
#[derive(Debug)]
pub enum CliError {
    /// Unknown or malformed flags, or a parameter rejected by the module
    /// it was destined for. The message names the offending key.
    Usage(String),
    /// Filesystem failure while reading a config or writing artifacts.
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl From<fracheat::Error> for CliError {
    fn from(err: fracheat::Error) -> Self {
        match err {
            fracheat::Error::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn usage<T>(msg: String) -> Result<T, CliError> {
    Err(CliError::Usage(msg))
}

/// Flags accepted by every subcommand.
pub const GLOBAL_KEYS: [&str; 5] = ["out", "seed", "grid-m", "box-l", "config"];

/// A validated invocation: the subcommand plus the merged parameter map.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    subcommand: String,
    values: BTreeMap<String, String>,
}

impl ExperimentConfig {
    /// Parses `args` (without the program name). The first argument is
    /// the subcommand; the rest are `--key value` pairs. When a
    /// `--config` file is named it is loaded first so explicit flags
    /// override it.
    pub fn from_args(args: &[String]) -> Result<Self, CliError> {
        let Some(subcommand) = args.first() else {
            return usage("missing subcommand; expected one of norm, kernel, verify, solve, scan, appendix".into());
        };
        if subcommand.starts_with('-') {
            return usage(format!(
                "expected a subcommand before flags, got {subcommand}"
            ));
        }
        let mut flags = BTreeMap::new();
        let mut rest = args[1..].iter();
        while let Some(arg) = rest.next() {
            let Some(key) = arg.strip_prefix("--") else {
                return usage(format!("expected --key, got {arg}"));
            };
            if key.is_empty() {
                return usage("empty flag name".into());
            }
            let Some(value) = rest.next() else {
                return usage(format!("flag --{key} is missing its value"));
            };
            if flags.insert(key.to_string(), value.clone()).is_some() {
                return usage(format!("flag --{key} given twice"));
            }
        }
        let mut values = match flags.get("config") {
            Some(path) => parse_config_file(path)?,
            None => BTreeMap::new(),
        };
        values.extend(flags);
        Ok(ExperimentConfig {
            subcommand: subcommand.clone(),
            values,
        })
    }

    /// Builds a config directly from a key map (tests only go through
    /// this; the binary always parses argv).
    #[cfg(test)]
    pub fn from_map(subcommand: &str, pairs: &[(&str, &str)]) -> Self {
        ExperimentConfig {
            subcommand: subcommand.into(),
            values: pairs
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }

    pub fn subcommand(&self) -> &str {
        &self.subcommand
    }

    /// Rejects any key outside the global flags and `allowed`, naming the
    /// stranger. Called once per subcommand before dispatch.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        for key in self.values.keys() {
            if !GLOBAL_KEYS.contains(&key.as_str()) && !allowed.contains(&key.as_str()) {
                return usage(format!(
                    "unknown flag --{key} for subcommand {}",
                    self.subcommand
                ));
            }
        }
        Ok(())
    }

    pub fn get_str(&self, key: &str, default: &str) -> String {
        self.values
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string())
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|_| CliError::Usage(format!("flag --{key}: not a number: {raw}"))),
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(raw) => raw.parse().map_err(|_| {
                CliError::Usage(format!("flag --{key}: not a nonnegative integer: {raw}"))
            }),
        }
    }

    pub fn get_u64(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(raw) => raw.parse().map_err(|_| {
                CliError::Usage(format!("flag --{key}: not a nonnegative integer: {raw}"))
            }),
        }
    }

    /// The artifact directory, from `--out` (default `out`).
    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.get_str("out", "out"))
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.get_u64("seed", 1)
    }

    /// Grid resolution per axis, from `--grid-m` (default 256).
    pub fn grid_m(&self) -> Result<usize, CliError> {
        self.get_usize("grid-m", 256)
    }

    /// Periodic box side length, from `--box-l` (default 16): the domain
    /// is `[-L/2, L/2]^n`.
    pub fn box_l(&self) -> Result<f64, CliError> {
        self.get_f64("box-l", 16.0)
    }
}

/// Reads a flat key-value config file: blank lines and `#` comments are
/// skipped, everything else must be `key = value`.
fn parse_config_file(path: &str) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading config {path}: {e}")))?;
    let mut map = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return usage(format!(
                "config {path} line {}: expected key = value, got {line}",
                idx + 1
            ));
        };
        let key = key.trim();
        if key.is_empty() {
            return usage(format!("config {path} line {}: empty key", idx + 1));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_subcommand_and_flags() {
        let cfg =
            ExperimentConfig::from_args(&args(&["solve", "--theta", "1.5", "--grid-m", "64"]))
                .unwrap();
        assert_eq!(cfg.subcommand(), "solve");
        assert_eq!(cfg.get_f64("theta", 2.0).unwrap(), 1.5);
        assert_eq!(cfg.grid_m().unwrap(), 64);
        // Defaults fill the gaps.
        assert_eq!(cfg.box_l().unwrap(), 16.0);
        assert_eq!(cfg.seed().unwrap(), 1);
        assert_eq!(cfg.out_dir(), PathBuf::from("out"));
    }

    #[test]
    fn rejects_malformed_invocations() {
        for bad in [
            vec![],
            args(&["--grid-m", "64"]),
            args(&["solve", "theta"]),
            args(&["solve", "--theta"]),
            args(&["solve", "--theta", "2", "--theta", "1"]),
            args(&["solve", "--", "x"]),
        ] {
            match ExperimentConfig::from_args(&bad) {
                Err(CliError::Usage(_)) => {}
                other => panic!("{bad:?} should be a usage error, got {other:?}"),
            }
        }
    }

    #[test]
    fn bad_numbers_name_the_flag() {
        let cfg = ExperimentConfig::from_args(&args(&["norm", "--theta", "two"])).unwrap();
        let err = cfg.get_f64("theta", 2.0).unwrap_err();
        assert!(err.to_string().contains("--theta"), "{err}");
        let cfg = ExperimentConfig::from_args(&args(&["norm", "--seed", "-3"])).unwrap();
        let err = cfg.seed().unwrap_err();
        assert!(err.to_string().contains("--seed"), "{err}");
    }

    #[test]
    fn unknown_keys_are_named() {
        let cfg = ExperimentConfig::from_args(&args(&["norm", "--bogus", "1"])).unwrap();
        let err = cfg.check_keys(&["theta", "n"]).unwrap_err();
        assert!(err.to_string().contains("--bogus"), "{err}");
        // Global and allowed keys pass.
        let cfg =
            ExperimentConfig::from_args(&args(&["norm", "--theta", "1", "--seed", "7"])).unwrap();
        cfg.check_keys(&["theta", "n"]).unwrap();
    }

    #[test]
    fn config_file_loads_and_command_line_wins() {
        let dir = std::env::temp_dir().join("fracheat-params-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "# sweep defaults\ngrid-m = 64\ntheta = 1.5\n\nbox-l=8\n").unwrap();
        let cfg = ExperimentConfig::from_args(&args(&[
            "solve",
            "--config",
            path.to_str().unwrap(),
            "--theta",
            "2.0",
        ]))
        .unwrap();
        // File value survives where the command line is silent…
        assert_eq!(cfg.grid_m().unwrap(), 64);
        assert_eq!(cfg.box_l().unwrap(), 8.0);
        // …and loses where it is not.
        assert_eq!(cfg.get_f64("theta", 0.0).unwrap(), 2.0);

        std::fs::write(&path, "no equals sign here\n").unwrap();
        let err = ExperimentConfig::from_args(&args(&["solve", "--config", path.to_str().unwrap()]))
            .unwrap_err();
        assert!(matches!(err, CliError::Usage(m) if m.contains("line 1")));

        let err = ExperimentConfig::from_args(&args(&["solve", "--config", "/no/such/file.cfg"]))
            .unwrap_err();
        assert!(matches!(err, CliError::Io(_)));
    }
}
