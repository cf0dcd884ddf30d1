use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::selection::{Direction, Objective};

/// Reads a flat `key = value` file. Blank lines and `#` comments are ignored;
/// keys are returned in file order.
pub fn parse_config(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::parse(path, i + 1, "expected `key = value`"));
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::parse(path, i + 1, "empty key"));
        }
        out.push((key.to_owned(), value.trim().to_owned()));
    }
    Ok(out)
}

/// Parameters of a single selection run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Dataset name or generator description, recorded in the results.
    pub dataset: String,
    pub objective: Objective,
    pub direction: Direction,
    pub algorithm: String,
    pub k: usize,
    pub epsilon: f64,
    pub phi: f64,
    pub seed: u64,
    pub output: PathBuf,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon = {} must be positive", self.epsilon)));
        }
        if !(self.phi >= 1.0) {
            return Err(Error::InvalidParameter(format!("phi = {} must be at least 1", self.phi)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_values() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.conf");
        std::fs::write(&p, "# run\nk = 5\n\nobjective=mse\n").unwrap();
        assert_eq!(
            parse_config(&p).unwrap(),
            vec![("k".into(), "5".into()), ("objective".into(), "mse".into())]
        );
        std::fs::write(&p, "k 5\n").unwrap();
        assert!(matches!(parse_config(&p), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig {
            dataset: "x".into(),
            objective: Objective::Mse,
            direction: Direction::Maximize,
            algorithm: "greedy".into(),
            k: 3,
            epsilon: 1e-5,
            phi: 1.1,
            seed: 0,
            output: "out.csv".into(),
        };
        assert!(c.validate().is_ok());
        c.phi = 0.5;
        assert!(c.validate().is_err());
        c.phi = 1.0;
        c.k = 0;
        assert!(c.validate().is_err());
    }
}
