use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::analysis::AnalysisOptions;
use crate::error::{Error, Result};
use crate::mc::ExperimentConfig;
use crate::physics::SourceParams;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputPaths {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tags: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

/// Everything needed to simulate and analyze one experiment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub source: SourceParams,
    pub experiment: ExperimentConfig,
    pub analysis: AnalysisOptions,
    pub output: OutputPaths,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        self.experiment.validate()?;
        let a = &self.analysis;
        if a.bin_width == 0 || a.lifetime_bin == 0 {
            return Err(Error::Validation("bin widths must be positive".into()));
        }
        if a.lifetime_range[1] <= a.lifetime_range[0] {
            return Err(Error::Validation("lifetime_range must be increasing".into()));
        }
        if a.apd_correction < 1.0 {
            return Err(Error::Domain {
                name: "apd_correction",
                value: a.apd_correction,
                constraint: "must be >= 1",
            });
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// First line assigning `key`, 1-based; 0 when the key is not present.
fn line_of_key(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| {
            l.trim_start()
                .strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map_or(0, |i| i + 1)
}

/// Parses and validates a TOML run configuration, filling defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig = toml::from_str(text).map_err(|e| {
        let (line, key) = match e.span() {
            Some(span) => {
                let line = line_of_offset(text, span.start);
                let content = text.lines().nth(line - 1).unwrap_or("");
                let key = content.split('=').next().unwrap_or("").trim();
                let key = key.trim_matches(|c| c == '[' || c == ']').to_string();
                (line, key)
            }
            None => (0, String::new()),
        };
        Error::Parse {
            key,
            line,
            message: e.message().to_string(),
        }
    })?;
    config.validate().map_err(|e| match e {
        Error::Domain { name, .. } => Error::Parse {
            key: name.to_string(),
            line: line_of_key(text, name),
            message: e.to_string(),
        },
        other => Error::Parse {
            key: "experiment".into(),
            line: 0,
            message: other.to_string(),
        },
    })?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::ExperimentKind;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config("[source]\nfss = 4.8\ntau_x = 60\n").unwrap();
        assert_eq!(c.source.tau_x, 60.0);
        assert_eq!(c.source.rep_rate, 79.0);
        assert_eq!(c.experiment.mzi_delay, 1900.0);
        assert_eq!(c.experiment.double_pulse_sep, 1900.0);
        assert_eq!(c.experiment.kind, ExperimentKind::HbtX);
    }

    #[test]
    fn constraint_error_names_key_and_line() {
        let err = parse_config("[source]\nfss = 4.8\n\neta = 1.3\n").unwrap_err();
        match err {
            Error::Parse { key, line, .. } => {
                assert_eq!(key, "eta");
                assert_eq!(line, 4);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_config("[source]\nfss = 4.8\nbogus = 1.0\n").unwrap_err();
        match err {
            Error::Parse { key, line, message } => {
                assert_eq!(key, "bogus");
                assert_eq!(line, 3);
                assert!(message.contains("bogus"), "{message}");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn experiment_mismatch_is_a_parse_error() {
        let err = parse_config("[experiment]\nkind = \"hbt_x\"\nbasis = \"linear\"\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn type_mismatch_names_key_and_line() {
        let err = parse_config("[source]\nfss = 4.8\ntau_x = \"sixty\"\n").unwrap_err();
        assert!(matches!(err, Error::Parse { ref key, line: 3, .. } if key == "tau_x"), "{err}");
    }

    #[test]
    fn serialize_round_trip() {
        let mut c = RunConfig::default();
        c.source.tau_ss = f64::INFINITY;
        c.analysis.window = Some(5000.0);
        c.output.tags = Some("out/run.cstg".into());
        let again = parse_config(&c.to_toml()).unwrap();
        assert_eq!(again, c);
    }
}
