use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Args;
use serde::de::DeserializeOwned;
use serde::Serialize;
use ssnmf::{io, Result, SsnmfError};

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON file with the command's settings; flags take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Leave the creation time out of reports so reruns are byte-identical.
    #[arg(long)]
    pub no_timestamp: bool,
}

impl Common {
    pub fn load<T: DeserializeOwned + Default>(&self) -> Result<T> {
        let Some(path) = &self.config else {
            return Ok(T::default());
        };
        let text = io::read_text(path)?;
        serde_json::from_str(&text)
            .map_err(|e| SsnmfError::Config(format!("{}: {e}", path.display())))
    }

    pub fn timestamp(&self) -> Option<u64> {
        if self.no_timestamp {
            return None;
        }
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs())
    }
}

/// Copies every flag that was given over the matching config field.
macro_rules! override_fields {
    ($cfg:expr, $args:expr, [$($field:ident),* $(,)?]) => {
        $(
            if let Some(v) = $args.$field.take() {
                $cfg.$field = v.into();
            }
        )*
    };
}
pub(crate) use override_fields;

pub fn require<'a>(path: &'a Option<PathBuf>, name: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| SsnmfError::Config(format!("missing required setting `{name}`")))
}

pub fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| SsnmfError::io(dir, e))
}

/// Writes `value` as `dir/report.json`.
pub fn write_report<T: Serialize>(dir: &Path, value: &T) -> Result<()> {
    io::write_json(&dir.join("report.json"), value)
}
