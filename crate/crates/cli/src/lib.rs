//! Library side of the `tagdesc` command: report types, the explain
//! driver and the file plumbing shared by every subcommand.
//!
//! Exit codes are stable:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | configuration error: bad flags, schema, or input contents |
//! | 3 | I/O error: a file could not be read or written |
//! | 4 | infeasible: no descriptor of the requested shape exists |
//! | 5 | an exact CNF clause ran out of its node budget |

pub mod commands;
pub mod explain;
pub mod report;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use tagdesc_core::{ClusterSet, Error, ErrorKind};

pub use explain::{compute_masks, run_explain, ExplainOptions, FilterOptions, MaskSet};
pub use report::{render_report, ExplainReport, Format, Method};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;
pub const EXIT_BUDGET: i32 = 5;

/// An error tagged with the pipeline stage and the entity (file, cluster)
/// it concerns.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub entity: Option<String>,
    pub source: Error,
}

impl StageError {
    pub fn new(stage: &'static str, entity: Option<&str>, source: Error) -> Self {
        StageError {
            stage,
            entity: entity.map(String::from),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.source.kind() {
            ErrorKind::Config => EXIT_CONFIG,
            ErrorKind::Io => EXIT_IO,
            ErrorKind::Infeasible => EXIT_INFEASIBLE,
            ErrorKind::Budget => EXIT_BUDGET,
        }
    }
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.entity {
            Some(e) => write!(f, "{} ({}): {}", self.stage, e, self.source),
            None => write!(f, "{}: {}", self.stage, self.source),
        }
    }
}

impl std::error::Error for StageError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

pub(crate) fn load_err(path: &Path, e: impl Into<Error>) -> StageError {
    StageError::new("load", Some(&path.display().to_string()), e.into())
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, StageError> {
    fs::read(path).map_err(|e| load_err(path, e))
}

/// Loads clusters from the JSON interchange format, or from a 0/1 tag
/// matrix when the file name ends in `.csv`.
pub fn load_clusters(path: &Path, allow_untagged: bool) -> Result<ClusterSet, StageError> {
    let bytes = read_file(path)?;
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let set = if is_csv {
        tagdesc_core::io::read_csv_matrix(bytes.as_slice(), allow_untagged)
    } else {
        tagdesc_core::io::read_json(bytes.as_slice(), allow_untagged)
    };
    set.map_err(|e| load_err(path, e))
}

/// Writes `bytes` to `out`, or to stdout when `out` is `None`.
///
/// Files are written to a sibling temporary and renamed into place, so a
/// failed run never leaves a truncated output behind.
pub fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<(), StageError> {
    let Some(path) = out else {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(bytes)
            .and_then(|_| stdout.flush())
            .map_err(|e| StageError::new("write", Some("stdout"), e.into()));
    };
    let err =
        |e: std::io::Error| StageError::new("write", Some(&path.display().to_string()), e.into());
    let tmp = temp_path(path);
    fs::write(&tmp, bytes).map_err(err)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        err(e)
    })
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(format!(".tmp{}", std::process::id()));
    path.with_file_name(name)
}
