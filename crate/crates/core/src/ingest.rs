//! Source tree traversal and file decoding.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{Error, Result};

/// Files above this size are skipped rather than decoded.
pub const MAX_FILE_BYTES: u64 = 16 * 1024 * 1024;

/// Latin-1 text with a larger share of control characters is rejected.
const MAX_CONTROL_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Utf8,
    Latin1,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    pub path: PathBuf,
    pub text: String,
    pub encoding_used: Encoding,
    pub loc: usize,
}

impl SourceFile {
    /// Builds a UTF-8 source file from in-memory text.
    pub fn from_text(path: impl Into<PathBuf>, text: impl Into<String>) -> Self {
        let text = text.into();
        SourceFile {
            path: path.into(),
            loc: count_lines(&text),
            text,
            encoding_used: Encoding::Utf8,
        }
    }

    /// Re-encodes the text under the encoding it was decoded with.
    pub fn encode(&self) -> Vec<u8> {
        match self.encoding_used {
            Encoding::Utf8 => self.text.as_bytes().to_vec(),
            Encoding::Latin1 => self.text.chars().map(|c| c as u32 as u8).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailureReason {
    NulBytes,
    ControlCharacters { per_mille: u32 },
    TooLarge { bytes: u64 },
    Unreadable(String),
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureReason::NulBytes => write!(f, "contains NUL bytes"),
            FailureReason::ControlCharacters { per_mille } => {
                write!(f, "latin-1 decode has {per_mille}\u{2030} control characters")
            }
            FailureReason::TooLarge { bytes } => {
                write!(f, "{bytes} bytes exceeds the {MAX_FILE_BYTES} byte limit")
            }
            FailureReason::Unreadable(msg) => write!(f, "unreadable: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeFailure {
    pub path: PathBuf,
    pub reason: FailureReason,
}

/// Per-run file accounting.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub files_opened: u64,
    pub files_skipped: u64,
    pub skipped_paths: Vec<PathBuf>,
    pub total_loc: u64,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl IngestReport {
    pub fn record_opened(&mut self, file: &SourceFile) {
        self.files_opened += 1;
        self.total_loc += file.loc as u64;
    }

    pub fn record_failure(&mut self, failure: &DecodeFailure) {
        self.files_skipped += 1;
        self.skipped_paths.push(failure.path.clone());
        self.warnings
            .push(format!("skipped {}: {}", failure.path.display(), failure.reason));
    }

    /// Appends another report; callers merge in path order.
    pub fn merge(&mut self, other: IngestReport) {
        self.files_opened += other.files_opened;
        self.files_skipped += other.files_skipped;
        self.skipped_paths.extend(other.skipped_paths);
        self.total_loc += other.total_loc;
        self.warnings.extend(other.warnings);
    }
}

/// Candidate files found under a root, in path order.
#[derive(Debug, Default)]
pub struct CorpusWalk {
    pub paths: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// Lists regular files under `root` whose extension equals `extension`.
///
/// Symlinks are not followed. Paths are sorted component-wise so the order
/// only depends on directory contents.
pub fn walk_corpus(root: &Path, extension: &str) -> Result<CorpusWalk> {
    let meta = fs::metadata(root).map_err(|e| Error::UnreadableRoot {
        path: root.to_path_buf(),
        reason: e.to_string(),
    })?;
    if !meta.is_dir() {
        return Err(Error::UnreadableRoot {
            path: root.to_path_buf(),
            reason: "not a directory".into(),
        });
    }
    fs::read_dir(root).map_err(|e| Error::UnreadableRoot {
        path: root.to_path_buf(),
        reason: e.to_string(),
    })?;

    let mut walk = CorpusWalk::default();
    for entry in WalkDir::new(root).follow_links(false) {
        match entry {
            Ok(entry) => {
                if entry.file_type().is_file()
                    && entry.path().extension().and_then(|e| e.to_str()) == Some(extension)
                {
                    walk.paths.push(entry.into_path());
                }
            }
            Err(err) => {
                let at = err
                    .path()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| root.display().to_string());
                walk.warnings.push(format!("cannot read {at}: {err}"));
            }
        }
    }
    walk.paths.sort();
    Ok(walk)
}

/// Reads and decodes one file. Never panics; every failure is a [`DecodeFailure`].
pub fn decode_file(path: &Path) -> Result<SourceFile, DecodeFailure> {
    let fail = |reason| DecodeFailure {
        path: path.to_path_buf(),
        reason,
    };
    let size = fs::metadata(path)
        .map_err(|e| fail(FailureReason::Unreadable(e.to_string())))?
        .len();
    if size > MAX_FILE_BYTES {
        return Err(fail(FailureReason::TooLarge { bytes: size }));
    }
    let bytes = fs::read(path).map_err(|e| fail(FailureReason::Unreadable(e.to_string())))?;
    let (text, encoding_used) = decode_bytes(&bytes).map_err(fail)?;
    Ok(SourceFile {
        path: path.to_path_buf(),
        loc: count_lines(&text),
        text,
        encoding_used,
    })
}

/// Strict UTF-8, then latin-1, then reject.
pub fn decode_bytes(bytes: &[u8]) -> Result<(String, Encoding), FailureReason> {
    if bytes.contains(&0) {
        return Err(FailureReason::NulBytes);
    }
    if let Ok(text) = std::str::from_utf8(bytes) {
        return Ok((text.to_owned(), Encoding::Utf8));
    }
    let text: String = bytes.iter().map(|&b| b as char).collect();
    let control = text.chars().filter(|&c| is_disallowed_control(c)).count();
    let fraction = control as f64 / text.chars().count() as f64;
    if fraction > MAX_CONTROL_FRACTION {
        return Err(FailureReason::ControlCharacters {
            per_mille: (fraction * 1000.0).round() as u32,
        });
    }
    Ok((text, Encoding::Latin1))
}

fn is_disallowed_control(c: char) -> bool {
    c.is_control() && !matches!(c, '\t' | '\n' | '\r')
}

/// Number of newline-delimited lines, as `str::lines` counts them.
pub fn count_lines(text: &str) -> usize {
    text.lines().count()
}

/// Decodes files concurrently on the current rayon pool; output keeps input order.
pub fn decode_all(paths: &[PathBuf]) -> Vec<Result<SourceFile, DecodeFailure>> {
    paths.par_iter().map(|p| decode_file(p)).collect()
}
