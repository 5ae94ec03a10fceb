//! JSON Lines formats for comment units and filtered records.
//!
//! Unit lines look like
//! `{"id":0,"file":"pkg/a.py","start_line":3,"end_line":4,"kind":"line","raw":"..."}`
//! and record lines follow the serialized form of [`CorpusRecord`].

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{extract_from_text, merge_line_blocks, CommentKind, CommentUnit};
use crate::ingest::{decode_file, DecodeFailure};
use crate::pipeline::CorpusRecord;

/// Comments of one decoded file, not yet numbered.
#[derive(Debug, Clone)]
pub struct FileComments {
    /// Path relative to the corpus root, `/`-separated.
    pub label: String,
    pub loc: usize,
    pub units: Vec<CommentUnit>,
    pub warnings: Vec<String>,
}

/// `path` relative to `root` with `/` separators; `path` itself when it is
/// not under `root`.
pub fn relative_label(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

/// Decodes and extracts `paths` in parallel; results keep the input order.
pub fn extract_files(root: &Path, paths: &[PathBuf]) -> Vec<Result<FileComments, DecodeFailure>> {
    paths
        .par_iter()
        .map(|p| {
            let source = decode_file(p)?;
            let label = relative_label(root, p);
            let ex = extract_from_text(&label, &source.text);
            Ok(FileComments {
                label,
                loc: source.loc,
                units: merge_line_blocks(ex.units),
                warnings: ex.warnings,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct UnitOut<'a> {
    id: u64,
    file: &'a str,
    start_line: usize,
    end_line: usize,
    kind: CommentKind,
    raw: &'a str,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitIn {
    id: u64,
    file: String,
    start_line: usize,
    end_line: usize,
    kind: CommentKind,
    raw: String,
}

pub fn unit_to_json(unit: &CommentUnit) -> String {
    serde_json::to_string(&UnitOut {
        id: unit.id,
        file: &unit.file,
        start_line: unit.start_line,
        end_line: unit.end_line,
        kind: unit.kind,
        raw: &unit.raw_text,
    })
    .expect("unit serializes")
}

/// Parses one unit line. The column is not stored and comes back as 0.
pub fn unit_from_json(line: &str) -> std::result::Result<CommentUnit, String> {
    let u: UnitIn = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if u.start_line == 0 || u.end_line < u.start_line {
        return Err(format!("bad line span {}..{}", u.start_line, u.end_line));
    }
    Ok(CommentUnit {
        id: u.id,
        file: u.file,
        start_line: u.start_line,
        end_line: u.end_line,
        column: 0,
        kind: u.kind,
        raw_text: u.raw,
    })
}

pub fn write_units<W: Write>(mut out: W, units: &[CommentUnit]) -> std::io::Result<()> {
    for u in units {
        out.write_all(unit_to_json(u).as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_records<W: Write>(mut out: W, records: &[CorpusRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Line-by-line reader that reports the 1-based line number of bad input.
/// Blank lines are skipped.
pub struct JsonLines<R, T> {
    input: R,
    line: usize,
    buf: String,
    parse: fn(&str) -> std::result::Result<T, String>,
}

impl<R: BufRead, T> JsonLines<R, T> {
    fn with(input: R, parse: fn(&str) -> std::result::Result<T, String>) -> Self {
        JsonLines {
            input,
            line: 0,
            buf: String::new(),
            parse,
        }
    }
}

impl<R: BufRead> JsonLines<R, CommentUnit> {
    pub fn units(input: R) -> Self {
        JsonLines::with(input, unit_from_json)
    }
}

impl<R: BufRead> JsonLines<R, CorpusRecord> {
    pub fn records(input: R) -> Self {
        JsonLines::with(input, parse_serde::<CorpusRecord>)
    }
}

fn parse_serde<T: DeserializeOwned>(line: &str) -> std::result::Result<T, String> {
    serde_json::from_str(line).map_err(|e| e.to_string())
}

impl<R: BufRead, T> Iterator for JsonLines<R, T> {
    type Item = Result<T>;

    fn next(&mut self) -> Option<Result<T>> {
        loop {
            self.buf.clear();
            self.line += 1;
            match self.input.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    return Some(Err(Error::Malformed {
                        line: self.line,
                        reason: e.to_string(),
                    }))
                }
            }
            let text = self.buf.trim_end_matches(['\n', '\r']);
            if text.trim().is_empty() {
                continue;
            }
            return Some((self.parse)(text).map_err(|reason| Error::Malformed {
                line: self.line,
                reason,
            }));
        }
    }
}

pub fn read_units<R: BufRead>(input: R) -> Result<Vec<CommentUnit>> {
    JsonLines::units(input).collect()
}

pub fn read_records<R: BufRead>(input: R) -> Result<Vec<CorpusRecord>> {
    JsonLines::records(input).collect()
}

/// One sentence per line, tokens separated by single spaces.
pub fn write_sentences<W: Write, S: AsRef<str>>(mut out: W, sentences: &[Vec<S>]) -> std::io::Result<()> {
    for s in sentences {
        let mut first = true;
        for t in s {
            if !first {
                out.write_all(b" ")?;
            }
            out.write_all(t.as_ref().as_bytes())?;
            first = false;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_sentences<R: BufRead>(input: R) -> Result<Vec<Vec<String>>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Malformed {
            line: i + 1,
            reason: e.to_string(),
        })?;
        out.push(line.split_whitespace().map(str::to_owned).collect());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::run_advanced;

    fn sample() -> Vec<CommentUnit> {
        vec![
            CommentUnit {
                id: 0,
                file: "a/b.py".into(),
                start_line: 1,
                end_line: 2,
                column: 0,
                kind: CommentKind::LineBlock,
                raw_text: "first line\nsecond \"quoted\" line".into(),
            },
            CommentUnit {
                id: 1,
                file: "a/b.py".into(),
                start_line: 4,
                end_line: 4,
                column: 0,
                kind: CommentKind::Docstring,
                raw_text: "Return foo. ünïcode".into(),
            },
        ]
    }

    #[test]
    fn unit_format() {
        let line = unit_to_json(&sample()[0]);
        assert_eq!(
            line,
            r#"{"id":0,"file":"a/b.py","start_line":1,"end_line":2,"kind":"line","raw":"first line\nsecond \"quoted\" line"}"#
        );
    }

    #[test]
    fn units_round_trip() {
        let mut buf = Vec::new();
        write_units(&mut buf, &sample()).unwrap();
        assert_eq!(read_units(&buf[..]).unwrap(), sample());
    }

    #[test]
    fn records_round_trip() {
        let recs = run_advanced(&sample());
        let mut buf = Vec::new();
        write_records(&mut buf, &recs).unwrap();
        assert_eq!(read_records(&buf[..]).unwrap(), recs);
    }

    #[test]
    fn malformed_line_is_reported() {
        let mut buf = Vec::new();
        write_units(&mut buf, &sample()).unwrap();
        buf.extend_from_slice(b"\n{\"id\": 3}\n");
        match read_units(&buf[..]).unwrap_err() {
            Error::Malformed { line, .. } => assert_eq!(line, 4),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn extracts_a_tree_in_order() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir(dir.path().join("pkg")).unwrap();
        std::fs::write(dir.path().join("pkg/a.py"), "# one\n# two\nx = 1\n").unwrap();
        std::fs::write(dir.path().join("b.py"), "def f():\n    \"\"\"Doc.\"\"\"\n").unwrap();
        std::fs::write(dir.path().join("bad.py"), b"\x00\x01").unwrap();
        let walk = crate::ingest::walk_corpus(dir.path(), "py").unwrap();
        let got = extract_files(dir.path(), &walk.paths);
        assert_eq!(got.len(), 3);
        let ok: Vec<&FileComments> = got.iter().filter_map(|r| r.as_ref().ok()).collect();
        assert_eq!(ok.len(), 2);
        let a = ok.iter().find(|f| f.label == "pkg/a.py").unwrap();
        assert_eq!(a.units.len(), 1);
        assert_eq!(a.units[0].raw_text, "one\ntwo");
        assert_eq!(a.loc, 3);
    }

    #[test]
    fn sentences_round_trip() {
        let s = vec![vec!["a".to_string(), "b".into()], vec!["c".into()]];
        let mut buf = Vec::new();
        write_sentences(&mut buf, &s).unwrap();
        assert_eq!(buf, b"a b\nc\n");
        assert_eq!(read_sentences(&buf[..]).unwrap(), s);
    }
}
