//! Python module `comsieve`: extraction, classification, filtering, n-gram
//! completion and BLEU.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use comsieve::extract::{extract_from_text, merge_line_blocks, number_units};
use comsieve::pipeline::{self, Pipeline};
use comsieve::{Classifier, CommentKind, FilterMode, LangId, PipelineConfig};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "CommentUnit", module = "comsieve", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyCommentUnit {
    id: u64,
    file: String,
    start_line: usize,
    end_line: usize,
    kind: &'static str,
    raw_text: String,
}

#[pymethods]
impl PyCommentUnit {
    #[new]
    #[pyo3(signature = (raw_text, kind = "line", file = "<string>".to_owned(), start_line = 1, end_line = None, id = 0))]
    fn new(raw_text: String, kind: &str, file: String, start_line: usize, end_line: Option<usize>, id: u64) -> PyResult<Self> {
        let kind = match kind {
            "line" => "line",
            "docstring" => "docstring",
            other => return Err(value_err(format!("unknown kind `{other}`"))),
        };
        Ok(PyCommentUnit {
            id,
            file,
            start_line,
            end_line: end_line.unwrap_or(start_line),
            kind,
            raw_text,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "CommentUnit(id={}, file={:?}, lines={}..{}, kind={:?}, raw_text={:?})",
            self.id, self.file, self.start_line, self.end_line, self.kind, self.raw_text
        )
    }
}

impl From<comsieve::CommentUnit> for PyCommentUnit {
    fn from(u: comsieve::CommentUnit) -> Self {
        PyCommentUnit {
            id: u.id,
            file: u.file,
            start_line: u.start_line,
            end_line: u.end_line,
            kind: match u.kind {
                CommentKind::LineBlock => "line",
                CommentKind::Docstring => "docstring",
            },
            raw_text: u.raw_text,
        }
    }
}

impl From<&PyCommentUnit> for comsieve::CommentUnit {
    fn from(u: &PyCommentUnit) -> Self {
        comsieve::CommentUnit {
            id: u.id,
            file: u.file.clone(),
            start_line: u.start_line,
            end_line: u.end_line,
            column: 0,
            kind: if u.kind == "docstring" {
                CommentKind::Docstring
            } else {
                CommentKind::LineBlock
            },
            raw_text: u.raw_text.clone(),
        }
    }
}

#[pyclass(name = "CorpusRecord", module = "comsieve", frozen, get_all)]
struct PyCorpusRecord {
    id: u64,
    kept: bool,
    categories: Vec<&'static str>,
    drop_reason: Option<&'static str>,
    duplicate_of: Option<u64>,
    normalized: Option<String>,
}

#[pymethods]
impl PyCorpusRecord {
    fn __repr__(&self) -> String {
        format!(
            "CorpusRecord(id={}, kept={}, categories={:?}, drop_reason={:?})",
            self.id, self.kept, self.categories, self.drop_reason
        )
    }
}

impl From<comsieve::CorpusRecord> for PyCorpusRecord {
    fn from(r: comsieve::CorpusRecord) -> Self {
        PyCorpusRecord {
            id: r.id,
            kept: r.is_kept(),
            categories: r.categories.names(),
            drop_reason: r.drop_reason.map(|d| d.name()),
            duplicate_of: r.duplicate_of,
            normalized: r.normalized,
        }
    }
}

/// Comments of one Python source text, line comments merged into blocks.
#[pyfunction]
#[pyo3(signature = (source, file = "<string>"))]
fn extract_comments(source: &str, file: &str) -> Vec<PyCommentUnit> {
    let mut units = merge_line_blocks(extract_from_text(file, source).units);
    number_units(&mut units, 0);
    units.into_iter().map(Into::into).collect()
}

/// Category names assigned to a comment text.
#[pyfunction]
fn classify(text: &str) -> Vec<&'static str> {
    Classifier::shared()
        .classify(text, Default::default())
        .names()
}

#[pyfunction]
fn is_english(text: &str) -> bool {
    LangId::shared().is_english(text)
}

/// Runs basic or advanced filtering over units, deduplicating across the list.
#[pyfunction]
#[pyo3(signature = (units, mode = "advanced"))]
fn filter_units(py: Python<'_>, units: Vec<PyRef<'_, PyCommentUnit>>, mode: &str) -> PyResult<Vec<PyCorpusRecord>> {
    let mode: FilterMode = mode.parse().map_err(value_err)?;
    let units: Vec<comsieve::CommentUnit> = units.iter().map(|u| (&**u).into()).collect();
    let records = py.detach(|| Pipeline::new(PipelineConfig::new(mode)).process(&units));
    Ok(records.into_iter().map(Into::into).collect())
}

#[pyfunction]
fn normalize(text: &str) -> Vec<String> {
    pipeline::normalize_basic(text)
}

#[pyfunction]
#[pyo3(signature = (text, min_words = 4))]
fn split_sentences(text: &str, min_words: usize) -> Vec<Vec<String>> {
    pipeline::split_sentences(text, min_words)
}

/// Unsmoothed sentence BLEU over token lists.
#[pyfunction]
#[pyo3(signature = (candidate, reference, max_n = 4))]
fn sentence_bleu(candidate: Vec<String>, reference: Vec<String>, max_n: usize) -> PyResult<f64> {
    if candidate.is_empty() || reference.is_empty() {
        return Err(value_err("candidate and reference must be nonempty"));
    }
    if max_n == 0 {
        return Err(value_err("max_n must be positive"));
    }
    Ok(comsieve::bleu::sentence_bleu(&candidate, &reference, max_n))
}

#[pyclass(name = "NGramModel", module = "comsieve", frozen)]
struct PyNGramModel {
    inner: comsieve::NGramModel,
}

#[pymethods]
impl PyNGramModel {
    /// Trains on tokenized sentences, keeping the `vocab_size` most frequent words.
    #[staticmethod]
    #[pyo3(signature = (sentences, vocab_size = comsieve::ngram::DEFAULT_VOCAB_SIZE))]
    fn train(py: Python<'_>, sentences: Vec<Vec<String>>, vocab_size: usize) -> Self {
        let inner = py.detach(|| comsieve::NGramModel::train_with_vocab(&sentences, vocab_size));
        PyNGramModel { inner }
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let f = std::fs::File::open(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        let inner = comsieve::NGramModel::read_json(std::io::BufReader::new(f)).map_err(value_err)?;
        Ok(PyNGramModel { inner })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        let f = std::fs::File::create(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        self.inner
            .write_json(std::io::BufWriter::new(f))
            .map_err(|e| PyIOError::new_err(e.to_string()))
    }

    fn prob(&self, context: Vec<String>, word: &str) -> PyResult<f64> {
        if context.len() != 3 {
            return Err(value_err("context must have exactly 3 tokens"));
        }
        Ok(self.inner.prob(&context, word))
    }

    /// Returns `(tokens, stop_reason)`.
    #[pyo3(signature = (prefix, threshold = comsieve::ngram::DEFAULT_THRESHOLD, max_len = comsieve::ngram::DEFAULT_MAX_LEN))]
    fn complete(&self, prefix: Vec<String>, threshold: f64, max_len: usize) -> PyResult<(Vec<String>, String)> {
        if prefix.len() != comsieve::ngram::ORDER {
            return Err(value_err("prefix must have exactly 4 tokens"));
        }
        let r = self.inner.complete(&prefix, threshold, max_len);
        Ok((r.output, r.stop_reason.to_string()))
    }

    fn vocabulary(&self) -> Vec<String> {
        self.inner.vocabulary().tokens.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.context_count()
    }
}

#[pymodule]
#[pyo3(name = "comsieve")]
fn comsieve_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", comsieve::VERSION)?;
    m.add("RULES_VERSION", comsieve::RuleTable::default_table().version().to_owned())?;
    m.add_class::<PyCommentUnit>()?;
    m.add_class::<PyCorpusRecord>()?;
    m.add_class::<PyNGramModel>()?;
    m.add_function(wrap_pyfunction!(extract_comments, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(is_english, m)?)?;
    m.add_function(wrap_pyfunction!(filter_units, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(split_sentences, m)?)?;
    m.add_function(wrap_pyfunction!(sentence_bleu, m)?)?;
    Ok(())
}
