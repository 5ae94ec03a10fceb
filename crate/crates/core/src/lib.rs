//! Mining and sanitizing Python source comments for language modeling.
//!
//! The crate is organized as a pipeline:
//!
//! - [`ingest`] walks a source tree and decodes files with an encoding fallback.
//! - [`extract`] lexes Python source into [`CommentUnit`]s (line-comment blocks
//!   and string-literal expression statements).
//! - [`categorize`] assigns non-linguistic categories from a regex rule table.
//! - [`langid`] decides whether text is English using 4-word windows.
//! - [`pipeline`] runs basic or advanced filtering, normalization and dedup.
//! - [`stats`] builds prevalence tables, histograms and vocabularies.
//! - [`ngram`] trains a 4-gram completion model and analyzes its generations.
//! - [`bleu`] scores completions with sentence-level BLEU-4.
//!
//! File formats shared with the command-line tool live in [`corpus`], and the
//! flat key-value configuration format in [`config`].

pub mod bleu;
pub mod categorize;
pub mod config;
pub mod corpus;
pub mod error;
pub mod extract;
pub mod ingest;
pub mod langid;
pub mod ngram;
pub mod pipeline;
pub mod stats;

pub use categorize::{Category, CategorySet, Classifier, Group, RuleTable};
pub use error::{Error, Result};
pub use extract::{CommentKind, CommentUnit};
pub use ingest::{IngestReport, SourceFile};
pub use langid::LangId;
pub use ngram::NGramModel;
pub use pipeline::{CorpusRecord, FilterMode, PipelineConfig, RecordStatus};

/// Version of the tool, reported in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
