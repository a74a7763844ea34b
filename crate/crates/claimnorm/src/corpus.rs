//! Post/claim corpus loading and addressing.
//!
//! Canonical interchange format is UTF-8 CSV with header
//! `post_id,post_text,normalized_claim`; TSV and JSON Lines are accepted as
//! alternates. Text is stored raw — no lowercasing, no URL stripping —
//! strategies decide what to do with it.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Split::Train => write!(f, "train"),
            Split::Validation => write!(f, "validation"),
            Split::Test => write!(f, "test"),
        }
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "validation" | "val" | "dev" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split {other:?} (train|validation|test)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Csv,
    Tsv,
    Jsonl,
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(CorpusFormat::Csv),
            "tsv" => Ok(CorpusFormat::Tsv),
            "jsonl" => Ok(CorpusFormat::Jsonl),
            other => Err(format!("unknown corpus format {other:?} (csv|tsv|jsonl)")),
        }
    }
}

impl CorpusFormat {
    /// Guess from the file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tsv") => CorpusFormat::Tsv,
            Some("jsonl") | Some("ndjson") => CorpusFormat::Jsonl,
            _ => CorpusFormat::Csv,
        }
    }
}

/// Column names to read from the source file; the Open Question about the
/// organizers' exact headers is covered by remapping these.
#[derive(Debug, Clone)]
pub struct ColumnMap {
    pub post_id: String,
    pub post_text: String,
    pub normalized_claim: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            post_id: "post_id".to_string(),
            post_text: "post_text".to_string(),
            normalized_claim: "normalized_claim".to_string(),
        }
    }
}

/// A social media post as provided by the task data. Text may be empty when
/// the source row was empty; such rows are kept and flagged on the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostRecord {
    pub post_id: String,
    pub text: String,
}

/// Reference normalized claim for a post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldClaim {
    pub post_id: String,
    pub text: String,
}

/// Immutable, ordered post/claim collection. Safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub split: Split,
    pub records: Vec<PostRecord>,
    pub gold: BTreeMap<String, GoldClaim>,
    /// Post ids whose text was empty in the source file.
    pub empty_text_ids: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {0}: {1}")]
    Io(String, #[source] io::Error),
    #[error("malformed row at line {0}: {1}")]
    MalformedRow(usize, String),
    #[error("duplicate post_id {0:?}")]
    DuplicateId(String),
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("few-shot pool requires the train split, got {0}")]
    WrongSplit(Split),
    #[error("no gold claims available for a few-shot pool")]
    EmptyPool,
}

impl Corpus {
    pub fn record(&self, post_id: &str) -> Option<&PostRecord> {
        self.records.iter().find(|r| r.post_id == post_id)
    }

    pub fn gold_for(&self, post_id: &str) -> Option<&GoldClaim> {
        self.gold.get(post_id)
    }

    /// Position of a post in file order, used to keep downstream outputs in
    /// corpus order.
    pub fn position(&self, post_id: &str) -> Option<usize> {
        self.records.iter().position(|r| r.post_id == post_id)
    }
}

pub fn load_corpus(path: &Path, format: CorpusFormat, split: Split) -> Result<Corpus, CorpusError> {
    load_corpus_with_columns(path, format, split, &ColumnMap::default())
}

pub fn load_corpus_with_columns(
    path: &Path,
    format: CorpusFormat,
    split: Split,
    columns: &ColumnMap,
) -> Result<Corpus, CorpusError> {
    let text =
        fs::read_to_string(path).map_err(|e| CorpusError::Io(path.display().to_string(), e))?;
    match format {
        CorpusFormat::Csv => parse_delimited(&text, b',', split, columns),
        CorpusFormat::Tsv => parse_delimited(&text, b'\t', split, columns),
        CorpusFormat::Jsonl => parse_jsonl(&text, split, columns),
    }
}

fn parse_delimited(
    text: &str,
    delimiter: u8,
    split: Split,
    columns: &ColumnMap,
) -> Result<Corpus, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(false)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| CorpusError::MalformedRow(1, e.to_string()))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let id_col =
        col(&columns.post_id).ok_or_else(|| CorpusError::MissingColumn(columns.post_id.clone()))?;
    let text_col = col(&columns.post_text)
        .ok_or_else(|| CorpusError::MissingColumn(columns.post_text.clone()))?;
    let claim_col = col(&columns.normalized_claim);

    let mut builder = CorpusBuilder::new(split);
    for (idx, row) in reader.records().enumerate() {
        let line = idx + 2; // header is line 1
        let row = row.map_err(|e| CorpusError::MalformedRow(line, e.to_string()))?;
        let post_id = row
            .get(id_col)
            .ok_or_else(|| CorpusError::MalformedRow(line, "missing post_id field".to_string()))?;
        let post_text = row.get(text_col).unwrap_or("");
        let claim = claim_col.and_then(|c| row.get(c)).filter(|c| !c.is_empty());
        builder.push(line, post_id, post_text, claim)?;
    }
    Ok(builder.finish())
}

fn parse_jsonl(text: &str, split: Split, columns: &ColumnMap) -> Result<Corpus, CorpusError> {
    let mut builder = CorpusBuilder::new(split);
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(raw)
            .map_err(|e| CorpusError::MalformedRow(line, e.to_string()))?;
        let post_id = value
            .get(&columns.post_id)
            .and_then(|v| v.as_str())
            .ok_or_else(|| {
                CorpusError::MalformedRow(line, format!("missing {:?}", columns.post_id))
            })?;
        let post_text = value
            .get(&columns.post_text)
            .and_then(|v| v.as_str())
            .unwrap_or("");
        let claim = value
            .get(&columns.normalized_claim)
            .and_then(|v| v.as_str())
            .filter(|c| !c.is_empty());
        builder.push(line, post_id, post_text, claim)?;
    }
    Ok(builder.finish())
}

struct CorpusBuilder {
    corpus: Corpus,
}

impl CorpusBuilder {
    fn new(split: Split) -> Self {
        Self {
            corpus: Corpus {
                split,
                records: Vec::new(),
                gold: BTreeMap::new(),
                empty_text_ids: Vec::new(),
            },
        }
    }

    fn push(
        &mut self,
        line: usize,
        post_id: &str,
        post_text: &str,
        claim: Option<&str>,
    ) -> Result<(), CorpusError> {
        if post_id.is_empty() {
            return Err(CorpusError::MalformedRow(line, "empty post_id".to_string()));
        }
        if self.corpus.gold.contains_key(post_id)
            || self.corpus.records.iter().any(|r| r.post_id == post_id)
        {
            return Err(CorpusError::DuplicateId(post_id.to_string()));
        }
        if post_text.is_empty() {
            self.corpus.empty_text_ids.push(post_id.to_string());
        }
        self.corpus.records.push(PostRecord {
            post_id: post_id.to_string(),
            text: post_text.to_string(),
        });
        if let Some(claim) = claim {
            self.corpus.gold.insert(
                post_id.to_string(),
                GoldClaim {
                    post_id: post_id.to_string(),
                    text: claim.to_string(),
                },
            );
        }
        Ok(())
    }

    fn finish(self) -> Corpus {
        self.corpus
    }
}

/// Write a corpus back out as canonical CSV. Reloading the result yields an
/// equal corpus.
pub fn write_corpus_csv(corpus: &Corpus, path: &Path) -> Result<(), CorpusError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CorpusError::Io(path.display().to_string(), io::Error::other(e)))?;
    writer
        .write_record(["post_id", "post_text", "normalized_claim"])
        .map_err(|e| CorpusError::Io(path.display().to_string(), io::Error::other(e)))?;
    for record in &corpus.records {
        let claim = corpus
            .gold
            .get(&record.post_id)
            .map(|g| g.text.as_str())
            .unwrap_or("");
        writer
            .write_record([record.post_id.as_str(), record.text.as_str(), claim])
            .map_err(|e| CorpusError::Io(path.display().to_string(), io::Error::other(e)))?;
    }
    writer
        .flush()
        .map_err(|e| CorpusError::Io(path.display().to_string(), e))?;
    Ok(())
}

/// All (post, gold) pairs of a training corpus, in file order.
pub fn few_shot_pool(corpus: &Corpus) -> Result<Vec<(PostRecord, GoldClaim)>, CorpusError> {
    if corpus.split != Split::Train {
        return Err(CorpusError::WrongSplit(corpus.split));
    }
    let pool: Vec<(PostRecord, GoldClaim)> = corpus
        .records
        .iter()
        .filter_map(|r| corpus.gold.get(&r.post_id).map(|g| (r.clone(), g.clone())))
        .collect();
    if pool.is_empty() {
        return Err(CorpusError::EmptyPool);
    }
    Ok(pool)
}
