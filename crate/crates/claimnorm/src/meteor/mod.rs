//! Self-contained METEOR scorer: tokenizer, Porter stemmer, stage-wise
//! unigram alignment and the fragmentation penalty.
//!
//! Matching runs stage by stage over the tokens that earlier stages left
//! unmatched. Within a stage, hypothesis positions are scanned from the end
//! and each one is paired with the highest-index reference position that
//! matches under the stage relation; this mirrors the observable behavior of
//! the toolkit the scores are parity-tested against, which matters for chunk
//! counts when tokens repeat.

mod stemmer;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use stemmer::porter_stem;

/// Identifies the canonical tokenizer; recorded in run manifests because
/// scores depend on it.
pub const TOKENIZER_VERSION: &str = "whitespace-punct/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Exact,
    Stem,
    Synonym,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Exact => write!(f, "exact"),
            Stage::Stem => write!(f, "stem"),
            Stage::Synonym => write!(f, "synonym"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeteorParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub stages: Vec<Stage>,
}

impl Default for MeteorParams {
    fn default() -> Self {
        Self {
            alpha: 0.9,
            beta: 3.0,
            gamma: 0.5,
            stages: vec![Stage::Exact, Stage::Stem],
        }
    }
}

impl MeteorParams {
    pub fn with_stages(mut self, stages: Vec<Stage>) -> Self {
        self.stages = stages;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignmentMatch {
    pub hyp_index: usize,
    pub ref_index: usize,
    pub stage: Stage,
}

/// Everything METEOR computed for one hypothesis/reference pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeteorBreakdown {
    pub matches: usize,
    pub chunks: usize,
    pub precision: f64,
    pub recall: f64,
    pub fmean: f64,
    pub penalty: f64,
    pub score: f64,
}

impl MeteorBreakdown {
    fn zero() -> Self {
        Self {
            matches: 0,
            chunks: 0,
            precision: 0.0,
            recall: 0.0,
            fmean: 0.0,
            penalty: 0.0,
            score: 0.0,
        }
    }
}

/// Word -> synonyms, exact-string lookup. Loaded from UTF-8 lines of
/// `word<TAB>syn1,syn2,...`.
#[derive(Debug, Clone, Default)]
pub struct SynonymTable {
    entries: BTreeMap<String, Vec<String>>,
}

impl SynonymTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, word: &str, synonyms: &[&str]) {
        self.entries.insert(
            word.to_lowercase(),
            synonyms.iter().map(|s| s.to_lowercase()).collect(),
        );
    }

    pub fn load(path: &Path) -> Result<Self, MeteorError> {
        let text = fs::read_to_string(path)
            .map_err(|e| MeteorError::SynonymTableIo(path.display().to_string(), e.to_string()))?;
        let mut table = Self::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((word, rest)) = line.split_once('\t') else {
                return Err(MeteorError::SynonymTableFormat(line.to_string()));
            };
            let syns: Vec<&str> = rest.split(',').map(str::trim).collect();
            table.insert(word.trim(), &syns);
        }
        Ok(table)
    }

    fn related(&self, hyp_token: &str, ref_token: &str) -> bool {
        hyp_token == ref_token
            || self
                .entries
                .get(hyp_token)
                .is_some_and(|syns| syns.iter().any(|s| s == ref_token))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MeteorError {
    #[error("synonym stage requested but no synonym table supplied")]
    SynonymStageWithoutTable,
    #[error("no pairs to score")]
    EmptyInput,
    #[error("cannot read synonym table {0}: {1}")]
    SynonymTableIo(String, String),
    #[error("malformed synonym table line (expected word<TAB>syn1,syn2,...): {0}")]
    SynonymTableFormat(String),
}

/// Lowercase, split on whitespace, strip leading/trailing non-alphanumeric
/// characters from each token, drop empties. Internal punctuation survives,
/// so "Biden's" tokenizes to "biden's".
pub fn meteor_tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|raw| {
            raw.to_lowercase()
                .trim_matches(|c: char| !c.is_alphanumeric())
                .to_string()
        })
        .filter(|t| !t.is_empty())
        .collect()
}

/// One matching stage over the not-yet-matched token lists. Scans hypothesis
/// entries from the end, pairing each with the highest-index reference entry
/// the relation accepts; both sides of a pair are consumed.
fn match_stage(
    hyp_left: &mut Vec<(usize, String)>,
    ref_left: &mut Vec<(usize, String)>,
    stage: Stage,
    relation: impl Fn(&str, &str) -> bool,
    out: &mut Vec<AlignmentMatch>,
) {
    let mut i = hyp_left.len();
    while i > 0 {
        i -= 1;
        let mut hit = None;
        let mut j = ref_left.len();
        while j > 0 {
            j -= 1;
            if relation(&hyp_left[i].1, &ref_left[j].1) {
                hit = Some(j);
                break;
            }
        }
        if let Some(j) = hit {
            out.push(AlignmentMatch {
                hyp_index: hyp_left[i].0,
                ref_index: ref_left[j].0,
                stage,
            });
            hyp_left.remove(i);
            ref_left.remove(j);
        }
    }
}

/// Stage-wise alignment between hypothesis and reference token lists.
/// Returned matches are sorted by hypothesis index.
pub fn align(
    hyp: &[String],
    reference: &[String],
    params: &MeteorParams,
    synonyms: Option<&SynonymTable>,
) -> Result<Vec<AlignmentMatch>, MeteorError> {
    let mut hyp_left: Vec<(usize, String)> = hyp.iter().cloned().enumerate().collect();
    let mut ref_left: Vec<(usize, String)> = reference.iter().cloned().enumerate().collect();
    let mut matches = Vec::new();

    for stage in &params.stages {
        match stage {
            Stage::Exact => match_stage(
                &mut hyp_left,
                &mut ref_left,
                Stage::Exact,
                |a, b| a == b,
                &mut matches,
            ),
            Stage::Stem => {
                let mut hyp_stems: Vec<(usize, String)> =
                    hyp_left.iter().map(|(i, t)| (*i, porter_stem(t))).collect();
                let mut ref_stems: Vec<(usize, String)> =
                    ref_left.iter().map(|(i, t)| (*i, porter_stem(t))).collect();
                match_stage(
                    &mut hyp_stems,
                    &mut ref_stems,
                    Stage::Stem,
                    |a, b| a == b,
                    &mut matches,
                );
                let hyp_kept: Vec<usize> = hyp_stems.iter().map(|(i, _)| *i).collect();
                let ref_kept: Vec<usize> = ref_stems.iter().map(|(i, _)| *i).collect();
                hyp_left.retain(|(i, _)| hyp_kept.contains(i));
                ref_left.retain(|(i, _)| ref_kept.contains(i));
            }
            Stage::Synonym => {
                let table = synonyms.ok_or(MeteorError::SynonymStageWithoutTable)?;
                match_stage(
                    &mut hyp_left,
                    &mut ref_left,
                    Stage::Synonym,
                    |a, b| table.related(a, b),
                    &mut matches,
                );
            }
        }
    }

    matches.sort_by_key(|m| m.hyp_index);
    Ok(matches)
}

/// Number of maximal runs of matches that are contiguous in both the
/// hypothesis and the reference.
pub fn count_chunks(matches: &[AlignmentMatch]) -> usize {
    if matches.is_empty() {
        return 0;
    }
    let mut sorted: Vec<&AlignmentMatch> = matches.iter().collect();
    sorted.sort_by_key(|m| m.hyp_index);
    let mut chunks = 1;
    for pair in sorted.windows(2) {
        let contiguous = pair[1].hyp_index == pair[0].hyp_index + 1
            && pair[1].ref_index == pair[0].ref_index + 1;
        if !contiguous {
            chunks += 1;
        }
    }
    chunks
}

fn breakdown_from_counts(
    matches: usize,
    chunks: usize,
    hyp_len: usize,
    ref_len: usize,
    params: &MeteorParams,
) -> MeteorBreakdown {
    if matches == 0 || hyp_len == 0 || ref_len == 0 {
        return MeteorBreakdown::zero();
    }
    let m = matches as f64;
    let precision = m / hyp_len as f64;
    let recall = m / ref_len as f64;
    let fmean = (precision * recall) / (params.alpha * precision + (1.0 - params.alpha) * recall);
    let penalty = params.gamma * (chunks as f64 / m).powf(params.beta);
    MeteorBreakdown {
        matches,
        chunks,
        precision,
        recall,
        fmean,
        penalty,
        score: fmean * (1.0 - penalty),
    }
}

/// Score an already-tokenized pair.
pub fn meteor_tokens(
    hyp: &[String],
    reference: &[String],
    params: &MeteorParams,
    synonyms: Option<&SynonymTable>,
) -> Result<MeteorBreakdown, MeteorError> {
    if hyp.is_empty() || reference.is_empty() {
        return Ok(MeteorBreakdown::zero());
    }
    let matches = align(hyp, reference, params, synonyms)?;
    Ok(breakdown_from_counts(
        matches.len(),
        count_chunks(&matches),
        hyp.len(),
        reference.len(),
        params,
    ))
}

/// Tokenize and score one hypothesis against one reference.
pub fn meteor_single(hypothesis: &str, reference: &str, params: &MeteorParams) -> MeteorBreakdown {
    meteor_single_with_synonyms(hypothesis, reference, params, None)
        .expect("default stages never require a synonym table")
}

pub fn meteor_single_with_synonyms(
    hypothesis: &str,
    reference: &str,
    params: &MeteorParams,
    synonyms: Option<&SynonymTable>,
) -> Result<MeteorBreakdown, MeteorError> {
    let hyp = meteor_tokenize(hypothesis);
    let reference = meteor_tokenize(reference);
    meteor_tokens(&hyp, &reference, params, synonyms)
}

/// Mean score over (hypothesis, reference) pairs, plus the per-pair
/// breakdowns in input order.
pub fn meteor_corpus(
    pairs: &[(String, String)],
    params: &MeteorParams,
) -> Result<(f64, Vec<MeteorBreakdown>), MeteorError> {
    if pairs.is_empty() {
        return Err(MeteorError::EmptyInput);
    }
    let per_pair: Vec<MeteorBreakdown> = pairs
        .iter()
        .map(|(h, r)| meteor_single(h, r, params))
        .collect();
    let mean = per_pair.iter().map(|b| b.score).sum::<f64>() / per_pair.len() as f64;
    Ok((mean, per_pair))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(
            meteor_tokenize("The cat sat."),
            toks(&["the", "cat", "sat"])
        );
        assert_eq!(meteor_tokenize(""), Vec::<String>::new());
        assert_eq!(
            meteor_tokenize("Joe Biden's house"),
            toks(&["joe", "biden's", "house"])
        );
    }

    #[test]
    fn tokenize_drops_bare_punctuation() {
        assert_eq!(meteor_tokenize(":) ... !!"), Vec::<String>::new());
        assert_eq!(
            meteor_tokenize("$174,000 per year"),
            toks(&["174,000", "per", "year"])
        );
    }

    #[test]
    fn align_identity() {
        let t = toks(&["a", "b"]);
        let m = align(&t, &t, &MeteorParams::default(), None).unwrap();
        assert_eq!(
            m,
            vec![
                AlignmentMatch {
                    hyp_index: 0,
                    ref_index: 0,
                    stage: Stage::Exact
                },
                AlignmentMatch {
                    hyp_index: 1,
                    ref_index: 1,
                    stage: Stage::Exact
                },
            ]
        );
    }

    #[test]
    fn align_stem_stage() {
        let m = align(
            &toks(&["runs"]),
            &toks(&["running"]),
            &MeteorParams::default(),
            None,
        )
        .unwrap();
        assert_eq!(
            m,
            vec![AlignmentMatch {
                hyp_index: 0,
                ref_index: 0,
                stage: Stage::Stem
            }]
        );
    }

    #[test]
    fn align_disjoint() {
        let params = MeteorParams::default().with_stages(vec![Stage::Exact]);
        let m = align(&toks(&["x"]), &toks(&["y"]), &params, None).unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn align_repeated_tokens_pair_from_the_tail() {
        // With repeats the scan pairs the trailing occurrences, which keeps
        // "b a" aligned as one contiguous chunk.
        let m = align(
            &toks(&["a", "b", "a"]),
            &toks(&["b", "a"]),
            &MeteorParams::default(),
            None,
        )
        .unwrap();
        assert_eq!(
            m,
            vec![
                AlignmentMatch {
                    hyp_index: 1,
                    ref_index: 0,
                    stage: Stage::Exact
                },
                AlignmentMatch {
                    hyp_index: 2,
                    ref_index: 1,
                    stage: Stage::Exact
                },
            ]
        );
        assert_eq!(count_chunks(&m), 1);
    }

    #[test]
    fn synonym_stage_needs_table() {
        let params = MeteorParams::default().with_stages(vec![Stage::Exact, Stage::Synonym]);
        let err = align(&toks(&["car"]), &toks(&["automobile"]), &params, None).unwrap_err();
        assert!(matches!(err, MeteorError::SynonymStageWithoutTable));
    }

    #[test]
    fn synonym_stage_matches_via_table() {
        let mut table = SynonymTable::new();
        table.insert("car", &["automobile"]);
        let params = MeteorParams::default().with_stages(vec![Stage::Exact, Stage::Synonym]);
        let m = align(
            &toks(&["car"]),
            &toks(&["automobile"]),
            &params,
            Some(&table),
        )
        .unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].stage, Stage::Synonym);
    }

    #[test]
    fn chunk_counting() {
        let mk = |pairs: &[(usize, usize)]| -> Vec<AlignmentMatch> {
            pairs
                .iter()
                .map(|&(h, r)| AlignmentMatch {
                    hyp_index: h,
                    ref_index: r,
                    stage: Stage::Exact,
                })
                .collect()
        };
        assert_eq!(count_chunks(&mk(&[(0, 0), (1, 1), (2, 2)])), 1);
        assert_eq!(count_chunks(&mk(&[(0, 0), (1, 1), (3, 3)])), 2);
        assert_eq!(count_chunks(&mk(&[])), 0);
    }

    #[test]
    fn identity_closed_form_six_tokens() {
        let b = meteor_single("a b c d e f", "a b c d e f", &MeteorParams::default());
        let expected = 1.0 - 0.5 / 216.0;
        assert!(
            (b.score - expected).abs() < 1e-12,
            "{} vs {}",
            b.score,
            expected
        );
    }

    #[test]
    fn hand_derived_pair() {
        let b = meteor_single("the cat", "the cat sat", &MeteorParams::default());
        assert_eq!(b.matches, 2);
        assert_eq!(b.chunks, 1);
        assert!((b.precision - 1.0).abs() < 1e-12);
        assert!((b.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((b.fmean - 0.689_655_172_413_793_1).abs() < 1e-9);
        assert!((b.penalty - 0.0625).abs() < 1e-12);
        assert!((b.score - 0.646_551_724_137_931).abs() < 1e-6);
    }

    #[test]
    fn zero_match_pair() {
        let b = meteor_single("alpha beta", "gamma delta", &MeteorParams::default());
        assert_eq!(b.score, 0.0);
        assert_eq!(b.matches, 0);
    }

    #[test]
    fn empty_sides_score_zero() {
        assert_eq!(
            meteor_single("", "the cat", &MeteorParams::default()).score,
            0.0
        );
        assert_eq!(
            meteor_single("the cat", "", &MeteorParams::default()).score,
            0.0
        );
    }

    #[test]
    fn corpus_mean() {
        let pairs = vec![
            ("a b".to_string(), "a b".to_string()),
            ("x".to_string(), "y".to_string()),
        ];
        let (mean, per) = meteor_corpus(&pairs, &MeteorParams::default()).unwrap();
        assert_eq!(per.len(), 2);
        let identity2 = 1.0 - 0.5 / 8.0;
        assert!((per[0].score - identity2).abs() < 1e-12);
        assert_eq!(per[1].score, 0.0);
        assert!((mean - identity2 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn corpus_empty_is_error() {
        assert!(matches!(
            meteor_corpus(&[], &MeteorParams::default()),
            Err(MeteorError::EmptyInput)
        ));
    }

    #[test]
    fn corpus_single_pair() {
        let pairs = vec![("a b c".to_string(), "a b c".to_string())];
        let (mean, per) = meteor_corpus(&pairs, &MeteorParams::default()).unwrap();
        assert_eq!(mean, per[0].score);
    }

    #[test]
    fn stem_stage_never_decreases_matches() {
        let cases = [
            (
                vec!["running", "cats", "quickly"],
                vec!["run", "cat", "quick"],
            ),
            (vec!["the", "dogs"], vec!["dog", "the"]),
            (vec!["a"], vec!["b"]),
        ];
        for (h, r) in cases {
            let h = toks(&h);
            let r = toks(&r);
            let exact_only = MeteorParams::default().with_stages(vec![Stage::Exact]);
            let with_stem = MeteorParams::default();
            let m_exact = align(&h, &r, &exact_only, None).unwrap().len();
            let m_stem = align(&h, &r, &with_stem, None).unwrap().len();
            assert!(m_stem >= m_exact);
        }
    }
}
