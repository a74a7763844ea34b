//! Scoring runs against gold claims: per-example METEOR, aggregate mean with
//! standard error, optional bootstrap intervals, and report rendering.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::meteor::{meteor_single, MeteorBreakdown, MeteorParams};
use crate::pipelines::ExtractionTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub post_id: String,
    pub strategy_id: String,
    pub claim: String,
    pub gold: String,
    pub breakdown: MeteorBreakdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCi {
    pub low: f64,
    pub high: f64,
    pub resamples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub strategy_id: String,
    pub n: usize,
    pub mean: f64,
    pub sem: f64,
    pub bootstrap_ci: Option<BootstrapCi>,
    pub records: Vec<EvalRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("post {0} has no gold claim")]
    MissingGold(String),
    #[error("no scores to aggregate")]
    EmptyInput,
    #[error("runs cover different post sets")]
    PostSetMismatch,
}

/// Arithmetic mean and standard error of the mean (sample std, n-1; sem is 0
/// when n < 2).
pub fn mean_and_sem(scores: &[f64]) -> (f64, f64) {
    let n = scores.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = scores.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let variance = scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    (mean, variance.sqrt() / (n as f64).sqrt())
}

/// Score every trace against its gold claim. Records come back in corpus
/// order regardless of trace order.
pub fn evaluate_run(
    traces: &[ExtractionTrace],
    corpus: &Corpus,
    params: &MeteorParams,
) -> Result<EvalReport, EvalError> {
    let mut positioned: Vec<(usize, EvalRecord)> = Vec::with_capacity(traces.len());
    for trace in traces {
        let gold = corpus
            .gold_for(&trace.post_id)
            .ok_or_else(|| EvalError::MissingGold(trace.post_id.clone()))?;
        let position = corpus
            .position(&trace.post_id)
            .ok_or_else(|| EvalError::MissingGold(trace.post_id.clone()))?;
        let breakdown = meteor_single(&trace.final_claim, &gold.text, params);
        positioned.push((
            position,
            EvalRecord {
                post_id: trace.post_id.clone(),
                strategy_id: trace.strategy_id.clone(),
                claim: trace.final_claim.clone(),
                gold: gold.text.clone(),
                breakdown,
            },
        ));
    }
    positioned.sort_by_key(|(position, _)| *position);
    let records: Vec<EvalRecord> = positioned.into_iter().map(|(_, r)| r).collect();
    let scores: Vec<f64> = records.iter().map(|r| r.breakdown.score).collect();
    let (mean, sem) = mean_and_sem(&scores);
    Ok(EvalReport {
        strategy_id: records
            .first()
            .map(|r| r.strategy_id.clone())
            .unwrap_or_default(),
        n: records.len(),
        mean,
        sem,
        bootstrap_ci: None,
        records,
    })
}

/// xorshift64*; bit-stable everywhere, which keeps seeded intervals
/// reproducible across platforms and dependency upgrades.
struct XorShift64 {
    state: u64,
}

impl XorShift64 {
    fn new(seed: u64) -> Self {
        // splitmix64 scramble separates adjacent seeds and maps 0 away
        let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        Self { state: z.max(1) }
    }

    fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.state = x;
        x.wrapping_mul(0x2545_f491_4f6c_dd1d)
    }

    fn next_index(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let position = q * (n as f64 - 1.0);
    let lower = position.floor() as usize;
    let upper = (lower + 1).min(n - 1);
    let fraction = position - lower as f64;
    sorted[lower] * (1.0 - fraction) + sorted[upper] * fraction
}

/// Percentile bootstrap of the mean with a seeded deterministic generator.
pub fn bootstrap_ci(
    scores: &[f64],
    resamples: usize,
    seed: u64,
    level: f64,
) -> Result<(f64, f64), EvalError> {
    if scores.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut rng = XorShift64::new(seed);
    let mut means = Vec::with_capacity(resamples);
    for _ in 0..resamples.max(1) {
        let sum: f64 = (0..scores.len())
            .map(|_| scores[rng.next_index(scores.len())])
            .sum();
        means.push(sum / scores.len() as f64);
    }
    means.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok((quantile(&means, tail), quantile(&means, 1.0 - tail)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    MarkdownTable,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "markdown" | "markdown_table" | "md" => Ok(ReportFormat::MarkdownTable),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown report format {other:?} (markdown|csv)")),
        }
    }
}

/// Render reports sorted by mean descending; means to four decimals, sem
/// only when n >= 2. Byte-deterministic for fixed inputs.
pub fn render_report(reports: &[EvalReport], format: ReportFormat) -> String {
    let mut sorted: Vec<&EvalReport> = reports.iter().collect();
    sorted.sort_by(|a, b| {
        b.mean
            .total_cmp(&a.mean)
            .then_with(|| a.strategy_id.cmp(&b.strategy_id))
    });
    let sem_cell = |r: &EvalReport| {
        if r.n >= 2 {
            format!("{:.4}", r.sem)
        } else {
            String::new()
        }
    };
    match format {
        ReportFormat::Csv => {
            let mut out = String::from("strategy_id,n,mean,sem\n");
            for r in sorted {
                out.push_str(&format!(
                    "{},{},{:.4},{}\n",
                    r.strategy_id,
                    r.n,
                    r.mean,
                    sem_cell(r)
                ));
            }
            out
        }
        ReportFormat::MarkdownTable => {
            let mut out = String::from("| strategy | n | mean | sem |\n|---|---|---|---|\n");
            for r in sorted {
                out.push_str(&format!(
                    "| {} | {} | {:.4} | {} |\n",
                    r.strategy_id,
                    r.n,
                    r.mean,
                    sem_cell(r)
                ));
            }
            out
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunComparison {
    pub strategy_a: String,
    pub strategy_b: String,
    /// (post_id, score_a - score_b) in corpus order.
    pub deltas: Vec<(String, f64)>,
    pub mean_delta: f64,
    pub a_wins: usize,
    pub b_wins: usize,
    pub ties: usize,
}

/// Paired per-post comparison of two runs over the same post set.
pub fn compare_runs(a: &EvalReport, b: &EvalReport) -> Result<RunComparison, EvalError> {
    let ids_a: BTreeSet<&str> = a.records.iter().map(|r| r.post_id.as_str()).collect();
    let ids_b: BTreeSet<&str> = b.records.iter().map(|r| r.post_id.as_str()).collect();
    if ids_a != ids_b || a.records.len() != b.records.len() {
        return Err(EvalError::PostSetMismatch);
    }
    let score_b = |post_id: &str| {
        b.records
            .iter()
            .find(|r| r.post_id == post_id)
            .map(|r| r.breakdown.score)
            .expect("post sets match")
    };
    let mut deltas = Vec::with_capacity(a.records.len());
    let (mut a_wins, mut b_wins, mut ties) = (0, 0, 0);
    for record in &a.records {
        let delta = record.breakdown.score - score_b(&record.post_id);
        if delta > 0.0 {
            a_wins += 1;
        } else if delta < 0.0 {
            b_wins += 1;
        } else {
            ties += 1;
        }
        deltas.push((record.post_id.clone(), delta));
    }
    let mean_delta = deltas.iter().map(|(_, d)| d).sum::<f64>() / deltas.len().max(1) as f64;
    Ok(RunComparison {
        strategy_a: a.strategy_id.clone(),
        strategy_b: b.strategy_id.clone(),
        deltas,
        mean_delta,
        a_wins,
        b_wins,
        ties,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{load_corpus, CorpusFormat, Split};
    use crate::meteor::meteor_corpus;
    use std::io::Write;

    fn trace(post_id: &str, strategy: &str, claim: &str) -> ExtractionTrace {
        ExtractionTrace {
            post_id: post_id.to_string(),
            strategy_id: strategy.to_string(),
            run_id: String::new(),
            steps: vec![],
            final_claim: claim.to_string(),
            flags: vec![],
        }
    }

    fn corpus_fixture() -> (tempfile::NamedTempFile, Corpus) {
        let mut f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        write!(
            f,
            "post_id,post_text,normalized_claim\n\
             p1,post one,the cat sat on the mat\n\
             p2,post two,dogs chase cats\n\
             p3,post three,water is wet today\n"
        )
        .unwrap();
        let corpus = load_corpus(f.path(), CorpusFormat::Csv, Split::Validation).unwrap();
        (f, corpus)
    }

    #[test]
    fn hand_computed_mean_and_sem() {
        let (mean, sem) = mean_and_sem(&[0.2, 0.4, 0.6]);
        assert!((mean - 0.4).abs() < 1e-12);
        assert!((sem - 0.2 / 3f64.sqrt()).abs() < 1e-12);
        assert!((sem - 0.115_470_053_837_925_15).abs() < 1e-9);
    }

    #[test]
    fn sem_zero_for_single_score() {
        let (mean, sem) = mean_and_sem(&[0.7]);
        assert_eq!(mean, 0.7);
        assert_eq!(sem, 0.0);
    }

    #[test]
    fn sem_invariant_under_permutation() {
        let (m1, s1) = mean_and_sem(&[0.1, 0.5, 0.9, 0.3]);
        let (m2, s2) = mean_and_sem(&[0.9, 0.1, 0.3, 0.5]);
        assert!((m1 - m2).abs() < 1e-15);
        assert!((s1 - s2).abs() < 1e-15);
    }

    #[test]
    fn evaluate_orders_by_corpus_and_matches_meteor_corpus() {
        let (_f, corpus) = corpus_fixture();
        // traces deliberately out of corpus order
        let traces = vec![
            trace("p3", "s", "water is wet"),
            trace("p1", "s", "the cat sat on the mat"),
            trace("p2", "s", "cats chase dogs"),
        ];
        let report = evaluate_run(&traces, &corpus, &MeteorParams::default()).unwrap();
        let ids: Vec<&str> = report.records.iter().map(|r| r.post_id.as_str()).collect();
        assert_eq!(ids, vec!["p1", "p2", "p3"]);

        let pairs: Vec<(String, String)> = report
            .records
            .iter()
            .map(|r| (r.claim.clone(), r.gold.clone()))
            .collect();
        let (mean, _) = meteor_corpus(&pairs, &MeteorParams::default()).unwrap();
        assert!((report.mean - mean).abs() < 1e-12);
    }

    #[test]
    fn evaluate_missing_gold_is_an_error() {
        let (_f, corpus) = corpus_fixture();
        let traces = vec![trace("p9", "s", "claim")];
        assert!(matches!(
            evaluate_run(&traces, &corpus, &MeteorParams::default()),
            Err(EvalError::MissingGold(id)) if id == "p9"
        ));
    }

    #[test]
    fn bootstrap_degenerate_distribution() {
        let (low, high) = bootstrap_ci(&[0.3, 0.3, 0.3], 200, 7, 0.95).unwrap();
        assert_eq!((low, high), (0.3, 0.3));
    }

    #[test]
    fn bootstrap_deterministic_for_seed() {
        let scores = [0.1, 0.4, 0.45, 0.6, 0.9, 0.2];
        let a = bootstrap_ci(&scores, 1000, 42, 0.95).unwrap();
        let b = bootstrap_ci(&scores, 1000, 42, 0.95).unwrap();
        assert_eq!(a, b);
        let c = bootstrap_ci(&scores, 1000, 43, 0.95).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn bootstrap_interval_contains_sample_mean() {
        let scores: Vec<f64> = (0..100).map(|i| (i % 17) as f64 / 16.0).collect();
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        let (low, high) = bootstrap_ci(&scores, 2000, 9, 0.95).unwrap();
        assert!(low <= mean && mean <= high, "{low} <= {mean} <= {high}");
        assert!(low < high);
    }

    #[test]
    fn bootstrap_empty_errors() {
        assert!(matches!(
            bootstrap_ci(&[], 100, 1, 0.95),
            Err(EvalError::EmptyInput)
        ));
    }

    fn report(strategy: &str, scores: &[f64]) -> EvalReport {
        let records = scores
            .iter()
            .enumerate()
            .map(|(i, s)| EvalRecord {
                post_id: format!("p{i}"),
                strategy_id: strategy.to_string(),
                claim: String::new(),
                gold: String::new(),
                breakdown: MeteorBreakdown {
                    matches: 0,
                    chunks: 0,
                    precision: 0.0,
                    recall: 0.0,
                    fmean: 0.0,
                    penalty: 0.0,
                    score: *s,
                },
            })
            .collect::<Vec<_>>();
        let (mean, sem) = mean_and_sem(scores);
        EvalReport {
            strategy_id: strategy.to_string(),
            n: records.len(),
            mean,
            sem,
            bootstrap_ci: None,
            records,
        }
    }

    #[test]
    fn render_sorts_by_mean_descending() {
        let reports = vec![report("a", &[0.31, 0.31]), report("b", &[0.56, 0.56])];
        let out = render_report(&reports, ReportFormat::Csv);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "strategy_id,n,mean,sem");
        assert!(lines[1].starts_with("b,"));
        assert!(lines[2].starts_with("a,"));
    }

    #[test]
    fn render_empty_is_header_only() {
        assert_eq!(
            render_report(&[], ReportFormat::Csv),
            "strategy_id,n,mean,sem\n"
        );
        let md = render_report(&[], ReportFormat::MarkdownTable);
        assert_eq!(md.lines().count(), 2);
    }

    #[test]
    fn render_rounds_to_four_decimals() {
        let r = report("flan", &[0.55690001, 0.55690001]);
        let out = render_report(&[r], ReportFormat::Csv);
        assert!(out.contains("flan,2,0.5569,"), "got {out:?}");
    }

    #[test]
    fn render_hides_sem_for_single_run() {
        let r = report("solo", &[0.5]);
        let out = render_report(&[r], ReportFormat::Csv);
        assert!(out.lines().nth(1).unwrap().ends_with(','));
    }

    #[test]
    fn render_byte_deterministic() {
        let reports = vec![report("a", &[0.2, 0.4]), report("b", &[0.3, 0.1])];
        assert_eq!(
            render_report(&reports, ReportFormat::MarkdownTable),
            render_report(&reports, ReportFormat::MarkdownTable)
        );
    }

    #[test]
    fn compare_identical_runs_all_zero() {
        let a = report("a", &[0.2, 0.4, 0.6]);
        let b = report("b", &[0.2, 0.4, 0.6]);
        let cmp = compare_runs(&a, &b).unwrap();
        assert!(cmp.deltas.iter().all(|(_, d)| *d == 0.0));
        assert_eq!(cmp.ties, 3);
        assert_eq!(cmp.mean_delta, 0.0);
    }

    #[test]
    fn compare_disjoint_post_sets_error() {
        let a = report("a", &[0.2]);
        let mut b = report("b", &[0.3]);
        b.records[0].post_id = "other".to_string();
        assert!(matches!(
            compare_runs(&a, &b),
            Err(EvalError::PostSetMismatch)
        ));
    }

    #[test]
    fn compare_counts_match_brute_force() {
        let a = report("a", &[0.5, 0.2, 0.9, 0.4]);
        let b = report("b", &[0.3, 0.2, 0.95, 0.1]);
        let cmp = compare_runs(&a, &b).unwrap();
        // brute force over per-post pairs
        let mut wins = 0;
        let mut losses = 0;
        let mut ties = 0;
        for (ra, rb) in a.records.iter().zip(&b.records) {
            match ra.breakdown.score.partial_cmp(&rb.breakdown.score).unwrap() {
                std::cmp::Ordering::Greater => wins += 1,
                std::cmp::Ordering::Less => losses += 1,
                std::cmp::Ordering::Equal => ties += 1,
            }
        }
        assert_eq!((cmp.a_wins, cmp.b_wins, cmp.ties), (wins, losses, ties));
        assert!((cmp.mean_delta - (a.mean - b.mean)).abs() < 1e-12);
    }
}
