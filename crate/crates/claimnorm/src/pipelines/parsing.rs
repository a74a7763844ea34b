//! Tolerant parsers for model responses: self-feedback reports and scored
//! sub claim lists. Models follow requested formats loosely, so these accept
//! several line shapes and the callers fall back rather than fail.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Verifiability,
    LikelihoodFalse,
    PublicInterest,
    PotentialHarm,
    CheckWorthiness,
}

impl Criterion {
    pub const ALL: [Criterion; 5] = [
        Criterion::Verifiability,
        Criterion::LikelihoodFalse,
        Criterion::PublicInterest,
        Criterion::PotentialHarm,
        Criterion::CheckWorthiness,
    ];

    fn matches_line(&self, lower: &str) -> bool {
        match self {
            Criterion::Verifiability => lower.contains("verifiability"),
            Criterion::LikelihoodFalse => {
                lower.contains("likelihood of being false") || lower.contains("likelihood")
            }
            Criterion::PublicInterest => lower.contains("public interest"),
            Criterion::PotentialHarm => lower.contains("potential harm") || lower.contains("harm"),
            Criterion::CheckWorthiness => {
                lower.contains("check-worthiness")
                    || lower.contains("check worthiness")
                    || lower.contains("checkworthiness")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionScore {
    pub score: u8,
    pub justification: String,
}

/// Parsed self-feedback: the five 0-10 criterion scores plus optional
/// improvement suggestions. `raw_text` always holds the unparsed response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackReport {
    pub criteria: BTreeMap<Criterion, CriterionScore>,
    pub suggestions: Option<String>,
    pub raw_text: String,
}

/// First integer in the text, if any, clamped to 0..=10.
fn first_score(text: &str) -> Option<u8> {
    let mut digits = String::new();
    for c in text.chars() {
        if c.is_ascii_digit() {
            digits.push(c);
        } else if !digits.is_empty() {
            break;
        }
    }
    if digits.is_empty() {
        return None;
    }
    let value: u32 = digits.parse().ok()?;
    Some(value.min(10) as u8)
}

/// Parse a feedback response. Returns None unless all five criteria carry a
/// score; callers keep the raw text and continue either way.
pub fn parse_feedback(raw: &str) -> Option<FeedbackReport> {
    let mut criteria = BTreeMap::new();
    let mut suggestion_lines: Vec<String> = Vec::new();
    let mut in_suggestions = false;

    for line in raw.lines() {
        let trimmed = line.trim().trim_start_matches(['-', '*', '#']).trim();
        if trimmed.is_empty() {
            continue;
        }
        let lower = trimmed.to_lowercase();
        if lower.contains("suggestion") || lower.contains("improvement") {
            in_suggestions = true;
        }
        let mut matched = false;
        for criterion in Criterion::ALL {
            if criteria.contains_key(&criterion) || !criterion.matches_line(&lower) {
                continue;
            }
            // score and justification follow the criterion name
            let name_end = lower.find(':').map(|p| p + 1).unwrap_or(0);
            let tail = &trimmed[name_end.min(trimmed.len())..];
            if let Some(score) = first_score(tail) {
                let justification = tail
                    .trim_start_matches(|c: char| {
                        c.is_ascii_digit() || c.is_whitespace() || "*:/-()".contains(c)
                    })
                    .trim()
                    .to_string();
                criteria.insert(
                    criterion,
                    CriterionScore {
                        score,
                        justification,
                    },
                );
                matched = true;
                break;
            }
        }
        if in_suggestions && !matched {
            suggestion_lines.push(trimmed.to_string());
        }
    }

    if Criterion::ALL.iter().all(|c| criteria.contains_key(c)) {
        let suggestions = if suggestion_lines.is_empty() {
            None
        } else {
            Some(suggestion_lines.join("\n"))
        };
        Some(FeedbackReport {
            criteria,
            suggestions,
            raw_text: raw.to_string(),
        })
    } else {
        None
    }
}

/// One candidate assertion with its self-assigned importance score.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubClaim {
    pub text: String,
    pub importance: u8,
}

fn clamp_importance(value: u32) -> u8 {
    value.clamp(1, 10) as u8
}

/// Parse "(Importance: k/10)" or "Importance: k" at the end of a line.
/// Returns the claim text and score.
fn split_importance_clause(line: &str) -> Option<(String, u8)> {
    let lower = line.to_lowercase();
    let pos = lower.rfind("importance")?;
    let tail = &line[pos + "importance".len()..];
    let score_text: String = tail
        .chars()
        .skip_while(|c| !c.is_ascii_digit())
        .take_while(|c| c.is_ascii_digit())
        .collect();
    if score_text.is_empty() {
        return None;
    }
    let score: u32 = score_text.parse().ok()?;
    let mut text = line[..pos].trim_end();
    text = text
        .trim_end_matches(['(', '[', '-', '—', '–', ',', ';'])
        .trim_end();
    if text.is_empty() {
        return None;
    }
    Some((text.to_string(), clamp_importance(score)))
}

/// Parse "<text> [k]".
fn split_bracket_score(line: &str) -> Option<(String, u8)> {
    let line = line.trim_end();
    let rest = line.strip_suffix(']')?;
    let open = rest.rfind('[')?;
    let score: u32 = rest[open + 1..].trim().parse().ok()?;
    let text = rest[..open].trim_end();
    if text.is_empty() {
        return None;
    }
    Some((text.to_string(), clamp_importance(score)))
}

/// Parse "<text> — k" with an em/en dash or spaced hyphen.
fn split_dash_score(line: &str) -> Option<(String, u8)> {
    for dash in ["—", "–", " - "] {
        if let Some(pos) = line.rfind(dash) {
            let tail = line[pos + dash.len()..].trim();
            if !tail.is_empty() && tail.chars().all(|c| c.is_ascii_digit()) {
                let score: u32 = tail.parse().ok()?;
                let text = line[..pos].trim_end();
                if !text.is_empty() {
                    return Some((text.to_string(), clamp_importance(score)));
                }
            }
        }
    }
    None
}

fn strip_enumerator(line: &str) -> &str {
    let trimmed = line.trim_start();
    if let Some(rest) = trimmed.strip_prefix(['-', '*', '•']) {
        return rest.trim_start();
    }
    let digits = trimmed.chars().take_while(|c| c.is_ascii_digit()).count();
    if digits > 0 {
        let after = &trimmed[digits..];
        if let Some(rest) = after.strip_prefix(['.', ')']) {
            return rest.trim_start();
        }
    }
    trimmed
}

/// Extract scored sub claims from a response, in order. Unparseable lines are
/// skipped; an empty result signals overall parse failure to the caller.
pub fn parse_subclaims(raw: &str) -> Vec<SubClaim> {
    let mut subclaims = Vec::new();
    for line in raw.lines() {
        let body = strip_enumerator(line);
        if body.is_empty() {
            continue;
        }
        let parsed = split_importance_clause(body)
            .or_else(|| split_bracket_score(body))
            .or_else(|| split_dash_score(body));
        if let Some((text, importance)) = parsed {
            subclaims.push(SubClaim { text, importance });
        }
    }
    subclaims
}
