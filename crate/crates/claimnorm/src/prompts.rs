//! Prompt templates, few-shot assembly, and keyword-based example selection.
//!
//! The template texts live in `assets/prompts/` and are embedded at build
//! time. The claimify, feedback and refine assets reproduce their sources
//! verbatim, typos included; checksum tests pin the bytes. Templates marked
//! as reconstructions have no published text and were written for this
//! toolkit.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{GoldClaim, PostRecord};
use crate::gateway::{ChatMessage, Role};

/// Identifies the shipped stopword list; recorded in run manifests.
pub const STOPWORD_LIST_ID: &str = "en-base/1";

/// The chain-of-thought trigger phrase, appended verbatim.
pub const COT_TRIGGER: &str = "Let's think step by step.";

const STOPWORDS_EN: &str = include_str!("../assets/stopwords_en.txt");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub template_id: String,
    pub system_text: Option<String>,
    pub user_text: String,
    /// True when the text is a reconstruction rather than a published prompt.
    pub reconstruction: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum PromptError {
    #[error("unbound placeholder ${{{0}}}")]
    UnboundPlaceholder(String),
    #[error("no user message to extend")]
    NoUserMessage,
    #[error("few-shot assembly requires at least one example")]
    EmptyExamples,
    #[error("example pool is empty")]
    EmptyPool,
    #[error("unknown template id {0:?}")]
    UnknownTemplate(String),
    #[error("cannot read stopword list {0}: {1}")]
    StopwordIo(String, String),
}

impl PromptTemplate {
    /// Placeholder names referenced by the user text, in order of appearance.
    pub fn placeholders(&self) -> Vec<String> {
        let mut names = Vec::new();
        let mut rest = self.user_text.as_str();
        while let Some(start) = rest.find("${") {
            let tail = &rest[start + 2..];
            match tail.find('}') {
                Some(end) => {
                    let name = &tail[..end];
                    if !names.iter().any(|n| n == name) {
                        names.push(name.to_string());
                    }
                    rest = &tail[end + 1..];
                }
                None => break,
            }
        }
        names
    }

    pub fn checksum(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.system_text.as_deref().unwrap_or("").as_bytes());
        hasher.update([0x1f]);
        hasher.update(self.user_text.as_bytes());
        hex::encode(hasher.finalize())
    }
}

macro_rules! template {
    ($map:expr, $id:literal, user) => {
        $map.insert(
            $id.to_string(),
            PromptTemplate {
                template_id: $id.to_string(),
                system_text: None,
                user_text: include_str!(concat!("../assets/prompts/", $id, ".user.txt"))
                    .to_string(),
                reconstruction: false,
            },
        );
    };
    ($map:expr, $id:literal, system_user) => {
        $map.insert(
            $id.to_string(),
            PromptTemplate {
                template_id: $id.to_string(),
                system_text: Some(
                    include_str!(concat!("../assets/prompts/", $id, ".system.txt")).to_string(),
                ),
                user_text: include_str!(concat!("../assets/prompts/", $id, ".user.txt"))
                    .to_string(),
                reconstruction: false,
            },
        );
    };
    ($map:expr, $id:literal, user, reconstruction) => {
        template!($map, $id, user);
        $map.get_mut($id).unwrap().reconstruction = true;
    };
}

/// Every shipped template, keyed by stable id. Two calls return identical
/// bytes.
pub fn builtin_templates() -> BTreeMap<String, PromptTemplate> {
    let mut map = BTreeMap::new();
    template!(map, "flan_t5_extract", user);
    template!(map, "verifiable_one_sentence", system_user);
    template!(map, "zero_shot_central_claim", user);
    template!(map, "selfrefine_simple", user);
    template!(map, "claimify", system_user);
    template!(map, "feedback", system_user);
    template!(map, "refine", system_user);
    template!(map, "subclaim_extract", user, reconstruction);
    template!(map, "subclaim_synthesize", user, reconstruction);
    template!(map, "subclaim_revise", user, reconstruction);
    template!(map, "multiprompt_generic", user, reconstruction);
    template!(map, "multiprompt_image", user, reconstruction);
    template!(map, "multiprompt_sarcasm", user, reconstruction);
    map
}

/// SHA-256 over each template's system and user text, for run manifests and
/// the `templates` subcommand.
pub fn template_checksums() -> BTreeMap<String, String> {
    builtin_templates()
        .into_iter()
        .map(|(id, t)| (id, t.checksum()))
        .collect()
}

fn substitute(text: &str, bindings: &BTreeMap<String, String>) -> Result<String, PromptError> {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find("${") {
        out.push_str(&rest[..start]);
        let tail = &rest[start + 2..];
        let Some(end) = tail.find('}') else {
            out.push_str(&rest[start..]);
            rest = "";
            break;
        };
        let name = &tail[..end];
        match bindings.get(name) {
            Some(value) => out.push_str(value),
            None => return Err(PromptError::UnboundPlaceholder(name.to_string())),
        }
        rest = &tail[end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// System message (if any) followed by one user message with placeholders
/// substituted. Every placeholder must be bound.
pub fn render(
    template: &PromptTemplate,
    bindings: &BTreeMap<String, String>,
) -> Result<Vec<ChatMessage>, PromptError> {
    let user = substitute(&template.user_text, bindings)?;
    let mut messages = Vec::with_capacity(2);
    if let Some(system) = &template.system_text {
        messages.push(ChatMessage {
            role: Role::System,
            content: system.clone(),
        });
    }
    messages.push(ChatMessage {
        role: Role::User,
        content: user,
    });
    Ok(messages)
}

pub fn bindings(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// Extend the final user message with the CoT trigger phrase. No dedupe:
/// applying twice appends two trigger lines.
pub fn append_cot(mut messages: Vec<ChatMessage>) -> Result<Vec<ChatMessage>, PromptError> {
    match messages.last_mut() {
        Some(last) if last.role == Role::User => {
            last.content.push('\n');
            last.content.push_str(COT_TRIGGER);
            Ok(messages)
        }
        _ => Err(PromptError::NoUserMessage),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FewShotExample {
    pub post_text: String,
    pub claim_text: String,
    pub example_id: String,
}

const EXAMPLE_SEPARATOR: &str = "---------------------------------------------";

/// One user message shaped like the appendix few-shot prompt: a header, each
/// example as a query/response block, then the instruction applied to the
/// target post.
pub fn assemble_few_shot(
    template: &PromptTemplate,
    examples: &[FewShotExample],
    post: &str,
) -> Result<Vec<ChatMessage>, PromptError> {
    if examples.is_empty() {
        return Err(PromptError::EmptyExamples);
    }
    let mut body = String::new();
    body.push_str(
        "# Here are some examples of how to identify a decontextualized, stand-alone, and verifiable central claim in a post.\n",
    );
    for (i, example) in examples.iter().enumerate() {
        let n = i + 1;
        let query = substitute(
            &template.user_text,
            &bindings(&[("post", &example.post_text)]),
        )?;
        body.push_str(&format!("<user_query id=\"example-{n}\">\n"));
        body.push_str(query.trim_end());
        body.push_str("\n</user_query>\n\n");
        body.push_str(&format!("<assistant_response id=\"example-{n}\">\n"));
        body.push_str(&format!("**Normalized claim:** {}\n", example.claim_text));
        body.push_str("</assistant_response>\n");
        body.push_str(EXAMPLE_SEPARATOR);
        body.push('\n');
    }
    body.push('\n');
    let target = substitute(&template.user_text, &bindings(&[("post", post)]))?;
    body.push_str(target.trim_end());

    let mut messages = Vec::with_capacity(2);
    if let Some(system) = &template.system_text {
        messages.push(ChatMessage {
            role: Role::System,
            content: system.clone(),
        });
    }
    messages.push(ChatMessage {
        role: Role::User,
        content: body,
    });
    Ok(messages)
}

/// Fixed stopword list with a stable id.
#[derive(Debug, Clone)]
pub struct StopwordList {
    pub list_id: String,
    words: BTreeSet<String>,
}

impl Default for StopwordList {
    fn default() -> Self {
        Self::builtin()
    }
}

impl StopwordList {
    pub fn builtin() -> Self {
        Self::parse(STOPWORDS_EN, STOPWORD_LIST_ID)
    }

    pub fn load(path: &Path, list_id: &str) -> Result<Self, PromptError> {
        let text = fs::read_to_string(path)
            .map_err(|e| PromptError::StopwordIo(path.display().to_string(), e.to_string()))?;
        Ok(Self::parse(&text, list_id))
    }

    fn parse(text: &str, list_id: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase())
            .collect();
        Self {
            list_id: list_id.to_string(),
            words,
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordProfile {
    pub tokens: BTreeSet<String>,
    pub stopword_list_id: String,
}

/// Drop commas that sit between digits so "174,000" becomes one numeric
/// token.
fn strip_digit_commas(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    for (i, &c) in chars.iter().enumerate() {
        if c == ','
            && i > 0
            && i + 1 < chars.len()
            && chars[i - 1].is_ascii_digit()
            && chars[i + 1].is_ascii_digit()
        {
            continue;
        }
        out.push(c);
    }
    out
}

/// Lowercase content words of a text: split on non-alphanumeric boundaries,
/// drop stopwords and pure numbers shorter than 4 digits, dedupe.
pub fn keyword_profile(text: &str, stopwords: &StopwordList) -> KeywordProfile {
    let lowered = strip_digit_commas(text).to_lowercase();
    let tokens = lowered
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .filter(|t| !stopwords.contains(t))
        .filter(|t| !(t.chars().all(|c| c.is_ascii_digit()) && t.len() < 4))
        .map(str::to_string)
        .collect();
    KeywordProfile {
        tokens,
        stopword_list_id: stopwords.list_id.clone(),
    }
}

/// Keyword-overlap scores and top-k selection over a training pool. Ties
/// break toward earlier pool entries; zero-overlap entries fill in only when
/// fewer than k entries overlap at all.
pub fn select_examples_by_keywords(
    target: &PostRecord,
    pool: &[(PostRecord, GoldClaim)],
    k: usize,
    stopwords: &StopwordList,
) -> Result<Vec<FewShotExample>, PromptError> {
    if pool.is_empty() {
        return Err(PromptError::EmptyPool);
    }
    let target_profile = keyword_profile(&target.text, stopwords);
    let mut scored: Vec<(usize, usize)> = pool
        .iter()
        .enumerate()
        .map(|(idx, (post, _))| {
            let profile = keyword_profile(&post.text, stopwords);
            let overlap = profile.tokens.intersection(&target_profile.tokens).count();
            (idx, overlap)
        })
        .collect();
    scored.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(scored
        .into_iter()
        .take(k.min(pool.len()))
        .map(|(idx, _)| {
            let (post, gold) = &pool[idx];
            FewShotExample {
                post_text: post.text.clone(),
                claim_text: gold.text.clone(),
                example_id: post.post_id.clone(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn post(id: &str, text: &str) -> PostRecord {
        PostRecord {
            post_id: id.to_string(),
            text: text.to_string(),
        }
    }

    fn pool_entry(id: &str, text: &str, claim: &str) -> (PostRecord, GoldClaim) {
        (
            post(id, text),
            GoldClaim {
                post_id: id.to_string(),
                text: claim.to_string(),
            },
        )
    }

    #[test]
    fn builtin_lookups_match_published_text() {
        let templates = builtin_templates();
        assert!(templates["zero_shot_central_claim"].user_text.starts_with(
            "Identify the decontextualized, stand-alone, and verifiable central claim in the given post:"
        ));
        assert!(templates["flan_t5_extract"]
            .user_text
            .contains("Normalize the claim by rephrasing it in a clear and concise manner."));
        assert!(templates["selfrefine_simple"]
            .user_text
            .contains("Output only the refined claim and nothing else."));
        assert!(templates["claimify"]
            .system_text
            .as_deref()
            .unwrap()
            .starts_with("You are a helpful AI assistant and an expert in claim detection"));
        assert!(templates["feedback"]
            .user_text
            .contains("score the response on the following criteria using a 0-10 scale"));
        // The published typo is preserved verbatim.
        assert!(templates["refine"]
            .user_text
            .contains("refine the genrated response in light of the feedback"));
    }

    #[test]
    fn builtin_templates_constant() {
        let a = builtin_templates();
        let b = builtin_templates();
        assert_eq!(a, b);
        assert_eq!(template_checksums(), template_checksums());
    }

    // The assets embedded at build time are pinned byte-for-byte; any edit
    // to a published prompt must be deliberate.
    #[test]
    fn asset_checksums_pinned() {
        let expected = [
            (
                "claimify",
                "ec135060ef4d4dcd1a3731771b5d4577974acdea5ae66f7363362db434685fbf",
            ),
            (
                "feedback",
                "149f1e92ba3367e9e0093a47610fff0414ea5dce39d2f0952fbe9b2c8eb9b11f",
            ),
            (
                "flan_t5_extract",
                "b41217c77abcd43f4217a78d13a6d48ff66af3db7aac3540be4c7955a5e1c082",
            ),
            (
                "refine",
                "538bc10c56119500cb5e51cc3403b10cd8d2d406a330722ae2e05981fb5cbdef",
            ),
            (
                "selfrefine_simple",
                "aa6d1e4f6c4338d4987b8266ad5ecbfae5c7635ce28562ec22117d5aececb4d6",
            ),
            (
                "verifiable_one_sentence",
                "6f7b7efcd7e5f5d7cf3d9c79369ddbcd46e870d53ae4f2fc65c8efae2a377d40",
            ),
            (
                "zero_shot_central_claim",
                "49c24a3b0d54ffc8d2a7dabc567af4076a752c0a3572318f25249ef11745d08e",
            ),
        ];
        let checksums = template_checksums();
        for (id, checksum) in expected {
            assert_eq!(checksums[id], checksum, "asset bytes changed for {id}");
        }
    }

    #[test]
    fn render_substitutes_post() {
        let templates = builtin_templates();
        let messages = render(
            &templates["zero_shot_central_claim"],
            &bindings(&[("post", "X")]),
        )
        .unwrap();
        assert_eq!(messages.len(), 1);
        assert_eq!(messages[0].role, Role::User);
        assert!(messages[0].content.trim_end().ends_with('X'));
        assert!(!messages[0].content.contains("${"));
    }

    #[test]
    fn render_missing_binding_errors() {
        let templates = builtin_templates();
        let err = render(
            &templates["refine"],
            &bindings(&[("query", "q"), ("claim", "c")]),
        )
        .unwrap_err();
        assert!(matches!(err, PromptError::UnboundPlaceholder(name) if name == "feedback"));
    }

    #[test]
    fn render_without_system_yields_single_message() {
        let templates = builtin_templates();
        let messages = render(&templates["flan_t5_extract"], &bindings(&[("post", "p")])).unwrap();
        assert_eq!(messages.len(), 1);
        let messages = render(&templates["claimify"], &bindings(&[("post", "p")])).unwrap();
        assert_eq!(messages.len(), 2);
        assert_eq!(messages[0].role, Role::System);
    }

    #[test]
    fn cot_appends_trigger() {
        let messages = vec![ChatMessage {
            role: Role::User,
            content: "Identify the claim: post".to_string(),
        }];
        let out = append_cot(messages.clone()).unwrap();
        assert_eq!(
            out[0].content,
            "Identify the claim: post\nLet's think step by step."
        );
        // Applying twice appends two trigger lines.
        let twice = append_cot(out).unwrap();
        assert!(twice[0]
            .content
            .ends_with("Let's think step by step.\nLet's think step by step."));
    }

    #[test]
    fn cot_trigger_length_is_fixed() {
        let base = vec![ChatMessage {
            role: Role::User,
            content: "q".to_string(),
        }];
        let out = append_cot(base).unwrap();
        // trigger is 25 characters, plus the separating newline
        assert_eq!(out[0].content.chars().count(), 1 + 1 + 25);
        assert_eq!(COT_TRIGGER.chars().count(), 25);
    }

    #[test]
    fn cot_requires_user_message() {
        assert!(matches!(
            append_cot(vec![]),
            Err(PromptError::NoUserMessage)
        ));
        let system_only = vec![ChatMessage {
            role: Role::System,
            content: "s".to_string(),
        }];
        assert!(matches!(
            append_cot(system_only),
            Err(PromptError::NoUserMessage)
        ));
    }

    #[test]
    fn few_shot_assembly_structure() {
        let templates = builtin_templates();
        let examples: Vec<FewShotExample> = (1..=4)
            .map(|i| FewShotExample {
                post_text: format!("example post {i}"),
                claim_text: format!("example claim {i}"),
                example_id: format!("e{i}"),
            })
            .collect();
        let messages = assemble_few_shot(
            &templates["zero_shot_central_claim"],
            &examples,
            "target post",
        )
        .unwrap();
        assert_eq!(messages.len(), 1);
        let body = &messages[0].content;
        for i in 1..=4 {
            assert!(body.contains(&format!("<user_query id=\"example-{i}\">")));
            assert!(body.contains(&format!("example claim {i}")));
        }
        assert!(!body.contains("example-5"));
        // instruction applied to the target post comes last
        assert!(body.trim_end().ends_with("target post"));
        let target_pos = body.rfind("target post").unwrap();
        let last_example = body.rfind("example post 4").unwrap();
        assert!(target_pos > last_example);
    }

    #[test]
    fn few_shot_single_example() {
        let templates = builtin_templates();
        let examples = vec![FewShotExample {
            post_text: "p".to_string(),
            claim_text: "c".to_string(),
            example_id: "e1".to_string(),
        }];
        let messages =
            assemble_few_shot(&templates["zero_shot_central_claim"], &examples, "t").unwrap();
        assert_eq!(messages[0].content.matches("<user_query").count(), 1);
    }

    #[test]
    fn few_shot_empty_examples_error() {
        let templates = builtin_templates();
        assert!(matches!(
            assemble_few_shot(&templates["zero_shot_central_claim"], &[], "t"),
            Err(PromptError::EmptyExamples)
        ));
    }

    #[test]
    fn keyword_profile_salary_sentence() {
        let stopwords = StopwordList::builtin();
        let profile = keyword_profile(
            "The salary of a U.S. Senator is $174,000 per year",
            &stopwords,
        );
        let expected: BTreeSet<String> = ["salary", "senator", "year", "174000"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(profile.tokens, expected);
    }

    #[test]
    fn keyword_profile_degenerate_inputs() {
        let stopwords = StopwordList::builtin();
        assert!(keyword_profile("the the the", &stopwords).tokens.is_empty());
        assert!(keyword_profile("", &stopwords).tokens.is_empty());
    }

    #[test]
    fn keyword_profile_tokens_come_from_input() {
        let stopwords = StopwordList::builtin();
        let text = "Vaccines Cause 5G Towers, obviously";
        let profile = keyword_profile(text, &stopwords);
        let lowered = text.to_lowercase();
        for token in &profile.tokens {
            assert!(lowered.contains(token.as_str()), "invented token {token:?}");
        }
    }

    #[test]
    fn select_examples_ranked_by_overlap() {
        let stopwords = StopwordList::builtin();
        let target = post("t", "senator salary house estate");
        let pool = vec![
            pool_entry("a", "senator salary estate story", "claim a"),
            pool_entry("b", "salary cap hockey", "claim b"),
            pool_entry("c", "weather report sunny", "claim c"),
        ];
        let picked = select_examples_by_keywords(&target, &pool, 2, &stopwords).unwrap();
        let ids: Vec<&str> = picked.iter().map(|e| e.example_id.as_str()).collect();
        assert_eq!(ids, vec!["a", "b"]);
    }

    #[test]
    fn select_examples_tie_breaks_by_pool_order() {
        let stopwords = StopwordList::builtin();
        let target = post("t", "alpha beta");
        let pool = vec![
            pool_entry("first", "alpha beta gamma", "c1"),
            pool_entry("second", "alpha beta delta", "c2"),
        ];
        let picked = select_examples_by_keywords(&target, &pool, 1, &stopwords).unwrap();
        assert_eq!(picked[0].example_id, "first");
    }

    #[test]
    fn select_examples_saturates_at_pool_size() {
        let stopwords = StopwordList::builtin();
        let target = post("t", "alpha");
        let pool = vec![
            pool_entry("a", "alpha", "c1"),
            pool_entry("b", "unrelated words", "c2"),
        ];
        let picked = select_examples_by_keywords(&target, &pool, 10, &stopwords).unwrap();
        assert_eq!(picked.len(), 2);
        assert_eq!(picked[0].example_id, "a");
    }

    #[test]
    fn select_examples_empty_pool_errors() {
        let stopwords = StopwordList::builtin();
        let target = post("t", "anything");
        assert!(matches!(
            select_examples_by_keywords(&target, &[], 2, &stopwords),
            Err(PromptError::EmptyPool)
        ));
    }

    #[test]
    fn selection_length_invariant() {
        let stopwords = StopwordList::builtin();
        let target = post("t", "alpha beta gamma");
        let pool: Vec<_> = (0..5)
            .map(|i| pool_entry(&format!("p{i}"), &format!("token{i} alpha"), "c"))
            .collect();
        for k in 1..=7 {
            let picked = select_examples_by_keywords(&target, &pool, k, &stopwords).unwrap();
            assert_eq!(picked.len(), k.min(pool.len()));
        }
    }
}
