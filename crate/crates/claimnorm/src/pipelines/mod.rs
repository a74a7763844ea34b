//! Extraction strategies: zero/few-shot prompting variants, claimify with
//! self-refinement, keyword-based few-shot (KBFP) with an optional refine
//! step, the subclaim extract/filter/synthesize/revise pipeline, the
//! simulated multi-prompt upper bound, and the regurgitation baselines.
//!
//! Every strategy produces an [`ExtractionTrace`] recording each prompt sent
//! and response received, so runs can be audited and claims reconstructed.

mod parsing;
mod postprocess;
mod tagger;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{GoldClaim, PostRecord};
use crate::gateway::{request_digest, ChatRequest, Gateway, GatewayError};
use crate::meteor::{meteor_single, MeteorParams};
use crate::prompts::{
    append_cot, assemble_few_shot, bindings, render, select_examples_by_keywords, FewShotExample,
    PromptError, PromptTemplate, StopwordList,
};

pub use parsing::{
    parse_feedback, parse_subclaims, Criterion, CriterionScore, FeedbackReport, SubClaim,
};
pub use postprocess::postprocess_claim;
pub use tagger::{FileTagger, PosTag, PosTagger, RuleTagger, TaggerUnavailable};

pub const DEFAULT_TRUNCATE_LIMIT: usize = 100;
pub const DEFAULT_FEW_SHOT_K: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    ZeroShot,
    ZeroShotCot,
    FewShot,
    FewShotCot,
    ClaimifySelfrefine,
    Kbfp,
    KbfpRefine,
    Subclaim,
    MultiPromptMax,
    BaselineFull,
    BaselineTruncate,
    BaselineContentWords,
}

impl StrategyKind {
    pub fn is_baseline(&self) -> bool {
        matches!(
            self,
            StrategyKind::BaselineFull
                | StrategyKind::BaselineTruncate
                | StrategyKind::BaselineContentWords
        )
    }

    pub fn needs_pool(&self) -> bool {
        matches!(
            self,
            StrategyKind::FewShot
                | StrategyKind::FewShotCot
                | StrategyKind::Kbfp
                | StrategyKind::KbfpRefine
        )
    }
}

/// Fully-resolved description of one extraction method.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrategySpec {
    pub strategy_id: String,
    pub kind: StrategyKind,
    #[serde(default)]
    pub extract_template: Option<String>,
    #[serde(default)]
    pub feedback_template: Option<String>,
    #[serde(default)]
    pub refine_template: Option<String>,
    #[serde(default)]
    pub synthesize_template: Option<String>,
    #[serde(default)]
    pub revise_template: Option<String>,
    #[serde(default = "default_few_shot_k")]
    pub few_shot_k: usize,
    #[serde(default)]
    pub refine_iterations: usize,
    /// Member strategy ids for multi_prompt_max.
    #[serde(default)]
    pub members: Vec<String>,
    #[serde(default)]
    pub truncate_limit: Option<usize>,
    /// Backend name; None means the run's default backend.
    #[serde(default)]
    pub backend: Option<String>,
}

fn default_few_shot_k() -> usize {
    DEFAULT_FEW_SHOT_K
}

impl StrategySpec {
    fn new(strategy_id: &str, kind: StrategyKind) -> Self {
        Self {
            strategy_id: strategy_id.to_string(),
            kind,
            extract_template: None,
            feedback_template: None,
            refine_template: None,
            synthesize_template: None,
            revise_template: None,
            few_shot_k: DEFAULT_FEW_SHOT_K,
            refine_iterations: 0,
            members: Vec::new(),
            truncate_limit: None,
            backend: None,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.kind.is_baseline() && self.refine_iterations != 0 {
            return Err(PipelineError::InvalidSpec(format!(
                "{}: baselines take no refine iterations",
                self.strategy_id
            )));
        }
        if self.kind == StrategyKind::MultiPromptMax && self.members.len() < 2 {
            return Err(PipelineError::InvalidSpec(format!(
                "{}: multi_prompt_max needs at least 2 members",
                self.strategy_id
            )));
        }
        if self.kind == StrategyKind::ClaimifySelfrefine && self.refine_iterations == 0 {
            return Err(PipelineError::InvalidSpec(format!(
                "{}: claimify_selfrefine needs refine_iterations >= 1",
                self.strategy_id
            )));
        }
        Ok(())
    }

    fn template_or<'a>(&'a self, explicit: &'a Option<String>, default: &'a str) -> &'a str {
        explicit.as_deref().unwrap_or(default)
    }
}

/// The ready-made strategy registry covering every method the toolkit
/// reproduces, keyed by strategy id.
pub fn builtin_strategies() -> BTreeMap<String, StrategySpec> {
    let mut map = BTreeMap::new();
    let mut add = |spec: StrategySpec| {
        map.insert(spec.strategy_id.clone(), spec);
    };

    add(StrategySpec::new("zero_shot", StrategyKind::ZeroShot));
    add(StrategySpec::new(
        "zero_shot_cot",
        StrategyKind::ZeroShotCot,
    ));
    add(StrategySpec::new("few_shot", StrategyKind::FewShot));
    add(StrategySpec::new("few_shot_cot", StrategyKind::FewShotCot));

    let mut claimify = StrategySpec::new("claimify_selfrefine", StrategyKind::ClaimifySelfrefine);
    claimify.extract_template = Some("claimify".to_string());
    claimify.refine_iterations = 1;
    add(claimify);

    add(StrategySpec::new("kbfp", StrategyKind::Kbfp));
    add(StrategySpec::new("kbfp_refine", StrategyKind::KbfpRefine));
    add(StrategySpec::new("subclaim", StrategyKind::Subclaim));

    let mut generic = StrategySpec::new("prompt_generic", StrategyKind::ZeroShot);
    generic.extract_template = Some("multiprompt_generic".to_string());
    add(generic);
    let mut image = StrategySpec::new("prompt_image", StrategyKind::ZeroShot);
    image.extract_template = Some("multiprompt_image".to_string());
    add(image);
    let mut sarcasm = StrategySpec::new("prompt_sarcasm", StrategyKind::ZeroShot);
    sarcasm.extract_template = Some("multiprompt_sarcasm".to_string());
    add(sarcasm);

    let mut multi = StrategySpec::new("multi_prompt_max", StrategyKind::MultiPromptMax);
    multi.members = vec![
        "prompt_generic".to_string(),
        "prompt_image".to_string(),
        "prompt_sarcasm".to_string(),
    ];
    add(multi);

    add(StrategySpec::new(
        "baseline_full",
        StrategyKind::BaselineFull,
    ));
    let mut truncate = StrategySpec::new("baseline_truncate", StrategyKind::BaselineTruncate);
    truncate.truncate_limit = Some(DEFAULT_TRUNCATE_LIMIT);
    add(truncate);
    add(StrategySpec::new(
        "baseline_content_words",
        StrategyKind::BaselineContentWords,
    ));
    map
}

/// Load extra strategy specs from a JSON array, overlaying the builtins.
pub fn load_strategies(
    path: &std::path::Path,
) -> Result<BTreeMap<String, StrategySpec>, PipelineError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| PipelineError::InvalidSpec(format!("{}: {e}", path.display())))?;
    let specs: Vec<StrategySpec> = serde_json::from_str(&text)
        .map_err(|e| PipelineError::InvalidSpec(format!("{}: {e}", path.display())))?;
    let mut map = builtin_strategies();
    for spec in specs {
        spec.validate()?;
        map.insert(spec.strategy_id.clone(), spec);
    }
    Ok(map)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub label: String,
    pub request_digest: String,
    pub response_text: String,
}

/// Ordered record of every prompt sent and response received while producing
/// one claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionTrace {
    pub post_id: String,
    pub strategy_id: String,
    #[serde(default)]
    pub run_id: String,
    pub steps: Vec<TraceStep>,
    pub final_claim: String,
    #[serde(default)]
    pub flags: Vec<String>,
}

impl ExtractionTrace {
    fn new(post_id: &str, strategy_id: &str) -> Self {
        Self {
            post_id: post_id.to_string(),
            strategy_id: strategy_id.to_string(),
            run_id: String::new(),
            steps: Vec::new(),
            final_claim: String::new(),
            flags: Vec::new(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("post {post_id}: {source}")]
    Gateway {
        post_id: String,
        #[source]
        source: GatewayError,
    },
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("unknown template id {0:?}")]
    UnknownTemplate(String),
    #[error("strategy {0} needs a few-shot pool; pass a train corpus")]
    MissingPool(String),
    #[error("post {0} has no gold claim")]
    MissingGold(String),
    #[error("multi_prompt_max needs at least 2 member traces for one post, got {0}")]
    NotEnoughMembers(usize),
    #[error("member traces span multiple posts: {0} vs {1}")]
    MixedPosts(String, String),
    #[error("unknown strategy id {0:?}")]
    UnknownStrategy(String),
    #[error("invalid strategy spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Tagger(#[from] TaggerUnavailable),
}

/// Shared handles every pipeline op needs.
pub struct PipelineContext<'a> {
    pub gateway: &'a Gateway,
    pub templates: &'a BTreeMap<String, PromptTemplate>,
    pub stopwords: &'a StopwordList,
    pub tagger: &'a dyn PosTagger,
}

impl<'a> PipelineContext<'a> {
    fn template(&self, id: &str) -> Result<&'a PromptTemplate, PipelineError> {
        self.templates
            .get(id)
            .ok_or_else(|| PipelineError::UnknownTemplate(id.to_string()))
    }

    fn complete(
        &self,
        post_id: &str,
        label: &str,
        messages: Vec<crate::gateway::ChatMessage>,
    ) -> Result<TraceStep, PipelineError> {
        let request = ChatRequest::new(
            &self.gateway.config().model_id,
            messages,
            &format!("{post_id}:{label}"),
        );
        let response =
            self.gateway
                .complete(&request)
                .map_err(|source| PipelineError::Gateway {
                    post_id: post_id.to_string(),
                    source,
                })?;
        Ok(TraceStep {
            label: label.to_string(),
            request_digest: request_digest(&request),
            response_text: response.text,
        })
    }
}

fn first_k_examples(pool: &[(PostRecord, GoldClaim)], k: usize) -> Vec<FewShotExample> {
    pool.iter()
        .take(k.max(1))
        .map(|(post, gold)| FewShotExample {
            post_text: post.text.clone(),
            claim_text: gold.text.clone(),
            example_id: post.post_id.clone(),
        })
        .collect()
}

/// Messages for the initial extraction request of a simple or claimify
/// strategy; also used to rebuild the original query during refinement.
fn extraction_messages(
    ctx: &PipelineContext,
    spec: &StrategySpec,
    post: &PostRecord,
    pool: Option<&[(PostRecord, GoldClaim)]>,
) -> Result<Vec<crate::gateway::ChatMessage>, PipelineError> {
    let template_id = spec.template_or(&spec.extract_template, "zero_shot_central_claim");
    let template = ctx.template(template_id)?;
    let messages = match spec.kind {
        StrategyKind::FewShot | StrategyKind::FewShotCot => {
            let pool = pool
                .filter(|p| !p.is_empty())
                .ok_or_else(|| PipelineError::MissingPool(spec.strategy_id.clone()))?;
            let examples = first_k_examples(pool, spec.few_shot_k);
            assemble_few_shot(template, &examples, &post.text)?
        }
        StrategyKind::Kbfp | StrategyKind::KbfpRefine => {
            let pool = pool
                .filter(|p| !p.is_empty())
                .ok_or_else(|| PipelineError::MissingPool(spec.strategy_id.clone()))?;
            let examples = select_examples_by_keywords(post, pool, spec.few_shot_k, ctx.stopwords)?;
            assemble_few_shot(template, &examples, &post.text)?
        }
        _ => render(template, &bindings(&[("post", &post.text)]))?,
    };
    match spec.kind {
        StrategyKind::ZeroShotCot | StrategyKind::FewShotCot => Ok(append_cot(messages)?),
        _ => Ok(messages),
    }
}

/// Zero-shot and few-shot extraction, with or without the CoT trigger:
/// exactly one completion.
pub fn extract_simple(
    ctx: &PipelineContext,
    spec: &StrategySpec,
    post: &PostRecord,
    pool: Option<&[(PostRecord, GoldClaim)]>,
) -> Result<ExtractionTrace, PipelineError> {
    debug_assert!(matches!(
        spec.kind,
        StrategyKind::ZeroShot
            | StrategyKind::ZeroShotCot
            | StrategyKind::FewShot
            | StrategyKind::FewShotCot
    ));
    let messages = extraction_messages(ctx, spec, post, pool)?;
    let step = ctx.complete(&post.post_id, "extract", messages)?;
    let mut trace = ExtractionTrace::new(&post.post_id, &spec.strategy_id);
    trace.final_claim = postprocess_claim(&step.response_text);
    trace.steps.push(step);
    Ok(trace)
}

/// Iterative self-refinement: per iteration one feedback call and one refine
/// call, post-processing the refined claim, stopping early at a fixed point.
/// The returned trace holds only the refinement steps.
pub fn self_refine(
    ctx: &PipelineContext,
    spec: &StrategySpec,
    post: &PostRecord,
    initial_claim: &str,
) -> Result<ExtractionTrace, PipelineError> {
    let feedback_template = ctx.template(spec.template_or(&spec.feedback_template, "feedback"))?;
    let refine_template = ctx.template(spec.template_or(&spec.refine_template, "refine"))?;
    // the original query is the user message of the initial extraction
    let query = extraction_messages(ctx, spec, post, None)?
        .into_iter()
        .rev()
        .find(|m| m.role == crate::gateway::Role::User)
        .map(|m| m.content)
        .unwrap_or_default();

    let mut trace = ExtractionTrace::new(&post.post_id, &spec.strategy_id);
    let mut current = initial_claim.to_string();
    for iteration in 1..=spec.refine_iterations {
        let feedback_messages = render(feedback_template, &bindings(&[("claim", &current)]))?;
        let feedback_step = ctx.complete(
            &post.post_id,
            &format!("feedback_{iteration}"),
            feedback_messages,
        )?;
        if parse_feedback(&feedback_step.response_text).is_none() {
            trace
                .flags
                .push(format!("feedback_parse_failure:{iteration}"));
        }
        let feedback_text = feedback_step.response_text.clone();
        trace.steps.push(feedback_step);

        let refine_messages = render(
            refine_template,
            &bindings(&[
                ("query", &query),
                ("claim", &current),
                ("feedback", &feedback_text),
            ]),
        )?;
        let refine_step = ctx.complete(
            &post.post_id,
            &format!("refine_{iteration}"),
            refine_messages,
        )?;
        let refined = postprocess_claim(&refine_step.response_text);
        trace.steps.push(refine_step);

        if refined == current {
            trace.flags.push(format!("fixed_point_stop:{iteration}"));
            break;
        }
        current = refined;
    }
    trace.final_claim = current;
    Ok(trace)
}

/// Keyword-based few-shot extraction; `kbfp_refine` adds one pass of the
/// simple refine prompt.
pub fn kbfp_extract(
    ctx: &PipelineContext,
    spec: &StrategySpec,
    post: &PostRecord,
    pool: &[(PostRecord, GoldClaim)],
) -> Result<ExtractionTrace, PipelineError> {
    if pool.is_empty() {
        return Err(PipelineError::MissingPool(spec.strategy_id.clone()));
    }
    let messages = extraction_messages(ctx, spec, post, Some(pool))?;
    let step = ctx.complete(&post.post_id, "extract", messages)?;
    let mut trace = ExtractionTrace::new(&post.post_id, &spec.strategy_id);
    let mut claim = postprocess_claim(&step.response_text);
    trace.steps.push(step);

    if spec.kind == StrategyKind::KbfpRefine {
        let refine_template =
            ctx.template(spec.template_or(&spec.refine_template, "selfrefine_simple"))?;
        let messages = render(refine_template, &bindings(&[("claim", &claim)]))?;
        let step = ctx.complete(&post.post_id, "refine", messages)?;
        claim = postprocess_claim(&step.response_text);
        trace.steps.push(step);
    }
    trace.final_claim = claim;
    Ok(trace)
}

/// Retain sub claims scoring 7 or higher, in order.
pub fn filter_subclaims(subclaims: &[SubClaim]) -> Vec<SubClaim> {
    subclaims
        .iter()
        .filter(|s| s.importance >= 7)
        .cloned()
        .collect()
}

/// Subclaim extraction, importance filtering, synthesis, and one revision
/// pass: exactly three completions.
pub fn subclaim_pipeline(
    ctx: &PipelineContext,
    spec: &StrategySpec,
    post: &PostRecord,
) -> Result<ExtractionTrace, PipelineError> {
    let extract_template =
        ctx.template(spec.template_or(&spec.extract_template, "subclaim_extract"))?;
    let synthesize_template =
        ctx.template(spec.template_or(&spec.synthesize_template, "subclaim_synthesize"))?;
    let revise_template =
        ctx.template(spec.template_or(&spec.revise_template, "subclaim_revise"))?;

    let mut trace = ExtractionTrace::new(&post.post_id, &spec.strategy_id);

    let messages = render(extract_template, &bindings(&[("post", &post.text)]))?;
    let extract_step = ctx.complete(&post.post_id, "extract_subclaims", messages)?;
    let mut subclaims = parse_subclaims(&extract_step.response_text);
    if subclaims.is_empty() {
        subclaims = vec![SubClaim {
            text: extract_step.response_text.trim().to_string(),
            importance: 7,
        }];
        trace.flags.push("parse_fallback".to_string());
    }
    trace.steps.push(extract_step);

    let mut survivors = filter_subclaims(&subclaims);
    if survivors.is_empty() {
        survivors = subclaims.clone();
        trace.flags.push("filter_empty".to_string());
    }

    let listed = survivors
        .iter()
        .map(|s| format!("- {}", s.text))
        .collect::<Vec<_>>()
        .join("\n");
    let messages = render(
        synthesize_template,
        &bindings(&[("post", &post.text), ("claim", &listed)]),
    )?;
    let synthesize_step = ctx.complete(&post.post_id, "synthesize", messages)?;
    let synthesized = postprocess_claim(&synthesize_step.response_text);
    trace.steps.push(synthesize_step);

    let messages = render(
        revise_template,
        &bindings(&[("post", &post.text), ("claim", &synthesized)]),
    )?;
    let revise_step = ctx.complete(&post.post_id, "revise", messages)?;
    trace.final_claim = postprocess_claim(&revise_step.response_text);
    trace.steps.push(revise_step);
    Ok(trace)
}

/// Score member claims against the gold claim and return the argmax trace;
/// ties break toward earlier members. This simulates the multi-prompt upper
/// bound, so it requires the gold claim.
pub fn multi_prompt_max(
    member_traces: &[ExtractionTrace],
    gold: &GoldClaim,
    scorer: &MeteorParams,
) -> Result<(ExtractionTrace, BTreeMap<String, f64>), PipelineError> {
    if member_traces.len() < 2 {
        return Err(PipelineError::NotEnoughMembers(member_traces.len()));
    }
    for trace in member_traces {
        if trace.post_id != member_traces[0].post_id {
            return Err(PipelineError::MixedPosts(
                member_traces[0].post_id.clone(),
                trace.post_id.clone(),
            ));
        }
    }
    let mut scores = BTreeMap::new();
    let mut best_index = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (index, trace) in member_traces.iter().enumerate() {
        let score = meteor_single(&trace.final_claim, &gold.text, scorer).score;
        scores.insert(trace.strategy_id.clone(), score);
        if score > best_score {
            best_score = score;
            best_index = index;
        }
    }
    Ok((member_traces[best_index].clone(), scores))
}

/// The post text itself, verbatim; zero LLM calls.
pub fn baseline_full(post: &PostRecord) -> ExtractionTrace {
    let mut trace = ExtractionTrace::new(&post.post_id, "baseline_full");
    trace.final_claim = post.text.clone();
    trace
}

/// Truncate at `limit` Unicode scalar values, dropping a trailing partial
/// word and trailing whitespace; with no whitespace inside the limit the
/// hard cut stands.
pub fn truncate_text(text: &str, limit: usize) -> String {
    let chars: Vec<char> = text.chars().collect();
    let kept: &[char] = if chars.len() <= limit {
        &chars
    } else if chars[limit].is_whitespace() {
        // the cut lands on a word boundary; nothing was split
        &chars[..limit]
    } else {
        match chars[..limit].iter().rposition(|c| c.is_whitespace()) {
            Some(last_ws) => &chars[..last_ws],
            None => &chars[..limit],
        }
    };
    let end = kept
        .iter()
        .rposition(|c| !c.is_whitespace())
        .map_or(0, |p| p + 1);
    kept[..end].iter().collect()
}

pub fn baseline_truncate(post: &PostRecord, limit: usize) -> ExtractionTrace {
    let mut trace = ExtractionTrace::new(&post.post_id, "baseline_truncate");
    trace.final_claim = truncate_text(&post.text, limit);
    trace
}

/// Tokens tagged noun or verb, joined by single spaces in original order.
/// Edge punctuation is stripped from each token before tagging.
pub fn content_words(text: &str, tagger: &dyn PosTagger) -> String {
    text.split_whitespace()
        .filter_map(|raw| {
            let token = raw.trim_matches(|c: char| !c.is_alphanumeric());
            if token.is_empty() {
                return None;
            }
            match tagger.tag(token) {
                PosTag::Noun | PosTag::Verb => Some(token),
                PosTag::Other => None,
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn baseline_content_words(post: &PostRecord, tagger: &dyn PosTagger) -> ExtractionTrace {
    let mut trace = ExtractionTrace::new(&post.post_id, "baseline_content_words");
    trace.final_claim = content_words(&post.text, tagger);
    trace
}

/// Run one strategy over one post. `registry` resolves multi-prompt members;
/// `pool` feeds few-shot strategies; `gold` is required by multi_prompt_max.
pub fn run_strategy(
    ctx: &PipelineContext,
    spec: &StrategySpec,
    registry: &BTreeMap<String, StrategySpec>,
    post: &PostRecord,
    pool: Option<&[(PostRecord, GoldClaim)]>,
    gold: Option<&GoldClaim>,
    scorer: &MeteorParams,
) -> Result<ExtractionTrace, PipelineError> {
    spec.validate()?;
    let mut trace = match spec.kind {
        StrategyKind::ZeroShot
        | StrategyKind::ZeroShotCot
        | StrategyKind::FewShot
        | StrategyKind::FewShotCot => extract_simple(ctx, spec, post, pool)?,
        StrategyKind::ClaimifySelfrefine => {
            let extract_spec = StrategySpec {
                kind: StrategyKind::ZeroShot,
                ..spec.clone()
            };
            let messages = extraction_messages(ctx, &extract_spec, post, None)?;
            let step = ctx.complete(&post.post_id, "extract", messages)?;
            let initial = postprocess_claim(&step.response_text);
            let mut refined = self_refine(ctx, spec, post, &initial)?;
            let mut merged = ExtractionTrace::new(&post.post_id, &spec.strategy_id);
            merged.steps.push(step);
            merged.steps.append(&mut refined.steps);
            merged.flags.append(&mut refined.flags);
            merged.final_claim = refined.final_claim;
            merged
        }
        StrategyKind::Kbfp | StrategyKind::KbfpRefine => {
            let pool = pool
                .filter(|p| !p.is_empty())
                .ok_or_else(|| PipelineError::MissingPool(spec.strategy_id.clone()))?;
            kbfp_extract(ctx, spec, post, pool)?
        }
        StrategyKind::Subclaim => subclaim_pipeline(ctx, spec, post)?,
        StrategyKind::MultiPromptMax => {
            let gold = gold.ok_or_else(|| PipelineError::MissingGold(post.post_id.clone()))?;
            let mut member_traces = Vec::with_capacity(spec.members.len());
            for member_id in &spec.members {
                let member = registry
                    .get(member_id)
                    .ok_or_else(|| PipelineError::UnknownStrategy(member_id.clone()))?;
                member_traces.push(run_strategy(
                    ctx,
                    member,
                    registry,
                    post,
                    pool,
                    Some(gold),
                    scorer,
                )?);
            }
            let (best, scores) = multi_prompt_max(&member_traces, gold, scorer)?;
            let selected = best.strategy_id.clone();
            let mut trace = best;
            trace.flags.push(format!("selected_member:{selected}"));
            for (member, score) in &scores {
                trace
                    .flags
                    .push(format!("member_score:{member}={score:.6}"));
            }
            trace
        }
        StrategyKind::BaselineFull => baseline_full(post),
        StrategyKind::BaselineTruncate => {
            baseline_truncate(post, spec.truncate_limit.unwrap_or(DEFAULT_TRUNCATE_LIMIT))
        }
        StrategyKind::BaselineContentWords => baseline_content_words(post, ctx.tagger),
    };
    trace.strategy_id = spec.strategy_id.clone();
    Ok(trace)
}

/// Recompute the final claim from a trace: post-process the last step's
/// response, or apply the baseline transform. Used to audit traces.
pub fn reconstruct_final_claim(
    spec: &StrategySpec,
    post: &PostRecord,
    trace: &ExtractionTrace,
    tagger: &dyn PosTagger,
) -> String {
    match spec.kind {
        StrategyKind::BaselineFull => post.text.clone(),
        StrategyKind::BaselineTruncate => truncate_text(
            &post.text,
            spec.truncate_limit.unwrap_or(DEFAULT_TRUNCATE_LIMIT),
        ),
        StrategyKind::BaselineContentWords => content_words(&post.text, tagger),
        _ => trace
            .steps
            .last()
            .map(|s| postprocess_claim(&s.response_text))
            .unwrap_or_default(),
    }
}
