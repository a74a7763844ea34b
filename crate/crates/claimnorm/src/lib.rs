//! Claim-normalization toolkit for check-worthy claims in social media
//! posts: corpus handling, prompting/refinement pipelines over a
//! record/replay LLM gateway, a self-contained METEOR scorer, and an
//! evaluation harness with error bars.

pub mod cli;
pub mod corpus;
pub mod eval;
pub mod gateway;
pub mod meteor;
pub mod pipelines;
pub mod prompts;
