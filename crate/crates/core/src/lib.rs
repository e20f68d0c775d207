//! Corpus-analysis toolkit for AAVE grammatical feature usage.
//!
//! The crate ingests interview transcripts, tweet sets, or JSONL corpora,
//! tags them with a deterministic lexicon-driven POS tagger, runs seven
//! rule-based feature detectors, and compares per-feature densities between
//! a human corpus and model-generated corpora using two-proportion tests
//! with exact-test fallback and Newcombe/Wilson confidence intervals.
//! A lexicon-and-rules sentiment scorer and a chat-completions generation
//! client round out the pipeline; everything is seeded and reproducible.

pub mod analysis;
pub mod config;
pub mod corpus;
pub mod detectors;
pub mod generator;
pub mod pipeline;
pub mod report;
pub mod sentiment;
pub mod stats;
pub mod tagger;
pub mod text;

/// Scalar used by all shipped analyses. The numeric kernels in [`stats`]
/// are generic over `num_traits::Float`; everything downstream fixes f64.
pub type Real = f64;
