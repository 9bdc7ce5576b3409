//! Toolkit for turning structured representations of sentences (AMR graphs
//! in PENMAN notation, Penn-Treebank-style constituency trees, and
//! first-order-logic formulas) into rule-based natural-language
//! descriptions, plus the machinery that typically surrounds such
//! descriptions in LLM experiments: prompt-variant rendering, hybrid SFT
//! mixture building, classification/translation/SQL metrics, and a cached
//! batch evaluation runner for chat-completion endpoints.
//!
//! The pipeline, end to end:
//!
//! 1. [`amr`] / [`pst`] / [`fol`] parse the three structure kinds.
//! 2. [`nld`] maps each structure to a list of plain-English sentences
//!    through an editable dictionary.
//! 3. [`refine`] polishes those sentences, either offline (deterministic)
//!    or through a language-model endpoint with multi-generation voting.
//! 4. [`promptkit`] assembles task prompts in three variants (plain input,
//!    raw structure attached, description attached) under chain-of-thought
//!    or one-shot strategies.
//! 5. [`gensr`] mixes instruction pairs with and without structure blocks
//!    into a reproducible SFT dataset.
//! 6. [`evalrun`] batches prompts against an endpoint with caching, and
//!    [`metrics`] scores the extracted answers.
//!
//! Every step is exposed both as library functions (see `examples/`) and
//! through the `srnld` command-line binary.

pub mod amr;
pub mod cli;
pub mod evalrun;
pub mod fol;
pub mod gensr;
pub mod metrics;
pub mod mockend;
pub mod nld;
pub mod promptkit;
pub mod pst;
pub mod refine;
