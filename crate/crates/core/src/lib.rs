//! Dotless Arabic text analysis: undotting, tokenization, corpus
//! statistics, scaling-law fits and n-gram language models.

pub mod corpus;
pub mod laws;
pub mod lm;
pub mod pipeline;
pub mod script;
pub mod stats;
pub mod tokenize;
