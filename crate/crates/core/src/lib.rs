//! External-memory construction of the Burrows-Wheeler transform and LCP
//! array for a collection of equal-length strings.
//!
//! The collection is processed as disk-backed lists that are only ever read
//! and written front to back. The build has two stages:
//!
//! 1. [`partial_bwt`] computes, column by column, the transform of every
//!    suffix length separately — k+1 lists of m symbols each, with only one
//!    column of the input resident in memory at a time.
//! 2. [`merge`] interleaves those per-length transforms into the transform
//!    of the whole collection by repeated prefix refinement, carrying the
//!    LCP array along for free. Each pass is a single sweep; the number of
//!    passes is one more than the largest LCP value.
//!
//! [`oracle`] holds an independent in-memory reference (comparison-based,
//!    quadratic) used by the test suites, [`seqlist`] the disk-list layer
//!    with its traffic instrumentation, [`ingest`] parsing and alphabet
//!    coding, and [`stats`] the counter report written next to the outputs.

pub mod error;
pub mod ingest;
pub mod merge;
pub mod oracle;
pub mod partial_bwt;
pub mod seqlist;
pub mod stats;

pub use error::{Error, Result};
