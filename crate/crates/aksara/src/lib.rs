//! Corpus ingestion, exports, the `aksara` command line and the read-only
//! HTTP API, all layered over [`aksara_core`].

pub mod cli;
pub mod corpus;
pub mod error;
pub mod export;
pub mod query;
pub mod server;

pub use corpus::{CorpusIndex, DocumentRecord, IngestWarning};
pub use error::{Error, Result};
pub use query::Query;
