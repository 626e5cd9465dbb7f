//! Conversational investigative analytics over registered tabular datasets.
//!
//! A question in plain language is mapped to an ordered list of data and
//! query tasks. Data tasks bind a registered table; query tasks are
//! translated into aggregation plans, MQL statements or chart directives,
//! which are executed and then explained in prose.
//!
//! The pieces, bottom-up:
//!
//! - [`mql`]: the declarative ML query language (GENERATE / CONSTRUCT / INSPECT).
//! - [`store`]: typed columnar tables, CSV ingestion, the dataset registry,
//!   filters, aggregation and cleaning directives.
//! - [`ml`]: feature encoding, k-means, least squares, k-nearest-neighbours,
//!   the model store and the MQL executor.
//! - [`viz`]: SVG renderers for trend lines, bar charts, choropleths and
//!   cluster scatter plots.
//! - [`pipeline`]: tasks, the agent interface, dataset resolution, plan
//!   translation, explanation and chat sessions.
//! - [`fixture`]: seeded synthetic datasets with ground-truth sidecars.
//!
//! Runnable examples live under `crates/core/examples/`.

pub mod fixture;
pub mod ml;
pub mod mql;
pub mod pipeline;
pub mod store;
pub mod timefmt;
pub mod viz;

pub use mql::{parse_script, parse_statement, MqlStatement, ParseError};
pub use pipeline::{ChatTurn, Session, SessionConfig};
pub use store::{Registry, Table, Value};
