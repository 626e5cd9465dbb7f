//! Typed columnar tables, CSV ingestion, the dataset registry, predicate
//! filtering and grouped aggregation.

mod aggregate;
mod error;
mod filter;
mod ingest;
mod inspect;
mod registry;
mod table;
mod value;

pub use aggregate::{
    aggregate_table, evaluate_int_expr, run_aggregation, AggFunc, Aggregate, AggregationPlan, GroupKey, SortKey,
};
pub use error::{Result, StoreError};
pub use filter::{eval_filter, filter_table, literal_value};
pub use ingest::{infer_kind, ingest_csv, ingest_reader};
pub use inspect::apply_inspect;
pub use registry::{DatasetDescriptor, GeometryRef, Manifest, ManifestEntry, Registry, MANIFEST_VERSION};
pub use table::{ColumnSpec, Table};
pub use value::{format_number, Value, ValueKind};
