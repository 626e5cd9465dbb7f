//! Ingests a CSV, then runs grouped aggregations over it: reports per month,
//! per district, and a filtered count.
//!
//! ```text
//! cargo run -p inquest-core --example csv_aggregation
//! ```

use inquest::fixture::{generate, PROTHOMALO};
use inquest::mql::parse_statement;
use inquest::store::{run_aggregation, Aggregate, AggregationPlan, GroupKey, Registry};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let paths = generate(300, 42).write(dir.path())?;
    let registry = Registry::new();
    let (descriptor, table) =
        registry.register_csv(PROTHOMALO, &paths.prothomalo, "newspaper incident reports", None)?;
    println!("{}: {} rows, {} columns", descriptor.name, table.row_count(), table.column_count());
    for spec in table.schema() {
        println!("  {:<20} {:?}", spec.name, spec.kind);
    }

    let monthly = AggregationPlan::new(PROTHOMALO)
        .group(GroupKey::Month("last-published-at".into()))
        .aggregate(Aggregate::count_all());
    println!("\nreports per month\n{}", run_aggregation(&monthly, &registry)?.to_text(12));

    let districts = AggregationPlan::new(PROTHOMALO)
        .group(GroupKey::Column("district-tag".into()))
        .aggregate(Aggregate::count_all())
        .sort_by("count", true);
    println!("reports per district\n{}", run_aggregation(&districts, &registry)?.to_text(5));

    // A WHERE clause parsed from MQL narrows the rows first.
    let stmt =
        parse_statement("GENERATE CLUSTER OF 2 FEATURES headline FROM ProthomAlo WHERE \"district-tag\" = 'Dhaka';")?;
    let filter = stmt.as_generate().and_then(|b| b.filter.clone()).expect("statement has a WHERE clause");
    let dhaka = AggregationPlan::new(PROTHOMALO).filter(filter).aggregate(Aggregate::count_all());
    println!("reports in Dhaka\n{}", run_aggregation(&dhaka, &registry)?.to_text(1));
    Ok(())
}
