//! Generates the synthetic incident-report fixture and prints its ground
//! truth: row counts, the peak month and the busiest districts.
//!
//! ```text
//! cargo run -p inquest-core --example fixtures -- [rows] [seed] [out-dir]
//! ```

use inquest::fixture::{generate, DEFAULT_ROWS, DEFAULT_SEED};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let rows = args.next().map(|r| r.parse()).transpose()?.unwrap_or(DEFAULT_ROWS);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(DEFAULT_SEED);
    let fx = generate(rows, seed);
    let truth = &fx.truth;
    println!("{} reports, seed {}", truth.rows, truth.seed);
    println!("peak month {} ({} reports)", truth.peak_month, truth.monthly[&truth.peak_month]);
    let mut districts: Vec<_> = truth.districts.iter().collect();
    districts.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
    for (name, n) in districts.iter().take(5) {
        println!("  {name:<14} {n}");
    }
    println!("planted topics: {}", truth.topic_names.join(", "));
    println!("annual totals: {:?}", truth.annual_totals);
    if let Some(dir) = args.next() {
        let paths = fx.write(std::path::Path::new(&dir))?;
        println!("manifest written to {}", paths.manifest.display());
    }
    Ok(())
}
