//! Clusters newspaper headlines with k-means over TF-IDF features and writes
//! the projected scatter chart.
//!
//! ```text
//! cargo run -p inquest-core --example cluster_headlines -- [k] [out.svg]
//! ```

use inquest::fixture::generate;
use inquest::ml::{execute_mql, ExecContext, Execution};
use inquest::mql::parse_statement;
use inquest::viz::render_ml_result;
use inquest::Registry;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().map(|k| k.parse()).transpose()?.unwrap_or(3);
    let out = args.next().unwrap_or_else(|| "clusters.svg".into());

    let dir = tempfile::tempdir()?;
    let fx = generate(300, 42);
    let registry = Registry::open(fx.write(dir.path())?.manifest)?;
    let text = format!("GENERATE DISPLAY OF CLUSTER OF {k} ALGORITHM KMeans FEATURES headline FROM ProthomAlo;");
    let Execution::Ml(result) = execute_mql(&parse_statement(&text)?, &ExecContext::new(&registry))? else {
        unreachable!("GENERATE yields model output")
    };
    let clustering = result.clustering.as_ref().expect("cluster task");
    println!("{text}");
    println!("k = {}, inertia = {:.3} after {} iterations", clustering.k, clustering.inertia, clustering.iterations);
    println!("{}", result.summary.to_text(k));
    std::fs::write(&out, render_ml_result(&result, "headline clusters")?.svg)?;
    println!("scatter written to {out}");
    Ok(())
}
