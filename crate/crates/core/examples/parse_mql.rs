//! Parses MQL statements, prints their canonical form, and shows the caret
//! diagnostic for a malformed one.
//!
//! ```text
//! cargo run -p inquest-core --example parse_mql -- ["STATEMENT"]
//! ```

use inquest::mql::parse_statement;

const SAMPLES: [&str; 4] = [
    "generate display of cluster of 3 algorithm kmeans features headline from ProthomAlo",
    "CONSTRUCT MODEL trend AS PREDICTION total WITH MODEL ACCURACY 0.8 FEATURES year FROM NGORep WHERE category = 'total';",
    "GENERATE CLASSIFICATION INTO urban, rural LABEL area FEATURES \"district-tag\", headline FROM ProthomAlo;",
    "GENERATE PREDICTION y FEATURES FROM t;",
];

fn main() {
    let input: Vec<String> = std::env::args().skip(1).collect();
    let statements: Vec<String> =
        if input.is_empty() { SAMPLES.iter().map(|s| s.to_string()).collect() } else { vec![input.join(" ")] };
    for text in &statements {
        println!("input:     {text}");
        match parse_statement(text) {
            Ok(stmt) => println!("canonical: {stmt}\n"),
            Err(e) => println!("{}\n", e.render(text)),
        }
    }
}
