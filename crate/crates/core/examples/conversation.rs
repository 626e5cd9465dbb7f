//! Runs the scripted four-question conversation over a generated fixture
//! and prints the transcript.
//!
//! ```text
//! cargo run -p inquest-core --example conversation -- [rows] [out-dir]
//! ```

use std::sync::Arc;

use inquest::fixture::{generate, DEFAULT_ROWS, DEFAULT_SEED, SCRIPT};
use inquest::pipeline::{render_text, Session, SessionConfig};
use inquest::Registry;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let rows = args.next().map(|r| r.parse()).transpose()?.unwrap_or(DEFAULT_ROWS);
    let out =
        args.next().map(std::path::PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("inquest-conversation"));
    let paths = generate(rows, DEFAULT_SEED).write(&out.join("data"))?;
    let registry = Arc::new(Registry::open(&paths.manifest)?);
    let config = SessionConfig { artifact_dir: out.join("artifacts"), ..SessionConfig::default() };
    let mut session = Session::new("example", registry, config);
    let turns: Vec<_> = SCRIPT.iter().map(|q| session.run_turn(q)).collect();
    print!("{}", render_text(&turns));
    eprintln!("charts written under {}", session.artifact_dir().display());
    Ok(())
}
