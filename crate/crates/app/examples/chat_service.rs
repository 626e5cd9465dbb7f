//! Starts the HTTP service on an ephemeral port over a generated fixture,
//! plays the scripted conversation through it and prints each reply.
//!
//! ```text
//! cargo run -p inquest-app --example chat_service
//! ```

use inquest::fixture::{generate, SCRIPT};
use inquest_app::service::{spawn, ServiceConfig};
use serde_json::{json, Value};

fn post(http: &ureq::Agent, url: &str, body: Value) -> Result<Value, Box<dyn std::error::Error>> {
    let mut resp = http.post(url).header("content-type", "application/json").send(body.to_string())?;
    Ok(serde_json::from_slice(&resp.body_mut().read_to_vec()?)?)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let paths = generate(300, 42).write(&dir.path().join("data"))?;
    let rt = tokio::runtime::Runtime::new()?;
    let (addr, _server) = rt.block_on(spawn(ServiceConfig::new(&paths.manifest, dir.path().join("artifacts"))))?;
    let base = format!("http://{addr}");
    let http = ureq::Agent::new_with_defaults();
    println!("service listening on {base}");

    let mut resp = http.get(format!("{base}/datasets")).call()?;
    let datasets: Value = serde_json::from_slice(&resp.body_mut().read_to_vec()?)?;
    for d in datasets["datasets"].as_array().into_iter().flatten() {
        println!("dataset {} ({} rows): {}", d["name"], d["rows"], d["description"]);
    }

    let session = post(&http, &format!("{base}/sessions"), json!({ "seed": 42 }))?;
    let id = session["session_id"].as_str().unwrap_or_default();
    for q in SCRIPT {
        let turn = post(&http, &format!("{base}/sessions/{id}/messages"), json!({ "text": q }))?;
        println!("\n> {q}\n{}", turn["explanation"].as_str().unwrap_or_default());
        for a in turn["artifacts"].as_array().into_iter().flatten() {
            println!("  chart: {base}{}", a["url"].as_str().unwrap_or_default());
        }
    }
    Ok(())
}
