//! Trains and stores a least-squares model behind an accuracy gate, applies
//! it to new rows, then shows a gate rejecting a weak classifier.
//!
//! ```text
//! cargo run -p inquest-core --example predict_with_gate
//! ```

use inquest::ml::{execute_mql, ExecContext, Execution, MlError, ModelStore};
use inquest::mql::parse_statement;
use inquest::Registry;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let mut train = String::from("id,rooms,age,price\n");
    let mut noisy = String::from("x,y,class\n");
    for i in 0..120 {
        let (rooms, age) = (1 + i % 6, (i * 7) % 40);
        let wobble = ((i as f64) * 1.7).sin();
        train.push_str(&format!("{i},{rooms},{age},{}\n", 50.0 + 30.0 * rooms as f64 - 0.8 * age as f64 + wobble));
        // labels unrelated to the features
        noisy.push_str(&format!(
            "{wobble},{},{}\n",
            ((i as f64) * 0.3).cos(),
            if (i * 31) % 7 < 3 { "a" } else { "b" }
        ));
    }
    std::fs::write(dir.path().join("houses.csv"), train)?;
    std::fs::write(dir.path().join("probe.csv"), "id,rooms,age\n900,3,10\n901,5,2\n")?;
    std::fs::write(dir.path().join("noise.csv"), noisy)?;

    let registry = Registry::new();
    registry.register_csv("houses", &dir.path().join("houses.csv"), "house prices", None)?;
    registry.register_csv("probe", &dir.path().join("probe.csv"), "houses to price", None)?;
    registry.register_csv("noise", &dir.path().join("noise.csv"), "labels unrelated to features", None)?;
    let store = ModelStore::new(dir.path().join("models"));
    let ctx = ExecContext::new(&registry).with_models(&store);

    let run = |text: &str| execute_mql(&parse_statement(text).expect("valid MQL"), &ctx);

    let Execution::Model(model) =
        run("CONSTRUCT MODEL pricing AS PREDICTION price WITH MODEL ACCURACY 0.9 FEATURES rooms, age FROM houses;")?
    else {
        unreachable!()
    };
    println!("{}", model.metadata_table().to_text(20));

    let applied = run("GENERATE PREDICTION price OVER probe USING MODEL pricing LABEL id FROM houses;")?;
    println!("predictions\n{}", applied.primary_table().to_text(10));

    match run("GENERATE CLASSIFICATION INTO a, b WITH MODEL ACCURACY 0.95 LABEL class FEATURES x, y FROM noise;") {
        Err(e) if matches!(e.error, MlError::Accuracy { .. }) => println!("gate rejected the classifier: {e}"),
        Err(e) => return Err(e.into()),
        Ok(_) => println!("classifier unexpectedly passed the gate"),
    }
    Ok(())
}
