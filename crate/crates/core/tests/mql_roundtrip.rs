use inquest::mql::{parse_script, parse_statement};
use inquest_testkit::mqlgen::statements;

#[test]
fn generated_statements_round_trip() {
    for (i, text) in statements(1000, 42).iter().enumerate() {
        let first = parse_statement(text).unwrap_or_else(|e| panic!("#{i} {text:?}: {}", e.render(text)));
        let printed = first.to_string();
        let second =
            parse_statement(&printed).unwrap_or_else(|e| panic!("#{i} reprint {printed:?}: {}", e.render(&printed)));
        assert!(first.same_structure(&second), "#{i}: {text:?} -> {printed:?}");
        assert_eq!(printed, second.to_string(), "printing is a fixed point");
    }
}

#[test]
fn keyword_case_does_not_matter() {
    let q = "GENERATE DISPLAY OF CLUSTER OF 3 ALGORITHM KMeans FEATURES headline FROM ProthomAlo;";
    let lower = "generate display of cluster of 3 algorithm KMeans features headline from ProthomAlo;";
    assert!(parse_statement(q).unwrap().same_structure(&parse_statement(lower).unwrap()));
}

#[test]
fn script_of_generated_statements() {
    let all = statements(50, 7);
    let parsed = parse_script(&all.join("\n")).unwrap();
    assert_eq!(parsed.len(), 50);
}
